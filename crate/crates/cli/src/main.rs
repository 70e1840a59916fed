//! Command-line front end: model building, quantity computation, oracle
//! cross-checks and figure-data emission.
//!
//! Exit codes: 0 success, 2 configuration error, 3 degeneracy refusal,
//! 4 dimension cap exceeded, 5 solver non-convergence, 1 other failures.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use censemble::correlators::{
    c_two_point_regulated, c_two_point_with_plateau, form_factor, form_factor_window_average,
    spacing_ratios, FormFactorKind,
};
use censemble::ensemble::{
    build_diagonalizer, frame_potential2, frame_potential2_exact, frame_potential2_mc, ipr_bar,
    plateau_exact, sample_c,
};
use censemble::error::Error as CoreError;
use censemble::models::{Boundary, ModelSpec, Parity};
use censemble::plateau::{bootstrap_form, center, plateau_residual, solve_newton, solve_qubit};
use censemble::stats::{stream_rng, RunningStats};
use censemble::tensor::{eigh, max_abs_diff};
use censemble::volume::{
    cardinality, duality_check, entropy_estimate, log_volume, reference_cardinality,
    CardinalityKind, GateSetSpec,
};
use censemble::{EigenSystem, HermitianOperator};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::io::{
    write_json_report, write_matrix_binary, write_matrix_csv, write_series_csv, Meta, SeriesRow,
};

#[derive(Parser)]
#[command(name = "censemble", version, about = "Eigenvector-ensemble numerics for a fixed Hamiltonian")]
struct Cli {
    /// Worker threads (default: CENSEMBLE_THREADS env var, then hardware).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ModelSource {
    /// Model spec JSON written by `model` (or hand-written).
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Shorthand for a GUE model of this dimension.
    #[arg(short = 'd', long, value_name = "DIM")]
    d: Option<usize>,
    /// Seed for the shorthand GUE model.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl ModelSource {
    fn resolve(&self) -> Result<ModelSpec, CliError> {
        match (&self.model, self.d) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("bad model spec: {e}")))
            }
            (None, Some(d)) => Ok(ModelSpec::Gue { dim: d, seed: self.seed }),
            (Some(_), Some(_)) => Err(CliError::Config(
                "pass either --model or --d, not both".into(),
            )),
            (None, None) => Err(CliError::Config("need --model FILE or --d DIM".into())),
        }
    }
}

#[derive(Args)]
struct TimeGrid {
    #[arg(long, default_value_t = 0.0)]
    tmin: f64,
    #[arg(long)]
    tmax: f64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
}

impl TimeGrid {
    fn times(&self) -> Result<Vec<f64>, CliError> {
        if self.steps < 1 || self.tmax <= self.tmin {
            return Err(CliError::Config(
                "need steps >= 1 and tmax > tmin".into(),
            ));
        }
        let h = (self.tmax - self.tmin) / self.steps as f64;
        Ok((0..=self.steps).map(|k| self.tmin + k as f64 * h).collect())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a Hamiltonian, write its matrix and a spectrum summary.
    Model {
        #[command(flatten)]
        kind: ModelKindArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Spectral form factor time series.
    Sff {
        #[command(flatten)]
        source: ModelSource,
        #[command(flatten)]
        grid: TimeGrid,
        /// Thermal regulator; 0 selects the infinite-temperature kind.
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Twofold form factor instead of the single one.
        #[arg(long, value_enum)]
        twofold: Option<TwofoldKind>,
        #[arg(long, default_value = "sff.csv")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Ensemble-averaged two-point function; optional Monte-Carlo cross-check.
    Twopoint {
        #[command(flatten)]
        source: ModelSource,
        #[command(flatten)]
        grid: TimeGrid,
        /// Observable seed: W, V are GUE-sampled Hermitian matrices.
        #[arg(long, default_value_t = 100)]
        obs_seed: u64,
        /// Thermal regulator (regulated ordering); 0 = infinite temperature.
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Cross-check the closed form against sampled orbit members.
        #[arg(long)]
        check_mc: bool,
        /// Samples per time point for --check-mc.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value = "twopoint.csv")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Ensemble-averaged OTOC (closed form) or the direct single-H OTOC.
    Otoc {
        #[command(flatten)]
        source: ModelSource,
        #[command(flatten)]
        grid: TimeGrid,
        #[arg(long, default_value_t = 100)]
        obs_seed: u64,
        /// Evaluate the exact single-Hamiltonian OTOC instead.
        #[arg(long)]
        direct: bool,
        #[arg(long, default_value = "otoc.csv")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Solve the plateau equation and report the bootstrap reconstruction.
    Plateau {
        #[command(flatten)]
        source: ModelSource,
        /// Run the power-basis Newton solve (the only mode).
        #[arg(long)]
        solve: bool,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value = "plateau.json")]
        out: PathBuf,
    },
    /// Frame potential: exact value, printed formula and MC estimate.
    Frame {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value = "frame.json")]
        out: PathBuf,
    },
    /// Ensemble volume, cardinality, duality residual and entropy estimate.
    Volume {
        #[command(flatten)]
        source: ModelSource,
        /// Epsilon-ball regulator.
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value = "volume.json")]
        out: PathBuf,
    },
    /// Figure-data tables.
    Figures {
        #[arg(long, value_enum)]
        which: Figure,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TwofoldKind {
    Sym,
    Antisym,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    Formfactor,
    Framepotential,
    Entropy,
}

#[derive(Args)]
struct ModelKindArgs {
    #[arg(long, value_enum)]
    kind: ModelKind,
    /// Dimension for gue / equally-spaced / diag-pert.
    #[arg(short = 'd', long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    spacing: f64,
    /// Bose-Hubbard chain length.
    #[arg(long, alias = "l")]
    sites: Option<usize>,
    /// Bose-Hubbard boson number.
    #[arg(long, alias = "n")]
    bosons: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    hopping: f64,
    #[arg(long, default_value_t = 1.0)]
    interaction: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, value_enum, default_value_t = ParityArg::None)]
    parity: ParityArg,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    boundary: BoundaryArg,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long, default_value_t = 2)]
    locality: usize,
    #[arg(long, default_value_t = 1.0)]
    coupling_scale: f64,
    /// Restrict the k-local model to Y-free (real) Pauli strings.
    #[arg(long)]
    real_couplings: bool,
    /// Perturbation strength for diag-pert.
    #[arg(long, default_value_t = 1.0)]
    strength: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Gue,
    EquallySpaced,
    BoseHubbard,
    KLocal,
    DiagPert,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    None,
    Even,
    Odd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundaryArg {
    Open,
    Periodic,
}

impl ModelKindArgs {
    fn to_spec(&self) -> Result<ModelSpec, CliError> {
        let need = |opt: Option<usize>, name: &str| {
            opt.ok_or_else(|| CliError::Config(format!("--{name} is required for this kind")))
        };
        Ok(match self.kind {
            ModelKind::Gue => ModelSpec::Gue {
                dim: need(self.d, "d")?,
                seed: self.seed,
            },
            ModelKind::EquallySpaced => ModelSpec::EquallySpaced {
                dim: need(self.d, "d")?,
                spacing: self.spacing,
            },
            ModelKind::BoseHubbard => ModelSpec::BoseHubbard {
                sites: need(self.sites, "sites")?,
                bosons: need(self.bosons, "bosons")?,
                hopping: self.hopping,
                interaction: self.interaction,
                theta: self.theta,
                parity: match self.parity {
                    ParityArg::None => Parity::None,
                    ParityArg::Even => Parity::Even,
                    ParityArg::Odd => Parity::Odd,
                },
                boundary: match self.boundary {
                    BoundaryArg::Open => Boundary::Open,
                    BoundaryArg::Periodic => Boundary::Periodic,
                },
            },
            ModelKind::KLocal => ModelSpec::KLocalQubit {
                qubits: need(self.qubits, "qubits")?,
                locality: self.locality,
                coupling_scale: self.coupling_scale,
                seed: self.seed,
                time_reversal_breaking: !self.real_couplings,
            },
            ModelKind::DiagPert => {
                let d = need(self.d, "d")?;
                ModelSpec::DiagonalPlusPerturbation {
                    levels: (0..d).map(|l| l as f64 * self.spacing).collect(),
                    strength: self.strength,
                    seed: self.seed,
                }
            }
        })
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Core(CoreError),
    Io(std::io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                CoreError::Degenerate { .. } => 3,
                CoreError::DimensionCap { .. } | CoreError::EnumerationCap { .. } => 4,
                CoreError::SolverStalled { .. } | CoreError::EigenConvergence => 5,
                CoreError::InvalidArgument(_) => 2,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => format!("configuration error: {m}"),
            CliError::Core(e) => format!("{e}"),
            CliError::Io(e) => format!("io error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads.or_else(|| {
        std::env::var("CENSEMBLE_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    }) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn diagonalize(spec: &ModelSpec) -> Result<(HermitianOperator, EigenSystem), CliError> {
    let h = spec.build()?;
    let es = eigh(&h, 1e-12)?;
    Ok((h, es))
}

/// W, V observables generated deterministically from the observable seed.
fn observables(
    d: usize,
    obs_seed: u64,
) -> Result<(HermitianOperator, HermitianOperator), CliError> {
    let w = censemble::models::gue_sample(d, obs_seed)?;
    let v = censemble::models::gue_sample(d, obs_seed.wrapping_add(1))?;
    Ok((w, v))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Model { kind, out, format } => cmd_model(&kind, &out, format),
        Command::Sff {
            source,
            grid,
            beta,
            twofold,
            out,
            format,
        } => cmd_sff(&source, &grid, beta, twofold, &out, format),
        Command::Twopoint {
            source,
            grid,
            obs_seed,
            beta,
            check_mc,
            samples,
            out,
            format,
        } => cmd_twopoint(&source, &grid, obs_seed, beta, check_mc, samples, &out, format),
        Command::Otoc {
            source,
            grid,
            obs_seed,
            direct,
            out,
            format,
        } => cmd_otoc(&source, &grid, obs_seed, direct, &out, format),
        Command::Plateau {
            source,
            solve,
            max_iter,
            tol,
            out,
        } => cmd_plateau(&source, solve, max_iter, tol, &out),
        Command::Frame {
            source,
            samples,
            out,
        } => cmd_frame(&source, samples, &out),
        Command::Volume { source, eps, out } => cmd_volume(&source, eps, &out),
        Command::Figures { which, out } => cmd_figures(which, &out),
    }
}

#[derive(Serialize)]
struct ModelSummary {
    dimension: usize,
    e_min: f64,
    e_max: f64,
    mean_spacing: f64,
    spacing_ratio_mean: Option<f64>,
    degenerate: bool,
    spectrum: Vec<f64>,
}

fn cmd_model(kind: &ModelKindArgs, out: &Path, format: Format) -> Result<(), CliError> {
    let spec = kind.to_spec()?;
    let (h, es) = diagonalize(&spec)?;
    std::fs::create_dir_all(out)?;
    let config = serde_json::to_value(&spec).expect("spec serializes");
    let meta = Meta::new("model", kind.seed, config.clone());

    std::fs::write(
        out.join("model.json"),
        serde_json::to_string_pretty(&spec).expect("spec serializes") + "\n",
    )?;
    write_matrix_binary(&out.join("hamiltonian.bin"), h.matrix())?;
    if format == Format::Csv {
        write_matrix_csv(&out.join("hamiltonian.csv"), h.matrix())?;
    }
    let summary = ModelSummary {
        dimension: es.dim(),
        e_min: es.values[0],
        e_max: es.values[es.dim() - 1],
        mean_spacing: es.mean_spacing,
        spacing_ratio_mean: spacing_ratios(&es).ok().map(|(_, m)| m),
        degenerate: es.has_degeneracy(),
        spectrum: es.values.clone(),
    };
    write_json_report(&out.join("summary.json"), &meta, &summary)?;
    println!(
        "model d = {} written to {} (spacing-ratio mean {:?})",
        es.dim(),
        out.display(),
        summary.spacing_ratio_mean
    );
    Ok(())
}

fn cmd_sff(
    source: &ModelSource,
    grid: &TimeGrid,
    beta: f64,
    twofold: Option<TwofoldKind>,
    out: &Path,
    format: Format,
) -> Result<(), CliError> {
    let spec = source.resolve()?;
    let (_, es) = diagonalize(&spec)?;
    let kind = match (twofold, beta) {
        (Some(TwofoldKind::Sym), _) => FormFactorKind::TwofoldSym,
        (Some(TwofoldKind::Antisym), _) => FormFactorKind::TwofoldAntisym,
        (None, b) if b > 0.0 => FormFactorKind::FiniteT { beta: b },
        (None, _) => FormFactorKind::InfiniteT,
    };
    let rows: Vec<SeriesRow> = grid
        .times()?
        .into_iter()
        .map(|t| {
            form_factor(&es, kind, t).map(|v| SeriesRow {
                time: t,
                value: v,
                stderr: None,
            })
        })
        .collect::<Result<_, _>>()?;
    let config = serde_json::json!({
        "model": spec, "tmin": grid.tmin, "tmax": grid.tmax, "steps": grid.steps,
        "beta": beta, "kind": kind,
    });
    let meta = Meta::new("spectral-form-factor", source.seed, config);
    write_output(out, format, &meta, &rows)?;
    println!("sff series ({} points) -> {}", rows.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct McCheckRow {
    time: f64,
    closed_form: f64,
    mc_mean: f64,
    mc_stderr: f64,
    z_score: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_twopoint(
    source: &ModelSource,
    grid: &TimeGrid,
    obs_seed: u64,
    beta: f64,
    check_mc: bool,
    samples: usize,
    out: &Path,
    format: Format,
) -> Result<(), CliError> {
    let spec = source.resolve()?;
    let (_, es) = diagonalize(&spec)?;
    let d = es.dim();
    let (w, v) = observables(d, obs_seed)?;
    let g = plateau_exact(&es)?;
    let times = grid.times()?;
    let config = serde_json::json!({
        "model": spec, "tmin": grid.tmin, "tmax": grid.tmax, "steps": grid.steps,
        "beta": beta, "obs_seed": obs_seed, "check_mc": check_mc, "samples": samples,
    });

    if check_mc {
        if beta > 0.0 {
            return Err(CliError::Config(
                "--check-mc currently covers the infinite-temperature ordering".into(),
            ));
        }
        // closed form vs sampled orbit members at up to 10 representative times
        let dz = build_diagonalizer(&es)?;
        let stride = (times.len() / 10).max(1);
        let mut report = Vec::new();
        for (i, &t) in times.iter().enumerate() {
            if i % stride != 0 {
                continue;
            }
            let closed = c_two_point_with_plateau(&w, &v, &es, &g, t)?;
            let mut rng = stream_rng(source.seed, 17 + i as u64);
            let mut st = RunningStats::new();
            let phases: Vec<Complex64> = es
                .values
                .iter()
                .map(|&e| Complex64::from_polar(1.0, t * e))
                .collect();
            for _ in 0..samples {
                let s = sample_c(&dz, &mut rng);
                let cw = &s.c * w.matrix() * s.c.adjoint();
                let cv = &s.c * v.matrix() * s.c.adjoint();
                let mut tr = Complex64::new(0.0, 0.0);
                for l in 0..d {
                    for m in 0..d {
                        tr += phases[l] * cw[(l, m)] * phases[m].conj() * cv[(m, l)];
                    }
                }
                st.push(tr.re / d as f64);
            }
            // a deterministic point (t = 0) has zero spread; floor the
            // stderr so float noise does not masquerade as a discrepancy
            let z = (st.mean() - closed) / st.stderr().max(1e-12);
            report.push(McCheckRow {
                time: t,
                closed_form: closed,
                mc_mean: st.mean(),
                mc_stderr: st.stderr(),
                z_score: z,
            });
        }
        let meta = Meta::new("two-point-mc-check", source.seed, config);
        write_json_report(out, &meta, &report)?;
        let worst = report.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max);
        println!(
            "mc check at {} times -> {} (worst |z| = {worst:.2})",
            report.len(),
            out.display()
        );
        return Ok(());
    }

    let rows: Vec<SeriesRow> = times
        .into_iter()
        .map(|t| {
            let value = if beta > 0.0 {
                c_two_point_regulated(&w, &v, &es, beta, t)
            } else {
                c_two_point_with_plateau(&w, &v, &es, &g, t)
            };
            value.map(|v| SeriesRow {
                time: t,
                value: v,
                stderr: None,
            })
        })
        .collect::<Result<_, _>>()?;
    let meta = Meta::new(
        if beta > 0.0 {
            "two-point-regulated"
        } else {
            "two-point"
        },
        source.seed,
        config,
    );
    write_output(out, format, &meta, &rows)?;
    println!("two-point series ({} points) -> {}", rows.len(), out.display());
    Ok(())
}

fn cmd_otoc(
    source: &ModelSource,
    grid: &TimeGrid,
    obs_seed: u64,
    direct: bool,
    out: &Path,
    format: Format,
) -> Result<(), CliError> {
    let spec = source.resolve()?;
    let (_, es) = diagonalize(&spec)?;
    let (w, v) = observables(es.dim(), obs_seed)?;
    let times = grid.times()?;
    let rows: Vec<SeriesRow> = if direct {
        times
            .into_iter()
            .map(|t| {
                censemble::otoc::otoc_direct(&w, &v, &es, t).map(|val| SeriesRow {
                    time: t,
                    value: val,
                    stderr: None,
                })
            })
            .collect::<Result<_, _>>()?
    } else {
        let cf = censemble::otoc::OtocClosedForm::new(&w, &v, &es)?;
        times
            .into_iter()
            .map(|t| {
                cf.evaluate(t).map(|val| SeriesRow {
                    time: t,
                    value: val,
                    stderr: None,
                })
            })
            .collect::<Result<_, _>>()?
    };
    let config = serde_json::json!({
        "model": spec, "tmin": grid.tmin, "tmax": grid.tmax, "steps": grid.steps,
        "obs_seed": obs_seed, "direct": direct,
    });
    let meta = Meta::new(
        if direct { "otoc-direct" } else { "otoc-ensemble" },
        source.seed,
        config,
    );
    write_output(out, format, &meta, &rows)?;
    println!("otoc series ({} points) -> {}", rows.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct PlateauReport {
    dimension: usize,
    residual: f64,
    initial_residual: f64,
    iterations: usize,
    converged: bool,
    residual_history: Vec<f64>,
    coefficients: Vec<f64>,
    bootstrap_vs_exact_max: f64,
    qubit_closed_form_residual: Option<f64>,
}

fn cmd_plateau(
    source: &ModelSource,
    solve: bool,
    max_iter: usize,
    tol: f64,
    out: &Path,
) -> Result<(), CliError> {
    if !solve {
        return Err(CliError::Config("pass --solve to run the solver".into()));
    }
    let spec = source.resolve()?;
    let (h, es) = diagonalize(&spec)?;
    let sol = solve_newton(&h, &es, max_iter, tol)?;
    let g_boot = bootstrap_form(&sol.dphi)?;
    let g_exact = plateau_exact(&es)?;
    let gap = max_abs_diff(&g_boot, g_exact.matrix());
    let qubit_residual = if es.dim() == 2 {
        let closed = solve_qubit(&h)?;
        Some(plateau_residual(&closed, &center(&h))?)
    } else {
        None
    };
    let report = PlateauReport {
        dimension: es.dim(),
        residual: sol.report.residual,
        initial_residual: sol.report.initial_residual,
        iterations: sol.report.iterations,
        converged: sol.report.converged,
        residual_history: sol.report.residual_history.clone(),
        coefficients: sol.coefficients.clone(),
        bootstrap_vs_exact_max: gap,
        qubit_closed_form_residual: qubit_residual,
    };
    let config = serde_json::json!({"model": spec, "max_iter": max_iter, "tol": tol});
    let meta = Meta::new("plateau-solve", source.seed, config);
    write_json_report(out, &meta, &report)?;
    println!(
        "plateau solve d = {}: residual {:.3e}, bootstrap-vs-exact {:.3e} -> {}",
        report.dimension,
        report.residual,
        report.bootstrap_vs_exact_max,
        out.display()
    );
    if !sol.report.converged {
        return Err(CliError::Core(CoreError::SolverStalled {
            residual: sol.report.residual,
            iterations: sol.report.iterations,
        }));
    }
    Ok(())
}

#[derive(Serialize)]
struct FrameReport {
    dimension: usize,
    ipr_bar: f64,
    f2_exact: f64,
    f2_printed_formula: f64,
    mc_mean: f64,
    mc_stderr: f64,
    mc_samples: u64,
    z_vs_exact: f64,
    z_vs_printed: f64,
    complexity_bound_frame_potential: f64,
}

fn cmd_frame(source: &ModelSource, samples: usize, out: &Path) -> Result<(), CliError> {
    let spec = source.resolve()?;
    let (_, es) = diagonalize(&spec)?;
    let dz = build_diagonalizer(&es)?;
    let d = es.dim();
    let exact = frame_potential2_exact(d)?;
    let printed = frame_potential2(&dz)?;
    let mc = frame_potential2_mc(&dz, samples, source.seed);
    let gates = GateSetSpec::new(20, 2, (d as f64).log2().ceil().max(1.0) as usize)
        .map_err(CliError::Core)?;
    let bound =
        censemble::volume::complexity_bound_frame_potential(d, exact, &gates).map_err(CliError::Core)?;
    let report = FrameReport {
        dimension: d,
        ipr_bar: ipr_bar(&dz),
        f2_exact: exact,
        f2_printed_formula: printed,
        mc_mean: mc.mean,
        mc_stderr: mc.stderr,
        mc_samples: mc.samples,
        z_vs_exact: mc.z_score(exact),
        z_vs_printed: mc.z_score(printed),
        complexity_bound_frame_potential: bound,
    };
    let config = serde_json::json!({"model": spec, "samples": samples});
    let meta = Meta::new("frame-potential", source.seed, config);
    write_json_report(out, &meta, &report)?;
    println!(
        "frame potential d = {d}: exact {:.4}, printed formula {:.4}, mc {:.4} +- {:.4} -> {}",
        report.f2_exact,
        report.f2_printed_formula,
        report.mc_mean,
        report.mc_stderr,
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct VolumeReport {
    dimension: usize,
    log_volume_dimensionful: f64,
    log_volume_normalized: f64,
    log_cardinality: f64,
    log_cardinality_haar: f64,
    cardinality_ratio: f64,
    duality_residual: Option<f64>,
    spacing_variance: f64,
    entropy_estimate: f64,
}

fn cmd_volume(source: &ModelSource, eps: f64, out: &Path) -> Result<(), CliError> {
    let spec = source.resolve()?;
    let (_, es) = diagonalize(&spec)?;
    let d = es.dim();
    let sigma_sq = {
        let mean = 1.0; // normalized spacings have unit mean by construction
        es.spacings
            .iter()
            .map(|s| (s - mean) * (s - mean))
            .sum::<f64>()
            / es.spacings.len() as f64
    };
    let duality = duality_check(&es).ok();
    let report = VolumeReport {
        dimension: d,
        log_volume_dimensionful: log_volume(&es, false)?.log_magnitude,
        log_volume_normalized: log_volume(&es, true)?.log_magnitude,
        log_cardinality: cardinality(&es, eps)?.log_magnitude,
        log_cardinality_haar: reference_cardinality(d, eps, CardinalityKind::Haar)?
            .log_magnitude,
        cardinality_ratio: cardinality(&es, eps)?.log_magnitude
            / reference_cardinality(d, eps, CardinalityKind::Haar)?.log_magnitude,
        duality_residual: duality,
        spacing_variance: sigma_sq,
        entropy_estimate: entropy_estimate(d, sigma_sq, eps)?,
    };
    let config = serde_json::json!({"model": spec, "eps": eps});
    let meta = Meta::new("volume", source.seed, config);
    write_json_report(out, &meta, &report)?;
    println!(
        "volume d = {d}: log|E_C| = {:.2}, ratio to Haar = {:.4} -> {}",
        report.log_cardinality,
        report.cardinality_ratio,
        out.display()
    );
    Ok(())
}

fn cmd_figures(which: Figure, out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out)?;
    match which {
        Figure::Formfactor => {
            // decay / ramp / plateau of the infinite-temperature form factor
            let spec = ModelSpec::Gue { dim: 64, seed: 1 };
            let (_, es) = diagonalize(&spec)?;
            let d = es.dim() as f64;
            let t_heis = std::f64::consts::TAU / es.mean_spacing;
            let mut rows = Vec::new();
            let steps = 2000;
            for k in 0..=steps {
                let t = 3.0 * t_heis * k as f64 / steps as f64;
                rows.push(SeriesRow {
                    time: t,
                    value: form_factor(&es, FormFactorKind::InfiniteT, t)?,
                    stderr: None,
                });
            }
            let late = form_factor_window_average(
                &es,
                FormFactorKind::InfiniteT,
                1.5 * t_heis,
                3.0 * t_heis,
                4000,
            )?;
            let config = serde_json::json!({"model": spec, "t_heisenberg": t_heis});
            let meta = Meta::new("figure-formfactor", 1, config);
            write_series_csv(&out.join("formfactor.csv"), &meta, &rows)?;
            println!(
                "formfactor: value(0) = {} (= d^2), late-window mean = {late:.2} (d = {d}) -> {}",
                rows[0].value,
                out.join("formfactor.csv").display()
            );
        }
        Figure::Framepotential => {
            // sweep IPR via diag + lambda * GUE; emit the printed formula's
            // deviation (minimum 0 at IPR = 2/(d+1)) next to the exact one
            let d = 16;
            #[derive(Serialize)]
            struct Row {
                lambda: f64,
                ipr_bar: f64,
                f2_printed_minus_2: f64,
                f2_exact_minus_2: f64,
            }
            let mut rows = Vec::new();
            for k in 0..=20 {
                let lambda = k as f64 / 20.0 * 2.0;
                let levels: Vec<f64> = (0..d).map(|l| l as f64 * 4.0 / d as f64).collect();
                let spec = ModelSpec::DiagonalPlusPerturbation {
                    levels,
                    strength: lambda,
                    seed: 7,
                };
                let (_, es) = diagonalize(&spec)?;
                let dz = build_diagonalizer(&es)?;
                rows.push(Row {
                    lambda,
                    ipr_bar: ipr_bar(&dz),
                    f2_printed_minus_2: frame_potential2(&dz)? - 2.0,
                    f2_exact_minus_2: frame_potential2_exact(d)? - 2.0,
                });
            }
            let config = serde_json::json!({"d": d, "seed": 7});
            let meta = Meta::new("figure-framepotential", 7, config);
            write_json_report(&out.join("framepotential.json"), &meta, &rows)?;
            println!(
                "framepotential table ({} rows) -> {}",
                rows.len(),
                out.join("framepotential.json").display()
            );
        }
        Figure::Entropy => {
            #[derive(Serialize)]
            struct Row {
                d: usize,
                sigma_sq: f64,
                entropy: f64,
                cardinality_log: f64,
                ratio_to_haar: f64,
                bound: f64,
            }
            let gates = GateSetSpec::new(20, 2, 8).map_err(CliError::Core)?;
            let mut rows = Vec::new();
            for &d in &[8usize, 16, 32, 64] {
                for &sigma_sq in &[0.0, 0.1781, 1.0] {
                    let entropy = entropy_estimate(d, sigma_sq, 1.0)?;
                    let spec = ModelSpec::EquallySpaced {
                        dim: d,
                        spacing: 1.0,
                    };
                    let (_, es) = diagonalize(&spec)?;
                    let card = cardinality(&es, 1.0)?.log_magnitude;
                    let haar = reference_cardinality(d, 1.0, CardinalityKind::Haar)?.log_magnitude;
                    rows.push(Row {
                        d,
                        sigma_sq,
                        entropy,
                        cardinality_log: card,
                        ratio_to_haar: card / haar,
                        bound: entropy / gates.log_choices(),
                    });
                }
            }
            let config = serde_json::json!({"dims": [8, 16, 32, 64], "sigma_sq": [0.0, 0.1781, 1.0]});
            let meta = Meta::new("figure-entropy", 0, config);
            write_json_report(&out.join("entropy.json"), &meta, &rows)?;
            println!(
                "entropy table ({} rows) -> {}",
                rows.len(),
                out.join("entropy.json").display()
            );
        }
    }
    Ok(())
}

fn write_output(
    out: &Path,
    format: Format,
    meta: &Meta,
    rows: &[SeriesRow],
) -> Result<(), CliError> {
    match format {
        Format::Csv => write_series_csv(out, meta, rows)?,
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                time: f64,
                value: f64,
                #[serde(skip_serializing_if = "Option::is_none")]
                stderr: Option<f64>,
            }
            let data: Vec<Row> = rows
                .iter()
                .map(|r| Row {
                    time: r.time,
                    value: r.value,
                    stderr: r.stderr,
                })
                .collect();
            write_json_report(out, meta, &data)?;
        }
    }
    Ok(())
}
