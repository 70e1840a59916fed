//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Two clauses are expected to fail and are left red on purpose; they assert
//! printed closed forms that the exact oracles refute (see the test messages
//! and the repository README):
//!   - criterion 4: the IPR-based frame-potential formula vs Monte Carlo
//!     (the exact pair average is 3 for every Hamiltonian),
//!   - criterion 8: bootstrap reconstruction of the exact plateau operator
//!     for d >= 3 (the single-operator bootstrap family cannot contain it).

use censemble::correlators::{
    c_two_point_with_plateau, form_factor, form_factor_time_average,
    form_factor_window_average, plateau_contraction, FormFactorKind,
};
use censemble::ensemble::{
    build_diagonalizer, frame_potential2, frame_potential2_bruteforce, frame_potential2_exact,
    frame_potential2_mc, moment2_enumerated, plateau_exact, right_channel_enumerated, sample_c,
};
use censemble::haar::{haar_moment, haar_sample, weingarten, CycleType};
use censemble::models::{bose_hubbard, equally_spaced, gue_sample, Boundary, Parity};
use censemble::otoc::{
    replica_hamiltonian, subspace_isometry, OtocClosedForm, ReplicaSign, Subspace,
};
use censemble::plateau::{bootstrap_form, center, plateau_residual, solve_newton, solve_qubit};
use censemble::stats::{stream_rng, RunningStats};
use censemble::tensor::{
    eigh, kron, max_abs_diff, partial_trace, s_tensor, swap_op, CMat, TraceSide,
};
use censemble::volume::{
    cardinality, clt_log_vandermonde, duality_check, entropy_estimate, harmonic,
    log_factorial, log_volume, reference_cardinality, CardinalityKind, SpacingDistribution,
};
use censemble::{EigenSystem, HermitianOperator};
use num_complex::Complex64;
use rand::Rng;

fn pass(criterion: &str, detail: String) {
    println!("[{criterion}] PASS: {detail}");
}

fn pauli_x() -> HermitianOperator {
    HermitianOperator::with_default_tol(CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0., 0.),
            Complex64::new(1., 0.),
            Complex64::new(1., 0.),
            Complex64::new(0., 0.),
        ],
    ))
    .unwrap()
}

fn random_hermitian(d: usize, seed: u64) -> HermitianOperator {
    // GUE sampling doubles as the random-Hermitian source; scale is
    // irrelevant for every identity exercised here
    gue_sample(d, seed).unwrap()
}

/// Criterion 1: the enumeration-exact 2-moment equals SWAP/d entrywise to
/// 1e-12 for d in {2..6} on GUE and Bose-Hubbard inputs.
#[test]
fn criterion_01_one_design_exact() {
    let mut worst: f64 = 0.0;
    for d in 2..=6usize {
        let h = gue_sample(d, 40 + d as u64).unwrap();
        let es = eigh(&h, 1e-12).unwrap();
        let dz = build_diagonalizer(&es).unwrap();
        let m = moment2_enumerated(&dz).unwrap();
        let mut expect = swap_op(d);
        expect.scale_mut(1.0 / d as f64);
        worst = worst.max(max_abs_diff(&m.matrix, &expect));
    }
    // Bose-Hubbard chains with Fock dimensions 2..6
    let bh_cases = [(2usize, 1usize), (2, 2), (2, 3), (2, 4), (3, 2)];
    for (sites, bosons) in bh_cases {
        let h = bose_hubbard(sites, bosons, 1.0, 1.0, 0.3, Parity::None, Boundary::Open).unwrap();
        let es = eigh(&h, 1e-12).unwrap();
        es.require_non_degenerate().unwrap();
        let d = es.dim();
        let dz = build_diagonalizer(&es).unwrap();
        let m = moment2_enumerated(&dz).unwrap();
        let mut expect = swap_op(d);
        expect.scale_mut(1.0 / d as f64);
        worst = worst.max(max_abs_diff(&m.matrix, &expect));
    }
    assert!(worst <= 1e-12, "worst entrywise error {worst}");
    pass("criterion 1", format!("1-design enumeration, worst error {worst:.2e}"));
}

/// Criterion 2: plateau invariants for 50 random non-degenerate H (d <= 16):
/// dephasing identity, trace d, SWAP bi-invariance, positivity, each 1e-10.
#[test]
fn criterion_02_plateau_identities() {
    let mut checked = 0;
    let mut seed = 0u64;
    let mut worst: f64 = 0.0;
    while checked < 50 {
        let d = 2 + (seed as usize % 15); // 2..=16
        seed += 1;
        let h = random_hermitian(d, 1000 + seed);
        let es = eigh(&h, 1e-12).unwrap();
        if es.has_degeneracy() {
            continue;
        }
        let g = plateau_exact(&es).unwrap();
        let id = CMat::identity(d, d);
        let arg = g.matrix() * kron(h.matrix(), &id).unwrap();
        let dephase = max_abs_diff(&partial_trace(&arg, TraceSide::First).unwrap(), h.matrix());
        let trace_err = (g.matrix().trace().re - d as f64).abs();
        let sw = swap_op(d);
        let swap_err = max_abs_diff(&(&sw * g.matrix()), g.matrix())
            .max(max_abs_diff(&(g.matrix() * &sw), g.matrix()));
        let min_eig = g.min_eigenvalue();
        assert!(dephase <= 1e-10, "dephasing residual {dephase} at d = {d}");
        assert!(trace_err <= 1e-10, "trace error {trace_err} at d = {d}");
        assert!(swap_err <= 1e-10, "SWAP invariance error {swap_err} at d = {d}");
        assert!(min_eig >= -1e-10, "negative eigenvalue {min_eig} at d = {d}");
        worst = worst.max(dephase).max(trace_err).max(swap_err).max(-min_eig);
        checked += 1;
    }
    pass("criterion 2", format!("50 spectra, worst deviation {worst:.2e}"));
}

/// Criterion 3: the enumeration average of C+^(x)2 (s-tensor) C^(x)2 equals
/// the eigenbasis plateau operator to 1e-12 for d <= 6.
#[test]
fn criterion_03_oracle_triangle() {
    let mut worst: f64 = 0.0;
    for d in 2..=6usize {
        let h = gue_sample(d, 70 + d as u64).unwrap();
        let es = eigh(&h, 1e-12).unwrap();
        let dz = build_diagonalizer(&es).unwrap();
        let g_enum = right_channel_enumerated(&dz, &s_tensor(d)).unwrap();
        let g_exact = plateau_exact(&es).unwrap();
        worst = worst.max(max_abs_diff(&g_enum, g_exact.matrix()));
    }
    assert!(worst <= 1e-12, "worst error {worst}");
    pass("criterion 3", format!("enumeration = eigenbasis formula, worst {worst:.2e}"));
}

/// Criterion 4: frame potential. The H = Z, d = 2 brute-force value 3 is
/// reproduced exactly (passes). The printed closed form
/// 2 + ((d+1)/(d-1)(IPR - 2/(d+1)))^2 is then required to match the MC pair
/// average within 5 sigma for GUE d in {4, 6, 8}: this clause FAILS — the
/// exact pair average is 3 for every Hamiltonian (the seed diagonalizer
/// cancels out of Tr(U+V)), which the MC confirms here to within 5 sigma
/// while sitting >5 sigma away from the printed formula's ~2.
#[test]
fn criterion_04_frame_potential() {
    // H = Z, d = 2: closed form, orbit brute force and the exact value agree
    let es = eigh(&HermitianOperator::from_diagonal(&[1.0, -1.0]), 1e-12).unwrap();
    let dz = build_diagonalizer(&es).unwrap();
    let closed = frame_potential2(&dz).unwrap();
    let brute = frame_potential2_bruteforce(2).unwrap();
    assert_eq!(brute, 3.0);
    assert!((closed - 3.0).abs() < 1e-12);
    pass(
        "criterion 4a",
        format!("H = Z, d = 2 brute force = {brute}, closed form = {closed}"),
    );

    let mut failures = Vec::new();
    for d in [4usize, 6, 8] {
        let h = gue_sample(d, 200 + d as u64).unwrap();
        let es = eigh(&h, 1e-12).unwrap();
        let dz = build_diagonalizer(&es).unwrap();
        let printed = frame_potential2(&dz).unwrap();
        let exact = frame_potential2_exact(d).unwrap();
        let mc = frame_potential2_mc(&dz, 10_000, 300 + d as u64);
        let z_exact = mc.z_score(exact);
        println!(
            "[criterion 4b] d = {d}: printed formula {printed:.4}, exact {exact}, \
             mc {:.4} +- {:.4} (z vs exact {:.2}, z vs printed {:.2})",
            mc.mean,
            mc.stderr,
            z_exact,
            mc.z_score(printed)
        );
        assert!(z_exact.abs() < 5.0, "MC disagrees with the exact value too");
        if mc.z_score(printed).abs() >= 5.0 {
            failures.push(format!(
                "d = {d}: printed formula {printed:.4} vs mc {:.4} +- {:.4} (|z| = {:.1})",
                mc.mean,
                mc.stderr,
                mc.z_score(printed).abs()
            ));
        }
    }
    assert!(
        failures.is_empty(),
        "printed frame-potential formula rejected by the MC oracle \
         (known defect: the exact pair average is 3 for every Hamiltonian; \
         see frame_potential2_exact): {}",
        failures.join("; ")
    );
    pass("criterion 4", "closed form matched MC".into());
}

/// Criterion 5: two-point closed form. t = 0 equals <WV> to 1e-10; H = Z
/// with W = V = X gives cos 2t at 100 points to 1e-10; the MC ensemble
/// average matches the closed form within 5 sigma for GUE d = 6.
#[test]
fn criterion_05_two_point() {
    // t = 0 identity
    let d = 6;
    let h = gue_sample(d, 501).unwrap();
    let es = eigh(&h, 1e-12).unwrap();
    let w = random_hermitian(d, 502);
    let v = random_hermitian(d, 503);
    let g = plateau_exact(&es).unwrap();
    let got = c_two_point_with_plateau(&w, &v, &es, &g, 0.0).unwrap();
    let expect = (w.matrix() * v.matrix()).trace().re / d as f64;
    assert!((got - expect).abs() <= 1e-10, "t = 0: {got} vs {expect}");

    // Pauli case at 100 points
    let es_z = eigh(&HermitianOperator::from_diagonal(&[1.0, -1.0]), 1e-12).unwrap();
    let x = pauli_x();
    let gz = plateau_exact(&es_z).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let t = k as f64 * 0.11;
        let got = c_two_point_with_plateau(&x, &x, &es_z, &gz, t).unwrap();
        worst = worst.max((got - (2.0 * t).cos()).abs());
    }
    assert!(worst <= 1e-10, "cos 2t worst error {worst}");

    // MC oracle at 10 times
    let dz = build_diagonalizer(&es).unwrap();
    let mut rng = stream_rng(504, 0);
    let mut worst_z: f64 = 0.0;
    for &t in &[0.0, 0.7, 1.3, 2.9, 4.1, 6.0, 8.5, 11.0, 16.0, 21.0] {
        let phases: Vec<Complex64> = es
            .values
            .iter()
            .map(|&e| Complex64::from_polar(1.0, t * e))
            .collect();
        let mut st = RunningStats::new();
        for _ in 0..10_000 {
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
        let closed = c_two_point_with_plateau(&w, &v, &es, &g, t).unwrap();
        let z = (st.mean() - closed).abs() / st.stderr().max(1e-12);
        worst_z = worst_z.max(z);
        assert!(z < 5.0, "t = {t}: z = {z}");
    }
    pass(
        "criterion 5",
        format!("t0 identity, cos 2t (worst {worst:.2e}), MC worst |z| = {worst_z:.2}"),
    );
}

/// Criterion 6: the numerically time-averaged sampled two-point over
/// T = 1e4 / mean spacing matches Tr(G W x V)/d within 2% for GUE d = 8.
#[test]
fn criterion_06_long_time_average() {
    let d = 8;
    let h = gue_sample(d, 601).unwrap();
    let es = eigh(&h, 1e-12).unwrap();
    let dz = build_diagonalizer(&es).unwrap();
    let w = random_hermitian(d, 602);
    let v = random_hermitian(d, 603);
    let g = plateau_exact(&es).unwrap();
    let plateau_value = plateau_contraction(&g, &w, &v).unwrap() / d as f64;

    let t_max = 1e4 / es.mean_spacing;
    let n_time = 20_000;
    let n_members = 16;
    let mut rng = stream_rng(604, 0);
    let mut acc = 0.0;
    for _ in 0..n_members {
        let s = sample_c(&dz, &mut rng);
        let cw = &s.c * w.matrix() * s.c.adjoint();
        let cv = &s.c * v.matrix() * s.c.adjoint();
        let mut member_avg = 0.0;
        for k in 1..=n_time {
            let t = k as f64 / n_time as f64 * t_max;
            let mut tr = Complex64::new(0.0, 0.0);
            for l in 0..d {
                for m in 0..d {
                    let phase = Complex64::from_polar(1.0, t * (es.values[l] - es.values[m]));
                    tr += phase * cw[(l, m)] * cv[(m, l)];
                }
            }
            member_avg += tr.re / d as f64;
        }
        acc += member_avg / n_time as f64;
    }
    let avg = acc / n_members as f64;
    let tol = 0.02 * plateau_value.abs().max(0.1);
    assert!(
        (avg - plateau_value).abs() <= tol,
        "time average {avg} vs plateau {plateau_value}"
    );
    pass(
        "criterion 6",
        format!("time-averaged MC {avg:.5} vs Tr(G WxV)/d {plateau_value:.5}"),
    );
}

/// Criterion 7: OTOC closed form returns Tr(WVWV) at t = 0 to 1e-9, matches
/// the two-subspace MC within 5 sigma at 5 times for GUE d = 4, and the
/// twofold form-factor identities hold to 1e-9 at 20 random times.
#[test]
fn criterion_07_otoc() {
    let d = 4;
    let h = gue_sample(d, 701).unwrap();
    let es = eigh(&h, 1e-12).unwrap();
    let w = random_hermitian(d, 702);
    let v = random_hermitian(d, 703);
    let cf = OtocClosedForm::new(&w, &v, &es).unwrap();
    let t0 = cf.evaluate(0.0).unwrap();
    let expect = (w.matrix() * v.matrix() * w.matrix() * v.matrix()).trace().re;
    assert!(
        (t0 - expect).abs() <= 1e-9 * expect.abs().max(1.0),
        "t = 0: {t0} vs {expect}"
    );

    // subspace MC oracle
    let h_eigen = HermitianOperator::from_diagonal(&es.values);
    let u = &es.vectors;
    let w_e = u.adjoint() * w.matrix() * u;
    let v_e = u.adjoint() * v.matrix() * u;
    let h_hat = replica_hamiltonian(&h_eigen, ReplicaSign::Plus).unwrap();
    let w_hat = kron(&w_e, &w_e).unwrap();
    let vs_hat = kron(&v_e, &v_e).unwrap() * swap_op(d);
    let mut subdata = Vec::new();
    for which in [Subspace::Sym, Subspace::Antisym] {
        let b = subspace_isometry(d, which);
        let h_sub = HermitianOperator::new(b.adjoint() * h_hat.matrix() * &b, 1e-8).unwrap();
        let es_sub = eigh(&h_sub, 1e-11).unwrap();
        let dz = build_diagonalizer(&es_sub).unwrap();
        let w_sub = b.adjoint() * &w_hat * &b;
        let vs_sub = b.adjoint() * &vs_hat * &b;
        subdata.push((es_sub, dz, w_sub, vs_sub));
    }
    let mut rng = stream_rng(704, 0);
    let mut worst_z: f64 = 0.0;
    for &t in &[0.3, 0.9, 1.8, 3.5, 7.0] {
        let mut st = RunningStats::new();
        for _ in 0..10_000 {
            let mut total = 0.0;
            for (es_sub, dz, w_sub, vs_sub) in &subdata {
                let dsub = es_sub.dim();
                let s = sample_c(dz, &mut rng);
                let cw = &s.c * w_sub * s.c.adjoint();
                let cv = &s.c * vs_sub * s.c.adjoint();
                let mut tr = Complex64::new(0.0, 0.0);
                for l in 0..dsub {
                    let pl = Complex64::from_polar(1.0, t * es_sub.values[l]);
                    for m in 0..dsub {
                        let pm = Complex64::from_polar(1.0, t * es_sub.values[m]);
                        tr += pl * cw[(l, m)] * pm.conj() * cv[(m, l)];
                    }
                }
                total += tr.re;
            }
            st.push(total);
        }
        let closed = cf.evaluate(t).unwrap();
        let z = (st.mean() - closed).abs() / st.stderr().max(1e-12);
        worst_z = worst_z.max(z);
        assert!(z < 5.0, "t = {t}: z = {z}");
    }

    // twofold form-factor identities at 20 random times
    let mut rng = stream_rng(705, 0);
    let mut worst_id: f64 = 0.0;
    for _ in 0..20 {
        let t: f64 = rng.random_range(0.0..30.0);
        let zp = form_factor(&es, FormFactorKind::TwofoldSym, t).unwrap();
        let zm = form_factor(&es, FormFactorKind::TwofoldAntisym, t).unwrap();
        let z1: Complex64 = es
            .values
            .iter()
            .map(|&e| Complex64::from_polar(1.0, t * e))
            .sum();
        let z2: Complex64 = es
            .values
            .iter()
            .map(|&e| Complex64::from_polar(1.0, 2.0 * t * e))
            .sum();
        let scale = z1.norm_sqr().powi(2).max(1.0);
        let sum_err = (zp + zm - (z1.norm_sqr().powi(2) + z2.norm_sqr()) / 2.0).abs() / scale;
        let diff_err = (zp - zm - (z1 * z1 * z2.conj()).re).abs() / scale;
        worst_id = worst_id.max(sum_err).max(diff_err);
    }
    assert!(worst_id <= 1e-9, "form-factor identity error {worst_id}");
    pass(
        "criterion 7",
        format!("t0 exact, MC worst |z| = {worst_z:.2}, identities worst {worst_id:.2e}"),
    );
}

/// Criterion 8: plateau solver. solve_qubit reproduces the closed form and
/// its bootstrap equals the exact plateau operator to 1e-10 for 20 random
/// qubit H (passes); solve_newton on random d = 3, 4 achieves residual
/// <= 1e-8 (passes) and plateau reconstruction <= 1e-6: this clause FAILS —
/// the bootstrap family with a single operator function cannot contain the
/// exact plateau operator for d >= 3 (rank obstruction), so the
/// reconstruction gap is O(0.1), not a solver artifact.
#[test]
fn criterion_08_plateau_solver() {
    let mut count = 0;
    let mut seed = 0u64;
    while count < 20 {
        seed += 1;
        let h = random_hermitian(2, 800 + seed);
        let es = eigh(&h, 1e-12).unwrap();
        if es.has_degeneracy() {
            continue;
        }
        let dphi = solve_qubit(&h).unwrap();
        let dh = center(&h);
        let tr2 = (dh.matrix() * dh.matrix()).trace().re;
        let expect = dh.matrix().scale(1.0 / (2.0 * tr2).sqrt());
        assert!(max_abs_diff(dphi.matrix(), &expect) <= 1e-12);
        let g = bootstrap_form(&dphi).unwrap();
        let g_exact = plateau_exact(&es).unwrap();
        assert!(
            max_abs_diff(&g, g_exact.matrix()) <= 1e-10,
            "qubit bootstrap mismatch {}",
            max_abs_diff(&g, g_exact.matrix())
        );
        count += 1;
    }
    pass("criterion 8a", "20 qubit solves match the closed form".into());

    let mut recon_failures = Vec::new();
    for (d, seed) in [(3usize, 801u64), (4, 802)] {
        let h = random_hermitian(d, seed);
        let es = eigh(&h, 1e-12).unwrap();
        let sol = solve_newton(&h, &es, 200, 1e-10).unwrap();
        assert!(
            sol.report.residual <= 1e-8,
            "d = {d}: residual {}",
            sol.report.residual
        );
        let residual_matrix = plateau_residual(&sol.dphi, &center(&h)).unwrap();
        assert!(residual_matrix <= 1e-8);
        let g = bootstrap_form(&sol.dphi).unwrap();
        let g_exact = plateau_exact(&es).unwrap();
        let gap = max_abs_diff(&g, g_exact.matrix());
        println!(
            "[criterion 8b] d = {d}: equation residual {:.2e}, reconstruction gap {gap:.3}",
            sol.report.residual
        );
        if gap > 1e-6 {
            recon_failures.push(format!("d = {d}: gap {gap:.3}"));
        }
    }
    assert!(
        recon_failures.is_empty(),
        "bootstrap reconstruction of the exact plateau operator is impossible \
         for d >= 3 (known defect: the s-tensor diagonal needs a rank-(d-1) \
         pair matrix, the bootstrap supplies rank 1): {}",
        recon_failures.join("; ")
    );
    pass("criterion 8", "reconstruction within 1e-6".into());
}

/// Criterion 9: volume closed form at the equally spaced ladder, the
/// inversion duality on 100 random positive spectra, and the exact scaling
/// law.
#[test]
fn criterion_09_volume() {
    // log Vol(equally spaced, d = 3) = log(3 / pi^3)
    let h = equally_spaced(3, 1.0).unwrap();
    let es = eigh(&h, 1e-12).unwrap();
    let got = log_volume(&es, false).unwrap().log_magnitude;
    let expect = (3.0f64 / std::f64::consts::PI.powi(3)).ln();
    assert!((got - expect).abs() <= 1e-12, "{got} vs {expect}");

    // duality residual on 100 random positive spectra, d <= 64
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut seed = 0u64;
    while count < 100 {
        seed += 1;
        let d = 2 + (seed as usize * 7 % 63);
        let mut rng = stream_rng(900 + seed, 0);
        let mut values: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..10.0)).collect();
        values.sort_by(f64::total_cmp);
        let es = match EigenSystem::from_values(values) {
            Ok(es) if !es.has_degeneracy() => es,
            _ => continue,
        };
        worst = worst.max(duality_check(&es).unwrap());
        count += 1;
    }
    assert!(worst <= 1e-9, "worst duality residual {worst}");

    // scaling law: log Vol(lambda H) - log Vol(H) = -2 C(d,2) log lambda
    let values = vec![0.3, 1.1, 2.0, 3.7, 5.2];
    let d = values.len();
    let es = EigenSystem::from_values(values.clone()).unwrap();
    let base = log_volume(&es, false).unwrap().log_magnitude;
    let lambda = 2.71;
    let scaled =
        EigenSystem::from_values(values.iter().map(|e| e * lambda).collect()).unwrap();
    let got = log_volume(&scaled, false).unwrap().log_magnitude - base;
    let expect = -2.0 * (d * (d - 1) / 2) as f64 * lambda.ln();
    assert!((got - expect).abs() <= 1e-10, "{got} vs {expect}");
    pass(
        "criterion 9",
        format!("ladder value exact, duality worst {worst:.2e}, scaling exact"),
    );
}

/// Criterion 10: entropy estimate monotone in the spacing variance, 3-sigma
/// agreement with the direct log-Vandermonde MC at d = 32, and the
/// cardinality ratio to Haar decreasing over d in {8, 16, 32, 64}.
#[test]
fn criterion_10_entropy() {
    for d in [32usize, 64, 128] {
        let e0 = entropy_estimate(d, 0.0, 1.0).unwrap();
        let e1 = entropy_estimate(d, 0.1781, 1.0).unwrap();
        let e2 = entropy_estimate(d, 1.0, 1.0).unwrap();
        assert!(e0 < e1 && e1 < e2, "not monotone at d = {d}");
    }

    let d = 32;
    let est = clt_log_vandermonde(SpacingDistribution::Poisson, d, 200, 1001).unwrap();
    let mut vand = 0.0;
    for l in 1..d {
        vand += 2.0 * log_factorial(l);
    }
    let clt = vand - (d as f64 * (harmonic(d - 1) - 1.0) + 1.0);
    let z = est.z_score(clt);
    assert!(z.abs() <= 3.0, "clt z = {z} (mc {} vs {clt})", est.mean);

    let mut prev = f64::INFINITY;
    for d in [8usize, 16, 32, 64] {
        let h = equally_spaced(d, 1.0).unwrap();
        let es = eigh(&h, 1e-12).unwrap();
        let ens = cardinality(&es, 1.0).unwrap().log_magnitude;
        let haar = reference_cardinality(d, 1.0, CardinalityKind::Haar)
            .unwrap()
            .log_magnitude;
        let ratio = ens / haar;
        assert!(ratio < 1.0 && ratio > 0.0);
        assert!(ratio < prev, "ratio not decreasing at d = {d}");
        prev = ratio;
    }
    pass(
        "criterion 10",
        format!("monotone, CLT z = {z:.2}, ratio decreasing (last {prev:.3})"),
    );
}

/// Criterion 11: every Weingarten table entry reproduced exactly as a
/// rational, and Haar MC moments match the analytic 2- and 4-moments
/// entrywise within 5 sigma.
#[test]
fn criterion_11_weingarten_haar() {
    use num_rational::Ratio;
    type R = Ratio<i128>;
    let r = |n: i128, den: i128| R::new(n, den);
    // table entries evaluated at the smallest pole-free d and one more
    for (parts, d, expect) in [
        (vec![1], 5, r(1, 5)),
        (vec![2], 5, r(-1, 5 * 24)),
        (vec![1, 1], 5, r(1, 24)),
        (vec![3], 5, r(2, 5 * 24 * 21)),
        (vec![2, 1], 5, r(-1, 24 * 21)),
        (vec![1, 1, 1], 5, r(23, 5 * 24 * 21)),
        (vec![4], 5, r(-5 * 5, 25 * 24 * 21 * 16)),
        (vec![3, 1], 5, r(2 * 25 - 3, 25 * 24 * 21 * 16)),
        (vec![2, 2], 5, r(25 + 6, 25 * 24 * 21 * 16)),
        (vec![2, 1, 1], 5, r(-125 + 20, 25 * 24 * 21 * 16)),
        (vec![1, 1, 1, 1], 5, r(625 - 200 + 6, 25 * 24 * 21 * 16)),
        // the explicit d = 3 values
        (vec![2], 3, r(-1, 24)),
        (vec![1, 1], 3, r(1, 8)),
    ] {
        let got = weingarten(&CycleType::new(parts.clone()).unwrap(), d).unwrap();
        assert_eq!(got, expect, "Wg({parts:?}, {d})");
    }

    // Haar MC against the analytic moments, entrywise 5 sigma at d = 3
    let d = 3;
    let phi2 = haar_moment(1, d).unwrap();
    let phi4 = haar_moment(2, d).unwrap();
    let n = 20_000;
    let dim2 = d * d;
    let dim4 = dim2 * dim2;
    let mut mean2 = CMat::zeros(dim2, dim2);
    let mut m22 = nalgebra::DMatrix::<f64>::zeros(dim2, dim2);
    let mut mean4 = CMat::zeros(dim4, dim4);
    let mut m24 = nalgebra::DMatrix::<f64>::zeros(dim4, dim4);
    for s in 0..n {
        let u = haar_sample(d, 110_000 + s as u64).unwrap();
        let udag = u.adjoint();
        let s2 = kron(&u, &udag).unwrap();
        let s4 = kron(&kron(&u, &u).unwrap(), &kron(&udag, &udag).unwrap()).unwrap();
        let k = (s + 1) as f64;
        for i in 0..dim2 {
            for j in 0..dim2 {
                let delta = s2[(i, j)] - mean2[(i, j)];
                mean2[(i, j)] += delta / k;
                m22[(i, j)] += (delta * (s2[(i, j)] - mean2[(i, j)]).conj()).re;
            }
        }
        for i in 0..dim4 {
            for j in 0..dim4 {
                let delta = s4[(i, j)] - mean4[(i, j)];
                mean4[(i, j)] += delta / k;
                m24[(i, j)] += (delta * (s4[(i, j)] - mean4[(i, j)]).conj()).re;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..dim2 {
        for j in 0..dim2 {
            let se = (m22[(i, j)] / (n as f64 - 1.0) / n as f64).sqrt().max(1e-12);
            worst = worst.max((mean2[(i, j)] - phi2.matrix[(i, j)]).norm() / se);
        }
    }
    for i in 0..dim4 {
        for j in 0..dim4 {
            let se = (m24[(i, j)] / (n as f64 - 1.0) / n as f64).sqrt().max(1e-12);
            worst = worst.max((mean4[(i, j)] - phi4.matrix[(i, j)]).norm() / se);
        }
    }
    assert!(worst < 5.0, "worst entrywise z = {worst}");
    pass(
        "criterion 11",
        format!("table exact, MC moments worst |z| = {worst:.2}"),
    );
}

/// Criterion 12: |Z(i0)|^2 = d^2 exactly; the late-time mean is within 2%
/// of d for the equally spaced ladder (d = 8) and within 10% of d for
/// seed-averaged GUE at d = 64.
#[test]
fn criterion_12_form_factor() {
    let h = equally_spaced(8, 1.0).unwrap();
    let es = eigh(&h, 1e-12).unwrap();
    assert_eq!(
        form_factor(&es, FormFactorKind::InfiniteT, 0.0).unwrap(),
        64.0
    );
    let avg = form_factor_time_average(
        &es,
        FormFactorKind::InfiniteT,
        200.0 * std::f64::consts::TAU,
        40_000,
    )
    .unwrap();
    assert!((avg - 8.0).abs() <= 0.16, "equally spaced avg {avg}");

    let d = 64;
    let mut acc = 0.0;
    let seeds = 8;
    for seed in 0..seeds {
        let h = gue_sample(d, 1200 + seed).unwrap();
        let es = eigh(&h, 1e-11).unwrap();
        let t_heis = std::f64::consts::TAU / es.mean_spacing;
        acc += form_factor_window_average(
            &es,
            FormFactorKind::InfiniteT,
            1.5 * t_heis,
            4.0 * t_heis,
            30_000,
        )
        .unwrap();
    }
    let late = acc / seeds as f64;
    assert!(
        (late - d as f64).abs() <= 0.1 * d as f64,
        "GUE late mean {late}"
    );
    pass(
        "criterion 12",
        format!("|Z(0)|^2 exact, ladder avg {avg:.3}, GUE late mean {late:.2}"),
    );
}
