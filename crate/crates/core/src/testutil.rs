//! Seeded random inputs shared by unit tests and oracle tests.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::tensor::{CMat, HermitianOperator};

/// Dense complex matrix with i.i.d. standard-normal real/imag parts.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    CMat::from_fn(rows, cols, |_, _| {
        Complex64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    })
}

/// Random Hermitian matrix (A + A*)/2 with O(1) entries.
pub fn random_hermitian(d: usize, seed: u64) -> HermitianOperator {
    let a = random_matrix(d, d, seed);
    let h = (&a + a.adjoint()).scale(0.5);
    HermitianOperator::with_default_tol(h).expect("hermitian by construction")
}

/// Random unit-trace positive state built as V V^dagger / Tr.
pub fn random_density(d: usize, seed: u64) -> HermitianOperator {
    let v = random_matrix(d, d, seed);
    let m = &v * v.adjoint();
    let tr: Complex64 = m.trace();
    HermitianOperator::with_default_tol(m.scale(1.0 / tr.re)).expect("psd by construction")
}

/// Uniformly random phases in [0, 2*pi).
pub fn random_phases(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
}
