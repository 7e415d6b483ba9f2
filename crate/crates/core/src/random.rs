//! Seeded randomness for constructing test inputs. All stochastic choices in
//! the crate go through a [`ChaCha8Rng`] so a seed pins every experiment.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, hermitian_part, op_norm, CMatrix, UnitaryMatrix};

pub type LabRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut LabRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Ginibre matrix (iid standard complex Gaussian entries).
pub fn random_matrix(rng: &mut LabRng, rows: usize, cols: usize) -> CMatrix {
    let data: Vec<Complex64> = (0..rows * cols).map(|_| gaussian(rng)).collect();
    CMatrix::from_row_slice(rows, cols, &data)
}

/// Haar-distributed unitary: unitary factor of a Ginibre matrix.
pub fn random_unitary(rng: &mut LabRng, d: usize) -> UnitaryMatrix {
    loop {
        let g = random_matrix(rng, d, d);
        if let Ok(u) = linalg::polar_unitary(&g) {
            return u;
        }
    }
}

/// Self-adjoint matrix of operator norm exactly 1.
pub fn random_hermitian_unit(rng: &mut LabRng, d: usize) -> CMatrix {
    let h = hermitian_part(&random_matrix(rng, d, d));
    let n = op_norm(&h);
    h.scale(1.0 / n)
}

/// Unitary `exp(iθH)` with `‖H‖ = 1`, so `‖U − I‖ = 2 sin(θ/2)`.
pub fn near_identity_unitary(rng: &mut LabRng, d: usize, theta: f64) -> UnitaryMatrix {
    let h = random_hermitian_unit(rng, d);
    let x = h * Complex64::new(0.0, 1.0);
    UnitaryMatrix::new(linalg::exp_skew(&x, theta).expect("skew-Hermitian input"))
        .expect("exponential of skew-Hermitian is unitary")
}

/// Unitary at operator distance exactly `eps` from the identity (`eps < 2`).
pub fn unitary_at_distance(rng: &mut LabRng, d: usize, eps: f64) -> UnitaryMatrix {
    near_identity_unitary(rng, d, 2.0 * (eps / 2.0).asin())
}

pub fn uniform(rng: &mut LabRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn below(rng: &mut LabRng, n: usize) -> usize {
    rng.random_range(0..n)
}
