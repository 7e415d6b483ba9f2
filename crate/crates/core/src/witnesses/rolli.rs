//! Rolli's quasi-representations of the free group of rank two: each
//! syllable `s^k` is sent to a fixed-direction rotation `τ_s(k)` close to
//! the identity, and a reduced word to the product over its syllables.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, UnitaryMatrix};
use crate::quasirep::QuasiRep;
use crate::random::{random_unitary, seeded};
use crate::word::{FreeWord, WordBall};

/// The only angle schedule implemented:
/// `θ(k) = 2·arcsin(δ/6)·(1 − 1/(|k|+1))·sign(k)`.
pub const BOUNDED_ODD_SCHEDULE: &str = "bounded-odd-arcsin";

/// Everything needed to rebuild a [`Rolli`] map bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolliData {
    pub dim: usize,
    pub delta: f64,
    pub seed: u64,
    pub schedule: String,
}

impl RolliData {
    pub fn new(dim: usize, delta: f64, seed: u64) -> Self {
        Self { dim, delta, seed, schedule: BOUNDED_ODD_SCHEDULE.into() }
    }
}

#[derive(Debug, Clone)]
pub struct Rolli {
    data: RolliData,
    /// Eigenbases of the directions `X_a`, `X_b`.
    bases: [UnitaryMatrix; 2],
    /// Common spectrum of the directions divided by `i`: `±1`, and `0` in
    /// odd dimension.
    signs: Vec<f64>,
}

impl Rolli {
    pub fn new(data: RolliData) -> Result<Self> {
        if data.dim < 2 {
            return Err(Error::Usage("the construction needs dimension at least 2".into()));
        }
        if !(data.delta > 0.0 && data.delta <= 2.0) {
            return Err(Error::Usage(format!("δ = {} must lie in (0, 2]", data.delta)));
        }
        if data.schedule != BOUNDED_ODD_SCHEDULE {
            return Err(Error::Usage(format!("unknown angle schedule {:?}", data.schedule)));
        }
        let mut rng = seeded(data.seed);
        let bases = [random_unitary(&mut rng, data.dim), random_unitary(&mut rng, data.dim)];
        let signs = (0..data.dim)
            .map(|j| {
                if data.dim % 2 == 1 && j == data.dim - 1 {
                    0.0
                } else if j % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        Ok(Self { data, bases, signs })
    }

    pub fn data(&self) -> &RolliData {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.dim
    }

    /// `θ(k)`, odd, injective and bounded by `2·arcsin(δ/6)`.
    pub fn angle(&self, k: i64) -> f64 {
        let cap = 2.0 * (self.data.delta / 6.0).asin();
        let m = k.unsigned_abs() as f64;
        cap * (1.0 - 1.0 / (m + 1.0)) * k.signum() as f64
    }

    /// Skew-Hermitian direction `X_s` of unit norm.
    pub fn direction(&self, s: u8) -> CMatrix {
        let phases: Vec<Complex64> = self.signs.iter().map(|&l| Complex64::new(0.0, l)).collect();
        self.conjugated(s, &phases)
    }

    fn conjugated(&self, s: u8, diag: &[Complex64]) -> CMatrix {
        let u = self.bases[s as usize].matrix();
        let n = self.dim();
        CMatrix::from_fn(n, n, |r, c| (0..n).map(|j| u[(r, j)] * diag[j] * u[(c, j)].conj()).sum())
    }

    /// `τ_s(k) = exp(θ(k)X_s)`; negative powers are exact adjoints.
    pub fn tau(&self, s: u8, k: i64) -> CMatrix {
        if k < 0 {
            return self.tau(s, -k).adjoint();
        }
        if k == 0 {
            return CMatrix::identity(self.dim(), self.dim());
        }
        let theta = self.angle(k);
        let phases: Vec<Complex64> = self.signs.iter().map(|&l| Complex64::from_polar(1.0, theta * l)).collect();
        self.conjugated(s, &phases)
    }

    pub fn evaluate(&self, w: &FreeWord) -> Result<CMatrix> {
        if w.rank_used() > 2 {
            return Err(Error::Usage(format!("word {w} uses more than two generators")));
        }
        let mut acc = CMatrix::identity(self.dim(), self.dim());
        for (s, k) in w.syllables() {
            acc *= self.tau(s, k);
        }
        Ok(acc)
    }

    /// The map tabulated on the ball of radius `radius` in `F₂`.
    pub fn tabulate(&self, radius: usize) -> Result<QuasiRep> {
        let ball = Arc::new(WordBall::new(2, radius)?);
        let r = radius as i64;
        let cache: Vec<Vec<CMatrix>> =
            (0..2u8).map(|s| (-r..=r).map(|k| self.tau(s, k)).collect()).collect();
        QuasiRep::from_fn_free(ball, self.dim(), |w| {
            let mut acc = CMatrix::identity(self.dim(), self.dim());
            for (s, k) in w.syllables() {
                acc *= &cache[s as usize][(k + r) as usize];
            }
            UnitaryMatrix::new(acc)
        })
    }
}

/// Rolli map of dimension `n` and defect at most `δ`, tabulated up to
/// `radius`.
pub fn rolli(n: usize, delta: f64, seed: u64, radius: usize) -> Result<QuasiRep> {
    Rolli::new(RolliData::new(n, delta, seed))?.tabulate(radius)
}
