//! Circle-valued maps `e^{2πitφ}` built from quasimorphisms, and the
//! search for the nearest circle-valued homomorphism of `F₂`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, UnitaryMatrix};
use crate::quasirep::{Domain, QuasiRep};
use crate::word::WordBall;

use super::quasimorphism::Quasimorphism;

/// `μ_t(γ) = e^{2πitφ(γ)}` tabulated on the ball of radius `radius`.
pub fn exp_circle(phi: &Quasimorphism, t: f64, radius: usize) -> Result<QuasiRep> {
    let ball = Arc::new(WordBall::new(phi.rank(), radius)?);
    QuasiRep::from_fn_free(ball, 1, |w| {
        let z = Complex64::from_polar(1.0, 2.0 * PI * t * phi.eval(w) as f64);
        UnitaryMatrix::new(CMatrix::from_element(1, 1, z))
    })
}

/// Minimizer of `max_{|γ| <= L} |μ(γ) − ν(γ)|` over the homomorphisms
/// `ν(a) = e^{iα}`, `ν(b) = e^{iβ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFit {
    pub alpha: f64,
    pub beta: f64,
    pub distance: f64,
    pub truncation: usize,
}

/// Values of `μ` grouped by the exponent sums `(exp_a, exp_b)`, which is
/// all a circle homomorphism sees. Each group keeps its distinct phases.
struct Grouped {
    keys: Vec<(f64, f64)>,
    phases: Vec<Vec<f64>>,
}

fn group_values(mu: &QuasiRep, ball: &WordBall, truncation: usize) -> Grouped {
    let mut map: BTreeMap<(i64, i64), Vec<f64>> = BTreeMap::new();
    for i in 0..ball.prefix_len(truncation) {
        let w = ball.word(i);
        let phase = mu.value(i)[(0, 0)].arg();
        let entry = map.entry((w.exponent_sum(0), w.exponent_sum(1))).or_default();
        if !entry.iter().any(|&p| p.to_bits() == phase.to_bits()) {
            entry.push(phase);
        }
    }
    let (keys, phases) = map.into_iter().map(|((a, b), v)| ((a as f64, b as f64), v)).unzip();
    Grouped { keys, phases }
}

impl Grouped {
    fn objective(&self, alpha: f64, beta: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for ((ea, eb), ph) in self.keys.iter().zip(&self.phases) {
            let psi = ea * alpha + eb * beta;
            for &p in ph {
                worst = worst.max(2.0 * ((p - psi) / 2.0).sin().abs());
            }
        }
        worst
    }
}

/// Grid search over `(α, β) ∈ [0, 2π)²` with `grid` points per axis,
/// followed by a shrinking pattern search around the best grid point.
pub fn nearest_circle_hom(mu: &QuasiRep, truncation: usize, grid: usize) -> Result<CircleFit> {
    if grid < 8 {
        return Err(Error::Usage("grid resolution must be at least 8".into()));
    }
    if mu.dim() != 1 {
        return Err(Error::Usage("circle fitting needs a one-dimensional map".into()));
    }
    let ball = match mu.domain() {
        Domain::Free(b) if b.generators() == 2 => b,
        _ => return Err(Error::Usage("circle fitting needs a map on F₂".into())),
    };
    if truncation > ball.radius() {
        return Err(Error::Usage(format!("truncation {truncation} exceeds radius {}", ball.radius())));
    }
    let g = group_values(mu, ball, truncation);
    let step = 2.0 * PI / grid as f64;
    let mut best = (0.0, 0.0, g.objective(0.0, 0.0));
    for i in 0..grid {
        for j in 0..grid {
            let (a, b) = (i as f64 * step, j as f64 * step);
            let v = g.objective(a, b);
            if v < best.2 {
                best = (a, b, v);
            }
        }
    }
    let mut h = step;
    while h > 1e-12 {
        let mut moved = false;
        for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
            let (a, b) = (best.0 + da, best.1 + db);
            let v = g.objective(a, b);
            if v < best.2 {
                best = (a, b, v);
                moved = true;
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    Ok(CircleFit {
        alpha: best.0.rem_euclid(2.0 * PI),
        beta: best.1.rem_euclid(2.0 * PI),
        distance: best.2,
        truncation,
    })
}
