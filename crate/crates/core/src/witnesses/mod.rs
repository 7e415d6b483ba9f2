//! Explicit maps of free groups with small defect that stay far from
//! genuine representations.

pub mod circle;
pub mod quasimorphism;
pub mod rolli;

pub use circle::{exp_circle, nearest_circle_hom, CircleFit};
pub use quasimorphism::{brooks_phi, coboundary_sup, CoboundaryReport, Quasimorphism};
pub use rolli::{rolli, Rolli, RolliData};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{dist, CMatrix};
use crate::quasirep::{DistanceReport, QuasiRep, Sup};
use crate::word::WordBall;

/// Values `ν(w)` on a ball of the homomorphism sending generator `i` to
/// `images[i]`, built along the trie so each value costs one product.
pub fn hom_on_ball(ball: &WordBall, images: &[CMatrix]) -> Result<Vec<CMatrix>> {
    if images.len() != ball.generators() {
        return Err(Error::Usage(format!(
            "expected {} generator images, got {}",
            ball.generators(),
            images.len()
        )));
    }
    let d = images[0].nrows();
    let inverses: Vec<CMatrix> = images.iter().map(|m| m.adjoint()).collect();
    let mut out: Vec<CMatrix> = Vec::with_capacity(ball.len());
    for i in 0..ball.len() {
        let v = match (ball.parent(i), ball.word(i).letters().last()) {
            (Some(p), Some(l)) => {
                let g = l.generator as usize;
                &out[p] * if l.inverse { &inverses[g] } else { &images[g] }
            }
            _ => CMatrix::identity(d, d),
        };
        out.push(v);
    }
    Ok(out)
}

/// `max_{|w| <= L} ‖μ(w) − ν(w)‖` for the homomorphism `ν` with the given
/// generator images.
pub fn distance_to_hom(mu: &QuasiRep, images: &[CMatrix], truncation: usize) -> Result<DistanceReport> {
    let ball: &Arc<WordBall> = match mu.domain() {
        crate::quasirep::Domain::Free(b) => b,
        _ => return Err(Error::Usage("expected a free-group domain".into())),
    };
    if truncation > ball.radius() {
        return Err(Error::Usage(format!("truncation {truncation} exceeds radius {}", ball.radius())));
    }
    let nu = hom_on_ball(ball, images)?;
    let mut best = Sup::default();
    for (w, v) in nu.iter().enumerate().take(ball.prefix_len(truncation)) {
        best.offer(dist(mu.value(w), v), (w, w));
    }
    Ok(DistanceReport { value: best.value, witness: best.at.0, truncation: Some(truncation) })
}

/// Angle recovered from a chord: `|e^{iθ} − 1| = c` with `θ ∈ [0, π]`
/// gives `θ = 2·arcsin(c/2)`.
pub fn angle_from_chord(chord: f64) -> f64 {
    2.0 * (chord / 2.0).clamp(-1.0, 1.0).asin()
}
