//! Correction of quasi-representations of finite groups by averaging.
//!
//! The uniform average over a finite group is its invariant mean, so every
//! averaging argument here is an exact finite sum taken in element-index
//! order (fixed summation order keeps results bit-reproducible).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, asymmetry, commutator, dist, hermitian_eigen, identity, op_norm, spectral_projection_from,
    CMatrix, UnitaryMatrix, SINGULAR_FLOOR, SPECTRAL_BAND,
};
use crate::quasirep::{QuasiRep, HOM_TOL};

/// Default stopping tolerance on the defect.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap; convergence is quadratic so this is generous.
pub const DEFAULT_MAX_ITER: usize = 64;
/// Slack added to every asserted bound to absorb rounding.
pub const BOUND_SLACK: f64 = 1e-8;
/// Input defect below which the distance guarantee `ε + 120ε²` is claimed.
pub const GUARANTEE_THRESHOLD: f64 = 0.1;

/// Distance guarantee for correcting a map of defect `eps`.
pub fn correction_guarantee(eps: f64) -> f64 {
    eps + 120.0 * eps * eps
}

fn require_finite(pi: &QuasiRep) -> Result<&std::sync::Arc<crate::group::FiniteGroup>> {
    pi.group().ok_or_else(|| Error::Usage("averaging needs a finite group domain".into()))
}

/// `π′(h) = (1/|Γ|) Σ_x π(x)* π(xh)` for every `h`.
pub fn averaged_operators(pi: &QuasiRep) -> Result<Vec<CMatrix>> {
    let g = require_finite(pi)?;
    let n = g.order() as f64;
    let d = pi.dim();
    Ok(g.elements()
        .map(|h| {
            let mut acc = CMatrix::zeros(d, d);
            for x in g.elements() {
                acc += pi.value(x).adjoint() * pi.value(g.mul(x, h));
            }
            acc.unscale(n)
        })
        .collect())
}

/// Unitary part `A·(A*A)^{-1/2}`, with the inverse square root taken on the
/// eigen-decomposition of `A*A`.
pub fn unitary_part(a: &CMatrix) -> Result<UnitaryMatrix> {
    let gram = linalg::hermitian_part(&(a.adjoint() * a));
    let eig = hermitian_eigen(&gram)?;
    let smallest = eig.values.first().copied().unwrap_or(0.0);
    if smallest <= SINGULAR_FLOOR {
        return Err(Error::Singular { smallest: smallest.max(0.0).sqrt(), floor: SINGULAR_FLOOR });
    }
    let v = &eig.vectors;
    let n = a.nrows();
    let inv_sqrt = CMatrix::from_fn(n, n, |r, c| {
        (0..n)
            .map(|j| v[(r, j)] * (1.0 / eig.values[j].sqrt()) * v[(c, j)].conj())
            .sum()
    });
    UnitaryMatrix::new(a * inv_sqrt)
}

/// One averaging step: `h ↦ π′(h)|π′(h)|⁻¹`.
pub fn average_step(pi: &QuasiRep) -> Result<QuasiRep> {
    let g = require_finite(pi)?.clone();
    let prime = averaged_operators(pi)?;
    let values = g
        .elements()
        .map(|h| {
            unitary_part(&prime[h]).map_err(|e| match e {
                Error::Singular { smallest, .. } => Error::Usage(format!(
                    "averaged operator at element {h} is singular (smallest singular value {smallest:e})"
                )),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    QuasiRep::from_fn_finite(g, pi.dim(), |h| Ok(values[h].clone()))
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub defect_before: f64,
    pub distance_moved: f64,
}

#[derive(Debug, Clone)]
pub struct CorrectionTrace {
    pub iterations: Vec<IterationRecord>,
    pub initial_defect: f64,
    pub final_defect: f64,
    pub final_map: QuasiRep,
    /// `ε + 120ε²` when the input defect is below `1/10`.
    pub guarantee: Option<f64>,
    pub distance_to_input: f64,
    pub converged: bool,
}

/// Repeats [`average_step`] until the defect is at most `tol`.
///
/// Non-convergence (iteration cap reached, or the defect stops decreasing)
/// is reported through `converged = false`. When the input defect is below
/// `1/10` and the run converged, the distance to the input is checked
/// against `ε + 120ε²`.
pub fn kazhdan_correct(pi: &QuasiRep, tol: f64, max_iter: usize) -> Result<CorrectionTrace> {
    require_finite(pi)?;
    let initial_defect = pi.defect(None)?.value;
    let mut current = pi.clone();
    let mut defect = initial_defect;
    let mut iterations = Vec::new();
    let converged = loop {
        if defect <= tol {
            break true;
        }
        if iterations.len() >= max_iter {
            break false;
        }
        let next = average_step(&current)?;
        let moved = current.uniform_distance(&next)?.value;
        iterations.push(IterationRecord { defect_before: defect, distance_moved: moved });
        let next_defect = next.defect(None)?.value;
        current = next;
        if next_defect >= defect {
            defect = next_defect;
            break next_defect <= tol;
        }
        defect = next_defect;
    };
    let distance_to_input = pi.uniform_distance(&current)?.value;
    let guarantee = (initial_defect < GUARANTEE_THRESHOLD).then(|| correction_guarantee(initial_defect));
    if let (true, Some(bound)) = (converged, guarantee) {
        if distance_to_input > bound + BOUND_SLACK {
            return Err(Error::BoundViolated {
                statement: "kazhdan-correction-bound".into(),
                detail: format!(
                    "distance {distance_to_input:e} exceeds ε + 120ε² = {bound:e} for ε = {initial_defect:e}"
                ),
            });
        }
    }
    Ok(CorrectionTrace {
        iterations,
        initial_defect,
        final_defect: defect,
        final_map: current,
        guarantee,
        distance_to_input,
        converged,
    })
}

#[derive(Debug, Clone)]
pub struct StabilizedProjection {
    pub q: CMatrix,
    /// Group average of the conjugates `ν(g)Pν(g)*`.
    pub q0: CMatrix,
    /// `max_g ‖P − ν(g)Pν(g)*‖`.
    pub measured_delta: f64,
    pub p_minus_q: f64,
    pub q0_minus_p: f64,
    pub max_commutator: f64,
}

pub fn projection_defect(p: &CMatrix) -> f64 {
    dist(&(p * p), p).max(asymmetry(p))
}

/// Replaces an almost invariant projection `P` by an invariant one `Q` with
/// `‖P − Q‖ <= 2δ`.
///
/// `Q₀` is the uniform average of the conjugates of `P`; it commutes with
/// `ν`, lies within `δ` of `P`, and its spectrum sits in
/// `[0, δ] ∪ [1 − δ, 1]`. `Q` is its spectral projection at `1/2`.
pub fn stabilize_projection(nu: &QuasiRep, p: &CMatrix, delta: f64) -> Result<StabilizedProjection> {
    let g = require_finite(nu)?;
    if !(delta < 0.5) {
        return Err(Error::Usage(format!("δ = {delta} must be below 1/2")));
    }
    let nd = nu.defect(None)?.value;
    if nd > HOM_TOL {
        return Err(Error::Usage(format!("ν is not a homomorphism (defect {nd:e})")));
    }
    if p.shape() != (nu.dim(), nu.dim()) {
        return Err(Error::Usage("projection has the wrong size".into()));
    }
    let pd = projection_defect(p);
    if pd > 1e-9 {
        return Err(Error::Usage(format!("P is not an orthogonal projection (defect {pd:e})")));
    }
    let conj = |x: usize| nu.value(x) * p * nu.value(x).adjoint();
    let measured_delta = g.elements().map(|x| dist(p, &conj(x))).fold(0.0, f64::max);
    if measured_delta > delta {
        return Err(Error::Usage(format!(
            "max ‖P − ν(g)Pν(g)*‖ = {measured_delta:e} exceeds δ = {delta:e}"
        )));
    }
    let mut q0 = CMatrix::zeros(nu.dim(), nu.dim());
    for x in g.elements() {
        q0 += conj(x);
    }
    let q0 = linalg::hermitian_part(&q0.unscale(g.order() as f64));
    let eig = hermitian_eigen(&q0)?;
    let (lo, hi) = (delta + SPECTRAL_BAND, 1.0 - delta - SPECTRAL_BAND);
    if let Some(&bad) = eig.values.iter().find(|&&l| l > lo && l < hi) {
        return Err(Error::SpectralGap { eigenvalue: bad, band: (lo, hi) });
    }
    let q = spectral_projection_from(&eig, 0.5)?;

    let max_commutator = g
        .elements()
        .map(|x| op_norm(&commutator(&q, nu.value(x))))
        .fold(0.0, f64::max);
    let p_minus_q = dist(p, &q);
    let q0_minus_p = dist(&q0, p);
    let checks = [
        (max_commutator <= BOUND_SLACK, format!("‖[Q, ν(g)]‖ = {max_commutator:e}")),
        (projection_defect(&q) <= 1e-9, "Q is not a projection".to_string()),
        (q0_minus_p <= delta + BOUND_SLACK, format!("‖Q₀ − P‖ = {q0_minus_p:e} > δ = {delta:e}")),
        (p_minus_q <= 2.0 * delta + BOUND_SLACK, format!("‖P − Q‖ = {p_minus_q:e} > 2δ = {:e}", 2.0 * delta)),
    ];
    for (ok, detail) in checks {
        if !ok {
            return Err(Error::BoundViolated { statement: "projection-stabilization".into(), detail });
        }
    }
    Ok(StabilizedProjection { q, q0, measured_delta, p_minus_q, q0_minus_p, max_commutator })
}

#[derive(Debug, Clone)]
pub struct ConjugatingUnitary {
    pub u: UnitaryMatrix,
    /// `T = (1/|Γ|) Σ π(γ)ω(γ)⁻¹`.
    pub t: CMatrix,
    pub measured_distance: f64,
    /// `‖T − Id‖_HS`.
    pub t_minus_id_hs: f64,
    pub u_minus_id: f64,
    /// `3√d·ε`, the asserted bound on `‖u − Id‖`.
    pub bound: f64,
    /// `max_γ ‖ω(γ) − u⁻¹π(γ)u‖`.
    pub intertwining_error: f64,
}

impl ConjugatingUnitary {
    /// `‖u − Id‖ / (√d·ε)`, for comparing against the constants 3/2 and 3.
    pub fn measured_constant(&self, eps: f64) -> f64 {
        let d = self.u.dim() as f64;
        self.u_minus_id / (d.sqrt() * eps)
    }
}

/// Unitary `u` with `ω(γ) = u⁻¹π(γ)u`, for homomorphisms `π`, `ω` at
/// uniform distance `<= ε` with `ε√d < 1`.
pub fn conjugating_unitary(pi: &QuasiRep, omega: &QuasiRep, eps: f64) -> Result<ConjugatingUnitary> {
    let g = require_finite(pi)?;
    let d = pi.dim();
    if !(eps * (d as f64).sqrt() < 1.0) {
        return Err(Error::Usage(format!("ε√d = {} must be below 1", eps * (d as f64).sqrt())));
    }
    for (name, m) in [("π", pi), ("ω", omega)] {
        let md = m.defect(None)?.value;
        if md > HOM_TOL {
            return Err(Error::Usage(format!("{name} is not a homomorphism (defect {md:e})")));
        }
    }
    let measured_distance = pi.uniform_distance(omega)?.value;
    if measured_distance > eps {
        return Err(Error::Usage(format!("‖π − ω‖ = {measured_distance:e} exceeds ε = {eps:e}")));
    }
    let mut t = CMatrix::zeros(d, d);
    for x in g.elements() {
        t += pi.value(x) * omega.value(x).adjoint();
    }
    let t = t.unscale(g.order() as f64);
    let u = linalg::polar_unitary(&t)?;
    let intertwining_error = g
        .elements()
        .map(|x| dist(omega.value(x), &(u.matrix().adjoint() * pi.value(x) * u.matrix())))
        .fold(0.0, f64::max);
    let u_minus_id = dist(u.matrix(), &identity(d));
    let bound = 3.0 * (d as f64).sqrt() * eps;
    if intertwining_error > BOUND_SLACK {
        return Err(Error::BoundViolated {
            statement: "conjugating-unitary".into(),
            detail: format!("intertwining error {intertwining_error:e}"),
        });
    }
    if u_minus_id > bound + BOUND_SLACK {
        return Err(Error::BoundViolated {
            statement: "conjugating-unitary".into(),
            detail: format!("‖u − Id‖ = {u_minus_id:e} exceeds 3√d·ε = {bound:e}"),
        });
    }
    Ok(ConjugatingUnitary {
        t_minus_id_hs: linalg::hs_norm(&(&t - identity(d))),
        u,
        t,
        measured_distance,
        u_minus_id,
        bound,
        intertwining_error,
    })
}
