//! Induction of quasi-representations from a finite-index subgroup, and the
//! compression procedure that recovers a nearby representation of the
//! subgroup from a representation close to an induced one.

use num_complex::Complex64;

use crate::correct::{stabilize_projection, BOUND_SLACK};
use crate::error::{Error, Result};
use crate::group::CosetSystem;
use crate::linalg::{dist, CMatrix, UnitaryMatrix};
use crate::quasirep::{Domain, QuasiRep, HOM_TOL};

/// Slack for the equalities preserved exactly by induction.
pub const INDUCTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct InducedRep {
    pub base: QuasiRep,
    pub cosets: CosetSystem,
    pub total: QuasiRep,
}

impl InducedRep {
    /// Coset representatives in block order; block `i` occupies rows
    /// `i·d .. (i+1)·d`.
    pub fn block_layout(&self) -> &[usize] {
        self.cosets.reps()
    }

    pub fn block_dim(&self) -> usize {
        self.base.dim()
    }
}

fn check_base_domain(mu: &QuasiRep, cs: &CosetSystem) -> Result<()> {
    match mu.domain() {
        Domain::Finite(g) if g.same_table(cs.subgroup_group()) => Ok(()),
        _ => Err(Error::Usage(
            "the quasi-representation must be defined on the subgroup of the coset system".into(),
        )),
    }
}

/// Block matrix with block `(x, r(xγ))` equal to `μ(xγ·r(xγ)⁻¹)`.
pub fn induced_value(mu: &QuasiRep, cs: &CosetSystem, gamma: usize) -> CMatrix {
    let d = mu.dim();
    let m = cs.index();
    let mut out = CMatrix::zeros(m * d, m * d);
    for (i, &x) in cs.reps().iter().enumerate() {
        let j = cs.coset_index(cs.group().mul(x, gamma));
        let lam = cs.subgroup_position(cs.cocycle(x, gamma)).expect("cocycle lies in the subgroup");
        out.view_mut((i * d, j * d), (d, d)).copy_from(mu.value(lam));
    }
    out
}

/// Induces `μ` along `cs`. The defect of the result is checked to equal the
/// defect of `μ`.
pub fn induce(mu: &QuasiRep, cs: &CosetSystem) -> Result<InducedRep> {
    check_base_domain(mu, cs)?;
    let g = cs.group().clone();
    for gamma in g.elements() {
        let mut hit = vec![false; cs.index()];
        for &x in cs.reps() {
            let j = cs.coset_index(g.mul(x, gamma));
            if std::mem::replace(&mut hit[j], true) {
                return Err(Error::BoundViolated {
                    statement: "induced-block-permutation".into(),
                    detail: format!("x ↦ r(xγ) is not a permutation for γ = {gamma}"),
                });
            }
        }
    }
    let total = QuasiRep::from_fn_finite(g, mu.dim() * cs.index(), |gamma| {
        UnitaryMatrix::new(induced_value(mu, cs, gamma))
    })?;
    let (a, b) = (mu.defect(None)?.value, total.defect(None)?.value);
    if (a - b).abs() > INDUCTION_TOL {
        return Err(Error::BoundViolated {
            statement: "induction-preserves-defect".into(),
            detail: format!("defect {a:e} of the base differs from defect {b:e} of the induced map"),
        });
    }
    Ok(InducedRep { base: mu.clone(), cosets: cs.clone(), total })
}

/// Restriction of a map on the group to the subgroup of `cs`.
pub fn restrict_to_subgroup(nu: &QuasiRep, cs: &CosetSystem) -> Result<QuasiRep> {
    QuasiRep::from_fn_finite(cs.subgroup_group().clone(), nu.dim(), |i| {
        Ok(nu.unitary(cs.subgroup()[i]).clone())
    })
}

#[derive(Debug, Clone)]
pub struct CompressReport {
    pub result: QuasiRep,
    pub delta: f64,
    /// Measured `‖ν − μ̄‖`.
    pub measured_distance: f64,
    /// `max_λ ‖P − ν(λ)Pν(λ)*‖`, bounded by `2δ`.
    pub p_conjugation: f64,
    pub p_minus_q: f64,
    pub q_minus_v: f64,
    pub p_minus_v: f64,
    /// `‖result − μ‖`, bounded by `16δ`.
    pub final_distance: f64,
    pub result_defect: f64,
}

fn stage(ok: bool, detail: String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::BoundViolated { statement: "induction-compression".into(), detail })
    }
}

/// Recovers a representation of the subgroup within `16δ` of `μ` from a
/// representation `ν` of the whole group within `δ` of the induced map `μ̄`.
///
/// Each intermediate bound is asserted separately so a failure names its
/// stage.
pub fn compress(nu: &QuasiRep, mu: &QuasiRep, cs: &CosetSystem, delta: f64) -> Result<CompressReport> {
    check_base_domain(mu, cs)?;
    if !(4.0 * delta < 0.5) {
        return Err(Error::Usage(format!("4δ = {} must be below 1/2", 4.0 * delta)));
    }
    if cs.reps().first() != Some(&cs.group().identity()) {
        return Err(Error::Usage("the identity must represent the first coset".into()));
    }
    let nd = nu.defect(None)?.value;
    if nd > HOM_TOL {
        return Err(Error::Usage(format!("ν is not a homomorphism (defect {nd:e})")));
    }
    let induced = induce(mu, cs)?;
    let measured_distance = nu.uniform_distance(&induced.total)?.value;
    if !(measured_distance < delta) {
        return Err(Error::Usage(format!(
            "‖ν − μ̄‖ = {measured_distance:e} is not below δ = {delta:e}"
        )));
    }
    let d = mu.dim();
    let n = nu.dim();
    let mut p = CMatrix::zeros(n, n);
    for i in 0..d {
        p[(i, i)] = Complex64::new(1.0, 0.0);
    }

    let nu_l = restrict_to_subgroup(nu, cs)?;
    let stab = stabilize_projection(&nu_l, &p, 2.0 * delta)?;
    let p_conjugation = stab.measured_delta;
    stage(
        p_conjugation < 2.0 * delta,
        format!("max ‖P − ν(λ)Pν(λ)*‖ = {p_conjugation:e} is not below 2δ"),
    )?;
    let q = stab.q;
    let p_minus_q = dist(&p, &q);
    stage(p_minus_q <= 4.0 * delta + BOUND_SLACK, format!("‖P − Q‖ = {p_minus_q:e} > 4δ"))?;

    // partial isometry of PQ: keep the d singular values near 1
    let svd = (&p * &q).svd(true, true);
    let (w, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > 0.5).collect();
    if keep.len() != d {
        return Err(Error::BoundViolated {
            statement: "induction-compression".into(),
            detail: format!("PQ has {} singular values above 1/2, expected {d}", keep.len()),
        });
    }
    let mut v = CMatrix::zeros(n, n);
    for &k in &keep {
        v += w.column(k) * vt.row(k);
    }
    let vsv = v.adjoint() * &v;
    let vvs = &v * v.adjoint();
    stage(
        dist(&vsv, &q) <= 1e-9 && dist(&vvs, &p) <= 1e-9,
        "V*V = Q and VV* = P fail".into(),
    )?;
    let q_minus_v = dist(&q, &v);
    let p_minus_v = dist(&p, &v);
    stage(q_minus_v <= 4.0 * delta + BOUND_SLACK, format!("‖Q − V‖ = {q_minus_v:e} > 4δ"))?;
    stage(p_minus_v <= 8.0 * delta + BOUND_SLACK, format!("‖P − V‖ = {p_minus_v:e} > 8δ"))?;

    let result = QuasiRep::from_fn_finite(cs.subgroup_group().clone(), d, |i| {
        let conj = &v * nu.value(cs.subgroup()[i]) * v.adjoint();
        UnitaryMatrix::new(conj.view((0, 0), (d, d)).into_owned())
    })?;
    let final_distance = result.uniform_distance(mu)?.value;
    let result_defect = result.defect(None)?.value;
    stage(
        final_distance <= 16.0 * delta + BOUND_SLACK,
        format!("‖result − μ‖ = {final_distance:e} > 16δ"),
    )?;
    stage(result_defect <= BOUND_SLACK, format!("result defect {result_defect:e}"))?;
    Ok(CompressReport {
        result,
        delta,
        measured_distance,
        p_conjugation,
        p_minus_q,
        q_minus_v,
        p_minus_v,
        final_distance,
        result_defect,
    })
}
