//! Maps from a group into the unitary group with `μ(e) = Id`: defect,
//! uniform distance, pullback along quotient maps, the kernel-triviality
//! mechanism behind quotient stability, and the one-dimensional witness.
//!
//! Finite domains carry a full table. Free-group domains carry a table over
//! the ball of radius `L`; truncated suprema are always reported together
//! with the truncation they were computed at.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupHom};
use crate::linalg::{self, dist, identity, op_norm, CMatrix, UnitaryMatrix};
use crate::word::{FreeWord, WordBall};

/// Tolerance for treating a map as a homomorphism.
pub const HOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Domain {
    Finite(Arc<FiniteGroup>),
    Free(Arc<WordBall>),
}

impl Domain {
    pub fn size(&self) -> usize {
        match self {
            Domain::Finite(g) => g.order(),
            Domain::Free(b) => b.len(),
        }
    }

    pub fn identity(&self) -> usize {
        match self {
            Domain::Finite(g) => g.identity(),
            Domain::Free(_) => 0,
        }
    }

    pub fn label(&self, i: usize) -> String {
        match self {
            Domain::Finite(g) => g.label(i),
            Domain::Free(b) => b.word(i).to_string(),
        }
    }

    pub fn finite(&self) -> Option<&Arc<FiniteGroup>> {
        match self {
            Domain::Finite(g) => Some(g),
            Domain::Free(_) => None,
        }
    }

    fn same_as(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Finite(a), Domain::Finite(b)) => Arc::ptr_eq(a, b) || a.same_table(b),
            (Domain::Free(a), Domain::Free(b)) => a.generators() == b.generators(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuasiRep {
    domain: Domain,
    dim: usize,
    values: Vec<UnitaryMatrix>,
}

impl QuasiRep {
    /// Values are indexed like the domain's elements (group indices or ball
    /// positions). The identity value must be within `1e-9` of `Id` and is
    /// then replaced by `Id` exactly.
    pub fn new(domain: Domain, dim: usize, mut values: Vec<UnitaryMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Usage("dimension must be positive".into()));
        }
        if values.len() != domain.size() {
            return Err(Error::Usage(format!(
                "expected {} values, got {}",
                domain.size(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|u| u.dim() != dim) {
            return Err(Error::Usage(format!("value at {bad} has the wrong dimension")));
        }
        let e = domain.identity();
        let off = dist(values[e].matrix(), &identity(dim));
        if off > HOM_TOL {
            return Err(Error::Usage(format!("value at the identity is {off:e} away from Id")));
        }
        values[e] = UnitaryMatrix::identity(dim);
        Ok(Self { domain, dim, values })
    }

    pub fn from_fn_finite(
        group: Arc<FiniteGroup>,
        dim: usize,
        mut f: impl FnMut(usize) -> Result<UnitaryMatrix>,
    ) -> Result<Self> {
        let values = group.elements().map(&mut f).collect::<Result<Vec<_>>>()?;
        Self::new(Domain::Finite(group), dim, values)
    }

    pub fn from_fn_free(
        ball: Arc<WordBall>,
        dim: usize,
        mut f: impl FnMut(&FreeWord) -> Result<UnitaryMatrix>,
    ) -> Result<Self> {
        let values = ball.words().iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Self::new(Domain::Free(ball), dim, values)
    }

    /// Trivial representation `g ↦ Id`.
    pub fn trivial(domain: Domain, dim: usize) -> Self {
        let values = vec![UnitaryMatrix::identity(dim); domain.size()];
        Self { domain, dim, values }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, g: usize) -> &CMatrix {
        self.values[g].matrix()
    }

    pub fn unitary(&self, g: usize) -> &UnitaryMatrix {
        &self.values[g]
    }

    pub fn values(&self) -> &[UnitaryMatrix] {
        &self.values
    }

    /// Value at a free-group word, if it lies in the tabulated ball.
    pub fn value_at_word(&self, w: &FreeWord) -> Option<&CMatrix> {
        match &self.domain {
            Domain::Free(b) => b.index_of(w).map(|i| self.value(i)),
            Domain::Finite(_) => None,
        }
    }

    pub fn group(&self) -> Option<&Arc<FiniteGroup>> {
        self.domain.finite()
    }

    /// Applies `f` to every value; the identity stays `Id`.
    pub fn map_values(&self, mut f: impl FnMut(usize, &CMatrix) -> Result<CMatrix>) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, u)| f(i, u.matrix()).and_then(UnitaryMatrix::new))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.domain.clone(), self.dim, values)
    }

    /// `g ↦ u·μ(g)·u*`.
    pub fn conjugate(&self, u: &UnitaryMatrix) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| {
                let m = u.matrix() * v.matrix() * u.matrix().adjoint();
                UnitaryMatrix::with_tolerance(m, 1e-9).expect("conjugate of unitary is unitary")
            })
            .collect();
        let mut out = Self { domain: self.domain.clone(), dim: self.dim, values };
        out.values[out.domain.identity()] = UnitaryMatrix::identity(self.dim);
        out
    }

    pub fn is_homomorphism(&self, tol: f64) -> bool {
        match self.defect(None) {
            Ok(r) => r.value <= tol,
            Err(_) => false,
        }
    }

    /// Sup of `‖μ(xy) − μ(x)μ(y)‖`.
    ///
    /// Finite domains scan all pairs and ignore `truncation`. Free domains
    /// require it and scan pairs with `|x|, |y|, |xy| <= L`.
    pub fn defect(&self, truncation: Option<usize>) -> Result<DefectReport> {
        match &self.domain {
            Domain::Finite(g) => {
                let mut best = Sup::default();
                for x in g.elements() {
                    for y in g.elements() {
                        let v = pair_defect(self, x, y, g.mul(x, y));
                        best.offer(v, (x, y));
                    }
                }
                Ok(DefectReport::from_sup(best, None))
            }
            Domain::Free(ball) => {
                let l = truncation.ok_or_else(|| {
                    Error::Usage("defect over a free-group domain needs a truncation L".into())
                })?;
                if l > ball.radius() {
                    return Err(Error::Usage(format!(
                        "truncation {l} exceeds the tabulated radius {}",
                        ball.radius()
                    )));
                }
                let mut best = Sup::default();
                if self.dim == 1 {
                    let s: Vec<Complex64> = self.values.iter().map(|u| u.matrix()[(0, 0)]).collect();
                    ball.for_each_pair_within(l, |x, y, xy| {
                        best.offer((s[xy] - s[x] * s[y]).norm(), (x, y));
                    });
                } else {
                    ball.for_each_pair_within(l, |x, y, xy| {
                        best.offer(pair_defect(self, x, y, xy), (x, y));
                    });
                }
                Ok(DefectReport::from_sup(best, Some(l)))
            }
        }
    }

    /// Largest `‖μ(g) − ν(g)‖`; free domains compare on the smaller ball.
    pub fn uniform_distance(&self, other: &QuasiRep) -> Result<DistanceReport> {
        if self.dim != other.dim {
            return Err(Error::Usage(format!("dimension mismatch: {} vs {}", self.dim, other.dim)));
        }
        if !self.domain.same_as(&other.domain) {
            return Err(Error::Usage("domain mismatch".into()));
        }
        let (n, truncation) = match (&self.domain, &other.domain) {
            (Domain::Free(a), Domain::Free(b)) => {
                let r = a.radius().min(b.radius());
                (a.prefix_len(r), Some(r))
            }
            _ => (self.values.len(), None),
        };
        let mut best = Sup::default();
        for g in 0..n {
            best.offer(dist(self.value(g), other.value(g)), (g, g));
        }
        Ok(DistanceReport { value: best.value, witness: best.at.0, truncation })
    }

    /// `μ∘π` for a surjective homomorphism `π: Γ → Γ₀`.
    pub fn pullback(&self, hom: &GroupHom) -> Result<QuasiRep> {
        let g0 = self
            .group()
            .ok_or_else(|| Error::Usage("pullback needs a finite domain".into()))?;
        if !hom.target().same_table(g0) {
            return Err(Error::Usage("homomorphism target differs from the domain".into()));
        }
        if !hom.is_surjective() {
            return Err(Error::Usage("pullback needs a surjective homomorphism".into()));
        }
        let values = hom.source().elements().map(|g| self.values[hom.apply(g)].clone()).collect();
        QuasiRep::new(Domain::Finite(hom.source().clone()), self.dim, values)
    }
}

fn pair_defect(mu: &QuasiRep, x: usize, y: usize, xy: usize) -> f64 {
    op_norm(&(mu.value(xy) - mu.value(x) * mu.value(y)))
}

/// Running maximum with a deterministic tie-break: among equal values the
/// lexicographically smallest witness wins, regardless of visiting order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sup {
    pub value: f64,
    pub at: (usize, usize),
}

impl Default for Sup {
    fn default() -> Self {
        Self { value: f64::NEG_INFINITY, at: (usize::MAX, usize::MAX) }
    }
}

impl Sup {
    #[inline]
    pub fn offer(&mut self, v: f64, at: (usize, usize)) {
        if v > self.value || (v == self.value && at < self.at) {
            self.value = v;
            self.at = at;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub value: f64,
    /// Domain indices `(x, y)` attaining the maximum.
    pub witness: (usize, usize),
    /// Radius used for free-group domains.
    pub truncation: Option<usize>,
}

impl DefectReport {
    fn from_sup(s: Sup, truncation: Option<usize>) -> Self {
        Self { value: s.value.max(0.0), witness: s.at, truncation }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    pub value: f64,
    pub witness: usize,
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelVerdict {
    /// All powers stayed within the bound, and the spectrum is `{1}`.
    ForcedTrivial { element: usize, max_power_distance: f64 },
    /// Some power `ν(g)^n` is farther than the bound from `Id`.
    Violation { element: usize, power: usize, distance: f64 },
}

/// Upper end (exclusive) for bounds accepted by [`kernel_triviality_check`].
pub fn sqrt3() -> f64 {
    3f64.sqrt()
}

/// For every `g` in `kernel`, compares `max_{1<=n<=ord g} ‖ν(g)ⁿ − Id‖`
/// with `bound < √3`. Within the bound every eigenvalue `z` of `ν(g)` is a
/// root of unity with all powers in the disc `|zⁿ − 1| < √3`, which forces
/// `z = 1`; this is checked on the computed spectrum.
pub fn kernel_triviality_check(
    nu: &QuasiRep,
    kernel: &BTreeSet<usize>,
    bound: f64,
) -> Result<Vec<KernelVerdict>> {
    if !(bound < sqrt3()) {
        return Err(Error::Usage(format!("bound {bound} must be below √3")));
    }
    let g = nu
        .group()
        .ok_or_else(|| Error::Usage("kernel check needs a finite domain".into()))?;
    let d = nu.defect(None)?;
    if d.value > HOM_TOL {
        return Err(Error::Usage(format!("ν is not a homomorphism (defect {:e})", d.value)));
    }
    let id = identity(nu.dim());
    let mut out = Vec::with_capacity(kernel.len());
    for &k in kernel {
        let m = g.element_order(k);
        let base = nu.value(k);
        let mut power = base.clone();
        let mut worst = (0.0f64, 1usize);
        for n in 1..=m {
            let dn = dist(&power, &id);
            if dn > worst.0 {
                worst = (dn, n);
            }
            power = &power * base;
        }
        if worst.0 <= bound {
            let spectrum = linalg::spectrum_normal(base)?;
            if let Some(z) = spectrum.iter().find(|z| (*z - linalg::ONE).norm() > 1e-8) {
                return Err(Error::BoundViolated {
                    statement: "kernel-triviality".into(),
                    detail: format!("element {k} has eigenvalue {z} despite max power distance {}", worst.0),
                });
            }
            out.push(KernelVerdict::ForcedTrivial { element: k, max_power_distance: worst.0 });
        } else {
            out.push(KernelVerdict::Violation { element: k, power: worst.1, distance: worst.0 });
        }
    }
    Ok(out)
}

/// `max_{1<=n<=m} |zⁿ − 1|` for `z = e^{2πi j/m}`.
pub fn root_of_unity_power_gap(j: usize, m: usize) -> f64 {
    (1..=m)
        .map(|n| (Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * n) as f64 / m as f64) - 1.0).norm())
        .fold(0.0, f64::max)
}

/// One-dimensional map equal to `1` except at `γ₀`, where it is `e^{iθ}`
/// with `θ > 0` and `|e^{iθ} − 1| = δ/2`. Its defect is at most `δ`.
pub fn one_dim_witness(group: Arc<FiniteGroup>, gamma0: usize, delta: f64) -> Result<QuasiRep> {
    if gamma0 == group.identity() {
        return Err(Error::Usage("γ₀ must differ from the identity".into()));
    }
    if gamma0 >= group.order() {
        return Err(Error::Usage(format!("γ₀ = {gamma0} is not an element")));
    }
    if !(0.0..=2.0).contains(&delta) {
        return Err(Error::Usage(format!("δ must lie in [0, 2], got {delta}")));
    }
    let theta = 2.0 * (delta / 4.0).asin();
    let z = Complex64::from_polar(1.0, theta);
    QuasiRep::from_fn_finite(group, 1, |g| {
        let v = if g == gamma0 { z } else { linalg::ONE };
        UnitaryMatrix::new(CMatrix::from_element(1, 1, v))
    })
}
