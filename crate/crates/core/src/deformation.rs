//! The Pytlik–Szwarc deformation of the regular representation of a free
//! group, on the truncation of `ℓ²(F)` to a ball.
//!
//! Operators are stored as sparse columns indexed by ball positions. The
//! delete-last-letter operator `P` is the trie parent map, and `λ(a)` is
//! only applied to vectors supported in the ball of radius `L − |a|`, where
//! it stays inside the truncation. On that domain every identity below is
//! exact, not approximately truncated.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::word::{FreeWord, WordBall};

/// Slack for the continuity bound.
pub const CONTINUITY_SLACK: f64 = 1e-9;
/// Largest `|z|` accepted by the continuity check.
pub const MAX_CONTINUITY_MODULUS: f64 = 0.95;
/// Dense blocks up to this many entries are normed by SVD; larger ones by
/// sparse power iteration.
const DENSE_BLOCK_LIMIT: usize = 4_000_000;

/// `ℓ²` of the ball of radius `L` in `F_k`, with basis in shortlex order.
#[derive(Debug, Clone)]
pub struct TruncatedFock {
    ball: Arc<WordBall>,
}

impl TruncatedFock {
    pub fn new(k: usize, radius: usize) -> Result<Self> {
        Ok(Self { ball: Arc::new(WordBall::new(k, radius)?) })
    }

    pub fn ball(&self) -> &Arc<WordBall> {
        &self.ball
    }

    pub fn dim(&self) -> usize {
        self.ball.len()
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    pub fn generators(&self) -> usize {
        self.ball.generators()
    }
}

/// Columns of an operator on [`TruncatedFock`], given on the domain
/// `0..ncols` (a prefix of the basis). Exact zeros are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCols {
    pub nrows: usize,
    pub cols: Vec<Vec<(usize, Complex64)>>,
}

fn collect(map: BTreeMap<usize, Complex64>) -> Vec<(usize, Complex64)> {
    map.into_iter().filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect()
}

impl SparseCols {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols());
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn sub(&self, other: &SparseCols) -> Result<SparseCols> {
        if self.nrows != other.nrows || self.ncols() != other.ncols() {
            return Err(Error::Usage("operator shapes differ".into()));
        }
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut m: BTreeMap<usize, Complex64> = a.iter().copied().collect();
                for &(r, v) in b {
                    *m.entry(r).or_default() -= v;
                }
                collect(m)
            })
            .collect();
        Ok(SparseCols { nrows: self.nrows, cols })
    }

    /// `self ∘ other`; `other`'s rows must lie in `self`'s domain.
    pub fn compose(&self, other: &SparseCols) -> Result<SparseCols> {
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut m: BTreeMap<usize, Complex64> = BTreeMap::new();
                for &(r, v) in col {
                    let inner = self.cols.get(r).ok_or_else(|| {
                        Error::Usage(format!("basis vector {r} lies outside the valid domain"))
                    })?;
                    for &(rr, w) in inner {
                        *m.entry(rr).or_default() += w * v;
                    }
                }
                Ok(collect(m))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseCols { nrows: self.nrows, cols })
    }

    /// Adds `scale` times the identity on the domain.
    pub fn add_identity(&self, scale: Complex64) -> SparseCols {
        let cols = self
            .cols
            .iter()
            .enumerate()
            .map(|(c, col)| {
                let mut m: BTreeMap<usize, Complex64> = col.iter().copied().collect();
                *m.entry(c).or_default() += scale;
                collect(m)
            })
            .collect();
        SparseCols { nrows: self.nrows, cols }
    }

    pub fn frobenius(&self) -> f64 {
        self.cols.iter().flatten().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `A*A` as sparse columns over the domain.
    pub fn gram(&self) -> SparseCols {
        let mut by_row: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                by_row.entry(r).or_default().push((c, v));
            }
        }
        let mut cols: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); self.ncols()];
        for entries in by_row.values() {
            for &(c1, v1) in entries {
                for &(c2, v2) in entries {
                    *cols[c2].entry(c1).or_default() += v1.conj() * v2;
                }
            }
        }
        SparseCols { nrows: self.ncols(), cols: cols.into_iter().map(collect).collect() }
    }

    /// Operator norm. Zero rows and columns are dropped, and the remaining
    /// block is normed densely when it is small enough.
    pub fn op_norm(&self) -> f64 {
        let cols: Vec<usize> = (0..self.ncols()).filter(|&c| !self.cols[c].is_empty()).collect();
        let mut rows: Vec<usize> = self.cols.iter().flatten().map(|&(r, _)| r).collect();
        rows.sort_unstable();
        rows.dedup();
        if cols.is_empty() {
            return 0.0;
        }
        if rows.len() * cols.len() <= DENSE_BLOCK_LIMIT {
            let mut m = CMatrix::zeros(rows.len(), cols.len());
            for (j, &c) in cols.iter().enumerate() {
                for &(r, v) in &self.cols[c] {
                    m[(rows.binary_search(&r).expect("row collected"), j)] = v;
                }
            }
            return linalg::op_norm(&m);
        }
        self.power_norm()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                y[r] += v * x[c];
            }
        }
        y
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.cols
            .iter()
            .map(|col| col.iter().map(|&(r, v)| v.conj() * y[r]).sum())
            .collect()
    }

    fn power_norm(&self) -> f64 {
        let n = self.ncols();
        let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + (i % 7) as f64 * 0.1, 0.0)).collect();
        let mut est = 0.0;
        for _ in 0..1000 {
            let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if nx == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let y = self.apply(&x);
            let next = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            x = self.apply_adjoint(&y);
            if (next - est).abs() <= 1e-15 * next {
                return next;
            }
            est = next;
        }
        est
    }
}

/// `P`, `T` and the partial shifts `λ(a)` on a [`TruncatedFock`].
#[derive(Debug, Clone)]
pub struct DeformationOps {
    space: TruncatedFock,
}

impl DeformationOps {
    pub fn new(k: usize, radius: usize) -> Result<Self> {
        Ok(Self { space: TruncatedFock::new(k, radius)? })
    }

    pub fn space(&self) -> &TruncatedFock {
        &self.space
    }

    fn ball(&self) -> &WordBall {
        &self.space.ball
    }

    /// `P^n δ_w`, as a basis index.
    pub fn p_power(&self, w: usize, n: usize) -> Option<usize> {
        let mut cur = w;
        for _ in 0..n {
            cur = self.ball().parent(cur)?;
        }
        Some(cur)
    }

    /// Index of `a` in the basis, and the radius `L − |a|` of the valid
    /// domain.
    pub fn locate(&self, a: &FreeWord) -> Result<(usize, usize)> {
        if a.rank_used() > self.space.generators() {
            return Err(Error::Usage(format!("word {a} uses more generators than the space")));
        }
        let idx = self
            .ball()
            .index_of(a)
            .ok_or_else(|| Error::Usage(format!("|{a}| = {} exceeds L = {}", a.len(), self.space.radius())))?;
        Ok((idx, self.space.radius() - a.len()))
    }

    /// Indices of `a, ā, …, e`, the basis of `K(a)`.
    pub fn k_basis(&self, a: &FreeWord) -> Result<Vec<usize>> {
        let (mut cur, _) = self.locate(a)?;
        let mut out = vec![cur];
        while let Some(p) = self.ball().parent(cur) {
            out.push(p);
            cur = p;
        }
        Ok(out)
    }

    /// `λ(a)` on the valid domain.
    pub fn lambda(&self, a: &FreeWord) -> Result<SparseCols> {
        let (ai, r) = self.locate(a)?;
        let n = self.ball().prefix_len(r);
        let cols = (0..n)
            .map(|b| vec![(self.ball().product(ai, b).expect("valid domain"), Complex64::new(1.0, 0.0))])
            .collect();
        Ok(SparseCols { nrows: self.space.dim(), cols })
    }

    /// `(P − λ(a)Pλ(a)⁻¹)λ(a)δ_b = δ_{\overline{ab}} − δ_{a·\bar b}`, as
    /// signed basis indices.
    fn d_lambda(&self, ai: usize, b: usize) -> (Option<usize>, Option<usize>) {
        let ab = self.ball().product(ai, b).expect("valid domain");
        let plus = self.ball().parent(ab);
        let minus = self.ball().parent(b).map(|pb| self.ball().product(ai, pb).expect("valid domain"));
        if plus == minus {
            (None, None)
        } else {
            (plus, minus)
        }
    }

    /// `P − λ(a)Pλ(a)⁻¹` on vectors supported in radius `L − |a|`.
    pub fn difference(&self, a: &FreeWord) -> Result<SparseCols> {
        let (ai, r) = self.locate(a)?;
        let ainv = self.ball().index_of(&a.inverse()).expect("same length as a");
        let n = self.ball().prefix_len(r);
        let cols = (0..n)
            .map(|c| {
                let mut m = BTreeMap::new();
                if let Some(p) = self.ball().parent(c) {
                    *m.entry(p).or_insert(Complex64::new(0.0, 0.0)) += 1.0;
                }
                // λ(a)Pλ(a⁻¹)δ_c
                let y = self.ball().product(ainv, c).expect("valid domain");
                if let Some(py) = self.ball().parent(y) {
                    let t = self.ball().product(ai, py).ok_or_else(|| {
                        Error::Usage("difference operator leaves the truncation".into())
                    })?;
                    *m.entry(t).or_insert(Complex64::new(0.0, 0.0)) -= 1.0;
                }
                Ok(collect(m))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseCols { nrows: self.space.dim(), cols })
    }

    /// Dense `P` (small truncations only).
    pub fn p_dense(&self) -> CMatrix {
        let n = self.space.dim();
        let mut m = CMatrix::zeros(n, n);
        for w in 0..n {
            if let Some(p) = self.ball().parent(w) {
                m[(p, w)] = Complex64::new(1.0, 0.0);
            }
        }
        m
    }

    /// Dense projection `T` onto `C·δ_e`.
    pub fn t_dense(&self) -> CMatrix {
        let n = self.space.dim();
        let mut m = CMatrix::zeros(n, n);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m
    }

    /// Least `m` with `P^m = 0`.
    pub fn nilpotency_degree(&self) -> usize {
        (0..self.space.dim())
            .map(|w| self.ball().word(w).len() + 1)
            .max()
            .unwrap_or(0)
    }
}

/// Columns of `Σ_{n>=1} coef(n) P^{n−1}(P − λ(a)Pλ(a)⁻¹)λ(a)` on the
/// valid domain, with `λ(a)δ_b` itself added when `with_lambda` is set.
fn expansion(
    ops: &DeformationOps,
    a: &FreeWord,
    with_lambda: bool,
    coef: impl Fn(i32) -> Complex64,
) -> Result<SparseCols> {
    let (ai, r) = ops.locate(a)?;
    let ball = ops.ball();
    let coefs: Vec<Complex64> = (1..=ops.space.radius() as i32 + 1).map(coef).collect();
    let n = ball.prefix_len(r);
    let cols = (0..n)
        .map(|b| {
            let (plus, minus) = ops.d_lambda(ai, b);
            if plus.is_none() && minus.is_none() {
                return if with_lambda {
                    vec![(ball.product(ai, b).expect("valid domain"), Complex64::new(1.0, 0.0))]
                } else {
                    Vec::new()
                };
            }
            let mut m = BTreeMap::new();
            if with_lambda {
                m.insert(ball.product(ai, b).expect("valid domain"), Complex64::new(1.0, 0.0));
            }
            for (start, sign) in [(plus, 1.0), (minus, -1.0)] {
                let Some(mut cur) = start else { continue };
                let mut k = 0;
                loop {
                    *m.entry(cur).or_insert(Complex64::new(0.0, 0.0)) += coefs[k] * sign;
                    match ball.parent(cur) {
                        Some(p) => cur = p,
                        None => break,
                    }
                    k += 1;
                }
            }
            collect(m)
        })
        .collect();
    Ok(SparseCols { nrows: ops.space.dim(), cols })
}

/// `π°_z(a) = (1 + Σ_{n>=1} zⁿ P^{n−1}(P − λ(a)Pλ(a)⁻¹)) λ(a)` on the valid
/// domain. The sum is finite because `P` is nilpotent.
pub fn ps_pi0(ops: &DeformationOps, z: Complex64, a: &FreeWord) -> Result<SparseCols> {
    expansion(ops, a, true, |n| z.powi(n))
}

/// `(1 − zP)⁻¹ λ(a) (1 − zP)` with the inverse as the finite Neumann
/// series `Σ_{n<=L} zⁿPⁿ`.
pub fn ps_pi0_neumann(ops: &DeformationOps, z: Complex64, a: &FreeWord) -> Result<SparseCols> {
    let (ai, r) = ops.locate(a)?;
    let ball = ops.ball();
    let n = ball.prefix_len(r);
    let cols = (0..n)
        .map(|b| {
            let mut v = vec![(ball.product(ai, b).expect("valid domain"), Complex64::new(1.0, 0.0))];
            if let Some(pb) = ball.parent(b) {
                v.push((ball.product(ai, pb).expect("valid domain"), -z));
            }
            let mut m = BTreeMap::new();
            for (w, coef) in v {
                let mut zn = Complex64::new(1.0, 0.0);
                for k in 0..=ops.space.radius() {
                    let Some(t) = ops.p_power(w, k) else { break };
                    *m.entry(t).or_insert(Complex64::new(0.0, 0.0)) += zn * coef;
                    zn *= z;
                }
            }
            collect(m)
        })
        .collect();
    Ok(SparseCols { nrows: ops.space.dim(), cols })
}

/// `max ‖π°_z(a)π°_z(a⁻¹)ξ − ξ‖` over unit `ξ` supported in radius
/// `L − 2|a|`, bounded above by the Frobenius norm of the difference.
pub fn representation_defect(ops: &DeformationOps, z: Complex64, a: &FreeWord) -> Result<f64> {
    let r = ops.space.radius();
    if 2 * a.len() > r {
        return Err(Error::Usage(format!("L = {r} is below 2|a| = {}", 2 * a.len())));
    }
    let fwd = ps_pi0(ops, z, a)?;
    let back = ps_pi0(ops, z, &a.inverse())?;
    let n = ops.ball().prefix_len(r - 2 * a.len());
    let inner = SparseCols { nrows: back.nrows, cols: back.cols[..n].to_vec() };
    Ok(fwd.compose(&inner)?.add_identity(Complex64::new(-1.0, 0.0)).frobenius())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralReport {
    /// Largest entry of `(P − λ(a)Pλ(a)⁻¹)` outside the rows of `K(a)`.
    pub image_outside_k: f64,
    pub difference_norm: f64,
    pub p_preserves_k: bool,
    pub p_on_k_norm: f64,
    pub k_dim: usize,
}

/// Checks that `P − λ(a)Pλ(a)⁻¹` maps into `K(a)` with norm at most 2, and
/// that `P` maps `K(a)` into itself as a contraction.
pub fn ps_structural_checks(ops: &DeformationOps, a: &FreeWord) -> Result<StructuralReport> {
    let k = ops.k_basis(a)?;
    let d = ops.difference(a)?;
    let image_outside_k = d
        .cols
        .iter()
        .flatten()
        .filter(|(r, _)| !k.contains(r))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let difference_norm = d.op_norm();
    let p_preserves_k = k.iter().all(|&w| ops.ball().parent(w).is_none_or(|p| k.contains(&p)));
    let mut pk = CMatrix::zeros(k.len(), k.len());
    for (j, &w) in k.iter().enumerate() {
        if let Some(p) = ops.ball().parent(w) {
            let i = k.iter().position(|&x| x == p).unwrap_or(j);
            pk[(i, j)] = Complex64::new(1.0, 0.0);
        }
    }
    let p_on_k_norm = linalg::op_norm(&pk);
    let report = StructuralReport {
        image_outside_k,
        difference_norm,
        p_preserves_k,
        p_on_k_norm,
        k_dim: k.len(),
    };
    let checks = [
        (image_outside_k <= 1e-10, "image of P − λ(a)Pλ(a)⁻¹ leaves K(a)"),
        (difference_norm <= 2.0 + 1e-9, "‖P − λ(a)Pλ(a)⁻¹‖ exceeds 2"),
        (p_preserves_k, "P does not preserve K(a)"),
        (p_on_k_norm <= 1.0 + 1e-10, "P is not a contraction on K(a)"),
    ];
    for (ok, what) in checks {
        if !ok {
            return Err(Error::BoundViolated {
                statement: "deformation-structure".into(),
                detail: format!("{what} for a = {a}: {report:?}"),
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityGap {
    pub lhs: f64,
    pub rhs: f64,
    /// `‖P − λ(a)Pλ(a)⁻¹‖`, equal to `2cos(π/(|a|+2))`.
    pub difference_norm: f64,
}

impl ContinuityGap {
    /// `‖P − λ(a)Pλ(a)⁻¹‖ · Σ_{n=1}^{L} |zⁿ − wⁿ|`.
    pub fn corrected_rhs(&self) -> f64 {
        self.difference_norm.max(1.0) * self.rhs
    }
}

/// Both sides of the continuity estimate, without asserting either form.
pub fn continuity_terms(ops: &DeformationOps, z: Complex64, w: Complex64, a: &FreeWord) -> Result<ContinuityGap> {
    if z.norm() > MAX_CONTINUITY_MODULUS || w.norm() > MAX_CONTINUITY_MODULUS {
        return Err(Error::Usage(format!("|z|, |w| must be at most {MAX_CONTINUITY_MODULUS}")));
    }
    let lhs = expansion(ops, a, false, |n| z.powi(n) - w.powi(n))?.op_norm();
    let rhs = (1..=ops.space.radius() as i32).map(|n| (z.powi(n) - w.powi(n)).norm()).sum();
    let difference_norm = ops.difference(a)?.op_norm();
    Ok(ContinuityGap { lhs, rhs, difference_norm })
}

/// `‖π°_z(a) − π°_w(a)‖` on the valid domain against `Σ_{n=1}^{L} |zⁿ − wⁿ|`.
///
/// This form holds for `|a| ≤ 1`; for longer `a` it can fail by up to the
/// factor `‖P − λ(a)Pλ(a)⁻¹‖`, see [`ps_continuity_corrected`].
pub fn ps_continuity_gap(ops: &DeformationOps, z: Complex64, w: Complex64, a: &FreeWord) -> Result<ContinuityGap> {
    let gap = continuity_terms(ops, z, w, a)?;
    if gap.lhs > gap.rhs + CONTINUITY_SLACK {
        return Err(Error::BoundViolated {
            statement: "deformation-continuity".into(),
            detail: format!(
                "‖π°_z(a) − π°_w(a)‖ = {:e} exceeds Σ|zⁿ − wⁿ| = {:e} for a = {a}, z = {z}, w = {w}",
                gap.lhs, gap.rhs
            ),
        });
    }
    Ok(gap)
}

/// Continuity with the norm of `P − λ(a)Pλ(a)⁻¹` kept as a factor.
pub fn ps_continuity_corrected(
    ops: &DeformationOps,
    z: Complex64,
    w: Complex64,
    a: &FreeWord,
) -> Result<ContinuityGap> {
    let gap = continuity_terms(ops, z, w, a)?;
    if gap.lhs > gap.corrected_rhs() + CONTINUITY_SLACK {
        return Err(Error::BoundViolated {
            statement: "deformation-continuity-corrected".into(),
            detail: format!(
                "‖π°_z(a) − π°_w(a)‖ = {:e} exceeds ‖P − λPλ⁻¹‖·Σ|zⁿ − wⁿ| = {:e} for a = {a}, z = {z}, w = {w}",
                gap.lhs,
                gap.corrected_rhs()
            ),
        });
    }
    Ok(gap)
}

#[derive(Debug, Clone)]
pub struct PsPi {
    pub op: SparseCols,
    /// `‖V*V − Id‖` for `V` the operator restricted to radius `L − |a| − 1`.
    pub interior_unitarity_defect: f64,
}

/// `π_z(a) = T_z π°_z(a) T_z⁻¹` with `T_z = Id + (√(1 − z²) − 1)T`.
pub fn ps_pi(ops: &DeformationOps, z: f64, a: &FreeWord) -> Result<PsPi> {
    if !(z > -1.0 && z < 1.0) {
        return Err(Error::Usage(format!("z = {z} must lie in (−1, 1)")));
    }
    let s = (1.0 - z * z).sqrt();
    let mut op = ps_pi0(ops, Complex64::new(z, 0.0), a)?;
    // T_z⁻¹ rescales column e, T_z rescales row e
    for v in op.cols[0].iter_mut() {
        v.1 /= s;
    }
    for col in op.cols.iter_mut() {
        for v in col.iter_mut().filter(|v| v.0 == 0) {
            v.1 *= s;
        }
    }
    let (_, r) = ops.locate(a)?;
    let interior_unitarity_defect = match r.checked_sub(1) {
        Some(ri) => {
            let n = ops.ball().prefix_len(ri);
            let v = SparseCols { nrows: op.nrows, cols: op.cols[..n].to_vec() };
            v.gram().add_identity(Complex64::new(-1.0, 0.0)).op_norm()
        }
        None => 0.0,
    };
    Ok(PsPi { op, interior_unitarity_defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn p_and_t_invariants() {
        for l in 0..=4 {
            let ops = DeformationOps::new(2, l).unwrap();
            let p = ops.p_dense();
            let mut pow = CMatrix::identity(p.nrows(), p.nrows());
            for _ in 0..l {
                pow = &pow * &p;
            }
            assert!(pow.iter().any(|v| v.norm() > 0.0));
            assert!((&pow * &p).iter().all(|v| v.norm() == 0.0));
            assert_eq!(ops.nilpotency_degree(), l + 1);
            let t = ops.t_dense();
            assert_eq!(&t * &t, t);
            assert_eq!(t.adjoint(), t);
        }
    }

    #[test]
    fn z_zero_and_identity() {
        let ops = DeformationOps::new(2, 4).unwrap();
        for a in ["", "a", "aB", "bba"] {
            let a = w(a);
            assert_eq!(ps_pi0(&ops, c(0.0), &a).unwrap(), ops.lambda(&a).unwrap());
        }
        let e = ps_pi0(&ops, c(0.4), &FreeWord::empty()).unwrap();
        assert_eq!(e, SparseCols { nrows: e.nrows, cols: (0..e.nrows).map(|i| vec![(i, c(1.0))]).collect() });
        let p = ps_pi(&ops, 0.0, &w("ab")).unwrap();
        assert_eq!(p.op, ops.lambda(&w("ab")).unwrap());
        assert!(p.interior_unitarity_defect < 1e-15);
    }

    #[test]
    fn expansion_matches_neumann_series() {
        let ops = DeformationOps::new(2, 6).unwrap();
        let a = w("ab");
        for z in [c(0.3), Complex64::new(0.2, -0.5)] {
            let x = ps_pi0(&ops, z, &a).unwrap();
            let y = ps_pi0_neumann(&ops, z, &a).unwrap();
            assert!(x.sub(&y).unwrap().frobenius() < 1e-14);
        }
    }

    #[test]
    fn dense_cross_check_on_small_ball() {
        let ops = DeformationOps::new(2, 3).unwrap();
        let a = w("a");
        let z = 0.35;
        let n = ops.space().dim();
        let p = ops.p_dense();
        let mut inv = CMatrix::identity(n, n);
        let mut pk = CMatrix::identity(n, n);
        for _ in 1..=3 {
            pk = &pk * &p * c(z);
            inv += &pk;
        }
        let lam = ops.lambda(&a).unwrap().to_dense();
        let dom = lam.ncols();
        let one_minus = CMatrix::identity(n, n) - &p * c(z);
        let direct = &inv * &lam * one_minus.view((0, 0), (dom, dom));
        let ours = ps_pi0(&ops, c(z), &a).unwrap().to_dense();
        assert!(linalg::dist(&direct, &ours) < 1e-14);
    }

    #[test]
    fn representation_property() {
        let ops = DeformationOps::new(2, 6).unwrap();
        for a in ["a", "aB", "abA"] {
            let d = representation_defect(&ops, Complex64::new(0.3, 0.4), &w(a)).unwrap();
            assert!(d < 1e-12, "{a}: {d}");
        }
    }

    #[test]
    fn structural_checks_examples() {
        let ops = DeformationOps::new(2, 5).unwrap();
        let e = ps_structural_checks(&ops, &FreeWord::empty()).unwrap();
        assert_eq!(e.difference_norm, 0.0);
        let g = ps_structural_checks(&ops, &w("a")).unwrap();
        assert_eq!(g.k_dim, 2);
        assert!((g.difference_norm - 1.0).abs() < 1e-12);
        let d = ops.difference(&w("a")).unwrap().to_dense();
        // P − λPλ⁻¹ = |e⟩⟨a| − |a⟩⟨e| for a single generator
        let ia = ops.space().ball().index_of(&w("a")).unwrap();
        for r in 0..d.nrows() {
            for col in 0..d.ncols() {
                let expect = match (r, col) {
                    (0, x) if x == ia => 1.0,
                    (x, 0) if x == ia => -1.0,
                    _ => 0.0,
                };
                assert_eq!(d[(r, col)], c(expect));
            }
        }
        for a in ["ab", "aBa", "bbA", "abab"] {
            let rep = ps_structural_checks(&ops, &w(a)).unwrap();
            assert_eq!(rep.k_dim, w(a).len() + 1);
        }
    }

    #[test]
    fn continuity_examples() {
        let ops = DeformationOps::new(2, 8).unwrap();
        let a = w("ab");
        let same = ps_continuity_gap(&ops, c(0.3), c(0.3), &a).unwrap();
        assert_eq!((same.lhs, same.rhs), (0.0, 0.0));
        let gap = ps_continuity_gap(&ops, c(0.3), c(0.31), &a).unwrap();
        assert!(gap.lhs <= gap.rhs + 1e-9);
        let zero = ps_continuity_gap(&ops, c(0.5), c(0.0), &a).unwrap();
        let direct = ps_pi0(&ops, c(0.5), &a).unwrap().sub(&ops.lambda(&a).unwrap()).unwrap().op_norm();
        assert_eq!(zero.lhs, direct);
        assert!(matches!(ps_continuity_gap(&ops, c(0.99), c(0.0), &a), Err(Error::Usage(_))));
    }

    #[test]
    fn difference_norm_is_a_path_norm() {
        let ops = DeformationOps::new(2, 8).unwrap();
        for a in ["a", "aB", "bab", "abab"] {
            let gap = continuity_terms(&ops, c(0.2), c(0.1), &w(a)).unwrap();
            let expect = 2.0 * (std::f64::consts::PI / (a.len() as f64 + 2.0)).cos();
            assert!((gap.difference_norm - expect).abs() < 1e-9, "{a}");
        }
    }

    #[test]
    fn uncorrected_form_fails_for_long_words() {
        let ops = DeformationOps::new(2, 8).unwrap();
        let (z, v) = (Complex64::new(0.0146, -0.1914), Complex64::new(-0.1130, 0.0322));
        let a = w("aaa");
        assert!(matches!(
            ps_continuity_gap(&ops, z, v, &a),
            Err(Error::BoundViolated { .. })
        ));
        let gap = ps_continuity_corrected(&ops, z, v, &a).unwrap();
        assert!(gap.lhs > gap.rhs && gap.lhs <= gap.corrected_rhs());
        assert!(ps_continuity_gap(&ops, z, v, &w("a")).is_ok());
    }

    #[test]
    fn consistent_across_truncations() {
        let small = DeformationOps::new(2, 5).unwrap();
        let big = DeformationOps::new(2, 7).unwrap();
        let a = w("aB");
        let z = Complex64::new(0.1, 0.6);
        let x = ps_pi0(&small, z, &a).unwrap();
        let y = ps_pi0(&big, z, &a).unwrap();
        for (cx, cy) in x.cols.iter().zip(&y.cols) {
            assert_eq!(cx.len(), cy.len());
            for (u, v) in cx.iter().zip(cy) {
                assert_eq!(u.0, v.0);
                assert!((u.1 - v.1).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn sparse_norm_matches_dense() {
        let ops = DeformationOps::new(2, 3).unwrap();
        let x = ps_pi(&ops, 0.6, &w("ab")).unwrap().op;
        assert!((x.op_norm() - linalg::op_norm(&x.to_dense())).abs() < 1e-12);
        assert!((x.power_norm() - x.op_norm()).abs() < 1e-9);
        let g = x.gram().to_dense();
        assert!(linalg::dist(&g, &(x.to_dense().adjoint() * x.to_dense())) < 1e-14);
    }

    #[test]
    fn out_of_range_words_are_rejected() {
        let ops = DeformationOps::new(2, 3).unwrap();
        assert!(matches!(ps_pi0(&ops, c(0.1), &w("abab")), Err(Error::Usage(_))));
        assert!(matches!(ps_pi0(&ops, c(0.1), &w("abc")), Err(Error::Usage(_))));
    }
}
