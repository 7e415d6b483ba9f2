//! Dense complex matrix kernel: norms, polar decomposition, spectra of normal
//! matrices and spectral projections of self-adjoint ones.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The decompositions themselves
//! (SVD, Hermitian eigensolver) come from nalgebra; this module adds the
//! tolerance gates, deterministic ordering and the file format.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest dimension for which the operator norm uses a full SVD; larger
/// matrices fall back to power iteration on `A*A`.
pub const SVD_NORM_CROSSOVER: usize = 512;
/// Tolerance on `‖U*U − I‖` for a [`UnitaryMatrix`].
pub const UNITARY_TOL: f64 = 1e-10;
/// Smallest singular value accepted by [`polar_unitary`].
pub const SINGULAR_FLOOR: f64 = 1e-12;
/// Commutator tolerance for [`spectrum_normal`].
pub const NORMAL_TOL: f64 = 1e-9;
/// Asymmetry tolerance for self-adjoint inputs.
pub const SELF_ADJOINT_TOL: f64 = 1e-9;
/// Half-width of the band around a spectral threshold that must be empty.
pub const SPECTRAL_BAND: f64 = 1e-6;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Operator,
    HilbertSchmidt,
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn diag(values: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_column_slice(values))
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&x| Complex64::new(x, 0.0)),
    ))
}

pub fn norm(a: &CMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Operator => op_norm(a),
        NormKind::HilbertSchmidt => hs_norm(a),
    }
}

/// `√(Σ|aᵢⱼ|²)`, not normalised by the dimension.
pub fn hs_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return 0.0;
    }
    if r == 1 || c == 1 {
        return hs_norm(a);
    }
    if r.max(c) <= SVD_NORM_CROSSOVER {
        a.singular_values().max()
    } else {
        power_iteration_norm(a)
    }
}

fn power_iteration_norm(a: &CMatrix) -> f64 {
    let c = a.ncols();
    // deterministic start vector with no special alignment
    let mut v = DVector::from_iterator(
        c,
        (0..c).map(|i| Complex64::new(1.0 + (i as f64 * 0.618_033_988_75).fract(), 0.0)),
    );
    v /= Complex64::new(v.norm(), 0.0);
    let mut estimate = 0.0;
    for _ in 0..10_000 {
        let w = a.adjoint() * (a * &v);
        let n = w.norm();
        if n == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(n, 0.0);
        let next = n.sqrt();
        if (next - estimate).abs() <= 1e-14 * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// `‖A − B‖_op`.
pub fn dist(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a - b))
}

pub fn asymmetry(h: &CMatrix) -> f64 {
    op_norm(&(h - h.adjoint()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn check_finite(a: &CMatrix) -> Result<()> {
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            let z = a[(r, c)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// A square matrix whose unitarity defect `‖U*U − I‖` was measured at
/// construction and is at most [`UNITARY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
    unitarity_defect: f64,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, UNITARY_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Usage(format!("unitary must be square, got {:?}", matrix.shape())));
        }
        check_finite(&matrix)?;
        let d = matrix.nrows();
        let defect = op_norm(&(matrix.adjoint() * &matrix - identity(d)));
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { matrix, unitarity_defect: defect })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: identity(d), unitarity_defect: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.unitarity_defect
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), unitarity_defect: self.unitarity_defect }
    }
}

impl AsRef<CMatrix> for UnitaryMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Polar decomposition `T = U·|T|` of an invertible square matrix.
#[derive(Debug, Clone)]
pub struct Polar {
    pub unitary: UnitaryMatrix,
    /// `(T*T)^{1/2}`.
    pub positive: CMatrix,
    pub smallest_singular_value: f64,
}

pub fn polar(t: &CMatrix) -> Result<Polar> {
    if !t.is_square() {
        return Err(Error::Usage(format!("polar decomposition needs a square matrix, got {:?}", t.shape())));
    }
    check_finite(t)?;
    let svd = SVD::new(t.clone(), true, true);
    let smallest = svd.singular_values.min();
    if smallest <= SINGULAR_FLOOR {
        return Err(Error::Singular { smallest, floor: SINGULAR_FLOOR });
    }
    let w = svd.u.as_ref().unwrap();
    let v_t = svd.v_t.as_ref().unwrap();
    let u = w * v_t;
    let sigma = CMatrix::from_diagonal(&svd.singular_values.map(|s| Complex64::new(s, 0.0)));
    let positive = v_t.adjoint() * sigma * v_t;
    Ok(Polar {
        unitary: UnitaryMatrix::new(u)?,
        positive: hermitian_part(&positive),
        smallest_singular_value: smallest,
    })
}

/// Unitary factor of the polar decomposition.
pub fn polar_unitary(t: &CMatrix) -> Result<UnitaryMatrix> {
    polar(t).map(|p| p.unitary)
}

pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a self-adjoint matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(h: &CMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::Usage("eigen-decomposition needs a square matrix".into()));
    }
    let asym = asymmetry(h);
    if asym > SELF_ADJOINT_TOL {
        return Err(Error::NotSelfAdjoint { asymmetry: asym });
    }
    Ok(hermitian_eigen_unchecked(&hermitian_part(h)))
}

fn hermitian_eigen_unchecked(h: &CMatrix) -> HermitianEigen {
    let n = h.nrows();
    if n == 0 {
        return HermitianEigen { values: vec![], vectors: h.clone() };
    }
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Eigenvalues of a normal matrix, sorted by argument in `[0, 2π)` and then
/// by modulus.
pub fn spectrum_normal(a: &CMatrix) -> Result<Vec<Complex64>> {
    normal_eigen(a).map(|(values, _)| values)
}

/// Unitary diagonalisation of a normal matrix: returns eigenvalues (same
/// order as [`spectrum_normal`]) and the matching eigenvector columns.
pub fn normal_eigen(a: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::Usage("spectrum needs a square matrix".into()));
    }
    let comm = op_norm(&(a.adjoint() * a - a * a.adjoint()));
    if comm > NORMAL_TOL {
        return Err(Error::NonNormalMatrix { commutator: comm });
    }
    let n = a.nrows();
    // Real and imaginary parts commute; a generic real combination of them
    // has an eigenbasis that diagonalises A.
    let re = hermitian_part(a);
    let im = (a - a.adjoint()).scale(0.5) * Complex64::new(0.0, -1.0);
    let mix = &re + im.scale(0.754_877_666_246_692_7);
    let eig = hermitian_eigen_unchecked(&hermitian_part(&mix));
    let v = eig.vectors;
    let mut pairs: Vec<(Complex64, usize)> = (0..n)
        .map(|j| {
            let col = v.column(j);
            let z = (col.adjoint() * a * col)[(0, 0)];
            (snap(z), j)
        })
        .collect();
    let recon = CMatrix::from_fn(n, n, |r, c| {
        pairs.iter().map(|&(z, j)| v[(r, j)] * z * v[(c, j)].conj()).sum()
    });
    let err = op_norm(&(a - &recon));
    if err > 1e-8 {
        return Err(Error::BoundViolated {
            statement: "normal-eigendecomposition".into(),
            detail: format!("reconstruction error {err:e} exceeds 1e-8"),
        });
    }
    pairs.sort_by(|(z, _), (w, _)| {
        angle(*z).total_cmp(&angle(*w)).then(z.norm().total_cmp(&w.norm()))
    });
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, pairs[c].1)]);
    Ok((pairs.into_iter().map(|(z, _)| z).collect(), vectors))
}

/// Clears rounding noise on the real or imaginary axis so ordering by
/// argument does not flip between `0` and `2π`.
fn snap(z: Complex64) -> Complex64 {
    let scale = z.norm().max(1.0) * 1e-13;
    Complex64::new(
        if z.re.abs() < scale { 0.0 } else { z.re },
        if z.im.abs() < scale { 0.0 } else { z.im },
    )
}

/// Argument in `[0, 2π)`.
pub fn angle(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Orthogonal projection onto the span of eigenvectors of `h` with
/// eigenvalue `>= threshold`.
pub fn spectral_projection(h: &CMatrix, threshold: f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(h)?;
    spectral_projection_from(&eig, threshold)
}

pub fn spectral_projection_from(eig: &HermitianEigen, threshold: f64) -> Result<CMatrix> {
    if let Some(&bad) = eig.values.iter().find(|&&l| (l - threshold).abs() < SPECTRAL_BAND) {
        return Err(Error::SpectralGap {
            eigenvalue: bad,
            band: (threshold - SPECTRAL_BAND, threshold + SPECTRAL_BAND),
        });
    }
    let n = eig.vectors.nrows();
    let mut q = CMatrix::zeros(n, n);
    for (j, &l) in eig.values.iter().enumerate() {
        if l >= threshold {
            let col = eig.vectors.column(j);
            q += &col * col.adjoint();
        }
    }
    Ok(hermitian_part(&q))
}

/// `exp(θX)` for skew-Hermitian `X`, via the eigenbasis of the Hermitian `−iX`.
pub fn exp_skew(x: &CMatrix, theta: f64) -> Result<CMatrix> {
    let h = x * Complex64::new(0.0, -1.0);
    let eig = hermitian_eigen(&h)?;
    let n = x.nrows();
    let v = &eig.vectors;
    let phases: Vec<Complex64> = eig.values.iter().map(|&l| Complex64::from_polar(1.0, theta * l)).collect();
    Ok(CMatrix::from_fn(n, n, |r, c| {
        (0..n).map(|j| v[(r, j)] * phases[j] * v[(c, j)].conj()).sum()
    }))
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[&CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// On-disk matrix: flat row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixRecord {
    fn from(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl TryFrom<&MatrixRecord> for CMatrix {
    type Error = Error;

    fn try_from(rec: &MatrixRecord) -> Result<Self> {
        if rec.rows == 0 || rec.cols == 0 || rec.data.len() != rec.rows * rec.cols {
            return Err(Error::Parse(format!(
                "matrix record {}x{} carries {} entries",
                rec.rows,
                rec.cols,
                rec.data.len()
            )));
        }
        let m = CMatrix::from_fn(rec.rows, rec.cols, |r, c| {
            let [re, im] = rec.data[r * rec.cols + c];
            Complex64::new(re, im)
        });
        check_finite(&m)?;
        Ok(m)
    }
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixRecord::from(m)).expect("matrix serialises")
}

pub fn matrix_from_json(s: &str) -> Result<CMatrix> {
    let rec: MatrixRecord = serde_json::from_str(s)?;
    CMatrix::try_from(&rec)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(m))?;
    Ok(())
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}
