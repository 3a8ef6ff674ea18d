//! Dense complex matrices, Hermitian eigendecomposition, tensor products,
//! partial traces, support powers, distances and Bloch coordinates.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default relative rank tolerance for support projections.
pub const RANK_TOL: f64 = 1e-9;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadLength { rows, cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Matrix unit |i⟩⟨j| of size n.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// Adds `s·other` in place.
    pub fn axpy(&mut self, s: C64, other: &Self) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, &b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * p..(k + 1) * p];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self { rows: n, cols: p, data: out }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// Hilbert-Schmidt inner product tr(A†B).
    pub fn inner(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.data.len(), other.data.len());
        self.data.iter().zip(other.data.iter()).map(|(a, &b)| a.conj() * b).sum()
    }

    /// tr(AB) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert!(self.cols == other.rows && self.rows == other.cols, "trace_product shape mismatch");
        let mut s = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                s += self[(i, k)] * other[(k, i)];
            }
        }
        s
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Column-stacked vectorization.
    pub fn vec_col(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    pub fn from_vec_col(rows: usize, cols: usize, v: &[C64]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| v[j * rows + i])
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        if self.is_square() && self.is_hermitian(1e-14 * (1.0 + self.max_abs())) {
            return hermitian_op_norm(self);
        }
        let g = self.adjoint().matmul(self);
        let vals = eigvals_hermitian(&g.hermitian_part());
        vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        if self.is_square() && self.is_hermitian(1e-14 * (1.0 + self.max_abs())) {
            return eigvals_hermitian(&self.hermitian_part()).iter().map(|x| x.abs()).sum();
        }
        let g = self.adjoint().matmul(self);
        eigvals_hermitian(&g.hermitian_part()).iter().map(|x| x.max(0.0).sqrt()).sum()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

fn hermitian_op_norm(m: &ComplexMatrix) -> f64 {
    let vals = eigvals_hermitian(&m.hermitian_part());
    vals.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.axpy(ONE, rhs);
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.axpy(-ONE, rhs);
    }
}

#[derive(Serialize, Deserialize)]
struct NestedMatrix(Vec<Vec<C64>>);

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<C64>> = (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect();
        NestedMatrix(rows).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let NestedMatrix(rows) = NestedMatrix::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        ComplexMatrix::new(r, c, rows.into_iter().flatten().collect()).map_err(serde::de::Error::custom)
    }
}

/// Kronecker product A⊗B.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let x = a[(i, j)];
            if x.is_zero() {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Subsystem kept by [`partial_trace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Keep {
    R,
    A,
}

/// Partial trace of an operator on R⊗A.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (dr, da) = dims;
    let n = m.require_square()?;
    if n != dr * da {
        return Err(Error::DimensionMismatch { expected: dr * da, found: n });
    }
    Ok(match keep {
        Keep::R => ComplexMatrix::from_fn(dr, dr, |i, j| (0..da).map(|k| m[(i * da + k, j * da + k)]).sum()),
        Keep::A => ComplexMatrix::from_fn(da, da, |k, l| (0..dr).map(|i| m[(i * da + k, i * da + l)]).sum()),
    })
}

/// Eigendecomposition M = V diag(values) V† with ascending values.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// Σ f(λ_k) v_k v_k†.
    pub fn reconstruct(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.rows;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    let n = m.require_square()?;
    let dev = m.hermitian_deviation();
    if dev > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(jacobi(m.hermitian_part(), n, true))
}

/// Eigenvalues only, ascending. Input is symmetrized.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows;
    jacobi(m.hermitian_part(), n, false).values
}

fn jacobi(mut a: ComplexMatrix, n: usize, want_vectors: bool) -> Eigen {
    let mut v = if want_vectors { ComplexMatrix::identity(n) } else { ComplexMatrix::zeros(1, 1) };
    let scale = a.frobenius_norm();
    if scale > 0.0 && n > 1 {
        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let abs = apq.norm();
                    if abs <= 1e-300 || abs <= 1e-18 * scale {
                        a[(p, q)] = ZERO;
                        a[(q, p)] = ZERO;
                        continue;
                    }
                    rotate(&mut a, &mut v, n, p, q, apq, abs, want_vectors);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = if want_vectors {
        let mut vs = ComplexMatrix::zeros(n, n);
        for (k, &src) in order.iter().enumerate() {
            let col = v.column(src);
            vs.set_column(k, &normalize_phase(col));
        }
        vs
    } else {
        v
    };
    Eigen { values, vectors }
}

#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, n: usize, p: usize, q: usize, apq: C64, abs: f64, want_vectors: bool) {
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / abs;
    let theta = (aqq - app) / (2.0 * abs);
    let t = if theta >= 0.0 { 1.0 / (theta + (theta * theta + 1.0).sqrt()) } else { -1.0 / (-theta + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = D·P with D = diag(1, e^{-iφ}) on (p, q).
    let e = phase.conj();
    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = e * (-s);
    let uqq = e * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * abs, 0.0);
    a[(q, q)] = C64::new(aqq + t * abs, 0.0);
    if want_vectors {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * upp + vkq * uqp;
            v[(k, q)] = vkp * upq + vkq * uqq;
        }
    }
}

/// Rotates a vector so its first dominant component is real and positive.
fn normalize_phase(mut col: Vec<C64>) -> Vec<C64> {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, z) in col.iter().enumerate() {
        if z.norm() > best_abs + 1e-12 {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs > 0.0 {
        let ph = col[best].conj() / col[best].norm();
        for z in col.iter_mut() {
            *z *= ph;
        }
    }
    col
}

/// Raises the eigenvalues above `rank_tol·λ_max` to `exponent`; the rest map to zero.
pub fn power_on_support(m: &ComplexMatrix, exponent: f64, rank_tol: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    let top = eig.values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let thr = rank_tol * top;
    if let Some(&lo) = eig.values.first() {
        if lo < -thr.max(1e-300) && lo < -rank_tol {
            return Err(Error::NotPositive { eigenvalue: lo });
        }
    }
    Ok(eig.reconstruct(|x| if x > thr && top > 0.0 { x.powf(exponent) } else { 0.0 }))
}

/// Projector onto the eigenvectors above `rank_tol·λ_max`.
pub fn support_projector(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    power_on_support(m, 0.0, rank_tol)
}

/// ½‖A−B‖₁ + ½|tr A − tr B|.
pub fn generalized_trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.require_same_shape(b)?;
    a.require_square()?;
    let diff = a - b;
    Ok(0.5 * diff.trace_norm() + 0.5 * diff.trace().re.abs())
}

/// Validated density operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const EIGEN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;

    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_square()?;
        let dev = matrix.hermitian_deviation();
        if dev > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidTrace { trace: tr });
        }
        let lo = eigvals_hermitian(&matrix)[0];
        if lo < -Self::EIGEN_TOL {
            return Err(Error::NotPositive { eigenvalue: lo });
        }
        Ok(Self { matrix })
    }

    /// Projects a Hermitian PSD matrix with positive trace onto the state set by
    /// symmetrizing and dividing by the trace.
    pub fn normalized(matrix: &ComplexMatrix) -> Result<Self> {
        let h = matrix.hermitian_part();
        let tr = h.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidTrace { trace: tr });
        }
        Self::new(h.scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    /// |ψ⟩⟨ψ| for the normalized input vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidTrace { trace: 0.0 });
        }
        let v: Vec<C64> = psi.iter().map(|&z| z / norm).collect();
        Ok(Self { matrix: ComplexMatrix::outer(&v, &v).hermitian_part() })
    }

    /// Basis state |k⟩⟨k|.
    pub fn basis(d: usize, k: usize) -> Self {
        Self { matrix: ComplexMatrix::unit(d, k, k) }
    }

    /// Qubit state ½(I + x σx + y σy + z σz).
    pub fn qubit(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(qubit_operator(x, y, z))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// (1−p)·self + p·I/d.
    pub fn depolarize(&self, p: f64) -> Self {
        let d = self.dim();
        let mut m = self.matrix.scale_real(1.0 - p);
        for i in 0..d {
            m[(i, i)] += C64::new(p / d as f64, 0.0);
        }
        Self { matrix: m }
    }

    /// Convex mixture (1−s)·self + s·other.
    pub fn mix(&self, other: &Self, s: f64) -> Result<Self> {
        self.matrix.require_same_shape(&other.matrix)?;
        let mut m = self.matrix.scale_real(1.0 - s);
        m.axpy(C64::new(s, 0.0), &other.matrix);
        Ok(Self { matrix: m })
    }

    /// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of a qubit.
    pub fn qubit_bloch(&self) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let m = &self.matrix;
        Some([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re])
    }
}

impl core::ops::Deref for DensityMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// ½(I + x σx + y σy + z σz) without validation.
pub fn qubit_operator(x: f64, y: f64, z: f64) -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![C64::new(0.5 * (1.0 + z), 0.0), C64::new(0.5 * x, -0.5 * y), C64::new(0.5 * x, 0.5 * y), C64::new(0.5 * (1.0 - z), 0.0)],
    )
    .expect("2x2")
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![ZERO, -I, I, ZERO]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[1.0, -1.0])
}

/// Bloch coordinates relative to the rescaled generalized Gell-Mann basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochCoordinates {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl BlochCoordinates {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        let n = dim * dim - 1;
        if dim < 2 || coords.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: coords.len() });
        }
        Ok(Self { dim, coords })
    }

    pub fn origin(dim: usize) -> Self {
        Self { dim, coords: vec![0.0; dim * dim - 1] }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { dim: self.dim, coords: self.coords.iter().map(|x| x * s).collect() }
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Orthonormal Hermitian basis of d×d matrices; real symmetric elements only when `real`.
pub fn hermitian_basis(d: usize, real: bool) -> Vec<ComplexMatrix> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(ComplexMatrix::unit(d, i, i));
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(i, j)] = C64::new(s, 0.0);
            e[(j, i)] = C64::new(s, 0.0);
            out.push(e);
            if !real {
                let mut f = ComplexMatrix::zeros(d, d);
                f[(i, j)] = C64::new(0.0, -s);
                f[(j, i)] = C64::new(0.0, s);
                out.push(f);
            }
        }
    }
    out
}

/// Generalized Gell-Mann basis rescaled to ‖X_k‖∞ = 1/d, ordered as
/// symmetric off-diagonal, antisymmetric off-diagonal, then diagonal.
pub fn gell_mann_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut raw = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = ONE;
            m[(k, j)] = ONE;
            raw.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = -I;
            m[(k, j)] = I;
            raw.push(m);
        }
    }
    for l in 1..d {
        let c = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(l) {
            *x = c;
        }
        diag[l] = -(l as f64) * c;
        raw.push(ComplexMatrix::from_diag(&diag));
    }
    raw.into_iter()
        .map(|g| {
            let n = hermitian_op_norm(&g);
            g.scale_real(1.0 / (d as f64 * n))
        })
        .collect()
}

/// I/d + Σ x_k X_k without a positivity check.
pub fn operator_from_bloch(x: &BlochCoordinates) -> ComplexMatrix {
    let d = x.dim;
    let mut m = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
    for (xk, b) in x.coords.iter().zip(gell_mann_basis(d)) {
        m.axpy(C64::new(*xk, 0.0), &b);
    }
    m
}

pub fn state_from_bloch(x: &BlochCoordinates) -> Result<DensityMatrix> {
    let m = operator_from_bloch(x);
    let lo = eigvals_hermitian(&m)[0];
    if lo < -DensityMatrix::EIGEN_TOL {
        return Err(Error::OutsideStateBody { min_eigenvalue: lo });
    }
    DensityMatrix::new(m)
}

pub fn bloch_from_state(rho: &DensityMatrix) -> BlochCoordinates {
    let d = rho.dim();
    let coords = gell_mann_basis(d).iter().map(|b| rho.matrix.inner(b).re / b.inner(b).re).collect();
    BlochCoordinates { dim: d, coords }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    fn ket(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        assert_eq!(kron(&pauli_z(), &i2), ComplexMatrix::from_diag(&[1.0, 1.0, -1.0, -1.0]));
        let p = kron(&ComplexMatrix::unit(2, 0, 0), &ComplexMatrix::unit(2, 1, 1));
        assert_eq!(p, ComplexMatrix::unit(4, 1, 1));
    }

    #[test]
    fn partial_trace_examples() {
        let mm = ComplexMatrix::identity(4).scale_real(0.25);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(close(&partial_trace(&mm, (2, 2), Keep::A).unwrap(), &half, 1e-15));

        let plus = DensityMatrix::pure(&ket(&[1.0, 1.0])).unwrap();
        let prod = kron(&ComplexMatrix::unit(2, 0, 0), &plus);
        assert!(close(&partial_trace(&prod, (2, 2), Keep::R).unwrap(), &ComplexMatrix::unit(2, 0, 0), 1e-15));

        let phi = ket(&[1.0, 0.0, 0.0, 1.0]);
        let omega = ComplexMatrix::outer(&phi, &phi);
        assert!(close(&partial_trace(&omega, (2, 2), Keep::A).unwrap(), &ComplexMatrix::identity(2), 1e-15));

        assert!(partial_trace(&mm, (2, 3), Keep::A).is_err());
    }

    #[test]
    fn eig_examples() {
        let e = eig_hermitian(&pauli_z()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);

        let e = eig_hermitian(&pauli_x()).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-15);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let minus = e.vector(0);
        assert_abs_diff_eq!((minus[0] * minus[1].conj()).re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.vector(1)[0].re, s, epsilon = 1e-15);

        let e = eig_hermitian(&ComplexMatrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_abs_diff_eq!(e.vector(0)[1].re, 1.0);
        assert_abs_diff_eq!(e.vector(2)[0].re, 1.0);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::unit(2, 0, 1);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_complex_reconstruction() {
        let m = ComplexMatrix::new(
            3,
            3,
            vec![
                C64::new(2.0, 0.0),
                C64::new(0.3, 0.7),
                C64::new(-0.1, 0.2),
                C64::new(0.3, -0.7),
                C64::new(-1.0, 0.0),
                C64::new(0.5, -0.5),
                C64::new(-0.1, -0.2),
                C64::new(0.5, 0.5),
                C64::new(0.25, 0.0),
            ],
        )
        .unwrap();
        let e = eig_hermitian(&m).unwrap();
        assert!(close(&e.reconstruct(|x| x), &m, 1e-13));
        let vv = e.vectors.adjoint().matmul(&e.vectors);
        assert!(close(&vv, &ComplexMatrix::identity(3), 1e-13));
    }

    #[test]
    fn power_examples() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let r = power_on_support(&half, -0.5, RANK_TOL).unwrap();
        assert!(close(&r, &ComplexMatrix::identity(2).scale_real(2f64.sqrt()), 1e-14));

        let p0 = ComplexMatrix::unit(2, 0, 0);
        assert!(close(&power_on_support(&p0, -0.5, RANK_TOL).unwrap(), &p0, 1e-15));

        let r = power_on_support(&ComplexMatrix::from_diag(&[4.0, 1.0]), 0.5, RANK_TOL).unwrap();
        assert!(close(&r, &ComplexMatrix::from_diag(&[2.0, 1.0]), 1e-15));

        assert!(power_on_support(&ComplexMatrix::from_diag(&[1.0, -0.5]), 0.5, RANK_TOL).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let rho = DensityMatrix::qubit(0.3, -0.2, 0.5).unwrap();
        assert_abs_diff_eq!(generalized_trace_distance(&rho, &rho).unwrap(), 0.0);
        let d = generalized_trace_distance(&ComplexMatrix::unit(2, 0, 0), &ComplexMatrix::unit(2, 1, 1)).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-15);
        let d = generalized_trace_distance(&rho, &rho.scale_real(0.9)).unwrap();
        assert_abs_diff_eq!(d, 0.1, epsilon = 1e-14);
        assert!(generalized_trace_distance(&rho, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn bloch_examples() {
        let mm = state_from_bloch(&BlochCoordinates::origin(2)).unwrap();
        assert!(close(&mm, &ComplexMatrix::identity(2).scale_real(0.5), 1e-15));
        // qubit order: x (symmetric), y (antisymmetric), z (diagonal)
        let up = state_from_bloch(&BlochCoordinates::new(2, vec![0.0, 0.0, 1.0]).unwrap()).unwrap();
        assert!(close(&up, &ComplexMatrix::unit(2, 0, 0), 1e-15));
        let plus = state_from_bloch(&BlochCoordinates::new(2, vec![1.0, 0.0, 0.0]).unwrap()).unwrap();
        let p = DensityMatrix::pure(&ket(&[1.0, 1.0])).unwrap();
        assert!(close(&plus, &p, 1e-15));
        let y = DensityMatrix::qubit(0.0, 1.0, 0.0).unwrap();
        assert_eq!(bloch_from_state(&y).coords.iter().map(|c| c.round()).collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);
        assert!(matches!(state_from_bloch(&BlochCoordinates::new(2, vec![1.0, 0.0, 1.0]).unwrap()), Err(Error::OutsideStateBody { .. })));
    }

    #[test]
    fn gell_mann_norms() {
        for d in 2..6 {
            let b = gell_mann_basis(d);
            assert_eq!(b.len(), d * d - 1);
            for (i, x) in b.iter().enumerate() {
                assert_abs_diff_eq!(x.op_norm(), 1.0 / d as f64, epsilon = 1e-14);
                assert!(x.is_hermitian(0.0));
                assert_abs_diff_eq!(x.trace().norm(), 0.0, epsilon = 1e-15);
                for y in b.iter().skip(i + 1) {
                    assert_abs_diff_eq!(x.inner(y).norm(), 0.0, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn density_validation() {
        let m = ComplexMatrix::identity(2).scale_real(0.45);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidTrace { .. })));
        let m = ComplexMatrix::from_diag(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPositive { .. })));
        let m = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 1 {
                ONE
            } else if i == j {
                C64::new(0.5, 0.0)
            } else {
                ZERO
            }
        });
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn serde_nested_pairs() {
        let m = pauli_y();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[0.0,0.0],[-0.0,-1.0]],[[0.0,1.0],[0.0,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0]],[[0,0],[1,0]]]").is_err());
    }
}
