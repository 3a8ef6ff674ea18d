//! Quantum channels stored as superoperators on column-stacked operators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{eigvals_hermitian, kron, partial_trace, ComplexMatrix, DensityMatrix, Keep, C64, ZERO};
use crate::symmetry::Representation;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Pgm { rho: DensityMatrix, tau: DensityMatrix },
    Twirl,
    Identity,
    ChoiCertificate,
    BlochScaling { lambda: f64 },
    PrepareSymmetric,
}

/// A channel B(H_A) → B(H_B) with vec(E(X)) = S·vec(X).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovariantChannel {
    d_in: usize,
    d_out: usize,
    superoperator: ComplexMatrix,
    provenance: Provenance,
}

impl CovariantChannel {
    pub fn from_superoperator(superoperator: ComplexMatrix, d_in: usize, d_out: usize, provenance: Provenance) -> Result<Self> {
        if superoperator.rows() != d_out * d_out || superoperator.cols() != d_in * d_in {
            return Err(Error::DimensionMismatch { expected: d_out * d_out, found: superoperator.rows() });
        }
        Ok(Self { d_in, d_out, superoperator, provenance })
    }

    /// Builds the channel from a Choi matrix J = Σ |i⟩⟨j| ⊗ E(|i⟩⟨j|) on A⊗B.
    pub fn from_choi(choi: &ComplexMatrix, d_in: usize, d_out: usize, provenance: Provenance) -> Result<Self> {
        let n = choi.require_square()?;
        if n != d_in * d_out {
            return Err(Error::DimensionMismatch { expected: d_in * d_out, found: n });
        }
        let mut s = ComplexMatrix::zeros(d_out * d_out, d_in * d_in);
        for j in 0..d_in {
            for i in 0..d_in {
                let col = j * d_in + i;
                for b in 0..d_out {
                    for a in 0..d_out {
                        s[(b * d_out + a, col)] = choi[(i * d_out + a, j * d_out + b)];
                    }
                }
            }
        }
        Self::from_superoperator(s, d_in, d_out, provenance)
    }

    /// Applies a Hermitian-preserving map given as a closure on matrix units.
    pub fn from_fn(d_in: usize, d_out: usize, provenance: Provenance, mut f: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let mut s = ComplexMatrix::zeros(d_out * d_out, d_in * d_in);
        for j in 0..d_in {
            for i in 0..d_in {
                let out = f(&ComplexMatrix::unit(d_in, i, j));
                if out.rows() != d_out || out.cols() != d_out {
                    return Err(Error::DimensionMismatch { expected: d_out, found: out.rows() });
                }
                for (r, z) in out.vec_col().into_iter().enumerate() {
                    s[(r, j * d_in + i)] = z;
                }
            }
        }
        Self::from_superoperator(s, d_in, d_out, provenance)
    }

    pub fn identity(d: usize) -> Self {
        Self { d_in: d, d_out: d, superoperator: ComplexMatrix::identity(d * d), provenance: Provenance::Identity }
    }

    pub fn twirl(rep: &Representation) -> Self {
        let d = rep.dim();
        Self { d_in: d, d_out: d, superoperator: rep.twirl().superoperator(), provenance: Provenance::Twirl }
    }

    /// E(X) = tr(X)·σ.
    pub fn prepare(d_in: usize, sigma: &DensityMatrix) -> Self {
        let d_out = sigma.dim();
        let v = sigma.vec_col();
        let s = ComplexMatrix::from_fn(d_out * d_out, d_in * d_in, |r, c| if c % (d_in + 1) == 0 { v[r] } else { ZERO });
        Self { d_in, d_out, superoperator: s, provenance: Provenance::PrepareSymmetric }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        &self.superoperator
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d_in || x.cols() != self.d_in {
            return Err(Error::DimensionMismatch { expected: self.d_in, found: x.rows() });
        }
        let v = self.superoperator.mul_vec(&x.vec_col());
        Ok(ComplexMatrix::from_vec_col(self.d_out, self.d_out, &v))
    }

    pub fn choi(&self) -> ComplexMatrix {
        let (di, dout) = (self.d_in, self.d_out);
        let mut j = ComplexMatrix::zeros(di * dout, di * dout);
        for a in 0..di {
            for b in 0..di {
                let col = b * di + a;
                for q in 0..dout {
                    for p in 0..dout {
                        j[(a * dout + p, b * dout + q)] = self.superoperator[(q * dout + p, col)];
                    }
                }
            }
        }
        j
    }

    /// max |tr_B J − I_A|.
    pub fn trace_preservation_error(&self) -> f64 {
        let ta = partial_trace(&self.choi(), (self.d_in, self.d_out), Keep::R).expect("square Choi matrix");
        (&ta - &ComplexMatrix::identity(self.d_in)).max_abs()
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        eigvals_hermitian(&self.choi().hermitian_part()).first().copied().unwrap_or(0.0)
    }

    pub fn is_cptp(&self, tol: f64) -> bool {
        self.trace_preservation_error() <= tol && self.min_choi_eigenvalue() >= -tol && self.choi().hermitian_deviation() <= tol
    }

    /// Largest violation of E∘U_g = V_g∘E over the sampling grids.
    pub fn covariance_deviation(&self, rep_in: &Representation, rep_out: &Representation) -> Result<f64> {
        if rep_in.dim() != self.d_in || rep_out.dim() != self.d_out {
            return Err(Error::DimensionMismatch { expected: self.d_in, found: rep_in.dim() });
        }
        if rep_in.group() != rep_out.group() {
            return Err(Error::MismatchedGroups);
        }
        let mut worst: f64 = 0.0;
        for g in rep_in.sample_grid() {
            let u = rep_in.unitary(&g)?;
            let v = rep_out.unitary(&g)?;
            let lhs = self.superoperator.matmul(&kron(&u.conj(), &u));
            let rhs = kron(&v.conj(), &v).matmul(&self.superoperator);
            worst = worst.max((&lhs - &rhs).max_abs());
        }
        Ok(worst)
    }

    pub fn is_covariant(&self, rep_in: &Representation, rep_out: &Representation, tol: f64) -> Result<bool> {
        Ok(self.covariance_deviation(rep_in, rep_out)? <= tol)
    }

    /// Sequential composition: `self` after `first`.
    pub fn after(&self, first: &CovariantChannel) -> Result<Self> {
        if first.d_out != self.d_in {
            return Err(Error::DimensionMismatch { expected: self.d_in, found: first.d_out });
        }
        Ok(Self {
            d_in: first.d_in,
            d_out: self.d_out,
            superoperator: self.superoperator.matmul(&first.superoperator),
            provenance: self.provenance.clone(),
        })
    }

    /// p·self + (1−p)·other.
    pub fn mix(&self, other: &CovariantChannel, p: f64) -> Result<Self> {
        if self.d_in != other.d_in || self.d_out != other.d_out {
            return Err(Error::DimensionMismatch { expected: self.d_in, found: other.d_in });
        }
        let mut s = self.superoperator.scale_real(p);
        s.axpy(C64::new(1.0 - p, 0.0), &other.superoperator);
        Ok(Self { d_in: self.d_in, d_out: self.d_out, superoperator: s, provenance: self.provenance.clone() })
    }
}

/// Trace-preservation error and smallest eigenvalue of a Choi matrix.
pub fn choi_residuals(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<(f64, f64)> {
    let ta = partial_trace(choi, (d_in, d_out), Keep::R)?;
    let tp = (&ta - &ComplexMatrix::identity(d_in)).max_abs();
    let min_eig = eigvals_hermitian(&choi.hermitian_part()).first().copied().unwrap_or(0.0);
    Ok((tp, min_eig))
}
