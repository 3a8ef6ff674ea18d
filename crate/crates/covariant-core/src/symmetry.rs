//! Group specifications, unitary representations, dual and tensor
//! representations, and exact G-twirls.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{kron, ComplexMatrix, C64, I, ZERO};
use crate::su2;

/// Group description as written in scenario files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SymmetrySpec {
    /// Integer spectrum of the generator H, with U(t) = exp(itH).
    U1 { weights: Vec<i64> },
    /// Direct sum of spin blocks in the standard |j, m⟩ basis.
    Su2 { spins: Vec<Spin> },
    /// Explicit list of unitaries forming a group.
    Finite { unitaries: Vec<ComplexMatrix> },
}

/// A spin j with a multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpinEntry", into = "SpinEntry")]
pub struct Spin {
    pub two_j: u32,
    pub multiplicity: u32,
}

#[derive(Serialize, Deserialize)]
struct SpinEntry {
    j: f64,
    #[serde(default = "one")]
    multiplicity: u32,
}

fn one() -> u32 {
    1
}

impl TryFrom<SpinEntry> for Spin {
    type Error = Error;
    fn try_from(e: SpinEntry) -> Result<Self> {
        let two_j = 2.0 * e.j;
        if !(two_j >= 0.0) || (two_j - two_j.round()).abs() > 1e-12 || two_j > 20.0 {
            return Err(Error::InvalidRepresentation(format!("spin {} is not a half-integer in [0, 10]", e.j)));
        }
        if e.multiplicity == 0 {
            return Err(Error::InvalidRepresentation(format!("spin {} has zero multiplicity", e.j)));
        }
        Ok(Spin { two_j: two_j.round() as u32, multiplicity: e.multiplicity })
    }
}

impl From<Spin> for SpinEntry {
    fn from(s: Spin) -> Self {
        SpinEntry { j: s.two_j as f64 / 2.0, multiplicity: s.multiplicity }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    U1,
    Su2,
    Finite,
}

/// An element of the underlying group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupElement {
    /// t on the U(1) circle.
    Phase(f64),
    /// exp(−iθ n·J).
    Rotation { angle: f64, axis: [f64; 3] },
    /// Position in a finite element list.
    Index(usize),
}

/// Internal data of a representation.
#[derive(Clone, Debug, PartialEq)]
pub enum RepKind {
    U1 {
        weights: Vec<i64>,
    },
    /// U(g) = V (⊕ D^{j_k}(g)) V†, with V = I when `basis` is `None`.
    Su2 {
        blocks: Vec<u32>,
        basis: Option<ComplexMatrix>,
    },
    Finite {
        elements: Vec<ComplexMatrix>,
    },
}

/// Unitary representation on a finite-dimensional system.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    dim: usize,
    kind: RepKind,
}

impl Representation {
    pub fn from_spec(spec: &SymmetrySpec) -> Result<Self> {
        match spec {
            SymmetrySpec::U1 { weights } => Self::u1(weights.clone()),
            SymmetrySpec::Su2 { spins } => {
                let mut blocks = Vec::new();
                for s in spins {
                    for _ in 0..s.multiplicity {
                        blocks.push(s.two_j);
                    }
                }
                Self::su2(blocks)
            }
            SymmetrySpec::Finite { unitaries } => Self::finite(unitaries.clone()),
        }
    }

    pub fn u1(weights: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidRepresentation("U(1) weight list is empty".into()));
        }
        Ok(Self { dim: weights.len(), kind: RepKind::U1 { weights } })
    }

    /// Standard-basis spin blocks listed by doubled spin.
    pub fn su2(blocks: Vec<u32>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidRepresentation("SU(2) block list is empty".into()));
        }
        let dim = blocks.iter().map(|&b| su2::block_dim(b)).sum();
        Ok(Self { dim, kind: RepKind::Su2 { blocks, basis: None } })
    }

    /// Spin blocks in the basis given by the columns of `basis`.
    pub fn su2_with_basis(blocks: Vec<u32>, basis: ComplexMatrix) -> Result<Self> {
        let mut rep = Self::su2(blocks)?;
        let n = basis.require_square()?;
        if n != rep.dim {
            return Err(Error::DimensionMismatch { expected: rep.dim, found: n });
        }
        check_unitary(&basis, 1e-10)?;
        rep.kind = match rep.kind {
            RepKind::Su2 { blocks, .. } => RepKind::Su2 { blocks, basis: Some(basis) },
            k => k,
        };
        Ok(rep)
    }

    /// Finite group from its full element list; unitarity and closure are verified.
    pub fn finite(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements.first().ok_or_else(|| Error::InvalidRepresentation("finite group has no elements".into()))?;
        let d = first.require_square()?;
        for u in &elements {
            let n = u.require_square()?;
            if n != d {
                return Err(Error::DimensionMismatch { expected: d, found: n });
            }
            check_unitary(u, 1e-10)?;
        }
        for (a, ua) in elements.iter().enumerate() {
            for (b, ub) in elements.iter().enumerate() {
                let prod = ua.matmul(ub);
                if !elements.iter().any(|g| (&prod - g).max_abs() <= 1e-8) {
                    return Err(Error::InvalidRepresentation(format!(
                        "element list not closed: product of elements {a} and {b} is missing"
                    )));
                }
            }
        }
        Ok(Self { dim: d, kind: RepKind::Finite { elements } })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RepKind {
        &self.kind
    }

    pub fn group(&self) -> GroupKind {
        match self.kind {
            RepKind::U1 { .. } => GroupKind::U1,
            RepKind::Su2 { .. } => GroupKind::Su2,
            RepKind::Finite { .. } => GroupKind::Finite,
        }
    }

    /// Dual representation g ↦ U(g)*.
    pub fn dual(&self) -> Self {
        let kind = match &self.kind {
            RepKind::U1 { weights } => RepKind::U1 { weights: weights.iter().map(|w| -w).collect() },
            RepKind::Su2 { blocks, basis } => {
                let y = block_diag(blocks.iter().map(|&b| su2::conjugation_intertwiner(b).adjoint()));
                let v = match basis {
                    Some(v) => v.conj().matmul(&y),
                    None => y,
                };
                RepKind::Su2 { blocks: blocks.clone(), basis: Some(v) }
            }
            RepKind::Finite { elements } => RepKind::Finite { elements: elements.iter().map(|u| u.conj()).collect() },
        };
        Self { dim: self.dim, kind }
    }

    /// Tensor product representation g ↦ U_self(g) ⊗ U_other(g).
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        let kind = match (&self.kind, &other.kind) {
            (RepKind::U1 { weights: a }, RepKind::U1 { weights: b }) => {
                RepKind::U1 { weights: a.iter().flat_map(|wa| b.iter().map(move |wb| wa + wb)).collect() }
            }
            (RepKind::Su2 { blocks: ba, basis: va }, RepKind::Su2 { blocks: bb, basis: vb }) => {
                let (blocks, w) = coupling(ba, bb);
                let v = match (va, vb) {
                    (None, None) => w,
                    _ => {
                        let ia = ComplexMatrix::identity(self.dim);
                        let ib = ComplexMatrix::identity(other.dim);
                        kron(va.as_ref().unwrap_or(&ia), vb.as_ref().unwrap_or(&ib)).matmul(&w)
                    }
                };
                RepKind::Su2 { blocks, basis: Some(v) }
            }
            (RepKind::Finite { elements: ea }, RepKind::Finite { elements: eb }) => {
                if ea.len() != eb.len() {
                    return Err(Error::MismatchedGroups);
                }
                RepKind::Finite { elements: ea.iter().zip(eb).map(|(a, b)| kron(a, b)).collect() }
            }
            _ => return Err(Error::MismatchedGroups),
        };
        Ok(Self { dim, kind })
    }

    pub fn unitary(&self, g: &GroupElement) -> Result<ComplexMatrix> {
        match (&self.kind, g) {
            (RepKind::U1 { weights }, GroupElement::Phase(t)) => {
                let d = weights.len();
                Ok(ComplexMatrix::from_fn(d, d, |a, b| if a == b { (I * (weights[a] as f64 * t)).exp() } else { ZERO }))
            }
            (RepKind::Su2 { blocks, basis }, GroupElement::Rotation { angle, axis }) => {
                let d = block_diag(blocks.iter().map(|&b| su2::rotation(b, *angle, *axis)));
                Ok(match basis {
                    Some(v) => v.matmul(&d).matmul(&v.adjoint()),
                    None => d,
                })
            }
            (RepKind::Finite { elements }, GroupElement::Index(k)) => {
                elements.get(*k).cloned().ok_or_else(|| Error::InvalidParameter(format!("group element index {k} out of range")))
            }
            _ => Err(Error::MismatchedGroups),
        }
    }

    /// Sample of group elements for covariance checks: 16 circle points for
    /// U(1), the binary tetrahedral group for SU(2), every element otherwise.
    pub fn sample_grid(&self) -> Vec<GroupElement> {
        match &self.kind {
            RepKind::U1 { .. } => (0..16).map(|k| GroupElement::Phase(2.0 * core::f64::consts::PI * k as f64 / 16.0)).collect(),
            RepKind::Su2 { .. } => {
                su2::binary_tetrahedral().into_iter().map(|(angle, axis)| GroupElement::Rotation { angle, axis }).collect()
            }
            RepKind::Finite { elements } => (0..elements.len()).map(GroupElement::Index).collect(),
        }
    }

    /// Unitaries on the sampling grid.
    pub fn sample_unitaries(&self) -> Vec<ComplexMatrix> {
        self.sample_grid().iter().map(|g| self.unitary(g).expect("grid matches group")).collect()
    }

    pub fn twirl(&self) -> TwirlChannel {
        TwirlChannel { rep: self.clone() }
    }

    /// ‖G(M) − M‖∞ ≤ tol.
    pub fn is_symmetric(&self, m: &ComplexMatrix, tol: f64) -> bool {
        if m.rows() != self.dim || !m.is_square() {
            return false;
        }
        (&self.twirl().apply(m) - m).op_norm() <= tol
    }
}

fn check_unitary(u: &ComplexMatrix, tol: f64) -> Result<()> {
    let n = u.rows();
    let dev = (&u.adjoint().matmul(u) - &ComplexMatrix::identity(n)).max_abs();
    if dev > tol {
        return Err(Error::InvalidRepresentation(format!("matrix is not unitary (deviation {dev:e})")));
    }
    Ok(())
}

/// Block-diagonal matrix from square blocks.
pub fn block_diag(blocks: impl IntoIterator<Item = ComplexMatrix>) -> ComplexMatrix {
    let blocks: Vec<ComplexMatrix> = blocks.into_iter().collect();
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for b in &blocks {
        let k = b.rows();
        for i in 0..k {
            for j in 0..k {
                out[(off + i, off + j)] = b[(i, j)];
            }
        }
        off += k;
    }
    out
}

pub fn block_offsets(blocks: &[u32]) -> Vec<usize> {
    let mut offs = Vec::with_capacity(blocks.len());
    let mut o = 0;
    for &b in blocks {
        offs.push(o);
        o += su2::block_dim(b);
    }
    offs
}

/// Coupled spin list and the unitary W whose columns are the coupled basis
/// vectors |J M⟩ written in the product of the two standard block bases.
fn coupling(ba: &[u32], bb: &[u32]) -> (Vec<u32>, ComplexMatrix) {
    let da: usize = ba.iter().map(|&b| su2::block_dim(b)).sum();
    let db: usize = bb.iter().map(|&b| su2::block_dim(b)).sum();
    let oa = block_offsets(ba);
    let ob = block_offsets(bb);
    let mut blocks = Vec::new();
    let mut w = ComplexMatrix::zeros(da * db, da * db);
    let mut col = 0;
    for (ia, &j1) in ba.iter().enumerate() {
        for (ib, &j2) in bb.iter().enumerate() {
            let lo = (j1 as i64 - j2 as i64).unsigned_abs() as u32;
            let mut jj = lo;
            while jj <= j1 + j2 {
                blocks.push(jj);
                for km in 0..=jj as i64 {
                    let two_m = jj as i64 - 2 * km;
                    for k1 in 0..=j1 as i64 {
                        let m1 = j1 as i64 - 2 * k1;
                        let m2 = two_m - m1;
                        if m2.abs() > j2 as i64 {
                            continue;
                        }
                        let k2 = (j2 as i64 - m2) / 2;
                        let c = su2::clebsch_gordan(j1 as i64, m1, j2 as i64, m2, jj as i64, two_m);
                        let row = (oa[ia] + k1 as usize) * db + ob[ib] + k2 as usize;
                        w[(row, col)] = C64::new(c, 0.0);
                    }
                    col += 1;
                }
                jj += 2;
            }
        }
    }
    (blocks, w)
}

/// The G-twirl of a representation.
#[derive(Clone, Debug, PartialEq)]
pub struct TwirlChannel {
    rep: Representation,
}

impl TwirlChannel {
    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim
    }

    /// Exact projection onto the commutant.
    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.rep.dim;
        assert_eq!(m.rows(), d, "twirl dimension mismatch");
        match &self.rep.kind {
            RepKind::U1 { weights } => ComplexMatrix::from_fn(d, d, |a, b| if weights[a] == weights[b] { m[(a, b)] } else { ZERO }),
            RepKind::Su2 { blocks, basis } => {
                let mp = match basis {
                    Some(v) => v.adjoint().matmul(m).matmul(v),
                    None => m.clone(),
                };
                let offs = block_offsets(blocks);
                let mut out = ComplexMatrix::zeros(d, d);
                for (a, &ja) in blocks.iter().enumerate() {
                    for (b, &jb) in blocks.iter().enumerate() {
                        if ja != jb {
                            continue;
                        }
                        let n = su2::block_dim(ja);
                        let t: C64 = (0..n).map(|k| mp[(offs[a] + k, offs[b] + k)]).sum::<C64>() / n as f64;
                        for k in 0..n {
                            out[(offs[a] + k, offs[b] + k)] = t;
                        }
                    }
                }
                match basis {
                    Some(v) => v.matmul(&out).matmul(&v.adjoint()),
                    None => out,
                }
            }
            RepKind::Finite { elements } => {
                let mut out = ComplexMatrix::zeros(d, d);
                for u in elements {
                    out += &u.matmul(m).matmul(&u.adjoint());
                }
                out.scale_real(1.0 / elements.len() as f64)
            }
        }
    }

    /// d²×d² matrix acting on column-stacked operators.
    pub fn superoperator(&self) -> ComplexMatrix {
        let d = self.rep.dim;
        let mut s = ComplexMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for i in 0..d {
                let out = self.apply(&ComplexMatrix::unit(d, i, j)).vec_col();
                let c = j * d + i;
                for (r, z) in out.into_iter().enumerate() {
                    s[(r, c)] = z;
                }
            }
        }
        s
    }
}

/// Twirl of the representation on the tensor product R⊗A.
pub fn joint_twirl(rep_r: &Representation, rep_a: &Representation) -> Result<TwirlChannel> {
    Ok(rep_r.tensor(rep_a)?.twirl())
}

pub fn is_symmetric(rep: &Representation, m: &ComplexMatrix, tol: f64) -> bool {
    rep.is_symmetric(m, tol)
}

/// Permutation representation of the cyclic group Z_n on ℂⁿ.
pub fn cyclic_shift_group(n: usize) -> Result<Representation> {
    let shift = ComplexMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { C64::new(1.0, 0.0) } else { ZERO });
    let mut elements = vec![ComplexMatrix::identity(n)];
    for _ in 1..n {
        let next = shift.matmul(elements.last().expect("nonempty"));
        elements.push(next);
    }
    Representation::finite(elements)
}

/// Permutation representation of S₃ on ℂ³.
pub fn symmetric_group_s3() -> Result<Representation> {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let elements = perms.iter().map(|p| ComplexMatrix::from_fn(3, 3, |i, j| if p[j] == i { C64::new(1.0, 0.0) } else { ZERO })).collect();
    Representation::finite(elements)
}

/// Pauli group {±1, ±i}×{I, X, Y, Z} on a qubit.
pub fn pauli_group() -> Result<Representation> {
    use crate::hermitian::{pauli_x, pauli_y, pauli_z};
    let base = [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
    let phases = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), I, -I];
    let elements = phases.iter().flat_map(|&ph| base.iter().map(move |b| b.scale(ph))).collect();
    Representation::finite(elements)
}
