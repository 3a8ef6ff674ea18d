//! Irreducible tensor operator bases and modes of asymmetry.
//!
//! Labels: U(1) modes carry the raw weight difference, SU(2) modes carry the
//! doubled rank 2k with component index running over q = k, k−1, …, −k, and
//! finite-group modes carry the position of the irrep in a canonical order
//! (trivial first). Label 0 is always the trivial irrep.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{eig_hermitian, ComplexMatrix, C64, ZERO};
use crate::random::{random_hermitian, seeded};
use crate::su2;
use crate::symmetry::{block_offsets, GroupKind, RepKind, Representation};

/// Irrep λ, multiplicity index α and component index j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeLabel {
    pub lambda: i64,
    pub alpha: usize,
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisElement {
    pub label: ModeLabel,
    pub operator: ComplexMatrix,
}

/// An irrep occurring in the conjugation action on B(H).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrrepInfo {
    pub lambda: i64,
    pub dim: usize,
    pub multiplicity: usize,
    pub conjugate: i64,
    /// Character on the element list (finite groups only).
    #[serde(skip)]
    pub character: Option<Vec<C64>>,
}

/// Orthonormal ITO basis of B(H).
#[derive(Clone, Debug, PartialEq)]
pub struct ItoBasis {
    dim: usize,
    group: GroupKind,
    irreps: Vec<IrrepInfo>,
    elements: Vec<BasisElement>,
}

pub const CLUSTER_TOL: f64 = 1e-8;

impl ItoBasis {
    pub fn build(rep: &Representation) -> Result<Self> {
        match rep.kind() {
            RepKind::U1 { weights } => Ok(build_u1(weights)),
            RepKind::Su2 { blocks, basis } => Ok(build_su2(blocks, basis.as_ref())),
            RepKind::Finite { elements } => build_finite(elements),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn irreps(&self) -> &[IrrepInfo] {
        &self.irreps
    }

    pub fn irrep(&self, lambda: i64) -> Option<&IrrepInfo> {
        self.irreps.iter().find(|r| r.lambda == lambda)
    }

    pub fn conjugate_label(&self, lambda: i64) -> Option<i64> {
        self.irrep(lambda).map(|r| r.conjugate)
    }

    pub fn nontrivial_irreps(&self) -> impl Iterator<Item = &IrrepInfo> {
        self.irreps.iter().filter(|r| r.lambda != 0)
    }

    /// Sum of the dimensions of the distinct non-trivial irreps.
    pub fn n_value(&self) -> usize {
        self.nontrivial_irreps().map(|r| r.dim).sum()
    }

    pub fn element(&self, label: ModeLabel) -> Option<&ComplexMatrix> {
        self.elements.iter().find(|e| e.label == label).map(|e| &e.operator)
    }

    /// Elements of irrep λ with component j, in α order.
    pub fn component(&self, lambda: i64, j: usize) -> impl Iterator<Item = &BasisElement> {
        self.elements.iter().filter(move |e| e.label.lambda == lambda && e.label.j == j)
    }

    /// Label of the irrep in `other` equivalent to irrep `lambda` of `self`.
    pub fn matching_label(&self, lambda: i64, other: &ItoBasis) -> Option<i64> {
        if self.group != other.group {
            return None;
        }
        match self.group {
            GroupKind::U1 | GroupKind::Su2 => other.irrep(lambda).map(|r| r.lambda),
            GroupKind::Finite => {
                let chi = self.irrep(lambda)?.character.as_ref()?;
                other.irreps.iter().find(|r| r.character.as_ref().is_some_and(|c| same_character(c, chi))).map(|r| r.lambda)
            }
        }
    }

    /// Irrep representation matrices v^λ(g)_{ij} = ⟨X_i, U X_j U†⟩ read off
    /// from the first copy.
    pub fn irrep_matrix(&self, lambda: i64, u: &ComplexMatrix) -> Option<ComplexMatrix> {
        let info = self.irrep(lambda)?;
        let xs: Vec<&ComplexMatrix> = (0..info.dim).map(|j| self.element(ModeLabel { lambda, alpha: 0, j })).collect::<Option<_>>()?;
        let ud = u.adjoint();
        let moved: Vec<ComplexMatrix> = xs.iter().map(|x| u.matmul(x).matmul(&ud)).collect();
        Some(ComplexMatrix::from_fn(info.dim, info.dim, |i, j| xs[i].inner(&moved[j])))
    }
}

fn same_character(a: &[C64], b: &[C64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= 1e-6)
}

/// Hermitian orthonormal basis of the trivial sector, starting with I/√d.
fn hermitian_trivial_basis(d: usize, span: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut candidates = vec![ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt())];
    for b in span {
        let bd = b.adjoint();
        candidates.push((b + &bd).scale_real(0.5));
        candidates.push((b - &bd).scale(C64::new(0.0, -0.5)));
    }
    let mut out: Vec<ComplexMatrix> = Vec::with_capacity(span.len());
    for mut c in candidates {
        if out.len() == span.len() {
            break;
        }
        for _ in 0..2 {
            for q in &out {
                let proj = q.inner(&c).re;
                c.axpy(C64::new(-proj, 0.0), q);
            }
        }
        let n = c.frobenius_norm();
        if n > 1e-8 {
            out.push(c.hermitian_part().scale_real(1.0 / n));
        }
    }
    out
}

fn build_u1(weights: &[i64]) -> ItoBasis {
    let d = weights.len();
    let mut span = Vec::new();
    let mut by_lambda: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    for m in 0..d {
        for n in 0..d {
            let lam = weights[m] - weights[n];
            if lam == 0 {
                span.push(ComplexMatrix::unit(d, m, n));
            } else if lam > 0 {
                by_lambda.entry(lam).or_default().push((m, n));
            }
        }
    }
    let trivial = hermitian_trivial_basis(d, &span);
    let mut irreps = vec![IrrepInfo { lambda: 0, dim: 1, multiplicity: trivial.len(), conjugate: 0, character: None }];
    let mut elements: Vec<BasisElement> = trivial
        .into_iter()
        .enumerate()
        .map(|(alpha, operator)| BasisElement { label: ModeLabel { lambda: 0, alpha, j: 0 }, operator })
        .collect();
    let mut signed: Vec<(i64, Vec<(usize, usize)>)> = Vec::new();
    for (&lam, pairs) in &by_lambda {
        signed.push((lam, pairs.clone()));
        signed.push((-lam, pairs.iter().map(|&(m, n)| (n, m)).collect()));
    }
    signed.sort_by_key(|(lam, _)| *lam);
    for (lam, pairs) in signed {
        irreps.push(IrrepInfo { lambda: lam, dim: 1, multiplicity: pairs.len(), conjugate: -lam, character: None });
        for (alpha, (m, n)) in pairs.into_iter().enumerate() {
            elements.push(BasisElement { label: ModeLabel { lambda: lam, alpha, j: 0 }, operator: ComplexMatrix::unit(d, m, n) });
        }
    }
    ItoBasis { dim: d, group: GroupKind::U1, irreps, elements }
}

fn build_su2(blocks: &[u32], basis: Option<&ComplexMatrix>) -> ItoBasis {
    let d: usize = blocks.iter().map(|&b| su2::block_dim(b)).sum();
    let offs = block_offsets(blocks);
    let mut by_rank: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (a, &ja) in blocks.iter().enumerate() {
        for (b, &jb) in blocks.iter().enumerate() {
            let mut k = (ja as i64 - jb as i64).unsigned_abs() as u32;
            while k <= ja + jb {
                by_rank.entry(k).or_default().push((a, b));
                k += 2;
            }
        }
    }
    let conj = |x: ComplexMatrix| match basis {
        Some(v) => v.matmul(&x).matmul(&v.adjoint()),
        None => x,
    };
    let tensor = |k: u32, qi: usize, a: usize, b: usize| {
        let (ja, jb) = (blocks[a] as i64, blocks[b] as i64);
        let q = k as i64 - 2 * qi as i64;
        let mut t = ComplexMatrix::zeros(d, d);
        for ka in 0..=ja {
            let m = ja - 2 * ka;
            for kb in 0..=jb {
                let mp = jb - 2 * kb;
                let c = su2::clebsch_gordan(ja, m, jb, -mp, k as i64, q);
                if c == 0.0 {
                    continue;
                }
                let sign = if ((jb - mp) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                t[(offs[a] + ka as usize, offs[b] + kb as usize)] = C64::new(sign * c, 0.0);
            }
        }
        t
    };
    let mut irreps = Vec::new();
    let mut elements = Vec::new();
    for (&k, pairs) in &by_rank {
        if k == 0 {
            let span: Vec<ComplexMatrix> = pairs.iter().map(|&(a, b)| tensor(0, 0, a, b)).collect();
            let triv = hermitian_trivial_basis(d, &span);
            irreps.push(IrrepInfo { lambda: 0, dim: 1, multiplicity: triv.len(), conjugate: 0, character: None });
            for (alpha, x) in triv.into_iter().enumerate() {
                elements.push(BasisElement { label: ModeLabel { lambda: 0, alpha, j: 0 }, operator: conj(x) });
            }
            continue;
        }
        let lam = k as i64;
        irreps.push(IrrepInfo { lambda: lam, dim: k as usize + 1, multiplicity: pairs.len(), conjugate: lam, character: None });
        for (alpha, &(a, b)) in pairs.iter().enumerate() {
            for qi in 0..=k as usize {
                elements.push(BasisElement { label: ModeLabel { lambda: lam, alpha, j: qi }, operator: conj(tensor(k, qi, a, b)) });
            }
        }
    }
    ItoBasis { dim: d, group: GroupKind::Su2, irreps, elements }
}

/// Conjugation superoperator U ⊗ conj(U) acting on row-major vectorizations.
fn adjoint_action(u: &ComplexMatrix) -> ComplexMatrix {
    crate::hermitian::kron(u, &u.conj())
}

fn build_finite(group: &[ComplexMatrix]) -> Result<ItoBasis> {
    let d = group[0].rows();
    let n = d * d;
    let order = group.len() as f64;
    let ads: Vec<ComplexMatrix> = group.iter().map(adjoint_action).collect();
    let k = random_hermitian(n, &mut seeded(0x1705_ba5e));
    let mut kt = ComplexMatrix::zeros(n, n);
    for a in &ads {
        kt += &a.matmul(&k).matmul(&a.adjoint());
    }
    let kt = kt.scale_real(1.0 / order);
    let eig = eig_hermitian(&kt)?;
    let scale = eig.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut min_gap = f64::INFINITY;
    for (idx, &v) in eig.values.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if v - eig.values[*c.last().expect("nonempty")] <= CLUSTER_TOL * scale => c.push(idx),
            _ => {
                if idx > 0 {
                    min_gap = min_gap.min(v - eig.values[idx - 1]);
                }
                clusters.push(vec![idx]);
            }
        }
    }

    struct Copy {
        vecs: Vec<Vec<C64>>,
        chi: Vec<C64>,
    }
    let mut copies = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let vecs: Vec<Vec<C64>> = c.iter().map(|&i| eig.vector(i)).collect();
        let chi: Vec<C64> = ads.iter().map(|a| vecs.iter().map(|v| dot(v, &a.mul_vec(v))).sum()).collect();
        let norm: f64 = chi.iter().map(|z| z.norm_sqr()).sum::<f64>() / order;
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::BlockDiagonalization { gap: min_gap });
        }
        copies.push(Copy { vecs, chi });
    }

    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, c) in copies.iter().enumerate() {
        match classes.iter_mut().find(|cl| same_character(&copies[cl[0]].chi, &c.chi)) {
            Some(cl) => cl.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes.sort_by(|a, b| {
        let (ca, cb) = (&copies[a[0]], &copies[b[0]]);
        ca.vecs.len().cmp(&cb.vecs.len()).then_with(|| character_order(&ca.chi, &cb.chi))
    });

    let mut irreps = Vec::new();
    let mut elements = Vec::new();
    for (lam, class) in classes.iter().enumerate() {
        let lam = lam as i64;
        let reference = &copies[class[0]];
        let dim = reference.vecs.len();
        let chi = reference.chi.clone();
        if lam == 0 {
            let span: Vec<ComplexMatrix> = class.iter().map(|&c| to_matrix(d, &copies[c].vecs[0])).collect();
            let triv = hermitian_trivial_basis(d, &span);
            for (alpha, x) in triv.into_iter().enumerate() {
                elements.push(BasisElement { label: ModeLabel { lambda: 0, alpha, j: 0 }, operator: x });
            }
        } else {
            for (alpha, &c) in class.iter().enumerate() {
                let vecs = if alpha == 0 { reference.vecs.clone() } else { align(&ads, &reference.vecs, &copies[c].vecs)? };
                for (j, v) in vecs.iter().enumerate() {
                    elements.push(BasisElement { label: ModeLabel { lambda: lam, alpha, j }, operator: to_matrix(d, v) });
                }
            }
        }
        irreps.push(IrrepInfo { lambda: lam, dim, multiplicity: class.len(), conjugate: 0, character: Some(chi) });
    }
    let conj: Vec<i64> = irreps
        .iter()
        .map(|r| {
            let cc: Vec<C64> = r.character.as_ref().expect("finite").iter().map(|z| z.conj()).collect();
            irreps.iter().find(|s| same_character(s.character.as_ref().expect("finite"), &cc)).map_or(r.lambda, |s| s.lambda)
        })
        .collect();
    for (r, c) in irreps.iter_mut().zip(conj) {
        r.conjugate = c;
    }
    elements.sort_by_key(|e| e.label);
    Ok(ItoBasis { dim: d, group: GroupKind::Finite, irreps, elements })
}

fn character_order(a: &[C64], b: &[C64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let kx = (-(x.re * 1e9).round(), -(x.im * 1e9).round());
        let ky = (-(y.re * 1e9).round(), -(y.im * 1e9).round());
        match kx.partial_cmp(&ky) {
            Some(core::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    core::cmp::Ordering::Equal
}

fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn to_matrix(d: usize, v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::new(d, d, v.to_vec()).expect("d² entries")
}

/// Maps the reference copy onto `target` with a group-averaged intertwiner.
fn align(ads: &[ComplexMatrix], reference: &[Vec<C64>], target: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    let x = &reference[0];
    for y in target {
        let mut images: Vec<Vec<C64>> = vec![vec![ZERO; x.len()]; reference.len()];
        for a in ads {
            // T = Σ_g Ad_g |y⟩⟨x| Ad_g†, applied to each reference vector.
            let ay = a.mul_vec(y);
            let ad = a.adjoint();
            for (img, r) in images.iter_mut().zip(reference) {
                let coeff = dot(x, &ad.mul_vec(r));
                for (o, &z) in img.iter_mut().zip(&ay) {
                    *o += z * coeff;
                }
            }
        }
        let norm = images[0].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return Ok(images.into_iter().map(|v| v.into_iter().map(|z| z / norm).collect()).collect());
        }
    }
    Err(Error::BlockDiagonalization { gap: 0.0 })
}

/// Coefficients and mode operators of an operator in an ITO basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeDecomposition {
    pub coefficients: Vec<(ModeLabel, C64)>,
    pub modes: Vec<Mode>,
}

/// ρ^λ_j = Σ_α c^{(λ,α)}_j X^{(λ,α)}_j.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mode {
    pub lambda: i64,
    pub j: usize,
    pub operator: ComplexMatrix,
}

impl ModeDecomposition {
    pub fn mode(&self, lambda: i64, j: usize) -> Option<&ComplexMatrix> {
        self.modes.iter().find(|m| m.lambda == lambda && m.j == j).map(|m| &m.operator)
    }

    pub fn coefficient(&self, label: ModeLabel) -> Option<C64> {
        self.coefficients.iter().find(|(l, _)| *l == label).map(|(_, c)| *c)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.modes[0].operator.rows();
        let mut out = ComplexMatrix::zeros(d, d);
        for m in &self.modes {
            out += &m.operator;
        }
        out
    }
}

pub fn decompose_modes(rho: &ComplexMatrix, basis: &ItoBasis) -> Result<ModeDecomposition> {
    if rho.rows() != basis.dim || !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: basis.dim, found: rho.rows() });
    }
    let d = basis.dim;
    let mut coefficients = Vec::with_capacity(basis.elements.len());
    let mut modes: Vec<Mode> = Vec::new();
    for e in &basis.elements {
        let c = e.operator.inner(rho);
        coefficients.push((e.label, c));
        let idx = match modes.iter().position(|m| m.lambda == e.label.lambda && m.j == e.label.j) {
            Some(i) => i,
            None => {
                modes.push(Mode { lambda: e.label.lambda, j: e.label.j, operator: ComplexMatrix::zeros(d, d) });
                modes.len() - 1
            }
        };
        modes[idx].operator.axpy(c, &e.operator);
    }
    Ok(ModeDecomposition { coefficients, modes })
}

/// Irrep labels carrying a coefficient of magnitude above `tol`.
pub fn mode_support(rho: &ComplexMatrix, basis: &ItoBasis, tol: f64) -> Result<BTreeSet<i64>> {
    let dec = decompose_modes(rho, basis)?;
    Ok(dec.coefficients.iter().filter(|(_, c)| c.norm() > tol).map(|(l, _)| l.lambda).collect())
}

/// g^λ_j(σ) = Σ_α |⟨X^{(λ,α)}_j, σ⟩|.
pub fn g_coefficient(sigma: &ComplexMatrix, basis: &ItoBasis, lambda: i64, j: usize) -> Result<f64> {
    let info = basis.irrep(lambda).ok_or(Error::UnknownLabel(lambda))?;
    if j >= info.dim {
        return Err(Error::UnknownLabel(lambda));
    }
    Ok(basis.component(lambda, j).map(|e| e.operator.inner(sigma).norm()).sum())
}

/// Right-hand side of the joint-twirl modal identity with the same
/// representation on both factors: G(η⊗ρ) = Σ_{λ,α,β,i} a^{λα}_i b^{λβ}_i / d_λ
/// Σ_{i'} X^{λα}_{i'} ⊗ X^{λβ†}_{i'}, with a = ⟨X, η⟩ and b = tr(Xρ).
pub fn twirl_modal_reconstruction(eta: &ComplexMatrix, rho: &ComplexMatrix, basis: &ItoBasis) -> ComplexMatrix {
    let d = basis.dim;
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for info in &basis.irreps {
        let lam = info.lambda;
        for alpha in 0..info.multiplicity {
            for beta in 0..info.multiplicity {
                let mut w = ZERO;
                for i in 0..info.dim {
                    let xa = basis.element(ModeLabel { lambda: lam, alpha, j: i }).expect("complete basis");
                    let xb = basis.element(ModeLabel { lambda: lam, alpha: beta, j: i }).expect("complete basis");
                    w += xa.inner(eta) * xb.trace_product(rho);
                }
                if w.norm() == 0.0 {
                    continue;
                }
                let w = w / info.dim as f64;
                for i in 0..info.dim {
                    let xa = basis.element(ModeLabel { lambda: lam, alpha, j: i }).expect("complete basis");
                    let xb = basis.element(ModeLabel { lambda: lam, alpha: beta, j: i }).expect("complete basis");
                    out.axpy(w, &crate::hermitian::kron(xa, &xb.adjoint()));
                }
            }
        }
    }
    out
}
