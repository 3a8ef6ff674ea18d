//! Sufficient conditions for reaching a depolarized target: f and g mode
//! coefficients, the D₂ divergence, output truncation, PGM channels and the
//! minimal-depolarization search.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::Serialize;

use crate::channel::{CovariantChannel, Provenance};
use crate::error::{Error, Result};
use crate::hermitian::{
    eig_hermitian, eigvals_hermitian, kron, partial_trace, power_on_support, support_projector, ComplexMatrix, DensityMatrix, Keep, C64,
};
use crate::modes::{decompose_modes, g_coefficient, ItoBasis, ModeDecomposition};
use crate::symmetry::{joint_twirl, RepKind, Representation};

/// Relative eigenvalue threshold defining supports.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Largest admissible component of a mode outside the support of G(ρ).
pub const LEAK_TOL: f64 = 1e-9;
/// Number of q values tried on (q*, 1].
pub const Q_GRID: usize = 64;
pub const MINIMAL_P_ITERATIONS: usize = 60;
pub const MINIMAL_P_UPPER: f64 = 1.0 - 1e-9;

/// f^λ_j(ρ) for every mode of ρ, computed as ‖G(ρ)^{-1/4} ρ^λ_j G(ρ)^{-1/4}‖₂².
#[derive(Clone, Debug)]
pub struct FProfile {
    values: BTreeMap<(i64, usize), f64>,
}

impl FProfile {
    pub fn new(rho: &ComplexMatrix, rep: &Representation, basis: &ItoBasis) -> Result<Self> {
        let g = rep.twirl().apply(rho);
        let quarter = power_on_support(&g, -0.25, SUPPORT_TOL)?;
        let proj = support_projector(&g, SUPPORT_TOL)?;
        if proj.trace().re < 0.5 {
            return Err(Error::EmptySupport);
        }
        let dec = decompose_modes(rho, basis)?;
        let outside = &ComplexMatrix::identity(rho.rows()) - &proj;
        let mut values = BTreeMap::new();
        for m in &dec.modes {
            let leak = outside.matmul(&m.operator).max_abs().max(m.operator.matmul(&outside).max_abs());
            if leak > LEAK_TOL {
                return Err(Error::SupportLeak { leak });
            }
            let s = quarter.matmul(&m.operator).matmul(&quarter);
            values.insert((m.lambda, m.j), s.frobenius_norm().powi(2));
        }
        Ok(Self { values })
    }

    pub fn get(&self, lambda: i64, j: usize) -> Option<f64> {
        self.values.get(&(lambda, j)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, usize, f64)> + '_ {
        self.values.iter().map(|(&(l, j), &f)| (l, j, f))
    }
}

/// f^λ_j(ρ) = tr[ρ^λ_j G(ρ)^{-1/2} (ρ^λ_j)† G(ρ)^{-1/2}].
pub fn f_coefficient(rho: &ComplexMatrix, rep: &Representation, basis: &ItoBasis, lambda: i64, j: usize) -> Result<f64> {
    FProfile::new(rho, rep, basis)?.get(lambda, j).ok_or(Error::UnknownLabel(lambda))
}

/// D₂(X‖σ) = log₂ ‖σ^{-1/4} X σ^{-1/4}‖₂², or +∞ when X leaves the support of σ.
pub fn d2_divergence(x: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    x.require_same_shape(sigma)?;
    let proj = support_projector(sigma, SUPPORT_TOL)?;
    let outside = &ComplexMatrix::identity(sigma.rows()) - &proj;
    let scale = x.max_abs().max(1.0);
    if outside.matmul(x).max_abs() > LEAK_TOL * scale || x.matmul(&outside).max_abs() > LEAK_TOL * scale {
        return Ok(f64::INFINITY);
    }
    let q = power_on_support(sigma, -0.25, SUPPORT_TOL)?;
    Ok(q.matmul(x).matmul(&q).frobenius_norm().powi(2).log2())
}

/// Output system restricted to the support of G(σ).
#[derive(Clone, Debug)]
pub struct Truncation {
    pub representation: Representation,
    /// Columns span the support, with U_B(g)·W = W·U_S(g).
    pub isometry: ComplexMatrix,
    pub state: DensityMatrix,
}

impl Truncation {
    pub fn is_identity(&self) -> bool {
        self.isometry.rows() == self.isometry.cols()
    }
}

fn columns_to_matrix(rows: usize, cols: &[Vec<C64>]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols.len(), |i, k| cols[k][i])
}

/// Eigenvectors of a Hermitian matrix with eigenvalue above `SUPPORT_TOL·scale`.
fn support_vectors(m: &ComplexMatrix, scale: f64) -> Result<Vec<Vec<C64>>> {
    let eig = eig_hermitian(m)?;
    Ok((0..eig.values.len()).filter(|&k| eig.values[k] > SUPPORT_TOL * scale).map(|k| eig.vector(k)).collect())
}

/// Restricts σ and the representation to supp G(σ), one charge sector at a time.
pub fn truncate_output(sigma: &DensityMatrix, rep: &Representation) -> Result<Truncation> {
    let d = sigma.dim();
    if rep.dim() != d {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: d });
    }
    let g = rep.twirl().apply(sigma);
    let scale = eigvals_hermitian(&g).last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let (representation, isometry) = match rep.kind() {
        RepKind::U1 { weights } => {
            let mut sectors: Vec<i64> = Vec::new();
            for &w in weights {
                if !sectors.contains(&w) {
                    sectors.push(w);
                }
            }
            let mut cols = Vec::new();
            let mut new_weights = Vec::new();
            for w in sectors {
                let idx: Vec<usize> = (0..d).filter(|&a| weights[a] == w).collect();
                let block = ComplexMatrix::from_fn(idx.len(), idx.len(), |a, b| g[(idx[a], idx[b])]);
                for v in support_vectors(&block, scale)? {
                    let mut col = alloc::vec![C64::new(0.0, 0.0); d];
                    for (a, &i) in idx.iter().enumerate() {
                        col[i] = v[a];
                    }
                    cols.push(col);
                    new_weights.push(w);
                }
            }
            if cols.is_empty() {
                return Err(Error::EmptySupport);
            }
            (Representation::u1(new_weights)?, columns_to_matrix(d, &cols))
        }
        RepKind::Su2 { blocks, basis } => {
            let local = match basis {
                Some(v) => v.adjoint().matmul(&g).matmul(v),
                None => g.clone(),
            };
            let offsets = crate::symmetry::block_offsets(blocks);
            let mut spins: Vec<u32> = Vec::new();
            for &b in blocks {
                if !spins.contains(&b) {
                    spins.push(b);
                }
            }
            let mut cols = Vec::new();
            let mut new_blocks = Vec::new();
            for two_j in spins {
                let dim = two_j as usize + 1;
                let copies: Vec<usize> = (0..blocks.len()).filter(|&k| blocks[k] == two_j).map(|k| offsets[k]).collect();
                let reduced = ComplexMatrix::from_fn(copies.len(), copies.len(), |a, b| {
                    (0..dim).map(|k| local[(copies[a] + k, copies[b] + k)]).sum()
                });
                for psi in support_vectors(&reduced, scale)? {
                    new_blocks.push(two_j);
                    for k in 0..dim {
                        let mut col = alloc::vec![C64::new(0.0, 0.0); d];
                        for (a, &off) in copies.iter().enumerate() {
                            col[off + k] = psi[a];
                        }
                        cols.push(col);
                    }
                }
            }
            if cols.is_empty() {
                return Err(Error::EmptySupport);
            }
            let w = columns_to_matrix(d, &cols);
            let w = match basis {
                Some(v) => v.matmul(&w),
                None => w,
            };
            (Representation::su2(new_blocks)?, w)
        }
        RepKind::Finite { elements } => {
            let cols = support_vectors(&g, scale)?;
            if cols.is_empty() {
                return Err(Error::EmptySupport);
            }
            let w = columns_to_matrix(d, &cols);
            let wd = w.adjoint();
            (Representation::finite(elements.iter().map(|u| wd.matmul(u).matmul(&w)).collect())?, w)
        }
    };
    let restricted = isometry.adjoint().matmul(sigma).matmul(&isometry);
    let state = DensityMatrix::new(restricted.hermitian_part())?;
    Ok(Truncation { representation, isometry, state })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shortcut {
    /// p = 1: the target is I/d.
    MaximallyMixedTarget,
    /// ρ = σ_p.
    InputIsTarget,
}

/// One (λ, j) row of a depolarization test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeRecord {
    pub lambda: i64,
    pub j: usize,
    pub f: f64,
    pub g: f64,
    /// λ_min·f/n.
    pub lhs: f64,
    /// g.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepolReport {
    pub modes: Vec<ModeRecord>,
    pub lambda_min: f64,
    pub n: usize,
    pub verdict: bool,
    pub p: f64,
    pub q: Option<f64>,
    pub q_star: Option<f64>,
    pub shortcut: Option<Shortcut>,
    /// Set when reading λ_min as the smallest non-zero eigenvalue of G(σ),
    /// shifted by p/(d(1−p)), would change the verdict.
    pub literal_lambda_differs: bool,
    /// Set when every mode condition holds but the verdict is withheld because
    /// the output carries an irrep of dimension above one.
    pub irrep_guard: bool,
}

impl DepolReport {
    fn shortcut(p: f64, q: Option<f64>, kind: Shortcut) -> Self {
        Self {
            modes: Vec::new(),
            lambda_min: 0.0,
            n: 0,
            verdict: true,
            p,
            q,
            q_star: None,
            shortcut: Some(kind),
            literal_lambda_differs: false,
            irrep_guard: false,
        }
    }
}

const HOLD_TOL: f64 = 1e-12;

/// Per-mode comparison of λ_min·f(ρ)/n against g(target) over the non-trivial
/// modes of the output basis.
fn mode_rows(f: &FProfile, basis_in: &ItoBasis, target: &ComplexMatrix, basis_out: &ItoBasis, lambda_min: f64) -> Result<Vec<ModeRecord>> {
    let n = basis_out.n_value().max(1) as f64;
    let mut rows = Vec::new();
    for info in basis_out.nontrivial_irreps() {
        let matched = basis_out.matching_label(info.lambda, basis_in);
        for j in 0..info.dim {
            let fv = matched.and_then(|l| f.get(l, j)).unwrap_or(0.0);
            let gv = g_coefficient(target, basis_out, info.lambda, j)?;
            let lhs = lambda_min * fv / n;
            rows.push(ModeRecord { lambda: info.lambda, j, f: fv, g: gv, lhs, rhs: gv, holds: lhs - gv >= -HOLD_TOL });
        }
    }
    Ok(rows)
}

/// Whether a non-trivial irrep of dimension above one occurs.
fn has_wide_irrep(basis: &ItoBasis) -> bool {
    basis.nontrivial_irreps().any(|i| i.dim > 1)
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    eigvals_hermitian(&m.hermitian_part()).first().copied().unwrap_or(0.0)
}

/// Smallest eigenvalue of G(σ) above the support threshold.
fn min_nonzero_eigenvalue(m: &ComplexMatrix) -> f64 {
    let ev = eigvals_hermitian(&m.hermitian_part());
    let top = ev.last().copied().unwrap_or(0.0);
    ev.into_iter().find(|&x| x > SUPPORT_TOL * top).unwrap_or(0.0)
}

fn check_states(rho: &DensityMatrix, sigma: &DensityMatrix, rep_a: &Representation, rep_b: &Representation) -> Result<()> {
    if rho.dim() != rep_a.dim() {
        return Err(Error::DimensionMismatch { expected: rep_a.dim(), found: rho.dim() });
    }
    if sigma.dim() != rep_b.dim() {
        return Err(Error::DimensionMismatch { expected: rep_b.dim(), found: sigma.dim() });
    }
    if rep_a.group() != rep_b.group() {
        return Err(Error::MismatchedGroups);
    }
    Ok(())
}

/// Sufficient condition for ρ → σ_p = (1−p)σ + p·I/d:
/// n⁻¹ λ_min f^λ_j(ρ) ≥ g^λ_j(σ_p) for all λ ≠ 0, j, with λ_min the smallest
/// eigenvalue of G(σ_p) on the support of G(σ_p).
pub fn thm6_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p: f64,
    rep_a: &Representation,
    rep_b: &Representation,
) -> Result<DepolReport> {
    check_states(rho, sigma, rep_a, rep_b)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(alloc::format!("p = {p} outside [0, 1]")));
    }
    if p >= 1.0 {
        return Ok(DepolReport::shortcut(p, None, Shortcut::MaximallyMixedTarget));
    }
    let basis_a = ItoBasis::build(rep_a)?;
    let f = FProfile::new(rho, rep_a, &basis_a)?;
    thm6_with_profile(&f, &basis_a, sigma, p, rep_b)
}

fn thm6_with_profile(f: &FProfile, basis_a: &ItoBasis, sigma: &DensityMatrix, p: f64, rep_b: &Representation) -> Result<DepolReport> {
    if p >= 1.0 {
        return Ok(DepolReport::shortcut(p, None, Shortcut::MaximallyMixedTarget));
    }
    let sigma_p = sigma.depolarize(p);
    let trunc = truncate_output(&sigma_p, rep_b)?;
    let basis_s = ItoBasis::build(&trunc.representation)?;
    let g_s = trunc.representation.twirl().apply(&trunc.state);
    let lambda_min = min_eigenvalue(&g_s);
    let modes = mode_rows(f, basis_a, &trunc.state, &basis_s, lambda_min)?;
    let holds = modes.iter().all(|m| m.holds);
    let guarded = has_wide_irrep(&basis_s);
    let verdict = holds && !guarded;

    let mut literal_lambda_differs = false;
    if p > 0.0 {
        let d = sigma.dim() as f64;
        let lit = (1.0 - p) * min_nonzero_eigenvalue(&rep_b.twirl().apply(sigma)) + p / d;
        if (lit - lambda_min).abs() > 1e-12 {
            let alt = mode_rows(f, basis_a, &trunc.state, &basis_s, lit)?;
            literal_lambda_differs = !guarded && alt.iter().all(|m| m.holds) != verdict;
        }
    }
    Ok(DepolReport {
        n: basis_s.n_value(),
        modes,
        lambda_min,
        verdict,
        p,
        q: None,
        q_star: None,
        shortcut: None,
        literal_lambda_differs,
        irrep_guard: holds && guarded,
    })
}

/// Upper bound on the least depolarization making σ reachable: the smallest p
/// passing thm6_check, by bisection on [0, 1 − 10⁻⁹].
pub fn minimal_p(rho: &DensityMatrix, sigma: &DensityMatrix, rep_a: &Representation, rep_b: &Representation) -> Result<f64> {
    check_states(rho, sigma, rep_a, rep_b)?;
    let basis_a = ItoBasis::build(rep_a)?;
    let f = FProfile::new(rho, rep_a, &basis_a)?;
    let passes = |p: f64| -> Result<bool> { Ok(thm6_with_profile(&f, &basis_a, sigma, p, rep_b)?.verdict) };
    if passes(0.0)? {
        return Ok(0.0);
    }
    if !passes(MINIMAL_P_UPPER)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, MINIMAL_P_UPPER);
    for _ in 0..MINIMAL_P_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn require_same_system(rho: &DensityMatrix, sigma: &DensityMatrix, rep: &Representation) -> Result<()> {
    check_states(rho, sigma, rep, rep)
}

/// q* = min{q ≥ 0 : G(σ_p − (1−q)ρ) ⪰ 0}, by bisection to 10⁻⁹.
pub fn q_star(rho: &DensityMatrix, sigma_p: &DensityMatrix, rep: &Representation) -> Result<f64> {
    require_same_system(rho, sigma_p, rep)?;
    let tw = rep.twirl();
    let gs = tw.apply(sigma_p);
    let gr = tw.apply(rho);
    let at = |q: f64| {
        let mut m = gs.clone();
        m.axpy(C64::new(q - 1.0, 0.0), &gr);
        min_eigenvalue(&m)
    };
    if at(0.0) >= -1e-12 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if at(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn same_state(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    (a - b).max_abs() <= 1e-12
}

/// Identical input and output systems: ρ → σ_p if ρ = σ_p or
/// n⁻¹ λ_min(G[σ_p(q)]) f^λ_j(ρ) ≥ g^λ_j(σ_p(q)) with σ_p(q) = σ_p − (1−q)ρ.
pub fn thm7_check(rho: &DensityMatrix, sigma: &DensityMatrix, p: f64, q: f64, rep: &Representation) -> Result<DepolReport> {
    require_same_system(rho, sigma, rep)?;
    let basis = ItoBasis::build(rep)?;
    let f = FProfile::new(rho, rep, &basis)?;
    let sigma_p = sigma.depolarize(p);
    if same_state(rho, &sigma_p) {
        return Ok(DepolReport::shortcut(p, Some(q), Shortcut::InputIsTarget));
    }
    let qs = q_star(rho, &sigma_p, rep)?;
    if !(q > qs && q <= 1.0) {
        return Err(Error::QBelowThreshold { q, q_star: qs });
    }
    thm7_at(&f, &basis, rho, &sigma_p, p, q, qs, rep)
}

#[allow(clippy::too_many_arguments)]
fn thm7_at(
    f: &FProfile,
    basis: &ItoBasis,
    rho: &DensityMatrix,
    sigma_p: &DensityMatrix,
    p: f64,
    q: f64,
    qs: f64,
    rep: &Representation,
) -> Result<DepolReport> {
    let mut target = sigma_p.matrix().clone();
    target.axpy(C64::new(q - 1.0, 0.0), rho);
    let lambda_min = min_eigenvalue(&rep.twirl().apply(&target)).max(0.0);
    let modes = mode_rows(f, basis, &target, basis, lambda_min)?;
    let holds = modes.iter().all(|m| m.holds);
    let guarded = has_wide_irrep(basis);
    Ok(DepolReport {
        verdict: holds && !guarded,
        irrep_guard: holds && guarded,
        n: basis.n_value(),
        modes,
        lambda_min,
        p,
        q: Some(q),
        q_star: Some(qs),
        shortcut: None,
        literal_lambda_differs: false,
    })
}

/// thm7_check over the grid q_k = q* + (1 − q*)k/64, k = 1..64; returns
/// the first passing report, or the q = 1 report when none passes.
/// With q* = 1 the interval is empty and the verdict is false.
pub fn thm7_scan(rho: &DensityMatrix, sigma: &DensityMatrix, p: f64, rep: &Representation) -> Result<DepolReport> {
    require_same_system(rho, sigma, rep)?;
    let sigma_p = sigma.depolarize(p);
    if same_state(rho, &sigma_p) {
        return Ok(DepolReport::shortcut(p, None, Shortcut::InputIsTarget));
    }
    let basis = ItoBasis::build(rep)?;
    let f = FProfile::new(rho, rep, &basis)?;
    let qs = q_star(rho, &sigma_p, rep)?;
    if !(qs < 1.0) {
        let mut report = thm7_at(&f, &basis, rho, &sigma_p, p, 1.0, qs, rep)?;
        report.verdict = false;
        report.irrep_guard = false;
        return Ok(report);
    }
    let mut last = None;
    for k in 1..=Q_GRID {
        let q = qs + (1.0 - qs) * k as f64 / Q_GRID as f64;
        let report = thm7_at(&f, &basis, rho, &sigma_p, p, q, qs, rep)?;
        if report.verdict {
            return Ok(report);
        }
        last = Some(report);
    }
    Ok(last.expect("grid is non-empty"))
}

/// n⁻¹‖G(ρ)^{-1/4} ρ^λ_j G(ρ)^{-1/4}‖₂² ≥ ‖σ^λ_j‖₁ / λ_min for all λ ≠ 0, j.
pub fn trace_norm_corollary(rho: &DensityMatrix, sigma: &DensityMatrix, rep_a: &Representation, rep_b: &Representation) -> Result<bool> {
    check_states(rho, sigma, rep_a, rep_b)?;
    let basis_a = ItoBasis::build(rep_a)?;
    let f = FProfile::new(rho, rep_a, &basis_a)?;
    let trunc = truncate_output(sigma, rep_b)?;
    let basis_s = ItoBasis::build(&trunc.representation)?;
    if has_wide_irrep(&basis_s) {
        return Ok(false);
    }
    let lambda_min = min_eigenvalue(&trunc.representation.twirl().apply(&trunc.state));
    let n = basis_s.n_value().max(1) as f64;
    let dec: ModeDecomposition = decompose_modes(&trunc.state, &basis_s)?;
    for m in dec.modes.iter().filter(|m| m.lambda != 0) {
        let fv = basis_s.matching_label(m.lambda, &basis_a).and_then(|l| f.get(l, m.j)).unwrap_or(0.0);
        if fv / n < m.operator.trace_norm() / lambda_min - HOLD_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pretty-good-measurement-and-prepare channel
/// E(X) = ∫dg U_g τ U_g† tr[U_g ρ̄ U_g† X] + tr[(I − Π)X]·G(τ),
/// with ρ̄ = G(ρ)^{-1/2} ρ G(ρ)^{-1/2} and Π the support projector of G(ρ).
pub fn pgm_channel(rho: &DensityMatrix, tau: &DensityMatrix, rep_a: &Representation, rep_b: &Representation) -> Result<CovariantChannel> {
    check_states(rho, tau, rep_a, rep_b)?;
    let (da, db) = (rho.dim(), tau.dim());
    let g = rep_a.twirl().apply(rho);
    let proj = support_projector(&g, SUPPORT_TOL)?;
    if proj.trace().re < 0.5 {
        return Err(Error::EmptySupport);
    }
    let half = power_on_support(&g, -0.5, SUPPORT_TOL)?;
    let rho_bar = half.matmul(rho).matmul(&half);
    let joint = joint_twirl(rep_b, rep_a)?.apply(&kron(tau, &rho_bar));
    let outside = &ComplexMatrix::identity(da) - &proj;
    let fill = rep_b.twirl().apply(tau);
    let id_b = ComplexMatrix::identity(db);
    CovariantChannel::from_fn(da, db, Provenance::Pgm { rho: rho.clone(), tau: tau.clone() }, |x| {
        let mut out = partial_trace(&joint.matmul(&kron(&id_b, x)), (db, da), Keep::R).expect("square joint operator");
        out.axpy(outside.trace_product(x), &fill);
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{pauli_x, DensityMatrix};
    use crate::random::{random_mixed_state, seeded};
    use approx::assert_abs_diff_eq;

    fn u1q() -> Representation {
        Representation::u1(alloc::vec![1, -1]).unwrap()
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::qubit(1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn f_examples() {
        let rep = u1q();
        let b = ItoBasis::build(&rep).unwrap();
        assert_abs_diff_eq!(f_coefficient(&plus(), &rep, &b, 2, 0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f_coefficient(&plus(), &rep, &b, 0, 0).unwrap(), 1.0, epsilon = 1e-12);
        let sym = DensityMatrix::qubit(0.0, 0.0, 0.4).unwrap();
        assert_abs_diff_eq!(f_coefficient(&sym, &rep, &b, -2, 0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn wide_irreps_are_guarded() {
        // SU(2) qubit channels only rescale the Bloch vector, so σ ∦ ρ is unreachable
        // even though every mode condition holds.
        let rep = Representation::su2(alloc::vec![1]).unwrap();
        let rho = DensityMatrix::qubit(0.5, 0.0, 0.5).unwrap();
        let sigma = DensityMatrix::qubit(0.0, 0.0, 0.05).unwrap();
        let r = thm6_check(&rho, &sigma, 0.0, &rep, &rep).unwrap();
        assert!(r.irrep_guard && !r.verdict);
        assert!(r.modes.iter().all(|m| m.holds));
        let r = thm7_scan(&rho, &sigma, 0.0, &rep).unwrap();
        assert!(r.irrep_guard && !r.verdict);
        assert!(!trace_norm_corollary(&rho, &sigma, &rep, &rep).unwrap());
        let opts = crate::interconversion::FeasibilityOptions::default();
        let oracle = crate::interconversion::choi_feasibility(&rho, &sigma, &rep, &rep, &opts).unwrap();
        assert_eq!(oracle.verdict, crate::interconversion::Verdict::Infeasible);
        assert_eq!(minimal_p(&rho, &sigma, &rep, &rep).unwrap(), 1.0);
    }

    #[test]
    fn d2_examples() {
        let rep = u1q();
        let b = ItoBasis::build(&rep).unwrap();
        let mode = decompose_modes(&plus(), &b).unwrap().mode(2, 0).unwrap().clone();
        assert_abs_diff_eq!(d2_divergence(&mode, &ComplexMatrix::identity(2).scale_real(0.5)).unwrap(), -1.0, epsilon = 1e-12);
        let s = DensityMatrix::qubit(0.2, 0.1, -0.3).unwrap();
        assert_abs_diff_eq!(d2_divergence(&s, &s).unwrap(), 0.0, epsilon = 1e-12);
        let zero = DensityMatrix::basis(2, 0);
        assert_eq!(d2_divergence(&pauli_x(), &zero).unwrap(), f64::INFINITY);
    }

    #[test]
    fn truncation_examples() {
        let rep = Representation::u1(alloc::vec![1, -1, 0]).unwrap();
        let s = DensityMatrix::basis(3, 0);
        let t = truncate_output(&s, &rep).unwrap();
        assert_eq!(t.isometry.cols(), 1);
        assert_eq!(t.representation, Representation::u1(alloc::vec![1]).unwrap());
        let full = DensityMatrix::maximally_mixed(3);
        assert!(truncate_output(&full, &rep).unwrap().is_identity());
        let su2 = Representation::su2(alloc::vec![1, 1]).unwrap();
        let mut rng = seeded(4);
        let mut m = random_mixed_state(2, &mut rng).into_matrix();
        m = kron(&m, &DensityMatrix::basis(2, 0));
        // Spin-½ ⊗ |0⟩ lives in the first copy only after reordering to block form.
        let perm = ComplexMatrix::from_fn(4, 4, |i, j| if [0, 2, 1, 3][j] == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let s = DensityMatrix::new(perm.adjoint().matmul(&m).matmul(&perm)).unwrap();
        let t = truncate_output(&s, &su2).unwrap();
        assert_eq!(t.isometry.cols(), 2);
        for g in su2.sample_grid() {
            let lhs = su2.unitary(&g).unwrap().matmul(&t.isometry);
            let rhs = t.isometry.matmul(&t.representation.unitary(&g).unwrap());
            assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn thm6_examples() {
        let rep = u1q();
        let mut rng = seeded(8);
        let rho = random_mixed_state(2, &mut rng);
        let sym = DensityMatrix::qubit(0.0, 0.0, -0.6).unwrap();
        for p in [0.0, 0.3, 0.9] {
            assert!(thm6_check(&rho, &sym, p, &rep, &rep).unwrap().verdict);
        }
        assert_eq!(minimal_p(&rho, &sym, &rep, &rep).unwrap(), 0.0);
        let r = thm6_check(&rho, &plus(), 1.0, &rep, &rep).unwrap();
        assert!(r.verdict && r.shortcut == Some(Shortcut::MaximallyMixedTarget));
        let r = thm6_check(&rho, &plus(), 0.0, &rep, &rep).unwrap();
        assert_eq!(r.n, 2);
        assert!(!r.verdict);
    }

    #[test]
    fn minimal_p_matches_closed_form() {
        let rep = u1q();
        let mut rng = seeded(21);
        for _ in 0..20 {
            let rho = random_mixed_state(2, &mut rng);
            let sigma = random_mixed_state(2, &mut rng);
            let b = ItoBasis::build(&rep).unwrap();
            let f = f_coefficient(&rho, &rep, &b, 2, 0).unwrap();
            let g = g_coefficient(&sigma, &b, 2, 0).unwrap();
            let l0 = eigvals_hermitian(&rep.twirl().apply(&sigma))[0];
            // n g ≤ f (λ₀ + p/(2(1−p))) solved for p.
            let x = (2.0 * (2.0 * g / f - l0)).max(0.0);
            let exact = x / (1.0 + x);
            let got = minimal_p(&rho, &sigma, &rep, &rep).unwrap();
            assert_abs_diff_eq!(got, exact, epsilon = 1e-8);
        }
    }

    #[test]
    fn q_star_examples() {
        let rep = Representation::u1(alloc::vec![1, 0, -1]).unwrap();
        let mut rng = seeded(2);
        let sigma = random_mixed_state(3, &mut rng);
        assert_eq!(q_star(&sigma, &sigma, &rep).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(3);
        let m = eigvals_hermitian(&rep.twirl().apply(&sigma))[0];
        assert_abs_diff_eq!(q_star(&mixed, &sigma, &rep).unwrap(), (1.0 - 3.0 * m).max(0.0), epsilon = 1e-9);
        let r = thm7_check(&sigma, &sigma, 0.0, 0.5, &rep).unwrap();
        assert!(r.verdict && r.shortcut == Some(Shortcut::InputIsTarget));
        let rho = random_mixed_state(3, &mut rng);
        let qs = q_star(&rho, &sigma, &rep).unwrap();
        let mut at = sigma.matrix().clone();
        at.axpy(C64::new(qs - 1.0, 0.0), &rho);
        let lo = eigvals_hermitian(&rep.twirl().apply(&at))[0];
        assert!((-1e-9..=1e-6).contains(&lo), "{lo}");
        assert!(matches!(thm7_check(&rho, &sigma, 0.0, qs * 0.5, &rep), Err(Error::QBelowThreshold { .. })));
    }

    #[test]
    fn empty_q_interval_is_not_accepted() {
        let rep = u1q();
        let zero = DensityMatrix::basis(2, 0);
        assert_abs_diff_eq!(q_star(&plus(), &zero, &rep).unwrap(), 1.0, epsilon = 1e-9);
        assert!(matches!(thm7_check(&plus(), &zero, 0.0, 1.0, &rep), Err(Error::QBelowThreshold { .. })));
        assert!(!thm7_scan(&plus(), &zero, 0.0, &rep).unwrap().verdict);
    }

    #[test]
    fn pgm_examples() {
        let rep = u1q();
        let mut rng = seeded(5);
        let rho = random_mixed_state(2, &mut rng);
        let ch = pgm_channel(&rho, &DensityMatrix::maximally_mixed(2), &rep, &rep).unwrap();
        assert!(ch.is_cptp(1e-10));
        assert!(ch.is_covariant(&rep, &rep, 1e-10).unwrap());
        let x = random_mixed_state(2, &mut rng);
        assert!((&ch.apply(&x).unwrap() - &ComplexMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-12);
        // A pure symmetric input has a one-dimensional PGM support.
        let ground = DensityMatrix::basis(2, 1);
        let ch = pgm_channel(&ground, &plus(), &rep, &rep).unwrap();
        assert!(ch.is_cptp(1e-10));
    }
}
