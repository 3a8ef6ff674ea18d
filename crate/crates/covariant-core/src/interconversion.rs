//! Deciding ρ → σ under covariant channels: the Choi oracle, surface screens,
//! the ε-net decision and the local-minimum probe.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::entropy::{delta_h, delta_phi, PhiOptions, Setting};
use crate::error::{Error, Result};
use crate::hermitian::{eig_hermitian, hermitian_basis, kron, partial_trace, ComplexMatrix, DensityMatrix, Keep, C64};
use crate::par::ordered_map;
use crate::random::{random_traceless_direction, seeded};
use crate::sdp::{solve, SdpOptions, SdpProblem, SdpStatus, Sense};
use crate::symmetry::{joint_twirl, Representation, TwirlChannel};

/// ΔH below −VIOLATION_TOL counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-8;
/// Largest admissible ε-net cardinality bound.
pub const NET_BUDGET: usize = 10_000_000;
/// Largest residual accepted on the constraints of a certified Choi matrix.
pub const CERTIFICATE_TOL: f64 = 1e-7;
const POOL_CAP: usize = 4096;
const CHUNK: usize = 256;
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Borderline,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetState {
    pub index: usize,
    pub eta: DensityMatrix,
    pub delta_h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    None,
    /// Choi matrix on A⊗B of a covariant channel with E(ρ) = σ.
    Choi(ComplexMatrix),
    /// Reference state with ΔH_η < 0.
    Reference {
        eta: DensityMatrix,
        delta_h: f64,
    },
    /// The linear system for E(ρ) = σ has no solution.
    Inconsistent {
        residual: f64,
    },
    /// Net states with 0 ≤ ΔH < r(ε).
    Borderline(Vec<NetState>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Margins {
    pub min_delta_h: Option<f64>,
    pub phase_one: Option<f64>,
    pub threshold: Option<f64>,
    pub constraint_residual: Option<f64>,
    pub checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub witness: Witness,
    pub margins: Margins,
    pub diagnostics: Option<String>,
}

impl FeasibilityReport {
    fn new(verdict: Verdict, witness: Witness, margins: Margins) -> Self {
        Self { verdict, witness, margins, diagnostics: None }
    }

    fn borderline(margins: Margins, why: String) -> Self {
        Self { verdict: Verdict::Borderline, witness: Witness::None, margins, diagnostics: Some(why) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityOptions {
    /// Feasible iff the phase-I optimum is at most `tol`.
    pub tol: f64,
    pub sdp: SdpOptions,
    pub phi: PhiOptions,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self { tol: 1e-8, sdp: SdpOptions { tol: 1e-9, max_iter: 200 }, phi: PhiOptions::default() }
    }
}

fn check_problem(rho: &DensityMatrix, sigma: &DensityMatrix, rep_a: &Representation, rep_b: &Representation) -> Result<()> {
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

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormalizes the rows of L x = c, given with norm at most one. Returns the
/// reduced system and the largest right-hand side left over on a dependent row.
fn reduce_rows(rows: Vec<(Vec<f64>, f64)>) -> (Vec<(Vec<f64>, f64)>, f64) {
    let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut residual: f64 = 0.0;
    for (mut a, mut b) in rows {
        for _ in 0..2 {
            for (q, beta) in &basis {
                let c = dot(q, &a);
                a.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                b -= c * beta;
            }
        }
        let n = norm(&a);
        if n < DEPENDENCE_TOL {
            residual = residual.max(b.abs());
        } else {
            a.iter_mut().for_each(|x| *x /= n);
            basis.push((a, b / n));
        }
    }
    (basis, residual)
}

/// Orthonormal Hermitian basis of the operators fixed by the twirl.
fn commutant_basis(twirl: &TwirlChannel) -> Vec<ComplexMatrix> {
    let n = twirl.dim();
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for h in hermitian_basis(n, false) {
        let mut g = twirl.apply(&h).hermitian_part();
        for _ in 0..2 {
            for q in &basis {
                let c = q.inner(&g).re;
                g.axpy(C64::new(-c, 0.0), q);
            }
        }
        let r = g.frobenius_norm();
        if r > 1e-9 {
            basis.push(g.scale_real(1.0 / r));
        }
    }
    basis
}

fn combine(basis: &[ComplexMatrix], coords: &[f64]) -> ComplexMatrix {
    let n = basis[0].rows();
    let mut m = ComplexMatrix::zeros(n, n);
    for (b, &x) in basis.iter().zip(coords) {
        m.axpy(C64::new(x, 0.0), b);
    }
    m
}

/// Largest violation of trace preservation, E(ρ) = σ and covariance by a Choi matrix.
pub fn choi_constraint_residual(
    choi: &ComplexMatrix,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    rep_a: &Representation,
    rep_b: &Representation,
) -> Result<f64> {
    check_problem(rho, sigma, rep_a, rep_b)?;
    let (da, db) = (rep_a.dim(), rep_b.dim());
    let tp = (&partial_trace(choi, (da, db), Keep::R)? - &ComplexMatrix::identity(da)).max_abs();
    let out = partial_trace(&choi.matmul(&kron(&rho.transpose(), &ComplexMatrix::identity(db))), (da, db), Keep::A)?;
    let fit = (&out - sigma.matrix()).max_abs();
    let twirl = joint_twirl(&rep_a.dual(), rep_b)?;
    let cov = (&twirl.apply(choi) - choi).max_abs();
    Ok(tp.max(fit).max(cov))
}

/// Exact decision of ρ → σ by the phase-I Choi SDP
/// min t subject to J + t·1 ⪰ 0 with J covariant, trace preserving and E(ρ) = σ.
pub fn choi_feasibility(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    rep_a: &Representation,
    rep_b: &Representation,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityReport> {
    check_problem(rho, sigma, rep_a, rep_b)?;
    let (da, db) = (rep_a.dim(), rep_b.dim());
    let n = da * db;
    let basis = commutant_basis(&joint_twirl(&rep_a.dual(), rep_b)?);
    let k = basis.len();
    // Each row ⟨R, J⟩ = c is scaled by ‖R‖₂ before projection onto the commutant.
    let row = |r: ComplexMatrix, c: f64| -> (Vec<f64>, f64) {
        let s = r.frobenius_norm();
        (basis.iter().map(|b| r.inner(b).re / s).collect(), c / s)
    };
    let mut rows = Vec::with_capacity(da * da + db * db);
    let id_b = ComplexMatrix::identity(db);
    for e in hermitian_basis(da, false) {
        rows.push(row(kron(&e, &id_b), e.trace().re));
    }
    let rho_t = rho.transpose();
    for f in hermitian_basis(db, false) {
        let c = f.trace_product(sigma).re;
        rows.push(row(kron(&rho_t, &f), c));
    }
    let (rows, residual) = reduce_rows(rows);
    let mut margins = Margins { constraint_residual: Some(residual), ..Margins::default() };
    if residual > opts.tol {
        return Ok(FeasibilityReport::new(Verdict::Infeasible, Witness::Inconsistent { residual }, margins));
    }
    // Minimum-norm particular solution and an orthonormal null space.
    let mut x0 = vec![0.0; k];
    for (q, beta) in &rows {
        x0.iter_mut().zip(q).for_each(|(x, y)| *x += beta * y);
    }
    let mut null: Vec<Vec<f64>> = Vec::new();
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        for _ in 0..2 {
            for q in rows.iter().map(|(q, _)| q).chain(null.iter()) {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let r = norm(&v);
        if r > 1e-8 {
            v.iter_mut().for_each(|x| *x /= r);
            null.push(v);
        }
    }
    let j0 = combine(&basis, &x0);
    let directions: Vec<ComplexMatrix> = null.iter().map(|v| combine(&basis, v)).collect();
    // Dual form: Z = J0 + Σ z_m M_m + t·1 ⪰ 0, maximize −t.
    let id = ComplexMatrix::identity(n);
    let mut constraints: Vec<(ComplexMatrix, f64)> = directions.iter().map(|m| (m.scale_real(-1.0), 0.0)).collect();
    constraints.push((id.scale_real(-1.0), -1.0));
    let problem = SdpProblem::new(j0.clone(), constraints, Sense::Min)?;
    let sol = match solve(&problem, &opts.sdp) {
        Ok(sol) if sol.status == SdpStatus::Optimal => sol,
        Ok(_) => return Ok(FeasibilityReport::borderline(margins, "phase-I SDP reported infeasibility".to_string())),
        Err(e) => return Ok(FeasibilityReport::borderline(margins, e.to_string())),
    };
    let t = sol.y[directions.len()];
    let mut choi = j0;
    for (m, &z) in directions.iter().zip(&sol.y) {
        choi.axpy(C64::new(z, 0.0), m);
    }
    margins.phase_one = Some(t);
    if t <= opts.tol {
        let res = choi_constraint_residual(&choi, rho, sigma, rep_a, rep_b)?;
        margins.constraint_residual = Some(res);
        if res > CERTIFICATE_TOL {
            return Ok(FeasibilityReport::borderline(margins, format!("certificate residual {res:e}")));
        }
        return Ok(FeasibilityReport::new(Verdict::Feasible, Witness::Choi(choi), margins));
    }
    let setting = Setting::new(rep_a.clone(), rep_b.clone())?;
    let eta = match separating_reference(rho, sigma, rep_a, rep_b, &opts.sdp) {
        Ok((eta, _)) => eta,
        Err(e) => return Ok(FeasibilityReport::borderline(margins, format!("witness search failed: {e}"))),
    };
    match delta_h(&eta, rho, sigma, &setting, &opts.phi) {
        Ok(dh) if dh <= -VIOLATION_TOL => {
            margins.min_delta_h = Some(dh);
            Ok(FeasibilityReport::new(Verdict::Infeasible, Witness::Reference { eta, delta_h: dh }, margins))
        }
        Ok(dh) => {
            margins.min_delta_h = Some(dh);
            Ok(FeasibilityReport::borderline(margins, format!("phase-I optimum {t:e} but best witness has ΔH = {dh:e}")))
        }
        Err(e) => Ok(FeasibilityReport::borderline(margins, format!("witness evaluation failed: {e}"))),
    }
}

/// Maximizes tr(η^T σ) − Φ_η(ρ) over reference states η on R = B*.
/// A positive value certifies ΔH_η < 0.
pub fn separating_reference(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    rep_a: &Representation,
    rep_b: &Representation,
    sdp: &SdpOptions,
) -> Result<(DensityMatrix, f64)> {
    check_problem(rho, sigma, rep_a, rep_b)?;
    let rep_r = rep_b.dual();
    let (dr, da) = (rep_r.dim(), rep_a.dim());
    let twirl = joint_twirl(&rep_r, rep_a)?;
    let block = |top: ComplexMatrix, bottom: ComplexMatrix| crate::symmetry::block_diag([top, bottom]);
    let mixed = ComplexMatrix::identity(dr).scale_real(1.0 / dr as f64);
    let objective = block(twirl.apply(&kron(&mixed, rho)).scale_real(-1.0), mixed.clone());
    let id_r = ComplexMatrix::identity(dr);
    let mut constraints = Vec::new();
    for e in hermitian_basis(da, false) {
        constraints.push((block(kron(&id_r, &e).scale_real(-1.0), ComplexMatrix::zeros(dr, dr)), -e.trace().re));
    }
    let traceless: Vec<ComplexMatrix> = hermitian_basis(dr, false)
        .into_iter()
        .map(|mut f| {
            let t = f.trace().re / dr as f64;
            for i in 0..dr {
                f[(i, i)] -= C64::new(t, 0.0);
            }
            f
        })
        .collect();
    let traceless = orthonormal(traceless);
    for f in &traceless {
        let a = block(twirl.apply(&kron(f, rho)), f.scale_real(-1.0));
        constraints.push((a, f.transpose().trace_product(sigma).re));
    }
    let problem = SdpProblem::new(objective, constraints, Sense::Min)?;
    let sol = solve(&problem, sdp)?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::NumericalFailure { iterations: sol.iterations });
    }
    let mut eta = mixed;
    for (f, &z) in traceless.iter().zip(&sol.y[da * da..]) {
        eta.axpy(C64::new(z, 0.0), f);
    }
    let value = sol.dual_value + 1.0 / dr as f64;
    Ok((project_to_state(&eta)?, value))
}

fn orthonormal(items: Vec<ComplexMatrix>) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = Vec::new();
    for mut g in items {
        for q in &out {
            let c = q.inner(&g).re;
            g.axpy(C64::new(-c, 0.0), q);
        }
        let r = g.frobenius_norm();
        if r > 1e-9 {
            out.push(g.scale_real(1.0 / r));
        }
    }
    out
}

/// Clips negative eigenvalues and renormalizes.
fn project_to_state(m: &ComplexMatrix) -> Result<DensityMatrix> {
    let eig = eig_hermitian(&m.hermitian_part())?;
    let clipped = eig.reconstruct(|x| x.max(0.0));
    DensityMatrix::normalized(&clipped)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    /// η = (1 + rA)/d with ‖A‖∞ = 1.
    InfinityShell,
    /// η = 1/d + rA with ‖A‖₂ = 1.
    FrobeniusSphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    DeterministicNet { epsilon: f64 },
    UniformRandom { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub radius: f64,
    pub sampler: Sampler,
}

impl SurfaceSpec {
    /// Largest radius for which every point of the surface is a state.
    pub fn max_radius(kind: SurfaceKind, d: usize) -> f64 {
        match kind {
            SurfaceKind::InfinityShell => 1.0,
            SurfaceKind::FrobeniusSphere => 1.0 / ((d * (d - 1)) as f64).sqrt(),
        }
    }

    /// Reference states on the surface in sample order.
    pub fn states(&self, d: usize) -> Result<Vec<DensityMatrix>> {
        let max = Self::max_radius(self.kind, d);
        if !(self.radius > 0.0 && self.radius <= max) {
            return Err(Error::InvalidParameter(format!("surface radius {} outside (0, {max}]", self.radius)));
        }
        let directions = match self.sampler {
            Sampler::DeterministicNet { epsilon } => net_directions(d, epsilon, 0)?.0,
            Sampler::UniformRandom { count, seed } => {
                let mut rng = seeded(seed);
                (0..count).map(|_| random_traceless_direction(d, &mut rng)).collect()
            }
        };
        if directions.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        directions
            .iter()
            .map(|a| {
                let a = match self.kind {
                    SurfaceKind::InfinityShell => a.scale_real(self.radius / d as f64),
                    SurfaceKind::FrobeniusSphere => a.scale_real(self.radius / a.frobenius_norm()),
                };
                shell_state(&a)
            })
            .collect()
    }
}

/// 1/d + A for traceless Hermitian A.
fn shell_state(a: &ComplexMatrix) -> Result<DensityMatrix> {
    let d = a.rows();
    let mut m = a.clone();
    for i in 0..d {
        m[(i, i)] += C64::new(1.0 / d as f64, 0.0);
    }
    DensityMatrix::new(m.hermitian_part())
}

/// ΔH over `etas` in chunks, stopping after the first chunk that contains a violation.
fn scan(etas: &[DensityMatrix], f: impl Fn(&DensityMatrix) -> Result<f64> + Sync + Send) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(etas.len());
    for chunk in etas.chunks(CHUNK) {
        let start = out.len();
        for v in ordered_map(chunk, &f) {
            out.push(v?);
        }
        if out[start..].iter().any(|&v| v < -VIOLATION_TOL) {
            break;
        }
    }
    Ok(out)
}

fn first_violation(values: &[f64]) -> Option<usize> {
    values.iter().position(|&v| v < -VIOLATION_TOL)
}

fn min_of(values: &[f64]) -> Option<f64> {
    values.iter().copied().reduce(f64::min)
}

/// Necessary-condition screen: ΔH_η over a sampled closed surface around 1/d.
pub fn surface_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    setting: &Setting,
    surface: &SurfaceSpec,
    opts: &PhiOptions,
) -> Result<FeasibilityReport> {
    check_problem(rho, sigma, setting.input(), setting.output())?;
    let etas = surface.states(setting.reference().dim())?;
    let values = scan(&etas, |eta| delta_h(eta, rho, sigma, setting, opts))?;
    let margins = Margins { min_delta_h: min_of(&values), checked: values.len(), ..Margins::default() };
    if let Some(k) = first_violation(&values) {
        let witness = Witness::Reference { eta: etas[k].clone(), delta_h: values[k] };
        return Ok(FeasibilityReport::new(Verdict::Infeasible, witness, margins));
    }
    Ok(FeasibilityReport::new(Verdict::Borderline, Witness::None, margins))
}

/// Net over the shell η = (1 + A)/d, ‖A‖∞ = 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonNet {
    pub dim: usize,
    pub epsilon: f64,
    /// (1 + 1/ε)^{d²−1}.
    pub bound: f64,
    /// Whether the covering radius is guaranteed by construction.
    pub certified: bool,
    pub states: Vec<DensityMatrix>,
}

pub fn net_cardinality_bound(d: usize, epsilon: f64) -> f64 {
    (1.0 + 1.0 / epsilon).powi((d * d - 1) as i32)
}

/// Directions A with ‖A‖∞ = 1 forming a 2ε-net in the ∞-norm.
fn net_directions(d: usize, epsilon: f64, seed: u64) -> Result<(Vec<ComplexMatrix>, bool, f64)> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} outside (0, 1]")));
    }
    if d < 2 {
        return Err(Error::InvalidParameter("the shell needs d ≥ 2".to_string()));
    }
    let bound = net_cardinality_bound(d, epsilon);
    if !(bound <= NET_BUDGET as f64) {
        return Err(Error::NetTooLarge { bound, budget: NET_BUDGET });
    }
    if d == 2 {
        let dirs = sphere_net(2.0 * epsilon).into_iter().map(bloch_direction).collect();
        return Ok((dirs, true, bound));
    }
    let delta = 2.0 * epsilon;
    let pool = POOL_CAP.min(bound as usize).max(1);
    let mut rng = seeded(seed);
    let mut kept: Vec<ComplexMatrix> = Vec::new();
    let far = delta * (d as f64).sqrt();
    for _ in 0..pool {
        let a = random_traceless_direction(d, &mut rng);
        let covered = kept.iter().any(|b| {
            let diff = &a - b;
            diff.frobenius_norm() <= far && diff.op_norm() <= delta
        });
        if !covered {
            kept.push(a);
        }
    }
    Ok((kept, false, bound))
}

/// a·σ for a Bloch vector a.
fn bloch_direction(a: [f64; 3]) -> ComplexMatrix {
    let mut m = crate::hermitian::pauli_x().scale_real(a[0]);
    m.axpy(C64::new(a[1], 0.0), &crate::hermitian::pauli_y());
    m.axpy(C64::new(a[2], 0.0), &crate::hermitian::pauli_z());
    m
}

/// Unit vectors within chordal distance `radius` of every point of the sphere:
/// centres of an n×n grid on each cube face, projected radially.
fn sphere_net(radius: f64) -> Vec<[f64; 3]> {
    let octahedron = (2.0 - 2.0 / 3f64.sqrt()).sqrt();
    let n = if radius >= octahedron { 1 } else { (core::f64::consts::SQRT_2 / radius).ceil() as usize };
    let mut out = Vec::with_capacity(6 * n * n);
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            for i in 0..n {
                for j in 0..n {
                    let u = -1.0 + (2 * i + 1) as f64 / n as f64;
                    let v = -1.0 + (2 * j + 1) as f64 / n as f64;
                    let mut p = [0.0; 3];
                    p[axis] = sign;
                    p[(axis + 1) % 3] = u;
                    p[(axis + 2) % 3] = v;
                    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                    out.push([p[0] / r, p[1] / r, p[2] / r]);
                }
            }
        }
    }
    out
}

/// ε-net of the shell in generalized trace distance. The covering radius is
/// guaranteed for qubits; for d ≥ 3 the net is a greedy 2ε-separated subset
/// of a random pool and `certified` is false.
pub fn generate_epsilon_net(d: usize, epsilon: f64, seed: u64) -> Result<EpsilonNet> {
    let (dirs, certified, bound) = net_directions(d, epsilon, seed)?;
    let states = dirs.iter().map(|a| shell_state(&a.scale_real(1.0 / d as f64))).collect::<Result<Vec<_>>>()?;
    Ok(EpsilonNet { dim: d, epsilon, bound, certified, states })
}

/// r(ε) = 2 d_R² ε / ln 2.
pub fn smoothing_margin(d_r: usize, epsilon: f64) -> f64 {
    2.0 * (d_r * d_r) as f64 * epsilon / core::f64::consts::LN_2
}

/// Three-way decision on the ε-net: a violation is a disproof, a uniform margin
/// of r(ε) on a certified net is a proof, anything else is borderline.
pub fn smoothed_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    setting: &Setting,
    epsilon: f64,
    seed: u64,
    opts: &PhiOptions,
) -> Result<FeasibilityReport> {
    check_problem(rho, sigma, setting.input(), setting.output())?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} must be positive")));
    }
    let d_r = setting.reference().dim();
    let net = generate_epsilon_net(d_r, epsilon, seed)?;
    let r = smoothing_margin(d_r, epsilon);
    let values = scan(&net.states, |eta| delta_h(eta, rho, sigma, setting, opts))?;
    let mut margins = Margins { min_delta_h: min_of(&values), threshold: Some(r), checked: values.len(), ..Margins::default() };
    if let Some(k) = first_violation(&values) {
        let witness = Witness::Reference { eta: net.states[k].clone(), delta_h: values[k] };
        return Ok(FeasibilityReport::new(Verdict::Infeasible, witness, margins));
    }
    let near: Vec<NetState> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < r)
        .map(|(index, &delta_h)| NetState { index, eta: net.states[index].clone(), delta_h })
        .collect();
    if near.is_empty() && net.certified {
        return Ok(FeasibilityReport::new(Verdict::Feasible, Witness::None, margins));
    }
    margins.checked = values.len();
    let mut report = FeasibilityReport::new(Verdict::Borderline, Witness::Borderline(near), margins);
    if !net.certified {
        report.diagnostics = Some(format!("net covering is not certified for d = {d_r}"));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalMinReport {
    pub radius: f64,
    pub count: usize,
    /// Smallest Φ_η(ρ) − Φ_η(σ) over the probes.
    pub min_delta_phi: f64,
    pub argmin: usize,
    /// Probe state attaining a negative minimum.
    pub witness: Option<DensityMatrix>,
    pub verdict: Verdict,
}

/// Samples η = (1 + rA)/d on a small shell and reports the smallest ΔΦ.
/// A negative value disproves ρ → σ; a nonnegative one is only evidence.
pub fn local_min_probe(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    setting: &Setting,
    radius: f64,
    count: usize,
    seed: u64,
    opts: &PhiOptions,
) -> Result<LocalMinReport> {
    check_problem(rho, sigma, setting.input(), setting.output())?;
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::InvalidParameter(format!("probe radius {radius} outside (0, 1]")));
    }
    let spec = SurfaceSpec { kind: SurfaceKind::InfinityShell, radius, sampler: Sampler::UniformRandom { count, seed } };
    let etas = spec.states(setting.reference().dim())?;
    let values = ordered_map(&etas, |eta| delta_phi(eta, rho, sigma, setting, opts)).into_iter().collect::<Result<Vec<_>>>()?;
    let (argmin, min) = values.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let negative = min < -VIOLATION_TOL * radius;
    Ok(LocalMinReport {
        radius,
        count,
        min_delta_phi: min,
        argmin,
        witness: negative.then(|| etas[argmin].clone()),
        verdict: if negative { Verdict::Infeasible } else { Verdict::Borderline },
    })
}
