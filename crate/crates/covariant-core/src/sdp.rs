//! Small dense complex semidefinite programs.
//!
//! Problems are posed as
//!
//! ```text
//! min/max ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! ```
//!
//! over Hermitian X, and solved on the realified problem with a
//! homogeneous self-dual interior-point method using Nesterov-Todd scaling
//! and Mehrotra predictor-corrector steps.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub objective: ComplexMatrix,
    pub constraints: Vec<(ComplexMatrix, f64)>,
    pub sense: Sense,
}

impl SdpProblem {
    pub fn new(objective: ComplexMatrix, constraints: Vec<(ComplexMatrix, f64)>, sense: Sense) -> Result<Self> {
        let n = objective.require_square()?;
        check_hermitian(&objective)?;
        for (a, _) in &constraints {
            let k = a.require_square()?;
            if k != n {
                return Err(Error::DimensionMismatch { expected: n, found: k });
            }
            check_hermitian(a)?;
        }
        Ok(Self { objective, constraints, sense })
    }

    pub fn dim(&self) -> usize {
        self.objective.rows()
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let dev = m.hermitian_deviation();
    if dev > 1e-12 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
}

/// Farkas-type evidence attached to an infeasible return.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// y with bᵀy = 1 and Σ y_i A_i ⪯ 0 (min form): the equality system has no PSD solution.
    PrimalInfeasible { y: Vec<f64> },
    /// X ⪰ 0 with A(X) = 0 improving the objective by one unit: the objective is unbounded.
    DualInfeasible { x: ComplexMatrix },
}

/// Primal-dual pair. For `Min`, Z = C − Σ y_i A_i; for `Max`, Z = Σ y_i A_i − C.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: ComplexMatrix,
    pub y: Vec<f64>,
    pub z: ComplexMatrix,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub certificate: Option<Certificate>,
}

impl SdpSolution {
    /// Midpoint of the primal and dual values.
    pub fn value(&self) -> f64 {
        0.5 * (self.primal_value + self.dual_value)
    }
}

/// Realified problem: each Hermitian H becomes ½[[Re H, −Im H], [Im H, Re H]]
/// with b unchanged, so ⟨H', X_r⟩ = ⟨H, X⟩ and optimal values coincide.
pub fn realify(p: &SdpProblem) -> SdpProblem {
    let emb = |h: &ComplexMatrix| {
        let n = h.rows();
        ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let z = h[(i % n, j % n)];
            let v = match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            };
            C64::new(0.5 * v, 0.0)
        })
    };
    SdpProblem { objective: emb(&p.objective), constraints: p.constraints.iter().map(|(a, b)| (emb(a), *b)).collect(), sense: p.sense }
}

struct RealProblem {
    c: DMatrix<f64>,
    a: Vec<DMatrix<f64>>,
    b: DVector<f64>,
}

fn real_part(m: &ComplexMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].re)
}

fn is_real(p: &SdpProblem) -> bool {
    let zero_im = |m: &ComplexMatrix| m.data().iter().all(|z| z.im == 0.0);
    zero_im(&p.objective) && p.constraints.iter().all(|(a, _)| zero_im(a))
}

/// Undoes the realification of an n×n block variable.
fn unrealify(y: &DMatrix<f64>, n: usize, scale: f64) -> ComplexMatrix {
    let h =
        ComplexMatrix::from_fn(n, n, |i, j| C64::new(0.5 * (y[(i, j)] + y[(i + n, j + n)]), 0.5 * (y[(i + n, j)] - y[(i, j + n)])) * scale);
    h.hermitian_part()
}

fn complex_of(y: &DMatrix<f64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(y.nrows(), y.ncols(), |i, j| C64::new(y[(i, j)], 0.0)).hermitian_part()
}

pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let n = p.dim();
    let sign = match p.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let real = is_real(p);
    let work = if real { None } else { Some(realify(p)) };
    let src = work.as_ref().unwrap_or(p);
    let rp = RealProblem {
        c: real_part(&src.objective) * sign,
        a: src.constraints.iter().map(|(a, _)| real_part(a)).collect(),
        b: DVector::from_iterator(src.constraints.len(), src.constraints.iter().map(|(_, b)| *b)),
    };
    let out = solve_real(&rp, opts)?;
    let lift = |m: &DMatrix<f64>, scale: f64| if real { complex_of(m).scale_real(scale) } else { unrealify(m, n, scale) };
    let zscale = if real { 1.0 } else { 2.0 };
    let certificate = out.certificate.map(|c| match c {
        RealCertificate::Primal(y) => Certificate::PrimalInfeasible { y: y.iter().map(|v| v * sign).collect() },
        RealCertificate::Dual(x) => Certificate::DualInfeasible { x: lift(&x, 1.0) },
    });
    Ok(SdpSolution {
        status: out.status,
        x: lift(&out.x, 1.0),
        y: out.y.iter().map(|v| v * sign).collect(),
        z: lift(&out.z, zscale),
        primal_value: sign * out.primal,
        dual_value: sign * out.dual,
        gap: out.gap,
        iterations: out.iterations,
        certificate,
    })
}

enum RealCertificate {
    Primal(DVector<f64>),
    Dual(DMatrix<f64>),
}

struct RealSolution {
    status: SdpStatus,
    x: DMatrix<f64>,
    y: DVector<f64>,
    z: DMatrix<f64>,
    primal: f64,
    dual: f64,
    gap: f64,
    iterations: usize,
    certificate: Option<RealCertificate>,
}

fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

/// Largest α with Λ + α·D ⪰ 0, for diagonal positive Λ.
fn max_step(lam: &DVector<f64>, d: &DMatrix<f64>) -> f64 {
    let n = lam.len();
    let s = DMatrix::from_fn(n, n, |i, j| d[(i, j)] / (lam[i] * lam[j]).sqrt());
    let ev = nalgebra::SymmetricEigen::new(sym(s)).eigenvalues;
    let lo = ev.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if lo < 0.0 {
        -1.0 / lo
    } else {
        f64::INFINITY
    }
}

/// Singular values and right singular vectors by one-sided Jacobi rotations.
fn jacobi_svd(mut a: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.ncols();
    let mut v = DMatrix::identity(n, n);
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (cp, cq) = (a.column(p), a.column(q));
                let alpha = cp.norm_squared();
                let beta = cq.norm_squared();
                let gamma = cp.dot(&cq);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut a, &mut v] {
                    for i in 0..m.nrows() {
                        let (x, y) = (m[(i, p)], m[(i, q)]);
                        m[(i, p)] = c * x - s * y;
                        m[(i, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sv = DVector::from_iterator(n, (0..n).map(|j| a.column(j).norm()));
    (sv, v)
}

fn check_independent(a: &[DMatrix<f64>]) -> Result<()> {
    let m = a.len();
    if m == 0 {
        return Ok(());
    }
    let gram = DMatrix::from_fn(m, m, |i, j| dot(&a[i], &a[j]));
    let ev = nalgebra::SymmetricEigen::new(gram).eigenvalues;
    let hi = ev.iter().fold(0.0f64, |x, &y| x.max(y));
    let lo = ev.iter().fold(f64::INFINITY, |x, &y| x.min(y));
    if !(lo > 1e-13 * hi) {
        return Err(Error::DependentConstraints);
    }
    Ok(())
}

struct Direction {
    dx: DMatrix<f64>,
    dz: DMatrix<f64>,
    dy: DVector<f64>,
    dtau: f64,
    dkappa: f64,
}

fn solve_real(p: &RealProblem, opts: &SdpOptions) -> Result<RealSolution> {
    let n = p.c.nrows();
    let m = p.a.len();
    check_independent(&p.a)?;

    let bnorm = p.b.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let cnorm = max_abs(&p.c);
    let mu0 = 1.0 + bnorm + cnorm;
    let mut x = DMatrix::identity(n, n) * mu0;
    let mut z = DMatrix::identity(n, n) * mu0;
    let mut y = DVector::zeros(m);
    let mut tau = 1.0;
    let mut kappa = 1.0;
    let b2 = p.b.norm();
    let c2 = p.c.norm();
    let nu = (n + 1) as f64;

    let a_op = |x: &DMatrix<f64>| DVector::from_iterator(m, p.a.iter().map(|a| dot(a, x)));
    let at_op = |y: &DVector<f64>| {
        let mut out = DMatrix::zeros(n, n);
        for (a, &v) in p.a.iter().zip(y.iter()) {
            out += a * v;
        }
        out
    };

    // Once converged, a few extra steps are taken so that bᵀy ≤ ⟨C, X⟩ holds as well.
    let mut best: Option<RealSolution> = None;
    let mut polish = 0;
    // Near the optimum the scaled system can lose accuracy; the least-residual
    // iterate is kept and accepted if it is within a factor 10³ of tolerance.
    let mut nearest: Option<(f64, RealSolution)> = None;
    macro_rules! fail {
        ($it:expr) => {
            return match (best.take(), nearest.take()) {
                (Some(b), _) => Ok(b),
                (None, Some((merit, b))) if merit <= 1e3 * opts.tol => Ok(b),
                _ => Err(Error::NumericalFailure { iterations: $it }),
            }
        };
    }

    for iter in 0..opts.max_iter {
        let ax = a_op(&x);
        let rp = &p.b * tau - &ax;
        let rd = &p.c * tau - at_op(&y) - &z;
        let cx = dot(&p.c, &x);
        let by = p.b.dot(&y);
        let rg = kappa + cx - by;
        let mu = (dot(&x, &z) + tau * kappa) / nu;

        let pobj = cx / tau;
        let dobj = by / tau;
        let pres = rp.norm() / tau / (1.0 + b2);
        let dres = rd.norm() / tau / (1.0 + c2);
        let gap = (pobj - dobj).abs();
        let merit = pres.max(dres).max(gap / (1.0 + pobj.abs()));
        let snapshot = || RealSolution {
            status: SdpStatus::Optimal,
            x: &x / tau,
            y: &y / tau,
            z: &z / tau,
            primal: pobj,
            dual: dobj,
            gap,
            iterations: iter,
            certificate: None,
        };
        match &nearest {
            Some((m, _)) if *m <= merit => {
                if merit > 1e4 * *m && *m <= 1e3 * opts.tol {
                    fail!(iter);
                }
            }
            _ => nearest = Some((merit, snapshot())),
        }
        if pres <= opts.tol && dres <= opts.tol && gap <= opts.tol * (1.0 + pobj.abs()) {
            let ordered = dobj <= pobj + 1e-10 * (1.0 + pobj.abs());
            let candidate = snapshot();
            polish += 1;
            if ordered || polish > 8 {
                return Ok(candidate);
            }
            best = Some(candidate);
        }
        if tau < 1e-8 * kappa {
            let certificate = if by > 0.0 && by >= -cx {
                Some(RealCertificate::Primal(&y / by))
            } else if cx < 0.0 {
                Some(RealCertificate::Dual(&x / -cx))
            } else {
                None
            };
            if let Some(cert) = certificate {
                return Ok(RealSolution {
                    status: SdpStatus::Infeasible,
                    x: &x / tau,
                    y: &y / tau,
                    z: &z / tau,
                    primal: pobj,
                    dual: dobj,
                    gap,
                    iterations: iter,
                    certificate: Some(cert),
                });
            }
        }

        // Nesterov-Todd scaling G with G⁻¹XG⁻ᵀ = GᵀZG = Λ.
        let lx = match x.clone().cholesky() {
            Some(c) => c.l(),
            None => fail!(iter),
        };
        let lz = match z.clone().cholesky() {
            Some(c) => c.l(),
            None => fail!(iter),
        };
        let (lam, v) = jacobi_svd(lz.transpose() * &lx);
        if lam.iter().any(|&l| !(l > 0.0)) {
            fail!(iter);
        }
        let g = DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| lx[(i, k)] * v[(k, j)]).sum::<f64>() / lam[j].sqrt());
        let gt = g.transpose();
        let ginv_t = {
            // G⁻ᵀ = L⁻ᵀ V Σ^{1/2}
            let lt_inv = match lx.transpose().try_inverse() {
                Some(i) => i,
                None => fail!(iter),
            };
            DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| lt_inv[(i, k)] * v[(k, j)]).sum::<f64>() * lam[j].sqrt())
        };

        let at: Vec<DMatrix<f64>> = p.a.iter().map(|a| sym(&gt * a * &g)).collect();
        let ct = sym(&gt * &p.c * &g);
        let rdt = sym(&gt * &rd * &g);
        let mmat = DMatrix::from_fn(m, m, |i, j| dot(&at[i], &at[j]));
        let h = DVector::from_iterator(m, at.iter().map(|a| dot(a, &ct)));
        let chol = mmat.clone().cholesky();
        let lu = if chol.is_none() { Some(mmat.clone().lu()) } else { None };
        let msolve = |r: &DVector<f64>| -> Option<DVector<f64>> {
            match (&chol, &lu) {
                (Some(c), _) => Some(c.solve(r)),
                (None, Some(l)) => l.solve(r),
                _ => None,
            }
        };
        let bph = &p.b + &h;
        let Some(q) = msolve(&bph) else { fail!(iter) };
        let bmh = &p.b - &h;
        let ct2 = ct.norm_squared();
        let lam_mat = DMatrix::from_diagonal(&lam);

        let direction = |rc: &DMatrix<f64>, r5: f64, eta: f64| -> Option<Direction> {
            let s = DMatrix::from_fn(n, n, |i, j| 2.0 * rc[(i, j)] / (lam[i] + lam[j]));
            let w = &s - &rdt * eta;
            let aw = DVector::from_iterator(m, at.iter().map(|a| dot(a, &w)));
            let pv = msolve(&(&rp * eta - aw))?;
            let num = eta * rg + dot(&ct, &w) + r5 / tau - bmh.dot(&pv);
            let den = bmh.dot(&q) + ct2 + kappa / tau;
            let dtau = num / den;
            let dy = &pv + &q * dtau;
            let mut dxt = w - &ct * dtau;
            for (a, &v) in at.iter().zip(dy.iter()) {
                dxt += a * v;
            }
            let dxt = sym(dxt);
            let dzt = sym(&s - &dxt);
            let dkappa = (r5 - kappa * dtau) / tau;
            Some(Direction { dx: dxt, dz: dzt, dy, dtau, dkappa })
        };

        let step_len = |d: &Direction| -> f64 {
            let mut a = max_step(&lam, &d.dx).min(max_step(&lam, &d.dz));
            if d.dtau < 0.0 {
                a = a.min(-tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                a = a.min(-kappa / d.dkappa);
            }
            a
        };

        // Predictor.
        let rc_aff = -(&lam_mat * &lam_mat);
        let Some(aff) = direction(&rc_aff, -tau * kappa, 1.0) else { fail!(iter) };
        let alpha_aff = step_len(&aff).min(1.0);
        let lx_aff = &lam_mat + &aff.dx * alpha_aff;
        let lz_aff = &lam_mat + &aff.dz * alpha_aff;
        let mu_aff = (dot(&lx_aff, &lz_aff) + (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) / nu;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let cross = sym(&aff.dx * &aff.dz);
        let rc = DMatrix::identity(n, n) * (sigma * mu) - &lam_mat * &lam_mat - cross;
        let r5 = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        let Some(dir) = direction(&rc, r5, 1.0 - sigma) else { fail!(iter) };
        let alpha = (0.98 * step_len(&dir)).min(1.0);
        if !(alpha > 1e-14) {
            fail!(iter);
        }

        x = sym(&x + &g * &dir.dx * &gt * alpha);
        z = sym(&z + &ginv_t * &dir.dz * ginv_t.transpose() * alpha);
        y += &dir.dy * alpha;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
        if !(tau > 0.0 && kappa > 0.0) || !x.iter().all(|v| v.is_finite()) {
            fail!(iter);
        }
    }
    fail!(opts.max_iter)
}

/// Absolute residuals of a returned primal-dual pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KktReport {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
}

pub fn check_kkt(p: &SdpProblem, s: &SdpSolution) -> KktReport {
    let primal_residual = p.constraints.iter().map(|(a, b)| (a.inner(&s.x).re - b).abs()).fold(0.0, f64::max);
    let mut zc = p.objective.clone();
    for ((a, _), &yi) in p.constraints.iter().zip(&s.y) {
        zc.axpy(C64::new(-yi, 0.0), a);
    }
    if p.sense == Sense::Max {
        zc = zc.scale_real(-1.0);
    }
    let dual_residual = (&zc - &s.z).max_abs();
    let complementarity = s.x.matmul(&s.z).max_abs();
    KktReport { primal_residual, dual_residual, complementarity }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{kron, pauli_y, ComplexMatrix};
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn opts() -> SdpOptions {
        SdpOptions::default()
    }

    #[test]
    fn unit_diagonal_correlation() {
        // min ⟨σ, X⟩ with X_00 = X_11 = 1 attains −2 at a rank-one X.
        let e = |k: usize| ComplexMatrix::from_fn(2, 2, |i, j| if i == k && j == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        for c in [crate::hermitian::pauli_x(), pauli_y()] {
            let p = SdpProblem::new(c, vec![(e(0), 1.0), (e(1), 1.0)], Sense::Min).unwrap();
            let s = solve(&p, &opts()).unwrap();
            assert_eq!(s.status, SdpStatus::Optimal);
            assert_abs_diff_eq!(s.primal_value, -2.0, epsilon = 1e-7);
            assert!(s.dual_value <= s.primal_value + 1e-9);
            let k = check_kkt(&p, &s);
            assert!(k.primal_residual < 1e-7 && k.dual_residual < 1e-7, "{k:?}");
        }
    }

    /// max ⟨Ω, Y⟩ s.t. tr_R Y = I_A over R⊗A qubits.
    fn phi_dual(omega: &ComplexMatrix) -> SdpProblem {
        let mut cons = Vec::new();
        for (k, l) in [(0, 0), (1, 1), (0, 1)] {
            for im in [false, true] {
                if k == l && im {
                    continue;
                }
                let mut e = ComplexMatrix::zeros(2, 2);
                let w = if im { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
                e[(k, l)] += w * 0.5;
                e[(l, k)] += w.conj() * 0.5;
                let b = e.trace().re;
                cons.push((kron(&ComplexMatrix::identity(2), &e), b));
            }
        }
        SdpProblem::new(omega.clone(), cons, Sense::Max).unwrap()
    }

    #[test]
    fn maximally_mixed_phi() {
        let omega = ComplexMatrix::identity(4).scale_real(0.25);
        let s = solve(&phi_dual(&omega), &opts()).unwrap();
        assert_abs_diff_eq!(s.primal_value, 0.5, epsilon = 1e-8);
        assert!(s.dual_value >= s.primal_value - 1e-9);
    }

    #[test]
    fn entangled_phi() {
        let phi: Vec<C64> = [1.0, 0.0, 0.0, 1.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        let omega = ComplexMatrix::outer(&phi, &phi);
        let s = solve(&phi_dual(&omega), &opts()).unwrap();
        assert_abs_diff_eq!(s.value(), 4.0, epsilon = 1e-7);
    }

    #[test]
    fn infeasible_trace() {
        let p = SdpProblem::new(ComplexMatrix::zeros(2, 2), vec![(ComplexMatrix::identity(2), -1.0)], Sense::Min).unwrap();
        let s = solve(&p, &opts()).unwrap();
        assert_eq!(s.status, SdpStatus::Infeasible);
        match s.certificate {
            Some(Certificate::PrimalInfeasible { y }) => assert!(y[0] < 0.0),
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn realify_examples() {
        let p = SdpProblem::new(ComplexMatrix::from_diag(&[1.0, 2.0]), vec![(ComplexMatrix::identity(2), 1.0)], Sense::Min).unwrap();
        let r = realify(&p);
        assert_eq!(r.objective, ComplexMatrix::from_diag(&[0.5, 1.0, 0.5, 1.0]));
        let q = SdpProblem::new(pauli_y(), vec![(ComplexMatrix::identity(2), 1.0)], Sense::Min).unwrap();
        let r = realify(&q);
        assert!(r.objective.is_hermitian(0.0));
        assert!(r.objective.data().iter().all(|z| z.im == 0.0));
        assert_abs_diff_eq!(r.objective[(0, 3)].re, 0.5);
        assert_abs_diff_eq!(r.objective[(3, 0)].re, 0.5);
        let s = solve(&q, &opts()).unwrap();
        assert_abs_diff_eq!(s.value(), -1.0, epsilon = 1e-8);
        let sr = solve(&r, &opts()).unwrap();
        assert_abs_diff_eq!(sr.value(), s.value(), epsilon = 1e-8);
    }

    #[test]
    fn jacobi_svd_graded_matrix() {
        let d = [
            0.5101729185486649,
            4.98049430156922e-16,
            4.373143309428724e-31,
            -0.20769795914758582,
            -1.1968020624462703e-17,
            0.1704591026601502,
            6.113821692362787e-16,
            -5.4812606423832843e-17,
            7.076447922916643e-32,
            -2.2547752547117466e-16,
            0.2710630964347156,
            2.7373087462470835e-31,
            0.16480510414958915,
            -1.549802242019078e-15,
            -1.269455395988611e-30,
            0.6337886711520875,
        ];
        let a = DMatrix::from_column_slice(4, 4, &d);
        let (sv, v) = jacobi_svd(a.clone());
        let av = &a * &v;
        let mut sorted: Vec<f64> = sv.iter().copied().collect();
        sorted.sort_by(|x, y| y.total_cmp(x));
        let reference = nalgebra::SymmetricEigen::new(a.transpose() * &a).eigenvalues;
        let mut want: Vec<f64> = reference.iter().map(|x| x.sqrt()).collect();
        want.sort_by(|x, y| y.total_cmp(x));
        for (s, w) in sorted.iter().zip(&want) {
            assert!((s - w).abs() < 1e-12, "{s} vs {w}");
        }
        assert!(max_abs(&(v.transpose() * &v - DMatrix::identity(4, 4))) < 1e-14);
        let gram = av.transpose() * &av;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { sv[i] * sv[i] } else { 0.0 };
                assert!((gram[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_dependent_constraints() {
        let i2 = ComplexMatrix::identity(2);
        let p = SdpProblem::new(i2.clone(), vec![(i2.clone(), 1.0), (i2.scale_real(2.0), 2.0)], Sense::Min).unwrap();
        assert_eq!(solve(&p, &opts()), Err(Error::DependentConstraints));
    }

    #[test]
    fn kkt_of_analytic_solution() {
        let p = SdpProblem::new(ComplexMatrix::from_diag(&[1.0, 2.0]), vec![(ComplexMatrix::identity(2), 1.0)], Sense::Min).unwrap();
        let exact = SdpSolution {
            status: SdpStatus::Optimal,
            x: ComplexMatrix::from_diag(&[1.0, 0.0]),
            y: alloc::vec![1.0],
            z: ComplexMatrix::from_diag(&[0.0, 1.0]),
            primal_value: 1.0,
            dual_value: 1.0,
            gap: 0.0,
            iterations: 0,
            certificate: None,
        };
        let k = check_kkt(&p, &exact);
        assert!(k.primal_residual <= 1e-12 && k.dual_residual <= 1e-12 && k.complementarity <= 1e-12);
        let mut pert = exact.clone();
        pert.x = ComplexMatrix::from_diag(&[1.001, 0.0]);
        assert_abs_diff_eq!(check_kkt(&p, &pert).primal_residual, 1e-3, epsilon = 1e-12);
    }
}
