//! The functional Φ(M) = inf{tr X : 1⊗X ⪰ M} and the entropies H_η built on it.

#[allow(unused_imports)]
use num_traits::Float;
use serde::Serialize;

use crate::channel::CovariantChannel;
use crate::error::{Error, Result};
use crate::hermitian::{
    eig_hermitian, eigvals_hermitian, hermitian_basis, kron, state_from_bloch, BlochCoordinates, ComplexMatrix, DensityMatrix, C64,
};
use crate::qubit::{phi_su2_qubit, phi_u1_qubit, QubitStateParams};
use crate::sdp::{solve, SdpOptions, SdpProblem, Sense};
use crate::symmetry::{joint_twirl, RepKind, Representation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMethod {
    Sdp,
    SymmetricClosedForm,
    QubitClosedForm,
}

/// Primal X_A with 1⊗X_A ⪰ M and dual Y ⪰ 0 with tr_R Y = 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiCertificate {
    pub x_a: ComplexMatrix,
    pub y: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiEvaluation {
    pub phi: f64,
    pub h_min: f64,
    pub method: PhiMethod,
    pub gap: f64,
    pub certificate: Option<PhiCertificate>,
}

impl PhiEvaluation {
    fn new(phi: f64, method: PhiMethod, gap: f64, certificate: Option<PhiCertificate>) -> Self {
        Self { phi, h_min: -phi.log2(), method, gap, certificate }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiOptions {
    pub sdp: SdpOptions,
    /// Threshold below which η is treated as symmetric.
    pub symmetric_tol: f64,
    /// Use the qubit closed forms where they apply.
    pub closed_form: bool,
}

impl Default for PhiOptions {
    fn default() -> Self {
        Self { sdp: SdpOptions { tol: 1e-10, max_iter: 200 }, symmetric_tol: 1e-9, closed_form: false }
    }
}

/// Input, output and reference representations of a transformation problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Setting {
    input: Representation,
    output: Representation,
    reference: Representation,
}

impl Setting {
    /// The reference carries the conjugate of the output representation.
    pub fn new(input: Representation, output: Representation) -> Result<Self> {
        let reference = output.dual();
        Self::with_reference(input, output, reference)
    }

    pub fn with_reference(input: Representation, output: Representation, reference: Representation) -> Result<Self> {
        if input.group() != output.group() || reference.group() != output.group() {
            return Err(Error::MismatchedGroups);
        }
        Ok(Self { input, output, reference })
    }

    /// Same representation on input and output.
    pub fn same(rep: Representation) -> Result<Self> {
        Self::new(rep.clone(), rep)
    }

    pub fn input(&self) -> &Representation {
        &self.input
    }

    pub fn output(&self) -> &Representation {
        &self.output
    }

    pub fn reference(&self) -> &Representation {
        &self.reference
    }
}

/// Φ(M) for Hermitian PSD M on R⊗A with `dims = (d_R, d_A)`.
pub fn phi_of_operator(m: &ComplexMatrix, dims: (usize, usize), opts: &PhiOptions) -> Result<PhiEvaluation> {
    let (dr, da) = dims;
    let n = m.require_square()?;
    if n != dr * da {
        return Err(Error::DimensionMismatch { expected: dr * da, found: n });
    }
    let dev = m.hermitian_deviation();
    if dev > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let m = m.hermitian_part();
    let lo = eigvals_hermitian(&m).first().copied().unwrap_or(0.0);
    if lo < -1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotPositive { eigenvalue: lo });
    }
    let real = m.data().iter().all(|z| z.im == 0.0);
    let basis = hermitian_basis(da, real);
    let id_r = ComplexMatrix::identity(dr);
    let constraints = basis.iter().map(|e| (kron(&id_r, e), e.trace().re)).collect();
    let problem = SdpProblem::new(m, constraints, Sense::Max)?;
    let sol = solve(&problem, &opts.sdp)?;
    if sol.status != crate::sdp::SdpStatus::Optimal {
        return Err(Error::NumericalFailure { iterations: sol.iterations });
    }
    let mut x_a = ComplexMatrix::zeros(da, da);
    for (e, &y) in basis.iter().zip(&sol.y) {
        x_a.axpy(C64::new(y, 0.0), e);
    }
    let phi = sol.value();
    Ok(PhiEvaluation::new(phi, PhiMethod::Sdp, sol.gap, Some(PhiCertificate { x_a, y: sol.x })))
}

fn check_pair(eta: &ComplexMatrix, tau: &ComplexMatrix, rep_r: &Representation, rep_a: &Representation) -> Result<()> {
    if eta.rows() != rep_r.dim() {
        return Err(Error::DimensionMismatch { expected: rep_r.dim(), found: eta.rows() });
    }
    if tau.rows() != rep_a.dim() {
        return Err(Error::DimensionMismatch { expected: rep_a.dim(), found: tau.rows() });
    }
    if rep_r.group() != rep_a.group() {
        return Err(Error::MismatchedGroups);
    }
    Ok(())
}

/// Φ_η(τ) = Φ(G(η⊗τ)).
pub fn phi_eta(
    eta: &DensityMatrix,
    tau: &DensityMatrix,
    rep_r: &Representation,
    rep_a: &Representation,
    opts: &PhiOptions,
) -> Result<PhiEvaluation> {
    check_pair(eta, tau, rep_r, rep_a)?;
    if rep_r.is_symmetric(eta, opts.symmetric_tol) {
        return Ok(symmetric_reference(eta, tau, rep_a));
    }
    if opts.closed_form {
        if let Some(phi) = qubit_closed_form(eta, tau, rep_r, rep_a) {
            return Ok(PhiEvaluation::new(phi, PhiMethod::QubitClosedForm, 0.0, None));
        }
    }
    let omega = joint_twirl(rep_r, rep_a)?.apply(&kron(eta, tau));
    phi_of_operator(&omega, (rep_r.dim(), rep_a.dim()), opts)
}

/// Φ_η(τ) for a qubit with reference carrying the dual representation.
fn qubit_closed_form(eta: &DensityMatrix, tau: &DensityMatrix, rep_r: &Representation, rep_a: &Representation) -> Option<f64> {
    if rep_a.dim() != 2 || *rep_r != rep_a.dual() {
        return None;
    }
    let x = eta.qubit_bloch()?;
    let r = tau.qubit_bloch()?;
    match rep_a.kind() {
        RepKind::U1 { weights } if weights[0] != weights[1] => Some(phi_u1_qubit(&QubitStateParams::from_state(tau).ok()?, x)),
        RepKind::Su2 { blocks, basis: None } if blocks[..] == [1] => Some(phi_su2_qubit(r, x)),
        _ => None,
    }
}

/// For symmetric η, G(η⊗τ) = η⊗G(τ) and Φ = ‖η‖∞.
fn symmetric_reference(eta: &DensityMatrix, tau: &DensityMatrix, rep_a: &Representation) -> PhiEvaluation {
    let eig = eig_hermitian(&eta.hermitian_part()).expect("valid state");
    let k = eig.values.len() - 1;
    let top = eig.values[k];
    let v = eig.vector(k);
    let x_a = rep_a.twirl().apply(tau).scale_real(top);
    let y = kron(&ComplexMatrix::outer(&v, &v), &ComplexMatrix::identity(rep_a.dim()));
    PhiEvaluation::new(top, PhiMethod::SymmetricClosedForm, 0.0, Some(PhiCertificate { x_a, y }))
}

/// H_η(σ) − H_η(ρ) in bits.
pub fn delta_h(eta: &DensityMatrix, rho: &DensityMatrix, sigma: &DensityMatrix, setting: &Setting, opts: &PhiOptions) -> Result<f64> {
    let (a, b) = phi_pair(eta, rho, sigma, setting, opts)?;
    Ok(a.log2() - b.log2())
}

/// Φ_η(ρ) − Φ_η(σ); has the sign of ΔH_η.
pub fn delta_phi(eta: &DensityMatrix, rho: &DensityMatrix, sigma: &DensityMatrix, setting: &Setting, opts: &PhiOptions) -> Result<f64> {
    let (a, b) = phi_pair(eta, rho, sigma, setting, opts)?;
    Ok(a - b)
}

/// (Φ_η(ρ), Φ_η(σ)).
pub fn phi_pair(
    eta: &DensityMatrix,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    setting: &Setting,
    opts: &PhiOptions,
) -> Result<(f64, f64)> {
    let a = phi_eta(eta, rho, setting.reference(), setting.input(), opts)?.phi;
    let b = phi_eta(eta, sigma, setting.reference(), setting.output(), opts)?.phi;
    Ok((a, b))
}

/// tr(η^T E(τ)), a lower bound on Φ_η(τ) for covariant E.
pub fn phi_channel_lower_bound(
    eta: &DensityMatrix,
    tau: &DensityMatrix,
    channel: &CovariantChannel,
    rep_in: &Representation,
    rep_out: &Representation,
) -> Result<f64> {
    let deviation = channel.covariance_deviation(rep_in, rep_out)?;
    if deviation > 1e-8 {
        return Err(Error::NotCovariant { deviation });
    }
    let out = channel.apply(tau)?;
    if out.rows() != eta.rows() {
        return Err(Error::DimensionMismatch { expected: out.rows(), found: eta.rows() });
    }
    Ok(eta.transpose().trace_product(&out).re)
}

/// Φ̃_τ(x) = Φ_{η(x)}(τ) − 1/d_R.
pub fn phi_tilde(
    x: &BlochCoordinates,
    tau: &DensityMatrix,
    rep_r: &Representation,
    rep_a: &Representation,
    opts: &PhiOptions,
) -> Result<f64> {
    let eta = state_from_bloch(x)?;
    Ok(phi_eta(&eta, tau, rep_r, rep_a, opts)?.phi - 1.0 / rep_r.dim() as f64)
}

/// Λ_p(η) = pη + (1−p)1/d.
pub fn partially_depolarize(eta: &DensityMatrix, p: f64) -> DensityMatrix {
    eta.depolarize(1.0 - p)
}
