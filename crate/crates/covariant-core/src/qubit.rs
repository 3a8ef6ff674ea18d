//! Closed forms for a qubit under U(1) time translations and under SU(2).

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::channel::{CovariantChannel, Provenance};
use crate::error::{Error, Result};
use crate::hermitian::{ComplexMatrix, DensityMatrix, C64};

/// τ = [[p, c], [c*, 1 − p]] in the energy eigenbasis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitStateParams {
    pub p: f64,
    pub c: C64,
}

impl QubitStateParams {
    pub fn new(p: f64, c: C64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || c.norm_sqr() > p * (1.0 - p) + 1e-12 {
            return Err(Error::InvalidParameter(alloc::format!("p = {p}, |c| = {} is not a qubit state", c.norm())));
        }
        Ok(Self { p, c })
    }

    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
        }
        Ok(Self { p: rho[(0, 0)].re, c: rho[(0, 1)] })
    }

    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(0.5 * (1.0 + z), C64::new(0.5 * x, -0.5 * y))
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(self.p, 0.0),
            (1, 1) => C64::new(1.0 - self.p, 0.0),
            (0, 1) => self.c,
            _ => self.c.conj(),
        }))
    }

    pub fn bloch(&self) -> [f64; 3] {
        [2.0 * self.c.re, -2.0 * self.c.im, 2.0 * self.p - 1.0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum U1Region {
    Upper,
    Middle,
    Lower,
}

/// Which branch of the piecewise U(1) form applies at η = (x, y, z).
pub fn u1_region(tau: &QubitStateParams, bloch: [f64; 3]) -> U1Region {
    let [x, y, z] = bloch;
    let r = x.hypot(y);
    let c = tau.c.norm();
    if z > 0.0 && r * c <= 2.0 * z * (1.0 - tau.p) {
        U1Region::Upper
    } else if z < 0.0 && r * c <= -2.0 * z * tau.p {
        U1Region::Lower
    } else {
        U1Region::Middle
    }
}

/// Φ_τ(x, y, z) for H = σz.
pub fn phi_u1_qubit(tau: &QubitStateParams, bloch: [f64; 3]) -> f64 {
    let [x, y, z] = bloch;
    let r = x.hypot(y);
    let r2 = r * r;
    let c2 = tau.c.norm_sqr();
    match u1_region(tau, bloch) {
        U1Region::Upper => {
            let curv = if c2 == 0.0 { 0.0 } else { c2 / (1.0 - tau.p) * r2 / (4.0 * z) };
            curv + 0.5 * z + 0.5
        }
        U1Region::Lower => {
            let curv = if c2 == 0.0 { 0.0 } else { -c2 / tau.p * r2 / (4.0 * z) };
            curv - 0.5 * z + 0.5
        }
        U1Region::Middle => (tau.p - 0.5) * z + tau.c.norm() * r + 0.5,
    }
}

/// Φ_τ(x) under SU(2), with r the Bloch vector of τ and x that of η.
pub fn phi_su2_qubit(r: [f64; 3], x: [f64; 3]) -> f64 {
    let s = x[0] * r[0] - x[1] * r[1] + x[2] * r[2];
    if s >= 0.0 {
        0.5 * (1.0 + s)
    } else {
        0.5 * (1.0 - s / 3.0)
    }
}

/// Signed slack of the two U(1) interconversion inequalities, in the
/// division-free form |c_ρ|²(1 − p_σ) − |c_σ|²(1 − p_ρ) and |c_ρ|²p_σ − |c_σ|²p_ρ.
pub fn u1_qubit_margin(rho: &QubitStateParams, sigma: &QubitStateParams) -> f64 {
    let (cr, cs) = (rho.c.norm_sqr(), sigma.c.norm_sqr());
    let upper = cr * (1.0 - sigma.p) - cs * (1.0 - rho.p);
    let lower = cr * sigma.p - cs * rho.p;
    upper.min(lower)
}

/// Exact U(1) interconversion criterion for a non-degenerate qubit.
pub fn u1_qubit_feasible(rho: &QubitStateParams, sigma: &QubitStateParams) -> bool {
    u1_qubit_margin(rho, sigma) >= 0.0
}

/// E_λ(ρ) = ½(1 + λ r·σ), λ ∈ [−⅓, 1].
pub fn su2_qubit_channel(lambda: f64) -> Result<CovariantChannel> {
    if !(-1.0 / 3.0 - 1e-15..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(alloc::format!("λ = {lambda} outside [-1/3, 1]")));
    }
    CovariantChannel::from_fn(2, 2, Provenance::BlochScaling { lambda }, |m| {
        let mut out = m.scale_real(lambda);
        let t = m.trace() * (0.5 * (1.0 - lambda));
        out[(0, 0)] += t;
        out[(1, 1)] += t;
        out
    })
}
