//! Scenario files: parsing, validation and state resolution.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use covariant_core::entropy::{PhiOptions, Setting};
use covariant_core::hermitian::{ComplexMatrix, DensityMatrix, C64};
use covariant_core::interconversion::{FeasibilityOptions, SurfaceSpec};
use covariant_core::sdp::SdpOptions;
use covariant_core::symmetry::{Representation, SymmetrySpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A state written as a matrix, a qubit Bloch vector, a ket, or a named state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Rows of [re, im] pairs.
    Matrix(ComplexMatrix),
    /// ½(I + xσx + yσy + zσz).
    Bloch([f64; 3]),
    /// Ket of [re, im] amplitudes, normalized on load.
    Pure(Vec<C64>),
    /// I/d.
    MaximallyMixed(usize),
    /// |k⟩⟨k| in dimension d.
    Basis { dim: usize, index: usize },
}

impl StateSpec {
    pub fn resolve(&self) -> covariant_core::Result<DensityMatrix> {
        use covariant_core::Error;
        match self {
            StateSpec::Matrix(m) => DensityMatrix::new(m.clone()),
            StateSpec::Bloch([x, y, z]) => {
                let r = (x * x + y * y + z * z).sqrt();
                if r > 1.0 + 1e-12 {
                    return Err(Error::OutsideStateBody { min_eigenvalue: 0.5 * (1.0 - r) });
                }
                DensityMatrix::qubit(*x, *y, *z)
            }
            StateSpec::Pure(v) => DensityMatrix::pure(v),
            StateSpec::MaximallyMixed(d) if *d >= 1 => Ok(DensityMatrix::maximally_mixed(*d)),
            StateSpec::MaximallyMixed(_) => Err(Error::InvalidParameter("dimension must be positive".into())),
            StateSpec::Basis { dim, index } if index < dim => Ok(DensityMatrix::basis(*dim, *index)),
            StateSpec::Basis { dim, index } => Err(Error::InvalidParameter(format!("index {index} out of range for dimension {dim}"))),
        }
    }
}

/// Plane of the Bloch ball swept by a region scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    #[default]
    Xz,
    Xy,
    Yz,
}

/// Square grid of `resolution`² points on [−extent, extent]² in `plane`,
/// with the remaining coordinate fixed at `offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub plane: Plane,
    pub resolution: usize,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "one")]
    pub extent: f64,
}

fn one() -> f64 {
    1.0
}

impl GridSpec {
    /// Bloch vectors in row-major order, first coordinate fastest.
    pub fn points(&self) -> Vec<[f64; 3]> {
        let n = self.resolution;
        let step = |k: usize| -self.extent + 2.0 * self.extent * k as f64 / (n - 1) as f64;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b) = (step(i), step(j));
                out.push(match self.plane {
                    Plane::Xz => [a, self.offset, b],
                    Plane::Xy => [a, b, self.offset],
                    Plane::Yz => [self.offset, a, b],
                });
            }
        }
        out
    }
}

/// Which states vary over a region scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Grid points are targets σ reached from the input state.
    #[default]
    FromInput,
    /// Grid points are inputs ρ that must reach the target state.
    ToTarget,
}

/// Per-point quantity of a region scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Quantity {
    /// ΔH_η(ρ → σ) and membership of σ in T_η.
    TEta { eta: StateSpec },
    /// Φ_τ(x) over reference Bloch vectors x, with τ the input state.
    Phi,
    /// Exact (Choi SDP) accessibility against the depolarization sufficient conditions.
    Accessible {
        #[serde(default)]
        p: f64,
        #[serde(default)]
        direction: Direction,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    Hmin {
        eta: StateSpec,
        #[serde(default)]
        tau: Option<StateSpec>,
    },
    Feasible {
        #[serde(default)]
        surface: Option<SurfaceSpec>,
    },
    Smoothed {
        epsilon: f64,
    },
    DepolThreshold {
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        q: Option<f64>,
    },
    Modes {
        #[serde(default)]
        state: Option<StateSpec>,
    },
    RegionScan {
        quantity: Quantity,
        grid: GridSpec,
    },
    Net {
        epsilon: f64,
        #[serde(default)]
        dim: Option<usize>,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Hmin { .. } => "hmin",
            Task::Feasible { .. } => "feasible",
            Task::Smoothed { .. } => "smoothed",
            Task::DepolThreshold { .. } => "depol-threshold",
            Task::Modes { .. } => "modes",
            Task::RegionScan { .. } => "region-scan",
            Task::Net { .. } => "net",
        }
    }
}

/// Numerical tolerances; every field defaults to the library default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Φ SDP stopping tolerance.
    pub phi_sdp_tol: f64,
    pub phi_max_iter: usize,
    /// η within this distance of its twirl is treated as symmetric.
    pub symmetric_tol: f64,
    /// Evaluate Φ from the qubit closed forms where they apply.
    pub closed_form: bool,
    /// Phase-I threshold for a Feasible Choi verdict.
    pub feasibility_tol: f64,
    pub feasibility_sdp_tol: f64,
    pub feasibility_max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let phi = PhiOptions::default();
        let f = FeasibilityOptions::default();
        Self {
            phi_sdp_tol: phi.sdp.tol,
            phi_max_iter: phi.sdp.max_iter,
            symmetric_tol: phi.symmetric_tol,
            closed_form: phi.closed_form,
            feasibility_tol: f.tol,
            feasibility_sdp_tol: f.sdp.tol,
            feasibility_max_iter: f.sdp.max_iter,
        }
    }
}

impl Tolerances {
    pub fn phi(&self) -> PhiOptions {
        PhiOptions {
            sdp: SdpOptions { tol: self.phi_sdp_tol, max_iter: self.phi_max_iter },
            symmetric_tol: self.symmetric_tol,
            closed_form: self.closed_form,
        }
    }

    pub fn feasibility(&self) -> FeasibilityOptions {
        FeasibilityOptions {
            tol: self.feasibility_tol,
            sdp: SdpOptions { tol: self.feasibility_sdp_tol, max_iter: self.feasibility_max_iter },
            phi: self.phi(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// Scenario file as written on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Representation on the input system (and on the output unless `output_group` is set).
    pub group: SymmetrySpec,
    #[serde(default)]
    pub output_group: Option<SymmetrySpec>,
    #[serde(default)]
    pub input_state: Option<StateSpec>,
    #[serde(default)]
    pub target_state: Option<StateSpec>,
    pub task: Task,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

/// A scenario with representations built and states validated.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub scenario: Scenario,
    pub setting: Setting,
    pub input: Option<DensityMatrix>,
    pub target: Option<DensityMatrix>,
    /// SHA-256 of the scenario bytes.
    pub hash: String,
}

/// Parses JSON, reporting schema errors with the JSON path of the offending field.
pub fn parse_scenario(text: &[u8]) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_slice(text);
    match serde_path_to_error::deserialize::<_, Scenario>(de) {
        Ok(s) => Ok(s),
        Err(e) => {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                bail!("schema violation: {inner}")
            }
            bail!("schema violation at {path}: {inner}")
        }
    }
}

fn state_at(spec: &Option<StateSpec>, field: &str, dim: usize) -> Result<Option<DensityMatrix>> {
    let Some(spec) = spec else { return Ok(None) };
    let state = spec.resolve().with_context(|| format!("invalid state at {field}"))?;
    if state.dim() != dim {
        bail!("invalid state at {field}: dimension {} does not match the representation dimension {dim}", state.dim());
    }
    Ok(Some(state))
}

/// Builds representations and checks every state and task parameter.
pub fn resolve(scenario: Scenario, text: &[u8]) -> Result<Resolved> {
    let input_rep = Representation::from_spec(&scenario.group).context("invalid representation at group")?;
    let output_rep = match &scenario.output_group {
        Some(spec) => Representation::from_spec(spec).context("invalid representation at output_group")?,
        None => input_rep.clone(),
    };
    let setting = Setting::new(input_rep, output_rep).context("invalid representation at output_group")?;
    let input = state_at(&scenario.input_state, "input_state", setting.input().dim())?;
    let target = state_at(&scenario.target_state, "target_state", setting.output().dim())?;
    let dr = setting.reference().dim();
    let needs = |ok: bool, what: &str| -> Result<()> {
        if ok {
            Ok(())
        } else {
            bail!("task {} requires {what}", scenario.task.name())
        }
    };
    match &scenario.task {
        Task::Hmin { eta, tau } => {
            state_at(&Some(eta.clone()), "task.eta", dr)?;
            state_at(tau, "task.tau", setting.input().dim())?;
            needs(tau.is_some() || input.is_some(), "task.tau or input_state")?;
        }
        Task::Feasible { surface } => {
            needs(input.is_some() && target.is_some(), "input_state and target_state")?;
            if let Some(s) = surface {
                s.states(dr).context("invalid surface at task.surface")?;
            }
        }
        Task::Smoothed { epsilon } => {
            needs(input.is_some() && target.is_some(), "input_state and target_state")?;
            if !(*epsilon > 0.0 && *epsilon < 0.5) {
                bail!("schema violation at task.epsilon: {epsilon} is outside (0, 1/2)");
            }
        }
        Task::DepolThreshold { p, q } => {
            needs(input.is_some() && target.is_some(), "input_state and target_state")?;
            for (name, v) in [("p", p), ("q", q)] {
                if let Some(v) = v {
                    if !(0.0..=1.0).contains(v) {
                        bail!("schema violation at task.{name}: {v} is outside [0, 1]");
                    }
                }
            }
        }
        Task::Modes { state } => {
            state_at(state, "task.state", setting.input().dim())?;
            needs(state.is_some() || input.is_some(), "task.state or input_state")?;
        }
        Task::RegionScan { quantity, grid } => {
            if grid.resolution < 2 {
                bail!("schema violation at task.grid.resolution: {} is below 2", grid.resolution);
            }
            if !(grid.extent > 0.0) {
                bail!("schema violation at task.grid.extent: must be positive");
            }
            if setting.input().dim() != 2 || setting.output().dim() != 2 {
                bail!("task region-scan sweeps the Bloch ball and needs qubit input and output");
            }
            match quantity {
                Quantity::TEta { eta } => {
                    state_at(&Some(eta.clone()), "task.quantity.eta", dr)?;
                    needs(input.is_some(), "input_state")?;
                }
                Quantity::Phi => needs(input.is_some(), "input_state")?,
                Quantity::Accessible { p, direction } => {
                    if !(0.0..=1.0).contains(p) {
                        bail!("schema violation at task.quantity.p: {p} is outside [0, 1]");
                    }
                    match direction {
                        Direction::FromInput => needs(input.is_some(), "input_state")?,
                        Direction::ToTarget => needs(target.is_some(), "target_state")?,
                    }
                }
            }
        }
        Task::Net { epsilon, dim } => {
            if !(*epsilon > 0.0) {
                bail!("schema violation at task.epsilon: must be positive");
            }
            if dim.unwrap_or(dr) >= 3 && scenario.seed.is_none() {
                bail!("task net in dimension three or more samples at random and requires seed");
            }
        }
    }
    if matches!(scenario.task, Task::Smoothed { .. }) && dr >= 3 && scenario.seed.is_none() {
        bail!("task smoothed in dimension three or more samples at random and requires seed");
    }
    let hash = Sha256::digest(text).iter().map(|b| format!("{b:02x}")).collect();
    Ok(Resolved { scenario, setting, input, target, hash })
}

/// Reads, parses and resolves a scenario file.
pub fn load(path: &std::path::Path, seed: Option<u64>) -> Result<Resolved> {
    let text = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut scenario = parse_scenario(&text)?;
    if seed.is_some() {
        scenario.seed = seed;
    }
    resolve(scenario, &text)
}
