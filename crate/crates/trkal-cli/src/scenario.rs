//! Scenario file schema, `--set` overrides and validation.
//!
//! A scenario is one JSON document holding the energy-density descriptor and
//! one block per subcommand. Everything a run needs is in the file, so a run
//! is reproducible from its manifest (which embeds the final document hash).

use serde::Deserialize;
use serde_json::Value;
use trkal::{EnergyDensity, TrigPoly2D};

#[derive(Debug)]
pub enum CliError {
    /// Scenario or precondition problems: exit code 2.
    Validation(String),
    /// Failures while running a validated scenario: exit code 3.
    Runtime(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation: {m}"),
            CliError::Runtime(m) => write!(f, "runtime: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

type TermList = Vec<(i32, i32, f64, f64)>;

fn default_b0() -> f64 {
    1.0
}

fn default_max_degree() -> i32 {
    2
}

fn default_tol() -> f64 {
    1e-8
}

fn default_stop_radius() -> f64 {
    1e-3
}

fn default_max_step() -> f64 {
    0.05
}

fn default_seed_offset() -> f64 {
    1e-4
}

fn default_scan_n() -> usize {
    16
}

fn default_newton_tol() -> f64 {
    1e-12
}

fn default_samples() -> usize {
    50
}

fn default_stride() -> usize {
    1
}

fn default_nr() -> usize {
    16
}

fn default_nphi() -> usize {
    64
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySpec {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(default = "default_b0")]
    pub b0: f64,
    /// Long-wavelength degree cap for the modulations.
    #[serde(default = "default_max_degree")]
    pub max_degree: i32,
    #[serde(default)]
    pub gamma0: TermList,
    #[serde(default)]
    pub gamma1: TermList,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletSpec {
    pub gamma0: f64,
    pub gamma1: f64,
    #[serde(default)]
    pub delta: f64,
    /// Optional sinusoidal part of δ(t): amplitude, angular frequency, phase.
    #[serde(default)]
    pub delta_sin: Option<(f64, f64, f64)>,
    pub t_end: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    pub starts: Vec<(f64, f64)>,
    /// "ascend" | "descend" for gradient lines, "streamline" for the full
    /// system seeded at the quasi-stationary angle.
    pub mode: String,
    pub tau_max: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_stop_radius")]
    pub stop_radius: f64,
    #[serde(default = "default_max_step")]
    pub max_step: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    #[serde(default = "default_scan_n")]
    pub scan_n: usize,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_seed_offset")]
    pub seed_offset: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_stop_radius")]
    pub stop_radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    #[serde(default)]
    pub phi_init: TermList,
    #[serde(default)]
    pub dphi_init: TermList,
    pub tau_end: f64,
    pub cutoff: i32,
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Re-run at twice the cutoff and record the relative difference.
    #[serde(default)]
    pub report_cutoff_sensitivity: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LateTimeSpec {
    pub delta_init: TermList,
    pub tau1: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollinearitySpec {
    #[serde(default = "default_scan_n")]
    pub n_xy: usize,
    #[serde(default = "default_scan_n")]
    pub n_z: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VorticitySpec {
    pub r_min: f64,
    pub r_max: f64,
    #[serde(default = "default_nr")]
    pub n_r: usize,
    #[serde(default = "default_nphi")]
    pub n_phi: usize,
    #[serde(default = "default_scan_n")]
    pub scan_n: usize,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    /// When present, also evaluate the collinearity defect (requires the
    /// `phase` block for the upward velocity).
    #[serde(default)]
    pub collinearity: Option<CollinearitySpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSpec {
    pub cases: Vec<String>,
    #[serde(default = "default_validate_n")]
    pub n: usize,
    #[serde(default = "default_validate_r")]
    pub reynolds: f64,
    #[serde(default = "default_k_fast")]
    pub k_fast: usize,
}

fn default_validate_n() -> usize {
    32
}

fn default_validate_r() -> f64 {
    50.0
}

fn default_k_fast() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_reynolds")]
    pub reynolds: f64,
    pub energy: EnergySpec,
    #[serde(default)]
    pub triplet: Option<TripletSpec>,
    #[serde(default)]
    pub trace: Option<TraceSpec>,
    #[serde(default)]
    pub topology: Option<TopologySpec>,
    #[serde(default)]
    pub phase: Option<PhaseSpec>,
    #[serde(default)]
    pub latetime: Option<LateTimeSpec>,
    #[serde(default)]
    pub vorticity: Option<VorticitySpec>,
    #[serde(default)]
    pub validate: Option<ValidateSpec>,
}

fn default_reynolds() -> f64 {
    1e4
}

/// Apply one `--set path.to.key=value` override to the raw document. Values
/// parse as JSON when possible, otherwise as strings.
pub fn apply_override(doc: &mut Value, spec: &str) -> CliResult<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::validation(format!("--set needs key=value, got {spec:?}")))?;
    let value = serde_json::from_str(raw).unwrap_or(Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            match node {
                Value::Object(map) => {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                _ => {
                    return Err(CliError::validation(format!(
                        "--set {path}: parent is not an object"
                    )))
                }
            }
        }
        node = match node {
            Value::Object(map) => map
                .entry(part.to_string())
                .or_insert(Value::Object(serde_json::Map::new())),
            _ => {
                return Err(CliError::validation(format!(
                    "--set {path}: {part} is not an object"
                )))
            }
        };
    }
    unreachable!("split never yields an empty path")
}

/// Parsed scenario plus the final raw document (for hashing) and any
/// loader warnings.
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub energy: EnergyDensity,
    pub document: Value,
    pub warnings: Vec<String>,
}

pub fn load_scenario(text: &str, overrides: &[String]) -> CliResult<LoadedScenario> {
    let mut document: Value = serde_json::from_str(text)
        .map_err(|e| CliError::validation(format!("scenario is not valid JSON: {e}")))?;
    for o in overrides {
        apply_override(&mut document, o)?;
    }
    let scenario: Scenario = serde_json::from_value(document.clone())
        .map_err(|e| CliError::validation(format!("scenario schema: {e}")))?;
    if !(scenario.reynolds > 1.0) {
        return Err(CliError::validation(format!(
            "reynolds {} must exceed 1",
            scenario.reynolds
        )));
    }

    let energy_doc = serde_json::json!({
        "A": scenario.energy.a,
        "b0": scenario.energy.b0,
        "gamma0": scenario.energy.gamma0.iter().map(|t| serde_json::json!([t.0, t.1, t.2, t.3])).collect::<Vec<_>>(),
        "gamma1": scenario.energy.gamma1.iter().map(|t| serde_json::json!([t.0, t.1, t.2, t.3])).collect::<Vec<_>>(),
    });
    let (energy, warnings) = EnergyDensity::from_json(&energy_doc)
        .map_err(|e| CliError::validation(format!("energy density: {e}")))?;
    if energy.degree() > scenario.energy.max_degree {
        return Err(CliError::validation(format!(
            "modulation degree {} exceeds the long-wavelength cap max_degree = {}",
            energy.degree(),
            scenario.energy.max_degree
        )));
    }
    validate_blocks(&scenario)?;
    Ok(LoadedScenario {
        scenario,
        energy,
        document,
        warnings,
    })
}

/// Checks that run before any computation starts: every referenced block
/// must satisfy its module preconditions.
fn validate_blocks(s: &Scenario) -> CliResult<()> {
    if let Some(t) = &s.triplet {
        if !(t.tol > 0.0) || !(t.t_end >= 0.0) || t.samples == 0 {
            return Err(CliError::validation("triplet: need tol > 0, t_end ≥ 0, samples ≥ 1"));
        }
    }
    if let Some(t) = &s.trace {
        if t.starts.is_empty() {
            return Err(CliError::validation("trace: needs at least one start"));
        }
        if !matches!(t.mode.as_str(), "ascend" | "descend" | "streamline") {
            return Err(CliError::validation(format!(
                "trace: mode {:?} is not ascend|descend|streamline",
                t.mode
            )));
        }
        if !(t.tol > 0.0 && t.tau_max > 0.0 && t.stop_radius > 0.0) {
            return Err(CliError::validation("trace: tolerances must be positive"));
        }
    }
    if let Some(t) = &s.topology {
        if !(t.newton_tol > 0.0 && t.seed_offset > 0.0) {
            return Err(CliError::validation("topology: tolerances must be positive"));
        }
    }
    if let Some(p) = &s.phase {
        if !(p.dt > 0.0 && p.tau_end >= 0.0 && p.cutoff >= 1) || p.snapshot_stride == 0 {
            return Err(CliError::validation(
                "phase: need dt > 0, tau_end ≥ 0, cutoff ≥ 1, snapshot_stride ≥ 1",
            ));
        }
    }
    if let Some(v) = &s.vorticity {
        if !(v.r_min > 0.0 && v.r_max > v.r_min && v.n_r >= 2 && v.n_phi >= 8) {
            return Err(CliError::validation(
                "vorticity: need 0 < r_min < r_max, n_r ≥ 2, n_phi ≥ 8",
            ));
        }
        if let Some(c) = &v.collinearity {
            if s.phase.is_none() {
                return Err(CliError::validation(
                    "vorticity.collinearity requires the phase block",
                ));
            }
            if c.n_z < 16 {
                return Err(CliError::validation("vorticity.collinearity: n_z ≥ 16"));
            }
        }
    }
    if let Some(v) = &s.validate {
        if v.cases.is_empty() {
            return Err(CliError::validation("validate: empty case list"));
        }
        for c in &v.cases {
            if !matches!(
                c.as_str(),
                "trkal" | "triplet" | "modes" | "random" | "residual_scaling"
            ) {
                return Err(CliError::validation(format!("validate: unknown case {c:?}")));
            }
        }
        if !v.n.is_power_of_two() || v.n < 8 {
            return Err(CliError::validation("validate: n must be a power of two ≥ 8"));
        }
    }
    Ok(())
}

pub fn poly_from_terms(terms: &[(i32, i32, f64, f64)]) -> (TrigPoly2D, f64) {
    TrigPoly2D::from_term_list(terms)
}
