//! Scenario documents.
//!
//! ```json
//! {
//!   "masses": [1, 1, 1, 1],
//!   "positions": [[0, 0.7071], [0, 0], [0, 0], [0, -0.7071]],
//!   "velocities": [[0, 0], [-1.4142, 0], [1.4142, 0], [0, 0]],
//!   "potential": { "kind": "harmonic" },
//!   "integrator": { "method": "rk4", "dt": 0.001, "t_end": 6.283185307179586, "stride": 10 },
//!   "tolerances": { "cc": 1e-9, "inertia": 1e-8, "rigidity": 1e-6 }
//! }
//! ```
//!
//! `velocities` defaults to all zero, `potential` to harmonic and `tolerances` to the library
//! defaults. `integrator` is only required by commands that integrate. Unknown keys are rejected.

use harmonia::central_config::DEFAULT_CC_TOL;
use harmonia::dynamics::{IntegratorSpec, Method, DEFAULT_SAMPLE_STRIDE};
use harmonia::saari::{DEFAULT_INERTIA_TOL, DEFAULT_RIGIDITY_TOL};
use harmonia::{MassVector, PlanarConfiguration, Point, Potential};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Validation { field: field.into(), message: message.into() }
    }

    /// Name of the offending field for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            ScenarioError::Validation { field, .. } => Some(field),
            ScenarioError::Parse(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub cc: f64,
    pub inertia: f64,
    pub rigidity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { cc: DEFAULT_CC_TOL, inertia: DEFAULT_INERTIA_TOL, rigidity: DEFAULT_RIGIDITY_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub masses: MassVector,
    pub positions: PlanarConfiguration,
    pub velocities: Vec<Point>,
    pub potential: Potential,
    pub integrator: Option<IntegratorSpec>,
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn integrator(&self) -> Result<IntegratorSpec, ScenarioError> {
        self.integrator.ok_or_else(|| ScenarioError::invalid("integrator", "this command needs an integrator block"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    masses: Option<Vec<f64>>,
    positions: Option<Vec<[f64; 2]>>,
    velocities: Option<Vec<[f64; 2]>>,
    potential: Option<RawPotential>,
    integrator: Option<RawIntegrator>,
    tolerances: Option<RawTolerances>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PotentialKind {
    Harmonic,
    Newtonian,
    Power,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    kind: PotentialKind,
    exponent: Option<f64>,
    coupling: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MethodName {
    Verlet,
    Rk4,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    method: MethodName,
    dt: f64,
    t_end: f64,
    stride: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    cc: Option<f64>,
    inertia: Option<f64>,
    rigidity: Option<f64>,
}

fn points(field: &str, raw: &[[f64; 2]]) -> Result<Vec<Point>, ScenarioError> {
    raw.iter()
        .enumerate()
        .map(|(i, p)| {
            if p[0].is_finite() && p[1].is_finite() {
                Ok(Point::new(p[0], p[1]))
            } else {
                Err(ScenarioError::invalid(format!("{field}[{i}]"), "coordinates must be finite"))
            }
        })
        .collect()
}

fn positive(field: &str, value: f64) -> Result<f64, ScenarioError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ScenarioError::invalid(field, format!("must be positive, got {value}")))
    }
}

pub fn parse_scenario(text: &[u8]) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = serde_json::from_slice(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;

    let masses = raw.masses.ok_or_else(|| ScenarioError::invalid("masses", "missing"))?;
    for (i, m) in masses.iter().enumerate() {
        positive(&format!("masses[{i}]"), *m)?;
    }
    if masses.len() < 2 {
        return Err(ScenarioError::invalid("masses", "need at least two bodies"));
    }
    let n = masses.len();
    let masses = MassVector::new(masses).map_err(|e| ScenarioError::invalid("masses", e.to_string()))?;

    let positions = raw.positions.ok_or_else(|| ScenarioError::invalid("positions", "missing"))?;
    if positions.len() != n {
        return Err(ScenarioError::invalid("positions", format!("expected {n} points, got {}", positions.len())));
    }
    let positions = PlanarConfiguration::new(points("positions", &positions)?)
        .map_err(|e| ScenarioError::invalid("positions", e.to_string()))?;

    let velocities = match raw.velocities {
        Some(v) if v.len() != n => {
            return Err(ScenarioError::invalid("velocities", format!("expected {n} vectors, got {}", v.len())))
        }
        Some(v) => points("velocities", &v)?,
        None => vec![Point::zeros(); n],
    };

    let potential = match raw.potential {
        None => Potential::Harmonic,
        Some(p) => match p.kind {
            PotentialKind::Power => {
                let exponent = p.exponent.ok_or_else(|| ScenarioError::invalid("potential.exponent", "missing"))?;
                if !exponent.is_finite() || exponent == 0.0 {
                    return Err(ScenarioError::invalid("potential.exponent", "must be finite and nonzero"));
                }
                let coupling = positive("potential.coupling", p.coupling.unwrap_or(1.0))?;
                Potential::Power { exponent, coupling }
            }
            kind => {
                if p.exponent.is_some() {
                    return Err(ScenarioError::invalid("potential.exponent", "only valid for kind \"power\""));
                }
                if p.coupling.is_some() {
                    return Err(ScenarioError::invalid("potential.coupling", "only valid for kind \"power\""));
                }
                match kind {
                    PotentialKind::Newtonian => Potential::Newtonian,
                    _ => Potential::Harmonic,
                }
            }
        },
    };

    let integrator = match raw.integrator {
        None => None,
        Some(i) => {
            let dt = positive("integrator.dt", i.dt)?;
            let t_end = positive("integrator.t_end", i.t_end)?;
            if t_end < dt {
                return Err(ScenarioError::invalid("integrator.t_end", "must be at least dt"));
            }
            let stride = i.stride.unwrap_or(DEFAULT_SAMPLE_STRIDE);
            if stride == 0 {
                return Err(ScenarioError::invalid("integrator.stride", "must be positive"));
            }
            let method = match i.method {
                MethodName::Verlet => Method::VelocityVerlet,
                MethodName::Rk4 => Method::Rk4,
            };
            Some(
                IntegratorSpec::with_stride(method, dt, t_end, stride)
                    .map_err(|e| ScenarioError::invalid("integrator", e.to_string()))?,
            )
        }
    };

    let mut tolerances = Tolerances::default();
    if let Some(t) = raw.tolerances {
        if let Some(v) = t.cc {
            tolerances.cc = positive("tolerances.cc", v)?;
        }
        if let Some(v) = t.inertia {
            tolerances.inertia = positive("tolerances.inertia", v)?;
        }
        if let Some(v) = t.rigidity {
            tolerances.rigidity = positive("tolerances.rigidity", v)?;
        }
    }

    Ok(Scenario { masses, positions, velocities, potential, integrator, tolerances })
}
