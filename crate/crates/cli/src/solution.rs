//! Solution files: control nets with enough metadata to re-evaluate them
//! without the solver.
//!
//! Values are written in shortest round-trip decimal form, so reloading
//! reproduces every control point bit for bit.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rodplan::bernstein::BernsteinSurface;
use rodplan::cosserat::RodFields;
use rodplan::solver::SolveReport;
use rodplan::transcription::Scenario;
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "rodplan-solution";
pub const VERSION: u32 = 1;

/// Conventions needed to interpret the nets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub euler: String,
    pub frame: String,
    pub net_layout: String,
    pub units: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            euler: "roll phi, pitch theta, yaw psi; R = Rz(psi) Ry(theta) Rx(phi)".into(),
            frame: "l, h, v, omega are body-frame components; r is in the world frame".into(),
            net_layout: "control (i, j) at index (i * (n + 1) + j) * dim + k, i over s, j over t".into(),
            units: "SI: m, s, rad".into(),
        }
    }
}

/// One control net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetRecord {
    pub name: String,
    pub dim: usize,
    pub control: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format: String,
    pub version: u32,
    pub conventions: Conventions,
    /// Degrees `[m, n]` in `s` and `t`.
    pub degrees: [usize; 2],
    pub s_length: f64,
    pub t_final: f64,
    pub nets: Vec<NetRecord>,
    /// Scenario the nets were solved for, after command-line overrides.
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<SolveReport>,
}

const NAMES: [&str; 8] = ["r", "phi", "theta", "psi", "l", "h", "v", "omega"];

impl SolutionFile {
    pub fn new(fields: &RodFields<f64>, scenario: &Scenario, report: Option<SolveReport>) -> Self {
        let (m, n) = fields.degrees();
        let nets = fields
            .named()
            .iter()
            .map(|(name, f, dim)| NetRecord { name: (*name).into(), dim: *dim, control: f.net().to_vec() })
            .collect();
        Self {
            format: FORMAT.into(),
            version: VERSION,
            conventions: Conventions::default(),
            degrees: [m, n],
            s_length: fields.s_length(),
            t_final: fields.t_length(),
            nets,
            scenario: scenario.clone(),
            report,
        }
    }

    /// Rebuilds the rod fields, checking names, sizes and domains.
    pub fn fields(&self) -> Result<RodFields<f64>> {
        if self.format != FORMAT || self.version != VERSION {
            bail!("unsupported solution format {} v{}", self.format, self.version);
        }
        let names: Vec<&str> = self.nets.iter().map(|n| n.name.as_str()).collect();
        if names != NAMES {
            bail!("solution nets {names:?} do not match {NAMES:?}");
        }
        let [m, n] = self.degrees;
        let build = |k: usize| -> Result<BernsteinSurface<f64>> {
            let rec = &self.nets[k];
            BernsteinSurface::new(m, n, self.s_length, self.t_final, rec.dim, rec.control.clone())
                .with_context(|| format!("net {}", rec.name))
        };
        Ok(RodFields::new(build(0)?, build(1)?, build(2)?, build(3)?, build(4)?, build(5)?, build(6)?, build(7)?)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing solution {}", path.display()))
    }
}
