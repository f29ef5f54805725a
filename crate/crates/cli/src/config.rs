//! Scenario files: TOML documents mapping one-to-one onto [`Scenario`].
//!
//! Units are SI throughout (m, s, rad). Unknown keys are rejected, and all
//! schema problems are reported together.

use std::path::Path;

use anyhow::{Context, Result};
use rodplan::transcription::Scenario;

/// Every problem found while loading a scenario.
#[derive(Debug, thiserror::Error)]
#[error("invalid scenario:\n  {}", .0.join("\n  "))]
pub struct SchemaError(pub Vec<String>);

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: toml::Table = text.parse().map_err(|e: toml::de::Error| SchemaError(vec![e.to_string().trim().into()]))?;
    let sc: Scenario = toml::Value::Table(raw.clone())
        .try_into()
        .map_err(|e: toml::de::Error| SchemaError(vec![e.to_string().trim().into()]))?;
    // every field serializes back, so input keys missing from the
    // round trip are exactly the ones serde skipped
    let known = toml::Value::try_from(&sc)?;
    let mut unknown = Vec::new();
    unknown_keys(&toml::Value::Table(raw), &known, String::new(), &mut unknown);
    check(sc, unknown.into_iter().map(|k| format!("unknown key `{k}`")).collect())
}

fn unknown_keys(input: &toml::Value, known: &toml::Value, path: String, out: &mut Vec<String>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match (input, known) {
        (toml::Value::Table(a), toml::Value::Table(b)) => {
            for (k, v) in a {
                match b.get(k) {
                    Some(w) => unknown_keys(v, w, join(k), out),
                    None => out.push(join(k)),
                }
            }
        }
        (toml::Value::Array(a), toml::Value::Array(b)) => {
            for (i, (v, w)) in a.iter().zip(b).enumerate() {
                unknown_keys(v, w, format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

fn check(sc: Scenario, mut errs: Vec<String>) -> Result<Scenario> {
    match sc.validate() {
        Ok(()) => {}
        Err(rodplan::Error::Validation(more)) => errs.extend(more),
        Err(e) => errs.push(e.to_string()),
    }
    if errs.is_empty() {
        Ok(sc)
    } else {
        Err(SchemaError(errs).into())
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading scenario {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("loading scenario {}", path.display()))
}

pub fn to_toml(sc: &Scenario) -> Result<String> {
    Ok(toml::to_string(sc)?)
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub agents: Option<usize>,
    pub order: Option<[usize; 2]>,
    pub max_depth: Option<usize>,
    /// Equality and inequality tolerance of the solver.
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl Overrides {
    /// Applies the overrides and revalidates.
    pub fn apply(&self, mut sc: Scenario) -> Result<Scenario> {
        if let Some(n) = self.agents {
            sc.agents = n;
        }
        if let Some(o) = self.order {
            sc.order = o;
            // a grid sized for the old order would no longer match
            sc.grid = None;
        }
        if let Some(d) = self.max_depth {
            sc.clearance_depth = d;
        }
        if let Some(t) = self.tol {
            sc.solver.equality_tolerance = t;
            sc.solver.inequality_tolerance = t;
        }
        if let Some(s) = self.seed {
            sc.seed = s;
        }
        if let Some(k) = self.samples {
            sc.samples = k;
        }
        check(sc, Vec::new())
    }
}

/// Bundled scenario files.
pub mod bundled {
    pub const CASE1: &str = include_str!("../scenarios/case1.toml");
    pub const CASE2: &str = include_str!("../scenarios/case2.toml");
    pub const LINE_TO_LINE: &str = include_str!("../scenarios/line_to_line.toml");

    /// Looks up a bundled scenario by name.
    pub fn get(name: &str) -> Option<&'static str> {
        match name {
            "case1" => Some(CASE1),
            "case2" => Some(CASE2),
            "line_to_line" => Some(LINE_TO_LINE),
            _ => None,
        }
    }
}
