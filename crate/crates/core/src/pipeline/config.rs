//! Flat `key = value` configuration for the tracker.
//!
//! Keys: `input`, `format` (`mot-csv`|`points-csv`), `solver`
//! (`cinda`|`ssp`|`dssp`), `iterations`, `output`, `report`, `p_enter` and
//! `p_exit` (a probability or `counts`), `beta` (`per-detection` or a
//! probability), `observation` (`bernoulli`|`force-all`), `gating_k`,
//! `jump_window`, `distance_scale`, `cost_scale`, `arc_fixing`
//! (`true`|`false`). Blank lines and `#` comments are ignored.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::costs::{BetaPolicy, CostModelConfig, EndpointProbability, ObservationRule};
use crate::error::PipelineError;

use super::ingest::InputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    #[default]
    Cinda,
    Ssp,
    Dssp,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Cinda, SolverKind::Ssp, SolverKind::Dssp];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Cinda => "cinda",
            SolverKind::Ssp => "ssp",
            SolverKind::Dssp => "dssp",
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown solver {s:?} (expected cinda, ssp or dssp)"))
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackConfig {
    pub input: Option<PathBuf>,
    pub format: InputFormat,
    pub solver: SolverKind,
    pub iterations: usize,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub costs: CostModelConfig<f64>,
    pub arc_fixing: bool,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig {
            input: None,
            format: InputFormat::default(),
            solver: SolverKind::default(),
            iterations: 1,
            output: None,
            report: None,
            costs: CostModelConfig::default(),
            arc_fixing: true,
        }
    }
}

fn probability(key: &str, value: &str) -> Result<f64, String> {
    match value.parse::<f64>() {
        Ok(p) if (0.0..=1.0).contains(&p) => Ok(p),
        _ => Err(format!("{key} must be a probability in [0, 1], got {value:?}")),
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key}"))
}

impl TrackConfig {
    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let c = &mut self.costs;
        match key {
            "input" => self.input = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "solver" => self.solver = value.parse()?,
            "iterations" => self.iterations = parse(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "report" => self.report = Some(PathBuf::from(value)),
            "p_enter" | "p_exit" => {
                let p = if value == "counts" {
                    EndpointProbability::FromCounts
                } else {
                    EndpointProbability::Fixed(probability(key, value)?)
                };
                if key == "p_enter" {
                    c.p_enter = p;
                } else {
                    c.p_exit = p;
                }
            }
            "beta" => {
                c.beta = if value == "per-detection" {
                    BetaPolicy::PerDetection
                } else {
                    BetaPolicy::Global(probability(key, value)?)
                }
            }
            "observation" => {
                c.observation = match value {
                    "bernoulli" => ObservationRule::Bernoulli,
                    "force-all" => ObservationRule::ForceAll,
                    _ => return Err(format!("observation must be bernoulli or force-all, got {value:?}")),
                }
            }
            "gating_k" => c.gating_k = parse(key, value)?,
            "jump_window" => c.jump_window = parse(key, value)?,
            "distance_scale" => c.distance_scale = parse(key, value)?,
            "cost_scale" => c.cost_scale = parse(key, value)?,
            "arc_fixing" => self.arc_fixing = parse(key, value)?,
            _ => return Err(format!("unknown configuration key {key:?}")),
        }
        Ok(())
    }

    pub fn parse_str(text: &str, label: &str) -> Result<Self, PipelineError> {
        let mut cfg = TrackConfig::default();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| PipelineError::Parse {
                path: label.to_string(),
                line: i + 1,
                msg,
            };
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            cfg.set(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse_str(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.iterations == 0 {
            return Err(PipelineError::Config("iterations must be at least 1".into()));
        }
        self.costs
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))
    }
}

impl fmt::Display for TrackConfig {
    /// Echo in the file format (paths omitted when unset).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.costs;
        let endpoint = |p: EndpointProbability<f64>| match p {
            EndpointProbability::Fixed(p) => p.to_string(),
            EndpointProbability::FromCounts => "counts".into(),
        };
        if let Some(p) = &self.input {
            writeln!(f, "input = {}", p.display())?;
        }
        writeln!(f, "format = {}", self.format)?;
        writeln!(f, "solver = {}", self.solver)?;
        writeln!(f, "iterations = {}", self.iterations)?;
        writeln!(f, "p_enter = {}", endpoint(c.p_enter))?;
        writeln!(f, "p_exit = {}", endpoint(c.p_exit))?;
        match c.beta {
            BetaPolicy::PerDetection => writeln!(f, "beta = per-detection")?,
            BetaPolicy::Global(b) => writeln!(f, "beta = {b}")?,
        }
        let obs = match c.observation {
            ObservationRule::Bernoulli => "bernoulli",
            ObservationRule::ForceAll => "force-all",
        };
        writeln!(f, "observation = {obs}")?;
        writeln!(f, "gating_k = {}", c.gating_k)?;
        writeln!(f, "jump_window = {}", c.jump_window)?;
        writeln!(f, "distance_scale = {}", c.distance_scale)?;
        writeln!(f, "cost_scale = {}", c.cost_scale)?;
        write!(f, "arc_fixing = {}", self.arc_fixing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_echoes() {
        let text = "# run\nsolver = ssp\niterations=3\np_enter = 0.2\nbeta = 0.3 # global\n";
        let cfg = TrackConfig::parse_str(text, "c.cfg").unwrap();
        assert_eq!(cfg.solver, SolverKind::Ssp);
        assert_eq!(cfg.iterations, 3);
        assert_eq!(cfg.costs.p_enter, EndpointProbability::Fixed(0.2));
        assert_eq!(cfg.costs.beta, BetaPolicy::Global(0.3));
        let again = TrackConfig::parse_str(&cfg.to_string(), "echo").unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match TrackConfig::parse_str("solver = cinda\nwhat = 1\n", "c.cfg") {
            Err(PipelineError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(TrackConfig::parse_str("p_exit = 1.5\n", "c").is_err());
    }

    #[test]
    fn zero_iterations_rejected() {
        let mut cfg = TrackConfig::default();
        cfg.iterations = 0;
        assert!(matches!(cfg.validate(), Err(PipelineError::Config(_))));
    }
}
