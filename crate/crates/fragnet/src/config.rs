//! JSON configuration shared by every subcommand.
//!
//! ```json
//! {
//!   "sim": { "group_size": 50, "iterations": 500, "seed": 0, "diversity": { "sigma_d": 0.0 } },
//!   "sweep": { "sigma_values": [0, 0.1, 0.2, 0.3, 0.4, 0.5], "runs_per_cell": 100 }
//! }
//! ```
//!
//! Every key is optional and unknown keys are rejected. `sim.seed` is the
//! run seed for `run` and the master seed for `sweep`. Command-line flags
//! override file values.

use std::path::Path;

use fragnet_core::sweep::DEFAULT_SIGMA_VALUES;
use fragnet_core::{SimConfig, SweepSpec};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PARALLEL_ENV: &str = "FRAGNET_PARALLEL";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub sim: SimConfig,
    pub sweep: SweepSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub sigma_values: Vec<f64>,
    pub runs_per_cell: u32,
    /// Worker count; see [`CliConfig::resolve_parallelism`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<usize>,
    pub record_timing: bool,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            sigma_values: DEFAULT_SIGMA_VALUES.to_vec(),
            runs_per_cell: 100,
            parallelism: None,
            record_timing: false,
        }
    }
}

impl CliConfig {
    /// Parses a config file. A missing file is an [`Error::Io`] naming it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_string(),
            line: e.line() as u64,
            column: e.column() as u64,
            message: e.to_string(),
        })
    }

    /// Fixes `sweep.parallelism` to a concrete worker count. Precedence:
    /// `flag`, then `env` (the value of `FRAGNET_PARALLEL`), then the file,
    /// then the number of available cores.
    pub fn resolve_parallelism(&mut self, flag: Option<usize>, env: Option<&str>) -> Result<()> {
        let n = match (flag, env, self.sweep.parallelism) {
            (Some(n), _, _) => n,
            (None, Some(v), _) => v.trim().parse::<usize>().map_err(|_| {
                Error::Input(format!("{PARALLEL_ENV} must be a positive integer, got {v:?}"))
            })?,
            (None, None, Some(n)) => n,
            (None, None, None) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        self.sweep.parallelism = Some(n);
        Ok(())
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            sigma_values: self.sweep.sigma_values.clone(),
            runs_per_cell: self.sweep.runs_per_cell,
            base: self.sim.clone(),
            master_seed: self.sim.seed,
            parallelism: self.sweep.parallelism.unwrap_or(1),
            record_timing: self.sweep.record_timing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.sweep_spec().validate()?;
        Ok(())
    }

    /// Single-line JSON echo of the resolved config.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(CliConfig::parse("{}", "c.json").unwrap(), CliConfig::default());
        let c = CliConfig::parse(r#"{"sim":{"diversity":{"sigma_d":0.3}}}"#, "c.json").unwrap();
        assert_eq!(c.sim.diversity.sigma_d, 0.3);
        assert_eq!(c.sim.diversity.mean_d, 0.5);
    }

    #[test]
    fn unknown_keys_rejected_with_position() {
        let err = CliConfig::parse("{\n  \"sim\": {\"iteratons\": 3}\n}", "c.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("c.json:2:") && msg.contains("iteratons"), "{msg}");
        assert!(CliConfig::parse(r#"{"extra":1}"#, "c.json").is_err());
    }

    #[test]
    fn echo_parses_back() {
        let mut c = CliConfig::default();
        c.sim.seed = u64::MAX;
        c.resolve_parallelism(Some(3), None).unwrap();
        let back = CliConfig::parse(&c.to_json_line(), "echo").unwrap();
        assert_eq!(back, c);
        assert!(!c.to_json_line().contains('\n'));
    }

    #[test]
    fn parallelism_precedence() {
        let mut c = CliConfig::default();
        c.sweep.parallelism = Some(2);
        let resolved = |c: &CliConfig, flag, env| {
            let mut c = c.clone();
            c.resolve_parallelism(flag, env).map(|_| c.sweep.parallelism.unwrap())
        };
        assert_eq!(resolved(&c, Some(9), Some("5")).unwrap(), 9);
        assert_eq!(resolved(&c, None, Some("5")).unwrap(), 5);
        assert_eq!(resolved(&c, None, None).unwrap(), 2);
        assert!(resolved(&CliConfig::default(), None, None).unwrap() >= 1);
        assert!(resolved(&c, None, Some("many")).is_err());
    }
}
