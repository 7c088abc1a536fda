//! Run configuration: model parameters plus harness keys in one flat
//! key-value file.
//!
//! ```text
//! n_agents = 10000
//! rho0 = 0.04
//! kappa = 0.6
//! replicates = 100
//! variants = ["global", "local"]
//! row_axis = "kappa"
//! row_values = [0.2, 0.5, 0.8]
//! col_axis = "expected_susceptibles"
//! col_values = [1, 2, 4, 8]
//! surface_iters = 150
//! ```

use std::path::Path;

use super::{Axis, HarnessError, SweepSpec, DEFAULT_REPLICATES, SURFACE_ITERS};
use crate::grr::Variant;
use crate::params::{ParamError, SimParams};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SimParams,
    pub replicates: usize,
    pub variants: Vec<Variant>,
    pub axes: Vec<Axis>,
    pub surface_iters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SimParams::default(),
            replicates: DEFAULT_REPLICATES,
            variants: Variant::ALL.to_vec(),
            axes: Vec::new(),
            surface_iters: SURFACE_ITERS,
        }
    }
}

fn number(key: &str, v: &toml::Value) -> Result<f64, String> {
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| format!("{key}: expected a number"))
}

fn count(key: &str, v: &toml::Value) -> Result<usize, String> {
    v.as_integer()
        .filter(|&i| i >= 1)
        .map(|i| i as usize)
        .ok_or_else(|| format!("{key}: expected a positive integer"))
}

fn array<'a>(key: &str, v: &'a toml::Value) -> Result<&'a Vec<toml::Value>, String> {
    v.as_array().ok_or_else(|| format!("{key}: expected a list"))
}

impl RunConfig {
    pub fn from_kv_str(text: &str) -> Result<Self, String> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
        let mut cfg = RunConfig::default();
        let mut axis_names: [Option<String>; 2] = [None, None];
        let mut axis_values: [Option<Vec<f64>>; 2] = [None, None];
        for (key, value) in &table {
            match key.as_str() {
                "replicates" => cfg.replicates = count(key, value)?,
                "surface_iters" => cfg.surface_iters = count(key, value)?,
                "variants" => {
                    cfg.variants = array(key, value)?
                        .iter()
                        .map(|v| {
                            v.as_str()
                                .ok_or_else(|| format!("{key}: expected strings"))?
                                .parse()
                        })
                        .collect::<Result<_, String>>()?;
                }
                "row_axis" | "col_axis" => {
                    let slot = usize::from(key == "col_axis");
                    let name = value
                        .as_str()
                        .ok_or_else(|| format!("{key}: expected a parameter name"))?;
                    axis_names[slot] = Some(name.to_string());
                }
                "row_values" | "col_values" => {
                    let slot = usize::from(key == "col_values");
                    let vals = array(key, value)?
                        .iter()
                        .map(|v| number(key, v))
                        .collect::<Result<_, _>>()?;
                    axis_values[slot] = Some(vals);
                }
                _ => cfg.params.set_field(key, value)?,
            }
        }
        if axis_names[0].is_none() && axis_names[1].is_some() {
            return Err("col_axis given without row_axis".into());
        }
        for (name, values) in axis_names.into_iter().zip(axis_values) {
            match (name, values) {
                (Some(n), Some(v)) => cfg.axes.push(Axis::new(n, v)),
                (None, None) => {}
                (Some(n), None) => return Err(format!("axis `{n}` has no values")),
                (None, Some(_)) => return Err("axis values given without an axis name".into()),
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| {
            HarnessError::Param(ParamError::Io {
                path: path.display().to_string(),
                source,
            })
        })?;
        Self::from_kv_str(&text).map_err(|message| {
            HarnessError::Param(ParamError::Parse {
                path: path.display().to_string(),
                message,
            })
        })
    }

    pub fn sweep(&self) -> SweepSpec {
        let mut s = SweepSpec::new(self.params, self.axes.clone(), self.replicates);
        s.n_iters = self.surface_iters;
        s
    }
}
