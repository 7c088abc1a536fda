//! Model parameters, validation and the deterministic random stream.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Side length of the simulation domain. The domain is always the unit square.
pub const DOMAIN_SIDE: f64 = 1.0;

/// Area of the simulation domain.
pub const DOMAIN_AREA: f64 = DOMAIN_SIDE * DOMAIN_SIDE;

/// Scalar parameters of the epidemic agent-based model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    /// Number of agents.
    pub n_agents: usize,
    /// Infectivity radius.
    pub rho0: f64,
    /// Contact tolerance: probability that a covered susceptible is *not* infected.
    pub kappa: f64,
    /// Iterations spent infected.
    pub t_infect: u32,
    /// Iterations spent recovered before becoming susceptible again.
    pub t_recover: u32,
    /// Random-walk step length.
    pub dr: f64,
    /// Number of iterations to run.
    pub n_iters: usize,
    pub seed: u64,
    #[serde(default = "default_domain_side")]
    pub domain_side: f64,
}

fn default_domain_side() -> f64 {
    DOMAIN_SIDE
}

impl Default for SimParams {
    /// The wave-spreading configuration: N=10000, κ=0.95, ρ₀=0.04, T_I=T_R=30, Δr=0.001.
    fn default() -> Self {
        Self {
            n_agents: 10_000,
            rho0: 0.04,
            kappa: 0.95,
            t_infect: 30,
            t_recover: 30,
            dr: 0.001,
            n_iters: 500,
            seed: 1,
            domain_side: DOMAIN_SIDE,
        }
    }
}

/// A single failed parameter invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("invalid parameters: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("cannot read parameter file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse parameter file {path}: {message}")]
    Parse { path: String, message: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl ParamError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ParamError::Invalid(v) => v,
            _ => &[],
        }
    }
}

impl SimParams {
    /// Ratio T_R / T_I.
    pub fn q(&self) -> f64 {
        f64::from(self.t_recover) / f64::from(self.t_infect)
    }

    /// Area of one infectivity neighborhood, π ρ₀².
    pub fn neighborhood_area(&self) -> f64 {
        std::f64::consts::PI * self.rho0 * self.rho0
    }

    /// Expected number of susceptibles inside the initial infected agent's
    /// neighborhood at t = 0.
    pub fn expected_initial_susceptibles(&self) -> f64 {
        (self.n_agents as f64 - 1.0) * self.neighborhood_area() / DOMAIN_AREA
    }

    /// Checks every invariant and returns the parameters unchanged, or the
    /// full list of violations.
    pub fn validate(self) -> Result<Self, ParamError> {
        let mut out = Vec::new();
        let mut bad = |field, message: &str| {
            out.push(Violation {
                field,
                message: message.to_string(),
            })
        };
        if !(0.0..=1.0).contains(&self.kappa) {
            bad("kappa", "kappa out of [0,1]");
        }
        if self.n_agents < 2 {
            bad(
                "n_agents",
                "need at least one susceptible and one infected (n_agents >= 2)",
            );
        }
        if self.domain_side != DOMAIN_SIDE {
            bad("domain_side", "domain is fixed to the unit square (1.0)");
        }
        // Negated comparisons so NaN is rejected too.
        if !(self.rho0 >= 0.0 && self.rho0 < 0.5 * DOMAIN_SIDE) {
            bad("rho0", "rho0 out of [0, 0.5)");
        }
        if !(self.dr >= 0.0 && self.dr < 0.1 * DOMAIN_SIDE) {
            bad("dr", "dr out of [0, 0.1): step must be small against the domain");
        }
        if self.t_infect < 1 {
            bad("t_infect", "t_infect must be >= 1");
        }
        if self.t_recover < 1 {
            bad("t_recover", "t_recover must be >= 1");
        }
        if out.is_empty() {
            Ok(self)
        } else {
            Err(ParamError::Invalid(out))
        }
    }

    /// Reads a flat `key = value` parameter file. Keys absent from the file
    /// keep their [`Default`] values.
    pub fn from_file(path: &Path) -> Result<Self, ParamError> {
        let text = std::fs::read_to_string(path).map_err(|source| ParamError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_kv_str(&text).map_err(|message| ParamError::Parse {
            path: path.display().to_string(),
            message,
        })
    }

    /// Parses the flat key-value text. Unknown keys are rejected.
    pub fn from_kv_str(text: &str) -> Result<Self, String> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
        let mut p = SimParams::default();
        for (key, value) in &table {
            p.set_field(key, value)?;
        }
        Ok(p)
    }

    /// Serializes as the same flat key-value text accepted by
    /// [`SimParams::from_kv_str`].
    pub fn to_kv_string(&self) -> String {
        toml::to_string(self).expect("flat scalar struct always serializes")
    }

    /// Sets one parameter by name from a TOML scalar.
    pub fn set_field(&mut self, key: &str, value: &toml::Value) -> Result<(), String> {
        let as_f64 = || {
            value
                .as_float()
                .or_else(|| value.as_integer().map(|i| i as f64))
                .ok_or_else(|| format!("{key}: expected a number"))
        };
        let as_uint = || {
            value
                .as_integer()
                .filter(|i| *i >= 0)
                .ok_or_else(|| format!("{key}: expected a nonnegative integer"))
        };
        match key {
            "n_agents" => self.n_agents = as_uint()? as usize,
            "rho0" => self.rho0 = as_f64()?,
            "kappa" => self.kappa = as_f64()?,
            "t_infect" => self.t_infect = u32::try_from(as_uint()?).map_err(|e| e.to_string())?,
            "t_recover" => {
                self.t_recover = u32::try_from(as_uint()?).map_err(|e| e.to_string())?
            }
            "dr" => self.dr = as_f64()?,
            "n_iters" => self.n_iters = as_uint()? as usize,
            "seed" => self.seed = as_uint()? as u64,
            "domain_side" => self.domain_side = as_f64()?,
            other => return Err(format!("unknown parameter `{other}`")),
        }
        Ok(())
    }

    /// Sets a real-valued parameter by name; integer fields are rounded.
    pub fn set_numeric(&mut self, key: &str, value: f64) -> Result<(), String> {
        let v = match key {
            "rho0" | "kappa" | "dr" | "domain_side" => toml::Value::Float(value),
            _ => toml::Value::Integer(value.round() as i64),
        };
        self.set_field(key, &v)
    }
}

/// Seed used for replicate `k` of a batch started from `base`.
pub fn replicate_seed(base: u64, k: u64) -> u64 {
    base.wrapping_add(k)
}

/// Deterministic uniform random stream. Identical seeds give bit-identical
/// draws on every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on [0, 1).
    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on [0, 2π).
    #[inline]
    pub fn angle(&mut self) -> f64 {
        self.unit() * std::f64::consts::TAU
    }
}

pub fn rng_stream(seed: u64) -> RngStream {
    RngStream::new(seed)
}
