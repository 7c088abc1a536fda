//! Deterministic recurrences for the expected number of infected and
//! recovered agents.
//!
//! * global: infectivity neighborhoods spread uniformly over the domain;
//! * local: neighborhoods confined to an expanding front disk of radius ζ_t;
//! * sparse: as local, with the front grown from the lens areas of the
//!   newly infected agents' neighborhoods (see [`sparse`]).

pub mod sparse;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::params::{SimParams, DOMAIN_AREA};
use crate::state::{Counts, Trajectory};

#[derive(Debug, Error, PartialEq)]
pub enum GrrError {
    #[error("neighborhood exceeds region ({mu_n} > {mu_region})")]
    NeighborhoodExceedsRegion { mu_n: f64, mu_region: f64 },
    #[error("invalid area arguments: mu_n={mu_n}, mu_region={mu_region}")]
    InvalidArea { mu_n: f64, mu_region: f64 },
}

/// Expected infected and recovered counts; S = N − I − R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrrState {
    pub i: f64,
    pub r: f64,
}

impl GrrState {
    pub fn new(i: f64, r: f64) -> Self {
        Self { i, r }
    }

    pub fn counts(&self, t: usize, n: f64) -> Counts {
        Counts::new(t, n - self.i - self.r, self.i, self.r)
    }
}

/// Radii of the infection front at t and t−1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontState {
    pub zeta_t: f64,
    pub zeta_prev: f64,
    pub saturated: bool,
}

impl FrontState {
    /// ζ₀ = ρ₀ (the initial infected agent's neighborhood), ζ₋₁ = 0.
    pub fn initial(p: &SimParams) -> Self {
        Self::from_radii(p.rho0, 0.0, false)
    }

    fn from_radii(zeta_t: f64, zeta_prev: f64, was_saturated: bool) -> Self {
        Self {
            zeta_t,
            zeta_prev,
            saturated: was_saturated || PI * zeta_t * zeta_t >= DOMAIN_AREA,
        }
    }

    /// Area of the front disk, capped at the domain area.
    pub fn area(&self) -> f64 {
        if self.saturated {
            DOMAIN_AREA
        } else {
            (PI * self.zeta_t * self.zeta_t).min(DOMAIN_AREA)
        }
    }

    /// Shifts the radii to (ζ_{t+1}, ζ_t).
    pub fn advanced(&self, zeta_next: f64) -> Self {
        Self::from_radii(zeta_next, self.zeta_t, self.saturated)
    }
}

/// Recurrence variant, as written in the `variant` CSV column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Global,
    Local,
    Sparse,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Global, Variant::Local, Variant::Sparse];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Global => "global",
            Variant::Local => "local",
            Variant::Sparse => "sparse",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "global" => Ok(Variant::Global),
            "local" => Ok(Variant::Local),
            "sparse" => Ok(Variant::Sparse),
            other => Err(format!(
                "unknown variant `{other}` (expected global, local or sparse)"
            )),
        }
    }
}

/// (1 − a)^i for real i ≥ 0, evaluated as exp(i · ln(1 − a)). Exact 1 at i = 0.
#[inline]
pub(crate) fn survival(a: f64, i: f64) -> f64 {
    if i == 0.0 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        (i * (-a).ln_1p()).exp()
    }
}

/// Probability that a point lies in at least one of `i_count` independent,
/// uniformly placed neighborhoods of area `mu_n` inside a region of area
/// `mu_region`: 1 − (1 − mu_n / mu_region)^{i_count}.
pub fn prob_in_transition_region(i_count: f64, mu_n: f64, mu_region: f64) -> Result<f64, GrrError> {
    if !(mu_n >= 0.0 && mu_region > 0.0) || !i_count.is_finite() || i_count < 0.0 {
        return Err(GrrError::InvalidArea { mu_n, mu_region });
    }
    if mu_n > mu_region {
        return Err(GrrError::NeighborhoodExceedsRegion { mu_n, mu_region });
    }
    Ok(coverage(i_count, mu_n / mu_region))
}

#[inline]
fn coverage(i: f64, a: f64) -> f64 {
    if i == 0.0 {
        0.0
    } else if a >= 1.0 {
        1.0
    } else {
        -(i * (-a).ln_1p()).exp_m1()
    }
}

/// R' = I/T_I + (1 − 1/(q T_I)) R.
#[inline]
fn recovered_next(s: &GrrState, p: &SimParams) -> f64 {
    let ti = f64::from(p.t_infect);
    s.i / ti + (1.0 - 1.0 / (p.q() * ti)) * s.r
}

/// One step of the globally homogeneous recurrence.
pub fn global_step(s: &GrrState, p: &SimParams) -> GrrState {
    let n = p.n_agents as f64;
    let ti = f64::from(p.t_infect);
    let a = p.neighborhood_area() / DOMAIN_AREA;
    let i = (n - s.i - s.r) * coverage(s.i, a) * (1.0 - p.kappa) + (1.0 - 1.0 / ti) * s.i;
    GrrState::new(i, recovered_next(s, p))
}

/// Global recurrence from (i0, r0) for t = 0..=M.
pub fn global_trajectory(p: &SimParams, i0: f64, r0: f64) -> Trajectory {
    let n = p.n_agents as f64;
    let mut s = GrrState::new(i0, r0);
    let mut traj = Trajectory::with_capacity(p.n_iters + 1);
    traj.push(s.counts(0, n));
    for t in 1..=p.n_iters {
        s = global_step(&s, p);
        traj.push(s.counts(t, n));
    }
    traj
}

/// ζ_{t+1} = ρ₀ + sqrt(((ζ_t + Δr)² + max(ζ_{t−1} − Δr, 0)²) / 2).
pub fn front_radius_update(f: &FrontState, p: &SimParams) -> FrontState {
    let outer = f.zeta_t + p.dr;
    let inner = (f.zeta_prev - p.dr).max(0.0);
    let next = p.rho0 + (0.5 * (outer * outer + inner * inner)).sqrt();
    f.advanced(next)
}

/// Result of one locally homogeneous step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalStep {
    pub state: GrrState,
    pub front: FrontState,
    /// The front area was below one neighborhood area and was raised to it.
    pub clamped: bool,
}

/// Infected update of the locally homogeneous recurrence for a given front
/// area. Returns the new infected count and whether the area was clamped.
fn local_infected(s: &GrrState, p: &SimParams, front_area: f64) -> (f64, bool) {
    let n = p.n_agents as f64;
    let ti = f64::from(p.t_infect);
    let mu_n = p.neighborhood_area();
    let clamped = front_area < mu_n;
    let mu_b = if clamped { mu_n } else { front_area };
    let a = if mu_b > 0.0 { mu_n / mu_b } else { 1.0 };
    let covered = coverage(s.i, a) * (mu_b / DOMAIN_AREA);
    let i = (n - s.i - s.r) * covered * (1.0 - p.kappa) + (1.0 - 1.0 / ti) * s.i;
    (i, clamped)
}

/// One step of the locally homogeneous recurrence with the radius-recurrence
/// front.
pub fn local_step(s: &GrrState, f: &FrontState, p: &SimParams) -> LocalStep {
    let (i, clamped) = local_infected(s, p, f.area());
    LocalStep {
        state: GrrState::new(i, recovered_next(s, p)),
        front: front_radius_update(f, p),
        clamped,
    }
}

/// Output of a front-tracking recurrence run.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRun {
    pub trajectory: Trajectory,
    /// Front state in effect at each t = 0..=M.
    pub fronts: Vec<FrontState>,
    /// Number of steps where the front area was raised to one neighborhood.
    pub clamped_steps: usize,
}

impl LocalRun {
    /// First t at which the front covers the domain.
    pub fn saturation_time(&self) -> Option<usize> {
        self.fronts.iter().position(|f| f.saturated)
    }
}

/// Locally homogeneous recurrence from (i0, r0) for t = 0..=M.
pub fn local_run(p: &SimParams, i0: f64, r0: f64) -> LocalRun {
    let n = p.n_agents as f64;
    let mut s = GrrState::new(i0, r0);
    let mut f = FrontState::initial(p);
    let mut run = LocalRun {
        trajectory: Trajectory::with_capacity(p.n_iters + 1),
        fronts: Vec::with_capacity(p.n_iters + 1),
        clamped_steps: 0,
    };
    run.trajectory.push(s.counts(0, n));
    run.fronts.push(f);
    for t in 1..=p.n_iters {
        let step = local_step(&s, &f, p);
        s = step.state;
        f = step.front;
        run.clamped_steps += usize::from(step.clamped);
        run.trajectory.push(s.counts(t, n));
        run.fronts.push(f);
    }
    run
}

pub fn local_trajectory(p: &SimParams, i0: f64, r0: f64) -> Trajectory {
    local_run(p, i0, r0).trajectory
}

/// Trajectory of the requested variant, starting from one infected agent.
pub fn trajectory(variant: Variant, p: &SimParams) -> Trajectory {
    match variant {
        Variant::Global => global_trajectory(p, 1.0, 0.0),
        Variant::Local => local_trajectory(p, 1.0, 0.0),
        Variant::Sparse => sparse::sparse_local_trajectory(p, p.n_iters),
    }
}
