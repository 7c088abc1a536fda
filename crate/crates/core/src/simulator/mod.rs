//! Stochastic off-lattice SIR simulation.
//!
//! One iteration: index the infected agents' positions, update every state
//! from that time-t snapshot, then move every agent one random-walk step.

mod batch;
mod grid;

pub use batch::{simulate_batch, BatchResult};
pub use grid::{within, NeighborIndex, MAX_CELLS_PER_SIDE};

use crate::params::{RngStream, SimParams};
use crate::state::{AgentState, Point, Population, Trajectory};

/// Agent 0 starts infected at the center; all others are susceptible and
/// uniformly placed.
pub fn init_population(params: &SimParams, rng: &mut RngStream) -> Population {
    let n = params.n_agents;
    let mut states = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n);
    states.push(AgentState::Infected(1));
    positions.push([0.5, 0.5]);
    for _ in 1..n {
        states.push(AgentState::Susceptible);
        let x = rng.unit();
        let y = rng.unit();
        positions.push([x, y]);
    }
    Population { states, positions }
}

/// Index over the positions of infected agents (any stage).
pub fn infected_index(pop: &Population, params: &SimParams) -> NeighborIndex {
    NeighborIndex::for_params(
        params,
        pop.states
            .iter()
            .zip(&pop.positions)
            .enumerate()
            .filter(|(_, (s, _))| s.is_infected())
            .map(|(k, (_, p))| (k as u32, *p)),
    )
}

/// Applies the local transition rule to every agent using `index` as the
/// time-t transition region. Returns the number of new infections.
///
/// A covered susceptible draws X ~ U[0,1) and is infected when X ≥ κ, i.e.
/// with probability 1 − κ. Draws happen in agent order and only for covered
/// susceptibles.
pub fn step_states_with_index(
    pop: &mut Population,
    params: &SimParams,
    rng: &mut RngStream,
    index: &NeighborIndex,
) -> usize {
    let (ti, tr) = (params.t_infect, params.t_recover);
    let mut infections = 0;
    for (state, pos) in pop.states.iter_mut().zip(&pop.positions) {
        *state = match *state {
            AgentState::Susceptible => {
                if index.any_within(*pos, params.rho0) && rng.unit() >= params.kappa {
                    infections += 1;
                    AgentState::Infected(1)
                } else {
                    AgentState::Susceptible
                }
            }
            other => other.advance(ti, tr),
        };
    }
    infections
}

/// State update for one iteration.
pub fn step_states(pop: &mut Population, params: &SimParams, rng: &mut RngStream) -> usize {
    let index = infected_index(pop, params);
    step_states_with_index(pop, params, rng, &index)
}

/// Reflects one coordinate: a value past a wall is placed `dr` inside it.
#[inline]
fn reflect(v: f64, dr: f64) -> f64 {
    if v > 1.0 {
        (1.0 - dr).max(0.0)
    } else if v < 0.0 {
        dr.min(1.0)
    } else {
        v
    }
}

/// Moves `p` by `dr` in direction `theta` with reflective walls. Each
/// violated axis is handled independently, so corner exits shift both.
#[inline]
pub fn move_point(p: Point, theta: f64, dr: f64) -> Point {
    let (s, c) = theta.sin_cos();
    [reflect(p[0] + dr * c, dr), reflect(p[1] + dr * s, dr)]
}

/// Random-walk step for every agent, one angle draw per agent in order.
pub fn step_movement(pop: &mut Population, params: &SimParams, rng: &mut RngStream) {
    if params.dr == 0.0 {
        return;
    }
    for p in pop.positions.iter_mut() {
        let theta = rng.angle();
        *p = move_point(*p, theta, params.dr);
    }
}

/// Runs one replicate and calls `observe(t, &pop)` for t = 0..=M after the
/// population reaches that iteration.
pub fn simulate_observed<F>(params: &SimParams, rng: &mut RngStream, mut observe: F) -> Trajectory
where
    F: FnMut(usize, &Population),
{
    let mut pop = init_population(params, rng);
    let mut traj = Trajectory::with_capacity(params.n_iters + 1);
    traj.push(pop.counts(0));
    observe(0, &pop);
    for t in 0..params.n_iters {
        step_states(&mut pop, params, rng);
        step_movement(&mut pop, params, rng);
        traj.push(pop.counts(t + 1));
        observe(t + 1, &pop);
    }
    traj
}

/// Integer count trajectory of one replicate, t = 0..=M.
pub fn simulate(params: &SimParams, rng: &mut RngStream) -> Trajectory {
    simulate_observed(params, rng, |_, _| {})
}
