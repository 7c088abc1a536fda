//! Agent states, populations and count trajectories.

use serde::Serialize;

use crate::params::SimParams;

/// Stage-resolved state of one agent. Stages are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentState {
    Susceptible,
    Infected(u32),
    Recovered(u32),
}

impl AgentState {
    pub fn is_susceptible(self) -> bool {
        matches!(self, AgentState::Susceptible)
    }

    pub fn is_infected(self) -> bool {
        matches!(self, AgentState::Infected(_))
    }

    pub fn is_recovered(self) -> bool {
        matches!(self, AgentState::Recovered(_))
    }

    /// Short label used in snapshot dumps.
    pub fn label(self) -> &'static str {
        match self {
            AgentState::Susceptible => "S",
            AgentState::Infected(_) => "I",
            AgentState::Recovered(_) => "R",
        }
    }

    /// Stage index, 0 for susceptible agents.
    pub fn stage(self) -> u32 {
        match self {
            AgentState::Susceptible => 0,
            AgentState::Infected(j) | AgentState::Recovered(j) => j,
        }
    }

    /// Deterministic stage clock for infected and recovered agents. Infection
    /// of susceptibles is decided by the simulator, not here.
    pub fn advance(self, t_infect: u32, t_recover: u32) -> AgentState {
        match self {
            AgentState::Susceptible => AgentState::Susceptible,
            AgentState::Infected(j) if j < t_infect => AgentState::Infected(j + 1),
            AgentState::Infected(_) => AgentState::Recovered(1),
            AgentState::Recovered(m) if m < t_recover => AgentState::Recovered(m + 1),
            AgentState::Recovered(_) => AgentState::Susceptible,
        }
    }
}

pub type Point = [f64; 2];

/// Per-agent states and positions inside the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub states: Vec<AgentState>,
    pub positions: Vec<Point>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn counts(&self, t: usize) -> Counts {
        let (mut s, mut i, mut r) = (0usize, 0usize, 0usize);
        for st in &self.states {
            match st {
                AgentState::Susceptible => s += 1,
                AgentState::Infected(_) => i += 1,
                AgentState::Recovered(_) => r += 1,
            }
        }
        Counts::new(t, s as f64, i as f64, r as f64)
    }

    pub fn in_domain(&self) -> bool {
        self.positions
            .iter()
            .all(|p| (0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]))
    }

    /// Checks that every stage is within its bound.
    pub fn stages_valid(&self, params: &SimParams) -> bool {
        self.states.iter().all(|s| match *s {
            AgentState::Susceptible => true,
            AgentState::Infected(j) => (1..=params.t_infect).contains(&j),
            AgentState::Recovered(m) => (1..=params.t_recover).contains(&m),
        })
    }
}

/// Number of agents per aggregated state at one iteration. Integral for
/// simulation output, real-valued for recurrence output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counts {
    pub t: usize,
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

impl Counts {
    pub fn new(t: usize, s: f64, i: f64, r: f64) -> Self {
        Self { t, s, i, r }
    }

    pub fn total(&self) -> f64 {
        self.s + self.i + self.r
    }

    /// `|s + i + r − n| ≤ rel_tol · n` and no negative component.
    pub fn conserves(&self, n: f64, rel_tol: f64) -> bool {
        self.s >= -rel_tol * n
            && self.i >= 0.0
            && self.r >= 0.0
            && (self.total() - n).abs() <= rel_tol * n
    }
}

/// Counts for t = 0..=M.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub points: Vec<Counts>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            points: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, c: Counts) {
        debug_assert!(self.points.last().is_none_or(|l| l.t + 1 == c.t));
        self.points.push(c);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&Counts> {
        self.points.last()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Counts> {
        self.points.iter()
    }

    pub fn infected(&self) -> Vec<f64> {
        self.points.iter().map(|c| c.i).collect()
    }

    pub fn recovered(&self) -> Vec<f64> {
        self.points.iter().map(|c| c.r).collect()
    }

    /// Indices run 0, 1, 2, … and every element conserves `n`.
    pub fn is_well_formed(&self, n: f64, rel_tol: f64) -> bool {
        self.points
            .iter()
            .enumerate()
            .all(|(k, c)| c.t == k && c.conserves(n, rel_tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_clock() {
        let mut s = AgentState::Infected(1);
        for _ in 0..29 {
            s = s.advance(30, 45);
            assert!(s.is_infected());
        }
        assert_eq!(s, AgentState::Infected(30));
        s = s.advance(30, 45);
        assert_eq!(s, AgentState::Recovered(1));
        for _ in 0..44 {
            s = s.advance(30, 45);
        }
        assert_eq!(s, AgentState::Recovered(45));
        assert_eq!(s.advance(30, 45), AgentState::Susceptible);
        assert_eq!(
            AgentState::Susceptible.advance(30, 45),
            AgentState::Susceptible
        );
    }

    #[test]
    fn single_stage_bounds() {
        assert_eq!(AgentState::Infected(1).advance(1, 1), AgentState::Recovered(1));
        assert_eq!(AgentState::Recovered(1).advance(1, 1), AgentState::Susceptible);
    }

    #[test]
    fn counts_conservation_tolerance() {
        let c = Counts::new(0, 9999.0, 1.0, 0.0);
        assert!(c.conserves(10_000.0, 0.0));
        let c = Counts::new(0, 9999.0, 1.0 + 1e-8, 0.0);
        assert!(!c.conserves(10_000.0, 0.0));
        assert!(c.conserves(10_000.0, 1e-9));
        assert!(!Counts::new(0, 10_001.0, -1.0, 0.0).conserves(10_000.0, 1e-9));
    }

    #[test]
    fn population_counts() {
        let pop = Population {
            states: vec![
                AgentState::Infected(3),
                AgentState::Susceptible,
                AgentState::Recovered(1),
                AgentState::Susceptible,
            ],
            positions: vec![[0.5, 0.5]; 4],
        };
        let c = pop.counts(7);
        assert_eq!((c.t, c.s, c.i, c.r), (7, 2.0, 1.0, 1.0));
        assert!(pop.in_domain());
    }
}
