use rayon::prelude::*;

use super::simulate;
use crate::params::{replicate_seed, rng_stream, SimParams};
use crate::state::{Counts, Trajectory};

/// Pointwise statistics over independent replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub mean: Trajectory,
    /// Sample standard deviation of (s, i, r) per iteration; zero for a
    /// single replicate.
    pub std: Vec<[f64; 3]>,
    pub replicates: usize,
    pub terminal: Vec<Counts>,
    /// Replicates whose infected count reached zero at some iteration.
    pub died_out: usize,
}

impl BatchResult {
    pub fn died_out_fraction(&self) -> f64 {
        self.died_out as f64 / self.replicates as f64
    }
}

/// Runs `replicates` independent simulations; replicate k uses seed
/// `params.seed + k`. Replicates run in parallel and are reduced in index
/// order, so the result does not depend on scheduling.
///
/// Die-out replicates stay in the mean.
pub fn simulate_batch(params: &SimParams, replicates: usize) -> BatchResult {
    assert!(replicates >= 1, "need at least one replicate");
    let runs: Vec<Trajectory> = (0..replicates as u64)
        .into_par_iter()
        .map(|k| simulate(params, &mut rng_stream(replicate_seed(params.seed, k))))
        .collect();
    aggregate(&runs)
}

pub(crate) fn aggregate(runs: &[Trajectory]) -> BatchResult {
    let reps = runs.len();
    let len = runs[0].len();
    let mut sum = vec![[0.0f64; 3]; len];
    for run in runs {
        debug_assert_eq!(run.len(), len);
        for (acc, c) in sum.iter_mut().zip(run.iter()) {
            acc[0] += c.s;
            acc[1] += c.i;
            acc[2] += c.r;
        }
    }
    let n = reps as f64;
    let means: Vec<[f64; 3]> = sum.iter().map(|a| a.map(|v| v / n)).collect();
    let mut sq = vec![[0.0f64; 3]; len];
    for run in runs {
        for ((acc, c), m) in sq.iter_mut().zip(run.iter()).zip(&means) {
            let d = [c.s - m[0], c.i - m[1], c.r - m[2]];
            for j in 0..3 {
                acc[j] += d[j] * d[j];
            }
        }
    }
    let std = sq
        .iter()
        .map(|a| {
            if reps > 1 {
                a.map(|v| (v / (n - 1.0)).sqrt())
            } else {
                [0.0; 3]
            }
        })
        .collect();
    let mut mean = Trajectory::with_capacity(len);
    for (t, m) in means.iter().enumerate() {
        mean.push(Counts::new(t, m[0], m[1], m[2]));
    }
    BatchResult {
        mean,
        std,
        replicates: reps,
        terminal: runs.iter().map(|r| *r.last().expect("nonempty")).collect(),
        died_out: runs
            .iter()
            .filter(|r| r.iter().any(|c| c.i == 0.0))
            .count(),
    }
}
