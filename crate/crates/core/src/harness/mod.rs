//! Simulation-versus-recurrence experiments.

pub mod config;
pub mod output;

use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::grr::{self, Variant};
use crate::metrics::{self, MetricError};
use crate::params::{ParamError, SimParams};
use crate::simulator::{simulate_batch, BatchResult};
use crate::state::Trajectory;

/// Replicates used when none are requested.
pub const DEFAULT_REPLICATES: usize = 100;
/// Iterations per error-surface cell.
pub const SURFACE_ITERS: usize = 150;

/// Virtual sweep axis: expected susceptibles in the initial neighborhood,
/// realized by solving (N − 1) π ρ₀² = value for ρ₀.
pub const EXPECTED_SUSCEPTIBLES_AXIS: &str = "expected_susceptibles";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("metric failed: {0}")]
    Metric(#[from] MetricError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit status: 2 for validation problems, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io { .. } | HarnessError::Param(ParamError::Io { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Infected,
    Recovered,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Infected => "infected",
            StateKind::Recovered => "recovered",
        }
    }

    pub fn series(self, t: &Trajectory) -> Vec<f64> {
        match self {
            StateKind::Infected => t.infected(),
            StateKind::Recovered => t.recovered(),
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the error report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub state: StateKind,
    pub variant: Variant,
    pub rho0: f64,
    pub kappa: f64,
    pub t_infect: u32,
    pub t_recover: u32,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub params: SimParams,
    pub batch: BatchResult,
    pub curves: Vec<(Variant, Trajectory)>,
    pub errors: Vec<ErrorRow>,
}

impl CompareReport {
    pub fn nu(&self, state: StateKind, variant: Variant) -> Option<f64> {
        self.errors
            .iter()
            .find(|e| e.state == state && e.variant == variant)
            .map(|e| e.nu)
    }
}

/// ν of `curve` against the simulation mean for one state.
pub fn state_error(
    batch: &BatchResult,
    curve: &Trajectory,
    state: StateKind,
) -> Result<f64, MetricError> {
    metrics::series_error(&state.series(&batch.mean), &state.series(curve))
}

/// Evaluates the requested recurrences against an existing batch.
pub fn compare_with_batch(
    params: &SimParams,
    batch: BatchResult,
    variants: &[Variant],
) -> Result<CompareReport, HarnessError> {
    let mut variants = variants.to_vec();
    variants.sort();
    variants.dedup();
    let mut curves = Vec::with_capacity(variants.len());
    let mut errors = Vec::new();
    for v in variants {
        let curve = grr::trajectory(v, params);
        for state in [StateKind::Infected, StateKind::Recovered] {
            errors.push(ErrorRow {
                state,
                variant: v,
                rho0: params.rho0,
                kappa: params.kappa,
                t_infect: params.t_infect,
                t_recover: params.t_recover,
                nu: state_error(&batch, &curve, state)?,
            });
        }
        curves.push((v, curve));
    }
    errors.sort_by(|a, b| (a.state, a.variant).cmp(&(b.state, b.variant)));
    Ok(CompareReport {
        params: *params,
        batch,
        curves,
        errors,
    })
}

/// Runs a replicate batch and measures ν for every requested variant on
/// both infected and recovered counts.
pub fn compare(
    params: &SimParams,
    replicates: usize,
    variants: &[Variant],
) -> Result<CompareReport, HarnessError> {
    let params = params.validate()?;
    if replicates == 0 {
        return Err(HarnessError::Config("replicates must be >= 1".into()));
    }
    let batch = simulate_batch(&params, replicates);
    compare_with_batch(&params, batch, variants)
}

/// A named list of values for one sweep dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SimParams,
    /// One or two axes; the first is the outer (row) dimension.
    pub axes: Vec<Axis>,
    pub replicates: usize,
    pub n_iters: usize,
    pub out_dir: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(base: SimParams, axes: Vec<Axis>, replicates: usize) -> Self {
        Self {
            base,
            axes,
            replicates,
            n_iters: SURFACE_ITERS,
            out_dir: None,
        }
    }
}

/// ρ₀ giving `expected` susceptibles in the initial neighborhood.
pub fn rho0_for_expected_susceptibles(n_agents: usize, expected: f64) -> f64 {
    (expected / ((n_agents as f64 - 1.0) * std::f64::consts::PI)).sqrt()
}

fn apply_axis(p: &mut SimParams, name: &str, value: f64) -> Result<(), HarnessError> {
    if name == EXPECTED_SUSCEPTIBLES_AXIS {
        p.rho0 = rho0_for_expected_susceptibles(p.n_agents, value);
        Ok(())
    } else {
        p.set_numeric(name, value).map_err(HarnessError::Config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceCell {
    /// Index along the first axis.
    pub row: usize,
    /// Index along the second axis (0 for one-axis sweeps).
    pub col: usize,
    pub expected_initial_susceptibles: f64,
    pub kappa: f64,
    pub rho0: f64,
    /// ν of the local recurrence on infected counts; `None` when the
    /// simulation mean is identically zero.
    pub nu_infected: Option<f64>,
    pub died_out_fraction: f64,
}

impl SurfaceCell {
    /// The simulation mean was identically zero, so ν is undefined.
    pub fn flagged(&self) -> bool {
        self.nu_infected.is_none()
    }
}

/// Parameter sets of every sweep cell, row-major.
pub fn sweep_cells(spec: &SweepSpec) -> Result<Vec<(usize, usize, SimParams)>, HarnessError> {
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(HarnessError::Config(format!(
            "a sweep needs one or two axes, got {}",
            spec.axes.len()
        )));
    }
    if spec.replicates == 0 {
        return Err(HarnessError::Config("replicates must be >= 1".into()));
    }
    let rows = &spec.axes[0];
    let single = Axis::new("", vec![f64::NAN]);
    let cols = spec.axes.get(1).unwrap_or(&single);
    let mut out = Vec::with_capacity(rows.values.len() * cols.values.len());
    for (ri, &rv) in rows.values.iter().enumerate() {
        for (ci, &cv) in cols.values.iter().enumerate() {
            let mut p = spec.base;
            p.n_iters = spec.n_iters;
            apply_axis(&mut p, &rows.name, rv)?;
            if spec.axes.len() == 2 {
                apply_axis(&mut p, &cols.name, cv)?;
            }
            out.push((ri, ci, p.validate()?));
        }
    }
    Ok(out)
}

/// Local-recurrence error on infected counts over a parameter grid.
/// Cells are evaluated in parallel and returned in row-major order.
pub fn error_surface(spec: &SweepSpec) -> Result<Vec<SurfaceCell>, HarnessError> {
    let cells = sweep_cells(spec)?;
    let replicates = spec.replicates;
    Ok(cells
        .par_iter()
        .map(|&(row, col, p)| surface_cell(row, col, &p, replicates))
        .collect())
}

fn surface_cell(row: usize, col: usize, p: &SimParams, replicates: usize) -> SurfaceCell {
    let batch = simulate_batch(p, replicates);
    let curve = grr::trajectory(Variant::Local, p);
    SurfaceCell {
        row,
        col,
        expected_initial_susceptibles: p.expected_initial_susceptibles(),
        kappa: p.kappa,
        rho0: p.rho0,
        nu_infected: state_error(&batch, &curve, StateKind::Infected).ok(),
        died_out_fraction: batch.died_out_fraction(),
    }
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut k = 0;
        while k < idx.len() {
            let mut e = k;
            while e + 1 < idx.len() && v[idx[e + 1]] == v[idx[k]] {
                e += 1;
            }
            let avg = (k + e) as f64 / 2.0 + 1.0;
            for &j in &idx[k..=e] {
                r[j] = avg;
            }
            k = e + 1;
        }
        r
    }
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimParams {
        SimParams {
            n_agents: 600,
            rho0: 0.06,
            kappa: 0.6,
            n_iters: 80,
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn no_variants_no_rows() {
        let r = compare(&small(), 2, &[]).unwrap();
        assert!(r.errors.is_empty());
        assert!(r.curves.is_empty());
        assert_eq!(r.batch.replicates, 2);
    }

    #[test]
    fn rows_per_state_and_variant() {
        let r = compare(&small(), 2, &[Variant::Local, Variant::Global, Variant::Local]).unwrap();
        assert_eq!(r.errors.len(), 4);
        assert!(r.errors.iter().all(|e| e.nu >= 0.0));
        assert!(r.nu(StateKind::Recovered, Variant::Global).is_some());
        assert!(r.nu(StateKind::Infected, Variant::Sparse).is_none());
    }

    #[test]
    fn invalid_params_rejected() {
        let p = SimParams {
            kappa: 2.0,
            ..small()
        };
        let e = compare(&p, 1, &[Variant::Global]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn expected_susceptibles_axis() {
        let rho = rho0_for_expected_susceptibles(10_000, 8.0);
        let p = SimParams {
            rho0: rho,
            ..Default::default()
        };
        assert!((p.expected_initial_susceptibles() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_cell_layout() {
        let spec = SweepSpec::new(
            small(),
            vec![
                Axis::new("kappa", vec![0.5, 0.9]),
                Axis::new(EXPECTED_SUSCEPTIBLES_AXIS, vec![2.0, 4.0, 8.0]),
            ],
            1,
        );
        let cells = sweep_cells(&spec).unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!((cells[4].0, cells[4].1), (1, 1));
        assert_eq!(cells[4].2.kappa, 0.9);
        assert!((cells[4].2.expected_initial_susceptibles() - 4.0).abs() < 1e-12);
        assert!(cells.iter().all(|c| c.2.n_iters == SURFACE_ITERS));
    }

    #[test]
    fn sweep_rejects_bad_axes() {
        let spec = SweepSpec::new(small(), vec![Axis::new("bogus", vec![1.0])], 1);
        assert!(matches!(sweep_cells(&spec), Err(HarnessError::Config(_))));
        let spec = SweepSpec::new(small(), vec![Axis::new("kappa", vec![1.5])], 1);
        assert!(matches!(sweep_cells(&spec), Err(HarnessError::Param(_))));
        let spec = SweepSpec::new(small(), vec![], 1);
        assert!(sweep_cells(&spec).is_err());
    }

    #[test]
    fn single_cell_surface_matches_compare() {
        let mut spec = SweepSpec::new(small(), vec![Axis::new("kappa", vec![0.6])], 3);
        spec.n_iters = 60;
        let cells = error_surface(&spec).unwrap();
        let p = SimParams {
            n_iters: 60,
            ..small()
        };
        let r = compare(&p, 3, &[Variant::Local]).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].nu_infected, r.nu(StateKind::Infected, Variant::Local));
        assert_eq!(cells[0].died_out_fraction, r.batch.died_out_fraction());
    }

    #[test]
    fn spearman_known() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]) - 0.8).abs() < 1e-12);
        let s = spearman(&[1.0, 2.0, 3.0], &[1.0, 1.0, 2.0]);
        assert!((s - 0.866_025_403_784_438_6).abs() < 1e-12);
    }
}
