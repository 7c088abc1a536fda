//! Plain-text output: CSV tables, JSON reports and parameter snapshots.
//!
//! Every writer takes rows in a fixed order and formats floats with the
//! shortest round-trip representation, so identical inputs produce
//! byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ErrorRow, HarnessError, SurfaceCell};
use crate::analysis::FixedPoints;
use crate::grr::Variant;
use crate::params::SimParams;
use crate::simulator::BatchResult;
use crate::state::{Population, Trajectory};

pub const PARAMS_FILE: &str = "params.snapshot";
pub const SIMULATION_FILE: &str = "trajectory_simulation.csv";
pub const GRR_FILE: &str = "trajectory_grr.csv";
pub const BATCH_FILE: &str = "batch.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const FIXED_POINTS_FILE: &str = "fixed_points.json";
pub const SURFACE_FILE: &str = "surface.csv";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> HarnessError {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    };
    HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Creates the output directory (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

/// Writes `header` and then one record per row, so an empty table still
/// carries its schema.
fn write_rows<R: Serialize>(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = R>,
) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Serialize)]
struct CountRow {
    t: usize,
    s: f64,
    i: f64,
    r: f64,
}

#[derive(Serialize)]
struct VariantRow {
    t: usize,
    s: f64,
    i: f64,
    r: f64,
    variant: Variant,
}

#[derive(Serialize)]
struct BatchRow {
    t: usize,
    s_mean: f64,
    i_mean: f64,
    r_mean: f64,
    s_std: f64,
    i_std: f64,
    r_std: f64,
}

#[derive(Serialize)]
struct SnapshotRow {
    agent_id: usize,
    state: &'static str,
    stage: u32,
    x: f64,
    y: f64,
}

const SURFACE_HEADER: &[&str] = &[
    "row",
    "col",
    "expected_initial_susceptibles",
    "kappa",
    "rho0",
    "nu_infected",
    "died_out_fraction",
    "flagged",
];

#[derive(Serialize)]
struct SurfaceRow {
    row: usize,
    col: usize,
    expected_initial_susceptibles: f64,
    kappa: f64,
    rho0: f64,
    nu_infected: Option<f64>,
    died_out_fraction: f64,
    flagged: bool,
}

pub fn write_params(path: &Path, p: &SimParams) -> Result<(), HarnessError> {
    write_text(path, &p.to_kv_string())
}

/// `t,s,i,r`.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), HarnessError> {
    write_rows(
        path,
        &["t", "s", "i", "r"],
        traj.iter().map(|c| CountRow {
            t: c.t,
            s: c.s,
            i: c.i,
            r: c.r,
        }),
    )
}

/// `t,s,i,r,variant`, variants stacked in the given order.
pub fn write_grr_trajectories(
    path: &Path,
    curves: &[(Variant, Trajectory)],
) -> Result<(), HarnessError> {
    write_rows(
        path,
        &["t", "s", "i", "r", "variant"],
        curves.iter().flat_map(|(v, traj)| {
            traj.iter().map(move |c| VariantRow {
                t: c.t,
                s: c.s,
                i: c.i,
                r: c.r,
                variant: *v,
            })
        }),
    )
}

/// `t,s_mean,i_mean,r_mean,s_std,i_std,r_std`.
pub fn write_batch(path: &Path, b: &BatchResult) -> Result<(), HarnessError> {
    write_rows(
        path,
        &["t", "s_mean", "i_mean", "r_mean", "s_std", "i_std", "r_std"],
        b.mean.iter().zip(&b.std).map(|(c, sd)| BatchRow {
            t: c.t,
            s_mean: c.s,
            i_mean: c.i,
            r_mean: c.r,
            s_std: sd[0],
            i_std: sd[1],
            r_std: sd[2],
        }),
    )
}

/// `state,variant,rho0,kappa,t_infect,t_recover,nu`.
pub fn write_errors(path: &Path, rows: &[ErrorRow]) -> Result<(), HarnessError> {
    write_rows(
        path,
        &["state", "variant", "rho0", "kappa", "t_infect", "t_recover", "nu"],
        rows,
    )
}

/// `agent_id,state,stage,x,y`.
pub fn write_snapshot(path: &Path, pop: &Population) -> Result<(), HarnessError> {
    write_rows(
        path,
        &["agent_id", "state", "stage", "x", "y"],
        pop.states
            .iter()
            .zip(&pop.positions)
            .enumerate()
            .map(|(k, (s, p))| SnapshotRow {
                agent_id: k,
                state: s.label(),
                stage: s.stage(),
                x: p[0],
                y: p[1],
            }),
    )
}

pub fn write_surface(path: &Path, cells: &[SurfaceCell]) -> Result<(), HarnessError> {
    write_rows(
        path,
        SURFACE_HEADER,
        cells.iter().map(|c| SurfaceRow {
            row: c.row,
            col: c.col,
            expected_initial_susceptibles: c.expected_initial_susceptibles,
            kappa: c.kappa,
            rho0: c.rho0,
            nu_infected: c.nu_infected,
            died_out_fraction: c.died_out_fraction,
            flagged: c.flagged(),
        }),
    )
}

pub fn fixed_points_json(fp: &FixedPoints) -> String {
    let mut s = serde_json::to_string_pretty(fp).expect("report is plain data");
    s.push('\n');
    s
}

pub fn write_fixed_points(path: &Path, fp: &FixedPoints) -> Result<(), HarnessError> {
    write_text(path, &fixed_points_json(fp))
}

pub fn snapshot_path(dir: &Path, t: usize) -> PathBuf {
    dir.join(format!("snapshot_t{t:05}.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Counts;

    #[test]
    fn trajectory_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut traj = Trajectory::new();
        traj.push(Counts::new(0, 9.0, 1.0, 0.0));
        traj.push(Counts::new(1, 8.0, 1.5, 0.5));
        write_trajectory(&path, &traj).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "t,s,i,r\n0,9.0,1.0,0.0\n1,8.0,1.5,0.5\n"
        );
    }

    #[test]
    fn grr_csv_has_variant_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        let mut traj = Trajectory::new();
        traj.push(Counts::new(0, 9.0, 1.0, 0.0));
        write_grr_trajectories(&path, &[(Variant::Local, traj)]).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "t,s,i,r,variant\n0,9.0,1.0,0.0,local\n"
        );
    }

    #[test]
    fn missing_directory_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nope").join("x.csv");
        let err = write_trajectory(&path, &Trajectory::new()).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("nope"));
    }
}
