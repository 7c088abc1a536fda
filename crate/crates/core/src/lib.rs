//! Off-lattice SIR agent-based simulation and the deterministic global
//! recurrence rules (GRR) that approximate its expected state counts.
//!
//! * [`simulator`]: the stochastic model (random walk, reflective walls,
//!   infectivity disks of radius ρ₀, fixed infected/recovered durations);
//! * [`grr`]: globally and locally homogeneous recurrences, including the
//!   sparse front-growth formula;
//! * [`analysis`]: fixed points, Jacobians and stability of the global rule;
//! * [`metrics`]: the normalized curve distance ν;
//! * [`harness`]: comparisons, error surfaces and file output.

pub mod analysis;
pub mod grr;
pub mod harness;
pub mod metrics;
pub mod params;
pub mod simulator;
pub mod state;

pub use analysis::{find_fixed_points, FixedPointReport, FixedPoints, Stability};
pub use grr::{FrontState, GrrState, Variant};
pub use params::{rng_stream, ParamError, RngStream, SimParams};
pub use simulator::{simulate, simulate_batch, BatchResult};
pub use state::{AgentState, Counts, Population, Trajectory};
