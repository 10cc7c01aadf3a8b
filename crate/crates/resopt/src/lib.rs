//! Declarative modelling of multi-carrier residential energy systems with an
//! exact mixed-integer linear solver.
//!
//! A system is described as a set of locations, each carrying energy carriers
//! (electricity, heat at discrete temperature levels, gas at discrete pressure
//! levels), technology components (heat pumps, CHP units, storages, …) and
//! demands. The description is lowered to a mixed-integer linear program whose
//! every variable corresponds to a physical power flow or storage state, solved
//! with a built-in bounded-variable simplex plus branch-and-bound, and reported
//! back in terms of the original system topology.
//!
//! The pipeline is: [`yaml::parse`] (or the builder API on
//! [`model::EnergySystem`]) → [`model::EnergySystem::validate`] →
//! [`lower::lower`] → [`solver::solve_milp`] → [`report`].

pub mod lower;
pub mod milp;
pub mod model;
pub mod report;
pub mod solver;
pub mod storage;
pub mod yaml;

pub use lower::{cop, lower, LowerError, LowerOptions};
pub use milp::{MilpModel, VarId, VarKind};
pub use report::{export_graph, flows, to_csv, FlowRecord, GraphFormat, ReportError};
pub use yaml::series::{resolve_csv_series, SeriesError};
pub use yaml::{export_yaml, parse, YamlError};
pub use model::{EnergySystem, Location, ModelError, TimeIndex, TimeSeries, ValidationReport};
pub use solver::{solve_milp, Solution, SolveOptions, SolveStatus, SolverError};
