//! Composable data-center rack modelling.
//!
//! The crate covers three loosely coupled experiments:
//!
//! * [`composer`] places application infrastructure templates ([`workload`]) onto a
//!   disaggregated resource hierarchy ([`topology`]) under latency-scope constraints.
//! * [`fabric`] computes the maximum traffic a rack's optical backplane can carry
//!   for a demand matrix, for the wavelength-switched "targeted" design and the
//!   dedicated-transceiver "generic" full mesh.
//! * [`cost`] prices both fabrics and sweeps the generic/targeted cost ratio.
//!
//! [`scenarios`] bundles ready-made racks, and [`gen`] produces seeded random
//! instances for property and equivalence testing.

pub mod composer;
pub mod cost;
pub mod error;
pub mod fabric;
mod flow;
pub mod gen;
pub mod scenarios;
pub mod topology;
pub mod workload;

pub use composer::{
    check_feasible, oracle_place, place_all, Allocation, Assignment, ComponentRef, Feasibility,
    Objective, PlacementReport, Reason, Rejection, Residual,
};
pub use cost::{capex_generic, capex_targeted, cost_ratio, sweep, CostParams, SweepRow};
pub use error::{Error, Result};
pub use fabric::{
    max_throughput_generic, max_throughput_targeted, oracle_throughput_targeted, validate_plan,
    DemandMatrix, GenericFabric, ScheduledLink, TargetedFabric, ThroughputReport, WavelengthPlan,
};
pub use topology::{
    utilization_scope, validate_dc, DataCenter, DisaggregationConfig, Mode, Node, Pod, Rack,
    ResourceComponent, ResourceKind, Scenario, Scope, Violation,
};
pub use workload::{builtin_table1, load_workloads, AppTemplate, WorkloadSet};
