//! Domain types for one quasi-static time slot: the constellation, the NF
//! catalog, the service chains and terminal requests, and the caching /
//! offloading decision.

mod decision;
mod generate;
mod topology;
mod types;
mod validate;

pub use decision::{Decision, Placement};
pub use generate::{generate_scenario, Association, GenerationConfig, InputProfile};
pub use topology::{build_topology, dbw_to_watts, LinkParams, Topology};
pub use types::{NfCatalog, Scenario, ServiceChain, Terminal};
pub use validate::{validate_scenario, ScenarioViolation};
