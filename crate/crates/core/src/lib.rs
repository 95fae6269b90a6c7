//! Exact branch-and-cut for the multiple depot ring-star problem (MDRSP).
//!
//! Given customers, depots, routing costs on edges and assignment costs on
//! arcs, find rings (simple cycles through exactly one depot) and assign every
//! customer off the rings to a ring vertex or a depot, minimizing total cost.
//!
//! Modules:
//! - [`instance`]: data model, TSPLIB input, instance generation, solutions.
//! - [`lp`]: bounded-variable simplex with warm-started re-solves.
//! - [`graph`]: connected components and s–t minimum cuts.
//! - [`cuts`]: separation routines for every inequality family.
//! - [`heuristic`]: LP-guided construction of feasible solutions.
//! - [`search`]: the branch-and-cut driver.
//! - [`polylab`]: enumeration-based checks of dimension, validity and facets.
//! - [`table`]: benchmark rows in the published table layout.

pub mod cuts;
pub mod graph;
pub mod heuristic;
pub mod instance;
pub mod lp;
pub mod polylab;
pub mod search;
pub mod table;

pub use cuts::{Cut, Family, FractionalPoint};
pub use instance::{
    generate_instance, parse_tsplib, ClassTag, CostModel, IncidenceVector, Instance, Layout, Ring,
    Solution, Violation,
};
pub use search::{branch_and_cut, Params, Report, Termination};
