//! Simulation laboratory for the two-dimensional random-cluster model and
//! its heat-bath Glauber dynamics.

pub mod boundary;
pub mod connectivity;
pub mod dynamics;
pub mod edgeconfig;
pub mod error;
pub mod experiment;
pub mod exactref;
pub mod graph;
pub mod lattice;
pub mod observables;
pub mod params;
pub mod stats;
pub mod validation;

pub use boundary::BoundaryCondition;
pub use edgeconfig::EdgeConfig;
pub use error::{Error, Result};
pub use graph::FkGraph;
pub use lattice::{Lattice, LatticeKind};
pub use params::{p_critical, p_dual, FkParams};
