//! Separability polytopes of multipartite states.
//!
//! The partitions of a party set with respect to which a state is separable
//! form a downward-closed family; its maximal elements span a simplicial
//! complex whose vertices are blocks of parties. This crate builds those
//! complexes, certifies them numerically for small density matrices, and
//! follows them through circuits of two-party gates as simplicial maps.
//!
//! - [`partitions`]: set partitions, the refinement lattice, antichains.
//! - [`complex`]: block-labeled complexes, polytope construction, simplicial maps.
//! - [`quantum`]: density matrices, PPT tests, witnessed ensembles, profiles.
//! - [`dynamics`]: gate-by-gate coarsening and per-step simplicial maps.
//! - [`classify`]: three-party classes and the relatively-local partition.
//! - [`cli`]: JSON documents and the `seppoly` commands.

pub mod classify;
pub mod cli;
pub mod complex;
pub mod dynamics;
pub mod exec;
pub mod partitions;
pub mod quantum;

pub use classify::{classify_three, polytope_signature, relloc_partition, ThreeQubitClass};
pub use complex::{build_polytope, SimplicialComplex, SimplicialMap};
pub use dynamics::{evolve_step, run_circuit, Circuit, GateOp};
pub use exec::Execution;
pub use partitions::{Block, Partition, PartitionAntichain};
pub use quantum::{compute_profile, DensityMatrix, PureState, WitnessedEnsemble};
