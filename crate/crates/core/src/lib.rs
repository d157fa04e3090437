//! Locality and streaming toolkit for explicit unstructured-mesh finite-volume solvers.
//!
//! The crate is organised by subsystem:
//!
//! * [`meshcore`]: graphs, labelings, bandwidth metrics, Gmsh ingestion and the
//!   descriptor streams consumed by the streaming architecture.
//! * [`reorder`]: GPS and AM1 bandwidth-reducing labelings plus an exact oracle.
//! * [`accesspattern`]: access patterns whose serial bandwidth stays under a bound.
//! * [`streamsim`]: circular-buffer memory simulator and the analytic throughput model.
//! * [`eulerfv`]: cell-centered Lax-Friedrichs solver for the 2D Euler equations.
//! * [`pipegen`]: dataflow-graph planner for the pipelined arithmetic unit.

pub mod accesspattern;
pub mod eulerfv;
pub mod meshcore;
pub mod pipegen;
pub mod reorder;
pub mod streamsim;

pub use meshcore::{Graph, Labeling, TriMesh};
