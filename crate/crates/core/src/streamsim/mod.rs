//! Circular-buffer memory simulator and analytic throughput model.

use thiserror::Error;

mod perf;
mod sim;

pub use perf::{perf_model, speedup, PerfConfig, PerfReport, QUOTED_BANDWIDTH_GBS};
pub use sim::{simulate_stream, MemoryConfig, MissEvent, SimReport, StepTrace, StreamSource};

pub(crate) use sim::{run as run_window, Fallback};
#[cfg(test)]
pub(crate) use sim::naive_misses as sim_naive_misses;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("vertex {vertex} needs {needed} neighborhood slots, only {capacity} available")]
    NeighborhoodOverflow { vertex: usize, needed: usize, capacity: usize },
    #[error("memory unit capacity must be positive")]
    ZeroCapacity,
    #[error("stream has {stream} entries but the graph has {graph} vertices")]
    SizeMismatch { graph: usize, stream: usize },
    #[error("stream references vertex {vertex} of a graph with {n} vertices")]
    UnknownVertex { vertex: usize, n: usize },
    #[error("invalid performance configuration: {0}")]
    InvalidConfig(String),
    #[error("workloads differ: {0} vs {1} flops per update")]
    WorkloadMismatch(u32, u32),
}
