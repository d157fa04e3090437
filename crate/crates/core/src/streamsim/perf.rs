use serde::{Deserialize, Serialize};

use super::SimError;
use crate::meshcore::Precision;

/// Reference memory bandwidths quoted for the single and double precision
/// accelerator, in GB/s. Reported next to our own byte accounting.
pub const QUOTED_BANDWIDTH_GBS: [(Precision, f64); 2] = [(Precision::Single, 10.3), (Precision::Double, 19.7)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfConfig {
    pub clock_hz: f64,
    pub cycles_per_update: f64,
    pub flops_per_update: u32,
    pub num_pes: u32,
    pub bytes_in_per_update: f64,
    pub bytes_out_per_update: f64,
    pub precision: Precision,
}

impl PerfConfig {
    /// One processing element at 390 MHz, three cycles per triangle update.
    pub fn accelerator() -> Self {
        PerfConfig {
            clock_hz: 390e6,
            cycles_per_update: 3.0,
            flops_per_update: 213,
            num_pes: 1,
            bytes_in_per_update: 0.0,
            bytes_out_per_update: 0.0,
            precision: Precision::Double,
        }
        .with_euler_traffic()
    }

    /// A processor measured at `updates_per_sec`, expressed as an equivalent clock.
    pub fn measured(updates_per_sec: f64, flops_per_update: u32) -> Self {
        PerfConfig {
            clock_hz: updates_per_sec,
            cycles_per_update: 1.0,
            flops_per_update,
            num_pes: 1,
            bytes_in_per_update: 0.0,
            bytes_out_per_update: 0.0,
            precision: Precision::Double,
        }
    }

    pub fn with_pes(self, num_pes: u32) -> Self {
        PerfConfig { num_pes, ..self }
    }

    /// Streamed bytes of the Euler workload: one node record (4 state values and
    /// 3 constants) and one element record (3 faces, each 3 values plus two
    /// 16-bit indices) in, 4 state values out.
    pub fn with_euler_traffic(self) -> Self {
        let w = self.precision.bytes() as f64;
        PerfConfig {
            bytes_in_per_update: 7.0 * w + 3.0 * (3.0 * w + 4.0),
            bytes_out_per_update: 4.0 * w,
            ..self
        }
    }

    fn check(&self) -> Result<(), SimError> {
        let ok = self.clock_hz > 0.0
            && self.cycles_per_update > 0.0
            && self.flops_per_update > 0
            && self.num_pes > 0
            && self.bytes_in_per_update >= 0.0
            && self.bytes_out_per_update >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfReport {
    /// Per processing element.
    pub updates_per_sec: f64,
    pub gflops: f64,
    pub num_pes: u32,
    pub aggregate_updates_per_sec: f64,
    pub aggregate_gflops: f64,
    pub flops_per_update: u32,
    /// Off-chip bandwidth needed by all PEs, from the configured byte counts.
    pub bandwidth_gbs: f64,
    /// Published figure for the same precision, for comparison only.
    pub quoted_bandwidth_gbs: f64,
}

impl PerfReport {
    pub const CSV_HEADER: &'static str =
        "updates_per_sec,gflops,num_pes,aggregate_updates_per_sec,aggregate_gflops,flops_per_update,bandwidth_gbs,quoted_bandwidth_gbs";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.updates_per_sec,
            self.gflops,
            self.num_pes,
            self.aggregate_updates_per_sec,
            self.aggregate_gflops,
            self.flops_per_update,
            self.bandwidth_gbs,
            self.quoted_bandwidth_gbs
        )
    }
}

pub fn perf_model(cfg: &PerfConfig) -> Result<PerfReport, SimError> {
    cfg.check()?;
    let ups = cfg.clock_hz / cfg.cycles_per_update;
    let gflops = ups * cfg.flops_per_update as f64 / 1e9;
    let pes = cfg.num_pes as f64;
    let quoted = QUOTED_BANDWIDTH_GBS.iter().find(|(p, _)| *p == cfg.precision).map_or(0.0, |&(_, b)| b);
    Ok(PerfReport {
        updates_per_sec: ups,
        gflops,
        num_pes: cfg.num_pes,
        aggregate_updates_per_sec: ups * pes,
        aggregate_gflops: gflops * pes,
        flops_per_update: cfg.flops_per_update,
        bandwidth_gbs: (cfg.bytes_in_per_update + cfg.bytes_out_per_update) * ups * pes / 1e9,
        quoted_bandwidth_gbs: quoted,
    })
}

/// Ratio of aggregate update rates. Both reports must describe the same workload.
pub fn speedup(model: &PerfReport, baseline: &PerfReport) -> Result<f64, SimError> {
    if model.flops_per_update != baseline.flops_per_update {
        return Err(SimError::WorkloadMismatch(model.flops_per_update, baseline.flops_per_update));
    }
    Ok(model.aggregate_updates_per_sec / baseline.aggregate_updates_per_sec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn accelerator_figures() {
        let one = perf_model(&PerfConfig::accelerator()).unwrap();
        assert!(close(one.updates_per_sec, 130e6, 1e-12));
        assert!(close(one.gflops, 27.69, 1e-3));
        let three = perf_model(&PerfConfig::accelerator().with_pes(3)).unwrap();
        assert!(close(three.aggregate_gflops, 83.07, 1e-3));
    }

    #[test]
    fn cpu_baseline_and_speedups() {
        let cpu = perf_model(&PerfConfig::measured(4.22e6, 213)).unwrap();
        assert!(close(cpu.gflops * 1e3, 898.86, 1e-4));
        let one = perf_model(&PerfConfig::accelerator()).unwrap();
        let three = perf_model(&PerfConfig::accelerator().with_pes(3)).unwrap();
        assert!(close(speedup(&one, &cpu).unwrap(), 30.8, 2e-3));
        assert!(close(speedup(&three, &cpu).unwrap(), 92.4, 2e-3));
        assert_eq!(speedup(&cpu, &cpu).unwrap(), 1.0);
        let other = perf_model(&PerfConfig::measured(4.22e6, 100)).unwrap();
        assert!(speedup(&one, &other).is_err());
    }

    #[test]
    fn invalid_config() {
        let bad = PerfConfig { cycles_per_update: 0.0, ..PerfConfig::accelerator() };
        assert!(perf_model(&bad).is_err());
    }
}
