//! Sod shock tube on a triangulated strip, checked against the exact solution.

use super::riemann::{ExactRiemann, State1D};
use super::solver::{run_case, CaseConfig, FlowField, Initial};
use super::state::{Primitive, GAMMA};
use super::EulerError;
use crate::meshcore::trimesh::rectangle;
use crate::meshcore::{BoundaryKind, TriMesh};

pub const ROWS: usize = 5;
pub const T_END: f64 = 0.2;
pub const DIAPHRAGM: f64 = 0.5;

pub fn left() -> Primitive {
    Primitive { rho: 1.0, u: 0.0, v: 0.0, p: 1.0 }
}

pub fn right() -> Primitive {
    Primitive { rho: 0.125, u: 0.0, v: 0.0, p: 0.1 }
}

/// Unit-length strip of `nx` by [`ROWS`] square cells, each split in two.
/// Ends are outflow, long sides are walls.
pub fn strip(nx: usize) -> TriMesh {
    use BoundaryKind::*;
    rectangle(nx, ROWS, 1.0, ROWS as f64 / nx as f64, [Outflow, Outflow, Wall, Wall])
}

pub fn config() -> CaseConfig {
    CaseConfig {
        initial: Initial::SplitX { at: DIAPHRAGM, left: left(), right: right() },
        inflow: left(),
        t_end: T_END,
        ..CaseConfig::default()
    }
}

pub fn exact() -> Result<ExactRiemann, EulerError> {
    let one_d = |w: Primitive| State1D { rho: w.rho, u: w.u, p: w.p };
    ExactRiemann::new(one_d(left()), one_d(right()), GAMMA)
}

/// Area-weighted mean absolute density error per unit length.
pub fn l1_density_error(field: &FlowField, t: f64) -> Result<f64, EulerError> {
    let r = exact()?;
    let (mut err, mut area) = (0.0, 0.0);
    for c in 0..field.len() {
        let x = field.centroid(c)[0];
        let want = r.sample((x - DIAPHRAGM) / t).rho;
        err += (field.state[c][0] - want).abs() * field.volume[c];
        area += field.volume[c];
    }
    Ok(err / area)
}

/// Runs the tube on [`strip`]`(nx)` and returns the L1 density error.
pub fn run(nx: usize) -> Result<f64, EulerError> {
    let (field, stats) = run_case(&strip(nx), &config(), None)?;
    l1_density_error(&field, stats.t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_tubes_converge() {
        let e: Vec<f64> = [25, 50, 100].iter().map(|&n| run(n).unwrap()).collect();
        assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
        assert!(e[2] < 0.08, "{e:?}");
    }

    #[test]
    fn strip_uses_square_cells() {
        let m = strip(40);
        assert_eq!(m.num_triangles(), 2 * 40 * ROWS);
        assert!((m.area(0) - 0.5 / 1600.0).abs() < 1e-15);
    }
}
