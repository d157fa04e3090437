use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{cell_update, FaceGeom};
use super::state::{Conservative, Primitive, GAMMA};
use super::EulerError;
use crate::meshcore::{BoundaryKind, FaceLink, Labeling, TriMesh};

/// Cell-centered state on a triangle mesh plus the precomputed face geometry.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub gamma: f64,
    /// Current conservative state per triangle, `[rho, rho*u, rho*v, E]`.
    pub state: Vec<[f64; 4]>,
    next: Vec<[f64; 4]>,
    pub volume: Vec<f64>,
    pub faces: Vec<[FaceGeom<f64>; 3]>,
    pub links: Vec<[FaceLink; 3]>,
    pub corners: Vec<[[f64; 2]; 3]>,
    /// Triangle id in the source mesh for each stored cell.
    pub original: Vec<usize>,
    /// Free-stream state imposed at inflow faces.
    pub inflow: [f64; 4],
    pub dissipation: bool,
}

impl FlowField {
    /// Field on `mesh` with cells stored in mesh order.
    pub fn new(
        mesh: &TriMesh,
        gamma: f64,
        inflow: Primitive,
        init: impl Fn([f64; 2]) -> Primitive,
    ) -> Result<Self, EulerError> {
        let n = mesh.num_triangles();
        let mut faces = Vec::with_capacity(n);
        let mut state = Vec::with_capacity(n);
        let mut corners = Vec::with_capacity(n);
        for t in 0..n {
            faces.push(std::array::from_fn(|k| {
                let s = mesh.scaled_normal(t, k);
                let len = s[0].hypot(s[1]);
                FaceGeom { nx: s[0] / len, ny: s[1] / len, len }
            }));
            state.push(init(mesh.centroid(t)).to_conservative(gamma)?.to_array());
            let tri = mesh.triangles()[t];
            corners.push(tri.map(|v| mesh.vertices()[v]));
        }
        Ok(FlowField {
            gamma,
            next: state.clone(),
            state,
            volume: (0..n).map(|t| mesh.area(t)).collect(),
            faces,
            links: (0..n).map(|t| *mesh.links(t)).collect(),
            corners,
            original: (0..n).collect(),
            inflow: inflow.to_conservative(gamma)?.to_array(),
            dissipation: true,
        })
    }

    /// Same as [`FlowField::new`], with cells stored in the order of `f`.
    pub fn with_labeling(
        mesh: &TriMesh,
        f: &Labeling,
        gamma: f64,
        inflow: Primitive,
        init: impl Fn([f64; 2]) -> Primitive,
    ) -> Result<Self, EulerError> {
        let renumbered = mesh.renumbered(f)?;
        let mut field = Self::new(&renumbered, gamma, inflow, init)?;
        field.original = f.order();
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    pub fn primitive(&self, t: usize) -> Result<Primitive, EulerError> {
        Conservative::from_array(self.state[t]).to_primitive(self.gamma)
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let c = &self.corners[t];
        [(c[0][0] + c[1][0] + c[2][0]) / 3.0, (c[0][1] + c[1][1] + c[2][1]) / 3.0]
    }

    /// Total mass `sum rho V`.
    pub fn total_mass(&self) -> f64 {
        self.state.iter().zip(&self.volume).map(|(q, v)| q[0] * v).sum()
    }

    /// State across face `k` of cell `t`: the neighbor, or a virtual ghost cell.
    #[inline]
    fn across(&self, state: &[[f64; 4]], t: usize, k: usize) -> [f64; 4] {
        match self.links[t][k] {
            FaceLink::Interior(o) => state[o],
            FaceLink::Boundary(kind) => ghost(kind, &state[t], &self.faces[t][k], &self.inflow),
        }
    }

    /// Largest stable step for Courant number `cfl`.
    pub fn stable_dt(&self, cfl: f64) -> f64 {
        let g = self.gamma;
        let speed = |q: &[f64; 4], f: &FaceGeom<f64>| {
            let inv = 1.0 / q[0];
            let un = (q[1] * f.nx + q[2] * f.ny) * inv;
            let p = (g - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) * inv);
            (un, (g * p.max(0.0) * inv).sqrt())
        };
        let mut dt = f64::INFINITY;
        for t in 0..self.len() {
            let mut sum = 0.0;
            for k in 0..3 {
                let f = &self.faces[t][k];
                let (ul, cl) = speed(&self.state[t], f);
                let (ur, cr) = speed(&self.across(&self.state, t, k), f);
                sum += (0.5 * (ul + ur).abs() + 0.5 * (cl + cr)) * f.len;
            }
            dt = dt.min(self.volume[t] / sum);
        }
        cfl * dt
    }

    fn update_cell(&self, t: usize, dt: f64) -> [f64; 4] {
        let nbrs = [self.across(&self.state, t, 0), self.across(&self.state, t, 1), self.across(&self.state, t, 2)];
        cell_update(
            &self.state[t],
            &nbrs,
            &self.faces[t],
            dt,
            self.volume[t],
            self.gamma,
            self.gamma - 1.0,
            self.dissipation,
        )
    }

    /// One forward Euler step; every cell reads the states of the previous level.
    pub fn timestep(&mut self, dt: f64) -> Result<(), EulerError> {
        let mut next = std::mem::take(&mut self.next);
        for (t, out) in next.iter_mut().enumerate() {
            *out = self.update_cell(t, dt);
        }
        self.commit(next)
    }

    /// [`FlowField::timestep`] spread over the current rayon pool; results are identical.
    pub fn timestep_parallel(&mut self, dt: f64) -> Result<(), EulerError> {
        let mut next = std::mem::take(&mut self.next);
        next.par_iter_mut().enumerate().with_min_len(1024).for_each(|(t, out)| *out = self.update_cell(t, dt));
        self.commit(next)
    }

    fn commit(&mut self, next: Vec<[f64; 4]>) -> Result<(), EulerError> {
        let g1 = self.gamma - 1.0;
        let bad = next.iter().position(|q| {
            let p = g1 * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
            !(q[0] > 0.0 && p > 0.0)
        });
        if let Some(t) = bad {
            let q = next[t];
            self.next = next;
            let p = g1 * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
            return Err(EulerError::NonPhysical { cell: Some(self.original[t]), rho: q[0], p });
        }
        self.next = std::mem::replace(&mut self.state, next);
        Ok(())
    }

    /// States in source-mesh order.
    pub fn states_in_mesh_order(&self) -> Vec<[f64; 4]> {
        let mut out = vec![[0.0; 4]; self.len()];
        for (i, &t) in self.original.iter().enumerate() {
            out[t] = self.state[i];
        }
        out
    }
}

/// Virtual state beyond a boundary face.
#[inline]
fn ghost(kind: BoundaryKind, own: &[f64; 4], f: &FaceGeom<f64>, inflow: &[f64; 4]) -> [f64; 4] {
    match kind {
        BoundaryKind::Wall => {
            let mn = own[1] * f.nx + own[2] * f.ny;
            [own[0], own[1] - 2.0 * mn * f.nx, own[2] - 2.0 * mn * f.ny, own[3]]
        }
        BoundaryKind::Inflow => *inflow,
        BoundaryKind::Outflow => *own,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Initial {
    /// The inflow state everywhere.
    Inflow,
    Uniform(Primitive),
    /// `left` where the centroid has `x < at`, `right` elsewhere.
    SplitX { at: f64, left: Primitive, right: Primitive },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseConfig {
    pub gamma: f64,
    pub inflow: Primitive,
    pub initial: Initial,
    pub cfl: f64,
    /// Fixed step; `None` uses the CFL condition every step.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub max_steps: Option<usize>,
    /// Worker threads for the update; 1 runs on the calling thread.
    pub threads: usize,
}

impl Default for CaseConfig {
    /// Mach 3 free stream: `rho = 1.4`, `p = 1`, so `c = 1` and `u = 3`.
    fn default() -> Self {
        CaseConfig {
            gamma: GAMMA,
            inflow: Primitive { rho: 1.4, u: 3.0, v: 0.0, p: 1.0 },
            initial: Initial::Inflow,
            cfl: 0.4,
            dt: None,
            t_end: 4.0,
            max_steps: None,
            threads: 1,
        }
    }
}

impl CaseConfig {
    /// `key = value` lines; `#` starts a comment. Unknown keys are an error.
    pub fn from_text(text: &str) -> Result<Self, EulerError> {
        let mut cfg = CaseConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| EulerError::Config { line: i + 1, msg: msg.to_string() };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || value.parse::<f64>().map_err(|_| err("value is not a number"));
            match key {
                "gamma" => cfg.gamma = num()?,
                "inflow_rho" => cfg.inflow.rho = num()?,
                "inflow_u" => cfg.inflow.u = num()?,
                "inflow_v" => cfg.inflow.v = num()?,
                "inflow_p" => cfg.inflow.p = num()?,
                "cfl" => cfg.cfl = num()?,
                "t_end" => cfg.t_end = num()?,
                "dt" => cfg.dt = Some(num()?),
                "max_steps" => cfg.max_steps = Some(value.parse().map_err(|_| err("not an integer"))?),
                _ => return Err(err(&format!("unknown key {key:?}"))),
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), EulerError> {
        let ok = self.gamma > 1.0
            && self.cfl > 0.0
            && self.t_end >= 0.0
            && self.dt.is_none_or(|d| d > 0.0)
            && self.inflow.rho > 0.0
            && self.inflow.p > 0.0;
        if ok {
            Ok(())
        } else {
            Err(EulerError::Config { line: 0, msg: format!("invalid case configuration {self:?}") })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: usize,
    pub t: f64,
    pub wall_seconds: f64,
    pub cell_updates: u64,
    pub updates_per_sec: f64,
}

/// Advances the configured case from its initial state to `t_end`.
///
/// With a labeling, cells are stored and swept in label order.
pub fn run_case(mesh: &TriMesh, cfg: &CaseConfig, labeling: Option<&Labeling>) -> Result<(FlowField, RunStats), EulerError> {
    cfg.check()?;
    let init = |c: [f64; 2]| match cfg.initial {
        Initial::Inflow => cfg.inflow,
        Initial::Uniform(w) => w,
        Initial::SplitX { at, left, right } => {
            if c[0] < at {
                left
            } else {
                right
            }
        }
    };
    let mut field = match labeling {
        Some(f) => FlowField::with_labeling(mesh, f, cfg.gamma, cfg.inflow, init)?,
        None => FlowField::new(mesh, cfg.gamma, cfg.inflow, init)?,
    };
    let pool = if cfg.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| EulerError::Config { line: 0, msg: e.to_string() })?,
        )
    } else {
        None
    };
    let started = Instant::now();
    let mut t = 0.0;
    let mut steps = 0;
    while t < cfg.t_end && cfg.max_steps.is_none_or(|m| steps < m) {
        let dt = cfg.dt.unwrap_or_else(|| field.stable_dt(cfg.cfl)).min(cfg.t_end - t);
        let result = match &pool {
            Some(p) => p.install(|| field.timestep_parallel(dt)),
            None => field.timestep(dt),
        };
        result.map_err(|e| match e {
            EulerError::NonPhysical { cell, rho, p } => EulerError::Diverged { step: steps + 1, cell, rho, p },
            other => other,
        })?;
        t += dt;
        steps += 1;
    }
    let wall = started.elapsed().as_secs_f64();
    let updates = steps as u64 * field.len() as u64;
    Ok((
        field,
        RunStats {
            steps,
            t,
            wall_seconds: wall,
            cell_updates: updates,
            updates_per_sec: if wall > 0.0 { updates as f64 / wall } else { 0.0 },
        },
    ))
}

/// Cell updates per second of plain serial timesteps, one figure per run.
///
/// Each run builds a fresh field in the order of `labeling` (mesh order when
/// `None`) and times `steps` steps of the stable step for the initial state;
/// setup is not timed.
pub fn throughput(
    mesh: &TriMesh,
    cfg: &CaseConfig,
    labeling: Option<&Labeling>,
    steps: usize,
    runs: usize,
) -> Result<Vec<f64>, EulerError> {
    let mut rates = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut field = match labeling {
            Some(f) => FlowField::with_labeling(mesh, f, cfg.gamma, cfg.inflow, |_| cfg.inflow)?,
            None => FlowField::new(mesh, cfg.gamma, cfg.inflow, |_| cfg.inflow)?,
        };
        let dt = field.stable_dt(cfg.cfl);
        let started = Instant::now();
        for _ in 0..steps {
            field.timestep(dt)?;
        }
        let wall = started.elapsed().as_secs_f64();
        rates.push((steps * field.len()) as f64 / wall.max(1e-12));
    }
    Ok(rates)
}
