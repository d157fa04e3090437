use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use meshstream::accesspattern::{generate_bounded_pattern, validate_pattern, AccessPattern, PatternError};
use meshstream::eulerfv::{self, CaseConfig, EulerError, SvgOptions};
use meshstream::meshcore::{self, load_gmsh, serial_bandwidth, MeshError, TagMap};
use meshstream::pipegen::{self, Latencies, PipegenError};
use meshstream::reorder::{self, ReorderError};
use meshstream::streamsim::{perf_model, simulate_stream, speedup, MemoryConfig, PerfConfig, SimError, SimReport, StreamSource};
use meshstream::{Graph, Labeling, TriMesh};

const THREADS_ENV: &str = "MESHSTREAM_THREADS";

#[derive(Parser)]
#[command(name = "meshstream", version, about = "Mesh renumbering, access patterns, streaming simulation, Euler solver and pipeline planning")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = reorder::DEFAULT_SEED)]
    seed: u64,
    /// Directory for all written files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Print the result summary as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Gps,
    Am1,
    Exact,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Ordering {
    Natural,
    Gps,
    Am1,
}

#[derive(Subcommand)]
enum Cmd {
    /// Relabel a mesh (.msh, .msh.gz) or edge list and report bandwidths.
    Reorder {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "am1")]
        algo: Algo,
    },
    /// Generate a bounded-bandwidth access pattern.
    Pattern {
        input: PathBuf,
        #[arg(long)]
        bound: usize,
    },
    /// Stream a labeling or pattern through the memory unit model.
    Simulate {
        input: PathBuf,
        #[arg(long, conflicts_with = "pattern")]
        labeling: Option<PathBuf>,
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Window capacity in node records; defaults to the pattern bound + 1.
        #[arg(long)]
        capacity: Option<usize>,
        #[arg(long, default_value_t = 16)]
        miss_penalty: u64,
        /// Validate the pattern and fail when it has violations.
        #[arg(long, requires = "pattern")]
        check: bool,
    },
    /// Run an Euler case on a tagged mesh.
    Solve {
        mesh: PathBuf,
        /// Case file with `key = value` lines.
        #[arg(long)]
        case: Option<PathBuf>,
        #[arg(long)]
        tend: Option<f64>,
        #[arg(long)]
        cfl: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, conflicts_with = "labeling", value_enum)]
        order: Option<Ordering>,
        #[arg(long)]
        labeling: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Plan an arithmetic pipeline from an equation file.
    Pipegen {
        equations: PathBuf,
        #[arg(long)]
        latencies: Option<PathBuf>,
        #[arg(long, default_value_t = pipegen::DEFAULT_IO_LIMIT)]
        io_limit: usize,
        #[arg(long, default_value_t = pipegen::DEFAULT_BAND_ROWS)]
        band_rows: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Measure serial solver throughput per mesh and ordering.
    Bench {
        #[arg(required = true)]
        meshes: Vec<PathBuf>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "natural,am1")]
        orderings: Vec<Ordering>,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Print the FLOP breakdown of one cell update and the performance model.
    Perf {
        /// Measured CPU throughput to compare against, in updates per second.
        #[arg(long, default_value_t = 4.22e6)]
        cpu_rate: f64,
        #[arg(long, default_value_t = 3)]
        pes: u32,
    },
}

/// Exit status 2 for bad inputs or violated preconditions, 1 for failures while running.
enum Failure {
    Precondition(String),
    Internal(String),
}

fn precondition(e: impl Display) -> Failure {
    Failure::Precondition(e.to_string())
}

fn internal(e: impl Display) -> Failure {
    Failure::Internal(e.to_string())
}

impl From<MeshError> for Failure {
    fn from(e: MeshError) -> Self {
        precondition(e)
    }
}

impl From<ReorderError> for Failure {
    fn from(e: ReorderError) -> Self {
        precondition(e)
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        precondition(e)
    }
}

impl From<PatternError> for Failure {
    fn from(e: PatternError) -> Self {
        match e {
            PatternError::Io(_) => internal(e),
            _ => precondition(e),
        }
    }
}

impl From<EulerError> for Failure {
    fn from(e: EulerError) -> Self {
        match e {
            EulerError::Diverged { .. } | EulerError::Riemann(_) | EulerError::Io(_) => internal(e),
            _ => precondition(e),
        }
    }
}

impl From<PipegenError> for Failure {
    fn from(e: PipegenError) -> Self {
        match e {
            PipegenError::Io(_) | PipegenError::Json(_) => internal(e),
            _ => precondition(e),
        }
    }
}

struct Ctx {
    out: PathBuf,
    json: bool,
    seed: u64,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf, Failure> {
        let p = self.path(name);
        fs::write(&p, contents).map_err(|e| internal(format!("{}: {e}", p.display())))?;
        Ok(p)
    }

    fn report(&self, value: serde_json::Value, text: &str) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        } else {
            print!("{text}");
        }
    }
}

fn csv(schema: &str, header: &str, rows: &[String]) -> String {
    let mut s = format!("# meshstream {schema} v1\n{header}\n");
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

fn stem(p: &Path) -> String {
    let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into());
    let name = name.strip_suffix(".gz").unwrap_or(&name);
    match name.rsplit_once('.') {
        Some((s, _)) if !s.is_empty() => s.to_string(),
        _ => name.to_string(),
    }
}

fn require(p: &Path) -> Result<(), Failure> {
    if p.exists() {
        Ok(())
    } else {
        Err(precondition(format!("{}: no such file", p.display())))
    }
}

fn is_mesh(p: &Path) -> bool {
    let s = p.to_string_lossy();
    s.ends_with(".msh") || s.ends_with(".msh.gz")
}

fn load_mesh(p: &Path) -> Result<TriMesh, Failure> {
    require(p)?;
    Ok(load_gmsh(p, &TagMap::default())?)
}

/// Dual graph of a mesh file, or an edge-list graph.
fn load_graph(p: &Path) -> Result<Graph, Failure> {
    if is_mesh(p) {
        Ok(load_mesh(p)?.dual_graph())
    } else {
        require(p)?;
        Ok(meshcore::load_edge_list(p)?)
    }
}

fn load_labeling(p: &Path) -> Result<Labeling, Failure> {
    require(p)?;
    Ok(Labeling::read(p)?)
}

fn threads_cap() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| precondition(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn order_of(ordering: Ordering, g: &Graph, seed: u64) -> Result<Option<Labeling>, Failure> {
    Ok(match ordering {
        Ordering::Natural => None,
        Ordering::Gps => Some(reorder::gps_reorder(g)?),
        Ordering::Am1 => Some(reorder::am1_reorder(g, seed)?),
    })
}

fn ordering_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Natural => "natural",
        Ordering::Gps => "gps",
        Ordering::Am1 => "am1",
    }
}

fn cmd_reorder(ctx: &Ctx, input: &Path, algo: Algo) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let started = Instant::now();
    let (f, name) = match algo {
        Algo::Gps => (reorder::gps_reorder(&g)?, "gps"),
        Algo::Am1 => (reorder::am1_reorder(&g, ctx.seed)?, "am1"),
        Algo::Exact => (reorder::exact_min_sbw(&g)?.0, "exact"),
    };
    let secs = started.elapsed().as_secs_f64();
    let bw = meshcore::classical_bandwidth(&g, &f)?;
    let sbw = serial_bandwidth(&g, &f)?;
    let base = stem(input);
    let lab = ctx.path(&format!("{base}.{name}.lab"));
    f.write(&lab).map_err(internal)?;
    let row = format!("{},{name},{bw},{sbw},{secs:.6}", g.n());
    ctx.write(&format!("{base}.{name}.csv"), csv("reorder", "n,algo,classical_bw,s_bw,wall_seconds", &[row]))?;
    ctx.report(
        json!({"n": g.n(), "algo": name, "classical_bw": bw, "s_bw": sbw, "wall_seconds": secs, "labeling": lab}),
        &format!("n = {}  algo = {name}  BW = {bw}  S_BW = {sbw}  ({secs:.3} s)\nlabeling: {}\n", g.n(), lab.display()),
    );
    Ok(())
}

fn cmd_pattern(ctx: &Ctx, input: &Path, bound: usize) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let started = Instant::now();
    let p = generate_bounded_pattern(&g, bound, ctx.seed)?;
    let secs = started.elapsed().as_secs_f64();
    let base = stem(input);
    let file = ctx.path(&format!("{base}.b{bound}.pat"));
    p.write(&file).map_err(internal)?;
    let row = format!("{},{bound},{},{},{:.6},{secs:.6}", g.n(), p.parts, p.overall_length(), p.k());
    ctx.write(&format!("{base}.b{bound}.csv"), csv("pattern", "n,bound,parts,overall_length,k,wall_seconds", &[row]))?;
    ctx.report(
        json!({"n": g.n(), "bound": bound, "parts": p.parts, "overall_length": p.overall_length(), "k": p.k(), "wall_seconds": secs, "pattern": file}),
        &format!(
            "bound = {bound}  parts = {}  length = {}  k = {:.4}  ({secs:.3} s)\npattern: {}\n",
            p.parts,
            p.overall_length(),
            p.k(),
            file.display()
        ),
    );
    Ok(())
}

fn cmd_simulate(
    ctx: &Ctx,
    input: &Path,
    labeling: Option<&Path>,
    pattern: Option<&Path>,
    capacity: Option<usize>,
    miss_penalty: u64,
    check: bool,
) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let lab;
    let pat = match pattern {
        Some(p) => {
            require(p)?;
            Some(AccessPattern::read(p)?)
        }
        None => None,
    };
    let (src, default_capacity) = match (labeling, &pat) {
        (_, Some(p)) => (StreamSource::Pattern(p), Some(p.bound + 1)),
        (Some(l), None) => {
            lab = load_labeling(l)?;
            let sbw = serial_bandwidth(&g, &lab)?;
            (StreamSource::Labeling(&lab), Some(sbw + 1))
        }
        (None, None) => {
            lab = Labeling::identity(g.n());
            (StreamSource::Labeling(&lab), None)
        }
    };
    let capacity = capacity
        .or(default_capacity)
        .ok_or_else(|| precondition("--capacity is required without a labeling or pattern"))?;
    let mem = MemoryConfig { miss_penalty, ..MemoryConfig::with_capacity(capacity) };
    let report: SimReport = simulate_stream(&g, src, &mem)?;
    let mut text = format!(
        "entries = {}  capacity = {capacity}  misses = {}  cycles = {}  bytes in/out = {}/{}\n",
        report.entries, report.misses, report.cycles, report.bytes_in, report.bytes_out
    );
    let mut value = serde_json::to_value(&report).map_err(internal)?;
    let mut invalid = None;
    if let (true, Some(p)) = (check, &pat) {
        let v = validate_pattern(&g, p)?;
        text.push_str(&format!(
            "check: violations = {}  never executed = {}  executed repeatedly = {}\n",
            v.violations.len(),
            v.never_executed.len(),
            v.executed_repeatedly.len()
        ));
        value["check"] = serde_json::to_value(&v).map_err(internal)?;
        if !v.is_valid() {
            invalid = Some(format!("pattern is invalid: {} violations", v.violations.len()));
        }
    }
    ctx.write(&format!("{}.sim.csv", stem(input)), csv("simulate", SimReport::CSV_HEADER, &[report.csv_row()]))?;
    ctx.report(value, &text);
    invalid.map_or(Ok(()), |m| Err(precondition(m)))
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    ctx: &Ctx,
    mesh_path: &Path,
    case: Option<&Path>,
    tend: Option<f64>,
    cfl: Option<f64>,
    dt: Option<f64>,
    max_steps: Option<usize>,
    order: Option<Ordering>,
    labeling: Option<&Path>,
    threads: Option<usize>,
    svg: Option<&Path>,
    csv_path: Option<&Path>,
) -> Result<(), Failure> {
    let mesh = load_mesh(mesh_path)?;
    let mut cfg = match case {
        Some(p) => {
            require(p)?;
            CaseConfig::from_text(&fs::read_to_string(p).map_err(precondition)?)?
        }
        None => CaseConfig::default(),
    };
    if let Some(t) = tend {
        cfg.t_end = t;
    }
    if let Some(c) = cfl {
        cfg.cfl = c;
    }
    if dt.is_some() {
        cfg.dt = dt;
    }
    if max_steps.is_some() {
        cfg.max_steps = max_steps;
    }
    let cap = threads_cap()?;
    cfg.threads = threads.unwrap_or(1).min(cap.unwrap_or(usize::MAX)).max(1);
    let f = match (labeling, order) {
        (Some(p), _) => Some(load_labeling(p)?),
        (None, Some(o)) => order_of(o, &mesh.dual_graph(), ctx.seed)?,
        (None, None) => None,
    };
    let (field, stats) = eulerfv::run_case(&mesh, &cfg, f.as_ref())?;
    let (lo, hi) = field.state.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), q| (a.min(q[0]), b.max(q[0])));
    let mut written = Vec::new();
    if let Some(p) = svg {
        let path = ctx.path(&p.to_string_lossy());
        let file = fs::File::create(&path).map_err(internal)?;
        eulerfv::write_svg(&field, &SvgOptions::default(), std::io::BufWriter::new(file))?;
        written.push(path);
    }
    if let Some(p) = csv_path {
        let path = ctx.path(&p.to_string_lossy());
        let file = fs::File::create(&path).map_err(internal)?;
        eulerfv::write_csv(&field, std::io::BufWriter::new(file))?;
        written.push(path);
    }
    let row = format!("{},{},{},{:.6},{:.1},{lo},{hi}", field.len(), stats.steps, stats.t, stats.wall_seconds, stats.updates_per_sec);
    ctx.write(
        &format!("{}.solve.csv", stem(mesh_path)),
        csv("solve", "n_tri,steps,t,wall_seconds,updates_per_sec,rho_min,rho_max", &[row]),
    )?;
    let mut text = format!(
        "triangles = {}  steps = {}  t = {}  {:.3} s  {:.3e} updates/s  rho in [{lo:.4}, {hi:.4}]\n",
        field.len(),
        stats.steps,
        stats.t,
        stats.wall_seconds,
        stats.updates_per_sec
    );
    for p in &written {
        text.push_str(&format!("wrote {}\n", p.display()));
    }
    ctx.report(json!({"n_tri": field.len(), "stats": stats, "rho_min": lo, "rho_max": hi, "files": written}), &text);
    Ok(())
}

fn cmd_pipegen(
    ctx: &Ctx,
    equations: &Path,
    latencies: Option<&Path>,
    io_limit: usize,
    band_rows: usize,
    restarts: usize,
) -> Result<(), Failure> {
    require(equations)?;
    let text = fs::read_to_string(equations).map_err(precondition)?;
    let lat = match latencies {
        Some(p) => {
            require(p)?;
            Latencies::from_text(&fs::read_to_string(p).map_err(precondition)?)?
        }
        None => Latencies::default(),
    };
    let raw = pipegen::parse_equations(&text)?;
    let mut g = pipegen::level_and_insert_delays(&raw, &lat)?;
    let order = pipegen::order_horizontally(&mut g, ctx.seed, restarts);
    let plan = pipegen::cluster_rectangles(&g, io_limit, band_rows)?;
    let base = stem(equations);
    let json_path = ctx.write(&format!("{base}.plan.json"), pipegen::emit_plan(&plan)?)?;
    let svg_path = ctx.write(&format!("{base}.plan.svg"), pipegen::render_svg(&plan))?;
    let hist = plan.io_histogram();
    ctx.report(
        json!({
            "operators": g.count_ops(),
            "delays": g.count_delays(),
            "levels": g.num_levels(),
            "depth_cycles": g.depth(),
            "objective_barycenter": order.barycenter,
            "objective_refined": order.refined,
            "clusters": plan.clusters.len(),
            "fifos": plan.fifo_edges().len(),
            "io_histogram": hist,
            "plan": json_path,
            "svg": svg_path,
        }),
        &format!(
            "operators = {}  delays = {}  levels = {}  depth = {} cycles\nobjective {} -> {}\nclusters = {}  fifos = {}  io histogram {:?}\nplan: {}\n",
            g.count_ops(),
            g.count_delays(),
            g.num_levels(),
            g.depth(),
            order.barycenter,
            order.refined,
            plan.clusters.len(),
            plan.fifo_edges().len(),
            hist,
            json_path.display()
        ),
    );
    Ok(())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn cmd_bench(ctx: &Ctx, meshes: &[PathBuf], orderings: &[Ordering], runs: usize, steps: usize) -> Result<(), Failure> {
    if runs == 0 || steps == 0 {
        return Err(precondition("--runs and --steps must be positive"));
    }
    let cfg = CaseConfig::default();
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut text = String::new();
    for path in meshes {
        let mesh = load_mesh(path)?;
        let g = mesh.dual_graph();
        for &o in orderings {
            let f = order_of(o, &g, ctx.seed)?;
            let rate = median(eulerfv::throughput(&mesh, &cfg, f.as_ref(), steps, runs)?);
            let name = stem(path);
            rows.push(format!("{name},{},{},{rate:.1}", mesh.num_triangles(), ordering_name(o)));
            text.push_str(&format!("{name:<16} {:>8} {:<8} {rate:.4e} updates/s\n", mesh.num_triangles(), ordering_name(o)));
            records.push(json!({"mesh": name, "n_tri": mesh.num_triangles(), "ordering": ordering_name(o), "updates_per_sec": rate}));
        }
    }
    ctx.write("bench.csv", csv("bench", "mesh,n_tri,ordering,updates_per_sec", &rows))?;
    ctx.report(json!(records), &text);
    Ok(())
}

fn cmd_perf(ctx: &Ctx, cpu_rate: f64, pes: u32) -> Result<(), Failure> {
    let flops = eulerfv::flop_breakdown(true);
    let model_flops = PerfConfig::accelerator().flops_per_update;
    let one = perf_model(&PerfConfig::accelerator().with_euler_traffic())?;
    let many = perf_model(&PerfConfig::accelerator().with_pes(pes).with_euler_traffic())?;
    let cpu = perf_model(&PerfConfig::measured(cpu_rate, model_flops))?;
    let (s1, sn) = (speedup(&one, &cpu)?, speedup(&many, &cpu)?);
    let mut text = format!("counted flops per update = {}  (model uses {model_flops})\n", flops.total);
    for (stage, n) in &flops.by_stage {
        text.push_str(&format!("  {stage:<14} {n}\n"));
    }
    text.push_str(&format!(
        "accelerator: {:.4e} updates/s  {:.2} GFLOPs  ({pes} PEs: {:.2} GFLOPs)  bandwidth {:.1} GB/s\ncpu: {:.2} MFLOPs\nspeedup: {s1:.1}x  ({pes} PEs: {sn:.1}x)\n",
        one.updates_per_sec,
        one.gflops,
        many.aggregate_gflops,
        one.bandwidth_gbs,
        cpu.gflops * 1e3
    ));
    ctx.write(
        "perf.csv",
        csv("perf", &format!("config,{}", meshstream::streamsim::PerfReport::CSV_HEADER), &[
            format!("accelerator,{}", one.csv_row()),
            format!("accelerator_{pes}pe,{}", many.csv_row()),
            format!("cpu,{}", cpu.csv_row()),
        ]),
    )?;
    ctx.report(json!({"flops": flops, "accelerator": one, "multi_pe": many, "cpu": cpu, "speedup": s1, "speedup_multi_pe": sn}), &text);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    fs::create_dir_all(&cli.out).map_err(|e| internal(format!("{}: {e}", cli.out.display())))?;
    let ctx = Ctx { out: cli.out, json: cli.json, seed: cli.seed };
    match cli.cmd {
        Cmd::Reorder { input, algo } => cmd_reorder(&ctx, &input, algo),
        Cmd::Pattern { input, bound } => cmd_pattern(&ctx, &input, bound),
        Cmd::Simulate { input, labeling, pattern, capacity, miss_penalty, check } => {
            cmd_simulate(&ctx, &input, labeling.as_deref(), pattern.as_deref(), capacity, miss_penalty, check)
        }
        Cmd::Solve { mesh, case, tend, cfl, dt, max_steps, order, labeling, threads, svg, csv } => cmd_solve(
            &ctx,
            &mesh,
            case.as_deref(),
            tend,
            cfl,
            dt,
            max_steps,
            order,
            labeling.as_deref(),
            threads,
            svg.as_deref(),
            csv.as_deref(),
        ),
        Cmd::Pipegen { equations, latencies, io_limit, band_rows, restarts } => {
            cmd_pipegen(&ctx, &equations, latencies.as_deref(), io_limit, band_rows, restarts)
        }
        Cmd::Bench { meshes, orderings, runs, steps } => cmd_bench(&ctx, &meshes, &orderings, runs, steps),
        Cmd::Perf { cpu_rate, pes } => cmd_perf(&ctx, cpu_rate, pes),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Precondition(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
