use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use meshstream::meshcore::{self, serial_bandwidth, Graph};
use meshstream::Labeling;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn meshstream(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshstream"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("MESHSTREAM_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn grid_file(dir: &Path, rows: usize, cols: usize) -> PathBuf {
    let p = dir.join(format!("grid{rows}x{cols}.txt"));
    fs::write(&p, meshcore::edge_list_text(&Graph::grid(rows, cols))).unwrap();
    p
}

#[test]
fn reorder_writes_labeling_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let input = grid_file(dir.path(), 6, 9);
    let o = meshstream(dir.path(), &["reorder", input.to_str().unwrap(), "--algo", "gps"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let f = Labeling::read(dir.path().join("grid6x9.gps.lab")).unwrap();
    let sbw = serial_bandwidth(&Graph::grid(6, 9), &f).unwrap();
    let csv = fs::read_to_string(dir.path().join("grid6x9.gps.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# meshstream reorder v1");
    assert_eq!(lines[1], "n,algo,classical_bw,s_bw,wall_seconds");
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row[0], "54");
    assert_eq!(row[3], sbw.to_string());
}

#[test]
fn exact_runs_on_tiny_graphs_and_refuses_large_ones() {
    let dir = tempfile::tempdir().unwrap();
    let small = grid_file(dir.path(), 2, 4);
    let o = meshstream(dir.path(), &["--json", "reorder", small.to_str().unwrap(), "--algo", "exact"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 8);
    let large = grid_file(dir.path(), 3, 4);
    let o = meshstream(dir.path(), &["reorder", large.to_str().unwrap(), "--algo", "exact"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn same_seed_same_labeling() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("step_cl30.msh.gz");
    let read = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        let o = meshstream(&out, &["--seed", seed, "reorder", mesh.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        fs::read_to_string(out.join("step_cl30.am1.lab")).unwrap()
    };
    assert_eq!(read("a", "9"), read("b", "9"));
}

#[test]
fn pattern_then_checked_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let input = grid_file(dir.path(), 12, 12);
    let o = meshstream(dir.path(), &["pattern", input.to_str().unwrap(), "--bound", "8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let pat = dir.path().join("grid12x12.b8.pat");
    let o = meshstream(
        dir.path(),
        &["--json", "simulate", input.to_str().unwrap(), "--pattern", pat.to_str().unwrap(), "--check"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["misses"], 0);
    assert_eq!(v["check"]["violations"].as_array().unwrap().len(), 0);
    let csv = fs::read_to_string(dir.path().join("grid12x12.b8.csv")).unwrap();
    assert!(csv.starts_with("# meshstream pattern v1\n"));
}

#[test]
fn checked_simulation_fails_on_a_bad_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let input = grid_file(dir.path(), 8, 8);
    // row-major order spans two grid rows, more than the declared bound
    let pat = dir.path().join("rowmajor.pat");
    let mut text = "64 6 1 64\n".to_string();
    for v in 0..64 {
        text.push_str(&format!("{v} 1\n"));
    }
    fs::write(&pat, text).unwrap();
    let o = meshstream(dir.path(), &["simulate", input.to_str().unwrap(), "--pattern", pat.to_str().unwrap(), "--check"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("violations"));
}

#[test]
fn bound_not_above_max_degree_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = grid_file(dir.path(), 4, 4);
    let o = meshstream(dir.path(), &["pattern", input.to_str().unwrap(), "--bound", "4"]);
    assert_eq!(code(&o), 2);
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn missing_input_and_bad_usage_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&meshstream(dir.path(), &["reorder", "/no/such/file.msh"])), 2);
    assert_eq!(code(&meshstream(dir.path(), &["reorder"])), 2);
    assert_eq!(code(&meshstream(dir.path(), &["frobnicate"])), 2);
}

#[test]
fn solve_writes_fields_under_out() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("step_cl30.msh.gz");
    let o = meshstream(
        dir.path(),
        &["--json", "solve", mesh.to_str().unwrap(), "--tend", "0.01", "--order", "am1", "--svg", "rho.svg", "--csv", "rho.csv"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n_tri"], 6966);
    assert!(v["stats"]["steps"].as_u64().unwrap() > 0);
    let csv = fs::read_to_string(dir.path().join("rho.csv")).unwrap();
    assert!(csv.starts_with("# meshstream field v1\ncell,x,y,rho,u,v,p\n"));
    assert_eq!(csv.lines().count(), 2 + 6966);
    assert!(fs::read_to_string(dir.path().join("rho.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn solve_threads_are_capped_by_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("step_cl30.msh.gz");
    let run = |threads: &str, env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_meshstream"));
        c.arg("--out").arg(dir.path()).args(["solve", mesh.to_str().unwrap(), "--max-steps", "5", "--tend", "1", "--csv", "f.csv", "--threads", threads]);
        match env {
            Some(v) => c.env("MESHSTREAM_THREADS", v),
            None => c.env_remove("MESHSTREAM_THREADS"),
        };
        let o = c.output().unwrap();
        (code(&o), fs::read_to_string(dir.path().join("f.csv")).unwrap_or_default())
    };
    let (c1, serial) = run("1", None);
    let (c2, capped) = run("4", Some("2"));
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(serial, capped);
    assert_eq!(run("2", Some("zero")).0, 2);
}

#[test]
fn diverging_case_is_an_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("step_cl30.msh.gz");
    let o = meshstream(dir.path(), &["solve", mesh.to_str().unwrap(), "--dt", "1.0", "--tend", "5"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn pipegen_plan_validates() {
    let dir = tempfile::tempdir().unwrap();
    let eq = fixture("lf_flux.eq");
    let o = meshstream(dir.path(), &["pipegen", eq.to_str().unwrap(), "--restarts", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let plan = meshstream::pipegen::load_plan(&fs::read_to_string(dir.path().join("lf_flux.plan.json")).unwrap()).unwrap();
    assert!(plan.clusters.iter().all(|c| c.io() <= 10));
    assert!(dir.path().join("lf_flux.plan.svg").exists());
}

#[test]
fn pipegen_syntax_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let eq = dir.path().join("bad.eq");
    fs::write(&eq, "y = a + * b\n").unwrap();
    assert_eq!(code(&meshstream(dir.path(), &["pipegen", eq.to_str().unwrap()])), 2);
}

#[test]
fn bench_rows_per_mesh_and_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("step_cl30.msh.gz");
    let o = meshstream(dir.path(), &["bench", mesh.to_str().unwrap(), "--orderings", "natural,gps,am1", "--runs", "1", "--steps", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[..2], ["# meshstream bench v1", "mesh,n_tri,ordering,updates_per_sec"]);
    assert_eq!(lines.len(), 5);
    for (line, ord) in lines[2..].iter().zip(["natural", "gps", "am1"]) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(&f[..3], ["step_cl30", "6966", ord]);
        assert!(f[3].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn perf_reports_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = meshstream(dir.path(), &["--json", "perf"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["accelerator"]["updates_per_sec"].as_f64().unwrap() - 130e6).abs() < 1.0);
    assert!(v["speedup"].as_f64().unwrap() > 1.0);
}
