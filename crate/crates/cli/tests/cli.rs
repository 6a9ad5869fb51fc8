use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn selfstab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfstab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn selfstab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn gen_run_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let o = selfstab(d, &["gen", "--nodes", "150", "--density", "0.05", "--seed", "4", "--out", "g.txt"]);
    assert_eq!(code(&o), 0);
    let header = fs::read_to_string(d.join("g.txt")).unwrap();
    assert!(header.lines().next().unwrap().starts_with("150 "));

    let o = selfstab(
        d,
        &[
            "run", "--graph", "g.txt", "--algo", "md2is", "--daemon", "central-random", "--init", "random:0.5",
            "--seed", "9", "--move-cap", "301", "--trace", "t.csv", "--final-state", "s.txt",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("converged=true"));

    let trace = fs::read_to_string(d.join("t.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("step,node,rule,new_state,enabled_count_after"));
    let moves = lines.count();
    assert!(moves <= 300);
    let last_enabled = trace.lines().last().unwrap().rsplit(',').next().unwrap();
    if moves > 0 {
        assert_eq!(last_enabled, "0");
    }

    let states = fs::read_to_string(d.join("s.txt")).unwrap();
    assert_eq!(states.lines().count(), 150);
    assert!(states.lines().all(|l| l.ends_with(" In") || l.ends_with(" Out")));

    let o = selfstab(d, &["verify", "--graph", "g.txt", "--state", "s.txt", "--property", "d2is"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "OK d2is");
}

#[test]
fn verify_reports_witness_and_exit_one() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("p3.txt"), "3 2\n0 1\n1 2\n").unwrap();
    fs::write(d.join("ends.txt"), "0 In\n1 Out\n2 In\n").unwrap();
    let o = selfstab(d, &["verify", "--graph", "p3.txt", "--state", "ends.txt", "--property", "d2is"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "FAIL d2is witness=0,2");

    let o = selfstab(d, &["verify", "--graph", "p3.txt", "--state", "ends.txt", "--property", "mis"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "OK mis");

    fs::write(d.join("none.txt"), "0 Out\n1 Out\n2 Out\n").unwrap();
    let o = selfstab(d, &["verify", "--graph", "p3.txt", "--state", "none.txt", "--property", "d2is"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("FAIL d2is witness="));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("p3.txt"), "3 2\n0 1\n1 2\n").unwrap();
    fs::write(d.join("bad.txt"), "3 2\n0 1\n1 7\n").unwrap();
    fs::write(d.join("short.txt"), "0 In\n1 Out\n").unwrap();
    let cases: &[&[&str]] = &[
        &["frobnicate"],
        &["run", "--graph", "p3.txt", "--algo", "nope"],
        &["run", "--graph", "p3.txt", "--daemon", "distributed:1.5"],
        &["run", "--graph", "p3.txt", "--daemon", "central-adversarial:unheard-of"],
        &["run", "--graph", "p3.txt", "--init", "random:2"],
        &["run", "--graph", "bad.txt"],
        &["verify", "--graph", "p3.txt", "--state", "short.txt", "--property", "d2is"],
        &["verify", "--graph", "p3.txt", "--state", "short.txt", "--property", "planar"],
        &["gen", "--nodes", "10", "--density", "1.5", "--out", "x.txt"],
        &["experiment", "--sizes", "10:5:0", "--densities", "0.1", "--out", "e.csv"],
        &["plot", "--in", "e.csv", "--x", "time", "--out", "p.svg"],
    ];
    for args in cases {
        let o = selfstab(d, args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn non_convergence_exits_one() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    // synchronous MIS from all-out on an edge oscillates forever
    fs::write(d.join("k2.txt"), "2 1\n0 1\n").unwrap();
    let o = selfstab(
        d,
        &["run", "--graph", "k2.txt", "--algo", "mis", "--daemon", "synchronous", "--init", "all-out", "--move-cap", "20"],
    );
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("converged=false"));

    // fully symmetric lockstep: every node leaves together, then re-enters together
    fs::write(d.join("k3.txt"), "3 3\n0 1\n0 2\n1 2\n").unwrap();
    let o = selfstab(d, &["run", "--graph", "k3.txt", "--daemon", "synchronous", "--init", "all-in"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn adversarial_and_distributed_daemons_run() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    selfstab(d, &["gen", "--nodes", "80", "--density", "0.1", "--seed", "2", "--out", "g.txt"]);
    for daemon in ["central-adversarial:max-degree-first", "central-adversarial:delay-r1", "distributed:0.3"] {
        let o = selfstab(d, &["run", "--graph", "g.txt", "--daemon", daemon, "--init", "all-in", "--seed", "5"]);
        assert_eq!(code(&o), 0, "{daemon}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("OK d2is"), "{daemon}");
    }
}

#[test]
fn experiment_csv_is_deterministic_and_plots() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let args = |out: &'static str| {
        vec![
            "experiment", "--sizes", "50:150:50", "--densities", "0.05,0.2", "--trials", "3", "--algos", "md2is,mis",
            "--daemon", "central-random", "--init", "random:0.5", "--seed", "11", "--out", out, "--summary", "sum.csv",
        ]
    };
    assert_eq!(code(&selfstab(d, &args("a.csv"))), 0);
    assert_eq!(code(&selfstab(d, &args("b.csv"))), 0);
    let a = fs::read_to_string(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(d.join("b.csv")).unwrap());

    let mut lines = a.lines();
    assert_eq!(
        lines.next(),
        Some("n,density,trial,seed,algorithm,daemon,init,cardinality,cardinality_pct,moves,rounds,converged")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 2 * 3 * 2);
    for r in &rows {
        assert_eq!(r.len(), 12);
        let pct = r[8];
        assert_eq!(pct.split('.').nth(1).map(str::len), Some(2), "pct {pct}");
        assert_eq!(r[11], "true");
    }
    let summary = fs::read_to_string(d.join("sum.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 3 * 2 * 2);

    for x in ["size", "density"] {
        let o = selfstab(d, &["plot", "--in", "a.csv", "--x", x, "--out", "p.svg"]);
        assert_eq!(code(&o), 0);
        let svg = fs::read_to_string(d.join("p.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<polyline"));
    }
}

#[test]
fn run_is_reproducible_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    selfstab(d, &["gen", "--nodes", "120", "--density", "0.08", "--seed", "1", "--out", "g.txt"]);
    let go = |trace: &str| {
        selfstab(d, &["run", "--graph", "g.txt", "--daemon", "distributed:0.5", "--seed", "33", "--trace", trace]);
        fs::read_to_string(d.join(trace)).unwrap()
    };
    assert_eq!(go("t1.csv"), go("t2.csv"));
}

#[test]
fn experiment_row_replays_through_gen_and_run() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let o = selfstab(
        d,
        &["experiment", "--sizes", "90", "--densities", "0.07", "--trials", "2", "--algos", "md2is", "--seed", "5", "--out", "e.csv"],
    );
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(d.join("e.csv")).unwrap();
    for row in csv.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        let seed = f[3];
        selfstab(d, &["gen", "--nodes", "90", "--density", "0.07", "--seed", seed, "--out", "g.txt"]);
        let o = selfstab(d, &["run", "--graph", "g.txt", "--algo", "md2is", "--seed", seed]);
        let out = stdout(&o);
        assert!(out.contains(&format!(" moves={} ", f[9])), "{out} vs {row}");
        assert!(out.contains(&format!(" cardinality={} ", f[7])), "{out} vs {row}");
    }
}
