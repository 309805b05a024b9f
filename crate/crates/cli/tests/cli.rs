use std::path::Path;
use std::process::{Command, Output};

use blockkrylov::io::save_block_vector;
use blockkrylov::{random_block_rhs, BlockVector};
use blockkrylov_cli::{ModelRecord, RunRecord};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockkrylov"))
        .args(args)
        .env_remove("BLOCKKRYLOV_MACHINE")
        .output()
        .expect("binary runs")
}

fn records<T: serde::de::DeserializeOwned>(out: &Output) -> Vec<T> {
    csv::Reader::from_reader(out.stdout.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("valid CSV")
}

fn profile() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("profiles/skylake.profile")
        .display()
        .to_string()
}

#[test]
fn solve_emits_one_converged_row() {
    let out = cli(&[
        "solve", "--nx", "16", "--ny", "16", "--k", "4", "--p", "2", "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<RunRecord> = records(&out);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert!(r.converged && r.status == "converged" && r.max_residual < 1e-7);
    assert_eq!((r.n, r.k, r.p, r.mode.as_str()), (256, 4, 2, "hybrid"));
    assert!(r.time_total.is_none());
}

#[test]
fn recorded_flops_are_per_iteration_totals() {
    let out = cli(&[
        "solve",
        "--nx",
        "12",
        "--ny",
        "10",
        "--k",
        "8",
        "--p",
        "4",
        "--mode",
        "global",
        "--precond",
        "jacobi",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: RunRecord = records(&out).remove(0);
    // 5-point stencil with Dirichlet boundary: 5n − 2(nx + ny) stored entries
    let (n, k, p, z) = (120u64, 8u64, 4u64, 5 * 120 - 2 * 22);
    let it = r.iterations as u64;
    // the global algebra has one p×p block, but the kernels still touch all q groups
    assert_eq!(r.flops_bdot, it * 3 * 2 * n * p * k);
    assert_eq!(r.flops_baxpy, it * 3 * 2 * n * p * k);
    assert_eq!(r.flops_bop, (it + 1) * 2 * k * z);
    assert_eq!(r.flops_total, r.flops_bdot + r.flops_baxpy + r.flops_bop);
}

#[test]
fn records_round_trip_through_csv() {
    let out = cli(&[
        "solve",
        "--nx",
        "8",
        "--ny",
        "8",
        "--k",
        "2",
        "--total-rhs",
        "6",
        "--timing",
        "--reps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<RunRecord> = records(&out);
    assert_eq!(
        rows.iter().map(|r| r.batch).collect::<Vec<_>>(),
        vec![0, 1, 2]
    );
    assert!(rows.iter().all(|r| r.time_total.is_some()));
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).unwrap();
    }
    let text = w.into_inner().unwrap();
    let back: Vec<RunRecord> = csv::Reader::from_reader(text.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(back, rows);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["solve", "--k", "8", "--p", "3"][..],
        &["solve", "--k", "4", "--total-rhs", "6"],
        &["solve", "--mode", "sideways"],
        &["solve", "--tol", "0"],
        &["solve", "--repetitions", "2", "--total-rhs", "8"],
        &["model", "--kernel", "bop", "--n", "100", "--k", "8"],
        &[
            "model", "--kernel", "bdot", "--n", "100", "--k", "8", "--p-list", "3",
        ],
        &["verify", "--suite", "nosuch"],
        &["frobnicate"],
    ] {
        assert_eq!(cli(args).status.code(), Some(64), "{args:?}");
    }
}

#[test]
fn max_iter_exits_3() {
    let out = cli(&[
        "solve",
        "--nx",
        "16",
        "--ny",
        "16",
        "--k",
        "2",
        "--max-iter",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let r: RunRecord = records(&out).remove(0);
    assert_eq!((r.status.as_str(), r.iterations), ("max_iter", 2));
}

#[test]
fn duplicate_rhs_file_breaks_down_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.txt");
    let base = random_block_rhs(64, 4, 1);
    let b = BlockVector::from_fn(64, 4, |r, c| base.get(r, if c == 2 { 0 } else { c }));
    save_block_vector(&b, &path).unwrap();
    let out = cli(&[
        "solve",
        "--nx",
        "8",
        "--ny",
        "8",
        "--p",
        "4",
        "--rhs-file",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r: RunRecord = records(&out).remove(0);
    assert_eq!(
        (r.status.as_str(), r.breakdown_iteration),
        ("breakdown", Some(1))
    );

    let out = cli(&[
        "solve",
        "--nx",
        "8",
        "--ny",
        "8",
        "--rhs-file",
        "/nonexistent/b.txt",
    ]);
    assert_eq!(out.status.code(), Some(66));
}

#[test]
fn model_rows_follow_p_list() {
    let out = cli(&[
        "model",
        "--kernel",
        "bdot",
        "--n",
        "1000000",
        "--k",
        "128",
        "--p-list",
        "1,2,4,8,16,32,64,128",
        "--machine",
        &profile(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<ModelRecord> = records(&out);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert_eq!(r.bound == "memory", r.p <= 16, "p = {}", r.p);
        assert_eq!(r.t, r.t_comp.max(r.t_mem).max(r.t_reg));
    }

    let out = cli(&[
        "model", "--kernel", "baxpy", "--n", "10", "--k", "8", "--p-list", "",
    ]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "p,t_comp,t_mem,t_reg,t,bound\n"
    );

    let out = cli(&[
        "model", "--kernel", "bop", "--n", "100", "--k", "4", "--z", "460",
    ]);
    assert_eq!(records::<ModelRecord>(&out).len(), 3);
}

#[test]
fn machine_profile_from_environment() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_blockkrylov"))
            .args(["model", "--kernel", "bdot", "--n", "1000", "--k", "8"])
            .env("BLOCKKRYLOV_MACHINE", env)
            .output()
            .unwrap()
    };
    assert_eq!(
        run(&profile()).stdout,
        cli(&["model", "--kernel", "bdot", "--n", "1000", "--k", "8"]).stdout
    );
    assert_eq!(run("/nonexistent.profile").status.code(), Some(66));
}

#[test]
fn verify_suites_pass() {
    for suite in ["equivalence", "flops", "rates", "model"] {
        let out = cli(&["verify", "--suite", suite]);
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(0), "{text}");
        assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 2);
    }
}
