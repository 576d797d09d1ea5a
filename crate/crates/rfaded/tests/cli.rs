//! End-to-end checks of the command-line surface: CSV schemas, sidecars,
//! reproducibility, and exit codes.

use std::fs;
use std::path::Path;

use rfaded::cli::run;

fn run_args(args: &[&str]) -> i32 {
    let mut argv = vec!["rfaded".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(argv)
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn weights_subcommand_wsgd_order_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let code = run_args(&[
        "weights",
        "--kind",
        "wsgd",
        "--order",
        "2",
        "--count",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let body = read(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("k,value"));
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, vec![1.0, -2.0, 1.0, 0.0, 0.0]);
    // sidecar carries the configuration
    let sidecar = read(&dir.path().join("w.csv.meta.json"));
    assert!(sidecar.contains("\"subcommand\": \"weights\""));
    assert!(sidecar.contains("\"tool_version\""));
}

#[test]
fn table_subcommand_reproducible_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let args = [
        "table",
        "--example",
        "1",
        "--gamma",
        "0.6",
        "--alpha",
        "0.2",
        "--beta",
        "1.6",
        "--grids",
        "8,16",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run_args(&args), 0);
    let first = read(&out);
    let first_meta = read(&dir.path().join("t.csv.meta.json"));
    assert_eq!(run_args(&args), 0);
    assert_eq!(read(&out), first, "rerun must be byte-identical");
    assert_eq!(read(&dir.path().join("t.csv.meta.json")), first_meta);

    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("h,error,order"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(','), "first row has an empty order column");
    // 17-significant-digit fields round-trip
    let err_field: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(err_field > 0.0 && err_field < 1e-2);
}

#[test]
fn solve_subcommand_with_matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.csv");
    let dump = dir.path().join("d.csv");
    let code = run_args(&[
        "solve",
        "--example",
        "2",
        "--gamma",
        "0.5",
        "--alpha",
        "0.4",
        "--beta",
        "1.7",
        "--m",
        "8",
        "--n",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--dump-matrix",
        "D",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let body = read(&out);
    assert!(body.starts_with("t,x,value\n"));
    // (N+1)(M+1) data rows
    assert_eq!(body.lines().count(), 1 + 5 * 9);
    let dump_body = read(&dump);
    assert!(dump_body.starts_with("i,j,value\n"));
    assert_eq!(dump_body.lines().count(), 1 + 7 * 7);
    let sidecar = read(&dir.path().join("u.csv.meta.json"));
    assert!(sidecar.contains("\"dominance_margin\""));
    assert!(sidecar.contains("\"t0_offset\": true"));
}

#[test]
fn stability_subcommand_multiple_alphas() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("locus");
    let code = run_args(&[
        "stability",
        "--alpha",
        "0.4",
        "--alpha",
        "1",
        "--locus-n",
        "64",
        "--n-theta",
        "128",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for name in ["locus_alpha0.4.csv", "locus_alpha1.csv"] {
        let body = read(&dir.path().join(name));
        assert!(body.starts_with("theta,re,im\n"));
        assert_eq!(body.lines().count(), 1 + 129);
    }
}

#[test]
fn analytic_subcommand_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let code = run_args(&[
        "analytic",
        "--gamma",
        "0.5",
        "--alpha",
        "0.5",
        "--beta",
        "1.5",
        "--nx",
        "5",
        "--nt",
        "2",
        "--t-max",
        "0.5",
        "--n-max",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let body = read(&out);
    assert!(body.starts_with("x,t,value\n"));
    assert_eq!(body.lines().count(), 1 + 5 * 2);
    // boundary columns of the built-in problem are zero
    let first_row: Vec<&str> = body.lines().nth(1).unwrap().split(',').collect();
    let v: f64 = first_row[2].parse().unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn exit_codes() {
    // unknown flag: argument error
    assert_eq!(run_args(&["weights", "--bogus"]), 2);
    // out-of-range order: argument error
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    assert_eq!(
        run_args(&[
            "weights", "--kind", "wsgd", "--order", "2.5", "--count", "4", "--out",
            out.to_str().unwrap()
        ]),
        2
    );
    // bad gamma on table: argument error
    assert_eq!(
        run_args(&[
            "table", "--example", "1", "--gamma", "1.5", "--alpha", "0.2", "--beta", "1.6",
            "--grids", "8,16", "--out", out.to_str().unwrap()
        ]),
        2
    );
    // unwritable output path: computation/io error
    assert_eq!(
        run_args(&[
            "weights", "--kind", "fbdf2", "--order", "0.5", "--count", "4", "--out",
            "/nonexistent-dir/w.csv"
        ]),
        1
    );
    // help exits 0
    assert_eq!(run_args(&["--help"]), 0);
}
