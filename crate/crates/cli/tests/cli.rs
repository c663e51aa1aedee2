//! Black-box tests against the built binary: output schemas, determinism,
//! closed-form columns, and exit codes.

use std::process::{Command, Output};

fn bcnoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcnoise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bcnoise(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut rows = data_rows(text);
    assert!(!rows.is_empty(), "missing csv header row");
    rows.remove(0);
    rows.iter().map(|r| r.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn capacity_grid_has_inclusive_endpoints() {
    let text = stdout(&["capacity", "--rm", "1", "4", "--grid", "0:1:0.05"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[20][0], "1");
    // at full erasure the deficit is n - k
    let last: f64 = rows[20][1].parse().unwrap();
    assert!((last - 11.0 / 16.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[3] == "exact"));
}

#[test]
fn identical_specs_give_identical_bytes() {
    let args = ["tuples", "--random", "14", "0.5", "9", "--oracle"];
    let first = bcnoise(&args);
    let second = bcnoise(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let mc = [
        "capacity", "--random", "26", "0.5", "1", "--method", "mc", "--samples", "500",
        "--seed", "42", "--grid", "0.1:0.9:0.2",
    ];
    let a = bcnoise(&mc);
    let b = bcnoise(&mc);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(csv_rows(&text).iter().all(|r| r[3] == "mc" && r[4] == "42"));
}

#[test]
fn repetition_pair_profile_matches_half_lambda_squared() {
    let text = stdout(&["capacity", "--repetition-pair", "10", "--grid", "0:1:0.1"]);
    for row in csv_rows(&text) {
        let lam: f64 = row[0].parse().unwrap();
        let m_over_n: f64 = row[1].parse().unwrap();
        assert!(
            (m_over_n - 0.5 * lam * lam).abs() < 1e-12,
            "profile row off at lambda {lam}"
        );
    }
}

#[test]
fn renyi_rows_hold_the_inequality_and_zero_out_on_constants() {
    let text = stdout(&["renyi", "--rm", "1", "4", "--q", "4", "--q", "inf"]);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2 * 9);
    for line in &rows {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let lhs = v["lhs"].as_f64().unwrap();
        let rhs = v["rhs"].as_f64().unwrap();
        assert!(lhs <= rhs + 1e-9, "row violates inequality: {line}");
        assert_eq!(v["bound_type"], "rank");
        assert!(v["seed"].is_null());
    }

    // the scaled indicator of the full space is the constant 1
    let text = stdout(&["renyi", "--full", "6", "--q", "3", "--exhaustive"]);
    for line in data_rows(&text) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["lhs"].as_f64().unwrap().abs() < 1e-9, "{line}");
        assert!(v["rhs"].as_f64().unwrap().abs() < 1e-9, "{line}");
        assert_eq!(v["bound_type"], "exhaustive");
    }
}

#[test]
fn psi_at_q_two_is_flat_zero() {
    let text = stdout(&["psi", "--q", "2", "--gamma", "0.05:0.5:0.05"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let psi: f64 = row[2].parse().unwrap();
        assert!(psi.abs() < 1e-9, "psi(2, {}) = {psi}", row[1]);
        assert!(!row[3].is_empty(), "variational rows carry the minimizer");
        assert!(row[5].is_empty(), "variational rows have no table length");
    }

    let text = stdout(&["psi", "--q", "4", "--gamma", "0.3", "--method", "moment", "--n", "256"]);
    let rows = csv_rows(&text);
    assert_eq!(rows[0][4], "moment");
    assert_eq!(rows[0][5], "256");
}

#[test]
fn full_space_undetected_errors_complement_the_noiseless_mass() {
    let text = stdout(&["pue", "--full", "8", "--eps", "0.05:0.45:0.05"]);
    for row in csv_rows(&text) {
        let eps: f64 = row[3].parse().unwrap();
        let p: f64 = row[4].parse().unwrap();
        let expect = 1.0 - (1.0 - eps).powi(8);
        assert!((p - expect).abs() < 1e-12, "p_ue off at eps {eps}");
    }

    // closed-form first-order Reed-Muller route
    let text = stdout(&["pue", "--rm", "1", "7", "--eps", "0.4"]);
    let rows = csv_rows(&text);
    assert_eq!(rows[0][1], "128");
    assert_eq!(rows[0][2], "8");
    let p: f64 = rows[0][4].parse().unwrap();
    assert!(p > 0.0 && p < 1e-6);
}

#[test]
fn tuples_census_agrees_with_oracle_and_partitions() {
    let text = stdout(&["tuples", "--random", "12", "0.5", "3", "--oracle"]);
    let rows = csv_rows(&text);
    assert!(rows.len() > 2);
    let mut words = 0u64;
    for row in &rows {
        let m: u64 = row[4].parse().unwrap();
        let total: u128 = row[5].parse().unwrap();
        let trivial: u128 = row[6].parse().unwrap();
        let nontrivial: u128 = row[7].parse().unwrap();
        assert_eq!(total, trivial + nontrivial);
        words += m;
    }
    let k: u32 = rows[0][2].parse().unwrap();
    assert_eq!(words, 1u64 << k, "levels must partition the code");
}

#[test]
fn ensemble_rows_are_seeded_and_annotated() {
    let args = [
        "tuples", "--random", "14", "0.5", "5", "--ensemble", "--gamma", "0.5",
        "--trials", "6",
    ];
    let text = stdout(&args);
    assert!(text.lines().any(|l| l.starts_with("# ensemble:")));
    assert!(text.lines().any(|l| l.starts_with("# quantiles:")));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    for (t, row) in rows.iter().enumerate() {
        assert_eq!(row[8], t.to_string());
        assert_eq!(row[9], "5");
        assert_eq!(row[3], "7");
    }
}

#[test]
fn bad_inputs_exit_two() {
    // order above the variable count
    assert_eq!(bcnoise(&["capacity", "--rm", "9", "3"]).status.code(), Some(2));
    // no source at all
    assert_eq!(bcnoise(&["capacity"]).status.code(), Some(2));
    // two sources at once
    assert_eq!(
        bcnoise(&["capacity", "--full", "8", "--zero", "8"]).status.code(),
        Some(2)
    );
    // malformed grid
    assert_eq!(
        bcnoise(&["capacity", "--full", "8", "--grid", "0::1"]).status.code(),
        Some(2)
    );
    // fractional row count
    assert_eq!(
        bcnoise(&["capacity", "--random", "13", "0.4", "1"]).status.code(),
        Some(2)
    );
    // q outside the supported set
    assert_eq!(
        bcnoise(&["renyi", "--full", "6", "--q", "17"]).status.code(),
        Some(2)
    );
    // exhaustive averaging past its budget
    assert_eq!(
        bcnoise(&["renyi", "--rm", "1", "4", "--exhaustive"]).status.code(),
        Some(2)
    );
    // level past the block length
    assert_eq!(
        bcnoise(&["tuples", "--full", "8", "--level", "9"]).status.code(),
        Some(2)
    );
    // closed-form source where a generator matrix is required
    assert_eq!(bcnoise(&["tuples", "--rm", "1", "6"]).status.code(), Some(2));
    // unknown flag
    assert_eq!(bcnoise(&["psi", "--quux", "1"]).status.code(), Some(2));
}
