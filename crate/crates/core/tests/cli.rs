use std::io::Cursor;
use std::process::Command;

use approx::assert_abs_diff_eq;
use serde_json::Value;
use sphdes::cli::{run, CommandResult};
use sphdes::designio::{self, FileFormat};
use sphdes::sphere::random_design;
use tempfile::TempDir;

struct Output {
    code: CommandResult,
    stdout: String,
    stderr: String,
}

fn sphdes(args: &[&str], stdin: &str) -> Output {
    let mut argv = vec!["sphdes"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut Cursor::new(stdin.as_bytes()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(args: &[&str], stdin: &str) -> (CommandResult, Value) {
    let mut argv = vec!["--json"];
    argv.extend_from_slice(args);
    let o = sphdes(&argv, stdin);
    (o.code, serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout)))
}

#[test]
fn icosahedron_pipes_into_verify() {
    let cat = sphdes(&["catalog", "icosahedron"], "");
    assert_eq!(cat.code, CommandResult::Success);
    let v = sphdes(&["verify", "-", "--t", "5"], &cat.stdout);
    assert_eq!(v.code, CommandResult::Success, "{}", v.stdout);
    assert!(v.stdout.contains("result: spherical t-design"));
    let v = sphdes(&["verify", "-", "--t", "6"], &cat.stdout);
    assert_eq!(v.code, CommandResult::VerificationNegative);
}

#[test]
fn largest_product_design_verifies() {
    let cat = sphdes(&["catalog", "product", "--d", "7"], "");
    assert_eq!(cat.code, CommandResult::Success);
    let (code, report) = json(&["verify", "-", "--t", "14", "--oracle"], &cat.stdout);
    assert_eq!(code, CommandResult::Success);
    assert_eq!(report["n"], 345);
    assert_eq!(report["strength"].as_u64(), Some(14));
    assert!(report["oracle_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["residuals"].as_array().unwrap().len(), 14);
}

#[test]
fn random_points_are_not_a_design() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("random.txt");
    std::fs::write(&path, designio::write(&random_design(50, 3), 17, FileFormat::Triples)).unwrap();
    let o = sphdes(&["verify", path.to_str().unwrap(), "--t", "2"], "");
    assert_eq!(o.code, CommandResult::VerificationNegative);
    assert!(o.stdout.contains("NOT a spherical t-design"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(sphdes(&["frobnicate"], "").code, CommandResult::InputError);
    assert_eq!(sphdes(&["verify", "-"], "0 0 1\n").code, CommandResult::InputError);
    let o = sphdes(&["verify", "-", "--t", "1"], "0 0 1\n0 oops 1\n");
    assert_eq!(o.code, CommandResult::InputError);
    assert!(o.stderr.contains("oops"), "{}", o.stderr);
    assert_eq!(sphdes(&["verify", "/nonexistent/design.txt", "--t", "1"], "").code, CommandResult::InputError);
    assert_eq!(sphdes(&["catalog", "rhombicuboctahedron"], "").code, CommandResult::InputError);
    assert_eq!(sphdes(&["catalog", "product", "--d", "9"], "").code, CommandResult::InputError);
    assert_eq!(sphdes(&["catalog", "product", "--d", "2", "--n-phi", "3"], "").code, CommandResult::InputError);
    // fewer points than the lower bound allows
    assert_eq!(sphdes(&["construct", "--t", "5", "--n", "8"], "").code, CommandResult::InputError);
}

#[test]
fn help_and_version_succeed() {
    let o = sphdes(&["--help"], "");
    assert_eq!(o.code, CommandResult::Success);
    assert!(o.stdout.contains("construct"));
    assert_eq!(sphdes(&["--version"], "").code, CommandResult::Success);
}

#[test]
fn construct_reports_non_convergence() {
    // five iterations are nowhere near enough, so the search gives up
    let o = sphdes(&["construct", "--t", "3", "--n", "6", "--starts", "2", "--max-iters", "5"], "");
    assert_eq!(o.code, CommandResult::NotConverged);
    assert!(o.stderr.contains("converged: false"), "{}", o.stderr);
    // the best design found is still written
    assert_eq!(designio::parse(&o.stdout).unwrap().len(), 6);
}

#[test]
fn construct_writes_a_verified_design() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("t3.txt");
    let (code, report) = json(
        &["construct", "--t", "3", "--n", "6", "--starts", "4", "--seed", "7", "-o", path.to_str().unwrap()],
        "",
    );
    assert_eq!(code, CommandResult::Success);
    assert_eq!(report["converged"], true);
    assert_eq!(report["seed"], 7);
    assert!(report["residual"].as_f64().unwrap() < 1e-10);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(sphdes(&["verify", "-", "--t", "3", "--oracle"], &text).code, CommandResult::Success);
}

#[test]
fn criteria_of_octahedron() {
    let cat = sphdes(&["catalog", "octahedron"], "");
    let (code, report) = json(&["criteria", "-", "--d", "1", "--p", "0,1,inf"], &cat.stdout);
    assert_eq!(code, CommandResult::Success);
    assert_eq!(report["identity"], true);
    assert_eq!(report["singular"], false);
    for key in ["d_criterion", "a_criterion", "e_criterion"] {
        assert_abs_diff_eq!(report[key].as_f64().unwrap(), 1.0, epsilon = 1e-12);
    }
    assert_eq!(report["phi"].as_array().unwrap().len(), 3);
    // order 2 needs a 4-design; the octahedron is only a 3-design
    let (_, report) = json(&["criteria", "-", "--d", "2"], &cat.stdout);
    assert_eq!(report["identity"], false);
}

#[test]
fn simulate_then_fit_recovers_coefficients() {
    let dir = TempDir::new().unwrap();
    let design = dir.path().join("product.txt");
    let coeffs = dir.path().join("coeffs.txt");
    let obs = dir.path().join("obs.txt");
    let d = design.to_str().unwrap();
    assert_eq!(sphdes(&["catalog", "product", "--d", "2", "-o", d], "").code, CommandResult::Success);
    let c: Vec<f64> = (0..9).map(|k| k as f64 * 0.25 - 1.0).collect();
    std::fs::write(&coeffs, designio::write_values(&c)).unwrap();
    let sim = sphdes(&["simulate", d, "--d", "2", "--noise", "0", "--coeffs", coeffs.to_str().unwrap()], "");
    assert_eq!(sim.code, CommandResult::Success);
    std::fs::write(&obs, &sim.stdout).unwrap();
    let (code, report) = json(&["fit", d, obs.to_str().unwrap(), "--d", "2"], "");
    assert_eq!(code, CommandResult::Success);
    let rows = report["coefficients"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!((rows[1]["l"].as_u64(), rows[1]["m"].as_i64()), (Some(1), Some(-1)));
    for (row, want) in rows.iter().zip(&c) {
        assert_abs_diff_eq!(row["value"].as_f64().unwrap(), *want, epsilon = 1e-10);
    }
    // observations of the wrong length are rejected
    assert_eq!(sphdes(&["fit", d, "-", "--d", "2"], "1\n2\n").code, CommandResult::InputError);
}

#[test]
fn simulate_is_seeded() {
    let design = sphdes(&["catalog", "cube"], "").stdout;
    let a = sphdes(&["simulate", "-", "--d", "1", "--seed", "11"], &design).stdout;
    let b = sphdes(&["simulate", "-", "--d", "1", "--seed", "11"], &design).stdout;
    let c = sphdes(&["simulate", "-", "--d", "1", "--seed", "12"], &design).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(designio::parse_values(&a).unwrap().len(), 8);
}

#[test]
fn seed_comes_from_environment() {
    let exe = env!("CARGO_BIN_EXE_sphdes");
    let design = sphdes(&["catalog", "cube"], "").stdout;
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cube.txt");
    std::fs::write(&path, &design).unwrap();
    let via_env = Command::new(exe)
        .args(["simulate", path.to_str().unwrap(), "--d", "1"])
        .env("SPHDES_SEED", "42")
        .output()
        .unwrap();
    assert!(via_env.status.success());
    let via_flag = sphdes(&["simulate", path.to_str().unwrap(), "--d", "1", "--seed", "42"], "");
    assert_eq!(String::from_utf8(via_env.stdout).unwrap(), via_flag.stdout);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_sphdes");
    let status = Command::new(exe).arg("no-such-command").output().unwrap().status;
    assert_eq!(status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("random.txt");
    std::fs::write(&path, designio::write(&random_design(50, 8), 17, FileFormat::Triples)).unwrap();
    let status = Command::new(exe).args(["verify", path.to_str().unwrap(), "--t", "2"]).output().unwrap().status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn stereogram_of_octahedron() {
    let cat = sphdes(&["catalog", "octahedron"], "");
    let o = sphdes(&["stereogram", "-", "--grid"], &cat.stdout);
    assert_eq!(o.code, CommandResult::Success);
    assert!(o.stdout.starts_with("<?xml"));
    assert_eq!(o.stdout.matches(r#"class="north""#).count(), 5);
    assert_eq!(o.stdout.matches(r#"class="south""#).count(), 1);
    assert!(o.stdout.contains(r#"class="meridian""#));
    assert_eq!(sphdes(&["stereogram", "-", "--size", "0"], &cat.stdout).code, CommandResult::InputError);
}

#[test]
fn table_lists_all_orders() {
    let (code, report) = json(&["table"], "");
    assert_eq!(code, CommandResult::Success);
    let rows = report["rows"].as_array().unwrap();
    let totals: Vec<u64> = rows.iter().map(|r| r["n_tot"].as_u64().unwrap()).collect();
    assert_eq!(totals, [6, 20, 42, 81, 143, 221, 345]);
    for r in rows {
        assert!(r["strength"].as_u64() >= Some(2 * r["d"].as_u64().unwrap()));
        assert!(r["identity_deviation"].as_f64().unwrap() < 1e-10);
    }
    let text = sphdes(&["table"], "").stdout;
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn convert_between_layouts() {
    let triples = sphdes(&["catalog", "dodecahedron"], "").stdout;
    let flat = sphdes(&["convert", "-", "--format", "flat"], &triples);
    assert_eq!(flat.code, CommandResult::Success);
    let file = designio::parse_file(&flat.stdout, None).unwrap();
    assert_eq!(file.format, FileFormat::Flat);
    assert_eq!(file.design.len(), 20);
    let back = sphdes(&["convert", "-"], &flat.stdout).stdout;
    assert_eq!(back, triples);
    let short = sphdes(&["convert", "-", "--precision", "6"], &triples).stdout;
    assert!(short.len() < triples.len());
    assert_eq!(sphdes(&["convert", "-", "--precision", "30"], &triples).code, CommandResult::InputError);
}
