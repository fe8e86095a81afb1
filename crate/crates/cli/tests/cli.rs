use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockade")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn out(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn two_atom_spectrum_has_eight_rows() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "spec.csv");
    let res = run(&["spectrum", "-n", "2", "-o", path_str(&o)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_rows(&o);
    assert_eq!(header, ["eigenvalue", "multiplicity", "p", "q"]);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[1] == "1"));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("spec.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "spectrum");
    assert!(meta["version"].is_string());
    assert_eq!(meta["config"]["n"], 2);
}

#[test]
fn random_six_atom_spectrum_counts_every_state() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "spec.csv");
    assert!(run(&["spectrum", "-n", "6", "--random-drive", "--seed", "5", "-o", path_str(&o)]).status.success());
    let (_, rows) = read_rows(&o);
    let total: u64 = rows.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 64 + 6 * 32);

    let again = out(&dir, "again.csv");
    assert!(run(&["spectrum", "-n", "6", "--random-drive", "--seed", "5", "-o", path_str(&again)]).status.success());
    assert_eq!(std::fs::read(&o).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn undriven_single_atom_spectrum_is_zero() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "spec.csv");
    let args = ["spectrum", "-n", "1", "--omega1", "0", "--omega2", "0", "--delta1", "0", "--delta2", "0", "-o"];
    assert!(run(&[&args[..], &[path_str(&o)]].concat()).status.success());
    let (_, rows) = read_rows(&o);
    assert_eq!(column(&rows, 0), vec![0.0; 3]);
}

#[test]
fn zero_length_quench_has_one_row() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "q.csv");
    assert!(run(&["quench", "-n", "5", "--t-max", "0", "-o", path_str(&o)]).status.success());
    let (header, rows) = read_rows(&o);
    assert_eq!(header, ["t", "value"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(column(&rows, 0), [0.0]);
    assert!(column(&rows, 1)[0].abs() < 1e-20);
}

#[test]
fn quench_matches_oracle_run() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (out(&dir, "blocks.csv"), out(&dir, "oracle.csv"));
    let common = ["-n", "8", "--n0", "3", "--delta2", "0.3", "--t-max", "20", "--samples", "101", "--observable", "nr"];
    assert!(run(&[&["quench"][..], &common, &["-o", path_str(&a)]].concat()).status.success());
    assert!(run(&[&["oracle", "--mode", "quench"][..], &common, &["-o", path_str(&b)]].concat()).status.success());
    let (_, ra) = read_rows(&a);
    let (_, rb) = read_rows(&b);
    assert_eq!(ra.len(), 101);
    for (x, y) in ra.iter().zip(&rb) {
        assert_eq!(x[0], y[0]);
        let (u, v): (f64, f64) = (x[1].parse().unwrap(), y[1].parse().unwrap());
        assert_eq!(format!("{u:.8}"), format!("{v:.8}"), "t = {}", x[0]);
    }
}

#[test]
fn quench_records_revival() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "q.csv");
    assert!(run(&["quench", "-n", "30", "--t-max", "80", "--revival", "-o", path_str(&o)]).status.success());
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("q.csv.meta.json")).unwrap()).unwrap();
    assert!(meta["results"].get("revival").is_some());
}

#[test]
fn oracle_spectrum_matches_block_spectrum() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (out(&dir, "blocks.csv"), out(&dir, "oracle.csv"));
    let drive = ["--omega1", "0.8", "--omega2", "1.3", "--delta1", "-0.4", "--delta2", "0.2", "--phase2", "0.7"];
    assert!(run(&[&["spectrum", "-n", "2"][..], &drive, &["-o", path_str(&a)]].concat()).status.success());
    assert!(run(&[&["oracle", "--mode", "spectrum", "-n", "2"][..], &drive, &["-o", path_str(&b)]].concat()).status.success());
    let mut x = column(&read_rows(&a).1, 0);
    let y = column(&read_rows(&b).1, 0);
    x.sort_by(f64::total_cmp);
    for (u, v) in x.iter().zip(&y) {
        assert!((u - v).abs() < 1e-12);
    }
}

#[test]
fn oracle_zero_drive_and_hamiltonian_dump() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "q.csv");
    let zero = ["--omega1", "0", "--omega2", "0", "--delta1", "0", "--delta2", "0"];
    assert!(run(&[&["oracle", "-n", "3", "--t-max", "5"][..], &zero, &["-o", path_str(&o)]].concat()).status.success());
    assert!(column(&read_rows(&o).1, 1).iter().all(|v| *v == 0.0));

    let h = out(&dir, "h.json");
    let drive = ["--omega1", "1", "--omega2", "2", "--delta1", "0.5", "--delta2", "0.25"];
    assert!(run(&[&["oracle", "--mode", "hamiltonian", "-n", "2"][..], &drive, &["-o", path_str(&h)]].concat()).status.success());
    let dump: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&h).unwrap()).unwrap();
    assert_eq!(dump["basis"], serde_json::json!(["00", "01", "0r", "10", "11", "1r", "r0", "r1"]));
    // Omega1 = 1 sets the units, so entries are reported in the drive's own scale.
    assert_eq!(dump["matrix"][1][2], serde_json::json!([1.0, 0.0]));
    assert_eq!(dump["matrix"][5][5], serde_json::json!([-1.25, 0.0]));
}

#[test]
fn oracle_rejects_large_systems_with_capacity_code() {
    let dir = TempDir::new().unwrap();
    let res = run(&["oracle", "-n", "14", "-o", path_str(&out(&dir, "x.csv"))]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!res.stderr.is_empty());
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "x.csv");
    assert_eq!(run(&["quench", "-n", "0", "-o", path_str(&o)]).status.code(), Some(1));
    assert_eq!(run(&["quench", "-n", "4", "--observable", "nx", "-o", path_str(&o)]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "-n", "2", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["spinmodel", "-n", "4", "--delta2", "0.5", "-o", path_str(&o)]).status.code(), Some(1));
}

#[test]
fn prepare_two_atom_ghz() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "ghz.json");
    let res = run(&["prepare", "--ghz", "-n", "2", "-o", path_str(&o)]);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    for value in ["0.90635", "1.42788", "1.00000", "0.70711"] {
        assert!(stdout.contains(value), "{value} missing from\n{stdout}");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&o).unwrap()).unwrap();
    assert!(report["fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
    assert_eq!(report["physical"]["pulses"].as_array().unwrap().len(), 8);
    assert_eq!(report["effective"]["kind"], "effective");
}

#[test]
fn prepare_w_and_custom_targets() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "w.json");
    assert!(run(&["prepare", "--w", "-n", "3", "-o", path_str(&o)]).status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&o).unwrap()).unwrap();
    assert!(report["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);

    let ground = out(&dir, "ground.json");
    std::fs::write(&ground, "[0, 0, [0, 1]]").unwrap();
    let o = out(&dir, "g.json");
    assert!(run(&["prepare", "--target", path_str(&ground), "-o", path_str(&o)]).status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&o).unwrap()).unwrap();
    assert_eq!(report["physical"]["pulses"].as_array().unwrap().len(), 0);
    assert!((report["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-15);

    let bad = out(&dir, "bad.json");
    std::fs::write(&bad, "[0.5, 0.5]").unwrap();
    assert_eq!(run(&["prepare", "--target", path_str(&bad)]).status.code(), Some(1));
}

#[test]
fn spin_model_outputs() {
    let dir = TempDir::new().unwrap();
    let o = out(&dir, "env.csv");
    assert!(run(&["spinmodel", "-n", "20", "--omega2", "0", "--t-max", "10", "-o", path_str(&o)]).status.success());
    let (header, rows) = read_rows(&o);
    assert_eq!(header, ["t", "lower", "upper", "overlap_abs"]);
    assert!(column(&rows, 3).iter().all(|v| (v - 1.0).abs() < 1e-12));

    let z = out(&dir, "zero.csv");
    assert!(run(&["spinmodel", "--variant", "zero", "-n", "20", "--t-max", "10", "-o", path_str(&z)]).status.success());
    let (header, rows) = read_rows(&z);
    assert_eq!(header, ["t", "value"]);
    assert!(column(&rows, 1)[0].abs() < 1e-20);
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    let o = out(&dir, "q.csv");
    std::fs::write(
        &cfg,
        format!("n = 4\noutput = {:?}\n[time]\nt_max = 2.0\nsamples = 5\n[drive]\nomega1 = 1.0\n", path_str(&o)),
    )
    .unwrap();
    assert!(run(&["quench", "--config", path_str(&cfg)]).status.success());
    assert_eq!(read_rows(&o).1.len(), 5);
    assert!(run(&["quench", "--config", path_str(&cfg), "--samples", "3"]).status.success());
    assert_eq!(column(&read_rows(&o).1, 0), [0.0, 1.0, 2.0]);

    std::fs::write(&cfg, "n = 4\nunknown_key = 1\n").unwrap();
    assert_eq!(run(&["quench", "--config", path_str(&cfg)]).status.code(), Some(1));
}

#[test]
fn revival_scan_writes_table() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("scan.toml");
    std::fs::write(&cfg, "[scan]\nfamily = \"all-one\"\nn_list = [20, 30]\n").unwrap();
    let o = out(&dir, "scan.csv");
    let res = run(&["revival-scan", "--config", path_str(&cfg), "-o", path_str(&o)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_rows(&o);
    assert_eq!(header, ["n", "t_rev", "strength"]);
    assert_eq!(rows.len(), 2);
}
