use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use vibrest_core::encoding::WeightedPauliHamiltonian;
use vibrest_core::io;
use vibrest_core::synthetic;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vibrest"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("json output")
}

fn write_pauli(dir: &Path, name: &str, h: &WeightedPauliHamiltonian) -> String {
    let p = dir.join(name);
    std::fs::write(&p, io::write_pauli(h)).unwrap();
    p.to_str().unwrap().to_string()
}

fn pauli_file(dir: &Path, name: &str, lines: &[&str]) -> String {
    let n = lines[0].split_whitespace().nth(1).unwrap().len();
    let text = format!("# schema_version=1\n# n_qubits={n}\n{}\n", lines.join("\n"));
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn sq_map(v: &Value) -> BTreeMap<Vec<(u64, u64, u64)>, f64> {
    v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let key = t["factors"]
                .as_array()
                .unwrap()
                .iter()
                .map(|f| (f["mode"].as_u64().unwrap(), f["raise"].as_u64().unwrap(), f["lower"].as_u64().unwrap()))
                .collect();
            (key, t["coeff_cm1"].as_f64().unwrap())
        })
        .collect()
}

#[test]
fn count_reproduces_sizing_table() {
    let v = json(&["count", "--triple-bonds", "1,2", "--modals", "4,6", "--format", "json"]);
    let rows = v["rows"].as_array().unwrap();
    let get = |l: u64, d: u64| rows.iter().find(|r| r["modes"] == l && r["modals"] == d).unwrap();
    assert_eq!(get(7, 4)["n_terms"], 148848);
    assert_eq!(get(7, 4)["unary_qubits"], 28);
    assert_eq!(get(7, 4)["binary_qubits"], 14);
    assert_eq!(get(13, 6)["n_terms"], 13445172u64);
    let v = json(&["count", "--modes", "1", "--modals", "1", "--truncation", "1", "--format", "json"]);
    assert_eq!(v["rows"][0]["n_terms"], 1);
}

#[test]
fn count_surfaces_binary_packing_note() {
    let out = ok(&["count", "--modes", "481", "--modals", "10"]);
    assert!(out.contains("4810"));
    assert!(out.contains("1924"));
    assert!(out.contains("1598"));
}

#[test]
fn count_csv_has_one_row_per_pair() {
    let out = ok(&["count", "--modes", "7,13", "--modals", "4", "--format", "csv"]);
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().next().unwrap().starts_with("family,"));
}

#[test]
fn invalid_sizes_are_usage_errors() {
    assert_eq!(run(&["count", "--modes", "2", "--modals", "4", "--truncation", "3"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--triple-bonds", "0", "--modals", "4"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn build_matches_dense_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sq.json");
    let summary = ok(&[
        "build",
        data("cubic_coupling.pes.json").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(summary.contains("terms"));
    let got: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let want: Value = serde_json::from_str(&std::fs::read_to_string(data("cubic_coupling.golden.sq.json")).unwrap()).unwrap();
    let (got, want) = (sq_map(&got), sq_map(&want));
    for (k, w) in &want {
        let g = got.get(k).copied().unwrap_or(0.0);
        assert!((g - w).abs() < 1e-10, "{k:?}: {g} vs {w}");
    }
    for (k, g) in &got {
        assert!(want.contains_key(k) || g.abs() < 1e-10, "unexpected {k:?} = {g}");
    }
}

#[test]
fn build_harmonic_only_is_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let pes = dir.path().join("h.json");
    std::fs::write(
        &pes,
        r#"{"schema_version":1,"n_modes":2,"truncation_order":1,"modals":3,"omegas_cm1":[500.0,1500.0],"terms":[]}"#,
    )
    .unwrap();
    let sq: Value = serde_json::from_str(&ok(&["build", pes.to_str().unwrap()])).unwrap();
    let terms = sq["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 6);
    assert!(terms.iter().all(|t| t["factors"][0]["raise"] == t["factors"][0]["lower"]));
}

#[test]
fn build_rejects_bad_mode_index_naming_the_term() {
    let dir = tempfile::tempdir().unwrap();
    let pes = dir.path().join("bad.json");
    std::fs::write(
        &pes,
        r#"{"schema_version":1,"n_modes":2,"truncation_order":2,"modals":3,"omegas_cm1":[500.0,1500.0],
            "terms":[{"modes":[0],"powers":[3],"coeff_cm1":1.0},{"modes":[0,5],"powers":[1,1],"coeff_cm1":2.0}]}"#,
    )
    .unwrap();
    let o = run(&["build", pes.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("PES term 1"), "{}", stderr(&o));
    std::fs::write(&pes, "{\"schema_version\": 1,\n \"n_modes\": \"x\"}").unwrap();
    let o = run(&["build", pes.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn encode_ladder_matches_golden() {
    let text = ok(&["encode", data("ladder_d2.sq.json").to_str().unwrap(), "--encoding", "unary"]);
    let got = io::read_pauli(&text).unwrap();
    let want = io::read_pauli(&std::fs::read_to_string(data("ladder_d2.golden.pauli")).unwrap()).unwrap();
    assert_eq!(got.terms, want.terms);
}

#[test]
fn encode_cutoff_sweep_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sq = dir.path().join("sq.json");
    ok(&["build", data("cubic_coupling.pes.json").to_str().unwrap(), "-o", sq.to_str().unwrap()]);
    let mut counts = Vec::new();
    for cutoff in ["0", "1e-8", "1", "100"] {
        let out = dir.path().join(format!("h{cutoff}.pauli"));
        let summary: Value = serde_json::from_str(&ok(&[
            "encode",
            sq.to_str().unwrap(),
            "--encoding",
            "binary",
            "--cutoff",
            cutoff,
            "-o",
            out.to_str().unwrap(),
            "--format",
            "json",
        ]))
        .unwrap();
        let h = io::read_pauli(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(summary["n_terms"].as_u64().unwrap() as usize, h.len());
        // writing what was read reproduces the file
        assert_eq!(io::write_pauli(&h), std::fs::read_to_string(&out).unwrap());
        counts.push(h.len());
    }
    assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
}

#[test]
fn encode_rejects_non_hermitian_input() {
    let dir = tempfile::tempdir().unwrap();
    let sq = dir.path().join("sq.json");
    std::fs::write(
        &sq,
        r#"{"schema_version":1,"n_modes":1,"modals":2,"terms":[{"coeff_cm1":1.0,"factors":[{"mode":0,"raise":0,"lower":1}]}]}"#,
    )
    .unwrap();
    let o = run(&["encode", sq.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn estimate_commuting_hamiltonian_takes_minimal_steps() {
    let dir = tempfile::tempdir().unwrap();
    let f = pauli_file(dir.path(), "c.pauli", &["700 ZI", "300 IZ", "50 ZZ"]);
    let v = json(&["estimate", &f, "--format", "json", "--tol", "0"]);
    assert_eq!(v["chosen"]["upper"], 0.0);
    let a = &v["budgets"][0]["report"];
    assert_eq!(a["approach"], "A");
    assert_eq!(a["r_total"], a["n_ancilla"]);
}

#[test]
fn estimate_split_never_worse_than_crude_and_tracks_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let h = synthetic::vibrational_hamiltonian(&synthetic::VibrationalConfig::chain(4, 3), 8).unwrap();
    let h = synthetic::subsample(&h, 500, 2);
    let f = write_pauli(dir.path(), "s.pauli", &h);
    let v1 = json(&["estimate", &f, "--format", "json", "--epsilon-nu", "1"]);
    for c in v1["comparison"].as_array().unwrap() {
        assert!(c["r_split"].as_u64().unwrap() <= c["r_crude"].as_u64().unwrap());
    }
    assert!(v1["approach_ratio"].as_f64().unwrap().is_finite());
    let v2 = json(&["estimate", &f, "--format", "json", "--epsilon-nu", "0.5"]);
    for i in 0..2 {
        let r1 = v1["comparison"][i]["r_split"].as_u64().unwrap();
        let r2 = v2["comparison"][i]["r_split"].as_u64().unwrap();
        assert!(r2 > r1, "{r2} <= {r1}");
    }
    // trajectory: lower bounds never exceed upper bounds, schedule is echoed
    for r in v1["trajectory"].as_array().unwrap() {
        assert!(r["lower"].as_f64().unwrap() <= r["upper"].as_f64().unwrap());
    }
    assert_eq!(v1["config"]["tol"].as_array().unwrap().len(), v1["trajectory"].as_array().unwrap().len());
}

#[test]
fn estimate_is_deterministic_and_embeds_config() {
    let dir = tempfile::tempdir().unwrap();
    let h = synthetic::random_pauli_hamiltonian(120, 10, 1e-3, 1e2, 4);
    let f = write_pauli(dir.path(), "r.pauli", &h);
    let args = ["estimate", &f, "--format", "json", "--tol", "inf", "--tol", "1", "--tol", "0", "--seed", "9"];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["tol"][0], "inf");
    assert_eq!(v["config"]["epsilon_nu"], 1.0);
    assert_eq!(v["config"]["order"], 2);
    assert!(v["chosen"].get("wall_time_s").is_none());
    let t: Value = serde_json::from_str(&ok(&[&args[..], &["--timing"]].concat())).unwrap();
    assert!(t["chosen"]["wall_time_s"].is_number());
}

#[test]
fn estimate_csv_rows_per_approach_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let h = synthetic::random_pauli_hamiltonian(40, 6, 1e-2, 1e1, 1);
    let f = write_pauli(dir.path(), "r.pauli", &h);
    let out = ok(&["estimate", &f, "--format", "csv"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("molecule,modals,p,approach,bound_mode"));
    let table = ok(&["estimate", &f, "--approach", "A"]);
    assert!(table.contains("R_crude / R_split"));
    assert!(table.contains("assumptions"));
}

#[test]
fn estimate_budget_exhaustion_exits_with_resource_code() {
    let dir = tempfile::tempdir().unwrap();
    let h = synthetic::random_pauli_hamiltonian(300, 12, 1e-3, 1e2, 4);
    let f = write_pauli(dir.path(), "r.pauli", &h);
    let o = run(&["estimate", &f, "--tol", "0", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("larger tolerance"));
}

#[test]
fn estimate_rejects_ascending_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let f = pauli_file(dir.path(), "c.pauli", &["1 XI", "1 ZI"]);
    assert_eq!(run(&["estimate", &f, "--tol", "0", "--tol", "1"]).status.code(), Some(2));
}

#[test]
fn config_file_sits_below_flags() {
    let dir = tempfile::tempdir().unwrap();
    let f = pauli_file(dir.path(), "c.pauli", &["100 XI", "50 ZI", "20 IX"]);
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "epsilon_nu = 4.0\norder = 1\nformat = \"json\"\nseed = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&["--config", c, "estimate", &f]);
    assert_eq!(v["config"]["epsilon_nu"], 4.0);
    assert_eq!(v["config"]["order"], 1);
    assert_eq!(v["config"]["seed"], 3);
    let v = json(&["--config", c, "estimate", &f, "--epsilon-nu", "2", "--seed", "5"]);
    assert_eq!(v["config"]["epsilon_nu"], 2.0);
    assert_eq!(v["config"]["seed"], 5);
    std::fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(run(&["--config", c, "estimate", &f]).status.code(), Some(2));
}

#[test]
fn layers_extreme_cases_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let disjoint = pauli_file(dir.path(), "d.pauli", &["1 XIII", "1 IYII", "1 IIZI", "1 IIIX"]);
    let v = json(&["layers", &disjoint, "--format", "json", "--runs", "10"]);
    assert_eq!(v["stats"]["mean_ratio"], 4.0);
    let same = pauli_file(dir.path(), "s.pauli", &["1 XI", "1 ZI", "1 YX", "1 XZ"]);
    let v = json(&["layers", &same, "--format", "json"]);
    assert_eq!(v["stats"]["mean_ratio"], 1.0);
    assert_eq!(v["stats"]["runs"], 100);

    let h = synthetic::vibrational_hamiltonian(&synthetic::VibrationalConfig::chain(4, 3), 1).unwrap();
    let f = write_pauli(dir.path(), "h.pauli", &h);
    let a = ok(&["layers", &f, "--seed", "17", "--format", "json"]);
    let b = ok(&["layers", &f, "--seed", "17", "--format", "json", "--workers", "1"]);
    assert_eq!(a, b);
    let c = ok(&["layers", &f, "--seed", "18", "--format", "json"]);
    assert_ne!(a, c);
    let table = ok(&["layers", &f]);
    for k in ["mean ratio", "min ratio", "max ratio", "std ratio"] {
        assert!(table.contains(k));
    }
}

#[test]
fn workers_env_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let f = pauli_file(dir.path(), "c.pauli", &["1 XI", "1 ZI"]);
    let o = bin().args(["layers", &f]).env("VIBREST_WORKERS", "2").output().unwrap();
    assert!(o.status.success());
    let o = bin().args(["layers", &f]).env("VIBREST_WORKERS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_is_an_io_failure() {
    assert_eq!(run(&["layers", "/nonexistent/x.pauli"]).status.code(), Some(1));
}
