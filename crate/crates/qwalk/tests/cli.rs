//! End-to-end checks of the `qwalk` binary: output formats, pipeline
//! plumbing between subcommands, reproducibility, and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qwalk::bench::{records_from_csv, Method};
use qwalk::GateCircuit;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_square(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("square.json");
    fs::write(&path, r#"{"num_qubits":2,"edges":[[0,1],[2,3],[0,3],[1,2]]}"#).unwrap();
    path
}

fn write_hypercube(dir: &Path, n: usize) -> std::path::PathBuf {
    let mut edges = Vec::new();
    for v in 0..1u64 << n {
        for b in 0..n {
            let w = v ^ (1 << b);
            if v < w {
                edges.push(format!("[{v},{w}]"));
            }
        }
    }
    let path = dir.join(format!("q{n}.json"));
    fs::write(&path, format!(r#"{{"num_qubits":{n},"edges":[{}]}}"#, edges.join(","))).unwrap();
    path
}

#[test]
fn generate_writes_reproducible_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |dir: &str| {
        vec![
            "generate".to_string(),
            "--dataset".into(),
            "connected-path".into(),
            "--vertices".into(),
            "8".into(),
            "--count".into(),
            "64".into(),
            "--seed".into(),
            "42".into(),
            "--out".into(),
            tmp.path().join(dir).display().to_string(),
        ]
    };
    let first = qwalk(&args("a").iter().map(String::as_str).collect::<Vec<_>>());
    assert!(stdout_of(&first).contains("wrote 64 graphs"));
    let second = qwalk(&args("b").iter().map(String::as_str).collect::<Vec<_>>());
    stdout_of(&second);

    for name in ["graph_000.json", "graph_013.json", "graph_063.json", "manifest.json"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("a/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["files"].as_array().unwrap().len(), 64);
    assert_eq!(manifest["graph_ids"][0], "connected-path-v8-s42-g000");
    let mean_edges = manifest["mean_edges"].as_f64().unwrap();
    assert!((8.0..=9.6).contains(&mean_edges), "mean edges {mean_edges}");

    let g: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("a/graph_000.json")).unwrap())
            .unwrap();
    assert_eq!(g["num_qubits"], 3);
    assert!(g["edges"].as_array().unwrap().len() >= 7, "connected 8-vertex graph");
}

#[test]
fn decompose_emits_compressed_matchings() {
    let tmp = tempfile::tempdir().unwrap();
    let square = write_square(tmp.path());
    let out = qwalk(&["decompose", "--input", square.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["num_qubits"], 2);
    assert_eq!(doc["num_edges"], 4);
    let matchings = doc["matchings"].as_array().unwrap();
    assert_eq!(matchings.len(), 2);
    let first = &matchings[0][0];
    assert_eq!(first["u"], 0);
    assert_eq!(first["v"], 1);
    assert_eq!(first["active"].as_array().unwrap().len(), 1);
    assert!(first["weight_reducing"].as_array().is_some());
    assert!(first["mask"].is_u64());
}

#[test]
fn decompose_reads_edge_list_files() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("square.txt");
    fs::write(&path, "#qubits 2\n0 1\n2 3\n0 3\n1 2\n").unwrap();
    let out = qwalk(&["decompose", "--input", path.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["matchings"].as_array().unwrap().len(), 2);
}

#[test]
fn compile_writes_circuit_meta_and_dump() {
    let tmp = tempfile::tempdir().unwrap();
    let square = write_square(tmp.path());
    let circuit_path = tmp.path().join("circuit.json");
    let dump_path = tmp.path().join("circuit.txt");
    let out = qwalk(&[
        "compile",
        "--input",
        square.to_str().unwrap(),
        "--method",
        "matching",
        "--t",
        "0.7",
        "--steps",
        "3",
        "--out",
        circuit_path.to_str().unwrap(),
        "--dump",
        dump_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let circuit = GateCircuit::from_json_str(&fs::read_to_string(&circuit_path).unwrap()).unwrap();
    assert_eq!(circuit.num_qubits(), 2);
    assert!(!circuit.is_empty());

    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("circuit.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["method"], "matching");
    assert_eq!(meta["trotter_steps"], 3);
    assert_eq!(meta["num_matchings"], 2);
    assert_eq!(meta["cx_count"].as_u64().unwrap(), circuit.cx_count().unwrap() as u64);
    assert_eq!(meta["depth"].as_u64().unwrap(), circuit.depth() as u64);

    let dump = fs::read_to_string(&dump_path).unwrap();
    assert!(dump.contains("rx q"));
    assert!(dump.contains("cx q"));
}

#[test]
fn compile_pauli_meta_counts_terms() {
    let tmp = tempfile::tempdir().unwrap();
    let square = write_square(tmp.path());
    let circuit_path = tmp.path().join("pauli.json");
    let out = qwalk(&[
        "compile",
        "--input",
        square.to_str().unwrap(),
        "--method",
        "pauli",
        "--t",
        "1.0",
        "--steps",
        "1",
        "--out",
        circuit_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("pauli.meta.json")).unwrap())
            .unwrap();
    // The 4-cycle splits into IX and XX, nothing else.
    assert_eq!(meta["num_terms"], 2);
}

#[test]
fn simulate_square_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let square = write_square(tmp.path());
    for method in ["matching", "pauli"] {
        let out = qwalk(&[
            "simulate",
            "--input",
            square.to_str().unwrap(),
            "--method",
            method,
            "--t",
            "1.0",
            "--steps",
            "1",
        ]);
        let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
        assert_eq!(doc["num_qubits"], 2);
        let err = doc["error_2norm"].as_f64().unwrap();
        // Both decompositions of the 4-cycle have commuting parts.
        assert!(err < 1e-12, "{method}: {err}");
    }
}

#[test]
fn compare_then_report_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let dataset = tmp.path().join("data");
    stdout_of(&qwalk(&[
        "generate",
        "--dataset",
        "connected-path",
        "--vertices",
        "8",
        "--count",
        "6",
        "--seed",
        "7",
        "--out",
        dataset.to_str().unwrap(),
    ]));

    let records_path = tmp.path().join("records.csv");
    let run = |path: &Path| {
        let out = qwalk(&[
            "compare",
            "--input",
            dataset.to_str().unwrap(),
            "--t",
            "1.0",
            "--steps",
            "5",
            "--steps",
            "10",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(&records_path);

    let csv = fs::read_to_string(&records_path).unwrap();
    assert!(csv.starts_with("# qwalk-bench-csv v1\n"));
    let records = records_from_csv(&csv).unwrap();
    assert_eq!(records.len(), 6 * 2 * 2);
    assert!(records.windows(2).all(|w| {
        (&w[0].graph_id, w[0].method, w[0].trotter_steps)
            <= (&w[1].graph_id, w[1].method, w[1].trotter_steps)
    }));
    assert!(records.iter().all(|r| r.error_2norm.is_some()), "8 vertices fit the dense cap");
    assert!(records.iter().all(|r| r.dataset == "connected-path" && r.num_vertices == 8));

    // Halving the step size roughly halves the first-order error.
    let mean = |method: Method, steps: usize| {
        let v: Vec<f64> = records
            .iter()
            .filter(|r| r.method == method && r.trotter_steps == steps)
            .map(|r| r.error_2norm.unwrap())
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let ratio = mean(Method::Matching, 5) / mean(Method::Matching, 10);
    assert!((1.4..=2.6).contains(&ratio), "convergence ratio {ratio}");

    let summary = fs::read_to_string(tmp.path().join("records.summary.csv")).unwrap();
    assert!(summary.starts_with("# qwalk-bench-summary-csv v1\n"));
    assert_eq!(summary.lines().count(), 2 + 4, "one summary row per (method, steps)");

    // Reruns agree on everything except wall time.
    let again_path = tmp.path().join("records_again.csv");
    run(&again_path);
    let again = records_from_csv(&fs::read_to_string(&again_path).unwrap()).unwrap();
    assert_eq!(records.len(), again.len());
    for (a, b) in records.iter().zip(&again) {
        assert_eq!(a.graph_id, b.graph_id);
        assert_eq!((a.cx_count, a.depth, a.seed), (b.cx_count, b.depth, b.seed));
        let (ea, eb) = (a.error_2norm.unwrap(), b.error_2norm.unwrap());
        assert!((ea - eb).abs() <= 1e-12, "{}: {ea} vs {eb}", a.graph_id);
    }

    let report_dir = tmp.path().join("report");
    let out = qwalk(&[
        "report",
        "--input",
        records_path.to_str().unwrap(),
        "--out",
        report_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let convergence = fs::read_to_string(report_dir.join("convergence.csv")).unwrap();
    assert!(convergence.starts_with("# qwalk-report-convergence-csv v1\n"));
    assert_eq!(convergence.lines().count(), 2 + 4);
    let gates = fs::read_to_string(report_dir.join("gate_counts.csv")).unwrap();
    assert!(gates.starts_with("# qwalk-report-gatecounts-csv v1\n"));
    assert_eq!(gates.lines().count(), 2 + 2);
}

#[test]
fn compare_repeat_adds_rerun_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let dataset = tmp.path().join("data");
    stdout_of(&qwalk(&[
        "generate",
        "--dataset",
        "connected-path",
        "--vertices",
        "8",
        "--count",
        "2",
        "--seed",
        "3",
        "--out",
        dataset.to_str().unwrap(),
    ]));
    let out = qwalk(&[
        "compare",
        "--input",
        dataset.to_str().unwrap(),
        "--t",
        "0.5",
        "--steps",
        "4",
        "--repeat",
        "3",
    ]);
    let records = records_from_csv(&stdout_of(&out)).unwrap();
    // Matching cells fan out into 3 rows, Pauli cells stay single.
    assert_eq!(records.len(), 2 * 3 + 2);
    let reruns: Vec<&str> = records
        .iter()
        .filter(|r| r.graph_id.contains("/r"))
        .map(|r| r.graph_id.as_str())
        .collect();
    assert_eq!(reruns.len(), 4);
    assert!(reruns.iter().all(|id| id.ends_with("/r1") || id.ends_with("/r2")));
    assert!(records
        .iter()
        .filter(|r| r.graph_id.contains("/r"))
        .all(|r| r.method == Method::Matching));
}

#[test]
fn witness_reports_relabeled_hypercube() {
    let tmp = tempfile::tempdir().unwrap();
    let q3 = write_hypercube(tmp.path(), 3);

    let plain = qwalk(&["witness", "--input", q3.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&plain)).unwrap();
    assert_eq!(doc["graph_id"], "q3");
    assert_eq!(doc["commuting_matching_found"], true);
    assert_eq!(doc["pauli_noncommuting"], false);

    let relabeled = qwalk(&[
        "witness",
        "--input",
        q3.to_str().unwrap(),
        "--relabel",
        "times3",
        "--graph-id",
        "demo",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&relabeled)).unwrap();
    assert_eq!(doc["graph_id"], "demo");
    assert_eq!(doc["commuting_matching_found"], true);
    assert_eq!(doc["pauli_noncommuting"], true);
    let strings: Vec<&str> = doc["witness_terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["string"].as_str().unwrap())
        .collect();
    assert_eq!(strings, ["IXI", "IYY"]);

    let block = qwalk(&[
        "witness",
        "--input",
        write_hypercube(tmp.path(), 4).to_str().unwrap(),
        "--relabel",
        "block:1",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&block)).unwrap();
    assert_eq!(doc["commuting_matching_found"], true);
    assert_eq!(doc["pauli_noncommuting"], true);

    let bogus = qwalk(&["witness", "--input", q3.to_str().unwrap(), "--relabel", "rot13"]);
    assert_eq!(exit_code(&bogus), 1);
    assert!(String::from_utf8_lossy(&bogus.stderr).contains("unknown relabeling"));
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    let tmp = tempfile::tempdir().unwrap();

    let usage = qwalk(&["compile", "--input", "x.json"]);
    assert_eq!(exit_code(&usage), 1, "missing required flags");

    let unknown = qwalk(&["frobnicate"]);
    assert_eq!(exit_code(&unknown), 1);

    let help = qwalk(&["--help"]);
    assert_eq!(exit_code(&help), 0);
    assert!(String::from_utf8_lossy(&help.stdout).contains("qwalk"));

    let missing = qwalk(&["decompose", "--input", tmp.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(exit_code(&missing), 2);

    let garbled = tmp.path().join("bad.json");
    fs::write(&garbled, "{not json").unwrap();
    let parse = qwalk(&["decompose", "--input", garbled.to_str().unwrap()]);
    assert_eq!(exit_code(&parse), 2);

    // 13 qubits compile fine but the dense-operator cap rejects simulation.
    let wide = tmp.path().join("wide.json");
    fs::write(&wide, r#"{"num_qubits":13,"edges":[[0,1]]}"#).unwrap();
    let budget = qwalk(&[
        "simulate",
        "--input",
        wide.to_str().unwrap(),
        "--method",
        "matching",
        "--t",
        "1.0",
        "--steps",
        "1",
    ]);
    assert_eq!(exit_code(&budget), 3);

    let q7 = write_hypercube(tmp.path(), 7);
    let witness = qwalk(&["witness", "--input", q7.to_str().unwrap()]);
    assert_eq!(exit_code(&witness), 3);
}
