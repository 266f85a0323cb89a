use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn ultra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Clusters the iris sample into `dir/dend.json`.
fn iris_dendrogram(dir: &Path) -> PathBuf {
    let dend = dir.join("dend.json");
    let out = ultra(&[
        "cluster",
        "--input",
        s(&data("iris8.csv")),
        "--criterion",
        "median",
        "--out",
        s(&dend),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    dend
}

#[test]
fn cluster_output_feeds_every_consumer() {
    let dir = TempDir::new().unwrap();
    let dend = iris_dendrogram(dir.path());
    let iris = data("iris8.csv");

    let table = ultra(&[
        "wavelet",
        "forward",
        "--dend",
        s(&dend),
        "--data",
        s(&iris),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&table), 0);
    let text = stdout(&table);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(",s7,d7,d6,d5,d4,d3,d2,d1"));
    assert_eq!(
        lines.next(),
        Some("Sepal.L,5.146875,0.253125,0.131250,0.137500,-0.025000,0.050000,-0.025000,0.050000")
    );
    assert_eq!(text.lines().count(), 5);

    let padic = ultra(&["padic", "--dend", s(&dend), "--p", "3", "--check-unique"]);
    assert_eq!(code(&padic), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&padic)).unwrap();
    assert_eq!(v["unique"], true);
    assert_eq!(v["codes"].as_object().unwrap().len(), 8);

    let canon_path = dir.path().join("canon.json");
    assert_eq!(
        code(&ultra(&["canon", "--dend", s(&dend), "--out", s(&canon_path)])),
        0
    );
    // the canonical tree is itself valid input
    let again = ultra(&["wavelet", "forward", "--dend", s(&canon_path), "--data", s(&iris)]);
    assert_eq!(code(&again), 0);
}

#[test]
fn coefficients_invert_to_the_data() {
    let dir = TempDir::new().unwrap();
    let dend = iris_dendrogram(dir.path());
    let coeffs = dir.path().join("c.json");
    let fwd = ultra(&[
        "wavelet",
        "forward",
        "--dend",
        s(&dend),
        "--data",
        s(&data("iris8.csv")),
        "--out",
        s(&coeffs),
    ]);
    assert_eq!(code(&fwd), 0);
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(&coeffs).unwrap()).unwrap();
    assert_eq!(c["smooth"].as_array().unwrap().len(), 4);
    assert_eq!(c["details"]["14"]["level"], 7);

    let inv = ultra(&["wavelet", "inverse", "--dend", s(&dend), "--coeffs", s(&coeffs)]);
    assert_eq!(code(&inv), 0);
    let rows: Vec<String> = stdout(&inv).lines().map(String::from).collect();
    assert_eq!(rows[0], ",Sepal.L,Sepal.W,Petal.L,Petal.W");
    assert_eq!(rows[1], "1,5.100000,3.500000,1.400000,0.200000");
    assert_eq!(rows[8], "8,5.000000,3.400000,1.500000,0.200000");

    let chain = ultra(&[
        "wavelet",
        "chain",
        "--dend",
        s(&dend),
        "--coeffs",
        s(&coeffs),
        "--terminal",
        "6",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&chain)).unwrap();
    let steps = v["6"].as_array().unwrap();
    assert_eq!(steps.len(), 2);
    assert_eq!(steps[1]["error"], 0.0);

    let reg = ultra(&[
        "wavelet",
        "regress",
        "--dend",
        s(&dend),
        "--coeffs",
        s(&coeffs),
        "--tau",
        "0.1",
    ]);
    assert_eq!(code(&reg), 0);
    assert!(stdout(&reg).contains("1,5.025000,3.475000,1.450000,0.200000"));
}

#[test]
fn genum_level_three_is_one_cluster() {
    let out = ultra(&["genum", "--input", s(&data("presence5.csv")), "--level", "3"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["clusters"]["3"], serde_json::json!([["a", "b", "c", "e", "f"]]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);

    let text = ultra(&["genum", "--input", s(&data("presence5.csv")), "--text"]);
    assert!(stdout(&text).contains("v2,v3 corresponds to: d(a,e), d(c,e)"));
}

#[test]
fn selftest_passes() {
    let out = ultra(&["selftest"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("12/12 checks passed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&ultra(&[])), 1);
    assert_eq!(code(&ultra(&["frobnicate"])), 1);
    assert_eq!(code(&ultra(&["cluster"])), 1);
    assert_eq!(
        code(&ultra(&[
            "cluster",
            "--input",
            "x.csv",
            "--criterion",
            "centroid"
        ])),
        1
    );
    assert_eq!(code(&ultra(&["--help"])), 0);

    assert_eq!(code(&ultra(&["cluster", "--input", "/no/such/file.csv"])), 2);
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&ultra(&["cluster", "--input", s(&empty)])), 2);
    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "a,b\n1,2\n3\n").unwrap();
    assert_eq!(code(&ultra(&["cluster", "--input", s(&ragged)])), 2);
    let words = dir.path().join("words.csv");
    fs::write(&words, "a,b\nx,1\ny,oops\n").unwrap();
    assert_eq!(code(&ultra(&["cluster", "--input", s(&words)])), 2);

    let out = ultra(&["genum", "--input", s(&data("iris8.csv"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not boolean"));

    let chain_median = ultra(&[
        "cluster",
        "--input",
        s(&data("iris8.csv")),
        "--algorithm",
        "chain",
    ]);
    assert_eq!(code(&chain_median), 2);

    let dend = iris_dendrogram(dir.path());
    assert_eq!(code(&ultra(&["padic", "--dend", s(&dend), "--p", "4"])), 2);
    let wrong_rows = dir.path().join("short.csv");
    fs::write(&wrong_rows, ",x\na,1\nb,2\n").unwrap();
    assert_eq!(
        code(&ultra(&[
            "wavelet",
            "forward",
            "--dend",
            s(&dend),
            "--data",
            s(&wrong_rows)
        ])),
        2
    );
    assert_eq!(
        code(&ultra(&[
            "wavelet",
            "regress",
            "--dend",
            s(&dend),
            "--data",
            s(&data("iris8.csv")),
            "--tau=-1"
        ])),
        2
    );
}

#[test]
fn column_selection_and_rank_levels() {
    let out = ultra(&[
        "cluster",
        "--input",
        s(&data("iris8.csv")),
        "--columns",
        "Sepal.L,Sepal.W",
        "--criterion",
        "ward",
        "--levels",
        "rank",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let levels: Vec<f64> = v["merges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m[2].as_f64().unwrap())
        .collect();
    assert_eq!(levels, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
    assert_eq!(
        code(&ultra(&[
            "cluster",
            "--input",
            s(&data("iris8.csv")),
            "--columns",
            "Nope"
        ])),
        2
    );
}

#[test]
fn pipeline_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |sub: &str, format: &str| {
        let out_dir = dir.path().join(sub);
        let out = ultra(&[
            "pipeline",
            "--input",
            s(&data("presence5.csv")),
            "--tau",
            "0.1",
            "--format",
            format,
            "--out-dir",
            s(&out_dir),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let a = run("a", "json");
    let b = run("b", "json");
    let names = [
        "dendrogram.json",
        "dendrogram.nwk",
        "coefficients.json",
        "chains.json",
        "regression.csv",
        "padic.json",
        "lattice.json",
        "lattice.txt",
    ];
    for name in names {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let csv = run("c", "csv");
    assert!(csv.join("coefficients.csv").exists());

    // numeric input gets no lattice
    let iris_dir = dir.path().join("iris");
    let out = ultra(&[
        "pipeline",
        "--input",
        s(&data("iris8.csv")),
        "--out-dir",
        s(&iris_dir),
    ]);
    assert_eq!(code(&out), 0);
    assert!(iris_dir.join("padic.json").exists());
    assert!(!iris_dir.join("lattice.json").exists());
    assert_eq!(
        code(&ultra(&[
            "pipeline",
            "--input",
            s(&data("iris8.csv")),
            "--p",
            "6",
            "--out-dir",
            s(&iris_dir)
        ])),
        2
    );
}
