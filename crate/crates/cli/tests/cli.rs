use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tfactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfactor"))
        .args(args)
        .env_remove("TFACTOR_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn k4_pseudo_covers_two_thirds() {
    for seed in ["0", "7", "123"] {
        let out = tfactor(&[
            "pack-pseudo",
            "--n",
            "4",
            "--t",
            "2",
            "--p",
            "1",
            "--r-override",
            "1",
            "--seed",
            seed,
        ]);
        assert!(out.status.success());
        let r = json(&out);
        assert_eq!(r["coverage"]["num"], 2);
        assert_eq!(r["coverage"]["den"], 3);
        assert_eq!(r["factors_count"], 2);
        assert_eq!(r["config"]["seed"].as_u64().unwrap().to_string(), seed);
        assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn chernoff_bound_mode() {
    let out = tfactor(&["bounds", "--mu", "300", "--epsilon", "0.1"]);
    assert!(out.status.success());
    let v = json(&out)["chernoff"]["bound"]["value"].as_f64().unwrap();
    assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
}

#[test]
fn permutation_and_delta_bounds() {
    let r = json(&tfactor(&[
        "bounds",
        "--n",
        "100",
        "--deviation",
        "10",
        "--nu",
        "100",
        "--p",
        "0.5",
    ]));
    let v = r["permutation"]["bound"]["value"].as_f64().unwrap();
    assert!((v - 2.0 * (-2.0f64).exp()).abs() < 1e-12);
    assert_eq!(r["fk_random_delta"]["bound"]["vacuous"], true);
}

#[test]
fn reports_are_byte_identical() {
    let args = [
        "pack-random",
        "--n",
        "60",
        "--t",
        "3",
        "--p",
        "0.7",
        "--r-override",
        "6",
        "--seed",
        "9",
    ];
    let (a, b) = (tfactor(&args), tfactor(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exported_factors_verify_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let factors = dir.path().join("f.txt");
    assert!(tfactor(&[
        "gen",
        "--n",
        "40",
        "--p",
        "0.8",
        "--seed",
        "3",
        "--output",
        path(&graph)
    ])
    .status
    .success());
    let pack = tfactor(&[
        "pack-pseudo",
        "--input",
        path(&graph),
        "--t",
        "2",
        "--r-override",
        "3",
        "--seed",
        "3",
        "--factors",
        path(&factors),
    ]);
    assert!(pack.status.success());
    assert!(json(&pack)["factors_count"].as_u64().unwrap() > 0);

    let ok = tfactor(&[
        "verify",
        "--input",
        path(&graph),
        "--factors",
        path(&factors),
    ]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert_eq!(json(&ok)["valid"], true);

    // Point one copy at a vertex pair that is not a tree edge image.
    let text = std::fs::read_to_string(&factors).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let copy = lines.iter().position(|l| l.contains(':')).unwrap();
    let (verts, _) = lines[copy].split_once(':').unwrap();
    let ids: Vec<&str> = verts.split_whitespace().collect();
    lines[copy] = format!("{} {} : {} {}", ids[0], ids[1], ids[0], ids[0]);
    std::fs::write(&factors, lines.join("\n") + "\n").unwrap();

    let bad = tfactor(&[
        "verify",
        "--input",
        path(&graph),
        "--factors",
        path(&factors),
    ]);
    assert!(!bad.status.success());
    let stderr = String::from_utf8_lossy(&bad.stderr);
    assert!(
        stderr.contains("\"error\":\"verification\"") || stderr.contains("\"error\":\"parse\""),
        "{stderr}"
    );
}

#[test]
fn shared_edge_between_factors_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let factors = dir.path().join("f.txt");
    std::fs::write(&graph, "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    std::fs::write(
        &factors,
        "factors 2 4 2\nfactor 0\n0 1 : 0 1\n2 3 : 2 3\nfactor 1\n0 1 : 0 1\n2 3 : 2 3\n",
    )
    .unwrap();
    let out = tfactor(&[
        "verify",
        "--input",
        path(&graph),
        "--factors",
        path(&factors),
    ]);
    assert_eq!(out.status.code(), Some(5));
    let r = json(&out);
    assert_eq!(r["valid"], false);
    assert_eq!(r["violation"]["detail"]["violation"], "shared_edge");
}

#[test]
fn exit_codes_by_category() {
    assert_eq!(
        tfactor(&["pack-pseudo", "--n", "5", "--t", "2", "--p", "1"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        tfactor(&[
            "pack-bootstrap",
            "--n",
            "12",
            "--t",
            "3",
            "--tau",
            "4",
            "--p",
            "1"
        ])
        .status
        .code(),
        Some(4)
    );
    assert_eq!(
        tfactor(&[
            "pack-bootstrap",
            "--n",
            "12",
            "--t",
            "2",
            "--tau",
            "5",
            "--p",
            "1"
        ])
        .status
        .code(),
        Some(4)
    );
    assert_eq!(
        tfactor(&["pack-pseudo", "--n", "4", "--t", "2", "--p", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        tfactor(&[
            "pack-pseudo",
            "--n",
            "4",
            "--t",
            "2",
            "--p",
            "1",
            "--epsilon",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        tfactor(&["pack-pseudo", "--input", "/nonexistent/g.txt", "--t", "2"])
            .status
            .code(),
        Some(3)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("g.txt");
    std::fs::write(&bad, "3 1\n0 7\n").unwrap();
    assert_eq!(
        tfactor(&["certify", "--input", path(&bad)]).status.code(),
        Some(6)
    );
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"n": 4, "t": 2, "p": 1.0, "r_override": 1, "seed": 11}"#,
    )
    .unwrap();
    let r = json(&tfactor(&[
        "pack-pseudo",
        "--config",
        path(&cfg),
        "--seed",
        "12",
    ]));
    assert_eq!(r["config"]["seed"], 12);
    assert_eq!(r["config"]["r_override"], 1);
    std::fs::write(&cfg, r#"{"n": 4, "bogus": 1}"#).unwrap();
    assert_eq!(
        tfactor(&["pack-pseudo", "--config", path(&cfg)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_defaults_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_tfactor"))
        .args([
            "pack-pseudo",
            "--n",
            "4",
            "--t",
            "2",
            "--p",
            "1",
            "--r-override",
            "1",
        ])
        .env("TFACTOR_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 77);
}

#[test]
fn csv_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (hist, sweep) = (dir.path().join("h.csv"), dir.path().join("s.csv"));
    let out = tfactor(&[
        "pack-pseudo",
        "--n",
        "40",
        "--t",
        "2",
        "--p",
        "0.9",
        "--r-override",
        "4",
        "--csv",
        path(&hist),
        "--sweep-r",
        "1,2,3",
        "--sweep-csv",
        path(&sweep),
    ]);
    assert!(out.status.success());
    let h = std::fs::read_to_string(&hist).unwrap();
    assert!(h.starts_with("appearances,edges\n"));
    let edges: usize = h
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(edges as u64, json(&out)["total_edges"].as_u64().unwrap());
    let s = std::fs::read_to_string(&sweep).unwrap();
    assert_eq!(s.lines().count(), 4);
    assert!(s.lines().nth(1).unwrap().starts_with("1,"));
}

#[test]
fn certify_reports_blowup() {
    let r = json(&tfactor(&[
        "certify",
        "--n",
        "60",
        "--p",
        "0.5",
        "--epsilon",
        "0.9",
        "--t",
        "3",
        "--blowup",
    ]));
    assert_eq!(r["blowup"]["pairs"].as_array().unwrap().len(), 2);
    assert_eq!(r["blowup"]["sigma"].as_array().unwrap().len(), 60);
    assert!(r["regularity"]["min_degree"].is_u64());
}

#[test]
fn bootstrap_report_accounts_for_all_edges() {
    let r = json(&tfactor(&[
        "pack-bootstrap",
        "--n",
        "12",
        "--t",
        "2",
        "--tau",
        "4",
        "--p",
        "1",
        "--outer-r",
        "1",
    ]));
    let loss = &r["loss_breakdown"];
    let sum: u64 = ["within_part", "uncovered_pair", "matching_shortfall"]
        .iter()
        .map(|k| loss[k].as_u64().unwrap())
        .sum();
    assert_eq!(sum + r["covered_edges"].as_u64().unwrap(), 66);
    assert_eq!(loss["within_part"], 12);
}
