use std::path::Path;
use std::process::{Command, Output};

fn qphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qphase")).args(args).output().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn standard_cost_sweep_plateau() {
    let csv = stdout(&qphase(&["cost-sweep", "--dim", "10", "--cost", "standard", "--n", "2..30"]));
    let header = csv.lines().nth(1).unwrap();
    assert_eq!(header, "N,cost_covariant,cost_shifted_half,cost_optimal,xi_opt,S_opt");
    let level = 2.0 * (1.0 - (std::f64::consts::PI / 11.0).cos());
    for r in rows(&csv) {
        let expected = if r[0] <= 10.0 { 0.0 } else { level };
        assert!((r[3] - expected).abs() < 1e-8, "N={}: {}", r[0], r[3]);
        assert!(r[3] <= r[1].min(r[2]) + 1e-8);
    }
}

#[test]
fn qubit_fourier_point() {
    let csv = stdout(&qphase(&[
        "cost-sweep",
        "--dim",
        "2",
        "--cost",
        "fourier",
        "--alphas",
        "2.5,-2.6667,0.1667",
        "--n",
        "3..3",
    ]));
    let r = &rows(&csv)[0];
    assert!(r[2] < r[1] - 0.1);
    assert!((r[4] - std::f64::consts::PI / 3.0).abs() < 1e-6);
}

#[test]
fn optimize_examples() {
    let zero = stdout(&qphase(&["optimize", "--dim", "10", "--n", "8", "--cost", "step", "--sigma", "0.314159265"]));
    let cost = |text: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with("optimal cost")).unwrap();
        line.split_whitespace().last().unwrap().parse().unwrap()
    };
    assert!(cost(&zero).abs() < 1e-8);
    let half = stdout(&qphase(&["optimize", "--dim", "10", "--n", "20", "--cost", "step", "--sigma", "0.314159265"]));
    assert!((cost(&half) - 0.5).abs() < 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("c2.json");
    let text = stdout(&qphase(&[
        "optimize",
        "--dim",
        "2",
        "--n",
        "3",
        "--cost",
        "fourier",
        "--alphas",
        "1.25,-1,-0.25",
        "--out",
        json_path.to_str().unwrap(),
    ]));
    assert!(text.contains("state amplitudes"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(json["seeds"][0]["offset"].as_f64(), Some(0.0));
    assert_eq!(json["seed_count"].as_u64(), Some(1));
}

#[test]
fn mutual_information_rows() {
    let csv = stdout(&qphase(&["mutual-info", "--dim", "10", "--n", "2..15"]));
    assert_eq!(csv.lines().nth(1).unwrap(), "N,I_covariant,I_best_shift,xi_star,holevo");
    for r in rows(&csv) {
        let n = r[0];
        if n <= 10.0 {
            assert!((r[1] - n.log2()).abs() < 1e-6 && (r[2] - r[4]).abs() < 1e-6);
        } else {
            assert!(r[2] >= r[1] && r[2] <= r[4]);
        }
        let theta = 2.0 * std::f64::consts::PI / n;
        if n == 13.0 {
            assert_eq!(r[3], 0.0);
        }
        if n == 15.0 {
            assert!((r[3] - theta / 2.0).abs() < theta / 64.0);
        }
    }
}

#[test]
fn svg_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mi.csv");
    stdout(&qphase(&[
        "mutual-info",
        "--dim",
        "4",
        "--n",
        "2..9",
        "--bins",
        "64",
        "--svg",
        "--out",
        path.to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(&path).unwrap();
    let svg = std::fs::read_to_string(Path::new(&path).with_extension("svg")).unwrap();
    let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    let columns: Vec<&str> = lines[0].split(',').collect();
    let body: Vec<Vec<&str>> = lines[1..].iter().map(|l| l.split(',').collect()).collect();
    for series in ["I_covariant", "I_best_shift", "holevo"] {
        let c = columns.iter().position(|x| *x == series).unwrap();
        let ys: Vec<&str> = body.iter().map(|r| r[c]).collect();
        let xs: Vec<&str> = body.iter().map(|r| r[0]).collect();
        let tag = format!(r#"data-series="{series}" data-x="{}" data-y="{}""#, xs.join(" "), ys.join(" "));
        assert!(svg.contains(&tag), "{series} missing from chart");
    }
}

#[test]
fn dpss_output() {
    let csv = stdout(&qphase(&["dpss", "--dim", "10", "--sigma", "0.3141592653589793"]));
    let cost: f64 = csv.lines().nth(1).unwrap().trim_start_matches("# continuous_step_cost=").parse().unwrap();
    assert!((cost - 0.531_925_699_152_754).abs() < 1e-10);
    let amps: Vec<f64> = rows(&csv).iter().map(|r| r[1]).collect();
    assert_eq!(amps.len(), 10);
    assert!((amps.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(&config, "dim = 3\nn = \"2..4\"\ncost = \"step\"\nsigma = 1.0\nseed = 7\n").unwrap();
    let csv = stdout(&qphase(&["cost-sweep", "--config", config.to_str().unwrap(), "--n", "5..6"]));
    assert!(csv.starts_with("# qphase cost-sweep dim=3 cost=step sigma=1.0000000000000000e0 seeds_max=4 seed=0x7\n"));
    assert_eq!(rows(&csv).iter().map(|r| r[0]).collect::<Vec<_>>(), vec![5.0, 6.0]);
}

#[test]
fn exit_codes() {
    assert_eq!(qphase(&["cost-sweep", "--cost", "step", "--sigma", "7"]).status.code(), Some(2));
    assert_eq!(qphase(&["cost-sweep", "--cost", "fourier", "--n", "3"]).status.code(), Some(2));
    assert_eq!(qphase(&["cost-sweep", "--n", "4..2"]).status.code(), Some(2));
    assert_eq!(qphase(&["optimize", "--n", "3..5"]).status.code(), Some(2));
    assert_eq!(qphase(&["verify", "--filter", "nothing-matches"]).status.code(), Some(2));
    assert_eq!(qphase(&["dpss", "--config", "/nonexistent/q.toml"]).status.code(), Some(3));
    assert_eq!(qphase(&["dpss", "--out", "/nonexistent/dir/x.csv"]).status.code(), Some(3));
}
