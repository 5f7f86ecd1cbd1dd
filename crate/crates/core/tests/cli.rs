use std::fs;
use std::process::{Command, Output};

fn toydj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toydj")).args(args).output().expect("spawn toydj")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_family() {
    let o = toydj(&["run", "--family", "parity", "--n", "5000", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("Balanced, 1 query\n"), "{text}");
    let readout = text.lines().nth(1).unwrap().strip_prefix("readout: ").unwrap();
    // the kickback always lands on the most significant input
    assert_eq!(readout, format!("{}1", "0".repeat(4999)));
}

#[test]
fn run_table_files() {
    let dir = tempfile::tempdir().unwrap();
    let const0 = dir.path().join("const0.tt");
    fs::write(&const0, "3\n00000000\n").unwrap();
    let o = toydj(&["run", "--table", const0.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Constant, 1 query\nreadout: 000\n");

    let skewed = dir.path().join("skewed.tt");
    fs::write(&skewed, "2\n0001\n").unwrap();
    let o = toydj(&["run", "--table", skewed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let bad = dir.path().join("bad.tt");
    fs::write(&bad, "2\n01x0\n").unwrap();
    assert_eq!(toydj(&["run", "--table", bad.to_str().unwrap()]).status.code(), Some(1));

    let balanced = dir.path().join("balanced.tt");
    fs::write(&balanced, "3\n01101001\n").unwrap();
    for (x, want) in [(0, "0"), (1, "1"), (3, "0"), (7, "1")] {
        let o = toydj(&["query", "--table", balanced.to_str().unwrap(), "--x", &x.to_string()]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), format!("{want}\n"), "x = {x}");
    }
}

#[test]
fn query_families() {
    let o = toydj(&["query", "--family", "masked-parity", "--n", "64", "--mask", "0x8000000000000001", "--x", "1"]);
    assert_eq!(stdout(&o), "1\n");
    let o = toydj(&["query", "--family", "bitk", "--n", "10", "--k", "3", "--x", "8"]);
    assert_eq!(stdout(&o), "1\n");
    assert_eq!(toydj(&["query", "--family", "msb", "--n", "3", "--x", "8"]).status.code(), Some(1));
}

#[test]
fn validate_exhaustive_and_sampled() {
    let o = toydj(&["validate", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim_end(), "72/72 functions pass");
    let o = toydj(&["validate", "--n", "8", "--samples", "500", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim_end(), "502/502 functions pass");
}

#[test]
fn enumerate_lists_every_promise_function() {
    let o = toydj(&["enumerate", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 72);
    assert!(lines.iter().all(|l| l.ends_with("deterministic correct")), "{text}");
    assert_eq!(lines.iter().filter(|l| l.contains("Constant")).count(), 2);
    let o = toydj(&["enumerate", "--n", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n too large for enumeration"));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let o = toydj(&[
        "bench", "--family", "parity", "--n-list", "10,100,1000", "--reps", "2", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,family,wall_seconds,state_bytes,queries,verdict"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for (row, (n, bytes)) in rows.iter().zip([(10, 16), (100, 32), (1000, 256)]) {
        assert_eq!(row[0], n.to_string());
        assert_eq!(row[1], "parity");
        assert!(row[2].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(row[3], bytes.to_string());
        assert_eq!(&row[4..], ["1", "Balanced"]);
    }
    assert_eq!(toydj(&["bench", "--family", "parity", "--n-list", "100,10"]).status.code(), Some(1));
}

#[test]
fn same_seed_same_output() {
    let args = ["run", "--family", "masked-parity", "--n", "300", "--mask", "0x5", "--seed", "42"];
    assert_eq!(stdout(&toydj(&args)), stdout(&toydj(&args)));
    let args = ["validate", "--n", "6", "--samples", "20", "--seed", "9"];
    assert_eq!(stdout(&toydj(&args)), stdout(&toydj(&args)));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(toydj(&[]).status.code(), Some(1));
    assert_eq!(toydj(&["run", "--family", "parity"]).status.code(), Some(1));
    assert_eq!(toydj(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(toydj(&["--help"]).status.code(), Some(0));
}
