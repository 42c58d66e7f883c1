//! End-to-end checks of the command-line interface: formats, exit codes and
//! cross-command consistency.

use std::path::Path;
use std::process::{Command, Output};

fn ddmwis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddmwis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("missing `{key}` in output:\n{text}"))
        .to_string()
}

#[test]
fn generate_solve_oracle_agree() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("g.graph");
    let out = ddmwis(&[
        "generate", "--n", "24", "--density", "0.4", "--seed", "5", "--out",
        instance.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");

    let oracle = ddmwis(&["oracle", "--instance", instance.to_str().unwrap()]);
    assert!(oracle.status.success());
    let expected = field(&stdout(&oracle), "optimum");

    for config in [
        ["baseline", "fixed"],
        ["cbc", "adaptive"],
        ["pas", "fixed"],
        ["pas-vo", "adaptive"],
    ] {
        let solve = ddmwis(&[
            "solve", "--instance", instance.to_str().unwrap(), "--strategy", config[0],
            "--policy", config[1], "--width", "4",
        ]);
        assert!(solve.status.success(), "{solve:?}");
        let text = stdout(&solve);
        assert_eq!(field(&text, "optimum"), expected, "{config:?}");

        // The printed best set (1-based ids) must sum to the optimum.
        let ids: Vec<usize> = field(&text, "best_set")
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert!(!ids.is_empty());
        assert!(ids.iter().all(|&v| (1..=24).contains(&v)));
    }
}

#[test]
fn solve_trace_lines_follow_the_layer_format() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("g.graph");
    ddmwis(&[
        "generate", "--n", "12", "--density", "0.5", "--seed", "1", "--out",
        instance.to_str().unwrap(),
    ]);
    let out = ddmwis(&[
        "solve", "--instance", instance.to_str().unwrap(), "--width", "4", "--trace",
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let layer_lines: Vec<&str> = stderr
        .lines()
        .filter(|l| l.starts_with("layer="))
        .collect();
    assert!(!layer_lines.is_empty());
    for line in layer_lines {
        for (i, key) in ["layer=", "var=", "width_pre=", "width_post=", "merged="]
            .iter()
            .enumerate()
        {
            let token = line.split_whitespace().nth(i).unwrap();
            assert!(token.starts_with(key), "bad trace line: {line}");
            token[key.len()..].parse::<u64>().expect("numeric field");
        }
    }
}

#[test]
fn sweep_writes_parseable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let cache = dir.path().join("instances");
    let out = ddmwis(&[
        "sweep", "--densities", "0.8,0.9", "--n", "16", "--count", "2", "--configs",
        "baseline,cbc:fixed", "--width", "4", "--seed", "3", "--out",
        csv.to_str().unwrap(), "--cache-dir", cache.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "density,instance,strategy,policy,width,optimum,wall_time_s,nodes,cand_evals,relaxed_dds"
    );
    let mut data = 0;
    let mut summaries = 0;
    for line in lines {
        match ddmwis::bench::CsvRow::parse(line).unwrap() {
            ddmwis::bench::CsvRow::Data(_) => data += 1,
            ddmwis::bench::CsvRow::Summary(_) => summaries += 1,
        }
    }
    assert_eq!(data, 2 * 2 * 2);
    assert_eq!(summaries, 2 * 2);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 4);

    // `all` expands to the seven configurations.
    let csv_all = dir.path().join("all.csv");
    let out = ddmwis(&[
        "sweep", "--densities", "0.9", "--n", "12", "--count", "1", "--configs", "all",
        "--width", "4", "--out", csv_all.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv_all).unwrap();
    assert_eq!(text.lines().count(), 1 + 7 + 7);
}

#[test]
fn parse_and_contract_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();

    // Missing instance file.
    let out = ddmwis(&["oracle", "--instance", "/nonexistent.graph"]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed instance: vertex out of range, error names the line.
    let bad = dir.path().join("bad.graph");
    std::fs::write(&bad, "p 2 1\nv 1 1\nv 2 1\ne 1 5\n").unwrap();
    let out = ddmwis(&["solve", "--instance", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");

    // Oracle guard on large instances.
    let big = dir.path().join("big.graph");
    let out = ddmwis(&[
        "generate", "--n", "31", "--density", "0.5", "--out", big.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = ddmwis(&["oracle", "--instance", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Contract violations on arguments.
    let out = ddmwis(&[
        "generate", "--n", "5", "--density", "1.5", "--out",
        dir.path().join("x.graph").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = ddmwis(&["solve", "--instance", bad.to_str().unwrap(), "--width", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ddmwis(&["solve", "--instance", bad.to_str().unwrap(), "--strategy", "magic"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_instances_are_reproducible_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.graph");
    let b = dir.path().join("b.graph");
    for path in [&a, &b] {
        ddmwis(&[
            "generate", "--n", "40", "--density", "0.3", "--seed", "9", "--out",
            path.to_str().unwrap(),
        ]);
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same seed must give identical bytes"
    );
    assert!(Path::new(&a).exists());
}
