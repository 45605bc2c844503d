use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bic"))
        .args(args)
        .env_remove("BIC_SEED")
        .output()
        .expect("run bic")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn point_set(v: &Value) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_str().unwrap().to_string(), p[1].as_str().unwrap().to_string()))
        .collect();
    out.sort();
    out
}

#[test]
fn toy_region_json() {
    let o = bic(&["region", "--setup", "r0rl", "-M", "2", "-L", "1", "-n", "1", "-k", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for key in ["regime", "corners", "bounds", "verdict", "gap_vertices"] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
    let rates: Vec<Value> = v["corners"].as_array().unwrap().iter().map(|c| c["rate"].clone()).collect();
    assert_eq!(
        point_set(&Value::Array(rates)),
        [("0".into(), "2".into()), ("1".into(), "0".into())]
    );
    assert_eq!(v["verdict"], "tight_proven");
    assert_eq!(v["gap_vertices"].as_array().unwrap().len(), 0);
    assert!(v["bounds"].as_array().unwrap().iter().all(|b| b["status"] == "proven"));
}

#[test]
fn conjecture_region_json() {
    let o = bic(&["region", "--setup", "rlrm", "-M", "4", "-L", "3", "-n", "2", "-k", "2", "--conjectured", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["verdict"], "tight_if_conjecture");
    assert_eq!(point_set(&v["gap_vertices"]), [("0".into(), "3".into()), ("3".into(), "0".into())]);
    let statuses: Vec<&str> = v["bounds"].as_array().unwrap().iter().map(|b| b["status"].as_str().unwrap()).collect();
    assert!(statuses.contains(&"conjectured"));
    // Without the flag the conjectured plane is not listed.
    let o = bic(&["region", "--setup", "rlrm", "-M", "4", "-L", "3", "-n", "2", "-k", "2", "--format", "json"]);
    assert!(json(&o)["bounds"].as_array().unwrap().iter().all(|b| b["status"] == "proven"));
}

/// Minimal well-formedness: tags balance and nothing references outside.
fn check_svg(s: &str) {
    assert!(s.starts_with("<svg"));
    assert!(s.trim_end().ends_with("</svg>"));
    assert!(!s.contains("href"));
    let mut stack = Vec::new();
    let mut rest = s;
    while let Some(start) = rest.find('<') {
        let end = rest[start..].find('>').expect("unterminated tag") + start;
        let tag = &rest[start + 1..end];
        if let Some(name) = tag.strip_prefix('/') {
            assert_eq!(stack.pop(), Some(name.to_string()), "mismatched </{name}>");
        } else if !tag.ends_with('/') {
            stack.push(tag.split_whitespace().next().unwrap().to_string());
        }
        rest = &rest[end + 1..];
    }
    assert!(stack.is_empty(), "unclosed {stack:?}");
}

#[test]
fn region_svg() {
    let o = bic(&["region", "--setup", "r0rl", "-M", "4", "-L", "3", "-n", "1", "-k", "1", "--conjectured", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    check_svg(&s);
    assert!(s.len() < 64 * 1024);
    assert_eq!(s.matches("<polygon").count(), 1);
    assert_eq!(s.matches(r#"class="bound proven""#).count(), 2);
    assert_eq!(s.matches(r#"class="bound conjectured""#).count(), 1);
    assert!(s.contains("#2ca02c") && s.contains("#d62728") && s.contains("#1f77b4"));
}

#[test]
fn region_csv() {
    let o = bic(&["region", "-M", "3", "-L", "1", "-n", "3", "-k", "1", "--format", "csv"]);
    let s = stdout(&o);
    assert!(s.starts_with("record,label,x,y,a,b,c,status\n"));
    assert!(s.contains("corner,private-split,2,1,,,,"));
    assert!(s.contains("corner,erasure-all,8/3,0,,,,"));
    assert!(s.lines().any(|l| l == "verdict,tight_proven,,,,,,"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bic(&["region", "-M", "2", "-L", "3", "-n", "1", "-k", "1"]).status.code(), Some(2));
    assert_eq!(bic(&["region", "-M", "2", "-L", "1", "-n", "1", "-k", "3"]).status.code(), Some(2));
    assert_eq!(bic(&["region", "--bogus"]).status.code(), Some(2));
    assert_eq!(bic(&["verify", "-M", "2", "-L", "1", "-n", "1", "-k", "1", "--corner", "nope"]).status.code(), Some(2));
    assert_eq!(bic(&["oracle", "--max-t", "3"]).status.code(), Some(2));
    assert_eq!(bic(&[]).status.code(), Some(2));
    assert_eq!(bic(&["--help"]).status.code(), Some(0));
}

#[test]
fn io_errors_exit_one() {
    let o = bic(&["verify", "-M", "2", "-L", "1", "-n", "1", "-k", "1", "--scheme-file", "/nonexistent/s.txt"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().to_str().unwrap();
    let o = bic(&["region", "-M", "2", "-L", "1", "-n", "1", "-k", "1", "-o", target]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_alignment() {
    let o = bic(&["verify", "--corner", "alignment", "-M", "3", "-L", "1", "-n", "5", "-k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("overall PASS"));
    assert!(s.contains("= (9/5, 3/5); symbols (9, 3)"), "{s}");
}

#[test]
fn verify_erasure_lists_masks() {
    let o = bic(&["verify", "--corner", "erasure-all", "-M", "4", "-L", "2", "-n", "2", "-k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let masks: Vec<&str> = s
        .lines()
        .filter(|l| l.starts_with("user=1 class=exactly-l"))
        .map(|l| l.split_whitespace().nth(2).unwrap())
        .collect();
    assert_eq!(masks, ["mask=0011", "mask=0101", "mask=0110", "mask=1001", "mask=1010", "mask=1100"]);
}

#[test]
fn sabotaged_scheme_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    let o = bic(&[
        "verify", "--corner", "erasure-all", "-M", "2", "-L", "1", "-n", "1", "-k", "1",
        "--emit-scheme", good.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    // The file carries its own channel.
    let o = bic(&["verify", "--scheme-file", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    // Zero user 1's W_L generator rows.
    let mut in_target = false;
    let broken: Vec<String> = fs::read_to_string(&good)
        .unwrap()
        .lines()
        .map(|l| {
            if l.starts_with("gen ") {
                in_target = l.starts_with("gen user=1") && l.contains("class=WL");
                l.to_string()
            } else if in_target && l.chars().all(|c| c.is_ascii_hexdigit()) {
                "0".repeat(l.len())
            } else {
                l.to_string()
            }
        })
        .collect();
    let path = dir.path().join("broken.txt");
    fs::write(&path, broken.join("\n") + "\n").unwrap();

    let o = bic(&["verify", "--scheme-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let s = stdout(&o);
    assert!(s.contains("overall FAIL"));
    assert!(s.lines().any(|l| l.starts_with("user=1 class=exactly-l mask=") && l.contains("rank_dec=0") && l.ends_with("FAIL")));
}

#[test]
fn oracle_output() {
    let o = bic(&["oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    for p in ["1 0", "0 2", "0 1", "1/2 1"] {
        assert!(lines.iter().any(|l| l == p), "missing {p}");
    }
    let one: Vec<Value> = json(&bic(&["oracle", "--max-t", "1", "--format", "json"]))["points"].as_array().unwrap().clone();
    let two = json(&bic(&["oracle", "--format", "json"]));
    let two_points = two["points"].as_array().unwrap();
    assert!(one.iter().all(|p| two_points.contains(p)));
    assert!(two_points.iter().any(|p| p[0] == "1/2"));
    assert_eq!(two["contained"], true);
}

fn sweep_rows(args: &[&str]) -> Vec<Vec<String>> {
    let o = bic(args);
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_rows_by_regime() {
    let rows = sweep_rows(&["sweep", "--m-values", "2,3,4", "--no-schemes"]);
    let h = &rows[0];
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let (setup, m, l, alpha, verdict) = (col("setup"), col("M"), col("L"), col("alpha"), col("verdict"));
    for r in &rows[1..] {
        assert_eq!(r.len(), h.len());
        assert_eq!(r[col("inner_in_outer")], "true");
        let (mm, ll): (usize, usize) = (r[m].parse().unwrap(), r[l].parse().unwrap());
        if r[setup] == "r0rl" && 2 * ll <= mm {
            assert_eq!(r[verdict], "tight_proven", "{r:?}");
        }
    }
    let row = rows[1..]
        .iter()
        .find(|r| r[setup] == "r0rl" && r[m] == "4" && r[l] == "4" && r[alpha] == "1")
        .unwrap();
    assert_ne!(row[col("gap_area")], "0");
    assert_eq!(row[col("gap_area_conjectured")], "0");
}

#[test]
fn sweep_breakpoint_neighbourhood() {
    let alphas = "5/12,7/12,13/24,17/24,11/12,13/12,23/12";
    let rows = sweep_rows(&["sweep", "--m-values", "2,3,4", "--alphas", alphas]);
    let h = &rows[0];
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    for r in &rows[1..] {
        assert_eq!(r[col("inner_in_outer")], "true", "{r:?}");
        assert_eq!(r[col("schemes_passed")], r[col("schemes_total")], "{r:?}");
    }
}

#[test]
fn seed_from_environment_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep defaults\nm_values=2,4\nalphas=1\nseed=5\n").unwrap();
    let from_cfg = bic(&["sweep", "--config", cfg.to_str().unwrap()]);
    let explicit = bic(&["sweep", "--m-values", "2,4", "--alphas", "1", "--seed", "5"]);
    assert_eq!(from_cfg.status.code(), Some(0));
    assert_eq!(from_cfg.stdout, explicit.stdout);

    // Flags win over the file.
    let o = bic(&["sweep", "--config", cfg.to_str().unwrap(), "--m-values", "3"]);
    let s = stdout(&o);
    assert!(s.lines().skip(1).all(|l| l.split(',').nth(1) == Some("3")));

    let env = Command::new(env!("CARGO_BIN_EXE_bic"))
        .args(["sweep", "--m-values", "2,4", "--alphas", "1"])
        .env("BIC_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(env.stdout, explicit.stdout);

    fs::write(&cfg, "not a pair\n").unwrap();
    assert_eq!(bic(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn entropy_commands() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = dir.path().join("copies.pmf");
    fs::write(&pmf, "alphabets 2 2 2\n0 0 0 1/2\n1 1 1 1/2\n").unwrap();
    let o = bic(&["entropy", "--pmf", pmf.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["holds"], true);
    let chain: Vec<f64> = v["chain"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((chain[0] - 3.0).abs() < 1e-12 && (chain[1] - 1.5).abs() < 1e-12 && (chain[2] - 1.0).abs() < 1e-12);

    let o = bic(&["entropy", "--samples", "200", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "samples 200 violations 0\n");

    fs::write(&pmf, "alphabets 2\n0 0.4\n").unwrap();
    assert_eq!(bic(&["entropy", "--pmf", pmf.to_str().unwrap()]).status.code(), Some(2));
}
