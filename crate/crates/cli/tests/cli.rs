use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chainmail::interchange::parse_poset;
use chainmail::is_isomorphic;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainmail"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_path(args: &[&str], path: &Path) -> Output {
    bin().args(args).arg(path).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Minimal DOT reader for the subset the renderer emits: a `digraph` with
/// node statements, `a -> b` edges and `{ rank=same; ... }` groups.
/// Returns the node set and edge list, or an error describing the first
/// malformed line.
fn parse_dot(text: &str) -> Result<(HashSet<String>, Vec<(String, String)>), String> {
    fn ident(s: &str) -> Result<String, String> {
        let s = s.trim();
        let inner = s.strip_prefix('"').and_then(|r| r.strip_suffix('"')).ok_or(format!("unquoted id {s:?}"))?;
        if inner.contains('"') && !inner.contains("\\\"") {
            return Err(format!("stray quote in {s:?}"));
        }
        Ok(inner.replace("\\\"", "\"").replace("\\\\", "\\"))
    }
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let head = lines.next().ok_or("empty")?;
    let name = head.strip_prefix("digraph ").and_then(|r| r.strip_suffix('{')).ok_or(format!("bad header {head:?}"))?;
    if name.trim().is_empty() {
        return Err("graph has no name".into());
    }
    let mut nodes = HashSet::new();
    let mut edges = Vec::new();
    let mut closed = false;
    for line in lines {
        if closed {
            return Err(format!("content after closing brace: {line:?}"));
        }
        if line == "}" {
            closed = true;
            continue;
        }
        if let Some(group) = line.strip_prefix('{') {
            let group =
                group.trim_end_matches(';').trim().strip_suffix('}').ok_or(format!("unclosed group {line:?}"))?;
            let mut parts = group.split(';').map(str::trim).filter(|p| !p.is_empty());
            if parts.next() != Some("rank=same") {
                return Err(format!("unknown group {line:?}"));
            }
            for p in parts {
                let id = ident(p)?;
                if !nodes.contains(&id) {
                    return Err(format!("rank group names undeclared node {id}"));
                }
            }
            continue;
        }
        let body = line.strip_suffix(';').ok_or(format!("missing semicolon: {line:?}"))?;
        if let Some((a, b)) = body.split_once("->") {
            edges.push((ident(a)?, ident(b)?));
        } else if body.contains('=') && !body.starts_with('"') {
            // graph or default attribute statement
        } else {
            nodes.insert(ident(body)?);
        }
    }
    if !closed {
        return Err("missing closing brace".into());
    }
    for (a, b) in &edges {
        if !nodes.contains(a) || !nodes.contains(b) {
            return Err(format!("edge {a} -> {b} uses an undeclared node"));
        }
    }
    Ok((nodes, edges))
}

#[test]
fn check_reports_lattice_witness() {
    let o = run_path(&["check"], &data("seven.json"));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "poset: yes; lattice: no (witness {3,4}); chainmail: yes");

    let o = run_path(&["check"], &data("b3.json"));
    assert_eq!(stdout(&o).trim(), "poset: yes; lattice: yes; chainmail: yes");
}

#[test]
fn check_rejects_non_posets() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cycle.json");
    std::fs::write(&f, r#"{"elements":["a","b"],"covers":[["a","b"],["b","a"]]}"#).unwrap();
    let o = run_path(&["check"], &f);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("poset: no"));
}

#[test]
fn dlattice_of_counterexample_has_eleven_elements() {
    let o = run_path(&["dlattice"], &data("seven.json"));
    assert_eq!(code(&o), 0);
    let d = parse_poset(&stdout(&o)).unwrap();
    assert_eq!(d.size(), 11);
    assert!(String::from_utf8_lossy(&o.stderr).contains("11 elements"));
}

#[test]
fn emitted_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let seven = data("seven.json");
    let original = parse_poset(&std::fs::read_to_string(&seven).unwrap()).unwrap();

    // the connected elements of D(G) recover G
    let d_out = dir.path().join("d.json");
    let o = bin().args(["dlattice"]).arg(&seven).arg("-o").arg(&d_out).output().unwrap();
    assert_eq!(code(&o), 0);
    let d = parse_poset(&std::fs::read_to_string(&d_out).unwrap()).unwrap();
    let k_out = dir.path().join("k.json");
    let o = bin().args(["klattice"]).arg(&d_out).arg("-o").arg(&k_out).output().unwrap();
    assert_eq!(code(&o), 0);
    let k = parse_poset(&std::fs::read_to_string(&k_out).unwrap()).unwrap();
    assert!(is_isomorphic(&k, &original));

    // every JSON file the tool writes re-parses as a valid poset
    let b3 = data("b3.json");
    let o = run_path(&["klattice"], &b3);
    let k3 = parse_poset(&stdout(&o)).unwrap();
    assert_eq!(k3.size(), 3);
    // a finite lattice is itself a chainmail
    let o = run_path(&["check"], &d_out);
    assert_eq!(stdout(&o).trim(), "poset: yes; lattice: yes; chainmail: yes");
    assert_eq!(d.size(), 11);
}

#[test]
fn build_from_graph() {
    let o = run_path(&["build", "graph"], &data("path3.json"));
    assert_eq!(code(&o), 0);
    let g = parse_poset(&stdout(&o)).unwrap();
    // connected vertex sets of a 3-vertex path
    assert_eq!(g.size(), 6);
}

#[test]
fn render_emits_valid_dot() {
    for name in ["seven.json", "b3.json"] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out.dot");
        let o = bin().arg("render").arg(data(name)).arg("-o").arg(&out).output().unwrap();
        assert_eq!(code(&o), 0);
        let text = std::fs::read_to_string(&out).unwrap();
        let (nodes, edges) = parse_dot(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let p = parse_poset(&std::fs::read_to_string(data(name)).unwrap()).unwrap();
        assert_eq!(nodes.len(), p.size());
        assert_eq!(edges.len(), p.covers().len());
    }
}

#[test]
fn dot_reader_rejects_garbage() {
    assert!(parse_dot("graph {\n}\n").is_err());
    assert!(parse_dot("digraph g {\n  \"a\" -> \"b\";\n}\n").is_err());
    assert!(parse_dot("digraph g {\n  \"a\";\n").is_err());
}

#[test]
fn enumerate_prints_count_table() {
    let o = run(&["enumerate", "-n", "7", "--filter", "mail-connected-chainmails"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n\t1\t2\t3\t4\t5\t6\t7");
    assert_eq!(lines[1], "mail-connected-chainmails\t1\t1\t2\t5\t16\t62\t303");

    let o = run(&["enumerate", "-n", "5", "--filter", "all-posets", "--jobs", "2"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("all-posets\t1\t2\t5\t16\t63"));
}

#[test]
fn enumerate_writes_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["enumerate", "-n", "4", "--catalog"]).arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 0);
    let dots = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "dot"))
        .count();
    assert_eq!(dots, 1 + 1 + 2 + 5);
}

#[test]
fn represent_reports_absence() {
    let o = bin().arg("represent").arg(data("seven.json")).args(["--max-points", "5"]).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("absent"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&run(&[])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 3);
    assert_eq!(code(&run(&["verify", "--suite", "nonsense"])), 3);
    assert_eq!(code(&run(&["enumerate", "-n", "9"])), 3);
    assert_eq!(code(&run(&["enumerate", "-n", "3", "--jobs", "0"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn budget_flag_limits_input() {
    let o = bin().args(["--budget", "3", "check"]).arg(data("seven.json")).output().unwrap();
    assert_eq!(code(&o), 1);
    let o = bin().env("CHAINMAIL_BUDGET", "3").arg("check").arg(data("seven.json")).output().unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn missing_file_is_a_failure() {
    assert_eq!(code(&run(&["check", "/nonexistent/file.json"])), 1);
}

#[test]
fn verify_suites_pass_and_catch_seeded_faults() {
    let mut exits = HashMap::new();
    for suite in ["e-conditions", "thmD", "thmF", "thmH", "adjunction"] {
        let ok = run(&["verify", "--suite", suite, "--max-size", "4"]);
        assert_eq!(code(&ok), 0, "{suite}: {}", stdout(&ok));
        assert!(stdout(&ok).contains("PASS"));
        let bad = run(&["verify", "--suite", suite, "--max-size", "4", "--seeded-fault"]);
        exits.insert(suite, code(&bad));
    }
    assert!(exits.values().all(|&c| c != 0), "a seeded fault went unnoticed: {exits:?}");
    assert!(exits.values().all(|&c| c == 2));
}
