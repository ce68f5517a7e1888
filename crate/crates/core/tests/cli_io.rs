mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::q;
use riskrank::early_warning::Label;
use riskrank::engine::{riskrank_root, riskrank_series, RiskRankConfig};
use riskrank::io::{
    self, parse_inputs, read_events, read_indicators, read_probabilities, read_snapshots, write_events,
    write_indicators, write_probabilities, write_snapshots, InputPaths, ProbabilityRow,
};
use riskrank::synth::{generate_synthetic, SynthSpec};
use riskrank::Error;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn fixture_inputs() -> InputPaths {
    InputPaths {
        nodes: Some(fixture("nodes.csv")),
        links: Some(fixture("links.csv")),
        indicators: Some(fixture("indicators.csv")),
        events: Some(fixture("events.csv")),
    }
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskrank")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// A failing run exits nonzero with exactly one `error kind=… msg=…` line.
fn assert_diagnostic(o: &Output, kind: &str) {
    assert!(!o.status.success(), "expected failure, stdout: {}", stdout(o));
    let err = stderr(o);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "diagnostic is not one line: {err:?}");
    assert!(lines[0].starts_with(&format!("error kind={kind} msg=\"")), "{err}");
}

#[test]
fn fixture_parses_to_known_counts() {
    let inputs = parse_inputs(&fixture_inputs()).unwrap();
    let snaps = inputs.snapshots.unwrap();
    assert_eq!(snaps.len(), 2);
    assert_eq!(snaps[0].date, q("2010-Q1"));
    assert!(snaps.iter().all(|s| s.network.len() == 3 && s.network.links().len() == 4));
    assert_eq!(snaps[1].network.node_by_id("A").unwrap().self_exposure, Some(0.25));

    let panel = inputs.panel.unwrap();
    assert_eq!(panel.entities(), ["AA", "BB"]);
    assert_eq!(panel.quarters().len(), 3);
    assert_eq!(panel.indicator_names(), ["credit_gap", "house_prices"]);
    let aa = panel.entity_pos("AA").unwrap();
    assert_eq!(panel.row(aa, 1), &[Some(1.7), None]);

    let events = inputs.events.unwrap();
    assert_eq!(events.len(), 2);
    assert_eq!(events.events()[1].end, None);

    let d = riskrank_root(&snaps[0]).unwrap();
    assert!((d.total - 0.8 / 1.3).abs() < 1e-12);
}

#[test]
fn snapshot_round_trip_is_identity() {
    let data = generate_synthetic(&SynthSpec { quarters: 20, ..SynthSpec::default() }).unwrap();
    let (mut nodes, mut links) = (Vec::new(), Vec::new());
    write_snapshots(&data.snapshots, &mut nodes, &mut links).unwrap();
    let back = read_snapshots(&nodes[..], "nodes", &links[..], "links").unwrap();
    assert_eq!(back.len(), data.snapshots.len());
    for (a, b) in data.snapshots.iter().zip(&back) {
        assert_eq!(a.date, b.date);
        assert_eq!(a.network.nodes(), b.network.nodes());
        assert_eq!(a.network.links(), b.network.links());
    }
    // Writing again yields the same bytes.
    let (mut nodes2, mut links2) = (Vec::new(), Vec::new());
    write_snapshots(&back, &mut nodes2, &mut links2).unwrap();
    assert_eq!((nodes, links), (nodes2, links2));
}

#[test]
fn panel_events_and_probability_round_trips() {
    let data = generate_synthetic(&SynthSpec::default()).unwrap();
    let mut buf = Vec::new();
    write_indicators(&data.panel, &mut buf).unwrap();
    assert_eq!(read_indicators(&buf[..], "ind").unwrap(), data.panel);

    let mut buf = Vec::new();
    write_events(&data.events, &mut buf).unwrap();
    assert_eq!(read_events(&buf[..], "ev").unwrap().events(), data.events.events());

    let rows = vec![
        ProbabilityRow { entity: "AA".into(), date: q("2001-Q1"), p: 0.123456789012 },
        ProbabilityRow { entity: "AA".into(), date: q("2001-Q2"), p: 1.5e-9 },
    ];
    let mut buf = Vec::new();
    write_probabilities(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text, "entity,date,p\nAA,2001-Q1,0.123456789\nAA,2001-Q2,1.5e-9\n");
    let back = read_probabilities(&buf[..], "p").unwrap();
    assert_eq!(back[1].p, 1.5e-9);
}

#[test]
fn schema_errors_carry_line_numbers() {
    let nodes = "date,node_id,level,parent_id,risk_value,self_exposure\n2010-Q1,S,0,,,\n2010-Q1,A,1,S,1.7,\n";
    let links = "date,source_id,target_id,weight\n2010-Q1,A,S,1\n";
    match read_snapshots(nodes.as_bytes(), "nodes.csv", links.as_bytes(), "links.csv") {
        Err(Error::Schema { path, line, .. }) => assert_eq!((path.as_str(), line), ("nodes.csv", 3)),
        other => panic!("{other:?}"),
    }

    let nodes = "date,node_id,level,parent_id,risk_value,self_exposure\n2010-Q1,S,0,,,\n2010-Q1,A,1,S,0.5,\n";
    let links = "date,source_id,target_id,weight\n2010-Q1,A,S,1\n2010-Q1,Z,S,1\n";
    match read_snapshots(nodes.as_bytes(), "nodes.csv", links.as_bytes(), "links.csv") {
        Err(Error::Schema { path, line, msg }) => {
            assert_eq!((path.as_str(), line), ("links.csv", 3));
            assert!(msg.contains('Z'), "{msg}");
        }
        other => panic!("{other:?}"),
    }

    let bad_date = "entity,date,x\nAA,2010-Q5,1\n";
    assert!(matches!(read_indicators(bad_date.as_bytes(), "i"), Err(Error::Schema { line: 2, .. })));
    let bad_header = "entity,start,end\n";
    assert!(matches!(read_events(bad_header.as_bytes(), "e"), Err(Error::Schema { line: 1, .. })));
}

#[test]
fn empty_links_file_has_no_root_capacity() {
    let nodes = fs::read(fixture("nodes.csv")).unwrap();
    let links = b"date,source_id,target_id,weight\n";
    let snaps = read_snapshots(&nodes[..], "nodes", &links[..], "links").unwrap();
    assert!(matches!(riskrank_root(&snaps[0]), Err(Error::NoCapacity(_))));
}

#[test]
fn synthetic_labels_line_up_with_events() {
    let data = generate_synthetic(&SynthSpec::default()).unwrap();
    let labels = riskrank::early_warning::label_precrisis(&data.events, &data.panel, 5, 12).unwrap();
    for e in data.events.events() {
        assert_eq!(labels.label_of(&e.entity, e.start), Some(Label::Excluded));
    }
}

#[test]
fn cli_riskrank_on_fixture() {
    let o = cli(&["riskrank", "--nodes", fixture("nodes.csv").to_str().unwrap(), "--links", fixture("links.csv").to_str().unwrap(), "--all"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "date,target,individual,direct,indirect,total_raw,total");
    assert_eq!(lines.len(), 1 + 2 * 3);
    // S at 2010-Q1: 0.8/1.3; A at 2010-Q2: (0.25·0.4 + 0.5·0.2)/0.75.
    assert!(lines[1].starts_with("2010-Q1,S,0,") && lines[1].ends_with(",0.6153846154"), "{}", lines[1]);
    let a_q2 = lines.iter().find(|l| l.starts_with("2010-Q2,A,")).unwrap();
    assert!(a_q2.ends_with(",0.2666666667"), "{a_q2}");

    let snaps = parse_inputs(&fixture_inputs()).unwrap().snapshots.unwrap();
    let rows = riskrank_series(&snaps, &["S".into(), "A".into(), "B".into()], &RiskRankConfig::default()).unwrap();
    let mut buf = Vec::new();
    io::write_decompositions(&rows, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), out);
}

#[test]
fn cli_validate_and_shapley() {
    let dir = tempfile::tempdir().unwrap();
    let ok = cli(&["validate", "--nodes", fixture("nodes.csv").to_str().unwrap(), "--links", fixture("links.csv").to_str().unwrap(), "--indicators", fixture("indicators.csv").to_str().unwrap(), "--events", fixture("events.csv").to_str().unwrap()]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    assert!(stdout(&ok).trim_end().ends_with("valid"));

    let nodes = dir.path().join("nodes.csv");
    fs::write(&nodes, "date,node_id,level,parent_id,risk_value,self_exposure\n2010-Q1,S,0,,,\n2010-Q1,T,0,,,\n2010-Q1,A,1,S,0.5,\n").unwrap();
    let links = dir.path().join("links.csv");
    fs::write(&links, "date,source_id,target_id,weight\n2010-Q1,A,S,1\n").unwrap();
    let bad = cli(&["validate", "--nodes", nodes.to_str().unwrap(), "--links", links.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert_diagnostic(&bad, "validation");
    assert!(stdout(&bad).contains("error[root]"), "{}", stdout(&bad));

    let measure = dir.path().join("m.json");
    fs::write(&measure, r#"{"n":2,"mu":{"":0,"1":0.4,"2":0.4,"1,2":1}}"#).unwrap();
    let o = cli(&["shapley", "--measure", measure.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["shapley"], serde_json::json!([0.5, 0.5]));
    assert!((doc["interaction"][0][1].as_f64().unwrap() - 0.2).abs() < 1e-12);

    fs::write(&measure, r#"{"n":2,"mu":{"":0,"1":0.6,"2":0.4,"1,2":0.5}}"#).unwrap();
    let o = cli(&["validate", "--measure", measure.to_str().unwrap()]);
    assert_diagnostic(&o, "validation");
}

#[test]
fn cli_error_paths_are_single_line() {
    assert_diagnostic(&cli(&["riskrank", "--nodes", "/no/such/file.csv", "--links", "/no/such/links.csv"]), "io");
    assert_diagnostic(&cli(&["riskrank", "--links", "x.csv"]), "invalid_parameter");
    assert_diagnostic(&cli(&["riskrank", "--bogus"]), "usage");
    assert_diagnostic(&cli(&["evaluate"]), "invalid_parameter");
    assert_diagnostic(&cli(&["backtest", "--indicators", fixture("indicators.csv").to_str().unwrap(), "--events", fixture("events.csv").to_str().unwrap()]), "insufficient_data");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"horizon":[5,12],"colour":"red"}"#).unwrap();
    assert_diagnostic(&cli(&["--config", cfg.to_str().unwrap(), "evaluate", "--table2-fixture"]), "json");
    fs::write(&cfg, r#"{"horizon":[9,4]}"#).unwrap();
    assert_diagnostic(&cli(&["--config", cfg.to_str().unwrap(), "evaluate", "--table2-fixture"]), "invalid_parameter");
    let bad_nodes = dir.path().join("n.csv");
    fs::write(&bad_nodes, "date,node_id,level,parent_id,risk_value,self_exposure\n2010-Q1,S,0,,,\n2010-Q1,A,x,S,0.5,\n").unwrap();
    let o = cli(&["riskrank", "--nodes", bad_nodes.to_str().unwrap(), "--links", fixture("links.csv").to_str().unwrap()]);
    assert_diagnostic(&o, "schema");
    assert!(stderr(&o).contains(":3:"), "{}", stderr(&o));
}

#[test]
fn cli_config_supplies_inputs_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let doc = serde_json::json!({
        "nodes": fixture("nodes.csv"),
        "links": fixture("links.csv"),
        "riskrank": { "central_weight_mode": "unit", "clamp": false }
    });
    fs::write(&cfg, doc.to_string()).unwrap();
    let from_cfg = cli(&["--config", cfg.to_str().unwrap(), "riskrank", "--target", "A"]);
    assert!(from_cfg.status.success(), "{}", stderr(&from_cfg));
    // Unit weight: A at 2010-Q1 has individual 0.8 and total 0.8 + 0.5·0.5.
    let first = stdout(&from_cfg).lines().nth(1).unwrap().to_string();
    assert_eq!(first, "2010-Q1,A,0.8,0.25,0,1.05,1.05");

    let overridden = cli(&["--config", cfg.to_str().unwrap(), "riskrank", "--target", "A", "--central-weight", "shapley"]);
    let first = stdout(&overridden).lines().nth(1).unwrap().to_string();
    assert_eq!(first, "2010-Q1,A,0.4,0.25,0,0.65,0.65");
}

#[test]
fn cli_table_fixture_check_passes() {
    let o = cli(&["evaluate", "--table2-fixture"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("individual,0.6,24.9,25,true"));
    assert!(out.contains("riskrank,0.5,18.0,38,false"));
    assert!(out.contains("cell,1.0,precision_t,-,-,true"));
}

fn run_pipeline(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let steps: Vec<Vec<String>> = vec![
        vec!["synth".into(), "--out-dir".into(), p(""), "--seed".into(), "7".into()],
        vec!["backtest".into(), "--indicators".into(), p("indicators.csv"), "--events".into(), p("events.csv"), "--out".into(), p("probabilities.csv")],
        vec!["riskrank".into(), "--nodes".into(), p("nodes.csv"), "--links".into(), p("links.csv"), "--all".into(), "--probabilities".into(), p("probabilities.csv"), "--out".into(), p("decomposition.csv"), "--probs-out".into(), p("riskrank_probs.csv")],
        vec!["evaluate".into(), "--probs".into(), format!("individual={}", p("probabilities.csv")), "--probs".into(), format!("riskrank={}", p("riskrank_probs.csv")), "--indicators".into(), p("indicators.csv"), "--events".into(), p("events.csv"), "--out".into(), p("eval_report.csv")],
        vec!["report".into(), "--nodes".into(), p("nodes.csv"), "--links".into(), p("links.csv"), "--out".into(), p("report.csv")],
    ];
    for args in &steps {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = cli(&args);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    }
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|path| (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn cli_pipeline_is_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_pipeline(a.path());
    let second = run_pipeline(b.path());
    assert_eq!(first.len(), 9);
    for ((name_a, bytes_a), (name_b, bytes_b)) in first.iter().zip(&second) {
        assert_eq!(name_a, name_b);
        assert!(bytes_a == bytes_b, "{name_a} differs between runs");
    }
    let report = String::from_utf8(first.iter().find(|f| f.0 == "eval_report.csv").unwrap().1.clone()).unwrap();
    assert_eq!(report.lines().count(), 1 + 2 * 11);
    assert!(report.starts_with(&io::EVAL_HEADER.join(",")));
}
