use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bing_cli::commands::audit_lines;
use bing_cli::{emit_csv, execute, parse_settings, render_svg, NumberFormat, Subcommand};
use bing_core::bingtree::{ExpansionMode, NodeId};
use bing_core::exact::q;
use bing_core::experiments::{run_shrink, Audit, NodeRecord, RunConfig};
use bing_core::geometry::EpsSchedule;
use bing_core::strategies::StrategyConfig;
use bing_core::{ClaspChoice, FoldedPath, Side};

fn bing(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("exp.cfg");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_bing"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

#[test]
fn config_errors_exit_nonzero_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = bing(dir.path(), &["run"], "strategy = small_displacement\neps = 0.05\neps_L = -1\n");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("eps_L"), "{err}");

    let out = bing(dir.path(), &["run"], "depth = 4\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strategy"));
    assert!(!dir.path().join("out").exists(), "nothing runs before the config parses");
}

#[test]
fn root_only_run_writes_header_and_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = bing(dir.path(), &["run", "--set", "record_depth=0"], "strategy = bing1952\ndepth = 4\n");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/nodes.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "sigma,depth,c,d,a,b,img_lo,img_hi,length,disp_lo,disp_hi,phase,eps_phase");
    assert!(lines[1].starts_with(",0,0,1,"), "{}", lines[1]);

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    let config: Vec<&str> = json["config"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(config.contains(&"record_depth = 0") && config.contains(&"mode = extremal") && config.contains(&"seed = 0"));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "strategy = random\nseed = 17\nmode = sampled\npaths = 12\ndepth = 30\n";
    let read = |d: &Path| (fs::read(d.join("out/nodes.csv")).unwrap(), fs::read(d.join("out/summary.json")).unwrap());
    assert!(bing(dir.path(), &["run"], cfg).status.success());
    let first = read(dir.path());
    assert!(bing(dir.path(), &["run"], cfg).status.success());
    assert_eq!(first, read(dir.path()));
}

/// A report whose rows are the identity expanded at clasp (1/3, 3/4).
fn fold_example_report() -> bing_core::experiments::ExperimentReport {
    let mut cfg = RunConfig::new(StrategyConfig::Random { seed: 0 });
    cfg.max_depth = 1;
    let mut rep = run_shrink(&cfg).unwrap();
    let clasp = ClaspChoice::new(q(1, 3), q(3, 4));
    let root = FoldedPath::identity();
    let record = |sigma: NodeId, f: &FoldedPath, clasp: Option<ClaspChoice>| NodeRecord {
        sigma,
        domain: f.domain().clone(),
        image: f.image().clone(),
        clasp,
        phase: None,
        eps_phase: None,
        bullseye: None,
    };
    let (c0, c1) = root.fold_daughters(&clasp).unwrap();
    rep.rows = vec![
        record(NodeId::root(), &root, Some(clasp)),
        record(NodeId::root().child(Side::Zero), &c0, None),
        record(NodeId::root().child(Side::One), &c1, None),
    ];
    rep
}

#[test]
fn fold_example_rows() {
    let csv = emit_csv(&fold_example_report(), NumberFormat::Exact);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[1], ",0,0,1,1/3,3/4,0,1,1,1/3,1/4,,");
    assert_eq!(lines[2], "0,1,-1/3,3/4,,,0,3/4,13/12,,,,");
    assert_eq!(lines[3], "1,1,1/3,5/4,,,1/3,1,11/12,,,,");
    let dec = emit_csv(&fold_example_report(), NumberFormat::Decimal);
    assert!(dec.lines().nth(2).unwrap().starts_with("0,1,-0.3333333333333333,0.75,"));
}

fn parse_xml(text: &str) -> roxmltree::Document<'_> {
    roxmltree::Document::parse(text).expect("well-formed XML")
}

#[test]
fn identity_renders_as_the_diagonal() {
    let mut cfg = RunConfig::new(StrategyConfig::Random { seed: 0 });
    cfg.max_depth = 2;
    let rep = run_shrink(&cfg).unwrap();
    let svg = render_svg(&rep, bing_cli::config::RenderWhat::Functions(0)).unwrap();
    let doc = parse_xml(&svg);
    let lines: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("polyline")).collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0].attribute("points"), Some("0,0 1,1"));

    let err = render_svg(&rep, bing_cli::config::RenderWhat::Functions(7)).unwrap_err();
    assert!(err.to_string().contains("depth 7"));

    let svg = render_svg(&fold_example_report(), bing_cli::config::RenderWhat::Functions(1)).unwrap();
    let doc = parse_xml(&svg);
    let pts: Vec<&str> = doc.descendants().filter_map(|n| n.attribute("points")).collect();
    assert_eq!(pts.len(), 2);
    assert!(pts[0].starts_with("-0.3333333333333333,0.3333333333333333 0,0 0.75,0.75"), "{}", pts[0]);
}

#[test]
fn plane_tree_of_one_phase() {
    let mut cfg = RunConfig::new(StrategyConfig::SmallDisplacement { eps_l: 0.25, schedule: EpsSchedule::Constant(0.05), initial_eps: 0.05 });
    cfg.mode = ExpansionMode::Extremal;
    cfg.max_depth = u64::MAX;
    cfg.stop_after_phases = Some(1);
    cfg.record_depth = 1 << 20;
    let rep = run_shrink(&cfg).unwrap();
    let svg = render_svg(&rep, bing_cli::config::RenderWhat::PlaneTree).unwrap();
    let doc = parse_xml(&svg);
    let circles = doc.descendants().filter(|n| n.has_tag_name("circle")).count();
    let segments = doc.descendants().filter(|n| n.has_tag_name("line")).count();
    let bullseyes = rep.rows.iter().filter(|r| r.bullseye.is_some()).count();
    assert!(bullseyes >= 1);
    assert_eq!(circles, rep.rows.len() + bullseyes);
    assert_eq!(segments, rep.rows.len() - 1);

    // within a round, points sit on arcs around the round's center whose
    // squared radii grow by the squared step
    let mut center = None;
    let mut last_r2 = 0.0;
    for r in &rep.rows {
        let p = bing_core::geometry::to_plane(&r.domain);
        if let Some((c, radius)) = &r.bullseye {
            center = Some(*c);
            last_r2 = radius * radius;
            assert!((c.dist2(&p) - last_r2).abs() < 1e-9 * last_r2);
            continue;
        }
        if let Some(c) = center {
            let r2 = c.dist2(&p);
            assert!(r2 >= last_r2 * (1.0 - 1e-12), "radius shrank at {}", r.sigma);
            last_r2 = r2;
        }
    }
}

#[test]
fn verify_passes_and_failures_name_the_node() {
    let dir = tempfile::tempdir().unwrap();
    let out = bing(dir.path(), &["verify"], "strategy = random\nmode = full\ndepth = 6\n[verify]\nlemma_depth = 6\n");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("retrace lemma on"), "{stdout}");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/verify.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);

    let audit = Audit { nesting_violation: Some(NodeId::parse("0110").unwrap()), ..Audit::default() };
    assert!(!audit.passed());
    let lines = audit_lines(&audit);
    assert!(lines.iter().any(|l| l.starts_with("FAIL") && l.contains("sigma=0110")), "{lines:?}");
}

#[test]
fn every_subcommand_writes_its_files() {
    let text = "strategy = small_displacement\neps_L = 0.25\neps = 0.05\nstop_after_phases = 1\ndepth = 100000\n\
                [compare.sd]\nstrategy = small_displacement\neps_L = 0.25\neps = 0.05\nstop_after_phases = 1\ntargets = 0.5\n\
                [compare.b52]\nstrategy = bing1952\ndepth = 10\ntargets = 0.5\n\
                [scale]\neps_values = 0.2, 0.1\neps_L = 0.25\nfamily = fixed\n\
                [montecarlo]\ntrials = 50\ndepth = 20\n\
                [render]\nwhat = plane_tree\n";
    let settings = parse_settings(text, &[]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (cmd, files) in [
        (Subcommand::Run, vec!["nodes.csv", "summary.json"]),
        (Subcommand::Verify, vec!["verify.json"]),
        (Subcommand::Scale, vec!["scale.csv", "scale.json"]),
        (Subcommand::Montecarlo, vec!["montecarlo.csv", "montecarlo.json"]),
        (Subcommand::Compare, vec!["compare.csv", "compare.json"]),
        (Subcommand::Render, vec!["plane_tree.svg"]),
    ] {
        let o = execute(cmd, &settings, dir.path()).unwrap();
        assert!(o.passed, "{cmd:?}: {:?}", o.messages);
        for f in files {
            let text = fs::read_to_string(dir.path().join(f)).unwrap();
            assert!(!text.is_empty(), "{f}");
            if f.ends_with(".json") {
                let v: serde_json::Value = serde_json::from_str(&text).unwrap();
                assert!(v.get("config").is_some(), "{f} embeds the config");
            }
        }
    }
}

#[test]
fn node_cap_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "strategy = random\nmode = full\ndepth = 12\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bing"))
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .env("BING_MAX_NODES", "100")
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(json["capped"], true);
    assert!(json["nodes_retained"].as_u64().unwrap() <= 100);
    assert!(json["config"].as_array().unwrap().iter().any(|l| l == "max_nodes = 100"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        parse_settings(&text, &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 5);
}
