//! Subcommand drivers. Each one reads settings, runs the experiment and
//! writes its files into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bing_core::bingtree::{BingTree, ExpansionMode, NodeId};
use bing_core::experiments::{Audit, budget_scaling, compare_strategies, monte_carlo_random, run_full_tree, run_shrink, scaling_experiment};
use bing_core::Error as CoreError;
use serde_json::{json, Value};

use crate::config::{RenderWhat, ScaleFamily, Settings};
use crate::emit;
use crate::svg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Run,
    Verify,
    Scale,
    Montecarlo,
    Compare,
    Render,
}

/// What a subcommand did.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// False when a requested verification failed.
    pub passed: bool,
    /// Human-readable lines for the terminal.
    pub messages: Vec<String>,
}

fn write(out: &Path, name: &str, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    files.push(path);
    Ok(())
}

/// What a subcommand needs from the config, checked before any work.
fn check(cmd: Subcommand, settings: &Settings) -> Result<()> {
    match cmd {
        Subcommand::Run | Subcommand::Verify | Subcommand::Render => {
            settings.require_run()?;
        }
        Subcommand::Compare if settings.compare.len() < 2 => {
            bail!("compare needs at least two [compare.<label>] sections")
        }
        _ => {}
    }
    Ok(())
}

pub fn execute(cmd: Subcommand, settings: &Settings, out: &Path) -> Result<Outcome> {
    check(cmd, settings)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match cmd {
        Subcommand::Run => run(settings, out),
        Subcommand::Verify => verify(settings, out),
        Subcommand::Scale => scale(settings, out),
        Subcommand::Montecarlo => montecarlo(settings, out),
        Subcommand::Compare => compare(settings, out),
        Subcommand::Render => render(settings, out),
    }
}

fn run(settings: &Settings, out: &Path) -> Result<Outcome> {
    let cfg = settings.require_run()?;
    let report = run_shrink(cfg)?;
    let mut o = Outcome { passed: true, ..Outcome::default() };
    write(out, "nodes.csv", &emit::emit_csv(&report, settings.numbers), &mut o.files)?;
    let summary = emit::summary_json(&report, &settings.resolved, settings.numbers);
    write(out, "summary.json", &emit::to_text(&summary), &mut o.files)?;
    o.messages.push(format!(
        "{}: {} nodes visited, depth {} reached{}",
        cfg.strategy.name(),
        report.nodes_visited,
        report.max_depth_reached,
        if report.capped { " (capped)" } else { "" }
    ));
    for (t, s) in &report.stages_to_target {
        o.messages.push(match s {
            Some(s) => format!("diameter < {t}: {s} stages"),
            None => format!("diameter < {t}: not reached"),
        });
    }
    Ok(o)
}

/// The retrace lemma over every ancestor pair down to `max_depth`; inverted chains
/// (M > m) fall outside the lemma and are counted separately.
struct LemmaTally {
    checked: u64,
    inverted: u64,
    failures: u64,
    first_failure: Option<(NodeId, NodeId)>,
}

fn lemma_sweep(tree: &BingTree, max_depth: u64) -> Result<LemmaTally> {
    let mut t = LemmaTally { checked: 0, inverted: 0, failures: 0, first_failure: None };
    for node in tree.nodes() {
        let leaf = &node.id;
        if leaf.depth() as u64 > max_depth {
            continue;
        }
        for k in 0..=leaf.depth() {
            let tau = leaf.prefix(k);
            match tree.verify_lemma1(&tau, leaf) {
                Ok(rep) => {
                    t.checked += 1;
                    if !rep.bounds_ok {
                        t.failures += 1;
                        t.first_failure.get_or_insert((tau, leaf.clone()));
                    }
                }
                Err(CoreError::InvertedChain { .. }) => t.inverted += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(t)
}

/// One line per audit check, naming the first offending node on failure.
pub fn audit_lines(audit: &Audit) -> Vec<String> {
    audit
        .checks()
        .into_iter()
        .map(|(name, first)| match first {
            None => format!("ok    {name}"),
            Some(id) => format!("FAIL  {name}: first offending node sigma={}", id.label()),
        })
        .collect()
}

fn verify(settings: &Settings, out: &Path) -> Result<Outcome> {
    let cfg = settings.require_run()?;
    let (report, lemma) = if cfg.mode == ExpansionMode::Full {
        let (report, tree) = run_full_tree(cfg)?;
        (report, Some(lemma_sweep(&tree, settings.lemma_depth)?))
    } else {
        (run_shrink(cfg)?, None)
    };
    let mut o = Outcome { passed: report.audit.passed(), messages: audit_lines(&report.audit), ..Outcome::default() };
    let lemma_json = lemma.as_ref().map(|l| {
        json!({
            "max_depth": settings.lemma_depth,
            "chains_checked": l.checked,
            "chains_inverted": l.inverted,
            "failures": l.failures,
            "first_failure": l.first_failure.as_ref().map(|(a, b)| json!({ "tau": a.to_string(), "tau_prime": b.to_string() })),
        })
    });
    if let Some(l) = &lemma {
        match &l.first_failure {
            None => o.messages.push(format!("ok    retrace lemma on {} chains ({} inverted, skipped)", l.checked, l.inverted)),
            Some((tau, leaf)) => {
                o.passed = false;
                o.messages.push(format!(
                    "FAIL  retrace lemma: {} of {} chains, first offending node sigma={} (tau={})",
                    l.failures,
                    l.checked,
                    leaf.label(),
                    tau.label()
                ));
            }
        }
    }
    let doc = json!({
        "config": settings.resolved,
        "passed": o.passed,
        "audit": emit::audit_json(&report.audit),
        "lemma": lemma_json.unwrap_or(Value::Null),
        "capped": report.capped,
    });
    write(out, "verify.json", &emit::to_text(&doc), &mut o.files)?;
    Ok(o)
}

fn scale(settings: &Settings, out: &Path) -> Result<Outcome> {
    let s = &settings.scale;
    let mut series = Vec::new();
    if matches!(s.family, ScaleFamily::Fixed | ScaleFamily::Both) {
        series.push(scaling_experiment(&s.eps_values, s.target, s.eps_l, s.extrapolate_to, s.max_depth)?);
    }
    if matches!(s.family, ScaleFamily::Budget | ScaleFamily::Both) {
        series.push(budget_scaling(&s.eps_values, s.extrapolate_to, s.max_depth)?);
    }
    let mut o = Outcome { passed: true, ..Outcome::default() };
    write(out, "scale.csv", &emit::scaling_csv(&series), &mut o.files)?;
    let doc = json!({ "config": settings.resolved, "series": emit::scaling_json(&series) });
    write(out, "scale.json", &emit::to_text(&doc), &mut o.files)?;
    for r in &series {
        let fit = match (&r.fit, r.extrapolation) {
            (Some(f), Some((eps, st))) => format!("exponent {:.3}, S({eps}) ~ {st:.3e}", f.exponent),
            _ => "no fit (a target was not reached)".to_string(),
        };
        o.messages.push(format!("{}: {fit}", r.label));
    }
    Ok(o)
}

fn montecarlo(settings: &Settings, out: &Path) -> Result<Outcome> {
    let m = &settings.montecarlo;
    let r = monte_carlo_random(m.trials, m.depth, m.seed)?;
    let mut o = Outcome { passed: true, ..Outcome::default() };
    write(out, "montecarlo.csv", &emit::montecarlo_csv(&r), &mut o.files)?;
    write(out, "montecarlo.json", &emit::to_text(&emit::montecarlo_json(&r, &settings.resolved)), &mut o.files)?;
    if let Some(last) = r.rows.last() {
        o.messages.push(format!("depth {}: median diameter {:.4e}, mean {:.4e}", last.depth, last.quantiles[2], last.mean));
    }
    Ok(o)
}

fn compare(settings: &Settings, out: &Path) -> Result<Outcome> {
    let cfgs: Vec<_> = settings.compare.iter().map(|(_, c)| c.clone()).collect();
    let rows: Vec<_> = settings.compare.iter().map(|(l, _)| l.clone()).zip(compare_strategies(&cfgs)?).collect();
    let mut o = Outcome { passed: true, ..Outcome::default() };
    write(out, "compare.csv", &emit::comparison_csv(&rows), &mut o.files)?;
    write(out, "compare.json", &emit::to_text(&emit::comparison_json(&rows, &settings.resolved)), &mut o.files)?;
    for (label, r) in &rows {
        o.messages.push(format!("{label} ({}): stages {:?}", r.strategy, r.stages_to_target));
    }
    Ok(o)
}

fn render(settings: &Settings, out: &Path) -> Result<Outcome> {
    let cfg = settings.require_run()?;
    let report = run_shrink(cfg)?;
    let text = svg::render_svg(&report, settings.render)?;
    let name = match settings.render {
        RenderWhat::Functions(d) => format!("functions_depth_{d}.svg"),
        RenderWhat::PlaneTree => "plane_tree.svg".to_string(),
    };
    let mut o = Outcome { passed: true, ..Outcome::default() };
    write(out, &name, &text, &mut o.files)?;
    Ok(o)
}
