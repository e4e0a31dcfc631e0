//! Line-oriented experiment configuration.
//!
//! ```text
//! # base run settings
//! strategy = small_displacement
//! eps_L = 0.25
//! eps = 0.05
//! depth = 20000
//!
//! [scale]
//! eps_values = 0.04, 0.02, 0.01
//! ```
//!
//! Keys before any section header, or inside `[run]`, describe the base
//! run. `[compare.<label>]` sections override base keys for one row of a
//! strategy comparison. Every other section belongs to one subcommand.

use std::collections::BTreeMap;

use bing_core::exact::{q, qi};
use bing_core::experiments::{RunConfig, DEFAULT_MAX_NODES};
use bing_core::geometry::EpsSchedule;
use bing_core::strategies::StrategyConfig;
use bing_core::bingtree::ExpansionMode;
use bing_core::Q;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: invalid value for `{field}`: {msg}")]
    Range { line: usize, field: String, msg: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
}

type CResult<T> = std::result::Result<T, ConfigError>;

/// One `key = value` entry with its source line.
#[derive(Clone, Debug, PartialEq)]
struct Entry {
    line: usize,
    value: String,
}

/// Raw parsed sections, in key order so the resolved config is stable.
#[derive(Clone, Debug, Default, PartialEq)]
struct Raw {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
    // compare labels in order of appearance
    compare_order: Vec<String>,
}

const BASE_KEYS: &[&str] = &[
    "strategy",
    "eps_L",
    "eps",
    "schedule",
    "plane_count",
    "goals",
    "patient_delta",
    "clasp_seed",
    "mode",
    "paths",
    "depth",
    "targets",
    "seed",
    "stop_after_phases",
    "stop_at_targets",
    "record_depth",
    "profile_depth",
    "max_nodes",
];
const OUTPUT_KEYS: &[&str] = &["numbers"];
const VERIFY_KEYS: &[&str] = &["lemma_depth"];
const SCALE_KEYS: &[&str] = &["eps_values", "target", "eps_L", "extrapolate_to", "family", "depth"];
const MC_KEYS: &[&str] = &["trials", "depth", "seed"];
const RENDER_KEYS: &[&str] = &["what", "depth"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberFormat {
    /// `p/q` (integers without a denominator).
    Exact,
    /// Shortest round-trip decimal of the nearest binary64.
    Decimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleFamily {
    /// Fixed `eps_L` and target, varying `ε`.
    Fixed,
    /// `eps_L = ε = target`.
    Budget,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSettings {
    pub eps_values: Vec<f64>,
    pub target: f64,
    pub eps_l: f64,
    pub extrapolate_to: f64,
    pub family: ScaleFamily,
    pub max_depth: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloSettings {
    pub trials: u64,
    pub depth: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderWhat {
    Functions(u64),
    PlaneTree,
}

/// Everything a config file can say.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    /// Base run; absent when the file names no strategy.
    pub run: Option<RunConfig>,
    pub numbers: NumberFormat,
    pub lemma_depth: u64,
    pub scale: ScaleSettings,
    pub montecarlo: MonteCarloSettings,
    pub compare: Vec<(String, RunConfig)>,
    pub render: RenderWhat,
    /// Canonical `key = value` lines after defaults and overrides.
    pub resolved: Vec<String>,
}

impl Settings {
    pub fn require_run(&self) -> CResult<&RunConfig> {
        self.run.as_ref().ok_or_else(|| ConfigError::Missing("strategy".into()))
    }
}

/// Parses a config and returns the base run it describes.
pub fn parse_config(text: &str) -> CResult<RunConfig> {
    parse_settings(text, &[])?.require_run().cloned()
}

/// Parses a config plus `key=value` overrides (`section.key=value` for
/// section keys). Overrides are numbered after the last line of the file.
pub fn parse_settings(text: &str, overrides: &[String]) -> CResult<Settings> {
    let mut raw = Raw::default();
    let mut section = String::new();
    let mut last = 0;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        last = n;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax { line: n, msg: format!("unterminated section header `{body}`") })?
                .trim();
            section = section_name(name, n)?;
            if let Some(label) = section.strip_prefix("compare.") {
                if raw.compare_order.iter().any(|l| l == label) {
                    return Err(ConfigError::Syntax { line: n, msg: format!("duplicate section [{section}]") });
                }
                raw.compare_order.push(label.to_string());
            }
            raw.sections.entry(section.clone()).or_default();
            continue;
        }
        let (key, value) = split_kv(body, n)?;
        insert(&mut raw, &section, key, value, n)?;
    }
    for (k, o) in overrides.iter().enumerate() {
        let n = last + k + 1;
        let (key, value) = split_kv(o, n)?;
        let (sec, key) = match key.split_once('.') {
            Some(("compare", k)) => match k.split_once('.') {
                Some((label, k)) => (format!("compare.{label}"), k.to_string()),
                None => return Err(ConfigError::Syntax { line: n, msg: format!("override `{o}` needs compare.<label>.<key>") }),
            },
            Some((s, k)) => (section_name(s, n)?, k.to_string()),
            None => (String::new(), key.to_string()),
        };
        if let Some(label) = sec.strip_prefix("compare.") {
            if !raw.compare_order.iter().any(|l| l == label) {
                raw.compare_order.push(label.to_string());
            }
        }
        insert(&mut raw, &sec, &key, value, n)?;
    }
    build(&raw)
}

fn section_name(name: &str, line: usize) -> CResult<String> {
    let ok = match name {
        "run" => return Ok(String::new()),
        "verify" | "scale" | "montecarlo" | "render" | "output" => true,
        _ => name.strip_prefix("compare.").is_some_and(|l| !l.is_empty() && !l.contains('.')),
    };
    if ok {
        Ok(name.to_string())
    } else {
        Err(ConfigError::Syntax { line, msg: format!("unknown section [{name}]") })
    }
}

fn split_kv(body: &str, line: usize) -> CResult<(&str, &str)> {
    let (k, v) = body
        .split_once('=')
        .ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected `key = value`, found `{body}`") })?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(ConfigError::Syntax { line, msg: "empty key".into() });
    }
    Ok((k, v))
}

fn insert(raw: &mut Raw, section: &str, key: &str, value: &str, line: usize) -> CResult<()> {
    let allowed: &[&str] = match section {
        "" => &[BASE_KEYS, OUTPUT_KEYS].concat(),
        "output" => OUTPUT_KEYS,
        "verify" => VERIFY_KEYS,
        "scale" => SCALE_KEYS,
        "montecarlo" => MC_KEYS,
        "render" => RENDER_KEYS,
        _ => BASE_KEYS,
    };
    if !allowed.contains(&key) {
        let shown = if section.is_empty() { "run" } else { section };
        return Err(ConfigError::UnknownKey { line, section: shown.to_string(), key: key.to_string() });
    }
    let sec = if section == "output" { "" } else { section };
    raw.sections
        .entry(sec.to_string())
        .or_default()
        .insert(key.to_string(), Entry { line, value: value.to_string() });
    Ok(())
}

/// Keys a `[compare.<label>]` section inherits from the base run; the
/// strategy and its parameters always come from the section itself.
const SHARED_KEYS: &[&str] = &["mode", "paths", "depth", "targets", "seed", "stop_at_targets", "record_depth", "profile_depth", "max_nodes"];

/// Typed access to a section, optionally falling back to inherited keys.
struct View<'a> {
    entries: &'a BTreeMap<String, Entry>,
    inherited: Option<&'a BTreeMap<String, Entry>>,
}

impl<'a> View<'a> {
    fn of(entries: &'a BTreeMap<String, Entry>) -> Self {
        View { entries, inherited: None }
    }

    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries
            .get(key)
            .or_else(|| self.inherited.filter(|_| SHARED_KEYS.contains(&key)).and_then(|m| m.get(key)))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, what: &str) -> CResult<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| range(e, key, &format!("expected {what}, found `{}`", e.value))),
        }
    }

    fn positive(&self, key: &str) -> CResult<Option<f64>> {
        match self.parse::<f64>(key, "a number")? {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(range(self.get(key).unwrap(), key, "must be positive")),
            other => Ok(other),
        }
    }

    fn list(&self, key: &str) -> CResult<Option<Vec<f64>>> {
        let Some(e) = self.get(key) else { return Ok(None) };
        e.value
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| range(e, key, &format!("`{}` is not a number", s.trim()))))
            .collect::<CResult<Vec<_>>>()
            .map(Some)
    }
}

fn range(e: &Entry, field: &str, msg: &str) -> ConfigError {
    ConfigError::Range { line: e.line, field: field.to_string(), msg: msg.to_string() }
}

fn empty() -> &'static BTreeMap<String, Entry> {
    static EMPTY: std::sync::OnceLock<BTreeMap<String, Entry>> = std::sync::OnceLock::new();
    EMPTY.get_or_init(BTreeMap::new)
}

fn section<'a>(raw: &'a Raw, name: &str) -> &'a BTreeMap<String, Entry> {
    match raw.sections.get(name) {
        Some(m) => m,
        None => empty(),
    }
}

fn build(raw: &Raw) -> CResult<Settings> {
    let base = View::of(section(raw, ""));
    let run = if base.get("strategy").is_some() { Some(run_config(&base)?) } else { None };
    let numbers = match base.get("numbers") {
        None => NumberFormat::Exact,
        Some(e) => match e.value.as_str() {
            "exact" => NumberFormat::Exact,
            "decimal" => NumberFormat::Decimal,
            _ => return Err(range(e, "numbers", "expected `exact` or `decimal`")),
        },
    };

    let verify = View::of(section(raw, "verify"));
    let lemma_depth = verify.parse::<u64>("lemma_depth", "an integer")?.unwrap_or(6);
    if lemma_depth > 16 {
        return Err(range(verify.get("lemma_depth").unwrap(), "lemma_depth", "at most 16"));
    }

    let sv = View::of(section(raw, "scale"));
    let scale = ScaleSettings {
        eps_values: sv.list("eps_values")?.unwrap_or_else(|| vec![0.04, 0.02, 0.01]),
        target: sv.positive("target")?.unwrap_or(0.5),
        eps_l: sv.positive("eps_L")?.unwrap_or(0.001),
        extrapolate_to: sv.positive("extrapolate_to")?.unwrap_or(0.001),
        family: match sv.get("family") {
            None => ScaleFamily::Both,
            Some(e) => match e.value.as_str() {
                "fixed" => ScaleFamily::Fixed,
                "budget" => ScaleFamily::Budget,
                "both" => ScaleFamily::Both,
                _ => return Err(range(e, "family", "expected `fixed`, `budget` or `both`")),
            },
        },
        max_depth: sv.parse::<u64>("depth", "an integer")?.unwrap_or(u64::MAX),
    };
    if let Some(e) = sv.get("eps_values") {
        let v = &scale.eps_values;
        if v.is_empty() || v.iter().any(|x| !(*x > 0.0)) || v.windows(2).any(|w| w[1] >= w[0]) {
            return Err(range(e, "eps_values", "must be positive and strictly decreasing"));
        }
    }
    if let Some(e) = sv.get("target") {
        if scale.target > 1.0 {
            return Err(range(e, "target", "must lie in (0, 1]"));
        }
    }

    let mv = View::of(section(raw, "montecarlo"));
    let montecarlo = MonteCarloSettings {
        trials: mv.parse::<u64>("trials", "an integer")?.unwrap_or(1000),
        depth: mv.parse::<u64>("depth", "an integer")?.unwrap_or(200),
        seed: mv.parse::<u64>("seed", "an integer")?.unwrap_or(0),
    };
    if montecarlo.trials == 0 {
        return Err(range(mv.get("trials").unwrap(), "trials", "must be at least 1"));
    }

    let mut compare = Vec::new();
    for label in &raw.compare_order {
        let name = format!("compare.{label}");
        let view = View { entries: section(raw, &name), inherited: Some(section(raw, "")) };
        if view.get("strategy").is_none() {
            return Err(ConfigError::Missing(format!("{name}.strategy")));
        }
        compare.push((label.clone(), run_config(&view)?));
    }

    let rv = View::of(section(raw, "render"));
    let render = match rv.get("what").map(|e| (e, e.value.as_str())) {
        None | Some((_, "functions")) => RenderWhat::Functions(rv.parse::<u64>("depth", "an integer")?.unwrap_or(1)),
        Some((_, "plane_tree")) => RenderWhat::PlaneTree,
        Some((e, _)) => return Err(range(e, "what", "expected `functions` or `plane_tree`")),
    };

    let mut settings = Settings {
        run,
        numbers,
        lemma_depth,
        scale,
        montecarlo,
        compare,
        render,
        resolved: Vec::new(),
    };
    settings.resolved = resolve(&settings);
    Ok(settings)
}

/// Hard node cap from `BING_MAX_NODES`, defaulting to 2^22.
pub fn node_cap() -> CResult<u64> {
    match std::env::var("BING_MAX_NODES") {
        Err(_) => Ok(DEFAULT_MAX_NODES),
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ConfigError::Invalid(format!("BING_MAX_NODES must be a positive integer, found `{v}`"))),
        },
    }
}

fn run_config(v: &View) -> CResult<RunConfig> {
    let strategy_entry = v.get("strategy").ok_or_else(|| ConfigError::Missing("strategy".into()))?;
    let strategy = match strategy_entry.value.as_str() {
        "small_displacement" => {
            let eps_l = v.positive("eps_L")?.ok_or_else(|| ConfigError::Missing("eps_L".into()))?;
            let eps = v.positive("eps")?.ok_or_else(|| ConfigError::Missing("eps".into()))?;
            let schedule = match v.get("schedule") {
                None => EpsSchedule::Constant(eps),
                Some(e) => parse_schedule(e)?,
            };
            StrategyConfig::SmallDisplacement { eps_l, schedule, initial_eps: eps }
        }
        "bing1952" => {
            let plane_count = v.parse::<u32>("plane_count", "an integer")?.unwrap_or(10);
            let goals = match v.get("goals") {
                None => StrategyConfig::default_goals(),
                Some(e) => e.value.split(',').map(|s| parse_q(s.trim()).ok_or_else(|| range(e, "goals", &format!("`{}` is not a rational", s.trim())))).collect::<CResult<Vec<_>>>()?,
            };
            StrategyConfig::Bing1952 { plane_count, goals }
        }
        "bing1988" => StrategyConfig::Bing1988 { patient_delta: v.positive("patient_delta")?.unwrap_or(0.01) },
        "random" => {
            let seed = v.parse::<u64>("seed", "an integer")?.unwrap_or(0);
            StrategyConfig::Random { seed: v.parse::<u64>("clasp_seed", "an integer")?.unwrap_or(seed) }
        }
        other => {
            return Err(range(strategy_entry, "strategy", &format!("unknown strategy `{other}` (small_displacement, bing1952, bing1988, random)")))
        }
    };
    strategy.validate().map_err(|e| range(strategy_entry, "strategy", &e.to_string()))?;

    let mut cfg = RunConfig::new(strategy);
    if let Some(e) = v.get("mode") {
        cfg.mode = match e.value.as_str() {
            "extremal" => ExpansionMode::Extremal,
            "full" => ExpansionMode::Full,
            "sampled" => ExpansionMode::SampledPaths { count: v.parse::<u32>("paths", "an integer")?.unwrap_or(100) },
            _ => return Err(range(e, "mode", "expected `extremal`, `full` or `sampled`")),
        };
    }
    if let Some(d) = v.parse::<u64>("depth", "an integer")? {
        if d < 1 {
            return Err(range(v.get("depth").unwrap(), "depth", "must be at least 1"));
        }
        cfg.max_depth = d;
    }
    if let Some(t) = v.list("targets")? {
        let e = v.get("targets").unwrap();
        if t.iter().any(|x| !(*x > 0.0 && *x <= 1.0)) || t.windows(2).any(|w| w[1] >= w[0]) {
            return Err(range(e, "targets", "must lie in (0, 1] and strictly decrease"));
        }
        cfg.diameter_targets = t;
    }
    cfg.seed = v.parse::<u64>("seed", "an integer")?.unwrap_or(0);
    cfg.stop_after_phases = v.parse::<u32>("stop_after_phases", "an integer")?;
    cfg.stop_at_targets = v.parse::<bool>("stop_at_targets", "true or false")?.unwrap_or(false);
    if let Some(d) = v.parse::<u64>("record_depth", "an integer")? {
        cfg.record_depth = d;
    }
    if let Some(d) = v.parse::<u64>("profile_depth", "an integer")? {
        cfg.profile_depth = d;
    }
    let cap = node_cap()?;
    cfg.max_nodes = match v.parse::<u64>("max_nodes", "an integer")? {
        Some(0) => return Err(range(v.get("max_nodes").unwrap(), "max_nodes", "must be positive")),
        Some(n) => n.min(cap),
        None => cap,
    };
    cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(cfg)
}

fn parse_schedule(e: &Entry) -> CResult<EpsSchedule> {
    let mut words = e.value.split_whitespace();
    let kind = words.next().unwrap_or("");
    let bad = |msg: &str| range(e, "schedule", msg);
    let sched = match kind {
        "constant" => {
            let x: f64 = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| bad("expected `constant <eps>`"))?;
            EpsSchedule::Constant(x)
        }
        "power" => {
            let (mut k, mut p) = (None, None);
            for w in words.by_ref() {
                match w.split_once('=') {
                    Some(("K", v)) => k = v.parse::<f64>().ok(),
                    Some(("p", v)) => p = v.parse::<f64>().ok(),
                    _ => return Err(bad(&format!("unexpected `{w}`; expected `power K=<k> p=<p>`"))),
                }
            }
            EpsSchedule::Power {
                k: k.ok_or_else(|| bad("power schedule needs K=<k>"))?,
                p: p.ok_or_else(|| bad("power schedule needs p=<p>"))?,
            }
        }
        "explicit" => {
            let rest: Vec<&str> = words.by_ref().collect();
            let terms = rest
                .join(" ")
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{}` is not a number", s.trim()))))
                .collect::<CResult<Vec<_>>>()?;
            EpsSchedule::Explicit(terms)
        }
        _ => return Err(bad("expected `constant`, `power` or `explicit`")),
    };
    if words.next().is_some() {
        return Err(bad("trailing text"));
    }
    sched.validate().map_err(|err| bad(&err.to_string()))?;
    Ok(sched)
}

fn parse_q(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim().parse::<i128>().ok()?, d.trim().parse::<i128>().ok()?);
            (d != 0).then(|| q(n, d))
        }
        None => s.parse::<i128>().ok().map(qi),
    }
}

fn fmt_schedule(s: &EpsSchedule) -> String {
    match s {
        EpsSchedule::Constant(x) => format!("constant {x:?}"),
        EpsSchedule::Power { k, p } => format!("power K={k:?} p={p:?}"),
        EpsSchedule::Explicit(v) => format!("explicit {}", v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")),
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

/// Canonical lines for a run config.
pub fn run_lines(cfg: &RunConfig) -> Vec<String> {
    let mut out = vec![format!("strategy = {}", cfg.strategy.name())];
    match &cfg.strategy {
        StrategyConfig::SmallDisplacement { eps_l, schedule, initial_eps } => {
            out.push(format!("eps_L = {eps_l:?}"));
            out.push(format!("eps = {initial_eps:?}"));
            out.push(format!("schedule = {}", fmt_schedule(schedule)));
        }
        StrategyConfig::Bing1952 { plane_count, goals } => {
            out.push(format!("plane_count = {plane_count}"));
            out.push(format!("goals = {}", goals.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")));
        }
        StrategyConfig::Bing1988 { patient_delta } => out.push(format!("patient_delta = {patient_delta:?}")),
        StrategyConfig::Random { seed } => out.push(format!("clasp_seed = {seed}")),
    }
    match cfg.mode {
        ExpansionMode::Extremal => out.push("mode = extremal".into()),
        ExpansionMode::Full => out.push("mode = full".into()),
        ExpansionMode::SampledPaths { count } => {
            out.push("mode = sampled".into());
            out.push(format!("paths = {count}"));
        }
    }
    out.push(format!("depth = {}", cfg.max_depth));
    out.push(format!("targets = {}", list(&cfg.diameter_targets)));
    out.push(format!("seed = {}", cfg.seed));
    if let Some(p) = cfg.stop_after_phases {
        out.push(format!("stop_after_phases = {p}"));
    }
    out.push(format!("stop_at_targets = {}", cfg.stop_at_targets));
    out.push(format!("record_depth = {}", cfg.record_depth));
    out.push(format!("profile_depth = {}", cfg.profile_depth));
    out.push(format!("max_nodes = {}", cfg.max_nodes));
    out
}

fn resolve(s: &Settings) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(run) = &s.run {
        out.extend(run_lines(run));
    }
    out.push(format!("numbers = {}", if s.numbers == NumberFormat::Exact { "exact" } else { "decimal" }));
    out.push("[verify]".into());
    out.push(format!("lemma_depth = {}", s.lemma_depth));
    out.push("[scale]".into());
    out.push(format!("eps_values = {}", list(&s.scale.eps_values)));
    out.push(format!("target = {:?}", s.scale.target));
    out.push(format!("eps_L = {:?}", s.scale.eps_l));
    out.push(format!("extrapolate_to = {:?}", s.scale.extrapolate_to));
    let family = match s.scale.family {
        ScaleFamily::Fixed => "fixed",
        ScaleFamily::Budget => "budget",
        ScaleFamily::Both => "both",
    };
    out.push(format!("family = {family}"));
    out.push(format!("depth = {}", s.scale.max_depth));
    out.push("[montecarlo]".into());
    out.push(format!("trials = {}", s.montecarlo.trials));
    out.push(format!("depth = {}", s.montecarlo.depth));
    out.push(format!("seed = {}", s.montecarlo.seed));
    for (label, cfg) in &s.compare {
        out.push(format!("[compare.{label}]"));
        out.extend(run_lines(cfg));
    }
    out.push("[render]".into());
    match s.render {
        RenderWhat::Functions(d) => {
            out.push("what = functions".into());
            out.push(format!("depth = {d}"));
        }
        RenderWhat::PlaneTree => out.push("what = plane_tree".into()),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config("strategy = bing1952\ndepth = 10\n").unwrap();
        assert_eq!(cfg.mode, ExpansionMode::Extremal);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.max_depth, 10);
    }

    #[test]
    fn negative_budget_names_field() {
        let err = parse_config("strategy = small_displacement\neps = 0.05\neps_L = -1\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Range { line: 3, field, .. } if field == "eps_L"), "{err}");
        assert!(err.to_string().contains("eps_L"));
    }

    #[test]
    fn power_schedule_accepted() {
        let cfg = parse_config("strategy = small_displacement\neps_L = 0.1\neps = 0.1\nschedule = power K=0.1 p=0.5\n").unwrap();
        match cfg.strategy {
            StrategyConfig::SmallDisplacement { schedule, .. } => assert_eq!(schedule, EpsSchedule::Power { k: 0.1, p: 0.5 }),
            _ => panic!("wrong strategy"),
        }
    }

    #[test]
    fn divergent_schedule_rejected() {
        let err = parse_config("strategy = small_displacement\neps_L = 0.1\neps = 0.1\nschedule = power K=0.1 p=0.7\n").unwrap_err();
        assert!(matches!(err, ConfigError::Range { line: 4, .. }), "{err}");
    }

    #[test]
    fn unknown_key_and_missing_strategy() {
        let err = parse_config("strategy = bing1952\ncolour = blue\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { line: 2, section: "run".into(), key: "colour".into() });
        assert_eq!(parse_config("depth = 3\n").unwrap_err(), ConfigError::Missing("strategy".into()));
    }

    #[test]
    fn sections_and_overrides() {
        let text = "strategy = random\n[compare.a]\nstrategy = bing1952\n[compare.b]\nstrategy = bing1988\n[scale]\ntarget = 0.25\n";
        let s = parse_settings(text, &["seed=5".into(), "scale.target=0.4".into()]).unwrap();
        assert_eq!(s.run.as_ref().unwrap().seed, 5);
        assert_eq!(s.scale.target, 0.4);
        let labels: Vec<&str> = s.compare.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, vec!["a", "b"]);
        assert_eq!(s.compare[0].1.seed, 5, "compare rows inherit shared keys");
    }

    #[test]
    fn bad_override_reports_its_position() {
        let err = parse_settings("strategy = random\n", &["nonsense".into()]).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }), "{err}");
    }
}
