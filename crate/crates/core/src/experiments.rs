//! Measurement harness: shrink runs in three expansion modes, stage-count
//! scaling fits, random-clasp Monte Carlo and side-by-side comparisons.
//!
//! Runs are pure functions of their configuration. Parallel work is split
//! into fixed chunks whose partial results merge with order-independent
//! operations (exact sums, max/min, smallest offending node), so the worker
//! count never shows up in a report.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bingtree::{classify_with, BingTree, DepthProfile, ExpansionMode, NodeId, RetraceBounds};
use crate::error::{Error, Result};
use crate::exact::{qi, to_f64};
use crate::geometry::{EpsSchedule, PlanePoint};
use crate::plfun::{ClaspChoice, FoldedPath, Interval, Side};
use crate::seed::{mix, NodeKey, Stream};
use crate::strategies::{self, random_clasp, NodeState, StepEvent, StrategyConfig};

pub const DEFAULT_MAX_NODES: u64 = 1 << 22;
/// Sampled paths are processed in chunks of this many.
const CHUNK: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub strategy: StrategyConfig,
    pub mode: ExpansionMode,
    pub max_depth: u64,
    /// Strictly decreasing diameters in `(0, 1]`.
    pub diameter_targets: Vec<f64>,
    pub seed: u64,
    /// Small displacement only: a branch ends once this many phases are done.
    pub stop_after_phases: Option<u32>,
    /// A branch ends once its diameter is below every target.
    pub stop_at_targets: bool,
    /// Nodes up to this depth are kept as report rows.
    pub record_depth: u64,
    /// Per-depth statistics are kept up to this depth.
    pub profile_depth: u64,
    /// Cap on retained nodes (full mode) and report rows (all modes).
    pub max_nodes: u64,
}

impl RunConfig {
    pub fn new(strategy: StrategyConfig) -> Self {
        RunConfig {
            strategy,
            mode: ExpansionMode::Extremal,
            max_depth: 64,
            diameter_targets: Vec::new(),
            seed: 0,
            stop_after_phases: None,
            stop_at_targets: false,
            record_depth: 32,
            profile_depth: 1 << 16,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.strategy.validate()?;
        if self.max_depth < 1 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        let t = &self.diameter_targets;
        if t.iter().any(|x| !(*x > 0.0 && *x <= 1.0)) {
            return Err(Error::Config("diameter targets must lie in (0, 1]".into()));
        }
        if t.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("diameter targets must be strictly decreasing".into()));
        }
        if let ExpansionMode::SampledPaths { count: 0 } = self.mode {
            return Err(Error::Config("sampled path count must be at least 1".into()));
        }
        if self.max_nodes == 0 {
            return Err(Error::Config("max_nodes must be positive".into()));
        }
        if self.stop_after_phases.is_some() && !matches!(self.strategy, StrategyConfig::SmallDisplacement { .. }) {
            return Err(Error::Config("stop_after_phases applies to the small displacement strategy only".into()));
        }
        Ok(())
    }

    /// Seed of the clasp randomness; the random strategy carries its own.
    fn tree_seed(&self) -> u64 {
        match self.strategy {
            StrategyConfig::Random { seed } => seed,
            _ => self.seed,
        }
    }
}

/// One materialized node as it appears in reports.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub sigma: NodeId,
    pub domain: Interval,
    pub image: Interval,
    pub clasp: Option<ClaspChoice>,
    pub phase: Option<u32>,
    pub eps_phase: Option<f64>,
    /// Bullseye center and radius when a round starts at this node.
    pub bullseye: Option<(PlanePoint, f64)>,
}

/// Invariant checks collected while expanding. Each violation slot keeps the
/// smallest offending node in breadth-first order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Audit {
    pub nodes: u64,
    pub length_bound: Option<f64>,
    pub max_length: f64,
    pub length_violation: Option<NodeId>,
    pub max_displacement: f64,
    /// Largest displacement divided by `min(ε_i, eps_phase)`.
    pub max_disp_ratio: f64,
    pub displacement_violation: Option<NodeId>,
    pub nesting_violation: Option<NodeId>,
    pub rounds: u64,
    /// Largest new/old retrace length ratio.
    pub max_contraction: f64,
    pub contraction_violation: Option<NodeId>,
    pub phase_ends: u64,
    /// Largest phase-end diameter divided by `2·eps_phase`.
    pub max_phase_end_ratio: f64,
    pub phase_end_violation: Option<NodeId>,
    pub aw_classified: u64,
    pub aw_unclassified: u64,
}

fn flag(slot: &mut Option<NodeId>, id: &NodeId) {
    if slot.as_ref().is_none_or(|s| id < s) {
        *slot = Some(id.clone());
    }
}

fn merge_flag(slot: &mut Option<NodeId>, other: &Option<NodeId>) {
    if let Some(id) = other {
        flag(slot, id);
    }
}

impl Audit {
    pub fn merge(&mut self, o: &Audit) {
        self.nodes += o.nodes;
        self.length_bound = self.length_bound.or(o.length_bound);
        self.max_length = self.max_length.max(o.max_length);
        merge_flag(&mut self.length_violation, &o.length_violation);
        self.max_displacement = self.max_displacement.max(o.max_displacement);
        self.max_disp_ratio = self.max_disp_ratio.max(o.max_disp_ratio);
        merge_flag(&mut self.displacement_violation, &o.displacement_violation);
        merge_flag(&mut self.nesting_violation, &o.nesting_violation);
        self.rounds += o.rounds;
        self.max_contraction = self.max_contraction.max(o.max_contraction);
        merge_flag(&mut self.contraction_violation, &o.contraction_violation);
        self.phase_ends += o.phase_ends;
        self.max_phase_end_ratio = self.max_phase_end_ratio.max(o.max_phase_end_ratio);
        merge_flag(&mut self.phase_end_violation, &o.phase_end_violation);
        self.aw_classified += o.aw_classified;
        self.aw_unclassified += o.aw_unclassified;
    }

    /// Named checks with their first offending node, if any.
    pub fn checks(&self) -> Vec<(&'static str, Option<&NodeId>)> {
        vec![
            ("domain length below 1 + eps_L", self.length_violation.as_ref()),
            ("displacements below min(eps_i, eps_phase)", self.displacement_violation.as_ref()),
            ("image nesting", self.nesting_violation.as_ref()),
            ("retrace contraction below 2/3", self.contraction_violation.as_ref()),
            ("phase-end diameter below 2 eps_phase", self.phase_end_violation.as_ref()),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, v)| v.is_none())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSummary {
    pub index: u64,
    pub final_depth: u64,
    pub final_diameter: f64,
    pub phases_completed: Option<u32>,
    /// First depth below each target along this path.
    pub target_depths: Vec<Option<u64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub config: RunConfig,
    pub profile: DepthProfile,
    /// First depth by which every materialized branch is below the target.
    pub stages_to_target: Vec<(f64, Option<u64>)>,
    pub nodes_visited: u64,
    pub nodes_retained: u64,
    pub capped: bool,
    pub max_depth_reached: u64,
    pub rows: Vec<NodeRecord>,
    pub audit: Audit,
    pub paths: Vec<PathSummary>,
}

/// Partial results of one worker.
#[derive(Default)]
struct Acc {
    profile: DepthProfile,
    rows: BTreeMap<NodeId, NodeRecord>,
    audit: Audit,
    visited: u64,
    capped: bool,
    max_depth: u64,
}

impl Acc {
    fn merge(&mut self, other: Acc, max_rows: u64) {
        self.profile.merge(&other.profile);
        for (k, v) in other.rows {
            self.rows.entry(k).or_insert(v);
        }
        self.audit.merge(&other.audit);
        self.visited += other.visited;
        self.capped |= other.capped;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.trim_rows(max_rows);
    }

    fn trim_rows(&mut self, max_rows: u64) {
        while self.rows.len() as u64 > max_rows {
            self.rows.pop_last();
            self.capped = true;
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    schedule: Option<&'a EpsSchedule>,
    length_bound: Option<f64>,
    min_target: Option<f64>,
    root_state: NodeState,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        cfg.validate()?;
        let (schedule, length_bound) = match &cfg.strategy {
            StrategyConfig::SmallDisplacement { schedule, eps_l, .. } => (Some(schedule), Some(1.0 + eps_l)),
            _ => (None, None),
        };
        let root_state = strategies::init_state(&cfg.strategy, &FoldedPath::identity())?;
        Ok(Ctx {
            cfg,
            schedule,
            length_bound,
            min_target: cfg.diameter_targets.last().copied(),
            root_state,
        })
    }

    fn should_stop(&self, depth: u64, path: &FoldedPath, state: &NodeState) -> bool {
        if depth >= self.cfg.max_depth {
            return true;
        }
        if let (Some(k), Some(ps)) = (self.cfg.stop_after_phases, state.phase()) {
            if ps.phase >= k {
                return true;
            }
        }
        if self.cfg.stop_at_targets {
            if let Some(t) = self.min_target {
                return to_f64(&path.diameter()) < t;
            }
        }
        false
    }

    /// Per-node checks and bookkeeping; `clasp` is set when the node is expanded.
    fn visit(
        &self,
        acc: &mut Acc,
        id: &NodeId,
        path: &FoldedPath,
        state: &NodeState,
        clasp: Option<&ClaspChoice>,
    ) {
        let depth = id.depth() as u64;
        acc.visited += 1;
        acc.max_depth = acc.max_depth.max(depth);
        acc.audit.nodes += 1;
        let len = to_f64(&path.domain().length());
        acc.audit.max_length = acc.audit.max_length.max(len);
        if let Some(bound) = self.length_bound {
            acc.audit.length_bound = Some(bound);
            if !(len < bound) {
                flag(&mut acc.audit.length_violation, id);
            }
        }
        if let Some(c) = clasp {
            let (lo, hi) = c.displacements(path.domain());
            let disp = to_f64(&lo.max(hi));
            acc.audit.max_displacement = acc.audit.max_displacement.max(disp);
            if let (Some(ps), Some(sched)) = (state.phase(), self.schedule) {
                let cap = ps.eps_phase.min(sched.term(depth));
                acc.audit.max_disp_ratio = acc.audit.max_disp_ratio.max(disp / cap);
                if !(disp < cap) {
                    flag(&mut acc.audit.displacement_violation, id);
                }
            }
        }
        if depth <= self.cfg.profile_depth {
            acc.profile.observe(depth as usize, path, clasp);
        }
        if depth <= self.cfg.record_depth {
            let ps = state.phase();
            acc.rows.insert(
                id.clone(),
                NodeRecord {
                    sigma: id.clone(),
                    domain: path.domain().clone(),
                    image: path.image().clone(),
                    clasp: clasp.cloned(),
                    phase: ps.map(|p| p.phase),
                    eps_phase: ps.map(|p| p.eps_phase),
                    bullseye: ps
                        .filter(|p| p.bullseye.steps == 0)
                        .map(|p| (p.bullseye.center, p.bullseye.base_radius)),
                },
            );
        }
    }

    /// Checks tied to a freshly created child.
    fn child_checks(&self, acc: &mut Acc, id: &NodeId, mother: &Interval, child: &FoldedPath, event: &StepEvent) {
        if !mother.contains_interval(child.image()) {
            flag(&mut acc.audit.nesting_violation, id);
        }
        if let StepEvent::Round { change, phase_done, eps_phase, .. } = event {
            acc.audit.rounds += 1;
            let ratio = to_f64(&change.new_len) / to_f64(&change.old_len);
            acc.audit.max_contraction = acc.audit.max_contraction.max(ratio);
            if !(change.new_len * qi(3) < change.old_len * qi(2)) {
                flag(&mut acc.audit.contraction_violation, id);
            }
            if *phase_done {
                acc.audit.phase_ends += 1;
                let r = to_f64(&child.diameter()) / (2.0 * eps_phase);
                acc.audit.max_phase_end_ratio = acc.audit.max_phase_end_ratio.max(r);
                if !(r < 1.0) {
                    flag(&mut acc.audit.phase_end_violation, id);
                }
            }
            let bounds = RetraceBounds { big_m: change.big_m, small_m: change.small_m };
            if classify_with(child.domain(), &bounds, change.eps_bound).is_some() {
                acc.audit.aw_classified += 1;
            } else {
                acc.audit.aw_unclassified += 1;
            }
        }
    }
}

fn strategy_error(id: &NodeId, e: Error) -> Error {
    Error::Strategy(format!("at node {}: {e}", id.label()))
}

#[derive(Clone, Copy)]
enum Chooser {
    Sampled(NodeKey),
    Extremal,
}

/// Walks one root-to-leaf branch, keeping only the current node.
fn walk(ctx: &Ctx, index: u64, mut chooser: Chooser, acc: &mut Acc) -> Result<PathSummary> {
    let cfg = ctx.cfg;
    let mut path = FoldedPath::identity();
    let mut state = ctx.root_state.clone();
    let mut key = NodeKey::root(cfg.tree_seed());
    let mut id = NodeId::root();
    let mut depth = 0u64;
    let mut target_depths = vec![None; cfg.diameter_targets.len()];
    loop {
        let diam = to_f64(&path.diameter());
        for (slot, t) in target_depths.iter_mut().zip(&cfg.diameter_targets) {
            if slot.is_none() && diam < *t {
                *slot = Some(depth);
            }
        }
        if ctx.should_stop(depth, &path, &state) {
            ctx.visit(acc, &id, &path, &state, None);
            break;
        }
        let exp = strategies::expand(&cfg.strategy, &path, &state, depth, key).map_err(|e| strategy_error(&id, e))?;
        ctx.visit(acc, &id, &path, &state, Some(&exp.clasp));
        let bit = match &mut chooser {
            Chooser::Sampled(k) => {
                let b = (k.draw(Stream::Branch) & 1) as u8;
                *k = k.child(b);
                b
            }
            Chooser::Extremal => (exp.children[1].score > exp.children[0].score) as u8,
        };
        let side = Side::from_bit(bit == 1);
        let mother_image = path.image().clone();
        path.fold_in_place(&exp.clasp, side)?;
        id.push(side);
        let [c0, c1] = exp.children;
        let child = if bit == 1 { c1 } else { c0 };
        ctx.child_checks(acc, &id, &mother_image, &path, &child.event);
        state = child.state;
        key = key.child(bit);
        depth += 1;
    }
    Ok(PathSummary {
        index,
        final_depth: depth,
        final_diameter: to_f64(&path.diameter()),
        phases_completed: state.phase().map(|p| p.phase),
        target_depths,
    })
}

fn run_full(ctx: &Ctx, acc: &mut Acc) -> Result<BingTree> {
    let cfg = ctx.cfg;
    let mut tree = BingTree::new(ExpansionMode::Full);
    let mut frontier = vec![(NodeId::root(), ctx.root_state.clone(), NodeKey::root(cfg.tree_seed()))];
    let mut depth = 0u64;
    while !frontier.is_empty() {
        let (stop, go): (Vec<_>, Vec<_>) = frontier.into_iter().partition(|(id, st, _)| {
            ctx.should_stop(depth, &tree.get(id).expect("frontier node").path, st)
        });
        for (id, st, _) in &stop {
            ctx.visit(acc, id, &tree.get(id)?.path, st, None);
        }
        if go.is_empty() {
            break;
        }
        if tree.len() as u64 + 2 * go.len() as u64 > cfg.max_nodes {
            acc.capped = true;
            for (id, st, _) in &go {
                ctx.visit(acc, id, &tree.get(id)?.path, st, None);
            }
            break;
        }
        let expansions: Vec<Result<strategies::Expansion>> = go
            .par_iter()
            .map(|(id, st, key)| {
                strategies::expand(&cfg.strategy, &tree.get(id)?.path, st, depth, *key)
                    .map_err(|e| strategy_error(id, e))
            })
            .collect();
        let mut next = Vec::with_capacity(2 * go.len());
        for ((id, st, key), exp) in go.into_iter().zip(expansions) {
            let exp = exp?;
            let mother = tree.get(&id)?.path.clone();
            ctx.visit(acc, &id, &mother, &st, Some(&exp.clasp));
            let (i0, i1) = tree.expand(&id, exp.clasp.clone())?;
            let [c0, c1] = exp.children;
            for (cid, child, bit) in [(i0, c0, 0u8), (i1, c1, 1u8)] {
                ctx.child_checks(acc, &cid, mother.image(), &tree.get(&cid)?.path, &child.event);
                next.push((cid, child.state, key.child(bit)));
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(tree)
}

pub fn run_shrink(cfg: &RunConfig) -> Result<ExperimentReport> {
    Ok(run_inner(cfg)?.0)
}

/// Full-mode run that also hands back the materialized tree.
pub fn run_full_tree(cfg: &RunConfig) -> Result<(ExperimentReport, BingTree)> {
    if cfg.mode != ExpansionMode::Full {
        return Err(Error::Config("a materialized tree needs full mode".into()));
    }
    let (report, tree) = run_inner(cfg)?;
    Ok((report, tree.expect("full mode builds a tree")))
}

fn run_inner(cfg: &RunConfig) -> Result<(ExperimentReport, Option<BingTree>)> {
    let ctx = Ctx::new(cfg)?;
    let mut acc = Acc::default();
    let mut paths = Vec::new();
    let mut tree = None;
    match cfg.mode {
        ExpansionMode::Full => tree = Some(run_full(&ctx, &mut acc)?),
        ExpansionMode::Extremal => {
            paths.push(walk(&ctx, 0, Chooser::Extremal, &mut acc)?);
        }
        ExpansionMode::SampledPaths { count } => {
            let indices: Vec<u64> = (0..count as u64).collect();
            for chunk in indices.chunks(CHUNK) {
                let parts: Vec<Result<(Acc, PathSummary)>> = chunk
                    .par_iter()
                    .map(|&i| {
                        let mut a = Acc::default();
                        let chooser = Chooser::Sampled(NodeKey::path_root(cfg.seed, i));
                        let s = walk(&ctx, i, chooser, &mut a)?;
                        Ok((a, s))
                    })
                    .collect();
                for part in parts {
                    let (a, s) = part?;
                    acc.merge(a, cfg.max_nodes);
                    paths.push(s);
                }
            }
        }
    }
    acc.trim_rows(cfg.max_nodes);
    let stages_to_target = stages(cfg, &acc.profile, &paths);
    let nodes_retained = match cfg.mode {
        ExpansionMode::Full => acc.visited,
        _ => acc.rows.len() as u64,
    };
    let report = ExperimentReport {
        config: cfg.clone(),
        profile: acc.profile,
        stages_to_target,
        nodes_visited: acc.visited,
        nodes_retained,
        capped: acc.capped,
        max_depth_reached: acc.max_depth,
        rows: acc.rows.into_values().collect(),
        audit: acc.audit,
        paths,
    };
    Ok((report, tree))
}

fn stages(cfg: &RunConfig, profile: &DepthProfile, paths: &[PathSummary]) -> Vec<(f64, Option<u64>)> {
    cfg.diameter_targets
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let depth = match cfg.mode {
                ExpansionMode::Full => profile
                    .depths
                    .iter()
                    .position(|r| r.as_ref().is_some_and(|r| to_f64(&r.max_diameter) < t))
                    .map(|d| d as u64),
                _ => paths
                    .iter()
                    .map(|p| p.target_depths[i])
                    .try_fold(0u64, |m, d| d.map(|d| m.max(d))),
            };
            (t, depth)
        })
        .collect()
}

/// Least-squares line through `(ln ε, ln S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerFit {
    /// `S ∝ ε^(-exponent)`.
    pub exponent: f64,
    pub intercept: f64,
    /// `ln S − fitted` per point.
    pub residuals: Vec<f64>,
}

impl PowerFit {
    pub fn predict(&self, eps: f64) -> f64 {
        (self.intercept - self.exponent * eps.ln()).exp()
    }
}

pub fn fit_power(points: &[(f64, f64)]) -> Option<PowerFit> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    Some(PowerFit { exponent: -slope, intercept, residuals })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingPoint {
    pub eps: f64,
    pub eps_l: f64,
    pub target: f64,
    pub stages: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub label: String,
    pub points: Vec<ScalingPoint>,
    pub fit: Option<PowerFit>,
    /// `(ε, predicted stages)` from the fit.
    pub extrapolation: Option<(f64, f64)>,
}

/// Extremal-branch stage count for one small-displacement setting.
pub fn extremal_stages(eps: f64, eps_l: f64, target: f64, max_depth: u64) -> Result<Option<u64>> {
    let mut cfg = RunConfig::new(StrategyConfig::SmallDisplacement {
        eps_l,
        schedule: EpsSchedule::Constant(eps),
        initial_eps: eps,
    });
    cfg.mode = ExpansionMode::Extremal;
    cfg.max_depth = max_depth;
    cfg.diameter_targets = vec![target];
    cfg.stop_at_targets = true;
    cfg.record_depth = 0;
    cfg.profile_depth = 0;
    Ok(run_shrink(&cfg)?.stages_to_target[0].1)
}

fn scaling_series(label: String, settings: Vec<(f64, f64, f64)>, extrapolate_to: f64, max_depth: u64) -> Result<ScalingReport> {
    let points = settings
        .into_par_iter()
        .map(|(eps, eps_l, target)| {
            let stages = extremal_stages(eps, eps_l, target, max_depth)?;
            Ok(ScalingPoint { eps, eps_l, target, stages })
        })
        .collect::<Result<Vec<_>>>()?;
    let data: Vec<(f64, f64)> = points.iter().filter_map(|p| p.stages.map(|s| (p.eps, s as f64))).collect();
    let fit = if data.len() == points.len() { fit_power(&data) } else { None };
    let extrapolation = fit.as_ref().map(|f| (extrapolate_to, f.predict(extrapolate_to)));
    Ok(ScalingReport { label, points, fit, extrapolation })
}

/// Stage counts `S(ε)` at fixed lengthening budget and target diameter.
pub fn scaling_experiment(eps_values: &[f64], target: f64, eps_l: f64, extrapolate_to: f64, max_depth: u64) -> Result<ScalingReport> {
    check_eps_values(eps_values)?;
    let settings = eps_values.iter().map(|&e| (e, eps_l, target)).collect();
    scaling_series(format!("fixed eps_L={eps_l}, target={target}"), settings, extrapolate_to, max_depth)
}

/// Stage counts along the family where lengthening budget, displacement
/// budget and target diameter all equal `ε`. The regime "0.1% budgets,
/// diameter 0.001" is the member `ε = 0.001`.
pub fn budget_scaling(eps_values: &[f64], extrapolate_to: f64, max_depth: u64) -> Result<ScalingReport> {
    check_eps_values(eps_values)?;
    let settings = eps_values.iter().map(|&e| (e, e, e)).collect();
    scaling_series("eps_L = eps = target".to_string(), settings, extrapolate_to, max_depth)
}

fn check_eps_values(eps_values: &[f64]) -> Result<()> {
    if eps_values.is_empty() || eps_values.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Config("eps values must be positive".into()));
    }
    if eps_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("eps values must be strictly decreasing".into()));
    }
    Ok(())
}

pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Clone, Debug, PartialEq)]
pub struct McDepthRow {
    pub depth: u64,
    pub quantiles: [f64; 5],
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McReport {
    pub trials: u64,
    pub depth: u64,
    pub seed: u64,
    pub rows: Vec<McDepthRow>,
    /// Trials whose diameter ever increased along the path (expected 0).
    pub monotone_violations: u64,
}

/// Linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Seed of the independent random tree used by one Monte Carlo trial.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    mix(mix(seed ^ 0x6A09_E667_F3BC_C908).wrapping_add(trial))
}

fn random_trial(seed: u64, trial: u64, depth: u64) -> Result<Vec<f64>> {
    let mut path = FoldedPath::identity();
    let mut key = NodeKey::root(trial_seed(seed, trial));
    let mut branch = NodeKey::path_root(seed, trial);
    let mut out = Vec::with_capacity(depth as usize + 1);
    for _ in 0..depth {
        out.push(to_f64(&path.diameter()));
        let clasp = random_clasp(path.domain(), key);
        let bit = (branch.draw(Stream::Branch) & 1) as u8;
        path.fold_in_place(&clasp, Side::from_bit(bit == 1))?;
        key = key.child(bit);
        branch = branch.child(bit);
    }
    out.push(to_f64(&path.diameter()));
    Ok(out)
}

/// Diameter distribution along independently seeded random-clasp paths.
pub fn monte_carlo_random(trials: u64, depth: u64, seed: u64) -> Result<McReport> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(trials as usize); depth as usize + 1];
    let mut monotone_violations = 0;
    let indices: Vec<u64> = (0..trials).collect();
    for chunk in indices.chunks(256) {
        let traces = chunk.par_iter().map(|&t| random_trial(seed, t, depth)).collect::<Result<Vec<_>>>()?;
        for trace in traces {
            if trace.windows(2).any(|w| w[1] > w[0]) {
                monotone_violations += 1;
            }
            for (col, v) in columns.iter_mut().zip(trace) {
                col.push(v);
            }
        }
    }
    let rows = columns
        .into_iter()
        .enumerate()
        .map(|(d, mut col)| {
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            col.sort_by(f64::total_cmp);
            let quantiles = QUANTILE_LEVELS.map(|p| quantile(&col, p));
            McDepthRow { depth: d as u64, quantiles, mean }
        })
        .collect();
    Ok(McReport { trials, depth, seed, rows, monotone_violations })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub strategy: String,
    pub stages_to_target: Vec<(f64, Option<u64>)>,
    pub max_displacement: f64,
    pub max_length: f64,
    /// Displacement budget and whether it held, for small displacement runs.
    pub displacement_bound: Option<(f64, bool)>,
}

pub fn compare_strategies(cfgs: &[RunConfig]) -> Result<Vec<ComparisonRow>> {
    if cfgs.len() < 2 {
        return Err(Error::Config("comparison needs at least two configurations".into()));
    }
    cfgs.iter()
        .map(|cfg| {
            let rep = run_shrink(cfg)?;
            let displacement_bound = match &cfg.strategy {
                StrategyConfig::SmallDisplacement { initial_eps, .. } => {
                    Some((*initial_eps, rep.audit.displacement_violation.is_none() && rep.audit.max_displacement < *initial_eps))
                }
                _ => None,
            };
            Ok(ComparisonRow {
                strategy: cfg.strategy.name().to_string(),
                stages_to_target: rep.stages_to_target,
                max_displacement: rep.audit.max_displacement,
                max_length: rep.audit.max_length,
                displacement_bound,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn bing52(depth: u64) -> RunConfig {
        let mut cfg = RunConfig::new(StrategyConfig::Bing1952 { plane_count: 10, goals: StrategyConfig::default_goals() });
        cfg.mode = ExpansionMode::Full;
        cfg.max_depth = depth;
        cfg.diameter_targets = vec![0.2];
        cfg
    }

    #[test]
    fn bing1952_full_depth_ten() {
        let rep = run_shrink(&bing52(10)).unwrap();
        assert_eq!(rep.stages_to_target, vec![(0.2, Some(10))]);
        for k in 0..=8usize {
            let r = rep.profile.get(k).unwrap();
            assert_eq!(r.count, 1 << k);
            assert_eq!(r.max_diameter, qi(1) - q(k as i128, 10));
            assert_eq!(r.min_diameter, r.max_diameter);
        }
        assert!(to_f64(&rep.profile.get(10).unwrap().max_diameter) < 0.2);
        assert!(rep.audit.passed());
    }

    #[test]
    fn root_only_report() {
        let mut cfg = bing52(1);
        cfg.max_depth = 1;
        let rep = run_shrink(&cfg).unwrap();
        assert_eq!(rep.profile.get(0).unwrap().max_diameter, qi(1));
        assert_eq!(rep.rows.len(), 3);
    }

    #[test]
    fn power_fit_recovers_exponent() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&e: &f64| (e, 7.0 * e.powf(-2.5))).collect();
        let fit = fit_power(&pts).unwrap();
        assert!((fit.exponent - 2.5).abs() < 1e-9);
        assert!((fit.predict(0.01) - 7.0 * 0.01f64.powf(-2.5)).abs() / fit.predict(0.01) < 1e-9);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.0);
        assert_eq!(quantile(&v, 0.25), 1.0);
        assert!((quantile(&v, 0.05) - 0.2).abs() < 1e-12);
    }
}
