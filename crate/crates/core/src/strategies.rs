//! Clasp policies.
//!
//! Each policy turns a node (its path plus per-branch state) into a clasp and
//! the two daughter states. State is immutable per node, so disjoint subtrees
//! expand independently and any traversal order gives the same tree.

use num_traits::{One, Zero};

use crate::bingtree::WiggleSide;
use crate::error::{Error, Result};
use crate::exact::{q, qi, snap, to_f64, Q};
use crate::geometry::{select_center, tangent_step, to_plane, Bullseye, EpsSchedule, PlanePoint};
use crate::plfun::{daughter_domain, ClaspChoice, FoldedPath, Interval, Side};
use crate::seed::{NodeKey, Stream};

/// Fraction of the nominal step actually taken, keeping displacements strict.
pub const STEP_FACTOR: f64 = 0.99;
/// Steps never exceed this fraction of the domain length, so `2h < d − c`.
pub const MAX_STEP_FRACTION: f64 = 0.45;

#[derive(Clone, Debug, PartialEq)]
pub enum StrategyConfig {
    SmallDisplacement { eps_l: f64, schedule: EpsSchedule, initial_eps: f64 },
    Bing1952 { plane_count: u32, goals: Vec<Q> },
    Bing1988 { patient_delta: f64 },
    Random { seed: u64 },
}

impl StrategyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyConfig::SmallDisplacement { .. } => "small_displacement",
            StrategyConfig::Bing1952 { .. } => "bing1952",
            StrategyConfig::Bing1988 { .. } => "bing1988",
            StrategyConfig::Random { .. } => "random",
        }
    }

    /// Default 1952 goals `2/10, 2/100, ...`.
    pub fn default_goals() -> Vec<Q> {
        (1..=6u32).map(|k| q(2, 10i128.pow(k))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        match self {
            StrategyConfig::SmallDisplacement { eps_l, schedule, initial_eps } => {
                if !(*eps_l > 0.0 && eps_l.is_finite()) {
                    return bad("eps_L must be positive");
                }
                if !(*initial_eps > 0.0 && initial_eps.is_finite()) {
                    return bad("initial_eps must be positive");
                }
                schedule.validate()
            }
            StrategyConfig::Bing1952 { plane_count, goals } => {
                if *plane_count < 3 {
                    return bad("plane_count must be at least 3");
                }
                if goals.iter().any(|g| *g <= Q::zero() || *g > Q::one()) {
                    return bad("goals must lie in (0, 1]");
                }
                if goals.windows(2).any(|w| w[1] >= w[0]) {
                    return bad("goals must be strictly decreasing");
                }
                Ok(())
            }
            StrategyConfig::Bing1988 { patient_delta } => {
                if !(*patient_delta > 0.0 && patient_delta.is_finite()) {
                    return bad("patient_delta must be positive");
                }
                Ok(())
            }
            StrategyConfig::Random { .. } => Ok(()),
        }
    }
}

/// Bookkeeping of the circle construction carried by every node.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseState {
    /// Zero-based phase; the wiggle width is `initial_eps / 2^phase`.
    pub phase: u32,
    pub eps_phase: f64,
    pub side: WiggleSide,
    /// `t` for high wiggles (retrace `[c, t]`), `s` for low (retrace `[s, d]`).
    pub boundary: Q,
    pub round_start: Interval,
    pub retrace_len: Q,
    /// Middle-third point of the current retrace, exact.
    pub quad: (Q, Q),
    pub big_m: Q,
    pub small_m: Q,
    pub disp_lo: Q,
    pub disp_hi: Q,
    pub bullseye: Bullseye,
    pub round: u64,
}

impl PhaseState {
    pub fn retrace(&self) -> Interval {
        match self.side {
            WiggleSide::High => Interval { lo: self.round_start.lo, hi: self.boundary },
            WiggleSide::Low => Interval { lo: self.boundary, hi: self.round_start.hi },
        }
    }

    pub fn quad_point(&self) -> PlanePoint {
        PlanePoint::new(to_f64(&self.quad.0), to_f64(&self.quad.1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeState {
    Small(Box<PhaseState>),
    /// Current goal index and mark spacing; `None` once all goals are met.
    Bing1952 { goal: Option<usize>, spacing: Q },
    Bing1988,
    Random,
}

impl NodeState {
    pub fn phase(&self) -> Option<&PhaseState> {
        match self {
            NodeState::Small(s) => Some(s),
            _ => None,
        }
    }
}

/// Result of the stop rule for one freshly created child.
#[derive(Clone, Debug, PartialEq)]
pub enum StopCheck {
    Continue,
    NewRound(RoundChange),
    PhaseDone(RoundChange),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundChange {
    pub old_len: Q,
    pub new_len: Q,
    pub side: WiggleSide,
    pub boundary: Q,
    /// Retrace bounds and chain displacement of the finished round.
    pub big_m: Q,
    pub small_m: Q,
    pub eps_bound: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepEvent {
    None,
    Round { change: RoundChange, phase_done: bool, phase: u32, eps_phase: f64 },
    GoalMet { goal: usize },
}

/// Larger is "less progress"; extremal mode follows the larger child.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Score(pub i64, pub Q, pub Q);

#[derive(Clone, Debug)]
pub struct ChildInfo {
    pub state: NodeState,
    pub event: StepEvent,
    pub score: Score,
}

#[derive(Clone, Debug)]
pub struct Expansion {
    pub clasp: ClaspChoice,
    pub children: [ChildInfo; 2],
}

/// State of the root node.
pub fn init_state(cfg: &StrategyConfig, root: &FoldedPath) -> Result<NodeState> {
    cfg.validate()?;
    Ok(match cfg {
        StrategyConfig::SmallDisplacement { eps_l, initial_eps, .. } => {
            let dom = root.domain().clone();
            NodeState::Small(Box::new(start_round(
                0,
                *initial_eps,
                *eps_l,
                &dom,
                WiggleSide::High,
                dom.hi,
                0,
            )?))
        }
        StrategyConfig::Bing1952 { plane_count, .. } => {
            NodeState::Bing1952 { goal: Some(0), spacing: q(1, *plane_count as i128) }
        }
        StrategyConfig::Bing1988 { .. } => NodeState::Bing1988,
        StrategyConfig::Random { .. } => NodeState::Random,
    })
}

/// Clasp and daughter states for a node at `depth` with path `path`.
pub fn expand(cfg: &StrategyConfig, path: &FoldedPath, state: &NodeState, depth: u64, key: NodeKey) -> Result<Expansion> {
    match (cfg, state) {
        (StrategyConfig::SmallDisplacement { eps_l, schedule, .. }, NodeState::Small(ps)) => {
            small_disp_children(path, ps, depth, schedule, *eps_l)
        }
        (StrategyConfig::Bing1952 { goals, .. }, NodeState::Bing1952 { goal, spacing }) => {
            bing1952_step(path, *goal, spacing, goals)
        }
        (StrategyConfig::Bing1988 { patient_delta }, NodeState::Bing1988) => {
            let parity = if depth.is_multiple_of(2) { Parity::Greedy } else { Parity::Patient };
            let clasp = bing1988_clasp(path, parity, *patient_delta)?;
            Ok(plain(path, clasp, NodeState::Bing1988))
        }
        (StrategyConfig::Random { seed: _ }, NodeState::Random) => {
            Ok(plain(path, random_clasp(path.domain(), key), NodeState::Random))
        }
        _ => Err(Error::Strategy(format!("state does not belong to strategy {}", cfg.name()))),
    }
}

fn diameter_score(path: &FoldedPath, clasp: &ClaspChoice, side: Side) -> Score {
    // image of a daughter is the mother's image over [c, b] or [a, d]
    let dom = path.domain();
    let iv = match side {
        Side::Zero => Interval { lo: dom.lo, hi: clasp.b },
        Side::One => Interval { lo: clasp.a, hi: dom.hi },
    };
    let len = path.image_on(&iv).map(|i| i.length()).unwrap_or_else(|_| path.diameter());
    Score(0, len, Q::zero())
}

fn plain(path: &FoldedPath, clasp: ClaspChoice, state: NodeState) -> Expansion {
    let child = |side| ChildInfo { state: state.clone(), event: StepEvent::None, score: diameter_score(path, &clasp, side) };
    let children = [child(Side::Zero), child(Side::One)];
    Expansion { clasp, children }
}

fn allowance(eps_l: f64, phase: u32, retrace_len: f64) -> f64 {
    // Σ_j 1/((j+1)(j+2)) = 1 and the retrace lengths of one phase sum to at
    // most 3(1 + ε_L), so total lengthening stays below ε_L / 2.
    let w = 1.0 / ((phase as f64 + 1.0) * (phase as f64 + 2.0));
    eps_l * w * retrace_len / (6.0 * (1.0 + eps_l))
}

fn start_round(
    phase: u32,
    eps_phase: f64,
    eps_l: f64,
    dom: &Interval,
    side: WiggleSide,
    boundary: Q,
    round: u64,
) -> Result<PhaseState> {
    let retrace = match side {
        WiggleSide::High => Interval::new(dom.lo, boundary)?,
        WiggleSide::Low => Interval::new(boundary, dom.hi)?,
    };
    let len = retrace.length();
    let third = len / qi(3);
    let quad = (retrace.lo + third, retrace.lo + third + third);
    let p = to_plane(dom);
    let qp = PlanePoint::new(to_f64(&quad.0), to_f64(&quad.1));
    let bound = (p.length() + allowance(eps_l, phase, to_f64(&len))).min(1.0 + eps_l);
    let center = select_center(&p, &qp, bound, STEP_FACTOR * eps_phase)?;
    Ok(PhaseState {
        phase,
        eps_phase,
        side,
        boundary,
        round_start: dom.clone(),
        retrace_len: len,
        quad,
        big_m: dom.lo,
        small_m: dom.hi,
        disp_lo: Q::zero(),
        disp_hi: Q::zero(),
        bullseye: Bullseye::new(center, &p),
        round,
    })
}

/// Step length at `depth` for a domain of length `len`.
pub fn step_length(state: &PhaseState, schedule: &EpsSchedule, depth: u64, len: f64) -> f64 {
    (STEP_FACTOR * state.eps_phase.min(schedule.term(depth))).min(MAX_STEP_FRACTION * len)
}

/// Stop rule for a child whose state already includes its mother's clasp.
pub fn small_disp_stop_check(state: &PhaseState, child: &Interval) -> StopCheck {
    let (qx, qy) = &state.quad;
    let c_exit = child.lo > *qx;
    let d_exit = child.hi < *qy;
    if !c_exit && !d_exit {
        return StopCheck::Continue;
    }
    let (side, boundary, new_len) = match (state.side, c_exit) {
        (WiggleSide::High, true) => {
            let t = state.small_m.min(state.boundary);
            (WiggleSide::High, t, t - child.lo)
        }
        (WiggleSide::High, false) => (WiggleSide::Low, state.big_m, child.hi - state.big_m),
        (WiggleSide::Low, false) => {
            let s = state.big_m.max(state.boundary);
            (WiggleSide::Low, s, child.hi - s)
        }
        (WiggleSide::Low, true) => (WiggleSide::High, state.small_m, state.small_m - child.lo),
    };
    let change = RoundChange {
        old_len: state.retrace_len,
        new_len,
        side,
        boundary,
        big_m: state.big_m,
        small_m: state.small_m,
        eps_bound: state.disp_lo.max(state.disp_hi),
    };
    if to_f64(&new_len) < state.eps_phase {
        StopCheck::PhaseDone(change)
    } else {
        StopCheck::NewRound(change)
    }
}

/// One tangent step of the circle construction.
pub fn small_disp_children(
    path: &FoldedPath,
    state: &PhaseState,
    depth: u64,
    schedule: &EpsSchedule,
    eps_l: f64,
) -> Result<Expansion> {
    let dom = path.domain();
    let p = to_plane(dom);
    let h = step_length(state, schedule, depth, p.length());
    let (p0, _) = tangent_step(&state.bullseye.center, &p, h).map_err(|e| Error::Strategy(e.to_string()))?;
    let (c, d) = (dom.lo, dom.hi);
    let a = (c + c - snap(p0.x)).max(c).min(d);
    let b = snap(p0.y).max(a).min(d);
    let clasp = ClaspChoice::new(a, b);
    clasp.validate(dom)?;

    let mut shared = state.clone();
    shared.big_m = shared.big_m.max(a);
    shared.small_m = shared.small_m.min(b);
    shared.disp_lo = shared.disp_lo.max(a - c);
    shared.disp_hi = shared.disp_hi.max(d - b);
    shared.bullseye = shared.bullseye.advanced(h);

    let mut children = Vec::with_capacity(2);
    for side in [Side::Zero, Side::One] {
        let cd = daughter_domain(dom, &clasp, side);
        let info = match small_disp_stop_check(&shared, &cd) {
            StopCheck::Continue => {
                let slack = (shared.quad.0 - cd.lo).min(cd.hi - shared.quad.1);
                ChildInfo {
                    score: Score(-(shared.phase as i64), shared.retrace_len, slack),
                    state: NodeState::Small(Box::new(shared.clone())),
                    event: StepEvent::None,
                }
            }
            StopCheck::NewRound(change) => {
                let next = start_round(
                    shared.phase,
                    shared.eps_phase,
                    eps_l,
                    &cd,
                    change.side,
                    change.boundary,
                    shared.round + 1,
                )?;
                ChildInfo {
                    score: Score(-(shared.phase as i64), change.new_len, Q::zero()),
                    state: NodeState::Small(Box::new(next)),
                    event: StepEvent::Round {
                        change,
                        phase_done: false,
                        phase: shared.phase,
                        eps_phase: shared.eps_phase,
                    },
                }
            }
            StopCheck::PhaseDone(change) => {
                let next = start_round(
                    shared.phase + 1,
                    shared.eps_phase / 2.0,
                    eps_l,
                    &cd,
                    WiggleSide::High,
                    cd.hi,
                    shared.round + 1,
                )?;
                ChildInfo {
                    score: Score(-(shared.phase as i64) - 1, next.retrace_len, Q::zero()),
                    state: NodeState::Small(Box::new(next)),
                    event: StepEvent::Round {
                        change,
                        phase_done: true,
                        phase: shared.phase,
                        eps_phase: shared.eps_phase,
                    },
                }
            }
        };
        children.push(info);
    }
    let [c0, c1]: [ChildInfo; 2] = children.try_into().expect("two children");
    Ok(Expansion { clasp, children: [c0, c1] })
}

/// Sup of `x` such that `f` stays on the allowed side of `level` on
/// `[c, x]`; `None` if `f(c)` is already beyond it.
fn reach_from_left(verts: &[(Q, Q)], level: &Q, above: bool) -> Option<Q> {
    let beyond = |y: &Q| if above { y > level } else { y < level };
    let (x0, y0) = &verts[0];
    if beyond(y0) {
        return None;
    }
    let mut prev = (*x0, *y0);
    for (x, y) in &verts[1..] {
        if beyond(y) {
            return Some(prev.0 + (*level - prev.1).abs());
        }
        prev = (*x, *y);
    }
    Some(prev.0)
}

/// Inf of `x` such that `f` stays on the allowed side of `level` on `[x, d]`.
fn reach_from_right(verts: &[(Q, Q)], level: &Q, above: bool) -> Option<Q> {
    let mirrored: Vec<(Q, Q)> = verts.iter().rev().map(|(x, y)| (-*x, *y)).collect();
    reach_from_left(&mirrored, level, above).map(|x| -x)
}

/// Clasp whose daughters lose the top and bottom `trim` bands of the image.
fn band_clasp(path: &FoldedPath, trim: &Q) -> Option<ClaspChoice> {
    let verts = path.vertices();
    let img = path.image();
    let top = img.hi - trim;
    let bottom = img.lo + trim;
    // child 0 drops the top band and child 1 the bottom one, or the reverse
    let options = [
        (reach_from_left(&verts, &top, true), reach_from_right(&verts, &bottom, false)),
        (reach_from_left(&verts, &bottom, false), reach_from_right(&verts, &top, true)),
    ];
    options.into_iter().find_map(|(b, a)| match (a, b) {
        (Some(a), Some(b)) if a <= b => Some(ClaspChoice::new(a, b)),
        _ => None,
    })
}

/// Bing's plane trimming: each daughter meets one fewer mark.
///
/// Fails with a strategy error when the image is already within the goal,
/// which is the caller's cue to move to the next goal.
pub fn bing1952_clasp(path: &FoldedPath, spacing: &Q) -> Result<ClaspChoice> {
    if path.diameter() <= *spacing + *spacing {
        return Err(Error::Strategy(format!(
            "diameter {} already within 2 x spacing {}",
            to_f64(&path.diameter()),
            to_f64(spacing)
        )));
    }
    band_clasp(path, spacing).ok_or_else(|| Error::Strategy("no band-trimming clasp exists".into()))
}

fn bing1952_step(path: &FoldedPath, goal: Option<usize>, spacing: &Q, goals: &[Q]) -> Result<Expansion> {
    let dom = path.domain();
    let identity = ClaspChoice::new(dom.lo, dom.hi);
    let Some(g) = goal else {
        return Ok(plain(path, identity, NodeState::Bing1952 { goal: None, spacing: *spacing }));
    };
    match bing1952_clasp(path, spacing) {
        Ok(clasp) => Ok(plain(path, clasp, NodeState::Bing1952 { goal, spacing: *spacing })),
        Err(_) if path.diameter() <= *spacing + *spacing => {
            // goal met: pause one stage, then re-mark at the next goal
            let next = if g + 1 < goals.len() { Some(g + 1) } else { None };
            let spacing = next.map(|n| goals[n] / qi(2)).unwrap_or(*spacing);
            let mut exp = plain(path, identity, NodeState::Bing1952 { goal: next, spacing });
            for c in &mut exp.children {
                c.event = StepEvent::GoalMet { goal: g };
            }
            Ok(exp)
        }
        // a wiggly path may admit no single fold that trims both bands;
        // the branch halts there, as it does once the goals run out
        Err(_) => Ok(plain(path, identity, NodeState::Bing1952 { goal: None, spacing: *spacing })),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Greedy,
    Patient,
}

/// Interpretive encoding of Bing's 1988 alternation.
pub fn bing1988_clasp(path: &FoldedPath, parity: Parity, patient_delta: f64) -> Result<ClaspChoice> {
    let dom = path.domain();
    let (c, d) = (dom.lo, dom.hi);
    let clasp = match parity {
        Parity::Greedy => {
            let half = path.diameter() / qi(2);
            band_clasp(path, &half).unwrap_or_else(|| {
                // settle for the trim that is available: meet in the middle
                let verts = path.vertices();
                let img = path.image();
                let b = reach_from_left(&verts, &(img.hi - half), true).unwrap_or(c);
                let a = reach_from_right(&verts, &(img.lo + half), false).unwrap_or(d);
                let mid = (a + b) / qi(2);
                ClaspChoice::new(mid, mid)
            })
        }
        Parity::Patient => {
            let verts = path.vertices();
            let img = path.image();
            // both extremes must survive in each daughter
            let first_lo = verts.iter().find(|(_, y)| *y == img.lo).map(|v| v.0).unwrap_or(c);
            let first_hi = verts.iter().find(|(_, y)| *y == img.hi).map(|v| v.0).unwrap_or(c);
            let last_lo = verts.iter().rev().find(|(_, y)| *y == img.lo).map(|v| v.0).unwrap_or(d);
            let last_hi = verts.iter().rev().find(|(_, y)| *y == img.hi).map(|v| v.0).unwrap_or(d);
            let half = dom.length() / qi(2);
            let delta = snap(patient_delta).min(half);
            let alpha = last_lo.min(last_hi) - c;
            let beta = d - first_lo.max(first_hi);
            ClaspChoice::new(c + delta.min(alpha), d - delta.min(beta))
        }
    };
    clasp.validate(dom)?;
    Ok(clasp)
}

/// Order statistics of two uniform draws keyed by the node.
pub fn random_clasp(dom: &Interval, key: NodeKey) -> ClaspChoice {
    let len = to_f64(&dom.length());
    let c = to_f64(&dom.lo);
    let draw = |s| snap(c + key.unit(s) * len).max(dom.lo).min(dom.hi);
    let (u, v) = (draw(Stream::ClaspA), draw(Stream::ClaspB));
    if u <= v {
        ClaspChoice::new(u, v)
    } else {
        ClaspChoice::new(v, u)
    }
}
