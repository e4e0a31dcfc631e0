use bing_core::bingtree::{BingTree, ExpansionMode, NodeId};
use bing_core::exact::{q, qi, to_f64};
use bing_core::experiments::{run_shrink, RunConfig};
use bing_core::geometry::{tangent_step, PlanePoint};
use bing_core::seed::NodeKey;
use bing_core::strategies::{random_clasp, StrategyConfig};
use bing_core::{ClaspChoice, FoldedPath, Interval, Side, Q};
use num_rational::Ratio;
use proptest::prelude::*;

/// Point at fraction `u/256` of `[lo, hi]`.
fn at(lo: Q, hi: Q, u: u8) -> Q {
    lo + (hi - lo) * q(u as i128, 256)
}

fn clasp_in(dom: &Interval, u: u8, v: u8) -> ClaspChoice {
    let (x, y) = (at(dom.lo, dom.hi, u), at(dom.lo, dom.hi, v));
    ClaspChoice::new(x.min(y), x.max(y))
}

fn mother(folds: &[(u8, u8, bool)]) -> FoldedPath {
    let mut f = FoldedPath::identity();
    for &(u, v, side) in folds {
        let clasp = clasp_in(f.domain(), u, v);
        f.fold_in_place(&clasp, Side::from_bit(side)).unwrap();
    }
    f
}

fn folds() -> impl Strategy<Value = Vec<(u8, u8, bool)>> {
    prop::collection::vec(any::<(u8, u8, bool)>(), 0..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn daughter_folds_keep_their_laws(hist in folds(), u: u8, v: u8, probes in prop::collection::vec(any::<u8>(), 4)) {
        let f = mother(&hist);
        let dom = f.domain().clone();
        let clasp = clasp_in(&dom, u, v);
        let (c0, c1) = f.fold_daughters(&clasp).unwrap();
        let (c, d, a, b) = (dom.lo, dom.hi, clasp.a, clasp.b);

        prop_assert_eq!(c0.domain().length() + c1.domain().length(), qi(2) * dom.length());
        prop_assert!(f.image().contains_interval(c0.image()));
        prop_assert!(f.image().contains_interval(c1.image()));
        prop_assert!(c0.equal_on(&f, &Interval::new(c, b).unwrap()).unwrap());
        prop_assert!(c1.equal_on(&f, &Interval::new(a, d).unwrap()).unwrap());
        // a fold keeps the turns strictly inside the kept part and mirrors
        // those strictly inside the folded end, plus one turn at the crease
        let inside = |lo: Q, hi: Q| f.turns().filter(|t| lo < t.x && t.x < hi).count();
        let crease = |folded: bool, lo: Q, hi: Q| if folded { inside(lo, hi) + 1 } else { 0 };
        prop_assert_eq!(c0.turn_count(), inside(c, b) + crease(a > c, c, a));
        prop_assert_eq!(c1.turn_count(), inside(a, d) + crease(b < d, b, d));

        for &p in &probes {
            let x = at(qi(2) * c - a, c, p);
            prop_assert_eq!(c0.evaluate(&x).unwrap(), f.evaluate(&(qi(2) * c - x)).unwrap());
            let x = at(d, qi(2) * d - b, p);
            prop_assert_eq!(c1.evaluate(&x).unwrap(), f.evaluate(&(qi(2) * d - x)).unwrap());
        }

        for g in [&f, &c0, &c1] {
            let vs = g.vertices();
            for w in vs.windows(2) {
                prop_assert_eq!((w[1].1 - w[0].1).abs(), w[1].0 - w[0].0);
            }
            prop_assert!(g.diameter() <= g.domain().length());
            g.check_invariants().unwrap();
        }
    }

    #[test]
    fn lipschitz_on_random_pairs(hist in folds(), s: u8, t: u8) {
        let f = mother(&hist);
        let dom = f.domain();
        let (x, y) = (at(dom.lo, dom.hi, s), at(dom.lo, dom.hi, t));
        let fx = f.evaluate(&x).unwrap();
        let fy = f.evaluate(&y).unwrap();
        prop_assert!((fx - fy).abs() <= (x - y).abs());
    }

    #[test]
    fn rational_arithmetic_matches_reference(n1 in -1i128 << 40..1i128 << 40, e1 in 0u32..40, n2 in -1i128 << 40..1i128 << 40, d2 in 1i128..1 << 20) {
        let d1 = 1i128 << e1;
        let (x, y) = (q(n1, d1), q(n2, d2));
        let (rx, ry) = (Ratio::new(n1, d1), Ratio::new(n2, d2));
        let same = |a: Q, r: Ratio<i128>| *a.numer() == *r.numer() && *a.denom() == *r.denom();
        prop_assert!(same(x + y, rx + ry));
        prop_assert!(same(x - y, rx - ry));
        prop_assert!(same(x * y, rx * ry));
        prop_assert!(same(x + x, rx + rx));
        prop_assert!(same(x - q(n1, d1), Ratio::from_integer(0)));
        prop_assert_eq!(x.cmp(&y), rx.cmp(&ry));
        prop_assert_eq!(x.cmp(&(x + q(1, d1))), std::cmp::Ordering::Less);
        prop_assert_eq!(x == q(n1 * 3, d1 * 3), true);
    }

    #[test]
    fn tangent_steps_are_pythagorean(cx in -10.0f64..0.0, cy in 1.0f64..20.0, px in 0.0f64..1.0, py in 0.0f64..1.0, h in 1e-6f64..0.1) {
        let center = PlanePoint::new(cx, cy);
        let p = PlanePoint::new(px, py);
        let (lo, hi) = tangent_step(&center, &p, h).unwrap();
        let r2 = center.dist2(&p);
        for s in [lo, hi] {
            prop_assert!(((center.dist2(&s) - r2) - h * h).abs() <= 1e-12 * center.dist2(&s));
        }
        prop_assert!(hi.x > p.x && hi.y > p.y);
        prop_assert!(lo.x < p.x && lo.y < p.y);
    }

    #[test]
    fn random_clasps_are_ordered_and_inside(seed: u64, hist in folds()) {
        let f = mother(&hist);
        let clasp = random_clasp(f.domain(), NodeKey::root(seed));
        prop_assert!(clasp.validate(f.domain()).is_ok());
        prop_assert_eq!(&clasp, &random_clasp(f.domain(), NodeKey::root(seed)));
    }
}

#[test]
fn random_clasp_gap_has_mean_one_third() {
    let unit = Interval::unit();
    let mut key = NodeKey::root(99);
    let mut sum = 0.0;
    let n = 100_000;
    for i in 0..n {
        key = key.child((i & 1) as u8);
        let c = random_clasp(&unit, key);
        sum += to_f64(&(c.b - c.a));
    }
    let mean = sum / n as f64;
    assert!((mean - 1.0 / 3.0).abs() < 0.01, "mean gap {mean}");
}

/// Random chain of depth `len` whose clasps below `tau_depth` keep
/// `max a <= min b`, the standing assumption of the retrace lemma.
fn random_chain(rng: &mut u64, len: usize, tau_depth: usize) -> (BingTree, NodeId, NodeId) {
    let mut next = || {
        *rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*rng >> 33) as u32
    };
    let mut tree = BingTree::new(ExpansionMode::Full);
    let mut id = NodeId::root();
    let mut tau = NodeId::root();
    let (mut big_m, mut small_m) = (None::<Q>, None::<Q>);
    for depth in 0..len {
        if depth == tau_depth {
            tau = id.clone();
        }
        let dom = tree.get(&id).unwrap().path.domain().clone();
        let clasp = if depth < tau_depth {
            clasp_in(&dom, next() as u8, next() as u8)
        } else {
            let hi_a = small_m.unwrap_or(dom.hi);
            let a = at(dom.lo, hi_a, next() as u8);
            let lo_b = big_m.map_or(a, |m| m.max(a));
            let b = at(lo_b, dom.hi, next() as u8);
            big_m = Some(big_m.map_or(a, |m| m.max(a)));
            small_m = Some(small_m.map_or(b, |m| m.min(b)));
            ClaspChoice::new(a, b)
        };
        let (c0, c1) = tree.expand(&id, clasp).unwrap();
        id = if next() & 1 == 1 { c1 } else { c0 };
    }
    if tau_depth >= len {
        tau = id.clone();
    }
    (tree, tau, id)
}

#[test]
fn retrace_lemma_on_random_chains() {
    let mut rng = 7u64;
    for trial in 0..2000u64 {
        let len = 1 + (trial % 8) as usize;
        let tau_depth = (trial / 8 % (len as u64 + 1)) as usize;
        let (tree, tau, leaf) = random_chain(&mut rng, len, tau_depth);
        let rep = tree.verify_lemma1(&tau, &leaf).unwrap();
        assert!(rep.bounds_ok, "trial {trial}: {rep:?}");
        let b = tree.retrace_bounds(&tau, &leaf).unwrap();
        // brute force over the recorded clasps
        let chain: Vec<ClaspChoice> = (tau.depth()..leaf.depth())
            .map(|k| tree.get(&leaf.prefix(k)).unwrap().clasp.clone().unwrap())
            .collect();
        if let Some(m) = chain.iter().map(|c| c.a).max() {
            assert_eq!(b.big_m, m);
            assert_eq!(b.small_m, chain.iter().map(|c| c.b).min().unwrap());
        }
    }
}

#[test]
fn images_nest_along_random_full_trees() {
    let mut cfg = RunConfig::new(StrategyConfig::Random { seed: 11 });
    cfg.mode = ExpansionMode::Full;
    cfg.max_depth = 8;
    let rep = run_shrink(&cfg).unwrap();
    assert!(rep.audit.nesting_violation.is_none());
    assert_eq!(rep.nodes_visited, (1 << 9) - 1);
    for row in &rep.rows {
        if let (Some(clasp), Some(_)) = (&row.clasp, row.sigma.parent()) {
            let (lo, hi) = clasp.displacements(&row.domain);
            assert!(lo >= Q::from_integer(0) && hi >= Q::from_integer(0));
        }
    }
}

fn rows_by_sigma(cfg: &RunConfig) -> std::collections::BTreeMap<NodeId, bing_core::experiments::NodeRecord> {
    run_shrink(cfg).unwrap().rows.into_iter().map(|r| (r.sigma.clone(), r)).collect()
}

#[test]
fn partial_modes_agree_with_full_expansion() {
    for strategy in [
        StrategyConfig::Random { seed: 3 },
        StrategyConfig::Bing1952 { plane_count: 10, goals: StrategyConfig::default_goals() },
        StrategyConfig::Bing1988 { patient_delta: 0.01 },
    ] {
        let mut full = RunConfig::new(strategy);
        full.mode = ExpansionMode::Full;
        full.max_depth = 7;
        let all = rows_by_sigma(&full);
        for mode in [ExpansionMode::Extremal, ExpansionMode::SampledPaths { count: 5 }] {
            let mut cfg = full.clone();
            cfg.mode = mode;
            let part = rows_by_sigma(&cfg);
            assert!(!part.is_empty());
            let nodes = run_shrink(&cfg).unwrap().nodes_retained;
            match mode {
                ExpansionMode::Extremal => assert!(nodes <= cfg.max_depth + 1),
                _ => assert!(nodes <= 5 * (cfg.max_depth + 1)),
            }
            for (sigma, row) in part {
                assert_eq!(Some(&row), all.get(&sigma), "{} {sigma}", full.strategy.name());
            }
        }
    }
}

#[test]
fn dominated_strategy_never_reaches_targets_earlier() {
    let targets = vec![0.8, 0.5, 0.3, 0.2];
    let run = |strategy| {
        let mut cfg = RunConfig::new(strategy);
        cfg.mode = ExpansionMode::Full;
        cfg.max_depth = 10;
        cfg.diameter_targets = targets.clone();
        run_shrink(&cfg).unwrap()
    };
    let fast = run(StrategyConfig::Bing1952 { plane_count: 10, goals: StrategyConfig::default_goals() });
    let slow = run(StrategyConfig::Bing1952 { plane_count: 20, goals: StrategyConfig::default_goals() });
    let pointwise = (0..=10).all(|d| fast.profile.get(d).unwrap().max_diameter <= slow.profile.get(d).unwrap().max_diameter);
    assert!(pointwise);
    for ((_, f), (_, s)) in fast.stages_to_target.iter().zip(&slow.stages_to_target) {
        match (f, s) {
            (Some(f), Some(s)) => assert!(f <= s),
            (None, Some(_)) => panic!("dominating strategy missed a target"),
            _ => {}
        }
    }
}
