//! The binary tree of folded paths, retrace-lemma checks and per-depth statistics.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{to_f64, Q};
use crate::plfun::{ClaspChoice, FoldedPath, Interval, Side};

/// Bit string `σ`; the empty string is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NodeId(Vec<u8>);

impl NodeId {
    pub fn root() -> Self {
        NodeId(Vec::new())
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.bytes()
            .map(|ch| match ch {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::UnknownNode(format!("'{s}' is not a binary string"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(NodeId)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn child(&self, side: Side) -> Self {
        let mut bits = self.0.clone();
        bits.push(side.bit());
        NodeId(bits)
    }

    pub fn push(&mut self, side: Side) {
        self.0.push(side.bit());
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodeId(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn prefix(&self, len: usize) -> Self {
        NodeId(self.0[..len].to_vec())
    }

    /// Ancestor in the inclusive sense: every node is its own ancestor.
    pub fn is_ancestor_of(&self, other: &NodeId) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Human label; `∅` for the root.
    pub fn label(&self) -> String {
        if self.0.is_empty() {
            "∅".to_string()
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

/// Breadth-first order: shorter strings first, then lexicographic.
impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub id: NodeId,
    pub path: FoldedPath,
    pub clasp: Option<ClaspChoice>,
    pub parent: Option<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionMode {
    Full,
    SampledPaths { count: u32 },
    Extremal,
}

#[derive(Clone, Debug)]
pub struct BingTree {
    nodes: BTreeMap<NodeId, TreeNode>,
    pub mode: ExpansionMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetraceBounds {
    pub big_m: Q,
    pub small_m: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    pub bounds: RetraceBounds,
    pub equal_ok: bool,
    pub low_fold_len: Q,
    pub high_fold_len: Q,
    pub max_disp_lo: Q,
    pub max_disp_hi: Q,
    pub bounds_ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WiggleSide {
    Low,
    High,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AwClassification {
    pub side: WiggleSide,
    pub retrace: Interval,
    pub wiggle: Interval,
    pub eps_bound: Q,
}

impl BingTree {
    pub fn new(mode: ExpansionMode) -> Self {
        let root = TreeNode { id: NodeId::root(), path: FoldedPath::identity(), clasp: None, parent: None };
        let mut nodes = BTreeMap::new();
        nodes.insert(NodeId::root(), root);
        BingTree { nodes, mode }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: &NodeId) -> Result<&TreeNode> {
        self.nodes.get(id).ok_or_else(|| Error::UnknownNode(id.label()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.values()
    }

    pub fn expand(&mut self, id: &NodeId, clasp: ClaspChoice) -> Result<(NodeId, NodeId)> {
        let node = self.get(id)?;
        if node.clasp.is_some() {
            return Err(Error::AlreadyExpanded(id.label()));
        }
        let (p0, p1) = node.path.fold_daughters(&clasp)?;
        let ids = (id.child(Side::Zero), id.child(Side::One));
        for (cid, path) in [(ids.0.clone(), p0), (ids.1.clone(), p1)] {
            self.nodes.insert(cid.clone(), TreeNode { id: cid, path, clasp: None, parent: Some(id.clone()) });
        }
        self.nodes.get_mut(id).expect("checked above").clasp = Some(clasp);
        Ok(ids)
    }

    /// Nodes on the chain `tau ..= parent(tau_prime)`, each with its clasp.
    fn chain(&self, tau: &NodeId, tau_prime: &NodeId) -> Result<Vec<(&TreeNode, &ClaspChoice)>> {
        if !tau.is_ancestor_of(tau_prime) {
            return Err(Error::NotAncestor { tau: tau.label(), tau_prime: tau_prime.label() });
        }
        self.get(tau_prime)?;
        (tau.depth()..tau_prime.depth())
            .map(|len| {
                let node = self.get(&tau_prime.prefix(len))?;
                let clasp = node.clasp.as_ref().ok_or_else(|| Error::UnknownNode(node.id.label()))?;
                Ok((node, clasp))
            })
            .collect()
    }

    /// `M = max a_μ`, `m = min b_μ` over the chain; `(c_τ, d_τ)` when `τ = τ'`.
    pub fn retrace_bounds(&self, tau: &NodeId, tau_prime: &NodeId) -> Result<RetraceBounds> {
        let chain = self.chain(tau, tau_prime)?;
        let dom = self.get(tau)?.path.domain().clone();
        let mut b = RetraceBounds { big_m: dom.lo, small_m: dom.hi };
        if chain.is_empty() {
            return Ok(b);
        }
        b.big_m = chain.iter().map(|(_, c)| c.a).max().expect("non-empty");
        b.small_m = chain.iter().map(|(_, c)| c.b).min().expect("non-empty");
        Ok(b)
    }

    fn chain_displacements(&self, tau: &NodeId, tau_prime: &NodeId) -> Result<(Q, Q)> {
        let mut lo = Q::zero();
        let mut hi = Q::zero();
        for (node, clasp) in self.chain(tau, tau_prime)? {
            let (dl, dh) = clasp.displacements(node.path.domain());
            lo = lo.max(dl);
            hi = hi.max(dh);
        }
        Ok((lo, hi))
    }

    pub fn verify_lemma1(&self, tau: &NodeId, tau_prime: &NodeId) -> Result<Lemma1Report> {
        let bounds = self.retrace_bounds(tau, tau_prime)?;
        if bounds.big_m > bounds.small_m {
            return Err(Error::InvertedChain { tau: tau.label(), tau_prime: tau_prime.label() });
        }
        let f = &self.get(tau)?.path;
        let g = &self.get(tau_prime)?.path;
        let agree = Interval { lo: bounds.big_m, hi: bounds.small_m };
        let equal_ok = g.equal_on(f, &agree).unwrap_or(false);
        let dom = g.domain();
        let (max_disp_lo, max_disp_hi) = self.chain_displacements(tau, tau_prime)?;
        let fold_len = |lo: Q, hi: Q| -> Q {
            if lo > hi {
                return Q::zero();
            }
            g.image_on(&Interval { lo, hi }).map(|iv| iv.length()).unwrap_or_else(|_| dom.length())
        };
        let low_fold_len = fold_len(dom.lo, bounds.big_m);
        let high_fold_len = fold_len(bounds.small_m, dom.hi);
        let bounds_ok = equal_ok && low_fold_len <= max_disp_lo && high_fold_len <= max_disp_hi;
        Ok(Lemma1Report { bounds, equal_ok, low_fold_len, high_fold_len, max_disp_lo, max_disp_hi, bounds_ok })
    }

    pub fn classify_aw(&self, tau: &NodeId, tau_prime: &NodeId) -> Result<AwClassification> {
        let bounds = self.retrace_bounds(tau, tau_prime)?;
        let dom = self.get(tau_prime)?.path.domain().clone();
        let (lo, hi) = self.chain_displacements(tau, tau_prime)?;
        classify_with(&dom, &bounds, lo.max(hi)).ok_or_else(|| Error::NotAw(tau_prime.label()))
    }

    pub fn depth_profile(&self) -> DepthProfile {
        let mut profile = DepthProfile::default();
        for node in self.nodes.values() {
            profile.observe(node.id.depth(), &node.path, node.clasp.as_ref());
        }
        profile
    }
}

/// `[A, ε-W]` split of `dom` given the chain bounds, if either end matches.
pub fn classify_with(dom: &Interval, bounds: &RetraceBounds, eps_bound: Q) -> Option<AwClassification> {
    let retrace = Interval { lo: bounds.big_m, hi: bounds.small_m };
    if dom.lo == bounds.big_m {
        Some(AwClassification {
            side: WiggleSide::High,
            wiggle: Interval { lo: bounds.small_m, hi: dom.hi },
            retrace,
            eps_bound,
        })
    } else if dom.hi == bounds.small_m {
        Some(AwClassification {
            side: WiggleSide::Low,
            wiggle: Interval { lo: dom.lo, hi: bounds.big_m },
            retrace,
            eps_bound,
        })
    } else {
        None
    }
}

/// Exact aggregates of the nodes seen at one depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthRecord {
    pub count: u64,
    pub max_diameter: Q,
    pub min_diameter: Q,
    pub sum_diameter: Q,
    pub max_length: Q,
    /// Largest clasp displacement among expanded nodes at this depth.
    pub max_displacement: Option<Q>,
    pub expanded: u64,
    pub sum_displacement: Q,
}

impl DepthRecord {
    fn single(path: &FoldedPath, clasp: Option<&ClaspChoice>) -> Self {
        let d = path.diameter();
        let disp = clasp.map(|c| {
            let (lo, hi) = c.displacements(path.domain());
            lo.max(hi)
        });
        DepthRecord {
            count: 1,
            max_diameter: d,
            min_diameter: d,
            sum_diameter: d,
            max_length: path.domain().length(),
            max_displacement: disp,
            expanded: disp.is_some() as u64,
            sum_displacement: disp.unwrap_or_else(Q::zero),
        }
    }

    pub fn merge(&mut self, other: &DepthRecord) {
        self.count += other.count;
        self.max_diameter = self.max_diameter.max(other.max_diameter);
        self.min_diameter = self.min_diameter.min(other.min_diameter);
        self.sum_diameter += other.sum_diameter;
        self.max_length = self.max_length.max(other.max_length);
        self.max_displacement = match (self.max_displacement, other.max_displacement) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        self.expanded += other.expanded;
        self.sum_displacement += other.sum_displacement;
    }

    pub fn mean_diameter(&self) -> f64 {
        to_f64(&self.sum_diameter) / self.count as f64
    }

    pub fn mean_displacement(&self) -> Option<f64> {
        (self.expanded > 0).then(|| to_f64(&self.sum_displacement) / self.expanded as f64)
    }
}

/// Per-depth records, contiguous from depth 0. Merging is associative and
/// commutative, so parallel workers can combine partial profiles freely.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepthProfile {
    pub depths: Vec<Option<DepthRecord>>,
}

impl DepthProfile {
    pub fn observe(&mut self, depth: usize, path: &FoldedPath, clasp: Option<&ClaspChoice>) {
        self.add(depth, DepthRecord::single(path, clasp));
    }

    fn add(&mut self, depth: usize, rec: DepthRecord) {
        if self.depths.len() <= depth {
            self.depths.resize(depth + 1, None);
        }
        match &mut self.depths[depth] {
            Some(existing) => existing.merge(&rec),
            slot => *slot = Some(rec),
        }
    }

    pub fn merge(&mut self, other: &DepthProfile) {
        for (depth, rec) in other.depths.iter().enumerate() {
            if let Some(rec) = rec {
                self.add(depth, rec.clone());
            }
        }
    }

    pub fn get(&self, depth: usize) -> Option<&DepthRecord> {
        self.depths.get(depth).and_then(|r| r.as_ref())
    }

    pub fn max_depth(&self) -> Option<usize> {
        self.depths.len().checked_sub(1)
    }
}
