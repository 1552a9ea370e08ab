//! State-class-graph construction for all three engines.
//!
//! Exploration is breadth-first and deterministic: nodes are numbered in
//! discovery order, successors are tried in transition order, and a new
//! class is merged into an existing node exactly when the active
//! equivalence relates them. Bounds on class count and depth make the
//! builder total even on nets whose graphs diverge.

use std::collections::HashMap;
use std::time::Instant;

use crate::dbm::{self, DbmClass};
use crate::net::{Marking, Net, TransId};
use crate::poly::{self, ExactClass, PolyError};
use crate::scalar::Scalar;
use crate::tdis::{self, TdisClass};

/// Which class engine drives the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Dbm,
    Tdis,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Dbm => "dbm",
            Method::Tdis => "tdis",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Method::Exact),
            "dbm" => Ok(Method::Dbm),
            "tdis" => Ok(Method::Tdis),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// How a candidate class is matched against the visited set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Equivalence {
    /// Merge only equal classes (preserves the untimed language).
    #[default]
    Equality,
    /// Merge a class into any visited one containing it (preserves
    /// reachable markings).
    Inclusion,
}

impl Equivalence {
    pub fn name(self) -> &'static str {
        match self {
            Equivalence::Equality => "equality",
            Equivalence::Inclusion => "inclusion",
        }
    }
}

impl std::str::FromStr for Equivalence {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "equality" => Ok(Equivalence::Equality),
            "inclusion" => Ok(Equivalence::Inclusion),
            other => Err(format!("unknown equivalence `{other}`")),
        }
    }
}

/// What participates in the identity of a time-distance class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TdisIdentity {
    /// Marking plus the compact DBM (pair entries and current-row bounds);
    /// the equivalence the construction's firing data actually uses.
    #[default]
    Compact,
    /// The full tuple: point maps and all distance tables, up to
    /// order-preserving point relabeling.
    Tuple,
    /// The full tuple including history snapshots.
    TupleWithHistory,
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub method: Method,
    pub equivalence: Equivalence,
    pub max_classes: usize,
    pub max_depth: usize,
    pub tdis_identity: TdisIdentity,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            method: Method::Tdis,
            equivalence: Equivalence::Equality,
            max_classes: 100_000,
            max_depth: usize::MAX,
            tdis_identity: TdisIdentity::Compact,
        }
    }
}

impl BuildOptions {
    pub fn method(method: Method) -> Self {
        BuildOptions { method, ..Default::default() }
    }
}

/// Method-specific node payload.
#[derive(Debug, Clone)]
pub enum ClassNode<S> {
    Exact(ExactClass<S>),
    Dbm(DbmClass<S>),
    Tdis(TdisClass<S>),
}

impl<S: Scalar> ClassNode<S> {
    pub fn marking(&self) -> &Marking {
        match self {
            ClassNode::Exact(c) => &c.marking,
            ClassNode::Dbm(c) => &c.marking,
            ClassNode::Tdis(c) => &c.marking,
        }
    }

    pub fn as_tdis(&self) -> Option<&TdisClass<S>> {
        match self {
            ClassNode::Tdis(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_dbm(&self) -> Option<&DbmClass<S>> {
        match self {
            ClassNode::Dbm(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactClass<S>> {
        match self {
            ClassNode::Exact(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub trans: TransId,
    pub dst: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BuildStats {
    pub classes: usize,
    pub edges: usize,
    pub wall_ms: u128,
    pub truncated: bool,
}

/// A built state-class graph; node 0 is the initial class.
#[derive(Debug, Clone)]
pub struct StateClassGraph<S> {
    pub method: Method,
    pub equivalence: Equivalence,
    pub nodes: Vec<ClassNode<S>>,
    pub edges: Vec<Edge>,
    pub stats: BuildStats,
}

impl<S: Scalar> StateClassGraph<S> {
    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.src == node)
    }

    /// Follows `labels` from the root; edges are deterministic per label.
    pub fn walk(&self, labels: &[TransId]) -> Option<usize> {
        self.walk_from(0, labels)
    }

    pub fn walk_from(&self, start: usize, labels: &[TransId]) -> Option<usize> {
        let mut node = start;
        for &l in labels {
            node = self.outgoing(node).find(|e| e.trans == l)?.dst;
        }
        Some(node)
    }

    pub fn contains_path(&self, labels: &[TransId]) -> bool {
        self.walk(labels).is_some()
    }

    /// Every untimed sequence of length <= depth, lexicographically sorted.
    pub fn sequences(&self, depth: usize) -> Vec<Vec<TransId>> {
        let mut out = std::collections::BTreeSet::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((node, prefix)) = stack.pop() {
            out.insert(prefix.clone());
            if prefix.len() == depth {
                continue;
            }
            for e in self.outgoing(node) {
                let mut next = prefix.clone();
                next.push(e.trans);
                stack.push((e.dst, next));
            }
        }
        out.remove(&Vec::new());
        out.into_iter().collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError<S> {
    #[error("exploration bound reached; partial graph has {} classes", .partial.stats.classes)]
    Bounded { partial: StateClassGraph<S> },
    #[error("{source}")]
    Oracle {
        source: PolyError,
        partial: StateClassGraph<S>,
    },
}

/// Hashable identity of a class under the chosen equivalence.
#[derive(PartialEq, Eq, Hash, Clone)]
enum Key<S> {
    Dbm(Marking, Vec<crate::scalar::Bound<S>>),
    // compact: marking, pair entries, per-transition (upper, lower)
    TdisCompact(
        Marking,
        Vec<crate::scalar::Bound<S>>,
        Vec<(crate::scalar::Bound<S>, crate::scalar::Bound<S>)>,
    ),
    TdisTuple(Box<TdisClass<S>>, bool),
    // exact classes hash by their tightest DBM and confirm by entailment
    ExactBucket(Marking, Vec<crate::scalar::Bound<S>>),
}

fn dbm_key<S: Scalar>(c: &DbmClass<S>) -> Key<S> {
    let dim = c.matrix.dim();
    let mut entries = Vec::with_capacity(dim * dim);
    for x in 0..dim {
        for y in 0..dim {
            entries.push(c.matrix.get_pos(x, y).clone());
        }
    }
    Key::Dbm(c.marking.clone(), entries)
}

fn tdis_key<S: Scalar>(c: &TdisClass<S>, identity: TdisIdentity) -> Key<S> {
    match identity {
        TdisIdentity::Compact => {
            let trans = c.dc.transitions().to_vec();
            let mut pairs = Vec::new();
            for &t in &trans {
                for &u in &trans {
                    pairs.push(c.dc.get(t, u).clone());
                }
            }
            let bounds = trans
                .iter()
                .map(|&t| (c.upper(t).clone(), c.lower(t).clone()))
                .collect();
            Key::TdisCompact(c.marking.clone(), pairs, bounds)
        }
        TdisIdentity::Tuple => {
            let mut k = tdis::canonical(c);
            k.hist = Default::default();
            Key::TdisTuple(Box::new(k), false)
        }
        TdisIdentity::TupleWithHistory => Key::TdisTuple(Box::new(tdis::canonical(c)), true),
    }
}

fn exact_bucket<S: Scalar>(net: &Net<S>, c: &ExactClass<S>) -> Result<Key<S>, PolyError> {
    let _ = net;
    let m = poly::tightest_dbm(&c.system)?;
    let dim = m.dim();
    let mut entries = Vec::with_capacity(dim * dim);
    for x in 0..dim {
        for y in 0..dim {
            entries.push(m.get_pos(x, y).clone());
        }
    }
    Ok(Key::ExactBucket(c.marking.clone(), entries))
}

/// Builds the state-class graph of `net` under `opts`.
///
/// Exceeding `max_classes` or leaving unexplored frontier at `max_depth`
/// yields [`BuildError::Bounded`] carrying the partial graph; oracle
/// budget overruns on the exact method carry theirs too.
pub fn build<S: Scalar>(net: &Net<S>, opts: &BuildOptions) -> Result<StateClassGraph<S>, BuildError<S>> {
    assert!(opts.max_classes > 0 && opts.max_depth > 0, "bounds must be positive");
    let started = Instant::now();
    let mut nodes: Vec<ClassNode<S>> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    // equality lookups; exact keys are buckets confirmed by entailment
    let mut visited: HashMap<Key<S>, Vec<usize>> = HashMap::new();
    // inclusion mode scans nodes with the same marking in discovery order
    let mut by_marking: HashMap<Marking, Vec<usize>> = HashMap::new();
    let mut depth_of: Vec<usize> = Vec::new();
    let mut truncated = false;

    let finish = |nodes: Vec<ClassNode<S>>, edges: Vec<Edge>, truncated: bool| StateClassGraph {
        method: opts.method,
        equivalence: opts.equivalence,
        stats: BuildStats {
            classes: nodes.len(),
            edges: edges.len(),
            wall_ms: started.elapsed().as_millis(),
            truncated,
        },
        nodes,
        edges,
    };

    macro_rules! try_oracle {
        ($expr:expr, $nodes:ident, $edges:ident) => {
            match $expr {
                Ok(v) => v,
                Err(source) => {
                    return Err(BuildError::Oracle {
                        source,
                        partial: finish($nodes, $edges, true),
                    })
                }
            }
        };
    }

    let initial: ClassNode<S> = match opts.method {
        Method::Exact => ClassNode::Exact(try_oracle!(poly::initial_exact(net), nodes, edges)),
        Method::Dbm => ClassNode::Dbm(dbm::initial_dbm(net)),
        Method::Tdis => ClassNode::Tdis(tdis::initial_tdis(net)),
    };
    let key = match &initial {
        ClassNode::Exact(c) => try_oracle!(exact_bucket(net, c), nodes, edges),
        ClassNode::Dbm(c) => dbm_key(c),
        ClassNode::Tdis(c) => tdis_key(c, opts.tdis_identity),
    };
    visited.insert(key, vec![0]);
    by_marking.insert(initial.marking().clone(), vec![0]);
    nodes.push(initial);
    depth_of.push(0);

    let mut frontier = 0usize;
    while frontier < nodes.len() {
        let node = frontier;
        frontier += 1;
        if depth_of[node] >= opts.max_depth {
            truncated = true;
            continue;
        }
        for t in net.transitions() {
            let successor: Option<ClassNode<S>> = match &nodes[node] {
                ClassNode::Exact(c) => {
                    if try_oracle!(poly::firable_exact(net, c, t), nodes, edges) {
                        Some(ClassNode::Exact(try_oracle!(
                            poly::exact_successor(net, c, t),
                            nodes,
                            edges
                        )))
                    } else {
                        None
                    }
                }
                ClassNode::Dbm(c) => dbm::firable_dbm(net, c, t)
                    .then(|| ClassNode::Dbm(dbm::successor_dbm(net, c, t))),
                ClassNode::Tdis(c) => tdis::firable_tdis(net, c, t)
                    .then(|| ClassNode::Tdis(tdis::class_successor(net, c, t))),
            };
            let Some(succ) = successor else { continue };

            let target = match opts.equivalence {
                Equivalence::Equality => {
                    let key = match &succ {
                        ClassNode::Exact(c) => try_oracle!(exact_bucket(net, c), nodes, edges),
                        ClassNode::Dbm(c) => dbm_key(c),
                        ClassNode::Tdis(c) => tdis_key(c, opts.tdis_identity),
                    };
                    let bucket = visited.entry(key).or_default();
                    let mut found = None;
                    if let ClassNode::Exact(c) = &succ {
                        for &cand in bucket.iter() {
                            let other = nodes[cand].as_exact().unwrap();
                            if try_oracle!(poly::exact_equal(c, other), nodes, edges) {
                                found = Some(cand);
                                break;
                            }
                        }
                    } else {
                        found = bucket.first().copied();
                    }
                    found
                }
                Equivalence::Inclusion => {
                    let mut found = None;
                    for &cand in by_marking.get(succ.marking()).map(|v| v.as_slice()).unwrap_or(&[])
                    {
                        let contains = match (&succ, &nodes[cand]) {
                            (ClassNode::Exact(a), ClassNode::Exact(b)) => {
                                try_oracle!(poly::exact_included(a, b), nodes, edges)
                            }
                            (ClassNode::Dbm(a), ClassNode::Dbm(b)) => {
                                a.matrix.dominated_by(&b.matrix)
                            }
                            (ClassNode::Tdis(a), ClassNode::Tdis(b)) => {
                                a.dc.dominated_by(&b.dc)
                                    && a.dc.transitions().iter().all(|&x| {
                                        a.upper(x) <= b.upper(x) && a.lower(x) <= b.lower(x)
                                    })
                            }
                            _ => unreachable!("mixed payloads in one graph"),
                        };
                        if contains {
                            found = Some(cand);
                            break;
                        }
                    }
                    found
                }
            };

            let dst = match target {
                Some(existing) => existing,
                None => {
                    if nodes.len() >= opts.max_classes {
                        let mut g = finish(nodes, edges, true);
                        g.stats.truncated = true;
                        return Err(BuildError::Bounded { partial: g });
                    }
                    let id = nodes.len();
                    match opts.equivalence {
                        Equivalence::Equality => {
                            let key = match &succ {
                                ClassNode::Exact(c) => try_oracle!(exact_bucket(net, c), nodes, edges),
                                ClassNode::Dbm(c) => dbm_key(c),
                                ClassNode::Tdis(c) => tdis_key(c, opts.tdis_identity),
                            };
                            visited.entry(key).or_default().push(id);
                        }
                        Equivalence::Inclusion => {}
                    }
                    by_marking.entry(succ.marking().clone()).or_default().push(id);
                    depth_of.push(depth_of[node] + 1);
                    nodes.push(succ);
                    id
                }
            };
            edges.push(Edge { src: node, trans: t, dst });
        }
    }

    let graph = finish(nodes, edges, truncated);
    if truncated {
        return Err(BuildError::Bounded { partial: graph });
    }
    Ok(graph)
}

/// Sequence-level difference of two graphs over the same net.
#[derive(Debug, Clone, Default)]
pub struct DiffReport {
    pub only_in_first: Vec<Vec<TransId>>,
    pub only_in_second: Vec<Vec<TransId>>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.only_in_first.is_empty() && self.only_in_second.is_empty()
    }
}

/// All untimed sequences of length <= depth present in one graph and
/// absent from the other.
pub fn diff_graphs<S: Scalar>(
    g1: &StateClassGraph<S>,
    g2: &StateClassGraph<S>,
    depth: usize,
) -> DiffReport {
    let s1 = g1.sequences(depth);
    let s2 = g2.sequences(depth);
    let set1: std::collections::BTreeSet<_> = s1.iter().cloned().collect();
    let set2: std::collections::BTreeSet<_> = s2.iter().cloned().collect();
    DiffReport {
        only_in_first: s1.into_iter().filter(|s| !set2.contains(s)).collect(),
        only_in_second: s2.into_iter().filter(|s| !set1.contains(s)).collect(),
    }
}
