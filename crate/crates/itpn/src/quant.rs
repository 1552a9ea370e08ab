//! Quantitative timing extraction from time-distance graphs: duration
//! bounds of firing subsequences and best/worst-case response times.
//!
//! When the measurement origin is still recorded in the terminal class the
//! bounds are direct table reads. Otherwise the distance recursion is
//! re-run along the path with the missing point force-retained, computing
//! only the coefficients that involve it; the regular class data is left
//! untouched so the replay reproduces exactly what the graph would have
//! stored had the point survived.

use std::collections::BTreeMap;

use crate::graph::{Method, StateClassGraph};
use crate::net::{Net, TransId};
use crate::scalar::{Bound, Scalar};
use crate::tdis::{self, PointId, TdisClass};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QuantError {
    #[error("graph was not built with the tdis method")]
    WrongMethod,
    #[error("path does not exist in the graph")]
    InvalidPath,
    #[error("origin point {0} is not recorded at the path start")]
    InvalidOrigin(PointId),
    #[error("no path fires `{start}` and later `{end}`")]
    NoPath { start: String, end: String },
}

/// A path through a built graph plus the point to measure from.
#[derive(Debug, Clone)]
pub struct PathQuery {
    /// Node the path starts at (0 is the root).
    pub start: usize,
    pub transitions: Vec<TransId>,
    pub origin: PointId,
}

/// A task as a release/completion transition pair.
#[derive(Debug, Clone, Copy)]
pub struct TaskSpec {
    pub start: TransId,
    pub end: TransId,
}

/// Enumeration caps for response-time analysis.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_paths: usize,
    pub max_len: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_paths: 10_000, max_len: 64 }
    }
}

/// One class along a replayed path together with the forced coefficients
/// of the retained origin point.
#[derive(Debug, Clone)]
pub struct Replay<S> {
    pub class: TdisClass<S>,
    origin: PointId,
    up_t: BTreeMap<TransId, Bound<S>>,
    lo_t: BTreeMap<TransId, Bound<S>>,
    up_n: Bound<S>,
    lo_n: Bound<S>,
    creation: BTreeMap<TransId, (Bound<S>, Bound<S>)>,
    inhibition: BTreeMap<TransId, (Bound<S>, Bound<S>)>,
}

impl<S: Scalar> Replay<S> {
    /// Starts a replay at `class`, retaining `origin` (which must be one of
    /// the class's recorded points or its current point).
    pub fn begin(net: &Net<S>, class: &TdisClass<S>, origin: PointId) -> Result<Self, QuantError> {
        if !class.ds.indices().contains(&origin) {
            return Err(QuantError::InvalidOrigin(origin));
        }
        let enabled = net.enabled_set(&class.marking);
        let mut up_t = BTreeMap::new();
        let mut lo_t = BTreeMap::new();
        let mut creation = BTreeMap::new();
        let mut inhibition = BTreeMap::new();
        for &t in &enabled {
            up_t.insert(t, class.ds.up(origin, t).clone());
            lo_t.insert(t, class.ds.lo(t, origin).clone());
            if let Some(row) = class.hist.creation.get(&origin) {
                creation.insert(t, row[&t].clone());
            } else {
                // origin is the unreferenced current point: its creation
                // row is the current row itself
                creation.insert(
                    t,
                    (class.ds.up(origin, t).clone(), class.ds.lo(t, origin).clone()),
                );
            }
            if let Some(entry) = class.hist.inhibition.get(&t).and_then(|row| row.get(&origin)) {
                inhibition.insert(t, entry.clone());
            }
        }
        Ok(Replay {
            class: class.clone(),
            origin,
            up_t,
            lo_t,
            up_n: class.ds.up_n(origin).clone(),
            lo_n: class.ds.lo_n(origin).clone(),
            creation,
            inhibition,
        })
    }

    /// Duration bounds from the origin to the current instant.
    pub fn bounds(&self) -> (S, Bound<S>) {
        (-self.lo_n.expect_finite().clone(), self.up_n.clone())
    }

    fn snap_up(&self, s: PointId, t: TransId) -> Bound<S> {
        if s == self.origin {
            return self.creation[&t].0.clone();
        }
        if let Some(e) = self.class.hist.inhibition.get(&t).and_then(|r| r.get(&self.origin)) {
            return e.0.clone();
        }
        self.inhibition
            .get(&t)
            .unwrap_or_else(|| panic!("missing forced inhibition snapshot for {t:?}"))
            .0
            .clone()
    }

    fn snap_lo(&self, s: PointId, t: TransId) -> Bound<S> {
        if s == self.origin {
            return self.creation[&t].1.clone();
        }
        if let Some(e) = self.class.hist.inhibition.get(&t).and_then(|r| r.get(&self.origin)) {
            return e.1.clone();
        }
        self.inhibition
            .get(&t)
            .unwrap_or_else(|| panic!("missing forced inhibition snapshot for {t:?}"))
            .1
            .clone()
    }

    /// Fires `t_f`, computing the successor class and the forced origin
    /// coefficients by the same recursion the engine uses for recorded
    /// points. The class itself is computed without the forced point so
    /// the replay never tightens what the graph stores.
    pub fn step(&self, net: &Net<S>, t_f: TransId) -> Replay<S> {
        let old = &self.class;
        let cur = old.ds.cur();
        let next = tdis::class_successor_unchecked(net, old, t_f);
        let n = next.ds.cur();
        let m_prev = &old.marking;
        let lam = tdis::lambda(net, old);
        let lam_origin = net
            .split_status(m_prev)
            .0
            .iter()
            .map(|t| self.up_t[t].clone())
            .min()
            .expect("lambda of a dead class");

        let up_n = lam_origin;
        let lo_n = self.lo_t[&t_f].clone();
        let mut up_t = BTreeMap::new();
        let mut lo_t = BTreeMap::new();
        for t in net.enabled_set(&next.marking) {
            if next.points.ne[&t] == n {
                up_t.insert(t, up_n.clone() + net.tmax(t).clone());
                lo_t.insert(t, lo_n.clone() + &-net.tmin(t).clone());
                continue;
            }
            let inhibited_before = net.is_inhibited(m_prev, t);
            let (mut up, mut lo);
            if inhibited_before {
                let s = next.points.ni[&t].expect("inhibited transition has a point");
                if self.origin <= s {
                    up = self.snap_up(s, t) + next.ds.up_n(s).clone();
                    lo = self.snap_lo(s, t) + next.ds.lo_n(s).clone();
                } else {
                    up = self.creation[&t].0.clone() + up_n.clone();
                    lo = self.creation[&t].1.clone() + lo_n.clone();
                }
                up = up.min(self.up_t[&t].clone() + lam[&cur].clone());
                lo = lo.min(self.lo_t[&t].clone() + old.ds.lo(t_f, cur).clone());
            } else {
                up = self.up_t[&t].clone();
                lo = self.lo_t[&t].clone();
                let s_opt = old.points.ni[&t];
                let p_opt = next.points.na[&t];
                if let (Some(s), Some(p)) = (s_opt, p_opt) {
                    if self.origin <= s && s <= p {
                        up = up.min(self.snap_up(s, t) + lam[&s].clone() + next.ds.lo_n(p).clone());
                        lo = lo.min(
                            self.snap_lo(s, t)
                                + old.ds.lo(t_f, s).clone()
                                + next.ds.up_n(p).clone(),
                        );
                    } else if s <= self.origin && self.origin <= p {
                        up = up.min(
                            self.creation[&t].0.clone() + up_n.clone() + next.ds.lo_n(p).clone(),
                        );
                        lo = lo.min(
                            self.creation[&t].1.clone() + lo_n.clone() + next.ds.up_n(p).clone(),
                        );
                    }
                }
                up = up.min(
                    up_n.clone() + old.ds.up(cur, t).clone() + old.ds.lo(t_f, cur).clone(),
                );
                lo = lo.min(
                    lo_n.clone()
                        + Bound::zero().min(old.ds.lo(t, cur).clone() + lam[&cur].clone()),
                );
            }
            up = up.min(up_n.clone() + next.ds.up(n, t).clone());
            up_t.insert(t, up);
            lo_t.insert(t, lo);
        }

        let mut inhibition = BTreeMap::new();
        for t in net.enabled_set(&next.marking) {
            match next.points.ni[&t] {
                Some(s) if s == n => {
                    inhibition.insert(t, (up_t[&t].clone(), lo_t[&t].clone()));
                }
                Some(_) => {
                    if let Some(e) = self.inhibition.get(&t) {
                        inhibition.insert(t, e.clone());
                    }
                }
                None => {}
            }
        }
        Replay {
            class: next,
            origin: self.origin,
            up_t,
            lo_t,
            up_n,
            lo_n,
            creation: self.creation.clone(),
            inhibition,
        }
    }
}

/// Re-runs the recursion from `start_class` along `labels` with the origin
/// force-retained, returning the duration bounds of the whole path.
pub fn replay_bounds<S: Scalar>(
    net: &Net<S>,
    start_class: &TdisClass<S>,
    origin: PointId,
    labels: &[TransId],
) -> Result<(S, Bound<S>), QuantError> {
    let mut replay = Replay::begin(net, start_class, origin)?;
    for &t in labels {
        if !net.is_activated(&replay.class.marking, t) {
            return Err(QuantError::InvalidPath);
        }
        replay = replay.step(net, t);
    }
    Ok(replay.bounds())
}

/// Duration bounds of a path in a tdis graph, measured from `origin`.
pub fn path_duration_bounds<S: Scalar>(
    net: &Net<S>,
    graph: &StateClassGraph<S>,
    query: &PathQuery,
) -> Result<(S, Bound<S>), QuantError> {
    if graph.method != Method::Tdis {
        return Err(QuantError::WrongMethod);
    }
    let terminal = graph
        .walk_from(query.start, &query.transitions)
        .ok_or(QuantError::InvalidPath)?;
    let terminal_class = graph.nodes[terminal].as_tdis().unwrap();
    if terminal_class.ds.indices().contains(&query.origin) {
        return Ok((
            -terminal_class.ds.lo_n(query.origin).expect_finite().clone(),
            terminal_class.ds.up_n(query.origin).clone(),
        ));
    }
    let start_class = graph.nodes[query.start].as_tdis().unwrap();
    replay_bounds(net, start_class, query.origin, &query.transitions)
}

#[derive(Debug, Clone)]
pub struct ResponseTime<S> {
    /// Best-case response time: minimum over windows of the lower bound.
    pub bcrt: S,
    /// Worst-case response time: maximum over windows of the upper bound.
    pub wcrt: Bound<S>,
    /// Number of start-to-end windows measured.
    pub windows: usize,
    /// Enumeration was cut by the limits somewhere that mattered.
    pub truncated: bool,
}

/// Response-time analysis of `task` over a tdis graph.
///
/// Every path starting with an edge firing `task.start` and ending with
/// the first subsequent edge firing `task.end` is enumerated, simple paths
/// plus at most one repeated node, capped by `limits`. The measured window
/// runs edge to edge: from the instant the start edge fires to the instant
/// the end edge fires. If enumeration is truncated at a class that can
/// still dwell unboundedly (or whose distance already is unbounded), the
/// WCRT is reported as infinite.
pub fn response_time<S: Scalar>(
    net: &Net<S>,
    graph: &StateClassGraph<S>,
    task: TaskSpec,
    limits: Limits,
) -> Result<ResponseTime<S>, QuantError> {
    if graph.method != Method::Tdis {
        return Err(QuantError::WrongMethod);
    }
    // nodes from which an end-labeled edge is still reachable; pruning
    // elsewhere loses no window
    let mut can_reach = vec![false; graph.nodes.len()];
    let mut stack: Vec<usize> = graph
        .edges
        .iter()
        .filter(|e| e.trans == task.end)
        .map(|e| e.src)
        .collect();
    for &n in &stack {
        can_reach[n] = true;
    }
    while let Some(n) = stack.pop() {
        for e in graph.edges.iter().filter(|e| e.dst == n) {
            if !can_reach[e.src] {
                can_reach[e.src] = true;
                stack.push(e.src);
            }
        }
    }

    struct Search<'a, S: Scalar> {
        net: &'a Net<S>,
        graph: &'a StateClassGraph<S>,
        task: TaskSpec,
        limits: Limits,
        can_reach: Vec<bool>,
        windows: usize,
        bcrt: Option<S>,
        wcrt: Option<Bound<S>>,
        truncated: bool,
        unbounded: bool,
    }

    impl<S: Scalar> Search<'_, S> {
        fn record(&mut self, replay: &Replay<S>) {
            let (lo, hi) = replay.bounds();
            self.bcrt = Some(match self.bcrt.take() {
                Some(b) => b.min(lo),
                None => lo,
            });
            self.wcrt = Some(match self.wcrt.take() {
                Some(w) => std::cmp::max(w, hi),
                None => hi,
            });
            self.windows += 1;
        }

        fn cut(&mut self, net: &Net<S>, replay: &Replay<S>) {
            self.truncated = true;
            let dwell_unbounded = match net.split_status(&replay.class.marking).0.as_slice() {
                [] => true, // dead class: time diverges here
                _ => tdis::lambda(net, &replay.class)[&replay.class.ds.cur()] == Bound::Infinity,
            };
            if replay.up_n == Bound::Infinity || dwell_unbounded {
                self.unbounded = true;
            }
        }

        fn dfs(&mut self, node: usize, replay: Replay<S>, len: usize, path: &mut Vec<usize>, has_repeat: bool) {
            if self.windows >= self.limits.max_paths {
                self.truncated = true;
                return;
            }
            let edges: Vec<_> = self.graph.outgoing(node).cloned().collect();
            for e in edges {
                let next = replay.step(self.net, e.trans);
                if e.trans == self.task.end {
                    self.record(&next);
                    if self.windows >= self.limits.max_paths {
                        self.truncated = true;
                        return;
                    }
                    continue;
                }
                if !self.can_reach[e.dst] {
                    continue;
                }
                if len + 1 >= self.limits.max_len {
                    self.cut(self.net, &next);
                    continue;
                }
                let seen = path.iter().filter(|&&n| n == e.dst).count();
                if seen >= 2 || (seen == 1 && has_repeat) {
                    self.cut(self.net, &next);
                    continue;
                }
                path.push(e.dst);
                self.dfs(e.dst, next, len + 1, path, has_repeat || seen == 1);
                path.pop();
            }
        }
    }

    let mut search = Search {
        net,
        graph,
        task,
        limits,
        can_reach,
        windows: 0,
        bcrt: None,
        wcrt: None,
        truncated: false,
        unbounded: false,
    };
    let starts: Vec<_> = graph
        .edges
        .iter()
        .filter(|e| e.trans == task.start)
        .cloned()
        .collect();
    for e in starts {
        if !search.can_reach[e.dst] {
            continue;
        }
        let class = graph.nodes[e.dst].as_tdis().unwrap();
        let replay = Replay::begin(net, class, class.ds.cur())?;
        let mut path = vec![e.dst];
        search.dfs(e.dst, replay, 1, &mut path, false);
    }
    match (search.bcrt, search.wcrt) {
        (Some(bcrt), Some(wcrt)) => Ok(ResponseTime {
            bcrt,
            wcrt: if search.truncated && search.unbounded { Bound::Infinity } else { wcrt },
            windows: search.windows,
            truncated: search.truncated,
        }),
        _ => Err(QuantError::NoPath {
            start: net.transition_name(task.start).to_string(),
            end: net.transition_name(task.end).to_string(),
        }),
    }
}
