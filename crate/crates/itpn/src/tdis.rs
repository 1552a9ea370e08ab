//! Time-distance state classes: the tightened DBM overapproximation.
//!
//! Each class carries, next to its marking and a compact DBM over the
//! enabled transitions, a *time-distance system* bounding the elapsed time
//! between recorded firing points and both the current instant and the
//! firing instants of enabled transitions. Per-transition bookkeeping
//! (last enabling / inhibiting / activating point) decides which recursion
//! branch updates every coefficient, and historical snapshots of earlier
//! systems let an inhibited clock's residual window be re-tightened after
//! the fact — the information a plain DBM class has already thrown away.

use std::collections::{BTreeMap, BTreeSet};

use crate::net::{Marking, Net, TransId};
use crate::scalar::{Bound, Scalar};

/// A firing point: the depth of one firing along the current path
/// (0 is the initial instant).
pub type PointId = u32;

/// Last enabling (`ne`), inhibiting (`ni`) and activating (`na`) points of
/// every enabled transition. `None` encodes "never since last enabling".
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PointMaps {
    pub ne: BTreeMap<TransId, PointId>,
    pub ni: BTreeMap<TransId, Option<PointId>>,
    pub na: BTreeMap<TransId, Option<PointId>>,
}

impl PointMaps {
    /// The referenced points `[ne] ∪ [ni] ∪ [na]`; anything else has been
    /// garbage-collected.
    pub fn point_set(&self) -> BTreeSet<PointId> {
        let mut set: BTreeSet<PointId> = self.ne.values().copied().collect();
        set.extend(self.ni.values().flatten().copied());
        set.extend(self.na.values().flatten().copied());
        set
    }
}

/// The four coefficient tables of a time-distance system at current point
/// `cur`, indexed by `points ∪ {cur}` and the enabled transitions:
///
/// * `up(i, t)`   — max of (time from point i to now) + residual of `t`
/// * `lo(t, i)`   — the opposite of the corresponding min
/// * `up_n(i)`    — max time distance from point i to now
/// * `lo_n(i)`    — the opposite of the corresponding min
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DistanceSystem<S> {
    cur: PointId,
    points: BTreeSet<PointId>,
    up_t: BTreeMap<(PointId, TransId), Bound<S>>,
    lo_t: BTreeMap<(TransId, PointId), Bound<S>>,
    up_n: BTreeMap<PointId, Bound<S>>,
    lo_n: BTreeMap<PointId, Bound<S>>,
}

impl<S: Scalar> DistanceSystem<S> {
    pub fn empty(points: BTreeSet<PointId>, cur: PointId) -> Self {
        let mut ds = DistanceSystem {
            cur,
            points,
            up_t: BTreeMap::new(),
            lo_t: BTreeMap::new(),
            up_n: BTreeMap::new(),
            lo_n: BTreeMap::new(),
        };
        ds.set_up_n(cur, Bound::zero());
        ds.set_lo_n(cur, Bound::zero());
        ds
    }

    pub fn cur(&self) -> PointId {
        self.cur
    }

    pub fn points(&self) -> &BTreeSet<PointId> {
        &self.points
    }

    /// `points ∪ {cur}` in increasing order.
    pub fn indices(&self) -> Vec<PointId> {
        let mut idx: BTreeSet<PointId> = self.points.clone();
        idx.insert(self.cur);
        idx.into_iter().collect()
    }

    pub fn up(&self, i: PointId, t: TransId) -> &Bound<S> {
        &self.up_t[&(i, t)]
    }

    pub fn lo(&self, t: TransId, i: PointId) -> &Bound<S> {
        &self.lo_t[&(t, i)]
    }

    pub fn up_n(&self, i: PointId) -> &Bound<S> {
        &self.up_n[&i]
    }

    pub fn lo_n(&self, i: PointId) -> &Bound<S> {
        &self.lo_n[&i]
    }

    pub fn set_up(&mut self, i: PointId, t: TransId, v: Bound<S>) {
        self.up_t.insert((i, t), v);
    }

    pub fn set_lo(&mut self, t: TransId, i: PointId, v: Bound<S>) {
        self.lo_t.insert((t, i), v);
    }

    pub fn set_up_n(&mut self, i: PointId, v: Bound<S>) {
        self.up_n.insert(i, v);
    }

    pub fn set_lo_n(&mut self, i: PointId, v: Bound<S>) {
        self.lo_n.insert(i, v);
    }

    /// Entrywise `self <= other` over identical index sets.
    pub fn dominated_by(&self, other: &DistanceSystem<S>) -> bool {
        assert_eq!(self.indices(), other.indices(), "point sets differ");
        self.up_t.iter().all(|(k, v)| v <= &other.up_t[k])
            && self.lo_t.iter().all(|(k, v)| v <= &other.lo_t[k])
            && self.up_n.iter().all(|(k, v)| v <= &other.up_n[k])
            && self.lo_n.iter().all(|(k, v)| v <= &other.lo_n[k])
    }
}

/// Rows of earlier systems that the recursion may still reference:
///
/// * `creation[i]` — the current-point row recorded when point `i` was
///   created;
/// * `inhibition[t]` — the column of `t` recorded at its last inhibiting
///   point.
///
/// Rows are never mutated once recorded and are dropped when the point or
/// transition they serve disappears.
/// `(upper, lower)` distance pair of one transition against one point.
pub type SnapshotEntry<S> = (Bound<S>, Bound<S>);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HistorySnapshots<S> {
    pub creation: BTreeMap<PointId, BTreeMap<TransId, SnapshotEntry<S>>>,
    pub inhibition: BTreeMap<TransId, BTreeMap<PointId, SnapshotEntry<S>>>,
}

impl<S> Default for HistorySnapshots<S> {
    fn default() -> Self {
        HistorySnapshots { creation: BTreeMap::new(), inhibition: BTreeMap::new() }
    }
}

/// Compact DBM over transition pairs: `t' - t <= get(t, t')`, zero diagonal.
/// The single-clock bounds live in the distance system's current row.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DcMatrix<S> {
    trans: Vec<TransId>,
    entries: Vec<Bound<S>>,
}

impl<S: Scalar> DcMatrix<S> {
    pub fn new(trans: Vec<TransId>) -> Self {
        let dim = trans.len();
        DcMatrix { trans, entries: vec![Bound::zero(); dim * dim] }
    }

    pub fn transitions(&self) -> &[TransId] {
        &self.trans
    }

    fn pos(&self, t: TransId) -> usize {
        self.trans.iter().position(|&u| u == t).expect("transition not in matrix")
    }

    pub fn get(&self, t: TransId, u: TransId) -> &Bound<S> {
        &self.entries[self.pos(t) * self.trans.len() + self.pos(u)]
    }

    pub fn set(&mut self, t: TransId, u: TransId, v: Bound<S>) {
        let p = self.pos(t) * self.trans.len() + self.pos(u);
        self.entries[p] = v;
    }

    pub fn dominated_by(&self, other: &DcMatrix<S>) -> bool {
        assert_eq!(self.trans, other.trans, "index sets differ");
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }
}

/// A time-distance state class.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TdisClass<S> {
    pub marking: Marking,
    pub points: PointMaps,
    pub ds: DistanceSystem<S>,
    pub hist: HistorySnapshots<S>,
    pub dc: DcMatrix<S>,
}

impl<S: Scalar> TdisClass<S> {
    /// Max residual time of `t` from the current instant.
    pub fn upper(&self, t: TransId) -> &Bound<S> {
        self.ds.up(self.ds.cur(), t)
    }

    /// Opposite of the min residual time of `t` from the current instant.
    pub fn lower(&self, t: TransId) -> &Bound<S> {
        self.ds.lo(t, self.ds.cur())
    }
}

/// The initial class at point 0.
pub fn initial_tdis<S: Scalar>(net: &Net<S>) -> TdisClass<S> {
    let marking = net.initial_marking();
    let enabled = net.enabled_set(&marking);
    let mut ne = BTreeMap::new();
    let mut ni = BTreeMap::new();
    let mut na = BTreeMap::new();
    for &t in &enabled {
        ne.insert(t, 0);
        ni.insert(t, net.is_inhibited(&marking, t).then_some(0));
        na.insert(t, net.is_activated(&marking, t).then_some(0));
    }
    let points = PointMaps { ne, ni, na };

    let mut ds = DistanceSystem::empty(points.point_set(), 0);
    let mut creation_row = BTreeMap::new();
    for &t in &enabled {
        let up = net.tmax(t).clone();
        let lo = Bound::Finite(-net.tmin(t).clone());
        ds.set_up(0, t, up.clone());
        ds.set_lo(t, 0, lo.clone());
        creation_row.insert(t, (up, lo));
    }
    let mut hist = HistorySnapshots::default();
    for &t in &enabled {
        if net.is_inhibited(&marking, t) {
            hist.inhibition.insert(t, BTreeMap::from([(0, creation_row[&t].clone())]));
        }
    }
    hist.creation.insert(0, creation_row);

    let mut dc = DcMatrix::new(enabled.clone());
    for &t in &enabled {
        for &u in &enabled {
            if t != u {
                dc.set(t, u, net.tmax(u).clone() + &-net.tmin(t).clone());
            }
        }
    }
    TdisClass { marking, points, ds, hist, dc }
}

/// Advances the three point maps after firing `t_f`; the new current point
/// is `cur + 1` and unreferenced points drop out of the point set.
pub fn update_points<S: Scalar>(
    net: &Net<S>,
    class: &TdisClass<S>,
    t_f: TransId,
    m_next: &Marking,
) -> PointMaps {
    let n = class.ds.cur() + 1;
    let m_prev = &class.marking;
    let new_set = net.newly_enabled(m_prev, t_f, m_next);
    let mut ne = BTreeMap::new();
    let mut ni = BTreeMap::new();
    let mut na = BTreeMap::new();
    for t in net.enabled_set(m_next) {
        if new_set.contains(&t) {
            ne.insert(t, n);
            ni.insert(t, net.is_inhibited(m_next, t).then_some(n));
            na.insert(t, net.is_activated(m_next, t).then_some(n));
        } else {
            ne.insert(t, class.points.ne[&t]);
            let ni_val = if net.is_activated(m_prev, t) && net.is_inhibited(m_next, t) {
                Some(n)
            } else {
                class.points.ni[&t]
            };
            ni.insert(t, ni_val);
            let na_val = if net.is_activated(m_next, t) && net.is_inhibited(m_prev, t) {
                Some(n)
            } else {
                class.points.na[&t]
            };
            na.insert(t, na_val);
        }
    }
    PointMaps { ne, ni, na }
}

/// `λ[i] = MIN over activated t of ds[i, t]`, for `i ∈ points ∪ {cur}`;
/// `λ[cur]` is the maximal dwelling time of the class.
///
/// Contract: the class is not dead.
pub fn lambda<S: Scalar>(net: &Net<S>, class: &TdisClass<S>) -> BTreeMap<PointId, Bound<S>> {
    let (activated, _) = net.split_status(&class.marking);
    assert!(!activated.is_empty(), "lambda of a dead class");
    class
        .ds
        .indices()
        .into_iter()
        .map(|i| {
            let v = activated.iter().map(|&t| class.ds.up(i, t).clone()).min().unwrap();
            (i, v)
        })
        .collect()
}

/// `MIN over activated t' of dc[t, t']` (the diagonal contributes 0 when
/// `t` is itself activated).
pub fn beta_c<S: Scalar>(net: &Net<S>, class: &TdisClass<S>, t: TransId) -> Bound<S> {
    let (activated, _) = net.split_status(&class.marking);
    assert!(!activated.is_empty(), "beta of a dead class");
    activated.iter().map(|&u| class.dc.get(t, u).clone()).min().unwrap()
}

/// Firing test: `t` activated and `MIN over activated t' of dc[t,t'] >= 0`.
pub fn firable_tdis<S: Scalar>(net: &Net<S>, class: &TdisClass<S>, t: TransId) -> bool {
    net.is_activated(&class.marking, t) && beta_c(net, class, t).is_nonnegative()
}

/// Branch data for one persistent transition.
struct Persist {
    r: PointId,
    s: Option<PointId>,
    p: Option<PointId>,
    inhibited_before: bool,
}

fn history_up<S: Scalar>(hist: &HistorySnapshots<S>, s: PointId, i: PointId, t: TransId) -> &Bound<S> {
    if s == i {
        // the column at its own inhibiting point is its creation row
        if let Some(row) = hist.creation.get(&i).and_then(|r| r.get(&t)) {
            return &row.0;
        }
    }
    &hist
        .inhibition
        .get(&t)
        .and_then(|row| row.get(&i))
        .unwrap_or_else(|| panic!("missing inhibition snapshot for {t:?} at point {i}"))
        .0
}

fn history_lo<S: Scalar>(hist: &HistorySnapshots<S>, s: PointId, i: PointId, t: TransId) -> &Bound<S> {
    if s == i {
        if let Some(row) = hist.creation.get(&i).and_then(|r| r.get(&t)) {
            return &row.1;
        }
    }
    &hist
        .inhibition
        .get(&t)
        .and_then(|row| row.get(&i))
        .unwrap_or_else(|| panic!("missing inhibition snapshot for {t:?} at point {i}"))
        .1
}

fn creation_entry<S: Scalar>(hist: &HistorySnapshots<S>, i: PointId, t: TransId) -> &(Bound<S>, Bound<S>) {
    hist.creation
        .get(&i)
        .and_then(|row| row.get(&t))
        .unwrap_or_else(|| panic!("missing creation snapshot for {t:?} at point {i}"))
}

/// Computes `ds[i, t]` of the successor for one retained point `i`.
#[allow(clippy::too_many_arguments)]
fn point_up<S: Scalar>(
    class: &TdisClass<S>,
    t_f: TransId,
    lam: &BTreeMap<PointId, Bound<S>>,
    ds_next: &DistanceSystem<S>,
    i: PointId,
    t: TransId,
    up_old: &Bound<S>,
    st: &Persist,
) -> Bound<S> {
    let cur = class.ds.cur();
    let mut best;
    if st.inhibited_before {
        let s = st.s.expect("inhibited transition has an inhibiting point");
        best = if i <= s {
            history_up(&class.hist, s, i, t).clone() + ds_next.up_n(s).clone()
        } else {
            creation_entry(&class.hist, i, t).0.clone() + ds_next.up_n(i).clone()
        };
        best = best.min(up_old.clone() + lam[&cur].clone());
    } else {
        best = up_old.clone();
        if let (Some(s), Some(p)) = (st.s, st.p) {
            if i <= s && s <= p {
                let v = history_up(&class.hist, s, i, t).clone()
                    + lam[&s].clone()
                    + ds_next.lo_n(p).clone();
                best = best.min(v);
            } else if s <= i && i <= p {
                let v = creation_entry(&class.hist, i, t).0.clone()
                    + ds_next.up_n(i).clone()
                    + ds_next.lo_n(p).clone();
                best = best.min(v);
            }
        }
        let via_now = ds_next.up_n(i).clone()
            + class.ds.up(cur, t).clone()
            + class.ds.lo(t_f, cur).clone();
        best = best.min(via_now);
    }
    best
}

/// Computes `ds[t, i]` of the successor for one retained point `i`.
#[allow(clippy::too_many_arguments)]
fn point_lo<S: Scalar>(
    class: &TdisClass<S>,
    t_f: TransId,
    lam: &BTreeMap<PointId, Bound<S>>,
    ds_next: &DistanceSystem<S>,
    i: PointId,
    t: TransId,
    lo_old: &Bound<S>,
    st: &Persist,
) -> Bound<S> {
    let cur = class.ds.cur();
    let mut best;
    if st.inhibited_before {
        let s = st.s.expect("inhibited transition has an inhibiting point");
        best = if i <= s {
            history_lo(&class.hist, s, i, t).clone() + ds_next.lo_n(s).clone()
        } else {
            creation_entry(&class.hist, i, t).1.clone() + ds_next.lo_n(i).clone()
        };
        best = best.min(lo_old.clone() + class.ds.lo(t_f, cur).clone());
    } else {
        best = lo_old.clone();
        if let (Some(s), Some(p)) = (st.s, st.p) {
            if i <= s && s <= p {
                let v = history_lo(&class.hist, s, i, t).clone()
                    + class.ds.lo(t_f, s).clone()
                    + ds_next.up_n(p).clone();
                best = best.min(v);
            } else if s <= i && i <= p {
                let v = creation_entry(&class.hist, i, t).1.clone()
                    + ds_next.lo_n(i).clone()
                    + ds_next.up_n(p).clone();
                best = best.min(v);
            }
        }
        let via_now = ds_next.lo_n(i).clone()
            + Bound::zero().min(class.ds.lo(t, cur).clone() + lam[&cur].clone());
        best = best.min(via_now);
    }
    best
}

/// The time-distance system and snapshots of the successor class.
pub fn ds_successor<S: Scalar>(
    net: &Net<S>,
    class: &TdisClass<S>,
    t_f: TransId,
) -> (DistanceSystem<S>, HistorySnapshots<S>, PointMaps) {
    let m_prev = &class.marking;
    let m_next = net.fire_marking(m_prev, t_f);
    let maps = update_points(net, class, t_f, &m_next);
    let n = class.ds.cur() + 1;
    let lam = lambda(net, class);
    let enabled = net.enabled_set(&m_next);
    let cur = class.ds.cur();

    let mut ds = DistanceSystem::empty(maps.point_set(), n);
    let retained: Vec<PointId> = ds.indices().into_iter().filter(|&i| i != n).collect();
    for &i in &retained {
        ds.set_up_n(i, lam[&i].clone());
        ds.set_lo_n(i, class.ds.lo(t_f, i).clone());
    }

    for &t in &enabled {
        if maps.ne[&t] == n {
            for &i in &retained {
                ds.set_up(i, t, ds.up_n(i).clone() + net.tmax(t).clone());
                ds.set_lo(t, i, ds.lo_n(i).clone() + &-net.tmin(t).clone());
            }
            ds.set_up(n, t, net.tmax(t).clone());
            ds.set_lo(t, n, Bound::Finite(-net.tmin(t).clone()));
        } else {
            let st = Persist {
                r: maps.ne[&t],
                s: if net.is_inhibited(m_prev, t) { maps.ni[&t] } else { class.points.ni[&t] },
                p: maps.na[&t],
                inhibited_before: net.is_inhibited(m_prev, t),
            };
            for &i in &retained {
                let up = point_up(class, t_f, &lam, &ds, i, t, class.ds.up(i, t), &st);
                let lo = point_lo(class, t_f, &lam, &ds, i, t, class.ds.lo(t, i), &st);
                ds.set_up(i, t, up);
                ds.set_lo(t, i, lo);
            }
            let r = st.r;
            if st.inhibited_before {
                let up_cur = (ds.up(r, t).clone() + ds.lo_n(r).clone())
                    .min(class.ds.up(cur, t).clone())
                    .min(class.dc.get(t_f, t).clone() + lam[&cur].clone());
                let lo_cur = Bound::zero()
                    .min(ds.lo(t, r).clone() + ds.up_n(r).clone())
                    .min(class.ds.lo(t, cur).clone())
                    .min(class.ds.lo(t_f, cur).clone() + beta_c(net, class, t));
                ds.set_up(n, t, up_cur);
                ds.set_lo(t, n, lo_cur);
            } else {
                let up_cur = class
                    .dc
                    .get(t_f, t)
                    .clone()
                    .min(ds.up(r, t).clone() + ds.lo_n(r).clone());
                let lo_cur = beta_c(net, class, t)
                    .min(Bound::zero().min(ds.lo(t, r).clone() + ds.up_n(r).clone()));
                ds.set_up(n, t, up_cur);
                ds.set_lo(t, n, lo_cur);
            }
        }
    }

    // a persistent clock's distance from a point never exceeds the route
    // through the current instant; only the upper side is tightened this
    // way (the lower side keeps the recursion's values)
    for &t in &enabled {
        if maps.ne[&t] != n {
            for &i in &retained {
                let via = ds.up_n(i).clone() + ds.up(n, t).clone();
                let v = ds.up(i, t).clone().min(via);
                ds.set_up(i, t, v);
            }
        }
    }

    // snapshots: keep creation rows of surviving points, record the new
    // point's row if it is referenced, and refresh inhibition columns
    let mut hist = HistorySnapshots::default();
    for &i in &retained {
        hist.creation.insert(i, class.hist.creation[&i].clone());
    }
    if maps.point_set().contains(&n) {
        let row = enabled
            .iter()
            .map(|&t| (t, (ds.up(n, t).clone(), ds.lo(t, n).clone())))
            .collect();
        hist.creation.insert(n, row);
    }
    for &t in &enabled {
        match maps.ni[&t] {
            Some(s) if s == n => {
                let mut row: BTreeMap<PointId, (Bound<S>, Bound<S>)> = retained
                    .iter()
                    .map(|&i| (i, (ds.up(i, t).clone(), ds.lo(t, i).clone())))
                    .collect();
                row.insert(n, (ds.up(n, t).clone(), ds.lo(t, n).clone()));
                hist.inhibition.insert(t, row);
            }
            Some(s) => {
                let old_row = &class.hist.inhibition[&t];
                let row = old_row
                    .iter()
                    .filter(|(&i, _)| i <= s && (maps.point_set().contains(&i) || i == s))
                    .map(|(&i, v)| (i, v.clone()))
                    .collect();
                hist.inhibition.insert(t, row);
            }
            None => {}
        }
    }
    (ds, hist, maps)
}

/// The compact DBM of the successor, tightened through the point routes
/// `α[t,t'] = MIN over i of ds[i,t'] + ds[t,i]`.
pub fn dc_successor<S: Scalar>(
    net: &Net<S>,
    class: &TdisClass<S>,
    t_f: TransId,
    ds_next: &DistanceSystem<S>,
    maps: &PointMaps,
) -> DcMatrix<S> {
    let m_prev = &class.marking;
    let m_next = net.fire_marking(m_prev, t_f);
    let enabled = net.enabled_set(&m_next);
    let n = ds_next.cur();
    let cur = class.ds.cur();
    let lam_cur = lambda(net, class)[&cur].clone();
    let mut dc = DcMatrix::new(enabled.clone());
    for &t in &enabled {
        for &u in &enabled {
            if t == u {
                continue;
            }
            if maps.ne[&t] == n || maps.ne[&u] == n {
                dc.set(t, u, ds_next.up(n, u).clone() + ds_next.lo(t, n).clone());
                continue;
            }
            let alpha = ds_next
                .indices()
                .into_iter()
                .map(|i| ds_next.up(i, u).clone() + ds_next.lo(t, i).clone())
                .min()
                .unwrap();
            let carried = match (net.is_inhibited(m_prev, t), net.is_inhibited(m_prev, u)) {
                (true, false) => class.dc.get(t, u).clone() + class.ds.lo(t_f, cur).clone(),
                (false, true) => class.dc.get(t, u).clone() + lam_cur.clone(),
                _ => class.dc.get(t, u).clone(),
            };
            dc.set(t, u, carried.min(alpha));
        }
    }
    dc
}

/// Full successor: marking, point maps, distance system, snapshots and
/// compact DBM. Per class this costs O(m·l) for the distance tables and
/// O(m²·l) for the DBM part, `m` enabled transitions and `l` points.
pub fn class_successor<S: Scalar>(net: &Net<S>, class: &TdisClass<S>, t_f: TransId) -> TdisClass<S> {
    assert!(firable_tdis(net, class, t_f), "successor of a non-firable transition");
    class_successor_unchecked(net, class, t_f)
}

/// Successor without the matrix firing test. Path replays across merged
/// graph nodes may carry tables tighter than the stored representative's,
/// so an edge the graph admits can fail this lineage's test; the
/// recursion is still well-defined and its result still dominates every
/// state actually reachable along the path.
pub(crate) fn class_successor_unchecked<S: Scalar>(
    net: &Net<S>,
    class: &TdisClass<S>,
    t_f: TransId,
) -> TdisClass<S> {
    assert!(net.is_activated(&class.marking, t_f), "fired transition not activated");
    let m_next = net.fire_marking(&class.marking, t_f);
    let (ds, hist, points) = ds_successor(net, class, t_f);
    let dc = dc_successor(net, class, t_f, &ds, &points);
    TdisClass { marking: m_next, points, ds, hist, dc }
}

/// Relabels the points of a class to `0..k` preserving order; classes equal
/// up to point labels become structurally equal.
pub fn canonical<S: Scalar>(class: &TdisClass<S>) -> TdisClass<S> {
    let indices = class.ds.indices();
    let map: BTreeMap<PointId, PointId> = indices
        .iter()
        .enumerate()
        .map(|(k, &i)| (i, k as PointId))
        .collect();
    let rl = |i: PointId| map[&i];
    let points = PointMaps {
        ne: class.points.ne.iter().map(|(&t, &i)| (t, rl(i))).collect(),
        ni: class.points.ni.iter().map(|(&t, &i)| (t, i.map(rl))).collect(),
        na: class.points.na.iter().map(|(&t, &i)| (t, i.map(rl))).collect(),
    };
    let mut ds = DistanceSystem::empty(
        class.ds.points().iter().map(|&i| rl(i)).collect(),
        rl(class.ds.cur()),
    );
    for i in class.ds.indices() {
        ds.set_up_n(rl(i), class.ds.up_n(i).clone());
        ds.set_lo_n(rl(i), class.ds.lo_n(i).clone());
        for (&(j, t), v) in class.ds.up_t.iter().filter(|(&(j, _), _)| j == i) {
            ds.set_up(rl(j), t, v.clone());
        }
        for (&(t, j), v) in class.ds.lo_t.iter().filter(|(&(_, j), _)| j == i) {
            ds.set_lo(t, rl(j), v.clone());
        }
    }
    let hist = HistorySnapshots {
        creation: class
            .hist
            .creation
            .iter()
            .map(|(&i, row)| (rl(i), row.clone()))
            .collect(),
        inhibition: class
            .hist
            .inhibition
            .iter()
            .map(|(&t, row)| (t, row.iter().map(|(&i, v)| (rl(i), v.clone())).collect()))
            .collect(),
    };
    TdisClass {
        marking: class.marking.clone(),
        points,
        ds,
        hist,
        dc: class.dc.clone(),
    }
}
