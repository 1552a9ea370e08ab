//! Classical DBM state classes and their successor relation.
//!
//! A class is a marking plus a square bound matrix over `Te(M) ∪ {•}`,
//! where `•` is the instant the class was entered and `D[x,y]` bounds
//! `y − x`. Successors are computed directly in normal form; no closure
//! pass is applied afterwards.

use crate::net::{Marking, Net, TransId};
use crate::scalar::{Bound, Scalar};

/// Row/column index of a [`DbmMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbmIndex {
    /// The class-entry instant `•`.
    Entry,
    Trans(TransId),
}

/// Square bound matrix over `Te(M) ∪ {•}`; position 0 is `•`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DbmMatrix<S> {
    trans: Vec<TransId>,
    entries: Vec<Bound<S>>,
}

impl<S: Scalar> DbmMatrix<S> {
    pub fn new(trans: Vec<TransId>) -> Self {
        let dim = trans.len() + 1;
        DbmMatrix {
            trans,
            entries: vec![Bound::zero(); dim * dim],
        }
    }

    pub fn transitions(&self) -> &[TransId] {
        &self.trans
    }

    pub fn dim(&self) -> usize {
        self.trans.len() + 1
    }

    pub fn pos(&self, idx: DbmIndex) -> usize {
        match idx {
            DbmIndex::Entry => 0,
            DbmIndex::Trans(t) => {
                1 + self
                    .trans
                    .iter()
                    .position(|&u| u == t)
                    .expect("transition not in matrix index set")
            }
        }
    }

    pub fn get(&self, x: DbmIndex, y: DbmIndex) -> &Bound<S> {
        &self.entries[self.pos(x) * self.dim() + self.pos(y)]
    }

    pub fn set(&mut self, x: DbmIndex, y: DbmIndex, v: Bound<S>) {
        let p = self.pos(x) * self.dim() + self.pos(y);
        self.entries[p] = v;
    }

    pub fn get_pos(&self, x: usize, y: usize) -> &Bound<S> {
        &self.entries[x * self.dim() + y]
    }

    pub fn set_pos(&mut self, x: usize, y: usize, v: Bound<S>) {
        let p = x * self.dim() + y;
        self.entries[p] = v;
    }

    /// Entrywise `self <= other`; both matrices must share an index set.
    pub fn dominated_by(&self, other: &DbmMatrix<S>) -> bool {
        assert_eq!(self.trans, other.trans, "index sets differ");
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }
}

/// A DBM overapproximated state class.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DbmClass<S> {
    pub marking: Marking,
    pub matrix: DbmMatrix<S>,
}

/// The initial class: static intervals plus the pairwise bounds
/// `t_j − t_i <= tmax(t_j) − tmin(t_i)`.
pub fn initial_dbm<S: Scalar>(net: &Net<S>) -> DbmClass<S> {
    let marking = net.initial_marking();
    let enabled = net.enabled_set(&marking);
    let mut m = DbmMatrix::new(enabled.clone());
    for &t in &enabled {
        m.set(DbmIndex::Entry, DbmIndex::Trans(t), net.tmax(t).clone());
        m.set(
            DbmIndex::Trans(t),
            DbmIndex::Entry,
            Bound::Finite(-net.tmin(t).clone()),
        );
        for &u in &enabled {
            if u != t {
                let v = net.tmax(u).clone() + &-net.tmin(t).clone();
                m.set(DbmIndex::Trans(t), DbmIndex::Trans(u), v);
            }
        }
    }
    DbmClass { marking, matrix: m }
}

/// `β[x] = MIN over activated t of D[x, t]`, indexed by matrix position
/// (0 = `•`). `β[•]` is the maximal dwelling time of the class.
///
/// Contract: `Ta(M)` nonempty (dead classes have no `β`).
pub fn beta<S: Scalar>(net: &Net<S>, class: &DbmClass<S>) -> Vec<Bound<S>> {
    let (activated, _) = net.split_status(&class.marking);
    assert!(!activated.is_empty(), "beta of a dead class");
    let m = &class.matrix;
    let mut out = Vec::with_capacity(m.dim());
    for x in 0..m.dim() {
        let idx = if x == 0 {
            DbmIndex::Entry
        } else {
            DbmIndex::Trans(m.transitions()[x - 1])
        };
        let v = activated
            .iter()
            .map(|&t| m.get(idx, DbmIndex::Trans(t)).clone())
            .min()
            .unwrap();
        out.push(v);
    }
    out
}

/// Firing test: `t` activated and `β[t] >= 0`.
pub fn firable_dbm<S: Scalar>(net: &Net<S>, class: &DbmClass<S>, t: TransId) -> bool {
    if !net.is_activated(&class.marking, t) {
        return false;
    }
    beta(net, class)[class.matrix.pos(DbmIndex::Trans(t))].is_nonnegative()
}

/// Successor class after firing `t_f`, computed case by case on the
/// persistence and inhibition status of each transition. The result is
/// already in normal form.
pub fn successor_dbm<S: Scalar>(net: &Net<S>, class: &DbmClass<S>, t_f: TransId) -> DbmClass<S> {
    assert!(firable_dbm(net, class, t_f), "successor of a non-firable transition");
    let b = beta(net, class);
    let beta_of = |m: &DbmMatrix<S>, idx: DbmIndex| b[m.pos(idx)].clone();
    let old = &class.matrix;
    let m_prev = &class.marking;
    let m_next = net.fire_marking(m_prev, t_f);
    let enabled = net.enabled_set(&m_next);
    let new_set = net.newly_enabled(m_prev, t_f, &m_next);
    let tf = DbmIndex::Trans(t_f);

    let mut next = DbmMatrix::new(enabled.clone());
    // single-clock bounds first; the pair cases read them back
    for &t in &enabled {
        let ti = DbmIndex::Trans(t);
        if new_set.contains(&t) {
            next.set(DbmIndex::Entry, ti, net.tmax(t).clone());
            next.set(ti, DbmIndex::Entry, Bound::Finite(-net.tmin(t).clone()));
        } else if net.is_inhibited(m_prev, t) {
            let lower = old
                .get(ti, DbmIndex::Entry)
                .clone()
                .min(old.get(tf, DbmIndex::Entry).clone() + beta_of(old, ti));
            let upper = old
                .get(DbmIndex::Entry, ti)
                .clone()
                .min(old.get(tf, ti).clone() + beta_of(old, DbmIndex::Entry));
            next.set(ti, DbmIndex::Entry, lower);
            next.set(DbmIndex::Entry, ti, upper);
        } else {
            next.set(DbmIndex::Entry, ti, old.get(tf, ti).clone());
            next.set(ti, DbmIndex::Entry, beta_of(old, ti));
        }
    }
    for &t1 in &enabled {
        for &t2 in &enabled {
            if t1 == t2 {
                continue;
            }
            let (i1, i2) = (DbmIndex::Trans(t1), DbmIndex::Trans(t2));
            let row_col = next.get(DbmIndex::Entry, i2).clone() + next.get(i1, DbmIndex::Entry).clone();
            let v = if new_set.contains(&t1) || new_set.contains(&t2) {
                row_col
            } else {
                let inh1 = net.is_inhibited(m_prev, t1);
                let inh2 = net.is_inhibited(m_prev, t2);
                let carried = match (inh1, inh2) {
                    (true, false) => old.get(i1, i2).clone() + old.get(tf, DbmIndex::Entry).clone(),
                    (false, true) => old.get(i1, i2).clone() + beta_of(old, DbmIndex::Entry),
                    _ => old.get(i1, i2).clone(),
                };
                carried.min(row_col)
            };
            next.set(i1, i2, v);
        }
    }
    DbmClass { marking: m_next, matrix: next }
}
