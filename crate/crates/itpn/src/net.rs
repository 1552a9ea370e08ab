//! Time Petri nets with inhibitor arcs: structure, markings, and the
//! enabling / inhibition / activation / conflict predicates.
//!
//! An inhibitor arc whose valuation is satisfied by the current marking
//! freezes the clock of its target transition; the clock resumes from the
//! same value once the arc is no longer satisfied. Only one clock per
//! enabled transition is tracked (monoserver semantics).

use std::fmt;

use crate::scalar::{Bound, Scalar};

/// Index of a place in its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceId(pub usize);

/// Index of a transition in its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransId(pub usize);

impl fmt::Display for PlaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl fmt::Display for TransId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Token counts per place.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Marking(Vec<u64>);

impl Marking {
    pub fn new(tokens: Vec<u64>) -> Self {
        Marking(tokens)
    }

    pub fn tokens(&self, p: PlaceId) -> u64 {
        self.0[p.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlaceId, u64)> + '_ {
        self.0.iter().enumerate().map(|(i, &n)| (PlaceId(i), n))
    }
}

/// Static data of one transition: firing interval plus its arcs.
#[derive(Clone, Debug)]
pub struct Transition<S> {
    pub name: String,
    pub tmin: S,
    pub tmax: Bound<S>,
    /// Backward incidence: weighted input places.
    pub pre: Vec<(PlaceId, u64)>,
    /// Forward incidence: weighted output places.
    pub post: Vec<(PlaceId, u64)>,
    /// Inhibitor arcs pointing at this transition.
    pub inhibitors: Vec<(PlaceId, u64)>,
}

/// An immutable inhibitor-arc time Petri net.
#[derive(Clone, Debug)]
pub struct Net<S> {
    places: Vec<String>,
    transitions: Vec<Transition<S>>,
    initial: Marking,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NetError {
    #[error("empty static interval for transition `{0}`: tmin > tmax")]
    EmptyInterval(String),
    #[error("negative tmin for transition `{0}`")]
    NegativeTmin(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("zero-weight arc on `{0}`")]
    ZeroWeight(String),
}

/// Incremental construction of a [`Net`] with validation on `build`.
pub struct NetBuilder<S> {
    places: Vec<String>,
    tokens: Vec<u64>,
    transitions: Vec<Transition<S>>,
}

impl<S: Scalar> NetBuilder<S> {
    pub fn new() -> Self {
        NetBuilder {
            places: Vec::new(),
            tokens: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn place(&mut self, name: &str, tokens: u64) -> PlaceId {
        self.places.push(name.to_string());
        self.tokens.push(tokens);
        PlaceId(self.places.len() - 1)
    }

    pub fn transition(&mut self, name: &str, tmin: S, tmax: Bound<S>) -> TransId {
        self.transitions.push(Transition {
            name: name.to_string(),
            tmin,
            tmax,
            pre: Vec::new(),
            post: Vec::new(),
            inhibitors: Vec::new(),
        });
        TransId(self.transitions.len() - 1)
    }

    pub fn input(&mut self, p: PlaceId, t: TransId, weight: u64) {
        self.transitions[t.0].pre.push((p, weight));
    }

    pub fn output(&mut self, t: TransId, p: PlaceId, weight: u64) {
        self.transitions[t.0].post.push((p, weight));
    }

    pub fn inhibitor(&mut self, p: PlaceId, t: TransId, weight: u64) {
        self.transitions[t.0].inhibitors.push((p, weight));
    }

    pub fn build(self) -> Result<Net<S>, NetError> {
        let mut seen = std::collections::HashSet::new();
        for name in self.places.iter().chain(self.transitions.iter().map(|t| &t.name)) {
            if !seen.insert(name.clone()) {
                return Err(NetError::DuplicateName(name.clone()));
            }
        }
        for t in &self.transitions {
            if t.tmin.is_negative() {
                return Err(NetError::NegativeTmin(t.name.clone()));
            }
            if let Bound::Finite(max) = &t.tmax {
                if &t.tmin > max {
                    return Err(NetError::EmptyInterval(t.name.clone()));
                }
            }
            for (_, w) in t.pre.iter().chain(&t.post).chain(&t.inhibitors) {
                if *w == 0 {
                    return Err(NetError::ZeroWeight(t.name.clone()));
                }
            }
        }
        Ok(Net {
            places: self.places,
            transitions: self.transitions,
            initial: Marking::new(self.tokens),
        })
    }
}

impl<S: Scalar> Default for NetBuilder<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Net<S> {
    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len()).map(PlaceId)
    }

    pub fn transitions(&self) -> impl Iterator<Item = TransId> {
        (0..self.transitions.len()).map(TransId)
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.0]
    }

    pub fn transition_name(&self, t: TransId) -> &str {
        &self.transitions[t.0].name
    }

    pub fn transition_by_name(&self, name: &str) -> Option<TransId> {
        self.transitions.iter().position(|t| t.name == name).map(TransId)
    }

    pub fn place_by_name(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p == name).map(PlaceId)
    }

    pub fn transition(&self, t: TransId) -> &Transition<S> {
        &self.transitions[t.0]
    }

    pub fn tmin(&self, t: TransId) -> &S {
        &self.transitions[t.0].tmin
    }

    pub fn tmax(&self, t: TransId) -> &Bound<S> {
        &self.transitions[t.0].tmax
    }

    pub fn initial_marking(&self) -> Marking {
        self.initial.clone()
    }

    /// Backward incidence B(p, t).
    pub fn b(&self, p: PlaceId, t: TransId) -> u64 {
        self.transitions[t.0]
            .pre
            .iter()
            .filter(|(q, _)| *q == p)
            .map(|(_, w)| *w)
            .sum()
    }

    /// Forward incidence F(p, t).
    pub fn f(&self, p: PlaceId, t: TransId) -> u64 {
        self.transitions[t.0]
            .post
            .iter()
            .filter(|(q, _)| *q == p)
            .map(|(_, w)| *w)
            .sum()
    }

    /// Inhibitor valuation IH(p, t).
    pub fn ih(&self, p: PlaceId, t: TransId) -> u64 {
        self.transitions[t.0]
            .inhibitors
            .iter()
            .filter(|(q, _)| *q == p)
            .map(|(_, w)| *w)
            .sum()
    }

    pub fn has_inhibitors(&self) -> bool {
        self.transitions.iter().any(|t| !t.inhibitors.is_empty())
    }

    pub fn is_enabled(&self, m: &Marking, t: TransId) -> bool {
        self.transitions[t.0].pre.iter().all(|&(p, w)| m.tokens(p) >= w)
    }

    /// Te(M): transitions whose whole preset is marked, in index order.
    pub fn enabled_set(&self, m: &Marking) -> Vec<TransId> {
        self.transitions().filter(|&t| self.is_enabled(m, t)).collect()
    }

    /// Enabled with some satisfied inhibitor arc (0 < IH(p,t) <= M(p)).
    pub fn is_inhibited(&self, m: &Marking, t: TransId) -> bool {
        self.is_enabled(m, t)
            && self.transitions[t.0]
                .inhibitors
                .iter()
                .any(|&(p, w)| m.tokens(p) >= w)
    }

    pub fn is_activated(&self, m: &Marking, t: TransId) -> bool {
        self.is_enabled(m, t) && !self.is_inhibited(m, t)
    }

    /// Splits Te(M) into (Ta(M), Ti(M)); the two sets partition Te(M).
    pub fn split_status(&self, m: &Marking) -> (Vec<TransId>, Vec<TransId>) {
        let mut activated = Vec::new();
        let mut inhibited = Vec::new();
        for t in self.enabled_set(m) {
            if self.is_inhibited(m, t) {
                inhibited.push(t);
            } else {
                activated.push(t);
            }
        }
        (activated, inhibited)
    }

    /// True iff some place cannot supply both presets at once.
    ///
    /// Contract: both transitions enabled for `m` and distinct.
    pub fn conflicting(&self, m: &Marking, t1: TransId, t2: TransId) -> bool {
        assert!(t1 != t2, "conflict test needs distinct transitions");
        assert!(
            self.is_enabled(m, t1) && self.is_enabled(m, t2),
            "conflict test needs enabled transitions"
        );
        self.places()
            .any(|p| self.b(p, t1) + self.b(p, t2) > m.tokens(p))
    }

    /// Fires `t`: consumes B(., t), produces F(., t).
    ///
    /// Contract: `t` enabled for `m`.
    pub fn fire_marking(&self, m: &Marking, t: TransId) -> Marking {
        assert!(self.is_enabled(m, t), "firing a non-enabled transition");
        let mut tokens: Vec<u64> = (0..m.len()).map(|i| m.tokens(PlaceId(i))).collect();
        for &(p, w) in &self.transitions[t.0].pre {
            tokens[p.0] -= w;
        }
        for &(p, w) in &self.transitions[t.0].post {
            tokens[p.0] += w;
        }
        Marking::new(tokens)
    }

    /// New(M↑) after firing `t_f` from `m`: transitions enabled for `m_next`
    /// that were disabled for `m`, or enabled for both but in conflict with
    /// `t_f` at `m`. The fired transition itself, if still enabled, is newly
    /// enabled (its clock restarts).
    pub fn newly_enabled(&self, m: &Marking, t_f: TransId, m_next: &Marking) -> Vec<TransId> {
        self.enabled_set(m_next)
            .into_iter()
            .filter(|&t| {
                t == t_f || !self.is_enabled(m, t) || self.conflicting(m, t, t_f)
            })
            .collect()
    }

    /// Enabled transitions of `m_next` that are not newly enabled.
    pub fn persistent(&self, m: &Marking, t_f: TransId, m_next: &Marking) -> Vec<TransId> {
        let new = self.newly_enabled(m, t_f, m_next);
        self.enabled_set(m_next)
            .into_iter()
            .filter(|t| !new.contains(t))
            .collect()
    }

    /// Renders a marking as a comma-separated place list (`p1,p3,p4`),
    /// with `*n` suffixes for multiplicities above one.
    pub fn display_marking(&self, m: &Marking) -> String {
        let mut parts = Vec::new();
        for (p, n) in m.iter() {
            match n {
                0 => {}
                1 => parts.push(self.place_name(p).to_string()),
                n => parts.push(format!("{}*{}", self.place_name(p), n)),
            }
        }
        if parts.is_empty() {
            "-".to_string()
        } else {
            parts.join(",")
        }
    }
}
