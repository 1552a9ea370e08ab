//! Exact state classes over general rational linear-inequality systems.
//!
//! This is the ground-truth oracle for both overapproximations. Classes are
//! projected with Fourier–Motzkin elimination, which is worst-case
//! exponential, so every system is kept under an explicit size budget and
//! the oracle refuses instances beyond it instead of running unbounded.

use std::collections::HashMap;

use crate::dbm::{DbmIndex, DbmMatrix};
use crate::net::{Marking, Net, TransId};
use crate::scalar::{Bound, Scalar};
use crate::tdis::{DistanceSystem, PointId, PointMaps};

/// Hard ceilings for the oracle; see [`PolyError::Budget`].
pub const MAX_VARS: usize = 24;
pub const MAX_ROWS: usize = 512;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("oracle budget exceeded ({0})")]
    Budget(&'static str),
    #[error("system is inconsistent")]
    Inconsistent,
}

pub type PolyResult<T> = Result<T, PolyError>;

/// A variable of a [`LinearSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Residual firing time of an enabled transition.
    Clock(TransId),
    /// Firing delay of the k-th step of a trace (1-based).
    Delay(u32),
    /// Scratch variable used when optimizing a linear form.
    Aux,
}

/// One inequality `Σ coeffs[i]·vars[i] <= bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row<S> {
    pub coeffs: Vec<S>,
    pub bound: Bound<S>,
}

/// A conjunction of linear inequalities over named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem<S> {
    vars: Vec<Var>,
    rows: Vec<Row<S>>,
}

impl<S: Scalar> LinearSystem<S> {
    pub fn new(vars: Vec<Var>) -> PolyResult<Self> {
        if vars.len() > MAX_VARS {
            return Err(PolyError::Budget("variables"));
        }
        Ok(LinearSystem { vars, rows: Vec::new() })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row<S>] {
        &self.rows
    }

    pub fn var_pos(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|&u| u == v)
    }

    pub fn add_var(&mut self, v: Var) -> PolyResult<usize> {
        assert!(self.var_pos(v).is_none(), "variable already present");
        if self.vars.len() + 1 > MAX_VARS {
            return Err(PolyError::Budget("variables"));
        }
        self.vars.push(v);
        for row in &mut self.rows {
            row.coeffs.push(S::zero());
        }
        Ok(self.vars.len() - 1)
    }

    /// Adds `Σ terms <= bound`; trivially true rows are dropped.
    pub fn add_row(&mut self, terms: &[(Var, S)], bound: Bound<S>) -> PolyResult<()> {
        let mut coeffs = vec![S::zero(); self.vars.len()];
        for (v, c) in terms {
            let p = self.var_pos(*v).expect("term over unknown variable");
            coeffs[p] = coeffs[p].clone() + c.clone();
        }
        self.push(Row { coeffs, bound })
    }

    fn push(&mut self, row: Row<S>) -> PolyResult<()> {
        if row.bound == Bound::Infinity {
            return Ok(());
        }
        if row.coeffs.iter().all(|c| c.is_zero()) && row.bound.is_nonnegative() {
            return Ok(());
        }
        self.rows.push(normalize(row));
        if self.rows.len() > MAX_ROWS {
            return Err(PolyError::Budget("constraints"));
        }
        Ok(())
    }

    /// Drops exact duplicates, keeping the tightest bound per coefficient
    /// vector. Full redundancy elimination is deliberately not attempted.
    fn dedup(&mut self) {
        let mut best: HashMap<Vec<S>, Bound<S>> = HashMap::new();
        let mut order: Vec<Vec<S>> = Vec::new();
        for row in self.rows.drain(..) {
            match best.get_mut(&row.coeffs) {
                Some(b) => {
                    if row.bound < *b {
                        *b = row.bound;
                    }
                }
                None => {
                    order.push(row.coeffs.clone());
                    best.insert(row.coeffs, row.bound);
                }
            }
        }
        for coeffs in order {
            let bound = best.remove(&coeffs).unwrap();
            self.rows.push(Row { coeffs, bound });
        }
    }

    /// Fourier–Motzkin elimination of one variable: the solution set of the
    /// result is the projection of the input's solution set onto the
    /// remaining variables.
    pub fn eliminate(&self, v: Var) -> PolyResult<LinearSystem<S>> {
        let pos = self.var_pos(v).expect("eliminating unknown variable");
        let mut vars = self.vars.clone();
        vars.remove(pos);
        let mut out = LinearSystem { vars, rows: Vec::new() };

        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for row in &self.rows {
            let c = &row.coeffs[pos];
            if c.is_zero() {
                let mut coeffs = row.coeffs.clone();
                coeffs.remove(pos);
                out.push(Row { coeffs, bound: row.bound.clone() })?;
            } else if c.is_positive() {
                positive.push(row);
            } else {
                negative.push(row);
            }
        }
        for p in &positive {
            for n in &negative {
                let cp = p.coeffs[pos].clone();
                let cn = -n.coeffs[pos].clone();
                // cn·p + cp·n cancels the eliminated column
                let mut coeffs = Vec::with_capacity(self.vars.len() - 1);
                for (i, (a, b)) in p.coeffs.iter().zip(&n.coeffs).enumerate() {
                    if i != pos {
                        coeffs.push(a.clone() * cn.clone() + b.clone() * cp.clone());
                    }
                }
                let bound = Bound::Finite(
                    p.bound.expect_finite().clone() * cn + n.bound.expect_finite().clone() * cp,
                );
                out.push(Row { coeffs, bound })?;
            }
        }
        out.dedup();
        if out.rows.len() > MAX_ROWS {
            return Err(PolyError::Budget("constraints"));
        }
        Ok(out)
    }

    /// Picks the remaining variable whose elimination pairs the fewest rows.
    fn cheapest_var(&self, keep: Option<Var>) -> Option<Var> {
        self.vars
            .iter()
            .copied()
            .filter(|&v| Some(v) != keep)
            .min_by_key(|&v| {
                let pos = self.var_pos(v).unwrap();
                let (mut p, mut n) = (0usize, 0usize);
                for row in &self.rows {
                    let c = &row.coeffs[pos];
                    if c.is_positive() {
                        p += 1;
                    } else if c.is_negative() {
                        n += 1;
                    }
                }
                p * n
            })
    }

    /// True iff the solution set is nonempty: eliminate every variable and
    /// check that each residual constant row `0 <= b` holds.
    pub fn is_consistent(&self) -> PolyResult<bool> {
        let mut sys = self.clone();
        loop {
            if sys.rows.iter().any(|r| {
                r.coeffs.iter().all(|c| c.is_zero()) && !r.bound.is_nonnegative()
            }) {
                return Ok(false);
            }
            match sys.cheapest_var(None) {
                Some(v) => sys = sys.eliminate(v)?,
                None => return Ok(true),
            }
        }
    }

    /// Exact supremum of `Σ terms` over the solution set.
    pub fn sup(&self, terms: &[(Var, S)]) -> PolyResult<Bound<S>> {
        let mut sys = self.clone();
        // route the form through a scratch variable and project onto it
        sys.vars.push(Var::Aux);
        for row in &mut sys.rows {
            row.coeffs.push(S::zero());
        }
        let aux = sys.vars.len() - 1;
        let mut up = vec![S::zero(); sys.vars.len()];
        let mut down = vec![S::zero(); sys.vars.len()];
        up[aux] = S::one();
        down[aux] = -S::one();
        for (v, c) in terms {
            let p = sys.var_pos(*v).expect("form over unknown variable");
            up[p] = up[p].clone() - c.clone();
            down[p] = down[p].clone() + c.clone();
        }
        sys.rows.push(Row { coeffs: up, bound: Bound::zero() });
        sys.rows.push(Row { coeffs: down, bound: Bound::zero() });

        loop {
            if sys.rows.iter().any(|r| {
                r.coeffs.iter().all(|c| c.is_zero()) && !r.bound.is_nonnegative()
            }) {
                return Err(PolyError::Inconsistent);
            }
            match sys.cheapest_var(Some(Var::Aux)) {
                Some(v) => sys = sys.eliminate(v)?,
                None => break,
            }
        }
        // the residual system bounds the scratch variable alone; an empty
        // interval here is the only inconsistency not yet caught above
        let pos = sys.var_pos(Var::Aux).unwrap();
        let mut upper = Bound::Infinity;
        let mut lower: Option<S> = None;
        for row in &sys.rows {
            let c = &row.coeffs[pos];
            if c.is_positive() {
                let b = row.bound.expect_finite().clone() / c.clone();
                upper = upper.min(Bound::Finite(b));
            } else if c.is_negative() {
                let b = row.bound.expect_finite().clone() / c.clone();
                lower = Some(match lower {
                    Some(l) => if b > l { b } else { l },
                    None => b,
                });
            }
        }
        if let (Some(l), Bound::Finite(u)) = (&lower, &upper) {
            if l > u {
                return Err(PolyError::Inconsistent);
            }
        }
        Ok(upper)
    }

    /// True iff `Σ terms <= bound` holds over the whole solution set.
    pub fn entails(&self, terms: &[(Var, S)], bound: &Bound<S>) -> PolyResult<bool> {
        match self.sup(terms) {
            Ok(s) => Ok(&s <= bound),
            Err(PolyError::Inconsistent) => Ok(true),
            Err(e) => Err(e),
        }
    }
}

/// Scales a row so its first nonzero coefficient is ±1, making duplicate
/// detection textual.
fn normalize<S: Scalar>(mut row: Row<S>) -> Row<S> {
    if let Some(scale) = row.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
        if !scale.is_one() {
            for c in &mut row.coeffs {
                *c = c.clone() / scale.clone();
            }
            row.bound = match row.bound {
                Bound::Finite(b) => Bound::Finite(b / scale),
                Bound::Infinity => Bound::Infinity,
            };
        }
    }
    row
}

/// An exact state class: marking plus the firing space of its clocks.
#[derive(Debug, Clone)]
pub struct ExactClass<S> {
    pub marking: Marking,
    pub system: LinearSystem<S>,
}

/// The initial class: one clock per enabled transition, constrained to its
/// static interval.
pub fn initial_exact<S: Scalar>(net: &Net<S>) -> PolyResult<ExactClass<S>> {
    let marking = net.initial_marking();
    let enabled = net.enabled_set(&marking);
    let mut system = LinearSystem::new(enabled.iter().map(|&t| Var::Clock(t)).collect())?;
    for &t in &enabled {
        add_static_interval(&mut system, net, t)?;
    }
    Ok(ExactClass { marking, system })
}

fn add_static_interval<S: Scalar>(
    system: &mut LinearSystem<S>,
    net: &Net<S>,
    t: TransId,
) -> PolyResult<()> {
    system.add_row(&[(Var::Clock(t), S::one())], net.tmax(t).clone())?;
    system.add_row(
        &[(Var::Clock(t), -S::one())],
        Bound::Finite(-net.tmin(t).clone()),
    )
}

/// The system `D` augmented with the firing constraints of `t_f`:
/// `t_f <= t` for every activated `t`.
fn augmented<S: Scalar>(
    net: &Net<S>,
    class: &ExactClass<S>,
    t_f: TransId,
) -> PolyResult<LinearSystem<S>> {
    let mut sys = class.system.clone();
    let (activated, _) = net.split_status(&class.marking);
    for t in activated {
        if t != t_f {
            sys.add_row(
                &[(Var::Clock(t_f), S::one()), (Var::Clock(t), -S::one())],
                Bound::zero(),
            )?;
        }
    }
    Ok(sys)
}

/// Firing test: `t_f` activated and the augmented system consistent.
pub fn firable_exact<S: Scalar>(
    net: &Net<S>,
    class: &ExactClass<S>,
    t_f: TransId,
) -> PolyResult<bool> {
    if !net.is_activated(&class.marking, t_f) {
        return Ok(false);
    }
    augmented(net, class, t_f)?.is_consistent()
}

/// Exact successor: substitute persistent clocks (shifted for activated
/// ones, untouched for inhibited ones), project out the fired and disabled
/// clocks, then add static intervals for the newly enabled ones.
pub fn exact_successor<S: Scalar>(
    net: &Net<S>,
    class: &ExactClass<S>,
    t_f: TransId,
) -> PolyResult<ExactClass<S>> {
    let mut sys = augmented(net, class, t_f)?;
    let m_next = net.fire_marking(&class.marking, t_f);
    let new_set = net.newly_enabled(&class.marking, t_f, &m_next);
    let persistent: Vec<TransId> = net
        .enabled_set(&m_next)
        .into_iter()
        .filter(|t| !new_set.contains(t))
        .collect();

    // time shift: activated persistent t becomes t_f + t'
    let tf_pos = sys.var_pos(Var::Clock(t_f)).expect("fired clock present");
    for &t in &persistent {
        if net.is_activated(&class.marking, t) {
            let p = sys.var_pos(Var::Clock(t)).unwrap();
            for row in &mut sys.rows {
                let c = row.coeffs[p].clone();
                row.coeffs[tf_pos] = row.coeffs[tf_pos].clone() + c;
            }
        }
    }
    // project out the fired clock and every clock that did not persist
    for v in sys.vars.clone() {
        if let Var::Clock(t) = v {
            if !persistent.contains(&t) {
                sys = sys.eliminate(v)?;
            }
        }
    }
    for &t in &new_set {
        sys.add_var(Var::Clock(t))?;
        add_static_interval(&mut sys, net, t)?;
    }
    // keep the clock order aligned with the transition order
    let mut order: Vec<usize> = (0..sys.vars.len()).collect();
    order.sort_by_key(|&i| sys.vars[i]);
    let vars: Vec<Var> = order.iter().map(|&i| sys.vars[i]).collect();
    let rows = sys
        .rows
        .iter()
        .map(|r| Row {
            coeffs: order.iter().map(|&i| r.coeffs[i].clone()).collect(),
            bound: r.bound.clone(),
        })
        .collect();
    Ok(ExactClass { marking: m_next, system: LinearSystem { vars, rows } })
}

/// The tightest DBM containing the solution set: each entry is the exact
/// supremum of the corresponding difference.
pub fn tightest_dbm<S: Scalar>(system: &LinearSystem<S>) -> PolyResult<DbmMatrix<S>> {
    let trans: Vec<TransId> = system
        .vars()
        .iter()
        .map(|v| match v {
            Var::Clock(t) => *t,
            _ => panic!("tightest_dbm over a non-clock system"),
        })
        .collect();
    let mut m = DbmMatrix::new(trans.clone());
    for &t in &trans {
        m.set(
            DbmIndex::Entry,
            DbmIndex::Trans(t),
            system.sup(&[(Var::Clock(t), S::one())])?,
        );
        m.set(
            DbmIndex::Trans(t),
            DbmIndex::Entry,
            system.sup(&[(Var::Clock(t), -S::one())])?,
        );
        for &u in &trans {
            if u != t {
                let v = system.sup(&[(Var::Clock(u), S::one()), (Var::Clock(t), -S::one())])?;
                m.set(DbmIndex::Trans(t), DbmIndex::Trans(u), v);
            }
        }
    }
    Ok(m)
}

/// Class equality by mutual entailment of the two systems.
pub fn exact_equal<S: Scalar>(a: &ExactClass<S>, b: &ExactClass<S>) -> PolyResult<bool> {
    if a.marking != b.marking {
        return Ok(false);
    }
    Ok(included(&a.system, &b.system)? && included(&b.system, &a.system)?)
}

/// Solution-set inclusion `sol(a) ⊆ sol(b)` for classes over one marking.
pub fn exact_included<S: Scalar>(a: &ExactClass<S>, b: &ExactClass<S>) -> PolyResult<bool> {
    if a.marking != b.marking {
        return Ok(false);
    }
    included(&a.system, &b.system)
}

fn included<S: Scalar>(a: &LinearSystem<S>, b: &LinearSystem<S>) -> PolyResult<bool> {
    for row in b.rows() {
        let terms: Vec<(Var, S)> = b
            .vars()
            .iter()
            .zip(&row.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| (*v, c.clone()))
            .collect();
        if !a.entails(&terms, &row.bound)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A linear system accumulated along one firing sequence, keeping one delay
/// variable per fired step (never eliminated) next to the current clocks.
#[derive(Debug, Clone)]
pub struct TraceSystem<S> {
    pub system: LinearSystem<S>,
    pub marking: Marking,
    pub depth: u32,
}

pub fn trace_initial<S: Scalar>(net: &Net<S>) -> PolyResult<TraceSystem<S>> {
    let initial = initial_exact(net)?;
    Ok(TraceSystem { system: initial.system, marking: initial.marking, depth: 0 })
}

/// Extends the trace by firing `t_f`: the fired clock is renamed to the
/// step's delay variable instead of being projected out.
pub fn trace_step<S: Scalar>(net: &Net<S>, tr: &TraceSystem<S>, t_f: TransId) -> PolyResult<TraceSystem<S>> {
    assert!(net.is_activated(&tr.marking, t_f), "fired transition not activated");
    let mut sys = tr.system.clone();
    let depth = tr.depth + 1;
    let (activated, _) = net.split_status(&tr.marking);
    for &t in &activated {
        if t != t_f {
            sys.add_row(
                &[(Var::Clock(t_f), S::one()), (Var::Clock(t), -S::one())],
                Bound::zero(),
            )?;
        }
    }
    let m_next = net.fire_marking(&tr.marking, t_f);
    let new_set = net.newly_enabled(&tr.marking, t_f, &m_next);
    let persistent: Vec<TransId> = net
        .enabled_set(&m_next)
        .into_iter()
        .filter(|t| !new_set.contains(t))
        .collect();

    // the fired clock becomes this step's delay
    let tf_pos = sys.var_pos(Var::Clock(t_f)).expect("fired clock present");
    sys.vars[tf_pos] = Var::Delay(depth);
    for &t in &persistent {
        if activated.contains(&t) {
            let p = sys.var_pos(Var::Clock(t)).unwrap();
            for row in &mut sys.rows {
                let c = row.coeffs[p].clone();
                row.coeffs[tf_pos] = row.coeffs[tf_pos].clone() + c;
            }
        }
    }
    for v in sys.vars.clone() {
        if let Var::Clock(t) = v {
            if !persistent.contains(&t) {
                sys = sys.eliminate(v)?;
            }
        }
    }
    for &t in &new_set {
        sys.add_var(Var::Clock(t))?;
        add_static_interval(&mut sys, net, t)?;
    }
    Ok(TraceSystem { system: sys, marking: m_next, depth })
}

/// The exact time-distance coefficients of a trace: each entry is the tight
/// bound of a sum of step delays, optionally plus one clock, over the trace
/// system. Points follow the same bookkeeping as the approximated engine.
pub fn exact_ds<S: Scalar>(
    net: &Net<S>,
    tr: &TraceSystem<S>,
    points: &PointMaps,
) -> PolyResult<DistanceSystem<S>> {
    let n = tr.depth;
    let enabled = net.enabled_set(&tr.marking);
    let mut ds = DistanceSystem::empty(points.point_set(), n);
    let delays = |i: PointId| -> Vec<(Var, S)> {
        (i + 1..=n).map(|k| (Var::Delay(k), S::one())).collect()
    };
    for i in ds.indices() {
        let base = delays(i);
        let neg: Vec<(Var, S)> = base.iter().map(|(v, c)| (*v, -c.clone())).collect();
        ds.set_up_n(i, tr.system.sup(&base)?);
        ds.set_lo_n(i, tr.system.sup(&neg)?);
        for &t in &enabled {
            let mut up = base.clone();
            up.push((Var::Clock(t), S::one()));
            let lo: Vec<(Var, S)> = up.iter().map(|(v, c)| (*v, -c.clone())).collect();
            ds.set_up(i, t, tr.system.sup(&up)?);
            ds.set_lo(t, i, tr.system.sup(&lo)?);
        }
    }
    Ok(ds)
}

/// Checks that the concrete delays of a timed run satisfy the exact class
/// systems along the way: each step substitutes its delay and projects out
/// the disabled clocks; the run is valid iff every intermediate system
/// stays consistent.
pub fn run_satisfies_trace<S: Scalar>(net: &Net<S>, steps: &[(TransId, S)]) -> PolyResult<bool> {
    let mut class = initial_exact(net)?;
    for (t_f, delay) in steps {
        if !net.is_activated(&class.marking, *t_f) {
            return Ok(false);
        }
        let mut sys = augmented(net, &class, *t_f)?;
        let m_next = net.fire_marking(&class.marking, *t_f);
        let new_set = net.newly_enabled(&class.marking, *t_f, &m_next);
        let persistent: Vec<TransId> = net
            .enabled_set(&m_next)
            .into_iter()
            .filter(|t| !new_set.contains(t))
            .collect();
        // substitute the concrete delay: activated persistent clocks shift
        // by it, the fired clock becomes it
        let tf_pos = sys.var_pos(Var::Clock(*t_f)).unwrap();
        for &t in &persistent {
            if net.is_activated(&class.marking, t) {
                let p = sys.var_pos(Var::Clock(t)).unwrap();
                for row in &mut sys.rows {
                    let c = row.coeffs[p].clone();
                    row.coeffs[tf_pos] = row.coeffs[tf_pos].clone() + c;
                }
            }
        }
        for row in &mut sys.rows {
            let c = row.coeffs[tf_pos].clone();
            if !c.is_zero() {
                row.bound = match &row.bound {
                    Bound::Finite(b) => Bound::Finite(b.clone() - c.clone() * delay.clone()),
                    Bound::Infinity => Bound::Infinity,
                };
                row.coeffs[tf_pos] = S::zero();
            }
        }
        sys = sys.eliminate(Var::Clock(*t_f))?;
        for v in sys.vars.clone() {
            if let Var::Clock(t) = v {
                if !persistent.contains(&t) {
                    sys = sys.eliminate(v)?;
                }
            }
        }
        for &t in &new_set {
            sys.add_var(Var::Clock(t))?;
            add_static_interval(&mut sys, net, t)?;
        }
        if !sys.is_consistent()? {
            return Ok(false);
        }
        class = ExactClass { marking: m_next, system: sys };
    }
    Ok(true)
}
