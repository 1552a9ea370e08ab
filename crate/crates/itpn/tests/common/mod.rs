//! Shared test machinery: a seeded random-net generator and the
//! independent oracles the property and acceptance suites check against.

#![allow(dead_code)]

use itpn::dbm::{beta, firable_dbm, initial_dbm, successor_dbm, DbmClass, DbmIndex, DbmMatrix};
use itpn::net::{Net, NetBuilder, TransId};
use itpn::poly::{
    exact_successor, firable_exact, initial_exact, trace_initial, trace_step, ExactClass,
    PolyError, TraceSystem,
};
use itpn::scalar::{int, Bound, Scalar};
use itpn::tdis::{class_successor, firable_tdis, initial_tdis, TdisClass};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Shape of generated nets.
#[derive(Clone, Copy)]
pub struct NetGen {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_bound: i64,
    pub max_inhibitors: usize,
    pub allow_inf: bool,
}

impl Default for NetGen {
    fn default() -> Self {
        NetGen {
            max_places: 6,
            max_transitions: 6,
            max_bound: 5,
            max_inhibitors: 2,
            allow_inf: false,
        }
    }
}

/// Deterministic random net for one seed.
pub fn random_net<S: Scalar>(seed: u64, cfg: &NetGen) -> Net<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetBuilder::<S>::new();
    let np = rng.gen_range(2..=cfg.max_places.max(2));
    let nt = rng.gen_range(2..=cfg.max_transitions.max(2));
    let places: Vec<_> = (0..np)
        .map(|i| b.place(&format!("p{i}"), rng.gen_range(0..=2)))
        .collect();
    for i in 0..nt {
        let tmin = rng.gen_range(0..=cfg.max_bound);
        let tmax = if cfg.allow_inf && rng.gen_bool(0.15) {
            Bound::Infinity
        } else {
            Bound::Finite(int(rng.gen_range(tmin..=cfg.max_bound)))
        };
        let t = b.transition(&format!("t{i}"), int(tmin), tmax);
        let inputs = rng.gen_range(1..=2.min(np));
        let mut used = Vec::new();
        for _ in 0..inputs {
            let p = places[rng.gen_range(0..np)];
            if !used.contains(&p) {
                used.push(p);
                let w = if rng.gen_bool(0.1) { 2 } else { 1 };
                b.input(p, t, w);
            }
        }
        let outputs = rng.gen_range(0..=2.min(np));
        let mut produced = Vec::new();
        for _ in 0..outputs {
            let p = places[rng.gen_range(0..np)];
            if !produced.contains(&p) {
                produced.push(p);
                b.output(t, p, 1);
            }
        }
    }
    let mut inhibited = Vec::new();
    for _ in 0..cfg.max_inhibitors {
        if rng.gen_bool(0.7) {
            let p = places[rng.gen_range(0..np)];
            let t = TransId(rng.gen_range(0..nt));
            if !inhibited.contains(&(p, t)) {
                inhibited.push((p, t));
                b.inhibitor(p, t, 1);
            }
        }
    }
    b.build().expect("generated net is well-formed")
}

/// Floyd–Warshall shortest-path closure of a DBM, the oracle for the
/// "successors need no further normalization" claim.
pub fn fw_closure<S: Scalar>(m: &DbmMatrix<S>) -> DbmMatrix<S> {
    let dim = m.dim();
    let mut out = m.clone();
    for k in 0..dim {
        for x in 0..dim {
            for y in 0..dim {
                let via = out.get_pos(x, k).clone() + out.get_pos(k, y).clone();
                if via < *out.get_pos(x, y) {
                    out.set_pos(x, y, via);
                }
            }
        }
    }
    out
}

/// Walks every exact-firable sequence up to `depth`, visiting each with
/// its class and trace system.
pub fn walk_exact<S: Scalar, F>(net: &Net<S>, depth: usize, visit: &mut F) -> Result<(), PolyError>
where
    F: FnMut(&[TransId], &ExactClass<S>, &TraceSystem<S>) -> Result<(), PolyError>,
{
    fn rec<S: Scalar, F>(
        net: &Net<S>,
        depth: usize,
        labels: &mut Vec<TransId>,
        class: &ExactClass<S>,
        trace: &TraceSystem<S>,
        visit: &mut F,
    ) -> Result<(), PolyError>
    where
        F: FnMut(&[TransId], &ExactClass<S>, &TraceSystem<S>) -> Result<(), PolyError>,
    {
        visit(labels, class, trace)?;
        if labels.len() == depth {
            return Ok(());
        }
        for t in net.transitions() {
            if firable_exact(net, class, t)? {
                let next = exact_successor(net, class, t)?;
                let tr = trace_step(net, trace, t)?;
                labels.push(t);
                rec(net, depth, labels, &next, &tr, visit)?;
                labels.pop();
            }
        }
        Ok(())
    }
    let class = initial_exact(net)?;
    let trace = trace_initial(net)?;
    rec(net, depth, &mut Vec::new(), &class, &trace, visit)
}

/// Walks every tdis-firable sequence up to `depth` with the classes along
/// the path (`classes[k]` is reached after `labels[..k]`).
pub fn walk_tdis<S: Scalar, F>(net: &Net<S>, depth: usize, visit: &mut F)
where
    F: FnMut(&[TransId], &[TdisClass<S>]),
{
    fn rec<S: Scalar, F>(
        net: &Net<S>,
        depth: usize,
        labels: &mut Vec<TransId>,
        classes: &mut Vec<TdisClass<S>>,
        visit: &mut F,
    ) where
        F: FnMut(&[TransId], &[TdisClass<S>]),
    {
        visit(labels, classes);
        if labels.len() == depth {
            return;
        }
        for t in net.transitions() {
            let current = classes.last().unwrap().clone();
            if firable_tdis(net, &current, t) {
                classes.push(class_successor(net, &current, t));
                labels.push(t);
                rec(net, depth, labels, classes, visit);
                labels.pop();
                classes.pop();
            }
        }
    }
    let mut classes = vec![initial_tdis(net)];
    rec(net, depth, &mut Vec::new(), &mut classes, visit)
}

/// Walks every dbm-firable sequence up to `depth` with the classes along.
pub fn walk_dbm<S: Scalar, F>(net: &Net<S>, depth: usize, visit: &mut F)
where
    F: FnMut(&[TransId], &[DbmClass<S>]),
{
    fn rec<S: Scalar, F>(
        net: &Net<S>,
        depth: usize,
        labels: &mut Vec<TransId>,
        classes: &mut Vec<DbmClass<S>>,
        visit: &mut F,
    ) where
        F: FnMut(&[TransId], &[DbmClass<S>]),
    {
        visit(labels, classes);
        if labels.len() == depth {
            return;
        }
        for t in net.transitions() {
            let current = classes.last().unwrap().clone();
            if firable_dbm(net, &current, t) {
                classes.push(successor_dbm(net, &current, t));
                labels.push(t);
                rec(net, depth, labels, classes, visit);
                labels.pop();
                classes.pop();
            }
        }
    }
    let mut classes = vec![initial_dbm(net)];
    rec(net, depth, &mut Vec::new(), &mut classes, visit)
}

/// Checks the approximation chain on one class triple: every bound of the
/// tight exact DBM is at most the tdis bound, which is at most the plain
/// DBM bound. Returns a description of the first violation.
pub fn check_matrix_chain<S: Scalar>(
    net: &Net<S>,
    exact_tight: &DbmMatrix<S>,
    tdis: &TdisClass<S>,
    dbm: &DbmClass<S>,
) -> Result<(), String> {
    let trans = dbm.matrix.transitions().to_vec();
    for &t in &trans {
        let e_up = exact_tight.get(DbmIndex::Entry, DbmIndex::Trans(t));
        let e_lo = exact_tight.get(DbmIndex::Trans(t), DbmIndex::Entry);
        let c_up = tdis.upper(t);
        let c_lo = tdis.lower(t);
        let d_up = dbm.matrix.get(DbmIndex::Entry, DbmIndex::Trans(t));
        let d_lo = dbm.matrix.get(DbmIndex::Trans(t), DbmIndex::Entry);
        if !(e_up <= c_up && c_up <= d_up) {
            return Err(format!(
                "upper bound of {}: exact {e_up} / tdis {c_up} / dbm {d_up}",
                net.transition_name(t)
            ));
        }
        if !(e_lo <= c_lo && c_lo <= d_lo) {
            return Err(format!(
                "lower bound of {}: exact {e_lo} / tdis {c_lo} / dbm {d_lo}",
                net.transition_name(t)
            ));
        }
        for &u in &trans {
            if t == u {
                continue;
            }
            let e = exact_tight.get(DbmIndex::Trans(t), DbmIndex::Trans(u));
            let c = tdis.dc.get(t, u);
            let d = dbm.matrix.get(DbmIndex::Trans(t), DbmIndex::Trans(u));
            if !(e <= c && c <= d) {
                return Err(format!(
                    "pair ({},{}): exact {e} / tdis {c} / dbm {d}",
                    net.transition_name(t),
                    net.transition_name(u)
                ));
            }
        }
    }
    Ok(())
}

/// Positions `(i, j)` such that `seq[i] = start` and `seq[j]` is the first
/// `end` after it.
pub fn windows_of(seq: &[TransId], start: TransId, end: TransId) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &t) in seq.iter().enumerate() {
        if t == start {
            if let Some(j) = seq[i + 1..].iter().position(|&u| u == end) {
                out.push((i, i + 1 + j));
            }
        }
    }
    out
}

/// Duration bounds of the subsequence `(i+1..=j)` measured on the plain
/// DBM graph: per-step delay intervals summed up.
pub fn dbm_window_bounds<S: Scalar>(
    net: &Net<S>,
    classes: &[DbmClass<S>],
    seq: &[TransId],
    i: usize,
    j: usize,
) -> (S, Bound<S>) {
    let mut lo = S::zero();
    let mut hi = Bound::zero();
    for k in i + 1..=j {
        let class = &classes[k - 1];
        let t_f = seq[k - 1];
        let step_lo = -class
            .matrix
            .get(DbmIndex::Trans(t_f), DbmIndex::Entry)
            .expect_finite()
            .clone();
        let b = beta(net, class);
        lo = lo + step_lo;
        hi = hi + b[0].clone();
    }
    (lo, hi)
}

/// Exact duration bounds of the subsequence `(i+1..=j)` of a trace:
/// the tight range of the corresponding delay sum.
pub fn exact_window_bounds<S: Scalar>(
    trace: &TraceSystem<S>,
    i: usize,
    j: usize,
) -> Result<(S, Bound<S>), PolyError> {
    use itpn::poly::Var;
    let terms: Vec<(Var, S)> = (i + 1..=j).map(|k| (Var::Delay(k as u32), S::one())).collect();
    let neg: Vec<(Var, S)> = terms.iter().map(|(v, c)| (*v, -c.clone())).collect();
    let hi = trace.system.sup(&terms)?;
    let lo = -trace.system.sup(&neg)?.expect_finite().clone();
    Ok((lo, hi))
}

pub fn seq_names<S: Scalar>(net: &Net<S>, seq: &[TransId]) -> String {
    seq.iter()
        .map(|&t| net.transition_name(t))
        .collect::<Vec<_>>()
        .join(",")
}

/// Random inequality system over `Delay` variables for projection tests.
pub fn random_system<S: Scalar>(seed: u64) -> itpn::poly::LinearSystem<S> {
    use itpn::poly::{LinearSystem, Var};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = rng.gen_range(2..=5usize);
    let vars: Vec<Var> = (1..=nv as u32).map(Var::Delay).collect();
    let mut sys = LinearSystem::<S>::new(vars.clone()).unwrap();
    let rows = rng.gen_range(3..=10usize);
    for _ in 0..rows {
        let terms: Vec<(Var, S)> = vars
            .iter()
            .map(|&v| (v, int::<S>(rng.gen_range(-3..=3i64))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        if terms.is_empty() {
            continue;
        }
        sys.add_row(&terms, Bound::Finite(int(rng.gen_range(-10..=10i64))))
            .unwrap();
    }
    sys
}

fn eval_rows<S: Scalar>(sys: &itpn::poly::LinearSystem<S>, point: &[S]) -> bool {
    sys.rows().iter().all(|row| {
        let lhs = row
            .coeffs
            .iter()
            .zip(point)
            .fold(S::zero(), |acc, (c, x)| acc + c.clone() * x.clone());
        match &row.bound {
            Bound::Finite(b) => &lhs <= b,
            Bound::Infinity => true,
        }
    })
}

/// Sampling oracle for one Fourier–Motzkin elimination: on `samples`
/// rational points over the remaining variables, membership in the
/// eliminated system must coincide with extensibility of the point to a
/// full solution (decided by interval intersection over the eliminated
/// variable). Returns the number of agreeing samples.
pub fn check_projection_by_sampling<S: Scalar>(
    sys: &itpn::poly::LinearSystem<S>,
    victim: itpn::poly::Var,
    samples: usize,
    seed: u64,
) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eliminated = sys.eliminate(victim).map_err(|e| e.to_string())?;
    let vpos = sys.vars().iter().position(|&v| v == victim).unwrap();
    for k in 0..samples {
        // rational sample point with denominators 1, 2 or 4
        let point: Vec<S> = (0..eliminated.vars().len())
            .map(|_| {
                let den = [1i64, 2, 4][rng.gen_range(0..3)];
                int::<S>(rng.gen_range(-24..=24i64)) / int::<S>(den)
            })
            .collect();
        let in_projection = eval_rows(&eliminated, &point);

        // extensibility: intersect the bounds every row imposes on the victim
        let mut lo: Option<S> = None;
        let mut hi: Option<S> = None;
        let mut feasible = true;
        for row in sys.rows() {
            let c = &row.coeffs[vpos];
            let mut rest = S::zero();
            let mut pi = 0;
            for (i, coeff) in row.coeffs.iter().enumerate() {
                if i == vpos {
                    continue;
                }
                rest = rest + coeff.clone() * point[pi].clone();
                pi += 1;
            }
            let Bound::Finite(b) = &row.bound else { continue };
            let slack = b.clone() - rest;
            if c.is_zero() {
                if slack.is_negative() {
                    feasible = false;
                    break;
                }
            } else if c.is_positive() {
                let limit = slack / c.clone();
                hi = Some(match hi {
                    Some(h) => h.min(limit),
                    None => limit,
                });
            } else {
                let limit = slack / c.clone();
                lo = Some(match lo {
                    Some(l) => l.max(limit),
                    None => limit,
                });
            }
        }
        let extensible = feasible
            && match (&lo, &hi) {
                (Some(l), Some(h)) => l <= h,
                _ => true,
            };
        if in_projection != extensible {
            return Err(format!(
                "sample {k}: projection says {in_projection}, interval search says {extensible}"
            ));
        }
    }
    Ok(samples)
}
