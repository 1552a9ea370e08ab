//! Concrete dense-time simulator.
//!
//! States carry one residual-time interval per enabled transition. Time
//! advances only for activated transitions; the interval of an inhibited
//! transition is left untouched until the inhibitor is released.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::net::{Marking, Net, TransId};
use crate::scalar::{int, ratio, Bound, Scalar};

/// A reachable state of the underlying labeled transition system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteState<S> {
    pub marking: Marking,
    /// `t -> [x(t), y(t)]` for every enabled `t`.
    pub intervals: BTreeMap<TransId, (S, Bound<S>)>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SimError {
    #[error("transition is not activated")]
    NotActivated,
    #[error("delay outside the firable window")]
    DelayOutOfWindow,
}

/// The initial state: static intervals for every initially enabled transition.
pub fn initial_state<S: Scalar>(net: &Net<S>) -> ConcreteState<S> {
    let marking = net.initial_marking();
    let intervals = net
        .enabled_set(&marking)
        .into_iter()
        .map(|t| (t, (net.tmin(t).clone(), net.tmax(t).clone())))
        .collect();
    ConcreteState { marking, intervals }
}

/// Latest instant at which time may progress from `s`: MIN over activated
/// transitions of their upper bounds. `None` when nothing is activated.
pub fn max_delay<S: Scalar>(net: &Net<S>, s: &ConcreteState<S>) -> Option<Bound<S>> {
    let (activated, _) = net.split_status(&s.marking);
    activated
        .iter()
        .map(|t| s.intervals[t].1.clone())
        .min()
}

/// Fires `t_f` after `delay` time units.
///
/// Persistent activated transitions have their interval shifted by the
/// delay (lower bound clamped at zero), persistent inhibited ones keep it
/// unchanged, newly enabled ones get their static interval.
pub fn sim_step<S: Scalar>(
    net: &Net<S>,
    s: &ConcreteState<S>,
    t_f: TransId,
    delay: &S,
) -> Result<ConcreteState<S>, SimError> {
    if !net.is_activated(&s.marking, t_f) {
        return Err(SimError::NotActivated);
    }
    let (x_f, _) = &s.intervals[&t_f];
    let cap = max_delay(net, s).expect("activated set nonempty");
    if delay < x_f || Bound::Finite(delay.clone()) > cap {
        return Err(SimError::DelayOutOfWindow);
    }

    let m_next = net.fire_marking(&s.marking, t_f);
    let new = net.newly_enabled(&s.marking, t_f, &m_next);
    let mut intervals = BTreeMap::new();
    for t in net.enabled_set(&m_next) {
        let interval = if new.contains(&t) {
            (net.tmin(t).clone(), net.tmax(t).clone())
        } else if net.is_activated(&s.marking, t) {
            let (x, y) = &s.intervals[&t];
            let shifted_low = x.clone() - delay.clone();
            let low = if shifted_low.is_negative() { S::zero() } else { shifted_low };
            let high = match y {
                Bound::Finite(v) => Bound::Finite(v.clone() - delay.clone()),
                Bound::Infinity => Bound::Infinity,
            };
            (low, high)
        } else {
            s.intervals[&t].clone()
        };
        intervals.insert(t, interval);
    }
    Ok(ConcreteState { marking: m_next, intervals })
}

/// A timed firing sequence; `deadlocked` marks runs cut short because no
/// transition was firable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedRun<S> {
    pub steps: Vec<(TransId, S)>,
    pub deadlocked: bool,
}

/// Generates a random timed run of up to `len` steps, deterministic in the
/// seed. Delays are rationals with denominator 8 drawn uniformly from the
/// legal window (windows with an infinite upper end are capped four units
/// above their lower end before sampling).
pub fn random_run<S: Scalar>(net: &Net<S>, len: usize, seed: u64) -> TimedRun<S> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut state = initial_state(net);
    let mut steps = Vec::new();
    for _ in 0..len {
        let cap = match max_delay(net, &state) {
            Some(c) => c,
            None => return TimedRun { steps, deadlocked: true },
        };
        let candidates: Vec<TransId> = net
            .split_status(&state.marking)
            .0
            .into_iter()
            .filter(|t| Bound::Finite(state.intervals[t].0.clone()) <= cap)
            .collect();
        if candidates.is_empty() {
            return TimedRun { steps, deadlocked: true };
        }
        let t_f = candidates[rng.gen_range(0..candidates.len())];
        let lo = state.intervals[&t_f].0.clone();
        let hi = match &cap {
            Bound::Finite(v) => v.clone(),
            Bound::Infinity => lo.clone() + int(4),
        };
        // smallest and largest multiples of 1/8 inside [lo, hi]
        let eighth: S = ratio(1, 8);
        let mut k_lo = 0i64;
        while int::<S>(k_lo) * eighth.clone() < lo {
            k_lo += 1;
        }
        let mut k_hi = k_lo;
        while int::<S>(k_hi + 1) * eighth.clone() <= hi {
            k_hi += 1;
        }
        let k = rng.gen_range(k_lo..=k_hi);
        let delay = int::<S>(k) * eighth;
        state = sim_step(net, &state, t_f, &delay).expect("sampled step is legal");
        steps.push((t_f, delay));
    }
    TimedRun { steps, deadlocked: false }
}

/// Replays a timed run step by step; true iff every step is accepted.
pub fn replay<S: Scalar>(net: &Net<S>, run: &TimedRun<S>) -> bool {
    let mut state = initial_state(net);
    for (t, delay) in &run.steps {
        match sim_step(net, &state, *t, delay) {
            Ok(next) => state = next,
            Err(_) => return false,
        }
    }
    true
}
