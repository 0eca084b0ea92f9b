//! Reachability primitives: `δ` on sets, unobservable reach `UR`, observable
//! reach `R`, observable events `T_o`, and secret-avoiding reach.
//!
//! All closures are least fixpoints over a visited set, so unobservable cycles
//! are fine. `R` and the secret-avoiding reach both distribute over union, so
//! the per-state results are tabulated once per model and set queries are
//! unions of table rows.

use std::collections::VecDeque;

use thiserror::Error;

use crate::model::Nfa;
use crate::stateset::{EventId, StateId, StateSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReachError {
    #[error("event \"{0}\" is not observable")]
    NotObservable(String),
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ReachTables {
    ur: Vec<StateSet>,
    ur_nonsecret: Vec<StateSet>,
    // indexed [state][event]; rows for unobservable events stay empty
    obs: Vec<Vec<StateSet>>,
    avoid: Vec<Vec<StateSet>>,
}

impl ReachTables {
    pub(crate) fn build(nfa: &Nfa) -> Self {
        let all = nfa.all_states();
        let ur: Vec<StateSet> = nfa
            .states()
            .map(|s| silent_closure(nfa, &StateSet::singleton(s), &all))
            .collect();
        let ur_nonsecret: Vec<StateSet> = nfa
            .states()
            .map(|s| silent_closure(nfa, &StateSet::singleton(s), nfa.nonsecret()))
            .collect();
        let mut obs = vec![vec![StateSet::new(); nfa.num_events()]; nfa.num_states()];
        let mut avoid = obs.clone();
        for s in nfa.states() {
            for e in nfa.observable_events() {
                let pre = &ur[s.index()];
                let mut post = StateSet::new();
                for x in step(nfa, pre, e).iter() {
                    post.union_with(&ur[x.index()]);
                }
                obs[s.index()][e.index()] = post;

                let pre = &ur_nonsecret[s.index()];
                let mut post = StateSet::new();
                for x in step(nfa, pre, e).intersection(nfa.nonsecret()).iter() {
                    post.union_with(&ur_nonsecret[x.index()]);
                }
                avoid[s.index()][e.index()] = post;
            }
        }
        ReachTables {
            ur,
            ur_nonsecret,
            obs,
            avoid,
        }
    }
}

/// Fixpoint over unobservable transitions starting at `from`, entering only
/// states in `allowed`. Members of `from` are always kept.
fn silent_closure(nfa: &Nfa, from: &StateSet, allowed: &StateSet) -> StateSet {
    let mut seen = from.clone();
    let mut queue: VecDeque<StateId> = from.iter().collect();
    while let Some(s) = queue.pop_front() {
        for e in nfa.unobservable_events() {
            for &t in nfa.successors(s, e) {
                if allowed.contains(t) && seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
    }
    seen
}

/// `δ(from, e)`: union of `e`-successors. May be empty.
pub fn step(nfa: &Nfa, from: &StateSet, e: EventId) -> StateSet {
    let mut out = StateSet::new();
    for s in from.iter() {
        out.extend(nfa.successors(s, e).iter().copied());
    }
    out
}

/// `UR(from)`: states reachable through unobservable events only.
pub fn unobservable_reach(nfa: &Nfa, from: &StateSet) -> StateSet {
    let mut out = StateSet::new();
    for s in from.iter() {
        out.union_with(&nfa.tables.ur[s.index()]);
    }
    out
}

/// Unobservable reach in which every state entered is nonsecret. The sources
/// themselves are not filtered.
pub fn nonsecret_unobservable_reach(nfa: &Nfa, from: &StateSet) -> StateSet {
    let mut out = StateSet::new();
    for s in from.iter() {
        out.union_with(&nfa.tables.ur_nonsecret[s.index()]);
    }
    out
}

fn require_observable(nfa: &Nfa, e: EventId) -> Result<(), ReachError> {
    if nfa.is_observable(e) {
        Ok(())
    } else {
        Err(ReachError::NotObservable(nfa.event(e).name.clone()))
    }
}

/// `R(from, e_o)`: states reachable by some `s` with `P(s) = e_o`.
pub fn observable_reach(nfa: &Nfa, from: &StateSet, e: EventId) -> Result<StateSet, ReachError> {
    require_observable(nfa, e)?;
    Ok(observable_reach_unchecked(nfa, from, e))
}

pub(crate) fn observable_reach_unchecked(nfa: &Nfa, from: &StateSet, e: EventId) -> StateSet {
    let mut out = StateSet::new();
    for s in from.iter() {
        out.union_with(&nfa.tables.obs[s.index()][e.index()]);
    }
    out
}

/// `T_o` lifted to sets: observable events with nonempty observable reach.
pub fn observable_events_at(nfa: &Nfa, from: &StateSet) -> Vec<EventId> {
    nfa.observable_events()
        .filter(|&e| {
            from.iter()
                .any(|s| !nfa.tables.obs[s.index()][e.index()].is_empty())
        })
        .collect()
}

/// States reachable from `from` by a string projecting to `e_o` whose every
/// post-event state is nonsecret.
///
/// The source states are not filtered; callers that need the nonsecret
/// restriction on the source pass a subset of `X_NS`.
pub fn secret_avoiding_reach(
    nfa: &Nfa,
    from: &StateSet,
    e: EventId,
) -> Result<StateSet, ReachError> {
    require_observable(nfa, e)?;
    Ok(secret_avoiding_reach_unchecked(nfa, from, e))
}

pub(crate) fn secret_avoiding_reach_unchecked(nfa: &Nfa, from: &StateSet, e: EventId) -> StateSet {
    let mut out = StateSet::new();
    for s in from.iter() {
        out.union_with(&nfa.tables.avoid[s.index()][e.index()]);
    }
    out
}
