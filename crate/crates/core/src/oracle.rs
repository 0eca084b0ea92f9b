//! Definition-level opacity checks by exhaustive exploration of observations,
//! and a seeded random model generator.
//!
//! Nothing here goes through the observer, trees, projected automata or the
//! crate's bitset reach tables: the oracle keeps its own adjacency lists and
//! works on `BTreeSet<usize>`. Observations are explored breadth-first. Each
//! explored observation carries a configuration holding exactly the sets its
//! future verdicts depend on, and configurations already seen are not expanded
//! again. When no new configuration appears before the length bound the
//! verdict covers every observation of every length and is marked exact.
//! Every reported violation is recomputed from scratch for its word before
//! being returned.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Event, ModelSpec, Nfa};
use crate::stateset::EventId;

type Set = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Longest observation explored.
    pub max_len: usize,
    /// Cap on distinct configurations; hitting it makes the verdict inexact.
    pub max_configs: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_len: 64,
            max_configs: 500_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleViolation {
    pub word: Vec<EventId>,
    /// Observation index where the exposed secret (weak) or the secret-free
    /// window (K-step strong) starts; 0 for infinite-step strong.
    pub split: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    /// No violation among the explored observations.
    pub opaque: bool,
    pub violation: Option<OracleViolation>,
    pub bound: usize,
    /// Exploration closed before the bound, so `opaque` holds for all lengths.
    /// Always true for a violation.
    pub exact: bool,
    pub configs: usize,
}

/// The model as plain adjacency lists.
struct Plain {
    observable: Vec<bool>,
    secret: Vec<bool>,
    initial: Set,
    // succ[state][event]
    succ: Vec<Vec<Vec<usize>>>,
    obs_events: Vec<usize>,
}

impl Plain {
    fn new(nfa: &Nfa) -> Self {
        let n = nfa.num_states();
        let m = nfa.num_events();
        let mut succ = vec![vec![Vec::new(); m]; n];
        for &(a, e, b) in nfa.transitions() {
            succ[a.index()][e.index()].push(b.index());
        }
        let observable: Vec<bool> = (0..m)
            .map(|e| nfa.event(EventId::new(e)).observable)
            .collect();
        Plain {
            secret: (0..n)
                .map(|s| nfa.is_secret(crate::StateId::new(s)))
                .collect(),
            initial: nfa.initial().iter().map(|s| s.index()).collect(),
            obs_events: (0..m).filter(|&e| observable[e]).collect(),
            observable,
            succ,
        }
    }

    fn nonsecret(&self, set: &Set) -> Set {
        set.iter().copied().filter(|&x| !self.secret[x]).collect()
    }

    fn secret_part(&self, set: &Set) -> Set {
        set.iter().copied().filter(|&x| self.secret[x]).collect()
    }

    /// Silent closure; with `clean`, only nonsecret targets are entered.
    fn silent(&self, set: &Set, clean: bool) -> Set {
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for (e, targets) in self.succ[x].iter().enumerate() {
                if self.observable[e] {
                    continue;
                }
                for &y in targets {
                    if (!clean || !self.secret[y]) && out.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        out
    }

    fn step(&self, set: &Set, e: usize) -> Set {
        set.iter()
            .flat_map(|&x| self.succ[x][e].iter().copied())
            .collect()
    }

    /// States reachable by a string projecting to `e`.
    fn reach(&self, set: &Set, e: usize) -> Set {
        self.silent(&self.step(&self.silent(set, false), e), false)
    }

    /// Same, restricted to runs whose states after `set` are all nonsecret.
    fn clean_reach(&self, set: &Set, e: usize) -> Set {
        let before = self.silent(set, true);
        let after = self.nonsecret(&self.step(&before, e));
        self.silent(&after, true)
    }

    fn estimates(&self, word: &[usize]) -> Vec<Set> {
        let mut out = vec![self.silent(&self.initial, false)];
        for &e in word {
            let next = self.reach(out.last().unwrap(), e);
            out.push(next);
        }
        out
    }

    fn chain(&self, start: &Set, word: &[usize], clean: bool) -> Set {
        word.iter().fold(start.clone(), |s, &e| {
            if clean {
                self.clean_reach(&s, e)
            } else {
                self.reach(&s, e)
            }
        })
    }

    /// Direct recomputation for one observation: the first split (within the
    /// last `k` observations, all splits for `None`) whose secret part
    /// survives the suffix while its nonsecret part does not.
    fn weak_split(&self, word: &[usize], k: Option<usize>) -> Option<usize> {
        let a = self.estimates(word);
        if a.last().is_none_or(|s| s.is_empty()) {
            return None;
        }
        let first = k.map_or(0, |k| word.len().saturating_sub(k));
        (first..=word.len()).find(|&j| {
            let suffix = &word[j..];
            !self
                .chain(&self.secret_part(&a[j]), suffix, false)
                .is_empty()
                && self.chain(&self.nonsecret(&a[j]), suffix, false).is_empty()
        })
    }

    /// Direct recomputation of the K-step strong condition for one
    /// observation; returns the window start when it fails.
    fn strong_window(&self, word: &[usize], k: usize) -> Option<usize> {
        let a = self.estimates(word);
        if a.last().is_none_or(|s| s.is_empty()) {
            return None;
        }
        let i = word.len().saturating_sub(k);
        let exposed = (i..=word.len()).any(|j| {
            !self
                .chain(&self.secret_part(&a[j]), &word[j..], false)
                .is_empty()
        });
        let clean = self.chain(&self.nonsecret(&a[i]), &word[i..], true);
        (exposed && clean.is_empty()).then_some(i)
    }

    fn flagged_start(&self) -> BTreeSet<(usize, bool)> {
        let start = self.initial.iter().map(|&x| (x, self.secret[x])).collect();
        self.flagged_silent(start)
    }

    fn flagged_silent(&self, set: BTreeSet<(usize, bool)>) -> BTreeSet<(usize, bool)> {
        let mut out = set.clone();
        let mut stack: Vec<(usize, bool)> = set.into_iter().collect();
        while let Some((x, b)) = stack.pop() {
            for (e, targets) in self.succ[x].iter().enumerate() {
                if self.observable[e] {
                    continue;
                }
                for &y in targets {
                    let t = (y, b || self.secret[y]);
                    if out.insert(t) {
                        stack.push(t);
                    }
                }
            }
        }
        out
    }

    fn flagged_reach(&self, set: &BTreeSet<(usize, bool)>, e: usize) -> BTreeSet<(usize, bool)> {
        let stepped = set
            .iter()
            .flat_map(|&(x, b)| self.succ[x][e].iter().map(move |&y| (y, b)))
            .map(|(y, b)| (y, b || self.secret[y]))
            .collect();
        self.flagged_silent(stepped)
    }

    fn clean_start(&self) -> Set {
        self.silent(&self.nonsecret(&self.initial), true)
    }

    /// Direct recomputation of the infinite-step strong condition.
    fn inf_strong_fails(&self, word: &[usize]) -> bool {
        let flagged = word
            .iter()
            .fold(self.flagged_start(), |f, &e| self.flagged_reach(&f, e));
        let exposed = flagged.iter().any(|&(_, b)| b);
        exposed && self.chain(&self.clean_start(), word, true).is_empty()
    }
}

/// Breadth-first exploration of observations over deduplicated
/// configurations. `advance` returns `None` when the observation leaves the
/// language; `violated` inspects a configuration.
fn explore<C: Clone + Eq + std::hash::Hash>(
    plain: &Plain,
    cfg: &OracleConfig,
    initial: C,
    advance: impl Fn(&C, usize) -> Option<C>,
    violated: impl Fn(&C, usize) -> bool,
) -> (Option<Vec<usize>>, bool, usize) {
    let mut seen: HashSet<C> = HashSet::from([initial.clone()]);
    let mut queue: VecDeque<(C, Vec<usize>)> = VecDeque::new();
    if violated(&initial, 0) {
        return (Some(Vec::new()), true, 1);
    }
    queue.push_back((initial, Vec::new()));
    let mut exact = true;
    while let Some((c, word)) = queue.pop_front() {
        if word.len() >= cfg.max_len {
            exact = false;
            continue;
        }
        for &e in &plain.obs_events {
            let Some(next) = advance(&c, e) else {
                continue;
            };
            if seen.contains(&next) {
                continue;
            }
            let mut w = word.clone();
            w.push(e);
            if violated(&next, w.len()) {
                return (Some(w), true, seen.len() + 1);
            }
            if seen.len() >= cfg.max_configs {
                exact = false;
                continue;
            }
            seen.insert(next.clone());
            queue.push_back((next, w));
        }
    }
    (None, exact, seen.len())
}

fn finish(
    cfg: &OracleConfig,
    found: (Option<Vec<usize>>, bool, usize),
    split: impl Fn(&[usize]) -> Option<usize>,
) -> OracleVerdict {
    let (word, exact, configs) = found;
    let violation = word.map(|w| {
        let s = split(&w)
            .unwrap_or_else(|| panic!("oracle reported a violation at {w:?} that does not replay"));
        OracleViolation {
            word: w.into_iter().map(EventId::new).collect(),
            split: s,
        }
    });
    OracleVerdict {
        opaque: violation.is_none(),
        violation,
        bound: cfg.max_len,
        exact,
        configs,
    }
}

/// K-step weak opacity: no observation exposes, within its last `k`
/// observations, a split whose secret part survives while its nonsecret part
/// dies.
pub fn oracle_k_step_weak(nfa: &Nfa, k: usize, cfg: &OracleConfig) -> OracleVerdict {
    let p = Plain::new(nfa);
    // (estimate, per recent split (secret chain, nonsecret chain)), oldest first
    type Conf = (Set, Vec<(Set, Set)>);
    let a0 = p.silent(&p.initial, false);
    let init: Conf = (a0.clone(), vec![(p.secret_part(&a0), p.nonsecret(&a0))]);
    let found = explore(
        &p,
        cfg,
        init,
        |(a, entries), e| {
            let a2 = p.reach(a, e);
            if a2.is_empty() {
                return None;
            }
            let mut next: Vec<(Set, Set)> = entries
                .iter()
                .map(|(s, n)| (p.reach(s, e), p.reach(n, e)))
                .collect();
            next.push((p.secret_part(&a2), p.nonsecret(&a2)));
            if next.len() > k + 1 {
                next.remove(0);
            }
            Some((a2, next))
        },
        |(_, entries), _| entries.iter().any(|(s, n)| !s.is_empty() && n.is_empty()),
    );
    finish(cfg, found, |w| p.weak_split(w, Some(k)))
}

/// Current-state opacity, the `K = 0` case of the weak check.
pub fn oracle_current_state(nfa: &Nfa, cfg: &OracleConfig) -> OracleVerdict {
    oracle_k_step_weak(nfa, 0, cfg)
}

/// Infinite-step weak opacity: the weak check with every split of every
/// observation in scope.
pub fn oracle_infinite_step_weak(nfa: &Nfa, cfg: &OracleConfig) -> OracleVerdict {
    let p = Plain::new(nfa);
    // (estimate, live (secret chain, nonsecret chain) pairs with secret chain nonempty)
    type Conf = (Set, BTreeSet<(Set, Set)>);
    let a0 = p.silent(&p.initial, false);
    let mut pairs = BTreeSet::new();
    if !p.secret_part(&a0).is_empty() {
        pairs.insert((p.secret_part(&a0), p.nonsecret(&a0)));
    }
    let found = explore(
        &p,
        cfg,
        (a0, pairs),
        |(a, pairs): &Conf, e| {
            let a2 = p.reach(a, e);
            if a2.is_empty() {
                return None;
            }
            let mut next: BTreeSet<(Set, Set)> = pairs
                .iter()
                .map(|(s, n)| (p.reach(s, e), p.reach(n, e)))
                .filter(|(s, _)| !s.is_empty())
                .collect();
            if !p.secret_part(&a2).is_empty() {
                next.insert((p.secret_part(&a2), p.nonsecret(&a2)));
            }
            Some((a2, next))
        },
        |(_, pairs), _| pairs.iter().any(|(_, n)| n.is_empty()),
    );
    finish(cfg, found, |w| p.weak_split(w, None))
}

/// K-step strong opacity: whenever a secret may have been visited within the
/// last `k` observations, some run is secret-free from the start of that
/// window to the end.
pub fn oracle_k_step_strong(nfa: &Nfa, k: usize, cfg: &OracleConfig) -> OracleVerdict {
    let p = Plain::new(nfa);
    // (estimate, per recent split (secret chain, secret-free chain)), oldest first
    type Conf = (Set, Vec<(Set, Set)>);
    let a0 = p.silent(&p.initial, false);
    let init: Conf = (a0.clone(), vec![(p.secret_part(&a0), p.nonsecret(&a0))]);
    let found = explore(
        &p,
        cfg,
        init,
        |(a, entries), e| {
            let a2 = p.reach(a, e);
            if a2.is_empty() {
                return None;
            }
            let mut next: Vec<(Set, Set)> = entries
                .iter()
                .map(|(s, c)| (p.reach(s, e), p.clean_reach(c, e)))
                .collect();
            next.push((p.secret_part(&a2), p.nonsecret(&a2)));
            if next.len() > k + 1 {
                next.remove(0);
            }
            Some((a2, next))
        },
        |(_, entries), _| entries.iter().any(|(s, _)| !s.is_empty()) && entries[0].1.is_empty(),
    );
    finish(cfg, found, |w| p.strong_window(w, k))
}

/// Infinite-step strong opacity: whenever some run has visited a secret, some
/// run from a nonsecret initial state avoids secrets throughout.
pub fn oracle_infinite_step_strong(nfa: &Nfa, cfg: &OracleConfig) -> OracleVerdict {
    let p = Plain::new(nfa);
    type Conf = (BTreeSet<(usize, bool)>, Set);
    let found = explore(
        &p,
        cfg,
        (p.flagged_start(), p.clean_start()),
        |(f, c): &Conf, e| {
            let f2 = p.flagged_reach(f, e);
            if f2.is_empty() {
                return None;
            }
            Some((f2, p.clean_reach(c, e)))
        },
        |(f, c), _| c.is_empty() && f.iter().any(|&(_, b)| b),
    );
    finish(cfg, found, |w| p.inf_strong_fails(w).then_some(0))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RandomModelError {
    #[error("a model needs at least one state")]
    NoStates,
    #[error("a model needs at least one event")]
    NoEvents,
    #[error("{0} must lie in [0, 1]")]
    Fraction(&'static str),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModelConfig {
    pub states: usize,
    pub events: usize,
    /// Probability that an event is unobservable.
    pub unobservable_fraction: f64,
    /// Probability that a state is secret.
    pub secret_fraction: f64,
    /// Expected transitions per (state, event) pair.
    pub density: f64,
    pub seed: u64,
}

/// Seeded random model. Event 0 is always observable; when the unobservable
/// fraction is positive and there are at least two events, at least one event
/// is unobservable. The initial set is never empty.
pub fn random_nfa(cfg: &RandomModelConfig) -> Result<Nfa, RandomModelError> {
    if cfg.states == 0 {
        return Err(RandomModelError::NoStates);
    }
    if cfg.events == 0 {
        return Err(RandomModelError::NoEvents);
    }
    if !(0.0..=1.0).contains(&cfg.unobservable_fraction) {
        return Err(RandomModelError::Fraction("unobservable_fraction"));
    }
    if !(0.0..=1.0).contains(&cfg.secret_fraction) {
        return Err(RandomModelError::Fraction("secret_fraction"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let states: Vec<String> = (0..cfg.states).map(|i| i.to_string()).collect();

    let mut observable: Vec<bool> = (0..cfg.events)
        .map(|i| i == 0 || !rng.gen_bool(cfg.unobservable_fraction))
        .collect();
    if cfg.unobservable_fraction > 0.0 && cfg.events >= 2 && observable.iter().all(|&o| o) {
        let i = rng.gen_range(1..cfg.events);
        observable[i] = false;
    }
    let events: Vec<Event> = observable
        .iter()
        .enumerate()
        .map(|(i, &o)| Event {
            name: event_name(i, o),
            observable: o,
        })
        .collect();

    let mut initial: Vec<String> = states
        .iter()
        .filter(|_| rng.gen_bool(0.3))
        .cloned()
        .collect();
    if initial.is_empty() {
        initial.push(states[rng.gen_range(0..cfg.states)].clone());
    }
    let secret: Vec<String> = states
        .iter()
        .filter(|_| rng.gen_bool(cfg.secret_fraction))
        .cloned()
        .collect();

    let slots = cfg.states * cfg.events;
    let wanted = ((cfg.density.max(0.0) * slots as f64).round() as usize).min(slots * cfg.states);
    let mut seen = BTreeSet::new();
    let mut transitions = Vec::new();
    // bounded attempts so dense requests on tiny models still terminate
    for _ in 0..wanted.saturating_mul(4) {
        if transitions.len() >= wanted {
            break;
        }
        let t = (
            rng.gen_range(0..cfg.states),
            rng.gen_range(0..cfg.events),
            rng.gen_range(0..cfg.states),
        );
        if seen.insert(t) {
            transitions.push((
                states[t.0].clone(),
                events[t.1].name.clone(),
                states[t.2].clone(),
            ));
        }
    }
    let spec = ModelSpec {
        states,
        events,
        initial,
        secret,
        transitions,
    };
    Ok(Nfa::from_spec(&spec).expect("generated models are well formed"))
}

fn event_name(i: usize, observable: bool) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    let base = if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    };
    if observable {
        base
    } else {
        format!("u{base}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn word(nfa: &Nfa, v: &OracleVerdict) -> String {
        nfa.format_word(&v.violation.as_ref().unwrap().word)
    }

    #[test]
    fn g2_weak() {
        let g = fixtures::g2();
        let cfg = OracleConfig {
            max_len: 6,
            ..Default::default()
        };
        for k in 0..=3 {
            assert!(oracle_k_step_weak(&g, k, &cfg).opaque, "k = {k}");
            let v = oracle_k_step_weak(&g, k, &OracleConfig::default());
            assert!(v.opaque && v.exact, "k = {k}");
        }
        let inf = oracle_infinite_step_weak(&g, &cfg);
        assert!(inf.opaque && inf.exact);
        assert!(oracle_current_state(&g, &cfg).opaque);
    }

    #[test]
    fn g2_strong() {
        let g = fixtures::g2();
        let cfg = OracleConfig {
            max_len: 6,
            ..Default::default()
        };
        assert!(oracle_k_step_strong(&g, 0, &cfg).opaque);
        assert!(oracle_k_step_strong(&g, 1, &cfg).opaque);
        let v = oracle_k_step_strong(&g, 2, &cfg);
        assert!(!v.opaque);
        assert_eq!(word(&g, &v), "a b c");
        assert_eq!(v.violation.as_ref().unwrap().split, 1);
        let inf = oracle_infinite_step_strong(
            &g,
            &OracleConfig {
                max_len: 8,
                ..Default::default()
            },
        );
        assert!(!inf.opaque && inf.exact);
        assert_eq!(word(&g, &inf), "a b c");
    }

    #[test]
    fn g2_weak_direct_quantifiers() {
        // splits of "a b c" against the hand-listed state sequences 0123, 0456, 0789
        let g = fixtures::g2();
        let p = Plain::new(&g);
        let w: Vec<usize> = g
            .parse_events(&["a", "b", "c"])
            .unwrap()
            .iter()
            .map(|e| e.index())
            .collect();
        assert_eq!(p.weak_split(&w, None), None);
        assert_eq!(p.strong_window(&w, 2), Some(1));
        assert_eq!(p.strong_window(&w, 1), None);
        assert!(p.inf_strong_fails(&w));
        assert!(!p.inf_strong_fails(&w[..2]));
    }

    #[test]
    fn lone_secret_state() {
        let spec = ModelSpec {
            states: vec!["0".into(), "1".into()],
            events: vec![Event {
                name: "a".into(),
                observable: true,
            }],
            initial: vec!["0".into()],
            secret: vec!["1".into()],
            transitions: vec![("0".into(), "a".into(), "1".into())],
        };
        let m = Nfa::from_spec(&spec).unwrap();
        let v = oracle_k_step_weak(&m, 0, &OracleConfig::default());
        assert!(!v.opaque);
        assert_eq!(word(&m, &v), "a");
        assert_eq!(v.violation.unwrap().split, 1);
        assert!(!oracle_infinite_step_weak(&m, &OracleConfig::default()).opaque);
    }

    #[test]
    fn no_secrets_is_opaque_everywhere() {
        let mut spec = fixtures::g2_spec();
        spec.secret.clear();
        let g = Nfa::from_spec(&spec).unwrap();
        let cfg = OracleConfig::default();
        for k in 0..4 {
            assert!(oracle_k_step_weak(&g, k, &cfg).opaque);
            assert!(oracle_k_step_strong(&g, k, &cfg).opaque);
        }
        assert!(oracle_infinite_step_weak(&g, &cfg).opaque);
        assert!(oracle_infinite_step_strong(&g, &cfg).opaque);
    }

    #[test]
    fn bound_limits_exactness() {
        // a counter that only exposes the secret after 5 observations
        let n = 7;
        let spec = ModelSpec {
            states: (0..n).map(|i| i.to_string()).collect(),
            events: vec![Event {
                name: "a".into(),
                observable: true,
            }],
            initial: vec!["0".into()],
            secret: vec!["5".into()],
            transitions: (0..n - 1)
                .map(|i| (i.to_string(), "a".to_string(), (i + 1).to_string()))
                .collect(),
        };
        let m = Nfa::from_spec(&spec).unwrap();
        let short = oracle_current_state(
            &m,
            &OracleConfig {
                max_len: 3,
                ..Default::default()
            },
        );
        assert!(short.opaque && !short.exact);
        let long = oracle_current_state(
            &m,
            &OracleConfig {
                max_len: 10,
                ..Default::default()
            },
        );
        assert!(!long.opaque && long.exact);
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = RandomModelConfig {
            states: 4,
            events: 3,
            unobservable_fraction: 0.5,
            secret_fraction: 0.3,
            density: 1.0,
            seed: 1,
        };
        let a = random_nfa(&cfg).unwrap().to_spec();
        let b = random_nfa(&cfg).unwrap().to_spec();
        assert_eq!(a, b);
        assert!(!a.initial.is_empty());
        assert!(a.events[0].observable);
        assert!(a.events.iter().any(|e| !e.observable));
    }

    #[test]
    fn generator_options() {
        let base = RandomModelConfig {
            states: 5,
            events: 4,
            unobservable_fraction: 0.0,
            secret_fraction: 0.0,
            density: 1.5,
            seed: 9,
        };
        let m = random_nfa(&base).unwrap();
        assert!(m.unobservable_events().next().is_none());
        assert!(m.secret().is_empty());
        let cfg = OracleConfig::default();
        assert!(oracle_k_step_weak(&m, 2, &cfg).opaque);
        assert!(oracle_infinite_step_strong(&m, &cfg).opaque);
        assert_eq!(
            random_nfa(&RandomModelConfig {
                states: 0,
                ..base.clone()
            })
            .unwrap_err(),
            RandomModelError::NoStates
        );
        assert!(random_nfa(&RandomModelConfig {
            secret_fraction: 1.5,
            ..base
        })
        .is_err());
    }

    #[test]
    fn weak_opaque_when_strong_opaque() {
        let cfg = OracleConfig::default();
        for seed in 0..200 {
            let m = random_nfa(&RandomModelConfig {
                states: 4,
                events: 3,
                unobservable_fraction: 0.4,
                secret_fraction: 0.4,
                density: 1.2,
                seed,
            })
            .unwrap();
            for k in 0..3 {
                if oracle_k_step_strong(&m, k, &cfg).opaque {
                    assert!(oracle_k_step_weak(&m, k, &cfg).opaque, "seed {seed}, k {k}");
                }
            }
        }
    }
}
