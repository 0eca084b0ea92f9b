//! K-step strong opacity via secret-unvisited state-trees, infinite-step strong
//! opacity via the verifier automaton.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::model::Nfa;
use crate::observer::{build_observer, build_observer_bounded, ObsStateId, Observer};
use crate::projection::{build_sipa, build_sipa_with, Sipa, SipaUniverse};
use crate::stateset::{EventId, StateSet};
use crate::tree::{self, PairRule, StateTree, TreeError, TreeKind};
use crate::verdict::{Property, Verdict, Witness};
use crate::LimitExceeded;

/// Which observer states root secret-unvisited trees during K-step strong
/// verification.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootPolicy {
    /// Every reachable observer state. A window may open at an estimate with
    /// no secret and still lose every secret-free run later on, e.g. when the
    /// only continuation passes through a secret between two observations.
    #[default]
    AllStates,
    /// Only estimates meeting the secret set.
    SecretIntersecting,
}

struct SstRule<'a> {
    nfa: &'a Nfa,
    sipa: &'a Sipa,
}

impl PairRule for SstRule<'_> {
    fn root(&self, state: &StateSet) -> (StateSet, StateSet) {
        (state.clone(), state.intersection(self.nfa.nonsecret()))
    }

    fn child(
        &self,
        (_, x2): (&StateSet, &StateSet),
        e: EventId,
        target: &StateSet,
    ) -> (StateSet, StateSet) {
        (target.clone(), self.sipa.n_successors(x2, e))
    }
}

/// Literal secret-unvisited tree of depth `k` at observer state `root_state`.
///
/// `sipa` must carry `x_N` for every nonsecret member of the root, which the
/// [`SipaUniverse::Full`] build always does.
pub fn build_sst(
    nfa: &Nfa,
    obs: &Observer,
    sipa: &Sipa,
    root_state: &StateSet,
    k: usize,
) -> Result<StateTree, TreeError> {
    let root = tree::resolve_root(nfa, obs, root_state)?;
    if let Some(x) = root_state
        .intersection(nfa.nonsecret())
        .iter()
        .find(|&x| !sipa.has_n_state(x))
    {
        return Err(TreeError::MissingTaggedState(nfa.state_name(x).to_string()));
    }
    Ok(tree::build_tree(
        obs,
        &SstRule { nfa, sipa },
        TreeKind::SecretUnvisited,
        root,
        k,
    ))
}

pub fn verify_k_step_strong(nfa: &Nfa, k: usize) -> Verdict {
    verify_k_step_strong_with(nfa, k, RootPolicy::default())
}

pub fn verify_k_step_strong_with(nfa: &Nfa, k: usize, policy: RootPolicy) -> Verdict {
    let obs = build_observer(nfa);
    let sipa = build_sipa_with(nfa, SipaUniverse::Full);
    verify_k_step_strong_in(nfa, &obs, &sipa, k, policy)
}

/// `sipa` should be the [`SipaUniverse::Full`] build.
pub fn verify_k_step_strong_in(
    nfa: &Nfa,
    obs: &Observer,
    sipa: &Sipa,
    k: usize,
    policy: RootPolicy,
) -> Verdict {
    let roots: Vec<ObsStateId> = obs
        .states()
        .filter(|(_, s)| policy == RootPolicy::AllStates || s.intersects(nfa.secret()))
        .map(|(q, _)| q)
        .collect();
    let out = tree::search(obs, &SstRule { nfa, sipa }, roots, Some(k));
    let witness = out.violation.map(|f| Witness {
        prefix: obs.access_word(f.root),
        continuation: f.continuation,
        x1: f.x1,
        x2: f.x2,
    });
    Verdict::new(Property::KStepStrong, Some(k), witness, out.explored)
}

/// Deterministic automaton over `(observer state, secret-avoiding subset)`.
#[derive(Clone, Debug)]
pub struct VerifierAutomaton {
    states: Vec<(StateSet, StateSet)>,
    delta: Vec<Vec<Option<usize>>>,
    parent: Vec<Option<(usize, EventId)>>,
    events: Vec<EventId>,
    first_empty: Option<usize>,
    truncated: bool,
}

impl VerifierAutomaton {
    pub fn initial(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, v: usize) -> &(StateSet, StateSet) {
        &self.states[v]
    }

    pub fn states(&self) -> impl Iterator<Item = (usize, &(StateSet, StateSet))> {
        self.states.iter().enumerate()
    }

    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn successor(&self, v: usize, e: EventId) -> Option<usize> {
        self.delta[v].get(e.index()).copied().flatten()
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (EventId, usize)> + '_ {
        self.events
            .iter()
            .filter_map(move |&e| self.successor(v, e).map(|t| (e, t)))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, EventId, usize)> + '_ {
        (0..self.len()).flat_map(move |v| self.out_edges(v).map(move |(e, t)| (v, e, t)))
    }

    /// First state found with empty second component, in BFS order.
    pub fn first_empty(&self) -> Option<usize> {
        self.first_empty
    }

    /// True when construction stopped at the first empty state.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn access_word(&self, v: usize) -> Vec<EventId> {
        let mut word = Vec::new();
        let mut cur = v;
        while let Some((p, e)) = self.parent[cur] {
            word.push(e);
            cur = p;
        }
        word.reverse();
        word
    }
}

/// Full verifier construction (no early exit, no cap). `sipa` may be either
/// universe; only `N` states reachable from the initial tags are consulted.
pub fn build_verifier(nfa: &Nfa, obs: &Observer, sipa: &Sipa) -> VerifierAutomaton {
    build_verifier_bounded(nfa, obs, sipa, usize::MAX, false)
        .expect("unbounded build cannot exceed its limit")
}

pub fn build_verifier_bounded(
    nfa: &Nfa,
    obs: &Observer,
    sipa: &Sipa,
    max_states: usize,
    stop_on_empty: bool,
) -> Result<VerifierAutomaton, LimitExceeded> {
    let initial = (obs.state(obs.initial()).clone(), sipa.n_initial());
    let mut ver = VerifierAutomaton {
        states: vec![initial.clone()],
        delta: vec![vec![None; nfa.num_events()]],
        parent: vec![None],
        events: obs.events().to_vec(),
        first_empty: None,
        truncated: false,
    };
    let mut obs_of = vec![obs.initial()];
    let mut index: HashMap<(StateSet, StateSet), usize> = HashMap::from([(initial, 0)]);
    if ver.states[0].1.is_empty() {
        ver.first_empty = Some(0);
        if stop_on_empty {
            ver.truncated = true;
            return Ok(ver);
        }
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &e in obs.events() {
            let Some(q) = obs.successor(obs_of[v], e) else {
                continue;
            };
            let x2 = sipa.n_successors(&ver.states[v].1, e);
            let key = (obs.state(q).clone(), x2);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = ver.states.len();
                    if id >= max_states {
                        return Err(LimitExceeded {
                            structure: "verifier",
                            limit: max_states,
                        });
                    }
                    let empty = key.1.is_empty();
                    ver.states.push(key.clone());
                    index.insert(key, id);
                    ver.delta.push(vec![None; nfa.num_events()]);
                    ver.parent.push(Some((v, e)));
                    obs_of.push(q);
                    queue.push_back(id);
                    if empty && ver.first_empty.is_none() {
                        ver.first_empty = Some(id);
                        if stop_on_empty {
                            ver.delta[v][e.index()] = Some(id);
                            ver.truncated = true;
                            return Ok(ver);
                        }
                    }
                    id
                }
            };
            ver.delta[v][e.index()] = Some(id);
        }
    }
    Ok(ver)
}

pub fn verify_infinite_step_strong(nfa: &Nfa) -> Verdict {
    let obs = build_observer(nfa);
    let sipa = build_sipa(nfa);
    verify_infinite_step_strong_in(nfa, &obs, &sipa, usize::MAX)
        .expect("unbounded build cannot exceed its limit")
}

pub fn verify_infinite_step_strong_in(
    nfa: &Nfa,
    obs: &Observer,
    sipa: &Sipa,
    max_states: usize,
) -> Result<Verdict, LimitExceeded> {
    let ver = build_verifier_bounded(nfa, obs, sipa, max_states, true)?;
    let witness = ver.first_empty().map(|v| {
        let (x1, x2) = ver.state(v).clone();
        Witness {
            prefix: ver.access_word(v),
            continuation: Vec::new(),
            x1,
            x2,
        }
    });
    Ok(Verdict::new(
        Property::InfiniteStepStrong,
        None,
        witness,
        ver.len(),
    ))
}

/// Convenience: observer, reachable SIPA, full verifier, with a shared cap.
pub fn build_all_bounded(
    nfa: &Nfa,
    max_states: usize,
) -> Result<(Observer, Sipa, VerifierAutomaton), LimitExceeded> {
    let obs = build_observer_bounded(nfa, max_states)?;
    let sipa = build_sipa(nfa);
    let ver = build_verifier_bounded(nfa, &obs, &sipa, max_states, false)?;
    Ok((obs, sipa, ver))
}

/// Outcome of comparing a verifier against an observer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageCheck {
    /// `x_v ↦ x_v1` is a functional bisimulation onto the reachable observer.
    pub equal: bool,
    /// Whether that map is also one-to-one on states. Not required for
    /// language equality and false in general.
    pub injective: bool,
    /// Offending states or edges, empty when `equal`.
    pub problems: Vec<String>,
}

/// Checks `L(verifier) = L(observer)` structurally: the first-component map
/// must send the initial state to the initial state, be defined on every
/// verifier state, commute with transitions in both directions, and hit every
/// observer state.
pub fn check_verifier_observer_language_equality(
    obs: &Observer,
    ver: &VerifierAutomaton,
) -> LanguageCheck {
    let mut problems = Vec::new();
    if ver.is_truncated() {
        problems.push("verifier construction stopped early".to_string());
    }
    if ver.events() != obs.events() {
        problems.push(format!(
            "alphabets differ: verifier {:?}, observer {:?}",
            ver.events(),
            obs.events()
        ));
    }
    let map: Vec<Option<ObsStateId>> = ver.states().map(|(_, (x1, _))| obs.find(x1)).collect();
    if map.first().copied().flatten() != Some(obs.initial()) {
        problems.push("initial states do not correspond".to_string());
    }
    let mut hit = vec![false; obs.len()];
    let mut alphabet: Vec<EventId> = obs.events().to_vec();
    alphabet.extend(ver.events().iter().filter(|e| !obs.events().contains(e)));
    for (v, (x1, x2)) in ver.states() {
        let Some(q) = map[v] else {
            problems.push(format!(
                "verifier state ({x1:?},{x2:?}) has no observer image"
            ));
            continue;
        };
        hit[q] = true;
        for &e in &alphabet {
            let vt = ver.successor(v, e).map(|t| map[t]);
            let ot = obs.successor(q, e);
            match (vt, ot) {
                (None, None) => {}
                (Some(a), Some(b)) if a == Some(b) => {}
                (vt, ot) => problems.push(format!(
                    "state ({x1:?},{x2:?}) event {e:?}: verifier goes to {vt:?}, observer to {ot:?}"
                )),
            }
        }
    }
    for (q, h) in hit.iter().enumerate() {
        if !h {
            problems.push(format!("observer state {:?} has no preimage", obs.state(q)));
        }
    }
    let mut images: Vec<ObsStateId> = map.iter().flatten().copied().collect();
    images.sort_unstable();
    let before = images.len();
    images.dedup();
    LanguageCheck {
        equal: problems.is_empty(),
        injective: images.len() == before && before == map.len(),
        problems,
    }
}
