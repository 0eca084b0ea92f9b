//! Projected automaton and the secret-involved projected automaton (SIPA).
//!
//! The projected automaton replaces each string `s` with `P(s) = e_o` by a
//! single `e_o` edge. The SIPA doubles every state into `x_N` ("possibly no
//! secret visited") and `x_Y` ("a secret was definitely visited") and keeps
//! `x′_N` targets only where `x′` is reachable from a nonsecret `x` with every
//! intermediate state nonsecret.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use crate::model::Nfa;
use crate::reach;
use crate::stateset::{EventId, StateId, StateSet};

#[derive(Clone, Debug)]
pub struct ProjectedAutomaton {
    pub initial: StateSet,
    /// `(x, e_o, x′)` with `x′ ∈ R({x}, e_o)`, sorted by source, event, target.
    pub transitions: Vec<(StateId, EventId, StateId)>,
}

impl ProjectedAutomaton {
    /// Number of edges, the `m` statistic.
    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }
}

pub fn build_projected_automaton(nfa: &Nfa) -> ProjectedAutomaton {
    let mut transitions = Vec::new();
    for x in nfa.states() {
        for e in nfa.observable_events() {
            let targets = reach::observable_reach_unchecked(nfa, &StateSet::singleton(x), e);
            transitions.extend(targets.iter().map(|t| (x, e, t)));
        }
    }
    ProjectedAutomaton {
        initial: reach::unobservable_reach(nfa, nfa.initial()),
        transitions,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    N,
    Y,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::N => "N",
            Tag::Y => "Y",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaggedState {
    pub base: StateId,
    pub tag: Tag,
}

impl TaggedState {
    pub fn n(base: StateId) -> Self {
        TaggedState { base, tag: Tag::N }
    }

    pub fn y(base: StateId) -> Self {
        TaggedState { base, tag: Tag::Y }
    }

    /// `0_N` style label.
    pub fn label(&self, nfa: &Nfa) -> String {
        format!("{}_{}", nfa.state_name(self.base), self.tag)
    }
}

/// Which tagged states a [`Sipa`] materializes.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum SipaUniverse {
    /// Only tagged states reachable from the initial tagged states.
    #[default]
    Reachable,
    /// Every `x_Y`, and `x_N` for every nonsecret `x`.
    Full,
}

#[derive(Clone, Debug)]
pub struct Sipa {
    states: Vec<TaggedState>,
    initial: Vec<TaggedState>,
    transitions: Vec<(TaggedState, EventId, TaggedState)>,
    // (x, e) -> {x′ | (x_N, e, x′_N) ∈ δ_SP}
    n_edges: BTreeMap<(StateId, EventId), StateSet>,
    universe: SipaUniverse,
}

pub fn build_sipa(nfa: &Nfa) -> Sipa {
    build_sipa_with(nfa, SipaUniverse::Reachable)
}

/// Initial tagged states: every `x ∈ UR(X_0)` gets exactly one tag, `N` when a
/// nonsecret initial state reaches it through nonsecret silent steps.
fn initial_tags(nfa: &Nfa) -> Vec<TaggedState> {
    let clean_start = nfa.initial().intersection(nfa.nonsecret());
    let clean = reach::nonsecret_unobservable_reach(nfa, &clean_start);
    reach::unobservable_reach(nfa, nfa.initial())
        .iter()
        .map(|x| {
            if clean.contains(x) {
                TaggedState::n(x)
            } else {
                TaggedState::y(x)
            }
        })
        .collect()
}

/// Outgoing edges of one tagged state, events in declaration order and
/// targets ascending.
fn tagged_edges(nfa: &Nfa, from: TaggedState) -> Vec<(EventId, TaggedState)> {
    let x = StateSet::singleton(from.base);
    let mut out = Vec::new();
    for e in nfa.observable_events() {
        let reached = reach::observable_reach_unchecked(nfa, &x, e);
        if nfa.is_secret(from.base) {
            // secret source: only x_Y -> x′_Y
            if from.tag == Tag::Y {
                out.extend(reached.iter().map(|t| (e, TaggedState::y(t))));
            }
            continue;
        }
        let clean = reach::secret_avoiding_reach_unchecked(nfa, &x, e);
        for t in reached.iter() {
            let target = if clean.contains(t) {
                TaggedState::n(t)
            } else {
                TaggedState::y(t)
            };
            out.push((e, target));
        }
    }
    out
}

pub fn build_sipa_with(nfa: &Nfa, universe: SipaUniverse) -> Sipa {
    let initial = initial_tags(nfa);
    let mut states: Vec<TaggedState> = Vec::new();
    let mut seen: HashSet<TaggedState> = HashSet::new();
    match universe {
        SipaUniverse::Full => {
            for x in nfa.states() {
                if !nfa.is_secret(x) {
                    states.push(TaggedState::n(x));
                }
                states.push(TaggedState::y(x));
            }
            seen.extend(states.iter().copied());
        }
        SipaUniverse::Reachable => {
            let mut queue: VecDeque<TaggedState> = VecDeque::new();
            for &t in &initial {
                if seen.insert(t) {
                    states.push(t);
                    queue.push_back(t);
                }
            }
            while let Some(t) = queue.pop_front() {
                for (_, target) in tagged_edges(nfa, t) {
                    if seen.insert(target) {
                        states.push(target);
                        queue.push_back(target);
                    }
                }
            }
        }
    }

    let mut transitions = Vec::new();
    let mut n_edges: BTreeMap<(StateId, EventId), StateSet> = BTreeMap::new();
    for &t in &states {
        for (e, target) in tagged_edges(nfa, t) {
            if t.tag == Tag::N && target.tag == Tag::N {
                n_edges.entry((t.base, e)).or_default().insert(target.base);
            }
            transitions.push((t, e, target));
        }
    }
    Sipa {
        states,
        initial,
        transitions,
        n_edges,
        universe,
    }
}

impl Sipa {
    pub fn states(&self) -> &[TaggedState] {
        &self.states
    }

    pub fn initial(&self) -> &[TaggedState] {
        &self.initial
    }

    pub fn transitions(&self) -> &[(TaggedState, EventId, TaggedState)] {
        &self.transitions
    }

    pub fn universe(&self) -> SipaUniverse {
        self.universe
    }

    pub fn contains(&self, t: TaggedState) -> bool {
        self.states.contains(&t)
    }

    /// `{x | x_N ∈ X_SP,0}`.
    pub fn n_initial(&self) -> StateSet {
        self.initial
            .iter()
            .filter(|t| t.tag == Tag::N)
            .map(|t| t.base)
            .collect()
    }

    /// `{x′ | ∃x ∈ from, (x_N, e, x′_N) ∈ δ_SP}`.
    pub fn n_successors(&self, from: &StateSet, e: EventId) -> StateSet {
        let mut out = StateSet::new();
        for x in from.iter() {
            if let Some(targets) = self.n_edges.get(&(x, e)) {
                out.union_with(targets);
            }
        }
        out
    }

    /// True if `x_N` is a materialized state.
    pub fn has_n_state(&self, x: StateId) -> bool {
        self.contains(TaggedState::n(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Event, ModelSpec};
    use crate::oracle::{random_nfa, RandomModelConfig};
    use proptest::prelude::*;

    fn label_edges(nfa: &Nfa, sipa: &Sipa) -> Vec<String> {
        sipa.transitions()
            .iter()
            .map(|(a, e, b)| format!("({},{},{})", a.label(nfa), nfa.event(*e).name, b.label(nfa)))
            .collect()
    }

    #[test]
    fn projected_g2_is_g2() {
        let g = fixtures::g2();
        let p = build_projected_automaton(&g);
        let mut original: Vec<_> = g.transitions().to_vec();
        original.sort();
        assert_eq!(p.transitions, original);
        assert_eq!(p.num_transitions(), 12);
    }

    #[test]
    fn projected_fragment_is_edgeless() {
        let f = fixtures::g8_fragment();
        let p = build_projected_automaton(&f);
        assert_eq!(f.format_set(&p.initial), "{0,1}");
        assert!(p.transitions.is_empty());
    }

    #[test]
    fn projected_compresses_silent_prefix() {
        let spec = ModelSpec {
            states: vec!["0".into(), "1".into(), "2".into()],
            events: vec![
                Event {
                    name: "u".into(),
                    observable: false,
                },
                Event {
                    name: "a".into(),
                    observable: true,
                },
            ],
            initial: vec!["0".into()],
            secret: vec![],
            transitions: vec![
                ("0".into(), "u".into(), "1".into()),
                ("1".into(), "a".into(), "2".into()),
            ],
        };
        let nfa = Nfa::from_spec(&spec).unwrap();
        let p = build_projected_automaton(&nfa);
        let (zero, a, two) = (
            nfa.state_id("0").unwrap(),
            nfa.event_id("a").unwrap(),
            nfa.state_id("2").unwrap(),
        );
        assert!(p.transitions.contains(&(zero, a, two)));
    }

    #[test]
    fn g2_sipa_edges() {
        let g = fixtures::g2();
        let sipa = build_sipa(&g);
        let init: Vec<String> = sipa.initial().iter().map(|t| t.label(&g)).collect();
        assert_eq!(init, ["0_N"]);
        let edges = label_edges(&g, &sipa);
        for expected in [
            "(0_N,a,4_N)",
            "(0_N,a,7_N)",
            "(0_N,a,1_Y)",
            "(1_Y,b,2_Y)",
            "(4_N,b,5_Y)",
            "(7_N,b,8_N)",
            "(2_Y,c,3_N)",
            "(8_N,c,9_Y)",
        ] {
            assert!(
                edges.contains(&expected.to_string()),
                "missing {expected}: {edges:?}"
            );
        }
        assert!(!edges.contains(&"(0_N,a,1_N)".to_string()));
    }

    #[test]
    fn tagged_pattern() {
        let g = fixtures::sipa_pattern();
        let sipa = build_sipa(&g);
        let init: Vec<String> = sipa.initial().iter().map(|t| t.label(&g)).collect();
        assert_eq!(init, ["0_N", "1_Y"]);
        let edges = label_edges(&g, &sipa);
        for expected in [
            "(0_N,a,2_N)",
            "(1_Y,a,2_Y)",
            "(2_Y,b,3_N)",
            "(2_N,b,3_N)",
            "(0_N,a,4_N)",
            "(4_N,b,5_N)",
            "(3_N,b,3_N)",
        ] {
            assert!(
                edges.contains(&expected.to_string()),
                "missing {expected}: {edges:?}"
            );
        }
    }

    #[test]
    fn no_secrets_means_all_n_and_projected_shape() {
        let mut spec = fixtures::g2_spec();
        spec.secret.clear();
        let g = Nfa::from_spec(&spec).unwrap();
        let sipa = build_sipa(&g);
        assert!(sipa.states().iter().all(|t| t.tag == Tag::N));
        let mut projected: Vec<_> = sipa
            .transitions()
            .iter()
            .map(|(a, e, b)| (a.base, *e, b.base))
            .collect();
        projected.sort();
        assert_eq!(projected, build_projected_automaton(&g).transitions);
    }

    #[test]
    fn full_universe_has_expected_size() {
        let g = fixtures::g2();
        let full = build_sipa_with(&g, SipaUniverse::Full);
        assert_eq!(full.states().len(), 2 * 10 - 3);
        assert!(!full.has_n_state(g.state_id("1").unwrap()));
        // reachable edges are a subset of the full edge set
        let reach = build_sipa(&g);
        for t in reach.transitions() {
            assert!(full.transitions().contains(t));
        }
    }

    fn cfg_strategy() -> impl Strategy<Value = RandomModelConfig> {
        (
            1usize..=5,
            1usize..=4,
            0u64..20_000,
            prop_oneof![Just(0.0), Just(0.5)],
            0.0f64..0.6,
            0.3f64..1.6,
        )
            .prop_map(
                |(states, events, seed, uo, secret, density)| RandomModelConfig {
                    states,
                    events,
                    unobservable_fraction: uo,
                    secret_fraction: secret,
                    density,
                    seed,
                },
            )
    }

    /// Restricts the model to nonsecret states and takes its projected
    /// automaton, built without any tagging.
    fn nonsecret_projection(nfa: &Nfa) -> (StateSet, Vec<(StateId, EventId, StateId)>) {
        let mut spec = nfa.to_spec();
        let keep: HashSet<String> = nfa
            .nonsecret()
            .iter()
            .map(|s| nfa.state_name(s).to_string())
            .collect();
        spec.transitions
            .retain(|(a, _, b)| keep.contains(a) && keep.contains(b));
        spec.secret.clear();
        // keep every state so indices line up; secret ones become isolated
        let sub = Nfa::from_spec(&spec).unwrap();
        let p = build_projected_automaton(&sub);
        let clean_init =
            reach::unobservable_reach(&sub, &nfa.initial().intersection(nfa.nonsecret()));
        let edges = p
            .transitions
            .into_iter()
            .filter(|(a, _, b)| nfa.nonsecret().contains(*a) && nfa.nonsecret().contains(*b))
            .collect();
        (clean_init, edges)
    }

    proptest! {
        #[test]
        fn sipa_structure(cfg in cfg_strategy()) {
            let nfa = random_nfa(&cfg).unwrap();
            let sipa = build_sipa(&nfa);
            let n = nfa.num_states();
            let e_o = nfa.observable_events().count();
            prop_assert!(sipa.states().len() <= 2 * n);
            prop_assert!(sipa.transitions().len() <= 4 * n * n * e_o);
            for t in sipa.states() {
                prop_assert!(!(t.tag == Tag::N && nfa.is_secret(t.base)));
            }
            // each initial base appears once
            let mut bases: Vec<_> = sipa.initial().iter().map(|t| t.base).collect();
            bases.dedup();
            prop_assert_eq!(bases.len(), sipa.initial().len());

            for &(a, e, b) in sipa.transitions() {
                let r = reach::observable_reach_unchecked(&nfa, &StateSet::singleton(a.base), e);
                prop_assert!(r.contains(b.base));
                if nfa.is_secret(a.base) {
                    prop_assert_eq!((a.tag, b.tag), (Tag::Y, Tag::Y));
                }
                if b.tag == Tag::N {
                    // N targets only from nonsecret bases via clean reach
                    prop_assert!(!nfa.is_secret(a.base));
                    let clean = reach::secret_avoiding_reach_unchecked(&nfa, &StateSet::singleton(a.base), e);
                    prop_assert!(clean.contains(b.base));
                }
                // exclusive branches for nonsecret sources
                if !nfa.is_secret(a.base) {
                    let other = TaggedState { base: b.base, tag: if b.tag == Tag::N { Tag::Y } else { Tag::N } };
                    prop_assert!(!sipa.transitions().contains(&(a, e, other)));
                }
            }

            // N fragment equals the projected automaton of the nonsecret sub-model
            let (clean_init, edges) = nonsecret_projection(&nfa);
            prop_assert_eq!(sipa.n_initial(), clean_init);
            let full = build_sipa_with(&nfa, SipaUniverse::Full);
            let mut n_edges: Vec<_> = full.transitions().iter()
                .filter(|(a, _, b)| a.tag == Tag::N && b.tag == Tag::N)
                .map(|(a, e, b)| (a.base, *e, b.base))
                .collect();
            n_edges.sort();
            let mut expected = edges;
            expected.sort();
            prop_assert_eq!(n_edges, expected);

            // n_successors agrees with secret_avoiding_reach on N states
            for x in nfa.nonsecret().iter() {
                for e in nfa.observable_events() {
                    let one = StateSet::singleton(x);
                    prop_assert_eq!(full.n_successors(&one, e), reach::secret_avoiding_reach_unchecked(&nfa, &one, e));
                }
            }
            // deterministic construction
            let reachable = build_sipa(&nfa);
            prop_assert_eq!(reachable.transitions(), sipa.transitions());
        }
    }
}
