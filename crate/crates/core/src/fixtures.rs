//! Small reference models used by tests, docs and the CLI examples.

use crate::model::{Event, ModelSpec, Nfa};

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn triples(ts: &[(&str, &str, &str)]) -> Vec<(String, String, String)> {
    ts.iter()
        .map(|&(a, e, b)| (a.to_string(), e.to_string(), b.to_string()))
        .collect()
}

/// Three confusable chains `0-a-1-b-2-c-3`, `0-a-4-b-5-c-6`, `0-a-7-b-8-c-9`
/// ending in `d` self-loops; secrets `{1,5,9}`, everything observable.
pub fn g2_spec() -> ModelSpec {
    ModelSpec {
        states: (0..10).map(|i| i.to_string()).collect(),
        events: ["a", "b", "c", "d"]
            .iter()
            .map(|n| Event {
                name: n.to_string(),
                observable: true,
            })
            .collect(),
        initial: owned(&["0"]),
        secret: owned(&["1", "5", "9"]),
        transitions: triples(&[
            ("0", "a", "1"),
            ("0", "a", "4"),
            ("0", "a", "7"),
            ("1", "b", "2"),
            ("4", "b", "5"),
            ("7", "b", "8"),
            ("2", "c", "3"),
            ("5", "c", "6"),
            ("8", "c", "9"),
            ("3", "d", "3"),
            ("6", "d", "6"),
            ("9", "d", "9"),
        ]),
    }
}

pub fn g2() -> Nfa {
    Nfa::from_spec(&g2_spec()).expect("g2 fixture is well formed")
}

/// Two states joined by the unobservable event `b`; `a` and `c` observable
/// but unused.
pub fn g8_fragment_spec() -> ModelSpec {
    ModelSpec {
        states: owned(&["0", "1"]),
        events: vec![
            Event {
                name: "a".into(),
                observable: true,
            },
            Event {
                name: "b".into(),
                observable: false,
            },
            Event {
                name: "c".into(),
                observable: true,
            },
        ],
        initial: owned(&["0"]),
        secret: vec![],
        transitions: triples(&[("0", "b", "1")]),
    }
}

pub fn g8_fragment() -> Nfa {
    Nfa::from_spec(&g8_fragment_spec()).expect("g8 fragment is well formed")
}

/// The shape behind the tagged-state example: initial `0` reaches secret `1`
/// silently, `0 -a-> 2`, `1 -a-> 2`, `0 -a-> 4`, `2 -b-> 3`, `4 -b-> 5`,
/// `3 -b-> 3`. Only the parts needed to reproduce the published tags and the
/// first levels of the secret-unvisited tree are present.
pub fn sipa_pattern_spec() -> ModelSpec {
    ModelSpec {
        states: owned(&["0", "1", "2", "3", "4", "5"]),
        events: vec![
            Event {
                name: "a".into(),
                observable: true,
            },
            Event {
                name: "b".into(),
                observable: true,
            },
            Event {
                name: "c".into(),
                observable: true,
            },
            Event {
                name: "u".into(),
                observable: false,
            },
        ],
        initial: owned(&["0"]),
        secret: owned(&["1"]),
        transitions: triples(&[
            ("0", "u", "1"),
            ("0", "a", "2"),
            ("1", "a", "2"),
            ("0", "a", "4"),
            ("2", "b", "3"),
            ("4", "b", "5"),
            ("3", "b", "3"),
        ]),
    }
}

pub fn sipa_pattern() -> Nfa {
    Nfa::from_spec(&sipa_pattern_spec()).expect("sipa pattern is well formed")
}
