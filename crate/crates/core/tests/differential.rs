use gid_core::engine::{replay_audited, EngineKind, EngineOptions};
use gid_core::{oracle_events, Trace, Update};
use proptest::prelude::*;

/// Valid traces over `n` states: no edge or terminal from a closed state.
fn traces(max_states: u32, max_len: usize) -> impl Strategy<Value = Trace> {
    (2..=max_states).prop_flat_map(move |n| {
        prop::collection::vec((0u8..10, 0..n, 0..n), 0..max_len).prop_map(move |raw| {
            let mut closed = vec![false; n as usize];
            let mut updates = Vec::new();
            for (kind, a, b) in raw {
                let (a, b) = (a + 1, b + 1);
                match kind {
                    0..=5 if !closed[a as usize - 1] => updates.push(Update::edge(a, b)),
                    6 if !closed[a as usize - 1] => updates.push(Update::terminal(a)),
                    _ => {
                        closed[a as usize - 1] = true;
                        updates.push(Update::closed(a));
                    }
                }
            }
            Trace::new(updates)
        })
    })
}

/// Mostly closes, rarely terminal: long unknown chains and many merges.
fn sparse_terminal_traces() -> impl Strategy<Value = Trace> {
    (3u32..=25).prop_flat_map(|n| {
        prop::collection::vec((0u8..40, 0..n, 0..n), 0..150).prop_map(move |raw| {
            let mut closed = vec![false; n as usize];
            let mut updates = Vec::new();
            for (kind, a, b) in raw {
                let (a, b) = (a + 1, b + 1);
                match kind {
                    0..=24 if !closed[a as usize - 1] => updates.push(Update::edge(a, b)),
                    25 if !closed[a as usize - 1] => updates.push(Update::terminal(a)),
                    _ => {
                        closed[a as usize - 1] = true;
                        updates.push(Update::closed(a));
                    }
                }
            }
            for s in 1..=n {
                if !closed[s as usize - 1] && s % 3 != 0 {
                    updates.push(Update::closed(s));
                }
            }
            Trace::new(updates)
        })
    })
}

fn check_all(trace: &Trace, tie_seed: Option<u64>) -> Result<(), TestCaseError> {
    let expected = oracle_events(trace);
    for kind in EngineKind::ALL {
        let mut engine = kind.build_with(EngineOptions { tie_seed });
        let got = replay_audited(engine.as_mut(), trace).map_err(|e| TestCaseError::fail(format!("{kind}: {e}\n{}", trace.serialize())))?;
        prop_assert_eq!(&got, &expected, "{} on\n{}", kind, trace.serialize());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn engines_match_oracle(trace in traces(10, 60)) {
        check_all(&trace, None)?;
    }

    #[test]
    fn engines_match_oracle_with_merges(trace in sparse_terminal_traces()) {
        check_all(&trace, None)?;
    }

    #[test]
    fn union_tie_breaking_does_not_matter(trace in sparse_terminal_traces(), seed in any::<u64>()) {
        check_all(&trace, Some(seed))?;
    }
}

#[test]
fn duplicate_edges_and_self_loops() {
    let t = Trace::parse("E 1 1\nE 1 2\nE 1 2\nE 2 1\nC 1\nE 2 2\nC 2\nE 3 3\nC 3").unwrap();
    check_all(&t, None).unwrap();
}
