use gid_core::{oracle_run, EngineKind, StateId, Status, Update};
use gid_regex::reference::{brute_force, matches};
use gid_regex::{decide_emptiness, expand, parse, Decision, Deriver, Interner, Outcome, Pred, Re, DEFAULT_BUDGET};
use proptest::prelude::*;

const ALPHABET: [char; 6] = ['a', 'b', 'c', '0', '1', '2'];

fn regex_text() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec!["a", "b", "0", "1", ".", r"\d", "[ab]", "[^a]", "()", "[]"]).prop_map(String::from);
    leaf.prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x})({y})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x})|({y})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x})&({y})")),
            inner.clone().prop_map(|x| format!("~({x})")),
            inner.clone().prop_map(|x| format!("({x})*")),
            inner.prop_map(|x| format!("({x}){{2}}")),
        ]
    })
}

fn decide(i: &mut Interner, r: Re, kind: EngineKind) -> Outcome {
    let mut e = kind.build();
    decide_emptiness(i, r, e.as_mut(), DEFAULT_BUDGET).unwrap()
}

/// Follows `w` through the transitions of `r`, checking each character
/// against the condition of the edge it takes.
fn walk(i: &mut Interner, r: Re, w: &str) -> Option<Re> {
    let mut d = Deriver::default();
    let mut cur = r;
    for c in w.chars() {
        let out = expand(&mut d, i, cur).unwrap();
        let (cond, next) = out.into_iter().find(|(p, _)| p.contains(c))?;
        assert!(cond.contains(c));
        cur = next;
    }
    Some(cur)
}

fn check_decision(text: &str) -> Result<(), TestCaseError> {
    let mut i = Interner::new();
    let r = parse(&mut i, text).unwrap();
    let o = decide(&mut i, r, EngineKind::Log);
    match &o.decision {
        Decision::Live(w) => {
            prop_assert!(matches(&i, r, w), "{text}: witness {w:?} rejected");
            let end = walk(&mut i, r, w);
            prop_assert!(end.is_some_and(|e| i.nullable(e)));
        }
        Decision::Dead => {
            prop_assert_eq!(brute_force(&i, r, &ALPHABET, 4), None, "{}", text);
        }
        Decision::BudgetExhausted(_) => prop_assert!(false, "{text}: undecided"),
    }
    if let Some(s) = brute_force(&i, r, &ALPHABET, 3) {
        prop_assert!(matches!(o.decision, Decision::Live(_)), "{text} contains {s:?}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn decisions_are_sound(text in regex_text()) {
        check_decision(&text)?;
    }

    #[test]
    fn derivatives_agree_with_the_definitional_matcher(
        text in regex_text(),
        w in prop::collection::vec(prop::sample::select(ALPHABET.to_vec()), 0..6),
    ) {
        let w: String = w.into_iter().collect();
        let mut i = Interner::new();
        let r = parse(&mut i, &text).unwrap();
        let by_derivative = walk(&mut i, r, &w).is_some_and(|e| i.nullable(e));
        prop_assert_eq!(by_derivative, matches(&i, r, &w), "{} on {:?}", text, w);
    }

    #[test]
    fn engines_agree(text in regex_text()) {
        let mut i = Interner::new();
        let r = parse(&mut i, &text).unwrap();
        let first = decide(&mut i, r, EngineKind::Naive);
        for kind in &EngineKind::ALL[1..] {
            let o = decide(&mut i, r, *kind);
            prop_assert_eq!(&o.decision, &first.decision, "{} under {}", text, kind);
            prop_assert_eq!(o.expansions, first.expansions);
            prop_assert_eq!(&o.trace, &first.trace);
        }
    }

    #[test]
    fn emitted_trace_is_valid_and_agrees_with_the_oracle(text in regex_text()) {
        let mut i = Interner::new();
        let r = parse(&mut i, &text).unwrap();
        let o = decide(&mut i, r, EngineKind::Lazy);
        prop_assert!(o.trace.validate().is_ok());
        let status = oracle_run(&o.trace).statuses.get(&StateId(r.0)).copied();
        match o.decision {
            Decision::Live(_) => prop_assert_eq!(status, Some(Status::Live)),
            Decision::Dead => prop_assert_eq!(status, Some(Status::Dead)),
            Decision::BudgetExhausted(_) => {}
        }
    }

    #[test]
    fn edges_per_state_within_leaf_count(text in regex_text()) {
        let mut i = Interner::new();
        let r = parse(&mut i, &text).unwrap();
        let o = decide(&mut i, r, EngineKind::Simple);
        let mut d = Deriver::default();
        let mut counts = std::collections::BTreeMap::<u32, usize>::new();
        for u in o.trace.iter() {
            if let Update::Edge(s, _) = u {
                *counts.entry(s.0).or_default() += 1;
            }
        }
        for (s, emitted) in counts {
            let t = d.derivative(&mut i, Re(s)).unwrap();
            let dropped = t.leaves().iter().filter(|(_, l)| *l == Interner::BOT).count();
            prop_assert!(emitted + dropped <= t.leaf_count());
        }
    }
}

#[test]
fn nullability_examples() {
    let mut i = Interner::new();
    for (text, want) in [("()", true), (r"\d", false), ("~⊥", true), (r"(\d\d)&~()", false), ("(ab)*", true)] {
        let r = parse(&mut i, text).unwrap();
        assert_eq!(i.nullable(r), want, "{text}");
    }
}

#[test]
fn expand_examples() {
    let mut i = Interner::new();
    let mut d = Deriver::default();
    let a = parse(&mut i, r"\d").unwrap();
    assert_eq!(expand(&mut d, &mut i, a).unwrap(), vec![(Pred::digit(), Interner::EPS)]);
    let r1 = parse(&mut i, r"~(.*\d.{100}) & ~(.{100}) & \d").unwrap();
    assert_eq!(expand(&mut d, &mut i, r1).unwrap(), vec![(Pred::digit(), Interner::EPS)]);
    let r2 = parse(&mut i, r"~(.*\d.{100}) & \d").unwrap();
    assert_eq!(expand(&mut d, &mut i, r2).unwrap(), vec![(Pred::digit(), Interner::EPS)]);
    let e = parse(&mut i, r"\d & [a-z]").unwrap();
    assert!(expand(&mut d, &mut i, e).unwrap().is_empty());
}

#[test]
fn motivating_regex() {
    let mut i = Interner::new();
    let r = parse(&mut i, r"~(.*\d.{100}) & (.\d)").unwrap();
    for kind in EngineKind::ALL {
        let o = decide(&mut i, r, kind);
        let Decision::Live(w) = &o.decision else {
            panic!("{kind}: {:?}", o.decision)
        };
        assert_eq!(o.expansions, 2);
        assert_eq!(w.chars().count(), 2);
        assert!(w.chars().all(|c| c.is_ascii_digit()));
        assert!(matches(&i, r, w));
    }
}

#[test]
fn trivial_decisions() {
    let mut i = Interner::new();
    let bot = parse(&mut i, "⊥").unwrap();
    let o = decide(&mut i, bot, EngineKind::Bfgt);
    assert_eq!((o.decision, o.expansions), (Decision::Dead, 1));
    let top = parse(&mut i, "~⊥").unwrap();
    assert_eq!(decide(&mut i, top, EngineKind::FirstCut).decision, Decision::Live(String::new()));
    let e = parse(&mut i, r"\d & [a-z]").unwrap();
    assert_eq!(decide(&mut i, e, EngineKind::Naive).decision, Decision::Dead);
}

#[test]
fn dead_cycles_are_detected() {
    // every derivative is the regex itself or ⊥, closing a dead self-loop
    let mut i = Interner::new();
    let r = parse(&mut i, "a* & ~(a*)").unwrap();
    assert_eq!(decide(&mut i, r, EngineKind::Log).decision, Decision::Dead);
    let r = parse(&mut i, "(ab)*a & (ab)*b").unwrap();
    assert_eq!(decide(&mut i, r, EngineKind::Lazy).decision, Decision::Dead);
}
