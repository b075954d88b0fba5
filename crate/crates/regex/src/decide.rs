//! Emptiness by incremental dead-state detection.
//!
//! Each regex reached from the input becomes a state whose id is its
//! interned id. A nullable regex is labeled terminal when first seen; an
//! expanded regex gets one edge per transition and is then closed, since
//! its derivative lists every successor it will ever have. The input is
//! nonempty iff its state becomes live, and empty iff it becomes dead.

use std::collections::VecDeque;

use gid_core::{Engine, EngineError, StateId, Status, Trace, Update};
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::deriv::{expand, Deriver};
use crate::pred::Pred;
use crate::regex::{Interner, Re};

pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Live(String),
    Dead,
    /// Undecided after this many expansions.
    BudgetExhausted(usize),
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub decision: Decision,
    pub expansions: usize,
    /// Updates sent to the engine, in order.
    pub trace: Trace,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("exploration finished but the engine left the input {0:?}")]
    Undecided(Option<Status>),
}

fn id(r: Re) -> StateId {
    StateId(r.0)
}

struct Run<'a> {
    engine: &'a mut dyn Engine,
    updates: Vec<Update>,
}

impl Run<'_> {
    fn send(&mut self, u: Update) -> Result<(), EngineError> {
        self.updates.push(u);
        self.engine.on_update(u).map(drop)
    }
}

pub fn decide_emptiness(
    i: &mut Interner,
    r: Re,
    engine: &mut dyn Engine,
    budget: usize,
) -> Result<Outcome, DecideError> {
    decide_with(i, &mut Deriver::default(), r, engine, budget)
}

pub fn decide_with(
    i: &mut Interner,
    deriver: &mut Deriver,
    r: Re,
    engine: &mut dyn Engine,
    budget: usize,
) -> Result<Outcome, DecideError> {
    if budget == 0 {
        return Err(DecideError::ZeroBudget);
    }
    let mut run = Run {
        engine,
        updates: Vec::new(),
    };
    let mut seen = FxHashSet::default();
    let mut edges: FxHashMap<Re, Vec<(Pred, Re)>> = FxHashMap::default();
    let mut queue = VecDeque::new();
    let mut expansions = 0;

    seen.insert(r);
    queue.push_back(r);
    if i.nullable(r) {
        run.send(Update::Terminal(id(r)))?;
    }

    let decision = loop {
        match run.engine.status(id(r)) {
            Some(Status::Live) => break Decision::Live(witness(i, r, &edges)),
            Some(Status::Dead) => break Decision::Dead,
            _ => {}
        }
        let Some(s) = queue.pop_front() else {
            return Err(DecideError::Undecided(run.engine.status(id(r))));
        };
        if expansions == budget {
            break Decision::BudgetExhausted(expansions);
        }
        expansions += 1;
        let Ok(out) = expand(deriver, i, s) else {
            break Decision::BudgetExhausted(expansions);
        };
        let mut decided = false;
        for &(_, t) in &out {
            if seen.insert(t) {
                queue.push_back(t);
                if i.nullable(t) {
                    run.send(Update::Terminal(id(t)))?;
                }
            }
            run.send(Update::Edge(id(s), id(t)))?;
            if run.engine.status(id(r)) == Some(Status::Live) {
                decided = true;
                break;
            }
        }
        edges.insert(s, out);
        if !decided {
            run.send(Update::Closed(id(s)))?;
        }
    };
    Ok(Outcome {
        decision,
        expansions,
        trace: Trace::new(run.updates),
    })
}

/// Shortest path over recorded transitions from `r` to a nullable regex,
/// spelled with the least character of each condition.
fn witness(i: &Interner, r: Re, edges: &FxHashMap<Re, Vec<(Pred, Re)>>) -> String {
    let mut parent: FxHashMap<Re, (Re, char)> = FxHashMap::default();
    let mut queue = VecDeque::from([r]);
    let mut seen = FxHashSet::from_iter([r]);
    while let Some(s) = queue.pop_front() {
        if i.nullable(s) {
            let mut out = Vec::new();
            let mut cur = s;
            while cur != r {
                let (p, c) = parent[&cur];
                out.push(c);
                cur = p;
            }
            out.reverse();
            return out.into_iter().collect();
        }
        for &(cond, t) in edges.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(t) {
                parent.insert(t, (s, cond.min_char().expect("satisfiable condition")));
                queue.push_back(t);
            }
        }
    }
    unreachable!("live input without a recorded path to a nullable regex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use gid_core::EngineKind;

    fn decide(s: &str) -> Outcome {
        let mut i = Interner::new();
        let r = parse(&mut i, s).unwrap();
        let mut e = EngineKind::Log.build();
        decide_emptiness(&mut i, r, e.as_mut(), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn motivating_regex_is_live_after_two_expansions() {
        let o = decide(r"~(.*\d.{100}) & (.\d)");
        assert_eq!(o.expansions, 2);
        assert_eq!(o.decision, Decision::Live("00".into()));
    }

    #[test]
    fn trivial_cases() {
        let o = decide("⊥");
        assert_eq!((o.decision, o.expansions), (Decision::Dead, 1));
        let o = decide("()");
        assert_eq!((o.decision, o.expansions), (Decision::Live(String::new()), 0));
        assert_eq!(decide(r"\d&[a-z]").decision, Decision::Dead);
        assert_eq!(decide("ab*c").decision, Decision::Live("ac".into()));
    }

    #[test]
    fn budget_is_respected() {
        let mut i = Interner::new();
        let r = parse(&mut i, r"~(.*\d.{100}) & (.{50}\d)").unwrap();
        let mut e = EngineKind::Lazy.build();
        let o = decide_emptiness(&mut i, r, e.as_mut(), 3).unwrap();
        assert_eq!(o.decision, Decision::BudgetExhausted(3));
        let mut e = EngineKind::Lazy.build();
        assert_eq!(decide_emptiness(&mut i, r, e.as_mut(), 0).unwrap_err(), DecideError::ZeroBudget);
    }
}
