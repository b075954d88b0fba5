//! The update language of a guided incremental digraph.
//!
//! A trace is an ordered sequence of [`Update`]s. Each update either adds a
//! directed edge, labels a state terminal, or labels a state closed. Closed
//! states promise that no further outgoing edges (and no terminal label) will
//! arrive; [`validate`] checks that promise.
//!
//! Text format, one update per line:
//!
//! ```text
//! # comment
//! E 1 2
//! T 2
//! C 1
//! ```

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A state of the digraph. Any `u32` is a valid id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for StateId {
    fn from(v: u32) -> Self {
        StateId(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Update {
    Edge(StateId, StateId),
    Terminal(StateId),
    Closed(StateId),
}

impl Update {
    pub fn edge(u: u32, v: u32) -> Self {
        Update::Edge(StateId(u), StateId(v))
    }

    pub fn terminal(u: u32) -> Self {
        Update::Terminal(StateId(u))
    }

    pub fn closed(u: u32) -> Self {
        Update::Closed(StateId(u))
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::Edge(u, v) => write!(f, "E {u} {v}"),
            Update::Terminal(u) => write!(f, "T {u}"),
            Update::Closed(u) => write!(f, "C {u}"),
        }
    }
}

/// Classification of a single state. The four values are disjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    /// Some terminal state is reachable.
    Live,
    /// Not live in any extension of the trace.
    Dead,
    /// Closed, but neither live nor dead.
    Unknown,
    /// Not closed and not live.
    Open,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Live => "Live",
            Status::Dead => "Dead",
            Status::Unknown => "Unknown",
            Status::Open => "Open",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Live(StateId),
    Dead(StateId),
}

impl Verdict {
    pub fn state(&self) -> StateId {
        match *self {
            Verdict::Live(s) | Verdict::Dead(s) => s,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Live(s) => write!(f, "Live {s}"),
            Verdict::Dead(s) => write!(f, "Dead {s}"),
        }
    }
}

/// A verdict together with the 0-based index of the update that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub index: usize,
    pub verdict: Verdict,
}

impl Event {
    pub fn new(index: usize, verdict: Verdict) -> Self {
        Event { index, verdict }
    }

    /// `@<index> Live <u>`
    pub fn verbose(&self) -> String {
        format!("@{} {}", self.index, self.verdict)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.verdict.fmt(f)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub updates: Vec<Update>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unknown update kind `{kind}`")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: `{kind}` expects {expected} state id(s), found {found}")]
    Arity {
        line: usize,
        kind: char,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid state id `{token}`")]
    BadId { line: usize, token: String },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match *self {
            ParseError::UnknownKind { line, .. }
            | ParseError::Arity { line, .. }
            | ParseError::BadId { line, .. } => line,
        }
    }
}

/// First update that breaks the closed-label promise.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("update {index} (`{update}`): {reason}")]
pub struct Violation {
    pub index: usize,
    pub update: Update,
    pub reason: String,
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Validation {
    /// Indices of repeated `C` updates. These are tolerated.
    pub duplicate_closes: Vec<usize>,
}

impl Trace {
    pub fn new(updates: Vec<Update>) -> Self {
        Trace { updates }
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Update> {
        self.updates.iter()
    }

    pub fn parse(text: &str) -> Result<Trace, ParseError> {
        parse_trace(text)
    }

    /// Writes the line format understood by [`parse_trace`].
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(self.updates.len() * 8);
        for u in &self.updates {
            use std::fmt::Write;
            let _ = writeln!(out, "{u}");
        }
        out
    }

    pub fn validate(&self) -> Result<Validation, Violation> {
        validate(self)
    }

    /// Number of edge updates.
    pub fn edge_count(&self) -> usize {
        self.updates
            .iter()
            .filter(|u| matches!(u, Update::Edge(..)))
            .count()
    }

    /// All states mentioned by any update.
    pub fn states(&self) -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        for u in &self.updates {
            match *u {
                Update::Edge(a, b) => {
                    out.insert(a);
                    out.insert(b);
                }
                Update::Terminal(a) | Update::Closed(a) => {
                    out.insert(a);
                }
            }
        }
        out
    }
}

impl FromStr for Trace {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_trace(s)
    }
}

impl FromIterator<Update> for Trace {
    fn from_iter<I: IntoIterator<Item = Update>>(iter: I) -> Self {
        Trace::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Trace {
    type Item = &'a Update;
    type IntoIter = std::slice::Iter<'a, Update>;

    fn into_iter(self) -> Self::IntoIter {
        self.updates.iter()
    }
}

fn parse_id(token: &str, line: usize) -> Result<StateId, ParseError> {
    token
        .parse::<u32>()
        .map(StateId)
        .map_err(|_| ParseError::BadId {
            line,
            token: token.to_string(),
        })
}

pub fn parse_trace(text: &str) -> Result<Trace, ParseError> {
    let mut updates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let kind = tokens.next().unwrap_or_default();
        let args: Vec<&str> = tokens.collect();
        let kind_char = match kind {
            "E" => 'E',
            "T" => 'T',
            "C" => 'C',
            other => {
                return Err(ParseError::UnknownKind {
                    line,
                    kind: other.to_string(),
                })
            }
        };
        let expected = if kind_char == 'E' { 2 } else { 1 };
        if args.len() != expected {
            return Err(ParseError::Arity {
                line,
                kind: kind_char,
                expected,
                found: args.len(),
            });
        }
        let update = match kind_char {
            'E' => Update::Edge(parse_id(args[0], line)?, parse_id(args[1], line)?),
            'T' => Update::Terminal(parse_id(args[0], line)?),
            _ => Update::Closed(parse_id(args[0], line)?),
        };
        updates.push(update);
    }
    Ok(Trace { updates })
}

/// Checks that no `E(u, _)` or `T(u)` follows `C(u)`.
pub fn validate(trace: &Trace) -> Result<Validation, Violation> {
    let mut closed = HashSet::new();
    let mut report = Validation::default();
    for (index, &update) in trace.updates.iter().enumerate() {
        match update {
            Update::Edge(u, _) if closed.contains(&u) => {
                return Err(Violation {
                    index,
                    update,
                    reason: format!("edge out of state {u} after it was closed"),
                })
            }
            Update::Terminal(u) if closed.contains(&u) => {
                return Err(Violation {
                    index,
                    update,
                    reason: format!("terminal label on state {u} after it was closed"),
                })
            }
            Update::Closed(u)
                if !closed.insert(u) => {
                    report.duplicate_closes.push(index);
                }
            _ => {}
        }
    }
    Ok(report)
}

/// The plain directed graph induced by a trace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Denotation {
    pub states: BTreeSet<StateId>,
    pub edges: BTreeSet<(StateId, StateId)>,
}

pub fn denotation(trace: &Trace) -> Denotation {
    let mut d = Denotation {
        states: trace.states(),
        edges: BTreeSet::new(),
    };
    for u in &trace.updates {
        if let Update::Edge(a, b) = *u {
            d.edges.insert((a, b));
        }
    }
    d
}

/// The example trace drawn in the introductory figures:
/// `E(1,2) E(1,3) T(2) E(4,3) E(4,5) C(4) C(5)`.
pub fn figure_trace() -> Trace {
    Trace::new(vec![
        Update::edge(1, 2),
        Update::edge(1, 3),
        Update::terminal(2),
        Update::edge(4, 3),
        Update::edge(4, 5),
        Update::closed(4),
        Update::closed(5),
    ])
}
