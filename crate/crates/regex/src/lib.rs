//! Extended regexes (with `&` and `~`) over 7-bit characters, symbolic
//! derivatives, and an emptiness check that runs any dead-state engine.

pub mod decide;
pub mod deriv;
pub mod parse;
pub mod pred;
pub mod regex;
#[cfg(any(test, feature = "reference"))]
pub mod reference;

pub use decide::{decide_emptiness, Decision, DecideError, Outcome, DEFAULT_BUDGET};
pub use deriv::{expand, Capped, Deriver, Tree};
pub use parse::{parse, ParseError};
pub use pred::Pred;
pub use regex::{Interner, Node, Re};
