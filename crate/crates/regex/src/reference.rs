//! Definitional matcher, for checking witnesses and verdicts.
//!
//! Works directly from the meaning of each operator over substrings, with
//! memoization on `(regex, start, end)`. It never takes a derivative.

use rustc_hash::FxHashMap;

use crate::regex::{Interner, Node, Re};

pub struct Matcher<'a> {
    i: &'a Interner,
    s: Vec<char>,
    memo: FxHashMap<(Re, usize, usize), bool>,
}

impl<'a> Matcher<'a> {
    pub fn new(i: &'a Interner, s: &str) -> Self {
        Matcher {
            i,
            s: s.chars().collect(),
            memo: FxHashMap::default(),
        }
    }

    pub fn is_match(&mut self, r: Re) -> bool {
        self.m(r, 0, self.s.len())
    }

    fn m(&mut self, r: Re, a: usize, b: usize) -> bool {
        if let Some(&v) = self.memo.get(&(r, a, b)) {
            return v;
        }
        let v = match self.i.node(r).clone() {
            Node::Pred(p) => b == a + 1 && p.contains(self.s[a]),
            Node::Eps => a == b,
            Node::Concat(x, y) => (a..=b).any(|k| self.m(x, a, k) && self.m(y, k, b)),
            // a nonempty first iteration, then the rest
            Node::Star(x) => a == b || (a + 1..=b).any(|k| self.m(x, a, k) && self.m(r, k, b)),
            Node::Or(xs) => xs.iter().any(|&x| self.m(x, a, b)),
            Node::And(xs) => xs.iter().all(|&x| self.m(x, a, b)),
            Node::Not(x) => !self.m(x, a, b),
        };
        self.memo.insert((r, a, b), v);
        v
    }
}

pub fn matches(i: &Interner, r: Re, s: &str) -> bool {
    Matcher::new(i, s).is_match(r)
}

/// First member of `r` in length-then-lexicographic order over `alphabet`,
/// up to length `max_len`.
pub fn brute_force(i: &Interner, r: Re, alphabet: &[char], max_len: usize) -> Option<String> {
    let mut word = Vec::new();
    for len in 0..=max_len {
        word.clear();
        word.resize(len, 0usize);
        loop {
            let s: String = word.iter().map(|&k| alphabet[k]).collect();
            if matches(i, r, &s) {
                return Some(s);
            }
            // odometer increment; wraps to all zeros when exhausted
            let mut pos = len;
            let more = loop {
                if pos == 0 {
                    break false;
                }
                pos -= 1;
                word[pos] += 1;
                if word[pos] < alphabet.len() {
                    break true;
                }
                word[pos] = 0;
            };
            if !more {
                break;
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn definitional_semantics() {
        let mut i = Interner::new();
        let r = parse(&mut i, r"(ab)*c").unwrap();
        assert!(matches(&i, r, "ababc"));
        assert!(!matches(&i, r, "abac"));
        let r = parse(&mut i, r"~(.*\d.{3}) & .*").unwrap();
        assert!(matches(&i, r, "a1bc"));
        assert!(!matches(&i, r, "1abc"));
        let r = parse(&mut i, r"~⊥").unwrap();
        assert!(matches(&i, r, ""));
    }

    #[test]
    fn brute_force_order() {
        let mut i = Interner::new();
        let r = parse(&mut i, r"b[ab]").unwrap();
        assert_eq!(brute_force(&i, r, &['a', 'b'], 3), Some("ba".into()));
        let r = parse(&mut i, r"\d&[a-z]").unwrap();
        assert_eq!(brute_force(&i, r, &['a', '1'], 4), None);
    }
}
