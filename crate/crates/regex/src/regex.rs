//! Hash-consed extended regexes.
//!
//! Constructors normalize as they build, so structurally equal regexes
//! (after normalization) get the same [`Re`] id:
//!
//! * `R&⊥ → ⊥`, `R|⊥ → R`, `R&R → R`, `R|R → R`
//! * `|` and `&` are flattened and their operands sorted and deduplicated;
//!   predicate operands are folded into one predicate
//! * `ε & R → ε` if `R` is nullable, else `⊥`
//! * `~~R → R`, `~(R|S) → ~R & ~S`
//! * `ε·R → R`, `R·ε → R`, `⊥·R → ⊥`, `R·⊥ → ⊥`, concatenation is
//!   right-nested
//! * `(R*)* → R*`, `ε* → ε`, `⊥* → ε`

use std::fmt;

use rustc_hash::FxHashMap;

use crate::pred::Pred;

/// Interned regex id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Re(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Pred(Pred),
    Eps,
    Concat(Re, Re),
    Star(Re),
    Or(Vec<Re>),
    And(Vec<Re>),
    Not(Re),
}

#[derive(Clone, Debug)]
pub struct Interner {
    nodes: Vec<Node>,
    ids: FxHashMap<Node, Re>,
    nullable: Vec<bool>,
}

impl Default for Interner {
    fn default() -> Self {
        Self::new()
    }
}

impl Interner {
    pub fn new() -> Self {
        let mut i = Interner {
            nodes: Vec::new(),
            ids: FxHashMap::default(),
            nullable: Vec::new(),
        };
        i.intern(Node::Pred(Pred::BOT));
        i.intern(Node::Eps);
        i
    }

    pub const BOT: Re = Re(0);
    pub const EPS: Re = Re(1);

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, r: Re) -> &Node {
        &self.nodes[r.0 as usize]
    }

    fn intern(&mut self, n: Node) -> Re {
        if let Some(&r) = self.ids.get(&n) {
            return r;
        }
        let nullable = match &n {
            Node::Pred(_) => false,
            Node::Eps | Node::Star(_) => true,
            Node::Concat(a, b) => self.nullable(*a) && self.nullable(*b),
            Node::Or(xs) => xs.iter().any(|&x| self.nullable(x)),
            Node::And(xs) => xs.iter().all(|&x| self.nullable(x)),
            Node::Not(a) => !self.nullable(*a),
        };
        let r = Re(self.nodes.len() as u32);
        self.nodes.push(n.clone());
        self.nullable.push(nullable);
        self.ids.insert(n, r);
        r
    }

    /// Whether `r` matches the empty string.
    pub fn nullable(&self, r: Re) -> bool {
        self.nullable[r.0 as usize]
    }

    pub fn pred(&mut self, p: Pred) -> Re {
        self.intern(Node::Pred(p))
    }

    pub fn top(&mut self) -> Re {
        self.pred(Pred::TOP)
    }

    pub fn eps(&self) -> Re {
        Self::EPS
    }

    pub fn bot(&self) -> Re {
        Self::BOT
    }

    pub fn concat(&mut self, a: Re, b: Re) -> Re {
        if a == Self::BOT || b == Self::BOT {
            return Self::BOT;
        }
        if a == Self::EPS {
            return b;
        }
        if b == Self::EPS {
            return a;
        }
        if let Node::Concat(x, y) = *self.node(a) {
            let rest = self.concat(y, b);
            return self.concat(x, rest);
        }
        self.intern(Node::Concat(a, b))
    }

    /// `r` repeated `k` times; `ε` for `k = 0`.
    pub fn power(&mut self, r: Re, k: u32) -> Re {
        let mut out = Self::EPS;
        for _ in 0..k {
            out = self.concat(r, out);
        }
        out
    }

    pub fn star(&mut self, a: Re) -> Re {
        if a == Self::BOT || a == Self::EPS {
            return Self::EPS;
        }
        if let Node::Star(_) = self.node(a) {
            return a;
        }
        self.intern(Node::Star(a))
    }

    pub fn or(&mut self, items: &[Re]) -> Re {
        let mut flat = Vec::new();
        let mut preds = Pred::BOT;
        let mut any_pred = false;
        for &x in items {
            match self.node(x) {
                Node::Or(ys) => flat.extend(ys.iter().copied()),
                _ => flat.push(x),
            }
        }
        flat.retain(|&x| match self.node(x) {
            Node::Pred(p) => {
                preds = preds.or(*p);
                any_pred = true;
                false
            }
            _ => true,
        });
        if any_pred && preds.is_sat() {
            let p = self.pred(preds);
            flat.push(p);
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => Self::BOT,
            1 => flat[0],
            _ => self.intern(Node::Or(flat)),
        }
    }

    pub fn and(&mut self, items: &[Re]) -> Re {
        let mut flat = Vec::new();
        for &x in items {
            match self.node(x) {
                Node::And(ys) => flat.extend(ys.iter().copied()),
                _ => flat.push(x),
            }
        }
        let mut preds = Pred::TOP;
        let mut any_pred = false;
        flat.retain(|&x| match self.node(x) {
            Node::Pred(p) => {
                preds = preds.and(*p);
                any_pred = true;
                false
            }
            _ => true,
        });
        if any_pred {
            if preds.is_empty() {
                return Self::BOT;
            }
            let p = self.pred(preds);
            flat.push(p);
        }
        flat.sort_unstable();
        flat.dedup();
        if flat.contains(&Self::EPS) {
            return if flat.iter().all(|&x| self.nullable(x)) { Self::EPS } else { Self::BOT };
        }
        match flat.len() {
            0 => {
                let t = self.top();
                self.star(t)
            }
            1 => flat[0],
            _ => self.intern(Node::And(flat)),
        }
    }

    pub fn not(&mut self, a: Re) -> Re {
        match self.node(a).clone() {
            Node::Not(x) => x,
            Node::Or(xs) => {
                let ys: Vec<Re> = xs.iter().map(|&x| self.not(x)).collect();
                self.and(&ys)
            }
            _ => self.intern(Node::Not(a)),
        }
    }

    pub fn display(&self, r: Re) -> Shown<'_> {
        Shown { i: self, r }
    }
}

/// Display adapter for a regex.
pub struct Shown<'a> {
    i: &'a Interner,
    r: Re,
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: Re| Shown { i: self.i, r };
        let atomic = |r: Re| matches!(self.i.node(r), Node::Pred(_) | Node::Eps | Node::Star(_) | Node::Not(_));
        match self.i.node(self.r) {
            Node::Pred(p) => write!(f, "{p}"),
            Node::Eps => f.write_str("()"),
            Node::Concat(a, b) => {
                for x in [*a, *b] {
                    if atomic(x) || matches!(self.i.node(x), Node::Concat(..)) {
                        write!(f, "{}", show(x))?;
                    } else {
                        write!(f, "({})", show(x))?;
                    }
                }
                Ok(())
            }
            Node::Star(a) => {
                if matches!(self.i.node(*a), Node::Pred(_)) {
                    write!(f, "{}*", show(*a))
                } else {
                    write!(f, "({})*", show(*a))
                }
            }
            Node::Or(xs) | Node::And(xs) => {
                let sep = if matches!(self.i.node(self.r), Node::Or(_)) { "|" } else { "&" };
                for (k, &x) in xs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(sep)?;
                    }
                    if atomic(x) || matches!(self.i.node(x), Node::Concat(..)) {
                        write!(f, "{}", show(x))?;
                    } else {
                        write!(f, "({})", show(x))?;
                    }
                }
                Ok(())
            }
            Node::Not(a) => {
                if matches!(self.i.node(*a), Node::Pred(_) | Node::Eps) {
                    write!(f, "~{}", show(*a))
                } else {
                    write!(f, "~({})", show(*a))
                }
            }
        }
    }
}
