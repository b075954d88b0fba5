//! Symbolic derivatives as transition trees.
//!
//! ```text
//! δ(φ)     = φ ? ε : ⊥
//! δ(ε)     = δ(⊥) = ⊥
//! δ(R·S)   = (δ(R) ⊙ S) ⊕ δ(S)   if R is nullable
//!          = δ(R) ⊙ S              otherwise
//! δ(R*)    = δ(R) ⊙ R*
//! δ(R|S)   = δ(R) ⊕ δ(S)
//! δ(R&S)   = δ(R) ⊗ δ(S)
//! δ(~R)    = ⊖ δ(R)
//! ```
//!
//! The combinators apply the regex operation leafwise, nesting the branch
//! conditions of both operands. Branches whose accumulated condition is
//! unsatisfiable are pruned, and a branch whose two sides are equal is
//! replaced by that side.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::pred::Pred;
use crate::regex::{Interner, Node, Re};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf(Re),
    Branch(Pred, Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn leaf_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Branch(_, a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// `(condition, leaf)` for every leaf, conditions accumulated from the
    /// root.
    pub fn leaves(&self) -> Vec<(Pred, Re)> {
        let mut out = Vec::new();
        let mut stack = vec![(self, Pred::TOP)];
        while let Some((t, ctx)) = stack.pop() {
            match t {
                Tree::Leaf(r) => out.push((ctx, *r)),
                Tree::Branch(p, a, b) => {
                    stack.push((b, ctx.and(!*p)));
                    stack.push((a, ctx.and(*p)));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("derivative exceeded {0} leaves")]
pub struct Capped(pub usize);

pub const DEFAULT_LEAF_CAP: usize = 4096;

#[derive(Clone, Copy)]
enum Op {
    Or,
    And,
    Concat(Re),
    Not,
}

/// Derivative computation with a per-regex cache.
#[derive(Clone, Debug)]
pub struct Deriver {
    cache: FxHashMap<Re, Tree>,
    cap: usize,
}

impl Default for Deriver {
    fn default() -> Self {
        Self::new(DEFAULT_LEAF_CAP)
    }
}

impl Deriver {
    pub fn new(cap: usize) -> Self {
        Deriver {
            cache: FxHashMap::default(),
            cap,
        }
    }

    fn check(&self, t: Tree) -> Result<Tree, Capped> {
        if t.leaf_count() > self.cap {
            Err(Capped(self.cap))
        } else {
            Ok(t)
        }
    }

    pub fn derivative(&mut self, i: &mut Interner, r: Re) -> Result<Tree, Capped> {
        if let Some(t) = self.cache.get(&r) {
            return Ok(t.clone());
        }
        let t = match i.node(r).clone() {
            Node::Pred(p) => branch(p, Pred::TOP, |_| Tree::Leaf(Interner::EPS), |_| Tree::Leaf(Interner::BOT)),
            Node::Eps => Tree::Leaf(Interner::BOT),
            Node::Concat(a, b) => {
                let da = self.derivative(i, a)?;
                let left = unary(i, &da, Op::Concat(b), Pred::TOP);
                if i.nullable(a) {
                    let db = self.derivative(i, b)?;
                    binary(i, &left, &db, Op::Or, Pred::TOP)
                } else {
                    left
                }
            }
            Node::Star(a) => {
                let da = self.derivative(i, a)?;
                unary(i, &da, Op::Concat(r), Pred::TOP)
            }
            Node::Or(xs) | Node::And(xs) => {
                let op = if matches!(i.node(r), Node::Or(_)) { Op::Or } else { Op::And };
                let mut acc = self.derivative(i, xs[0])?;
                for &x in &xs[1..] {
                    let dx = self.derivative(i, x)?;
                    acc = self.check(binary(i, &acc, &dx, op, Pred::TOP))?;
                }
                acc
            }
            Node::Not(a) => {
                let da = self.derivative(i, a)?;
                unary(i, &da, Op::Not, Pred::TOP)
            }
        };
        let t = self.check(t)?;
        self.cache.insert(r, t.clone());
        Ok(t)
    }
}

/// Branch on `p` under context `ctx`, dropping an unsatisfiable side.
fn branch(p: Pred, ctx: Pred, yes: impl FnOnce(Pred) -> Tree, no: impl FnOnce(Pred) -> Tree) -> Tree {
    let (cy, cn) = (ctx.and(p), ctx.and(!p));
    if cn.is_empty() {
        return yes(cy);
    }
    if cy.is_empty() {
        return no(cn);
    }
    join(p, yes(cy), no(cn))
}

fn apply(i: &mut Interner, op: Op, a: Re, b: Option<Re>) -> Re {
    match (op, b) {
        (Op::Or, Some(b)) => i.or(&[a, b]),
        (Op::And, Some(b)) => i.and(&[a, b]),
        (Op::Concat(s), _) => i.concat(a, s),
        (Op::Not, _) => i.not(a),
        _ => unreachable!(),
    }
}

fn unary(i: &mut Interner, t: &Tree, op: Op, ctx: Pred) -> Tree {
    match t {
        Tree::Leaf(r) => Tree::Leaf(apply(i, op, *r, None)),
        Tree::Branch(p, a, b) => {
            let (cy, cn) = (ctx.and(*p), ctx.and(!*p));
            if cn.is_empty() {
                return unary(i, a, op, cy);
            }
            if cy.is_empty() {
                return unary(i, b, op, cn);
            }
            let ta = unary(i, a, op, cy);
            let tb = unary(i, b, op, cn);
            join(*p, ta, tb)
        }
    }
}

fn join(p: Pred, a: Tree, b: Tree) -> Tree {
    if a == b {
        a
    } else {
        Tree::Branch(p, Box::new(a), Box::new(b))
    }
}

fn binary(i: &mut Interner, x: &Tree, y: &Tree, op: Op, ctx: Pred) -> Tree {
    match (x, y) {
        (Tree::Branch(p, a, b), _) => {
            let (cy, cn) = (ctx.and(*p), ctx.and(!*p));
            if cn.is_empty() {
                return binary(i, a, y, op, cy);
            }
            if cy.is_empty() {
                return binary(i, b, y, op, cn);
            }
            let ta = binary(i, a, y, op, cy);
            let tb = binary(i, b, y, op, cn);
            join(*p, ta, tb)
        }
        (Tree::Leaf(_), Tree::Branch(p, a, b)) => {
            let (cy, cn) = (ctx.and(*p), ctx.and(!*p));
            if cn.is_empty() {
                return binary(i, x, a, op, cy);
            }
            if cy.is_empty() {
                return binary(i, x, b, op, cn);
            }
            let ta = binary(i, x, a, op, cy);
            let tb = binary(i, x, b, op, cn);
            join(*p, ta, tb)
        }
        (Tree::Leaf(l), Tree::Leaf(r)) => Tree::Leaf(apply(i, op, *l, Some(*r))),
    }
}

/// Transitions out of `r`: one `(condition, target)` per distinct non-⊥
/// target, conditions of equal targets joined, in leaf order.
pub fn expand(d: &mut Deriver, i: &mut Interner, r: Re) -> Result<Vec<(Pred, Re)>, Capped> {
    let t = d.derivative(i, r)?;
    let mut out: Vec<(Pred, Re)> = Vec::new();
    for (cond, target) in t.leaves() {
        if target == Interner::BOT || cond.is_empty() {
            continue;
        }
        match out.iter_mut().find(|(_, t)| *t == target) {
            Some(slot) => slot.0 = slot.0.or(cond),
            None => out.push((cond, target)),
        }
    }
    Ok(out)
}
