//! Dynamic undirected forest with O(log n) link, cut and connectivity.
//!
//! Each tree is stored as its Euler tour, a cyclic sequence kept in an AVL
//! tree (in-order = tour order) with parent pointers so any occurrence can
//! find its root. The encoding uses one permanent occurrence per vertex plus
//! one occurrence per directed arc, so a tree with `k` vertices has a tour of
//! `k + 2(k - 1)` occurrences.
//!
//! * `add(u, v)` reroots both tours at `u` and `v` and builds
//!   `tour(u) ++ [u->v] ++ tour(v) ++ [v->u]`.
//! * `remove(u, v)` splits around both arcs; the segment between them is one
//!   tree and the two outer pieces, concatenated, are the other.
//! * `connected(u, v)` compares the roots of the two vertex occurrences.

use rustc_hash::FxHashMap;
use thiserror::Error;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EfError {
    #[error("vertices {0} and {1} are already connected")]
    AlreadyConnected(u32, u32),
    #[error("edge {{{0}, {1}}} is not in the forest")]
    MissingEdge(u32, u32),
    #[error("self-loop on {0}")]
    SelfLoop(u32),
    #[error("audit: {0}")]
    Audit(String),
}

#[derive(Clone, Copy, Debug)]
struct Node {
    l: u32,
    r: u32,
    p: u32,
    h: u8,
    /// Vertex for an occurrence node, NIL for an arc.
    vertex: u32,
}

impl Node {
    fn single(vertex: u32) -> Self {
        Node {
            l: NIL,
            r: NIL,
            p: NIL,
            h: 1,
            vertex,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EfCounters {
    /// Calls to add, remove and connected.
    pub ops: u64,
    /// Splits and joins on the sequence trees.
    pub tree_ops: u64,
}

#[derive(Clone, Debug, Default)]
pub struct EulerForest {
    nodes: Vec<Node>,
    /// Occurrence node of each vertex.
    occ: Vec<u32>,
    /// `(min, max)` -> (arc min->max, arc max->min).
    arcs: FxHashMap<(u32, u32), (u32, u32)>,
    free: Vec<u32>,
    counters: EfCounters,
}

impl EulerForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.occ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn counters(&self) -> EfCounters {
        self.counters
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.arcs.contains_key(&(u.min(v), u.max(v)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.arcs.keys().copied()
    }

    /// Makes `0..=v` vertices; new ones are isolated.
    pub fn ensure_vertex(&mut self, v: u32) {
        while self.occ.len() <= v as usize {
            let x = self.occ.len() as u32;
            let id = self.alloc(x);
            self.occ.push(id);
        }
    }

    pub fn connected(&mut self, u: u32, v: u32) -> bool {
        self.counters.ops += 1;
        self.same_tree(u, v)
    }

    fn same_tree(&self, u: u32, v: u32) -> bool {
        u == v || self.root(self.occ[u as usize]) == self.root(self.occ[v as usize])
    }

    pub fn add(&mut self, u: u32, v: u32) -> Result<(), EfError> {
        if u == v {
            return Err(EfError::SelfLoop(u));
        }
        self.counters.ops += 1;
        self.ensure_vertex(u.max(v));
        if self.same_tree(u, v) {
            return Err(EfError::AlreadyConnected(u, v));
        }
        let tu = self.reroot(self.occ[u as usize]);
        let tv = self.reroot(self.occ[v as usize]);
        let uv = self.alloc(NIL);
        let vu = self.alloc(NIL);
        let left = self.join(tu, uv, tv);
        let _ = self.join(left, vu, NIL);
        let key = (u.min(v), u.max(v));
        let pair = if u < v { (uv, vu) } else { (vu, uv) };
        self.arcs.insert(key, pair);
        Ok(())
    }

    pub fn remove(&mut self, u: u32, v: u32) -> Result<(), EfError> {
        self.counters.ops += 1;
        let key = (u.min(v), u.max(v));
        let (a1, a2) = self.arcs.remove(&key).ok_or(EfError::MissingEdge(u, v))?;
        let (p, q) = self.split(a1);
        let (outer_l, inner, outer_r);
        if q != NIL && self.root(a2) == q {
            let (q1, q2) = self.split(a2);
            outer_l = p;
            inner = q1;
            outer_r = q2;
        } else {
            let (p1, p2) = self.split(a2);
            outer_l = p1;
            inner = p2;
            outer_r = q;
        }
        debug_assert!(inner != NIL || outer_l != NIL || outer_r != NIL);
        self.concat(outer_l, outer_r);
        self.free.push(a1);
        self.free.push(a2);
        Ok(())
    }

    fn alloc(&mut self, vertex: u32) -> u32 {
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = Node::single(vertex);
            id
        } else {
            self.nodes.push(Node::single(vertex));
            (self.nodes.len() - 1) as u32
        }
    }

    fn root(&self, mut x: u32) -> u32 {
        while self.nodes[x as usize].p != NIL {
            x = self.nodes[x as usize].p;
        }
        x
    }

    fn h(&self, x: u32) -> u8 {
        if x == NIL {
            0
        } else {
            self.nodes[x as usize].h
        }
    }

    fn fix_height(&mut self, x: u32) {
        let n = self.nodes[x as usize];
        self.nodes[x as usize].h = 1 + self.h(n.l).max(self.h(n.r));
    }

    fn set_left(&mut self, x: u32, c: u32) {
        self.nodes[x as usize].l = c;
        if c != NIL {
            self.nodes[c as usize].p = x;
        }
    }

    fn set_right(&mut self, x: u32, c: u32) {
        self.nodes[x as usize].r = c;
        if c != NIL {
            self.nodes[c as usize].p = x;
        }
    }

    fn rotate_left(&mut self, x: u32) -> u32 {
        let y = self.nodes[x as usize].r;
        let yl = self.nodes[y as usize].l;
        self.set_right(x, yl);
        self.set_left(y, x);
        self.fix_height(x);
        self.fix_height(y);
        y
    }

    fn rotate_right(&mut self, x: u32) -> u32 {
        let y = self.nodes[x as usize].l;
        let yr = self.nodes[y as usize].r;
        self.set_left(x, yr);
        self.set_right(y, x);
        self.fix_height(x);
        self.fix_height(y);
        y
    }

    /// Restores balance at `x` and returns the subtree root. The caller
    /// reattaches the result.
    fn rebalance(&mut self, x: u32) -> u32 {
        self.fix_height(x);
        let n = self.nodes[x as usize];
        let (hl, hr) = (self.h(n.l) as i32, self.h(n.r) as i32);
        if hl > hr + 1 {
            let l = n.l;
            let ln = self.nodes[l as usize];
            if self.h(ln.l) < self.h(ln.r) {
                let nl = self.rotate_left(l);
                self.set_left(x, nl);
            }
            self.rotate_right(x)
        } else if hr > hl + 1 {
            let r = n.r;
            let rn = self.nodes[r as usize];
            if self.h(rn.r) < self.h(rn.l) {
                let nr = self.rotate_right(r);
                self.set_right(x, nr);
            }
            self.rotate_left(x)
        } else {
            x
        }
    }

    /// Rebalances from `x` up to the root and returns the root.
    fn rebalance_up(&mut self, mut x: u32) -> u32 {
        loop {
            let p = self.nodes[x as usize].p;
            let was_left = p != NIL && self.nodes[p as usize].l == x;
            let nx = self.rebalance(x);
            if p == NIL {
                self.nodes[nx as usize].p = NIL;
                return nx;
            }
            if was_left {
                self.set_left(p, nx);
            } else {
                self.set_right(p, nx);
            }
            x = p;
        }
    }

    /// In-order `l ++ [m] ++ r`. `l` and `r` are detached roots (or NIL), `m`
    /// a detached single node.
    fn join(&mut self, l: u32, m: u32, r: u32) -> u32 {
        self.counters.tree_ops += 1;
        let (hl, hr) = (self.h(l), self.h(r));
        if hl > hr + 1 {
            let (mut parent, mut c) = (NIL, l);
            while self.h(c) > hr + 1 {
                parent = c;
                c = self.nodes[c as usize].r;
            }
            self.set_left(m, c);
            self.set_right(m, r);
            self.fix_height(m);
            self.set_right(parent, m);
            self.rebalance_up(parent)
        } else if hr > hl + 1 {
            let (mut parent, mut c) = (NIL, r);
            while self.h(c) > hl + 1 {
                parent = c;
                c = self.nodes[c as usize].l;
            }
            self.set_right(m, c);
            self.set_left(m, l);
            self.fix_height(m);
            self.set_left(parent, m);
            self.rebalance_up(parent)
        } else {
            self.set_left(m, l);
            self.set_right(m, r);
            self.fix_height(m);
            self.nodes[m as usize].p = NIL;
            m
        }
    }

    fn detach(&mut self, x: u32) {
        if x != NIL {
            self.nodes[x as usize].p = NIL;
        }
    }

    /// Splits the sequence containing `x` into the parts before and after it.
    /// `x` is left as a detached single node.
    fn split(&mut self, x: u32) -> (u32, u32) {
        self.counters.tree_ops += 1;
        let n = self.nodes[x as usize];
        let (mut l, mut r) = (n.l, n.r);
        self.detach(l);
        self.detach(r);
        let mut cur = x;
        let mut p = n.p;
        self.nodes[x as usize] = Node::single(n.vertex);
        while p != NIL {
            let pn = self.nodes[p as usize];
            let pp = pn.p;
            if pn.l == cur {
                self.detach(pn.r);
                self.nodes[p as usize] = Node::single(pn.vertex);
                r = self.join(r, p, pn.r);
            } else {
                self.detach(pn.l);
                self.nodes[p as usize] = Node::single(pn.vertex);
                l = self.join(pn.l, p, l);
            }
            cur = p;
            p = pp;
        }
        (l, r)
    }

    fn concat(&mut self, l: u32, r: u32) -> u32 {
        if l == NIL {
            return r;
        }
        if r == NIL {
            return l;
        }
        let mut first = r;
        while self.nodes[first as usize].l != NIL {
            first = self.nodes[first as usize].l;
        }
        let (_, rest) = self.split(first);
        self.join(l, first, rest)
    }

    /// Rotates the tour containing `x` so that it starts at `x`.
    fn reroot(&mut self, x: u32) -> u32 {
        let (before, after) = self.split(x);
        let tail = self.concat(after, before);
        self.join(NIL, x, tail)
    }

    /// Checks balance, heights, parent links, and the tour-length and arc
    /// pairing invariants of every tree.
    pub fn audit(&self) -> Result<(), EfError> {
        let err = |s: String| Err(EfError::Audit(s));
        let live: Vec<bool> = {
            let mut used = vec![true; self.nodes.len()];
            for &f in &self.free {
                used[f as usize] = false;
            }
            used
        };
        for (i, n) in self.nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let i = i as u32;
            for c in [n.l, n.r] {
                if c != NIL && self.nodes[c as usize].p != i {
                    return err(format!("child {c} of {i} has wrong parent"));
                }
            }
            if n.p != NIL {
                let pn = self.nodes[n.p as usize];
                if pn.l != i && pn.r != i {
                    return err(format!("{i} not a child of its parent {}", n.p));
                }
            }
            let (hl, hr) = (self.h(n.l), self.h(n.r));
            if n.h != 1 + hl.max(hr) {
                return err(format!("stale height at {i}"));
            }
            if hl.abs_diff(hr) > 1 {
                return err(format!("unbalanced at {i}: {hl} vs {hr}"));
            }
        }
        // per tree: vertices and arcs
        let mut verts: FxHashMap<u32, usize> = FxHashMap::default();
        let mut arcs: FxHashMap<u32, usize> = FxHashMap::default();
        for (v, &o) in self.occ.iter().enumerate() {
            if self.nodes[o as usize].vertex != v as u32 {
                return err(format!("occurrence of {v} mislabelled"));
            }
            *verts.entry(self.root(o)).or_default() += 1;
        }
        for (&(a, b), &(x, y)) in &self.arcs {
            let (ra, rb) = (self.root(x), self.root(y));
            if ra != rb {
                return err(format!("arcs of {{{a}, {b}}} in different trees"));
            }
            if ra != self.root(self.occ[a as usize]) || ra != self.root(self.occ[b as usize]) {
                return err(format!("edge {{{a}, {b}}} detached from its endpoints"));
            }
            *arcs.entry(ra).or_default() += 2;
        }
        for (root, k) in verts {
            let a = arcs.get(&root).copied().unwrap_or(0);
            if a != 2 * (k - 1) {
                return err(format!("tree with {k} vertices has {a} arcs"));
            }
            let len = self.subtree_len(root);
            if len != k + a {
                return err(format!("tour length {len}, expected {}", k + a));
            }
        }
        Ok(())
    }

    fn subtree_len(&self, root: u32) -> usize {
        let mut stack = vec![root];
        let mut count = 0;
        while let Some(x) = stack.pop() {
            if x == NIL {
                continue;
            }
            count += 1;
            let n = self.nodes[x as usize];
            stack.push(n.l);
            stack.push(n.r);
        }
        count
    }

    /// Vertices in tour order of the tree containing `v`, for tests.
    pub fn tour_vertices(&self, v: u32) -> Vec<Option<u32>> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        let mut cur = self.root(self.occ[v as usize]);
        loop {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur as usize].l;
            }
            let Some(x) = stack.pop() else { break };
            let n = self.nodes[x as usize];
            out.push((n.vertex != NIL).then_some(n.vertex));
            cur = n.r;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn forest(n: u32) -> EulerForest {
        let mut f = EulerForest::new();
        f.ensure_vertex(n - 1);
        f
    }

    #[test]
    fn reflexive_and_idempotent_vertices() {
        let mut f = EulerForest::new();
        f.ensure_vertex(1);
        f.ensure_vertex(1);
        assert_eq!(f.vertex_count(), 2);
        assert!(f.connected(1, 1));
        assert!(!f.connected(0, 1));
    }

    #[test]
    fn link_cut_path() {
        let mut f = forest(4);
        f.add(1, 2).unwrap();
        assert!(f.connected(1, 2));
        f.add(2, 3).unwrap();
        assert!(f.connected(1, 3));
        assert_eq!(f.add(1, 3), Err(EfError::AlreadyConnected(1, 3)));
        assert_eq!(f.add(1, 2), Err(EfError::AlreadyConnected(1, 2)));
        f.remove(2, 3).unwrap();
        assert!(f.connected(1, 2));
        assert!(!f.connected(1, 3));
        assert_eq!(f.remove(2, 3), Err(EfError::MissingEdge(2, 3)));
        f.remove(2, 1).unwrap();
        assert!(!f.connected(1, 2));
        f.audit().unwrap();
    }

    #[test]
    fn self_loop_is_rejected() {
        let mut f = forest(2);
        assert_eq!(f.add(1, 1), Err(EfError::SelfLoop(1)));
    }

    #[test]
    fn tour_has_expected_length() {
        let mut f = forest(5);
        for (a, b) in [(0, 1), (1, 2), (1, 3), (3, 4)] {
            f.add(a, b).unwrap();
            f.audit().unwrap();
        }
        assert_eq!(f.tour_vertices(0).len(), 5 + 2 * 4);
    }

    #[test]
    fn many_singletons() {
        let mut f = forest(10_000);
        f.audit().unwrap();
        assert!(!f.connected(0, 9_999));
    }

    #[test]
    fn long_path_stays_balanced() {
        let n = 2_000;
        let mut f = forest(n);
        for i in 1..n {
            f.add(i - 1, i).unwrap();
        }
        f.audit().unwrap();
        assert!(f.connected(0, n - 1));
        f.remove(n / 2, n / 2 - 1).unwrap();
        f.audit().unwrap();
        assert!(!f.connected(0, n - 1));
        assert!(f.connected(0, n / 2 - 1));
    }

    fn components(n: usize, edges: &[(u32, u32)]) -> Vec<usize> {
        let mut label: Vec<usize> = (0..n).collect();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a as usize].push(b as usize);
            adj[b as usize].push(a as usize);
        }
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(x) = stack.pop() {
                label[x] = s;
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        label
    }

    #[test]
    fn random_script_matches_components() {
        let n = 60u32;
        let mut f = forest(n);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for _ in 0..3_000 {
            let comp = components(n as usize, &edges);
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            match rng.gen_range(0..3) {
                0 if a != b && comp[a as usize] != comp[b as usize] => {
                    f.add(a, b).unwrap();
                    edges.push((a, b));
                }
                1 if !edges.is_empty() => {
                    let i = rng.gen_range(0..edges.len());
                    let (x, y) = edges.swap_remove(i);
                    f.remove(x, y).unwrap();
                }
                _ => {
                    assert_eq!(f.connected(a, b), comp[a as usize] == comp[b as usize]);
                }
            }
            f.audit().unwrap();
        }
    }
}
