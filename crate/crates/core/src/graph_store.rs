//! Shared graph backend used by every engine.
//!
//! Edge lists are singly linked lists whose nodes live in one
//! index-addressed [`EdgeArena`]. A list is just a `(head, tail)` handle, so
//! appending and concatenating are O(1) regardless of length, which is what
//! lets union-find merges combine the edge lists of two classes without
//! touching their contents. Edges always record their original endpoints;
//! canonicalization happens when an edge is read.
//!
//! [`Registry`] renumbers external [`StateId`]s into dense `u32` indices so
//! that all per-state data can live in plain vectors.

use rustc_hash::FxHashMap;

use crate::trace::StateId;

pub(crate) const NIL: u32 = u32::MAX;

/// A directed edge between two dense state indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeRecord {
    pub src: u32,
    pub dst: u32,
}

impl EdgeRecord {
    pub fn new(src: u32, dst: u32) -> Self {
        EdgeRecord { src, dst }
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    edge: EdgeRecord,
    next: u32,
}

/// Handle to a list stored in an [`EdgeArena`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeList {
    head: u32,
    tail: u32,
}

impl Default for EdgeList {
    fn default() -> Self {
        EdgeList::EMPTY
    }
}

impl EdgeList {
    pub const EMPTY: EdgeList = EdgeList {
        head: NIL,
        tail: NIL,
    };

    pub fn is_empty(&self) -> bool {
        self.head == NIL
    }

    /// Node index of the first element, if any.
    pub fn head_node(&self) -> Option<u32> {
        (self.head != NIL).then_some(self.head)
    }
}

/// Node storage for every [`EdgeList`] of one engine.
#[derive(Clone, Debug, Default)]
pub struct EdgeArena {
    nodes: Vec<Node>,
    writes: u64,
}

impl EdgeArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        EdgeArena {
            nodes: Vec::with_capacity(n),
            writes: 0,
        }
    }

    /// Total node slots ever allocated.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of node writes performed by `append`, `concat` and `pop_front`.
    pub fn node_writes(&self) -> u64 {
        self.writes
    }

    /// Appends `e` and returns the index of the new node.
    pub fn append(&mut self, list: &mut EdgeList, e: EdgeRecord) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { edge: e, next: NIL });
        self.writes += 1;
        if list.tail == NIL {
            list.head = id;
        } else {
            self.nodes[list.tail as usize].next = id;
            self.writes += 1;
        }
        list.tail = id;
        id
    }

    /// `a` followed by `b`. Both inputs are consumed.
    pub fn concat(&mut self, a: EdgeList, b: EdgeList) -> EdgeList {
        if a.is_empty() {
            return b;
        }
        if b.is_empty() {
            return a;
        }
        self.nodes[a.tail as usize].next = b.head;
        self.writes += 1;
        EdgeList {
            head: a.head,
            tail: b.tail,
        }
    }

    pub fn pop_front(&mut self, list: &mut EdgeList) -> Option<EdgeRecord> {
        if list.head == NIL {
            return None;
        }
        let node = self.nodes[list.head as usize];
        if list.head == list.tail {
            *list = EdgeList::EMPTY;
        } else {
            list.head = node.next;
        }
        Some(node.edge)
    }

    /// Removes `node` from `list`; `prev` is the node before it, `None` if
    /// `node` is the head.
    pub fn unlink(&mut self, list: &mut EdgeList, prev: Option<u32>, node: u32) {
        let next = self.nodes[node as usize].next;
        match prev {
            None if node == list.tail => *list = EdgeList::EMPTY,
            None => list.head = next,
            Some(p) => {
                self.nodes[p as usize].next = next;
                self.writes += 1;
                if node == list.tail {
                    list.tail = p;
                }
            }
        }
    }

    pub fn front(&self, list: &EdgeList) -> Option<EdgeRecord> {
        (list.head != NIL).then(|| self.nodes[list.head as usize].edge)
    }

    pub fn back(&self, list: &EdgeList) -> Option<EdgeRecord> {
        (list.tail != NIL).then(|| self.nodes[list.tail as usize].edge)
    }

    pub fn edge(&self, node: u32) -> EdgeRecord {
        self.nodes[node as usize].edge
    }

    /// Node following `node` within the list ending at `tail`.
    pub fn next_in(&self, node: u32, list: &EdgeList) -> Option<u32> {
        if node == list.tail {
            None
        } else {
            let n = self.nodes[node as usize].next;
            (n != NIL).then_some(n)
        }
    }

    pub fn iter<'a>(&'a self, list: &EdgeList) -> EdgeIter<'a> {
        EdgeIter {
            arena: self,
            cur: list.head,
            tail: list.tail,
        }
    }

    /// Node indices in list order.
    pub fn node_ids<'a>(&'a self, list: &EdgeList) -> impl Iterator<Item = u32> + 'a {
        let tail = list.tail;
        let mut cur = list.head;
        std::iter::from_fn(move || {
            if cur == NIL {
                return None;
            }
            let id = cur;
            cur = if id == tail {
                NIL
            } else {
                self.nodes[id as usize].next
            };
            Some(id)
        })
    }
}

pub struct EdgeIter<'a> {
    arena: &'a EdgeArena,
    cur: u32,
    tail: u32,
}

impl Iterator for EdgeIter<'_> {
    type Item = EdgeRecord;

    fn next(&mut self) -> Option<EdgeRecord> {
        if self.cur == NIL {
            return None;
        }
        let node = self.arena.nodes[self.cur as usize];
        self.cur = if self.cur == self.tail { NIL } else { node.next };
        Some(node.edge)
    }
}

/// Dense renumbering of external state ids, plus the per-state closed flag
/// every engine needs for validity checks.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    direct: Vec<u32>,
    sparse: FxHashMap<u32, u32>,
    ids: Vec<StateId>,
    closed: Vec<bool>,
}

/// Ids below this bound are looked up in a flat table.
const DIRECT_LIMIT: u32 = 1 << 22;

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, s: StateId) -> Option<u32> {
        if s.0 < DIRECT_LIMIT {
            match self.direct.get(s.0 as usize) {
                Some(&d) if d != NIL => Some(d),
                _ => None,
            }
        } else {
            self.sparse.get(&s.0).copied()
        }
    }

    /// Returns the dense index of `s` and whether it was newly registered.
    pub fn intern(&mut self, s: StateId) -> (u32, bool) {
        if let Some(d) = self.get(s) {
            return (d, false);
        }
        let d = self.ids.len() as u32;
        if s.0 < DIRECT_LIMIT {
            let i = s.0 as usize;
            if self.direct.len() <= i {
                let new_len = (i + 1).max(self.direct.len() * 2).min(DIRECT_LIMIT as usize);
                self.direct.resize(new_len, NIL);
            }
            self.direct[i] = d;
        } else {
            self.sparse.insert(s.0, d);
        }
        self.ids.push(s);
        self.closed.push(false);
        (d, true)
    }

    pub fn external(&self, d: u32) -> StateId {
        self.ids[d as usize]
    }

    pub fn is_closed(&self, d: u32) -> bool {
        self.closed[d as usize]
    }

    /// Marks `d` closed; returns false if it already was.
    pub fn close(&mut self, d: u32) -> bool {
        !std::mem::replace(&mut self.closed[d as usize], true)
    }
}

/// Reusable traversal scratch space: an epoch-stamped visited set and a stack.
#[derive(Clone, Debug, Default)]
pub struct Traversal {
    stamp: Vec<u32>,
    epoch: u32,
    pub stack: Vec<u32>,
}

impl Traversal {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts a new traversal over `n` states.
    pub fn reset(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.stack.clear();
    }

    /// Marks `v`; returns true if it was not yet marked in this traversal.
    pub fn visit(&mut self, v: u32) -> bool {
        let slot = &mut self.stamp[v as usize];
        if *slot == self.epoch {
            false
        } else {
            *slot = self.epoch;
            true
        }
    }

    pub fn visited(&self, v: u32) -> bool {
        self.stamp[v as usize] == self.epoch
    }
}

/// Depth-first search along backward edges.
///
/// Starting from `start`, follows every edge `(u, v)` in `incoming(v)` to
/// `canon(u)` and visits states accepted by `filter`. Each reachable
/// filter-passing state is visited once and each of its incoming edges is
/// inspected once. Returns the visited states in visit order; `on_edge` is
/// called once per inspected edge.
pub fn dfs_reverse<I, C, F, E>(
    start: u32,
    n: usize,
    scratch: &mut Traversal,
    mut incoming: I,
    mut canon: C,
    mut filter: F,
    mut on_edge: E,
) -> Vec<u32>
where
    I: FnMut(u32) -> Vec<EdgeRecord>,
    C: FnMut(u32) -> u32,
    F: FnMut(u32) -> bool,
    E: FnMut(),
{
    let mut order = Vec::new();
    scratch.reset(n);
    if !filter(start) {
        return order;
    }
    scratch.visit(start);
    scratch.stack.push(start);
    while let Some(v) = scratch.stack.pop() {
        order.push(v);
        for e in incoming(v) {
            on_edge();
            let p = canon(e.src);
            if !scratch.visited(p) && filter(p) {
                scratch.visit(p);
                scratch.stack.push(p);
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(arena: &EdgeArena, l: &EdgeList) -> Vec<(u32, u32)> {
        arena.iter(l).map(|e| (e.src, e.dst)).collect()
    }

    #[test]
    fn unlink_head_middle_tail() {
        let mut a = EdgeArena::new();
        let mut l = EdgeList::EMPTY;
        let ids: Vec<u32> = (0..4).map(|i| a.append(&mut l, EdgeRecord::new(i, i))).collect();
        a.unlink(&mut l, Some(ids[1]), ids[2]);
        a.unlink(&mut l, None, ids[0]);
        a.unlink(&mut l, Some(ids[1]), ids[3]);
        assert_eq!(a.iter(&l).map(|e| e.src).collect::<Vec<_>>(), vec![1]);
        a.append(&mut l, EdgeRecord::new(9, 9));
        assert_eq!(a.iter(&l).map(|e| e.src).collect::<Vec<_>>(), vec![1, 9]);
        a.unlink(&mut l, None, ids[1]);
        let head = l.head_node().unwrap();
        a.unlink(&mut l, None, head);
        assert!(l.is_empty());
    }

    #[test]
    fn append_keeps_order() {
        let mut a = EdgeArena::new();
        let mut l = EdgeList::EMPTY;
        a.append(&mut l, EdgeRecord::new(1, 2));
        assert_eq!(collect(&a, &l), vec![(1, 2)]);
        a.append(&mut l, EdgeRecord::new(1, 3));
        assert_eq!(collect(&a, &l), vec![(1, 2), (1, 3)]);
    }

    #[test]
    fn concat_and_identity() {
        let mut a = EdgeArena::new();
        let mut x = EdgeList::EMPTY;
        let mut y = EdgeList::EMPTY;
        a.append(&mut x, EdgeRecord::new(1, 2));
        a.append(&mut y, EdgeRecord::new(3, 4));
        let xy = a.concat(x, y);
        assert_eq!(collect(&a, &xy), vec![(1, 2), (3, 4)]);
        let same = a.concat(EdgeList::EMPTY, xy);
        assert_eq!(collect(&a, &same), vec![(1, 2), (3, 4)]);
        let same = a.concat(same, EdgeList::EMPTY);
        assert_eq!(collect(&a, &same), vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn appends_cost_constant_writes() {
        let mut a = EdgeArena::new();
        let mut l = EdgeList::EMPTY;
        for i in 0..100_000 {
            a.append(&mut l, EdgeRecord::new(0, i));
        }
        assert!(a.node_writes() <= 2 * 100_000);
        assert_eq!(a.iter(&l).count(), 100_000);
    }

    #[test]
    fn concat_of_long_lists_is_one_write() {
        let mut a = EdgeArena::new();
        let mut x = EdgeList::EMPTY;
        let mut y = EdgeList::EMPTY;
        for i in 0..10_000 {
            a.append(&mut x, EdgeRecord::new(0, i));
            a.append(&mut y, EdgeRecord::new(1, i));
        }
        let before = a.node_writes();
        let z = a.concat(x, y);
        assert_eq!(a.node_writes() - before, 1);
        assert_eq!(a.iter(&z).count(), 20_000);
    }

    #[test]
    fn pop_front_drains_in_order() {
        let mut a = EdgeArena::new();
        let mut l = EdgeList::EMPTY;
        for i in 0..3 {
            a.append(&mut l, EdgeRecord::new(i, i + 1));
        }
        let mut got = Vec::new();
        while let Some(e) = a.pop_front(&mut l) {
            got.push(e.src);
        }
        assert_eq!(got, vec![0, 1, 2]);
        assert!(l.is_empty());
        // reuse after draining
        a.append(&mut l, EdgeRecord::new(9, 9));
        assert_eq!(collect(&a, &l), vec![(9, 9)]);
    }

    #[test]
    fn popped_prefix_does_not_leak_into_concat() {
        let mut a = EdgeArena::new();
        let mut x = EdgeList::EMPTY;
        let mut y = EdgeList::EMPTY;
        a.append(&mut x, EdgeRecord::new(1, 1));
        a.append(&mut x, EdgeRecord::new(1, 2));
        a.append(&mut y, EdgeRecord::new(2, 2));
        a.pop_front(&mut x);
        let z = a.concat(x, y);
        assert_eq!(collect(&a, &z), vec![(1, 2), (2, 2)]);
    }

    #[test]
    fn registry_dense_and_sparse_ids() {
        let mut r = Registry::new();
        assert_eq!(r.intern(StateId(5)), (0, true));
        assert_eq!(r.intern(StateId(u32::MAX)), (1, true));
        assert_eq!(r.intern(StateId(5)), (0, false));
        assert_eq!(r.external(1), StateId(u32::MAX));
        assert_eq!(r.get(StateId(6)), None);
        assert!(r.close(0));
        assert!(!r.close(0));
    }

    #[test]
    fn dfs_reverse_on_figure_graph() {
        // bck(2) = [(1,2)], bck(3) = [(1,3),(4,3)]
        let mut a = EdgeArena::new();
        let mut bck = [EdgeList::EMPTY; 5];
        a.append(&mut bck[2], EdgeRecord::new(1, 2));
        a.append(&mut bck[3], EdgeRecord::new(1, 3));
        a.append(&mut bck[3], EdgeRecord::new(4, 3));
        let mut t = Traversal::new();
        let mut seen = dfs_reverse(
            2,
            5,
            &mut t,
            |v| a.iter(&bck[v as usize]).collect(),
            |u| u,
            |_| true,
            || {},
        );
        seen.sort();
        assert_eq!(seen, vec![1, 2]);

        let only = dfs_reverse(0, 5, &mut t, |v| a.iter(&bck[v as usize]).collect(), |u| u, |_| true, || {});
        assert_eq!(only, vec![0]);
    }
}
