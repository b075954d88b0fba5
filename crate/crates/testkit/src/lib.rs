//! Reference oracles for tests, kept simple and independent of the engine
//! code.

use std::collections::HashMap;

/// Strongly connected components by recursive Tarjan. Returns a component id
/// per vertex; ids are arbitrary but equal exactly within a component.
pub fn tarjan_scc(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
    }
    struct St<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next: usize,
        ncomp: usize,
    }
    fn go(s: &mut St, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on[v] = true;
        for i in 0..s.adj[v].len() {
            let w = s.adj[v][i];
            match s.index[w] {
                None => {
                    go(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            loop {
                let w = s.stack.pop().unwrap();
                s.on[w] = false;
                s.comp[w] = s.ncomp;
                if w == v {
                    break;
                }
            }
            s.ncomp += 1;
        }
    }
    let mut s = St {
        adj: &adj,
        index: vec![None; n],
        low: vec![0; n],
        on: vec![false; n],
        stack: Vec::new(),
        comp: vec![0; n],
        next: 0,
        ncomp: 0,
    };
    for v in 0..n {
        if s.index[v].is_none() {
            go(&mut s, v);
        }
    }
    s.comp
}

/// Whether two labelings induce the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ab = HashMap::new();
    let mut ba = HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

/// Connectivity of an undirected multigraph, recomputed on every query.
#[derive(Clone, Debug)]
pub struct Components {
    edges: Vec<(usize, usize)>,
    n: usize,
}

impl Components {
    pub fn new(n: usize) -> Self {
        Components { edges: Vec::new(), n }
    }

    pub fn add(&mut self, u: usize, v: usize) {
        self.edges.push((u, v));
    }

    pub fn remove(&mut self, u: usize, v: usize) -> bool {
        match self
            .edges
            .iter()
            .position(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
        {
            Some(i) => {
                self.edges.swap_remove(i);
                true
            }
            None => false,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    /// Component label per vertex, by breadth-first search from scratch.
    pub fn labels(&self) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut label = vec![usize::MAX; self.n];
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = s;
                        queue.push_back(w);
                    }
                }
            }
        }
        label
    }

    pub fn connected(&self, u: usize, v: usize) -> bool {
        let l = self.labels();
        l[u] == l[v]
    }
}

/// Reachability by repeated relaxation; `reach[u][v]` iff a path `u -> v`
/// of length zero or more exists.
pub fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for &(u, v) in edges {
            for row in r.iter_mut() {
                if row[u] && !row[v] {
                    row[v] = true;
                    changed = true;
                }
            }
        }
    }
    r
}
