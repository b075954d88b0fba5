//! Disjoint sets over dense `u32` ids with class iteration.
//!
//! Union by rank with path halving. Every class also threads its members on a
//! circular successor ring, spliced in O(1) on union, so a class can be
//! listed in time proportional to its size.
//!
//! Which member ends up canonical is an implementation detail; with a tie
//! seed, rank ties are broken pseudo-randomly so callers can check they never
//! depend on it.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UfCounters {
    pub finds: u64,
    /// Parent pointers followed across all finds.
    pub hops: u64,
    pub unions: u64,
}

#[derive(Clone, Debug, Default)]
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
    size: Vec<u32>,
    ring: Vec<u32>,
    ties: Option<Xoshiro256PlusPlus>,
    counters: UfCounters,
}

impl UnionFind {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rank ties are decided by a generator seeded with `seed`.
    pub fn with_tie_seed(seed: u64) -> Self {
        UnionFind {
            ties: Some(Xoshiro256PlusPlus::seed_from_u64(seed)),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Adds a singleton and returns its id.
    pub fn push(&mut self) -> u32 {
        let v = self.parent.len() as u32;
        self.parent.push(v);
        self.rank.push(0);
        self.size.push(1);
        self.ring.push(v);
        v
    }

    pub fn find(&mut self, mut v: u32) -> u32 {
        self.counters.finds += 1;
        loop {
            let p = self.parent[v as usize];
            if p == v {
                return v;
            }
            let gp = self.parent[p as usize];
            self.parent[v as usize] = gp;
            self.counters.hops += 1;
            v = gp;
        }
    }

    /// `find` without path compression or counting, for audits.
    pub fn find_const(&self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
        }
        v
    }

    pub fn is_canonical(&self, v: u32) -> bool {
        self.parent[v as usize] == v
    }

    /// Merges the classes of `a` and `b` and returns the new canonical id.
    pub fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return ra;
        }
        self.counters.unions += 1;
        let (ka, kb) = (self.rank[ra as usize], self.rank[rb as usize]);
        let a_wins = match ka.cmp(&kb) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match self.ties.as_mut() {
                Some(rng) => rng.gen_bool(0.5),
                None => true,
            },
        };
        let (win, lose) = if a_wins { (ra, rb) } else { (rb, ra) };
        self.parent[lose as usize] = win;
        if ka == kb {
            self.rank[win as usize] += 1;
        }
        self.size[win as usize] += self.size[lose as usize];
        self.ring.swap(win as usize, lose as usize);
        win
    }

    /// Number of members in the class of canonical `x`.
    pub fn size(&self, x: u32) -> u32 {
        self.size[self.find_const(x) as usize]
    }

    /// Members of `v`'s class, starting at `v`.
    pub fn iter(&self, v: u32) -> ClassIter<'_> {
        ClassIter {
            ring: &self.ring,
            start: v,
            cur: Some(v),
        }
    }

    pub fn counters(&self) -> UfCounters {
        self.counters
    }
}

pub struct ClassIter<'a> {
    ring: &'a [u32],
    start: u32,
    cur: Option<u32>,
}

impl Iterator for ClassIter<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let v = self.cur?;
        let n = self.ring[v as usize];
        self.cur = (n != self.start).then_some(n);
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uf(n: usize) -> UnionFind {
        let mut u = UnionFind::new();
        for _ in 0..n {
            u.push();
        }
        u
    }

    fn members(u: &UnionFind, v: u32) -> Vec<u32> {
        let mut m: Vec<u32> = u.iter(v).collect();
        m.sort();
        m
    }

    #[test]
    fn singleton_is_its_own_class() {
        let mut u = uf(6);
        assert_eq!(u.find(5), 5);
        assert_eq!(members(&u, 5), vec![5]);
    }

    #[test]
    fn self_union_is_noop() {
        let mut u = uf(2);
        let r = u.union(1, 1);
        assert_eq!(r, 1);
        assert_eq!(u.counters().unions, 0);
        assert_eq!(members(&u, 1), vec![1]);
    }

    #[test]
    fn chained_unions_share_a_ring() {
        let mut u = uf(4);
        u.union(1, 2);
        u.union(2, 3);
        assert_eq!(u.find(1), u.find(3));
        assert_eq!(members(&u, 1), vec![1, 2, 3]);
        assert_eq!(members(&u, 0), vec![0]);
        assert_eq!(u.size(3), 3);
    }

    #[test]
    fn random_unions_match_relabelling() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for seed in 0..4 {
            let n = 200;
            let mut u = UnionFind::with_tie_seed(seed);
            for _ in 0..n {
                u.push();
            }
            let mut label: Vec<u32> = (0..n).collect();
            for _ in 0..300 {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                u.union(a, b);
                let (la, lb) = (label[a as usize], label[b as usize]);
                for l in label.iter_mut() {
                    if *l == lb {
                        *l = la;
                    }
                }
                for v in 0..n {
                    for w in [a, b, (v * 7) % n] {
                        assert_eq!(
                            u.find(v) == u.find(w),
                            label[v as usize] == label[w as usize]
                        );
                    }
                }
            }
            let total: u32 = (0..n).filter(|&v| u.is_canonical(v)).map(|v| u.size(v)).sum();
            assert_eq!(total, n);
            for v in 0..n {
                let mine: Vec<u32> = members(&u, v);
                let want: Vec<u32> = (0..n).filter(|&w| label[w as usize] == label[v as usize]).collect();
                assert_eq!(mine, want);
            }
        }
    }

    #[test]
    fn find_cost_stays_small() {
        let n = 100_000u32;
        let mut u = uf(n as usize);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        for _ in 0..n {
            u.union(rng.gen_range(0..n), rng.gen_range(0..n));
        }
        for _ in 0..n {
            u.find(rng.gen_range(0..n));
        }
        let c = u.counters();
        assert!(c.hops as f64 / c.finds as f64 <= 4.0, "{c:?}");
    }
}
