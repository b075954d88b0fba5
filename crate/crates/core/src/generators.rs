//! Benchmark trace families.
//!
//! Basic families (line, cycle, complete, complete-acyclic, bipartite) come
//! in forward or backward visit order and in a dead or unknown variant. In
//! the unknown variant the last state in visit order is never closed, and
//! every other state that would have no outgoing edge gets one into it.
//!
//! Random families (sparse, dense) use forward order. Randomness comes from
//! xoshiro256++ seeded through `seed_from_u64`, so a spec produces the same
//! bytes on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::trace::{Trace, Update};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Line,
    Cycle,
    Complete,
    CompleteAcyclic,
    Bipartite,
    Sparse,
    Dense,
}

impl Family {
    pub const BASIC: [Family; 5] = [
        Family::Line,
        Family::Cycle,
        Family::Complete,
        Family::CompleteAcyclic,
        Family::Bipartite,
    ];

    pub fn is_random(self) -> bool {
        matches!(self, Family::Sparse | Family::Dense)
    }

    /// Largest size used in suites.
    pub fn cap(self) -> u32 {
        match self {
            Family::Line | Family::Cycle | Family::Sparse => 100_000,
            Family::Dense => 10_000,
            _ => 1_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Fwd,
    Bwd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Dead,
    Unknown,
}

macro_rules! named_enum {
    ($t:ty, $($v:path => $s:literal),+) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($v => $s),+ })
            }
        }

        impl FromStr for $t {
            type Err = GenError;

            fn from_str(s: &str) -> Result<Self, GenError> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(GenError::UnknownName(s.to_string())),
                }
            }
        }
    };
}

named_enum!(Family,
    Family::Line => "line",
    Family::Cycle => "cycle",
    Family::Complete => "complete",
    Family::CompleteAcyclic => "complete_acyclic",
    Family::Bipartite => "bipartite",
    Family::Sparse => "sparse",
    Family::Dense => "dense");
named_enum!(Order, Order::Fwd => "fwd", Order::Bwd => "bwd");
named_enum!(Variant, Variant::Dead => "dead", Variant::Unknown => "unknown");

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("n must be at least {min} for this family, got {n}")]
    TooSmall { n: u32, min: u32 },
    #[error("{0} graphs are generated in visit order only")]
    OrderFixed(Family),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("unknown suite `{0}` (expected basic or random)")]
    UnknownSuite(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub n: u32,
    pub order: Order,
    pub variant: Variant,
    /// Out-degree, sparse only.
    pub degree: u32,
    /// Edge probability, dense only.
    pub p: f64,
    /// Random families only.
    pub seed: u64,
}

impl GenSpec {
    pub fn basic(family: Family, n: u32, order: Order, variant: Variant) -> Self {
        GenSpec {
            family,
            n,
            order,
            variant,
            degree: 0,
            p: 0.0,
            seed: 0,
        }
    }

    pub fn sparse(n: u32, degree: u32, seed: u64) -> Self {
        GenSpec {
            degree,
            seed,
            ..Self::basic(Family::Sparse, n, Order::Fwd, Variant::Dead)
        }
    }

    pub fn dense(n: u32, p: f64, seed: u64) -> Self {
        GenSpec {
            p,
            seed,
            ..Self::basic(Family::Dense, n, Order::Fwd, Variant::Dead)
        }
    }

    /// Short unique name, e.g. `line-bwd-dead-1000` or `sparse-d3-s7-1000`.
    pub fn name(&self) -> String {
        match self.family {
            Family::Sparse => format!("sparse-d{}-s{}-{}", self.degree, self.seed, self.n),
            Family::Dense => format!("dense-p{}-s{}-{}", self.p, self.seed, self.n),
            f => format!("{}-{}-{}-{}", f, self.order, self.variant, self.n),
        }
    }

    /// One-line description used as the trace header.
    pub fn provenance(&self) -> String {
        let mut s = format!(
            "gid-gen family={} n={} order={} variant={}",
            self.family, self.n, self.order, self.variant
        );
        match self.family {
            Family::Sparse => s += &format!(" degree={} seed={} rng=xoshiro256++", self.degree, self.seed),
            Family::Dense => s += &format!(" p={} seed={} rng=xoshiro256++", self.p, self.seed),
            _ => {}
        }
        s
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Builds the trace for `spec`.
pub fn generate(spec: &GenSpec) -> Result<Trace, GenError> {
    let n = spec.n;
    let min = match (spec.family, spec.variant) {
        (_, Variant::Unknown) => 2,
        (Family::Cycle | Family::Bipartite, _) => 2,
        _ => 1,
    };
    if n < min {
        return Err(GenError::TooSmall { n, min });
    }
    if spec.family.is_random() && spec.order == Order::Bwd {
        return Err(GenError::OrderFixed(spec.family));
    }
    if spec.family == Family::Dense && !(0.0..=1.0).contains(&spec.p) {
        return Err(GenError::Probability(spec.p));
    }

    let visit: Vec<u32> = match spec.order {
        Order::Fwd => (1..=n).collect(),
        Order::Bwd => (1..=n).rev().collect(),
    };
    let block = |v: u32, rng: &mut Xoshiro256PlusPlus| -> Vec<u32> {
        match spec.family {
            Family::Line | Family::Cycle => unreachable!("chains are emitted separately"),
            Family::Complete => (1..=n).filter(|&w| w != v).collect(),
            Family::CompleteAcyclic => (v + 1..=n).collect(),
            Family::Bipartite => {
                let half = n.div_ceil(2);
                if v <= half {
                    (half + 1..=n).collect()
                } else {
                    (1..=half).collect()
                }
            }
            Family::Sparse => (0..spec.degree).map(|_| rng.gen_range(1..=n)).collect(),
            Family::Dense => (1..=n).filter(|&w| w != v && rng.gen_bool(spec.p)).collect(),
        }
    };

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let open = *visit.last().unwrap();
    let mut updates = Vec::new();
    // Line and cycle emit each state's edge before closing the previous
    // state: E(1,2), C(1), E(2,3), C(2), ...
    let chain = matches!(spec.family, Family::Line | Family::Cycle);
    if chain {
        for i in 1..n {
            match spec.order {
                Order::Fwd => updates.extend([Update::edge(i, i + 1), Update::closed(i)]),
                Order::Bwd => updates.extend([Update::edge(i + 1, i), Update::closed(i + 1)]),
            }
        }
        // the state never closed in the chain loop
        let last = match spec.order {
            Order::Fwd => n,
            Order::Bwd => 1,
        };
        if spec.family == Family::Cycle {
            match spec.order {
                Order::Fwd => updates.push(Update::edge(n, 1)),
                Order::Bwd => updates.push(Update::edge(1, n)),
            }
        }
        if spec.variant == Variant::Dead {
            updates.push(Update::closed(last));
        }
        return Ok(Trace::new(updates));
    }
    for &v in &visit {
        let mut out = block(v, &mut rng);
        if spec.variant == Variant::Unknown && out.is_empty() && v != open {
            out.push(open);
        }
        updates.extend(out.into_iter().map(|w| Update::edge(v, w)));
        if spec.variant == Variant::Dead || v != open {
            updates.push(Update::closed(v));
        }
    }
    Ok(Trace::new(updates))
}

/// Trace text with the provenance header.
pub fn render(spec: &GenSpec, trace: &Trace) -> String {
    format!("# {}\n{}", spec.provenance(), trace.serialize())
}

/// 10, 30, 100, 300, ... up to `cap` inclusive.
pub fn ladder(cap: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut k = 10u64;
    while k <= cap as u64 {
        out.push(k as u32);
        out.push((3 * k) as u32);
        k *= 10;
    }
    out.retain(|&s| s <= cap);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Basic,
    Random,
}

impl FromStr for SuiteName {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "basic" => Ok(SuiteName::Basic),
            "random" => Ok(SuiteName::Random),
            _ => Err(GenError::UnknownSuite(s.to_string())),
        }
    }
}

pub const SPARSE_DEGREES: [u32; 4] = [1, 2, 3, 10];
pub const DENSE_PS: [f64; 3] = [0.01, 0.02, 0.03];
pub const SEEDS: std::ops::Range<u64> = 0..10;

/// The parameter grid of a suite, smallest sizes first within each family.
pub fn suite_specs(name: SuiteName) -> Vec<GenSpec> {
    let mut out = Vec::new();
    match name {
        SuiteName::Basic => {
            for family in Family::BASIC {
                for n in ladder(family.cap()) {
                    for order in [Order::Fwd, Order::Bwd] {
                        for variant in [Variant::Dead, Variant::Unknown] {
                            out.push(GenSpec::basic(family, n, order, variant));
                        }
                    }
                }
            }
        }
        SuiteName::Random => {
            for degree in SPARSE_DEGREES {
                for n in ladder(Family::Sparse.cap()) {
                    for seed in SEEDS {
                        out.push(GenSpec::sparse(n, degree, seed));
                    }
                }
            }
            for p in DENSE_PS {
                for n in ladder(Family::Dense.cap()) {
                    for seed in SEEDS {
                        out.push(GenSpec::dense(n, p, seed));
                    }
                }
            }
        }
    }
    out
}

/// Suite traces, generated on demand.
pub fn suite(name: SuiteName) -> impl Iterator<Item = (GenSpec, Trace)> {
    suite_specs(name).into_iter().map(|s| {
        let t = generate(&s).expect("suite specs are valid");
        (s, t)
    })
}
