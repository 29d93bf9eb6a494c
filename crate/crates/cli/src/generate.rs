//! Seeded random instance generators and vertex-cover instances.
//!
//! All randomness comes from a caller-supplied RNG; the CLI seeds a
//! ChaCha8 generator so that a seed always yields the same bytes.

use std::collections::BTreeMap;

use bilevel_core::knapsack::KnapsackInstance;
use bilevel_core::leader::Graph;
use bilevel_core::rational::{int, rat};
use bilevel_core::{
    CostMap, DuSet, Instance, IntervalSet, ItemId, ItemSet, Policy, Rational, Scenario, UncertaintySet,
};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used for every seeded generation.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Family of the generated uncertainty set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncertaintyKind {
    /// A single scenario.
    Certain,
    /// `set_size` explicit scenarios.
    Discrete,
    /// Random intervals.
    Interval,
    /// `set_size` values per item.
    Du,
}

/// Parameters of a random selection instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionParams {
    /// Size of the universe `E_l ∪ E_f`.
    pub n: usize,
    /// Leader and follower items are disjoint.
    pub disjoint: bool,
    pub uncertainty: UncertaintyKind,
    /// Number of scenarios (discrete) or values per item (value sets).
    pub set_size: usize,
    /// Leader costs are drawn from `0..=9` instead of `−5..=5`.
    pub nonneg: bool,
    /// Upper bound on the number of follower items.
    pub max_follower: Option<usize>,
    pub policy: Policy,
}

impl SelectionParams {
    pub fn new(n: usize, uncertainty: UncertaintyKind) -> Self {
        SelectionParams {
            n,
            disjoint: false,
            uncertainty,
            set_size: 2,
            nonneg: false,
            max_follower: None,
            policy: Policy::Pessimistic,
        }
    }
}

fn small(rng: &mut impl Rng) -> Rational {
    int(rng.gen_range(-5..=5))
}

/// A random selection instance with an uncertainty set over its follower
/// items. Every instance has at least one follower item.
pub fn random_selection(rng: &mut impl Rng, p: &SelectionParams) -> (Instance, UncertaintySet) {
    assert!(p.n >= 1, "a universe needs at least one item");
    let cap = p.max_follower.unwrap_or(p.n).clamp(1, p.n);
    let ids: Vec<ItemId> = (1..=p.n as u32).map(ItemId).collect();
    let (mut leaders, mut followers) = (ItemSet::new(), ItemSet::new());
    if p.disjoint {
        let n_f = rng.gen_range(1..=cap);
        for (i, e) in ids.iter().enumerate() {
            if i < p.n - n_f {
                leaders.insert(*e);
            } else {
                followers.insert(*e);
            }
        }
    } else {
        for e in &ids {
            match rng.gen_range(0..3) {
                0 => leaders.insert(*e),
                1 => followers.insert(*e),
                _ => leaders.insert(*e) && followers.insert(*e),
            };
        }
        if followers.is_empty() {
            followers.insert(ids[rng.gen_range(0..p.n)]);
        }
        while followers.len() > cap {
            let e = *followers.iter().next().unwrap();
            followers.remove(&e);
            leaders.insert(e);
        }
    }
    let cost: CostMap =
        ids.iter().map(|e| (*e, if p.nonneg { int(rng.gen_range(0..=9)) } else { small(rng) })).collect();
    let b = rng.gen_range(0..=p.n);
    let instance = Instance::new(leaders, followers.clone(), b, cost, p.policy).expect("generated instances are valid");
    let k = p.set_size.max(1);
    let u = match p.uncertainty {
        UncertaintyKind::Certain => UncertaintySet::Discrete(vec![scenario(rng, &followers)]),
        UncertaintyKind::Discrete => UncertaintySet::Discrete((0..k).map(|_| scenario(rng, &followers)).collect()),
        UncertaintyKind::Interval => {
            let mut lo = CostMap::new();
            let mut hi = CostMap::new();
            for e in &followers {
                let l: i64 = rng.gen_range(-5..=5);
                lo.insert(*e, int(l));
                hi.insert(*e, int(l + rng.gen_range(0..=4)));
            }
            UncertaintySet::Interval(IntervalSet::new(lo, hi).expect("lo ≤ hi"))
        }
        UncertaintyKind::Du => UncertaintySet::DiscreteUncorrelated(value_sets(rng, &followers, k, -5, 5)),
    };
    (instance, u)
}

fn scenario(rng: &mut impl Rng, items: &ItemSet) -> Scenario {
    Scenario::new(items.iter().map(|e| (*e, small(rng))).collect())
}

/// `k` distinct integer values from `lo..=hi` per item.
fn value_sets(rng: &mut impl Rng, items: &ItemSet, k: usize, lo: i64, hi: i64) -> DuSet {
    let width = (hi - lo + 1) as usize;
    let values: BTreeMap<ItemId, Vec<Rational>> = items
        .iter()
        .map(|e| (*e, sample(rng, width, k.min(width)).into_iter().map(|v| int(lo + v as i64)).collect()))
        .collect();
    DuSet::new(values).expect("non-empty value sets")
}

/// Parameters of a random knapsack instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnapsackParams {
    pub n: usize,
    /// Sizes are drawn from `1..=max_size`.
    pub max_size: u64,
    /// Values per item in the follower's value sets.
    pub set_size: usize,
}

/// A random knapsack instance; the capacity range has endpoints on the
/// half-integers of `[0, a(E)]`.
pub fn random_knapsack(rng: &mut impl Rng, p: &KnapsackParams) -> KnapsackInstance {
    let ids: ItemSet = (1..=p.n as u32).map(ItemId).collect();
    let size: BTreeMap<ItemId, u64> = ids.iter().map(|e| (*e, rng.gen_range(1..=p.max_size))).collect();
    let leader: CostMap = ids.iter().map(|e| (*e, small(rng))).collect();
    let total: u64 = size.values().sum();
    let halves = 2 * total as i64;
    let (a, b) = (rng.gen_range(0..=halves), rng.gen_range(0..=halves));
    let du = value_sets(rng, &ids, p.set_size.max(1), 1, 6);
    KnapsackInstance::new(size, leader, rat(a.min(b), 2), rat(a.max(b), 2), du).expect("generated instances are valid")
}

/// Graphs by name: `C<n>` (cycle), `K<n>` (complete), `P<n>` (path),
/// `S<n>` (star with `n` vertices).
pub fn named_graph(name: &str) -> Option<Graph> {
    let n: usize = name.get(1..)?.parse().ok()?;
    let edges: Vec<(usize, usize)> = match name.chars().next()? {
        'C' if n >= 3 => (0..n).map(|v| (v, (v + 1) % n)).collect(),
        'K' => (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
        'P' => (1..n).map(|v| (v - 1, v)).collect(),
        'S' => (1..n).map(|v| (0, v)).collect(),
        _ => return None,
    };
    Graph::new(n, edges).ok()
}

/// A random simple graph on `n` vertices, each edge present with
/// probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(p)).collect();
    Graph::new(n, edges).expect("simple graph")
}
