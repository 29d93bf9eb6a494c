//! Brute-force reference implementations.
//!
//! These enumerate leader sets, scenarios (or realisable follower orders)
//! literally and share nothing with the fast solvers beyond the greedy
//! follower primitives. They refuse to start when the enumeration would
//! exceed an [`OracleBudget`].

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::adversary::FollowerResponse;
use crate::error::{Error, Result};
use crate::greedy::{
    check_fractional_leader, follower_respond, follower_respond_continuous, solve_continuous_selection,
    FractionalSelection,
};
use crate::knapsack::{follower_continuous_knapsack, KnapsackInstance};
use crate::model::{Instance, ItemId, ItemSet, Scenario};
use crate::rational::{from_usize, Rational};
use crate::uncertainty::{DuSet, IntervalSet, UncertaintySet};

/// Limits on brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Largest number of items whose subsets or permutations may be visited.
    pub max_items: usize,
    /// Largest number of scenarios (or follower orders) per evaluation.
    pub max_scenarios: u128,
    /// Largest number of leader subsets.
    pub max_subsets: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_items: 12, max_scenarios: 1_000_000, max_subsets: 1 << 16 }
    }
}

impl OracleBudget {
    fn check(&self, what: &'static str, needed: u128, budget: u128) -> Result<()> {
        if needed > budget {
            Err(Error::BudgetExceeded { what, needed, budget })
        } else {
            Ok(())
        }
    }
}

/// Worst case found by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    /// The leader's total cost in the worst case.
    pub leader_value: Rational,
    /// The follower's response in the worst case.
    pub response: FollowerResponse,
    /// The worst scenario, when the enumeration is over scenarios (interval
    /// sets are enumerated by follower orders instead).
    pub scenario: Option<Scenario>,
}

/// Optimal leader set found by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub leader_set: ItemSet,
    pub worst_value: Rational,
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// Every scenario of a value-set family, in odometer order.
fn du_scenarios(du: &DuSet, items: &ItemSet) -> Result<Vec<Scenario>> {
    let sets: Vec<(ItemId, &[Rational])> = items.iter().map(|e| Ok((*e, du.values_of(*e)?))).collect::<Result<_>>()?;
    let mut idx = vec![0usize; sets.len()];
    let mut out = Vec::new();
    loop {
        out.push(Scenario::new(sets.iter().zip(&idx).map(|((e, vs), i)| (*e, vs[*i].clone())).collect()));
        let mut j = 0;
        while j < sets.len() && idx[j] + 1 == sets[j].1.len() {
            idx[j] = 0;
            j += 1;
        }
        if j == sets.len() {
            return Ok(out);
        }
        idx[j] += 1;
    }
}

/// All length-`depth` prefixes of linear extensions of the interval order
/// on `pool`, generated by appending only items whose forced predecessors
/// are already placed.
fn interval_prefixes(u: &IntervalSet, pool: &[ItemId], depth: usize) -> Result<Vec<Vec<ItemId>>> {
    for e in pool {
        u.lo_of(*e)?;
    }
    fn rec(u: &IntervalSet, pool: &[ItemId], depth: usize, cur: &mut Vec<ItemId>, out: &mut Vec<Vec<ItemId>>) {
        if cur.len() == depth {
            out.push(cur.clone());
            return;
        }
        for &e in pool {
            if cur.contains(&e) {
                continue;
            }
            // Every item that must precede e is already placed.
            let ready = pool.iter().all(|p| *p == e || cur.contains(p) || u.hi()[p] >= u.lo()[&e]);
            if ready {
                cur.push(e);
                rec(u, pool, depth, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(u, pool, depth, &mut Vec::new(), &mut out);
    Ok(out)
}

fn scenario_space(instance: &Instance, u: &UncertaintySet, budget: &OracleBudget) -> Result<Option<Vec<Scenario>>> {
    u.validate(instance.follower_items())?;
    match u {
        UncertaintySet::Discrete(s) => {
            budget.check("scenarios", s.len() as u128, budget.max_scenarios)?;
            Ok(Some(s.clone()))
        }
        UncertaintySet::DiscreteUncorrelated(du) => {
            let count =
                instance.follower_items().iter().fold(1u128, |acc, e| acc.saturating_mul(du.values()[e].len() as u128));
            budget.check("scenarios", count, budget.max_scenarios)?;
            Ok(Some(du_scenarios(du, instance.follower_items())?))
        }
        UncertaintySet::Interval(_) => {
            let n = instance.n_follower();
            budget.check("follower items", n as u128, budget.max_items as u128)?;
            budget.check("follower orders", factorial(n), budget.max_scenarios)?;
            Ok(None)
        }
    }
}

/// Worst case for a binary leader set by enumeration.
pub fn oracle_adversary(
    instance: &Instance,
    u: &UncertaintySet,
    x: &ItemSet,
    budget: &OracleBudget,
) -> Result<OracleOutcome> {
    instance.check_leader_set(x)?;
    let cx = instance.cost_of(x);
    let mut best: Option<OracleOutcome> = None;
    let mut consider = |y: ItemSet, d: Option<Scenario>| {
        let v = &cx + instance.cost_of(&y);
        if best.as_ref().is_none_or(|b| v > b.leader_value) {
            best = Some(OracleOutcome { leader_value: v, response: FollowerResponse::Binary(y), scenario: d });
        }
    };
    match (scenario_space(instance, u, budget)?, u) {
        (Some(scenarios), _) => {
            for d in scenarios {
                consider(follower_respond(instance, x, &d)?, Some(d));
            }
        }
        (None, UncertaintySet::Interval(iv)) => {
            let pool: Vec<ItemId> = instance.follower_items().iter().copied().filter(|e| !x.contains(e)).collect();
            for p in interval_prefixes(iv, &pool, instance.capacity() - x.len())? {
                consider(p.into_iter().collect(), None);
            }
        }
        (None, _) => unreachable!(),
    }
    Ok(best.expect("the scenario space is non-empty"))
}

/// Worst case for a fractional leader vector by enumeration (disjoint sets).
pub fn oracle_adversary_continuous(
    instance: &Instance,
    u: &UncertaintySet,
    x: &FractionalSelection,
    budget: &OracleBudget,
) -> Result<OracleOutcome> {
    let bf = check_fractional_leader(instance, x)?;
    let cx = instance.cost_of_fractional(x);
    let mut best: Option<OracleOutcome> = None;
    let mut consider = |y: FractionalSelection, d: Option<Scenario>| {
        let v = &cx + instance.cost_of_fractional(&y);
        if best.as_ref().is_none_or(|b| v > b.leader_value) {
            best = Some(OracleOutcome { leader_value: v, response: FollowerResponse::Fractional(y), scenario: d });
        }
    };
    match (scenario_space(instance, u, budget)?, u) {
        (Some(scenarios), _) => {
            for d in scenarios {
                consider(follower_respond_continuous(instance, &bf, &d)?, Some(d));
            }
        }
        (None, UncertaintySet::Interval(iv)) => {
            let pool: Vec<ItemId> = instance.follower_items().iter().copied().collect();
            let depth = bf.ceil().to_integer().try_into().expect("small amount");
            for p in interval_prefixes(iv, &pool, depth)? {
                let mut rest = bf.clone();
                let mut y: FractionalSelection = pool.iter().map(|e| (*e, Rational::zero())).collect();
                for e in p {
                    let take = if rest >= Rational::one() { Rational::one() } else { rest.clone() };
                    rest -= &take;
                    y.insert(e, take);
                }
                consider(y, None);
            }
        }
        (None, _) => unreachable!(),
    }
    Ok(best.expect("the scenario space is non-empty"))
}

/// Optimal robust leader set by enumerating every feasible `X ⊆ E_l` in
/// colexicographic order (first optimum wins).
pub fn oracle_rbsp(instance: &Instance, u: &UncertaintySet, budget: &OracleBudget) -> Result<OracleSolution> {
    let n = instance.n_leader();
    budget.check("leader items", n as u128, budget.max_items as u128)?;
    budget.check("leader subsets", 1u128 << n, budget.max_subsets)?;
    let leaders: Vec<ItemId> = instance.leader_items().iter().copied().collect();
    let mut best: Option<OracleSolution> = None;
    for mask in 0u64..(1u64 << n) {
        let x: ItemSet = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| leaders[i]).collect();
        if instance.check_leader_set(&x).is_err() {
            continue;
        }
        let v = oracle_adversary(instance, u, &x, budget)?.leader_value;
        if best.as_ref().is_none_or(|b| v < b.worst_value) {
            best = Some(OracleSolution { leader_set: x, worst_value: v });
        }
    }
    best.ok_or_else(|| Error::Infeasible("no feasible leader set".into()))
}

/// The continuous leader's objective sampled at the given leader masses:
/// the leader takes its cheapest fractional prefix and the follower's worst
/// case is found by enumeration.
pub fn oracle_plf(
    instance: &Instance,
    u: &UncertaintySet,
    samples: &[Rational],
    budget: &OracleBudget,
) -> Result<Vec<(Rational, Rational)>> {
    let (lo, hi) = instance.leader_count_range();
    samples
        .iter()
        .map(|bl| {
            if *bl < from_usize(lo) || *bl > from_usize(hi) {
                return Err(Error::range("leader mass", bl));
            }
            let x = solve_continuous_selection(instance.leader_items().iter().copied(), bl, instance.leader_cost())?;
            Ok((bl.clone(), oracle_adversary_continuous(instance, u, &x, budget)?.leader_value))
        })
        .collect()
}

/// Worst case of the knapsack problem at capacity `b` by enumerating every
/// scenario of the value sets.
pub fn oracle_knapsack_adversary(k: &KnapsackInstance, b: &Rational, budget: &OracleBudget) -> Result<OracleOutcome> {
    let du = k.uncertainty();
    budget.check("scenarios", du.scenario_count(), budget.max_scenarios)?;
    let mut best: Option<OracleOutcome> = None;
    for d in du_scenarios(du, k.items())? {
        let y = follower_continuous_knapsack(k.items(), k.size(), &d.follower_cost, k.leader_value(), b)?;
        let v = k.value_of(&y);
        if best.as_ref().is_none_or(|o| v < o.leader_value) {
            best =
                Some(OracleOutcome { leader_value: v, response: FollowerResponse::Fractional(y), scenario: Some(d) });
        }
    }
    Ok(best.expect("the scenario space is non-empty"))
}

/// The best of the sampled capacities for the knapsack leader.
pub fn oracle_knapsack_leader(
    k: &KnapsackInstance,
    samples: &[Rational],
    budget: &OracleBudget,
) -> Result<(Rational, Rational)> {
    let mut best: Option<(Rational, Rational)> = None;
    for b in samples {
        let v = oracle_knapsack_adversary(k, b, budget)?.leader_value;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((b.clone(), v));
        }
    }
    best.ok_or_else(|| Error::InvalidInstance("no sample capacity".into()))
}

/// Brute-force minimum vertex cover size of a graph with at most 63
/// vertices given as an edge list.
pub fn min_vertex_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u64..(1u64 << n))
        .filter(|m| edges.iter().all(|&(a, b)| m >> a & 1 == 1 || m >> b & 1 == 1))
        .map(|m| m.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Brute-force certain optimum: all feasible leader sets, follower greedy.
pub fn oracle_bsp(instance: &Instance, d: &Scenario, budget: &OracleBudget) -> Result<OracleSolution> {
    oracle_rbsp(instance, &UncertaintySet::Discrete(vec![d.clone()]), budget)
}
