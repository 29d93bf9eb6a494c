//! Greedy orders and the selection primitives every solver builds on.
//!
//! The follower of a selection problem is solved by sorting: it takes the
//! cheapest items with respect to its own cost `d`, breaking ties by the
//! leader's cost according to the policy and finally by item id.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{CostMap, Instance, ItemId, ItemSet, Policy, Scenario};
use crate::rational::{as_usize, from_usize, Rational};

/// A fractional selection: every item of the ground set mapped to `[0, 1]`.
pub type FractionalSelection = BTreeMap<ItemId, Rational>;

/// A deterministic total order of an item set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GreedyOrder(pub Vec<ItemId>);

impl GreedyOrder {
    pub fn as_slice(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `k` items as a set.
    pub fn prefix(&self, k: usize) -> ItemSet {
        self.0[..k].iter().copied().collect()
    }

    /// Fractional prefix of total mass `amount`: `⌊amount⌋` items at 1, the
    /// next item at the fractional remainder, the rest at 0.
    pub fn fractional_prefix(&self, amount: &Rational) -> Result<FractionalSelection> {
        if amount.is_negative() || *amount > from_usize(self.len()) {
            return Err(Error::range("selection amount", amount));
        }
        let mut rest = amount.clone();
        let mut out = FractionalSelection::new();
        for e in &self.0 {
            let take = if rest >= Rational::one() { Rational::one() } else { rest.clone() };
            rest -= &take;
            out.insert(*e, take);
        }
        Ok(out)
    }
}

/// Compares `(p1, s1, id1)` and `(p2, s2, id2)` under the canonical rule:
/// primary ascending, secondary ascending (optimistic) or descending
/// (pessimistic), then id ascending.
pub fn compare_keys(a: (&Rational, &Rational, ItemId), b: (&Rational, &Rational, ItemId), policy: Policy) -> Ordering {
    a.0.cmp(b.0)
        .then_with(|| match policy {
            Policy::Optimistic => a.1.cmp(b.1),
            Policy::Pessimistic => b.1.cmp(a.1),
        })
        .then_with(|| a.2.cmp(&b.2))
}

/// Sorts `items` by `primary`, ties by `secondary` according to `policy`,
/// remaining ties by id.
pub fn greedy_order(
    items: impl IntoIterator<Item = ItemId>,
    primary: &CostMap,
    secondary: &CostMap,
    policy: Policy,
) -> Result<GreedyOrder> {
    let mut keyed = Vec::new();
    for e in items {
        let p = primary.get(&e).ok_or(Error::MissingCost(e))?;
        let s = secondary.get(&e).ok_or(Error::MissingCost(e))?;
        keyed.push((p, s, e));
    }
    keyed.sort_by(|a, b| compare_keys(*a, *b, policy));
    Ok(GreedyOrder(keyed.into_iter().map(|k| k.2).collect()))
}

/// Order of the items by a single cost, ties by id.
pub fn cost_order(items: impl IntoIterator<Item = ItemId>, cost: &CostMap) -> Result<GreedyOrder> {
    greedy_order(items, cost, cost, Policy::Optimistic)
}

/// The `count` cheapest items with respect to `cost` (ties by id).
pub fn solve_selection(items: impl IntoIterator<Item = ItemId>, count: usize, cost: &CostMap) -> Result<ItemSet> {
    let order = cost_order(items, cost)?;
    if count > order.len() {
        return Err(Error::Infeasible(alloc::format!("cannot select {count} of {} items", order.len())));
    }
    Ok(order.prefix(count))
}

/// Cheapest fractional selection of total mass `amount` with respect to
/// `cost` (ties by id).
pub fn solve_continuous_selection(
    items: impl IntoIterator<Item = ItemId>,
    amount: &Rational,
    cost: &CostMap,
) -> Result<FractionalSelection> {
    cost_order(items, cost)?.fractional_prefix(amount)
}

/// The follower's greedy order of `E_f \ X` under scenario `d`.
pub fn follower_order(instance: &Instance, x: &ItemSet, d: &Scenario) -> Result<GreedyOrder> {
    greedy_order(
        instance.follower_items().iter().copied().filter(|e| !x.contains(e)),
        &d.follower_cost,
        instance.leader_cost(),
        instance.policy(),
    )
}

/// The follower's optimal completion `Y` of a leader solution `X` under `d`.
pub fn follower_respond(instance: &Instance, x: &ItemSet, d: &Scenario) -> Result<ItemSet> {
    instance.check_leader_set(x)?;
    let order = follower_order(instance, x, d)?;
    Ok(order.prefix(instance.capacity() - x.len()))
}

/// The follower's fractional response of mass `amount` over `E_f` under `d`
/// (continuous variant, disjoint sets).
pub fn follower_respond_continuous(
    instance: &Instance,
    amount: &Rational,
    d: &Scenario,
) -> Result<FractionalSelection> {
    follower_order(instance, &ItemSet::new(), d)?.fractional_prefix(amount)
}

/// Sum of a fractional vector.
pub fn mass(x: &FractionalSelection) -> Rational {
    x.values().fold(Rational::zero(), |acc, v| acc + v)
}

/// Checks that a fractional leader vector lives on `E_l`, in `[0,1]`, and
/// leaves the follower a feasible amount; returns `b_f = b − Σ x`.
pub fn check_fractional_leader(instance: &Instance, x: &FractionalSelection) -> Result<Rational> {
    for (e, v) in x {
        if !instance.leader_items().contains(e) {
            return Err(Error::InvalidInstance(alloc::format!("item {e} is not a leader item")));
        }
        if v.is_negative() || *v > Rational::one() {
            return Err(Error::range("leader share", v));
        }
    }
    let b_f = from_usize(instance.capacity()) - mass(x);
    if b_f.is_negative() || b_f > from_usize(instance.n_follower()) {
        return Err(Error::range("follower amount", &b_f));
    }
    Ok(b_f)
}

/// Number of whole items, if `r` is a non-negative integer.
pub fn whole(r: &Rational) -> Option<usize> {
    as_usize(r)
}
