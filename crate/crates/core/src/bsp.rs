//! The certain bilevel selection problem.
//!
//! For a fixed leader cardinality `b_l` the leader's best choice is its
//! `b_l` cheapest items and the follower answers with the first `b − b_l`
//! items of its greedy order, so enumerating `b_l` solves the problem.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Result;
use crate::greedy::{cost_order, follower_order, follower_respond};
use crate::model::{Instance, ItemId, ItemSet, Scenario};
use crate::normalize::normalize_with_scenario;
use crate::rational::Rational;

/// An optimal pair of leader and follower selections.
#[derive(Debug, Clone, PartialEq)]
pub struct BilevelSolution {
    /// `X`.
    pub leader_set: ItemSet,
    /// `Y`.
    pub follower_set: ItemSet,
    /// `c(X ∪ Y)`.
    pub value: Rational,
    /// `b_l = |X|`.
    pub leader_count: usize,
}

/// Prefix sums of `c` along an order: entry `k` is the cost of the first
/// `k` items.
pub(crate) fn prefix_costs(instance: &Instance, order: &[ItemId]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(order.len() + 1);
    let mut acc = Rational::zero();
    out.push(acc.clone());
    for e in order {
        acc += instance.cost(*e);
        out.push(acc.clone());
    }
    out
}

/// Prefix sums of an arbitrary cost along an order.
pub(crate) fn prefix_costs_by(cost: &crate::model::CostMap, order: &[ItemId]) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(order.len() + 1);
    let mut acc = Rational::zero();
    out.push(acc.clone());
    for e in order {
        acc += cost.get(e).ok_or(crate::error::Error::MissingCost(*e))?;
        out.push(acc.clone());
    }
    Ok(out)
}

/// Solves the certain problem for any item sets. Among optimal leader
/// cardinalities the smallest is returned.
pub fn solve_bsp(instance: &Instance, d: &Scenario) -> Result<BilevelSolution> {
    if instance.is_disjoint() {
        solve_disjoint_sets(instance, d)
    } else {
        solve_bsp_normalized(instance, d)
    }
}

fn solve_disjoint_sets(instance: &Instance, d: &Scenario) -> Result<BilevelSolution> {
    let pl = cost_order(instance.leader_items().iter().copied(), instance.leader_cost())?;
    let pf = follower_order(instance, &ItemSet::new(), d)?;
    let cl = prefix_costs(instance, pl.as_slice());
    let cf = prefix_costs(instance, pf.as_slice());
    let b = instance.capacity();
    let (lo, hi) = instance.leader_count_range();
    let mut best: Option<(Rational, usize)> = None;
    for bl in lo..=hi {
        let v = &cl[bl] + &cf[b - bl];
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, bl));
        }
    }
    let (value, bl) = best.expect("leader cardinality range is never empty");
    Ok(BilevelSolution { leader_set: pl.prefix(bl), follower_set: pf.prefix(b - bl), value, leader_count: bl })
}

/// Solves the problem on the normalized (`E_l ⊆ E_f`) form, updating the
/// follower's completion incrementally as leader items are added: a new
/// leader item either leaves the follower's selection, or the follower
/// drops its last selected item.
pub fn solve_bsp_normalized(instance: &Instance, d: &Scenario) -> Result<BilevelSolution> {
    let (norm, nd) = normalize_with_scenario(instance, d)?;
    let pl = cost_order(norm.leader_items().iter().copied(), norm.leader_cost())?;
    let pf = follower_order(&norm, &ItemSet::new(), &nd)?;
    let pos: alloc::collections::BTreeMap<ItemId, usize> =
        pf.as_slice().iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let b = norm.capacity();
    let mut in_y: Vec<bool> = (0..pf.len()).map(|i| i < b).collect();
    let mut m = b;
    let mut value = norm.cost_of(&pf.as_slice()[..b]);
    let mut best = (value.clone(), 0usize);
    for bl in 1..=b.min(norm.n_leader()) {
        let e = pl.as_slice()[bl - 1];
        value += norm.cost(e);
        let p = pos[&e];
        let removed = if in_y[p] {
            p
        } else {
            while !in_y[m - 1] {
                m -= 1;
            }
            m -= 1;
            m
        };
        in_y[removed] = false;
        value -= norm.cost(pf.as_slice()[removed]);
        if value < best.0 {
            best = (value.clone(), bl);
        }
    }
    let x = pl.prefix(best.1);
    let y = follower_respond(&norm, &x, &nd)?;
    // Sentinel items taken by the follower are leader items of the original
    // instance that the leader has to take itself.
    let (sentinels, y): (ItemSet, ItemSet) = y.into_iter().partition(|e| !instance.follower_items().contains(e));
    let leader_set: ItemSet = x.union(&sentinels).copied().collect();
    Ok(BilevelSolution { leader_count: leader_set.len(), leader_set, follower_set: y, value: best.0 })
}
