//! Transformation of arbitrary item sets into the `E_l ⊆ E_f` form.
//!
//! Every leader item that the follower cannot take is added to `E_f` with a
//! follower cost above all existing costs. The follower then only picks such
//! an item when the leader's choice would otherwise be infeasible, and every
//! such outcome coincides with a feasible leader choice of the original
//! instance, so optimal values are preserved.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::model::{Instance, ItemId, ItemSet, Scenario};
use crate::rational::{from_usize, Rational};
use crate::uncertainty::{DuSet, IntervalSet, UncertaintySet};

/// Items of `E_l \ E_f` in id order.
pub fn sentinel_items(instance: &Instance) -> Vec<ItemId> {
    instance.leader_items().difference(instance.follower_items()).copied().collect()
}

fn extended(instance: &Instance) -> Result<Instance> {
    let follower: ItemSet = instance.follower_items().union(instance.leader_items()).copied().collect();
    Instance::new(
        instance.leader_items().clone(),
        follower,
        instance.capacity(),
        instance.leader_cost().clone(),
        instance.policy(),
    )
}

/// Sentinel costs `m + 1, m + 2, …` above the largest existing value `m`.
/// Distinct values keep the sentinels free of ties and of one-point
/// interval intersections.
fn sentinel_costs(instance: &Instance, max: Option<Rational>) -> Vec<(ItemId, Rational)> {
    let base = max.unwrap_or_else(Rational::zero) + Rational::one();
    sentinel_items(instance).into_iter().enumerate().map(|(k, e)| (e, &base + from_usize(k))).collect()
}

/// Normalizes a certain instance.
pub fn normalize_with_scenario(instance: &Instance, d: &Scenario) -> Result<(Instance, Scenario)> {
    d.check_total(instance.follower_items())?;
    let max = instance.follower_items().iter().map(|e| &d.follower_cost[e]).max().cloned();
    let mut out = d.clone();
    out.follower_cost.retain(|e, _| instance.follower_items().contains(e));
    out.follower_cost.extend(sentinel_costs(instance, max));
    Ok((extended(instance)?, out))
}

/// Normalizes an instance together with its uncertainty set.
pub fn normalize_subset(instance: &Instance, u: &UncertaintySet) -> Result<(Instance, UncertaintySet)> {
    u.validate(instance.follower_items())?;
    let sentinels = sentinel_costs(instance, u.max_value());
    let out = match u {
        UncertaintySet::Discrete(scenarios) => UncertaintySet::Discrete(
            scenarios
                .iter()
                .map(|d| {
                    let mut d = d.clone();
                    d.follower_cost.extend(sentinels.iter().cloned());
                    d
                })
                .collect(),
        ),
        UncertaintySet::Interval(iv) => {
            let mut lo = iv.lo().clone();
            let mut hi = iv.hi().clone();
            lo.extend(sentinels.iter().cloned());
            hi.extend(sentinels.iter().cloned());
            UncertaintySet::Interval(IntervalSet::new(lo, hi)?)
        }
        UncertaintySet::DiscreteUncorrelated(du) => {
            let mut values = du.values().clone();
            values.extend(sentinels.iter().map(|(e, v)| (*e, alloc::vec![v.clone()])));
            UncertaintySet::DiscreteUncorrelated(DuSet::new(values)?)
        }
    };
    Ok((extended(instance)?, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    #[test]
    fn disjoint_instance_gains_sentinels_above_every_cost() {
        let (inst, d) = fixtures::worked_example_certain();
        let (norm, nd) = normalize_with_scenario(&inst, &d).unwrap();
        assert!(norm.leader_within_follower());
        assert_eq!(norm.n_follower(), 8);
        for e in 1..=4 {
            assert!(nd.follower_cost[&ItemId(e)] >= int(2));
        }
        assert_eq!(nd.follower_cost[&ItemId(1)], int(2));
    }

    #[test]
    fn subset_instance_is_unchanged() {
        let (inst, scenarios) = fixtures::approximation_gap_discrete(6, &int(0));
        let u = UncertaintySet::Discrete(scenarios);
        let (norm, nu) = normalize_subset(&inst, &u).unwrap();
        assert_eq!(norm, inst);
        assert_eq!(nu, u);
    }
}
