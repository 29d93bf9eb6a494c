//! Proptest strategies shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bilevel_core::rational::int;
use bilevel_core::{CostMap, DuSet, Instance, IntervalSet, ItemId, ItemSet, Policy, Scenario, UncertaintySet};
use proptest::collection::vec;
use proptest::prelude::*;

/// Which uncertainty families a strategy may produce.
#[derive(Debug, Clone, Copy)]
pub struct Families {
    pub discrete: bool,
    pub interval: bool,
    pub du: bool,
}

pub const ALL: Families = Families { discrete: true, interval: true, du: true };
pub const DISCRETE: Families = Families { discrete: true, interval: false, du: false };

/// Instance shape parameters.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub min_n: usize,
    pub max_n: usize,
    pub disjoint: bool,
    pub nonneg: bool,
}

fn build(roles: &[u8], costs: &[i64], b: usize, policy: Policy) -> Option<Instance> {
    let mut leaders = ItemSet::new();
    let mut followers = ItemSet::new();
    let mut c = CostMap::new();
    for (i, (r, v)) in roles.iter().zip(costs).enumerate() {
        let e = ItemId(i as u32 + 1);
        if *r != 1 {
            leaders.insert(e);
        }
        if *r != 0 {
            followers.insert(e);
        }
        c.insert(e, int(*v));
    }
    if followers.is_empty() {
        return None;
    }
    let n = roles.len();
    Instance::new(leaders, followers, b.min(n), c, policy).ok()
}

/// Instances of the given shape. Every item is a leader item, a follower
/// item or (unless disjoint) both; at least one follower item exists.
pub fn instance(shape: Shape) -> BoxedStrategy<Instance> {
    let role_hi = if shape.disjoint { 2u8 } else { 3u8 };
    let cost = if shape.nonneg { 0i64..=6 } else { -4i64..=4 };
    (shape.min_n..=shape.max_n)
        .prop_flat_map(move |n| (vec(0u8..role_hi, n), vec(cost.clone(), n), 0..=n))
        .prop_filter_map("needs a follower item", |(roles, costs, b)| build(&roles, &costs, b, Policy::Pessimistic))
        .boxed()
}

fn scenario(items: &[ItemId], vals: &[i64]) -> Scenario {
    Scenario::new(items.iter().zip(vals).map(|(e, v)| (*e, int(*v))).collect())
}

pub fn discrete_set(items: Vec<ItemId>, max_scenarios: usize) -> BoxedStrategy<UncertaintySet> {
    let n = items.len();
    vec(vec(-4i64..=4, n), 1..=max_scenarios)
        .prop_map(move |rows| UncertaintySet::Discrete(rows.iter().map(|r| scenario(&items, r)).collect()))
        .boxed()
}

pub fn interval_set(items: Vec<ItemId>) -> BoxedStrategy<UncertaintySet> {
    let n = items.len();
    vec((-4i64..=4, 0i64..=4), n)
        .prop_map(move |bounds| {
            let lo = items.iter().zip(&bounds).map(|(e, b)| (*e, int(b.0))).collect();
            let hi = items.iter().zip(&bounds).map(|(e, b)| (*e, int(b.0 + b.1))).collect();
            UncertaintySet::Interval(IntervalSet::new(lo, hi).expect("lo ≤ hi"))
        })
        .boxed()
}

pub fn du_values(items: Vec<ItemId>, max_values: usize) -> BoxedStrategy<DuSet> {
    let n = items.len();
    vec(vec(-4i64..=4, 1..=max_values), n)
        .prop_map(move |sets| {
            let values: BTreeMap<ItemId, Vec<_>> =
                items.iter().zip(sets).map(|(e, vs)| (*e, vs.into_iter().map(int).collect())).collect();
            DuSet::new(values).expect("non-empty value sets")
        })
        .boxed()
}

pub fn du_set(items: Vec<ItemId>, max_values: usize) -> BoxedStrategy<UncertaintySet> {
    du_values(items, max_values).prop_map(UncertaintySet::DiscreteUncorrelated).boxed()
}

/// An uncertainty set over the follower items of `instance`.
pub fn uncertainty(instance: &Instance, families: Families, max_scenarios: usize) -> BoxedStrategy<UncertaintySet> {
    let items: Vec<ItemId> = instance.follower_items().iter().copied().collect();
    let mut options: Vec<BoxedStrategy<UncertaintySet>> = Vec::new();
    if families.discrete {
        options.push(discrete_set(items.clone(), max_scenarios));
    }
    if families.interval {
        options.push(interval_set(items.clone()));
    }
    if families.du {
        options.push(du_set(items, 2));
    }
    proptest::strategy::Union::new(options).boxed()
}

/// An instance together with an uncertainty set over its follower items.
pub fn case(shape: Shape, families: Families, max_scenarios: usize) -> BoxedStrategy<(Instance, UncertaintySet)> {
    instance(shape)
        .prop_flat_map(move |inst| {
            let u = uncertainty(&inst, families, max_scenarios);
            (Just(inst), u)
        })
        .boxed()
}

/// A feasible leader set: an arbitrary subset of the leader items of a
/// size within the leader's count range, chosen by `pick`.
pub fn feasible_leader_set(instance: &Instance, pick: &[bool]) -> Option<ItemSet> {
    let leaders: Vec<ItemId> = instance.leader_items().iter().copied().collect();
    let x: ItemSet = leaders.iter().zip(pick.iter().cycle()).filter(|(_, p)| **p).map(|(e, _)| *e).collect();
    instance.check_leader_set(&x).ok().map(|_| x)
}
