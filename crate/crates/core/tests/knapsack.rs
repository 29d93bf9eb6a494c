//! Robust continuous knapsack with a capacity-setting leader, against
//! product-scenario enumeration.

use std::collections::BTreeMap;

use bilevel_core::continuous::{leader_vector, rcbsp_adversary_du, rcbsp_leader_du};
use bilevel_core::knapsack::{
    dp_equality_knapsack, follower_continuous_knapsack, rbckp_adversary_du, rbckp_leader_du, KnapsackInstance,
};
use bilevel_core::oracle::{oracle_knapsack_adversary, oracle_knapsack_leader, OracleBudget};
use bilevel_core::rational::{from_usize, int, rat};
use bilevel_core::{CostMap, DuSet, Instance, ItemId, ItemSet, Policy, Rational};
use proptest::collection::vec;
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Raw {
    sizes: Vec<u64>,
    leader: Vec<i64>,
    values: Vec<Vec<i64>>,
    lo_hi: (u32, u32),
}

fn raw(max_size: u64) -> impl Strategy<Value = Raw> {
    (1usize..=5)
        .prop_flat_map(move |n| {
            (vec(1u64..=max_size, n), vec(-4i64..=4, n), vec(vec(1i64..=5, 1..=2), n), (0u32..=8, 0u32..=8))
        })
        .prop_map(|(sizes, leader, values, lo_hi)| Raw { sizes, leader, values, lo_hi })
}

fn build(r: &Raw) -> KnapsackInstance {
    let ids: Vec<ItemId> = (1..=r.sizes.len() as u32).map(ItemId).collect();
    let total: u64 = r.sizes.iter().sum();
    // Capacities are multiples of a(E)/8.
    let (a, b) = (r.lo_hi.0.min(r.lo_hi.1), r.lo_hi.0.max(r.lo_hi.1));
    let frac = |k: u32| Rational::from_integer(total.into()) * rat(i64::from(k), 8);
    KnapsackInstance::new(
        ids.iter().zip(&r.sizes).map(|(e, a)| (*e, *a)).collect(),
        ids.iter().zip(&r.leader).map(|(e, c)| (*e, int(*c))).collect(),
        frac(a),
        frac(b),
        DuSet::new(ids.iter().zip(&r.values).map(|(e, vs)| (*e, vs.iter().copied().map(int).collect())).collect())
            .unwrap(),
    )
    .unwrap()
}

fn capacities(k: &KnapsackInstance, count: i64) -> Vec<Rational> {
    let (lo, hi) = (k.capacity_lo(), k.capacity_hi());
    (0..count).map(|i| lo + (hi - lo) * rat(i, count - 1)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adversary_matches_product_enumeration(r in raw(3)) {
        let k = build(&r);
        for b in capacities(&k, 10) {
            let fast = rbckp_adversary_du(&k, &b).unwrap();
            let slow = oracle_knapsack_adversary(&k, &b, &OracleBudget::default()).unwrap();
            prop_assert_eq!(&fast.leader_value, &slow.leader_value, "capacity {}", b);
            prop_assert!(k.uncertainty().contains(&fast.scenario));
            let y = follower_continuous_knapsack(k.items(), k.size(), &fast.scenario.follower_cost, k.leader_value(), &b)
                .unwrap();
            prop_assert_eq!(k.value_of(&y), fast.leader_value);
        }
    }

    #[test]
    fn leader_matches_sampled_maximum(r in raw(3)) {
        let k = build(&r);
        let sol = rbckp_leader_du(&k).unwrap();
        let mut samples = capacities(&k, 10);
        samples.extend(
            sol.objective.sample_points().into_iter().filter(|b| b >= k.capacity_lo() && b <= k.capacity_hi()),
        );
        let budget = OracleBudget::default();
        for b in &samples {
            let v = oracle_knapsack_adversary(&k, b, &budget).unwrap().leader_value;
            let at = sol.objective.eval(b);
            prop_assert_eq!(at.as_ref(), Some(&v), "objective at {}", b);
        }
        let (_, best) = oracle_knapsack_leader(&k, &samples, &budget).unwrap();
        prop_assert_eq!(&sol.value, &best);
        prop_assert_eq!(rbckp_adversary_du(&k, &sol.capacity).unwrap().leader_value, sol.value);
    }

    /// Unit sizes turn the knapsack into a continuous selection problem:
    /// negate the follower values and leader values, and let zero-cost
    /// leader padding of width `b⁺ − b⁻` absorb the unused capacity.
    #[test]
    fn unit_sizes_agree_with_continuous_selection(r in raw(1)) {
        let n = r.sizes.len();
        let lo = (r.lo_hi.0.min(r.lo_hi.1) as usize).min(n);
        let hi = (r.lo_hi.0.max(r.lo_hi.1) as usize).min(n);
        let r = Raw { lo_hi: (0, 0), ..r };
        let base = build(&r);
        let k = KnapsackInstance::new(
            base.size().clone(), base.leader_value().clone(), from_usize(lo), from_usize(hi), base.uncertainty().clone(),
        ).unwrap();
        let followers: ItemSet = k.items().clone();
        let padding: ItemSet = (0..hi - lo).map(|i| ItemId(100 + i as u32)).collect();
        let mut cost: CostMap = k.leader_value().iter().map(|(e, c)| (*e, -c.clone())).collect();
        cost.extend(padding.iter().map(|e| (*e, int(0))));
        let inst = Instance::new(padding, followers, hi, cost, Policy::Pessimistic).unwrap();
        let negated: BTreeMap<ItemId, Vec<Rational>> =
            k.uncertainty().values().iter().map(|(e, vs)| (*e, vs.iter().map(|v| -v.clone()).collect())).collect();
        let du = DuSet::new(negated).unwrap();

        prop_assert_eq!(rcbsp_leader_du(&inst, &du).unwrap().value, -rbckp_leader_du(&k).unwrap().value);
        for b in capacities(&k, 5) {
            let x = leader_vector(&inst, &(from_usize(hi) - &b)).unwrap();
            prop_assert_eq!(
                rcbsp_adversary_du(&inst, &du, &x).unwrap().leader_value,
                -rbckp_adversary_du(&k, &b).unwrap().leader_value
            );
        }
    }

    #[test]
    fn equality_knapsack_matches_subset_enumeration(
        items in vec((1u64..=4, -4i64..=4), 0..=10),
        target in 0usize..=40,
    ) {
        let ids: Vec<ItemId> = (1..=items.len() as u32).map(ItemId).collect();
        let size: BTreeMap<ItemId, u64> = ids.iter().zip(&items).map(|(e, it)| (*e, it.0)).collect();
        let value: CostMap = ids.iter().zip(&items).map(|(e, it)| (*e, int(it.1))).collect();
        let brute = (0u32..1 << ids.len())
            .filter(|m| ids.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, e)| size[e] as usize).sum::<usize>() == target)
            .map(|m| ids.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, e)| value[e].clone()).sum::<Rational>())
            .max();
        let dp = dp_equality_knapsack(&ids, &size, target, &value).unwrap();
        prop_assert_eq!(dp.as_ref().map(|d| d.1.clone()), brute);
        if let Some((set, v)) = dp {
            prop_assert_eq!(set.iter().map(|e| size[e] as usize).sum::<usize>(), target);
            prop_assert_eq!(set.iter().map(|e| value[e].clone()).sum::<Rational>(), v);
        }
    }
}
