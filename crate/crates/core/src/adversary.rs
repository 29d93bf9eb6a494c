//! Worst-case scenarios for a fixed leader solution.
//!
//! The adversary picks the follower's cost function from the uncertainty
//! set so that the follower's greedy answer is as expensive as possible for
//! the leader. For interval sets the realisable follower orders are exactly
//! the linear extensions of the interval order `e1 ≺ e2 ⇔ d⁺(e1) < d⁻(e2)`,
//! which lets the adversary guess the last item ("head") of the follower's
//! prefix instead of enumerating scenarios.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::greedy::{follower_respond, FractionalSelection};
use crate::model::{CostMap, Instance, ItemId, ItemSet, Policy, Scenario};
use crate::rational::Rational;
use crate::uncertainty::{du_to_interval, IntervalSet, UncertaintySet};

/// What the follower does in the worst case.
#[derive(Debug, Clone, PartialEq)]
pub enum FollowerResponse {
    /// A binary selection `Y`.
    Binary(ItemSet),
    /// A fractional selection `y ∈ [0,1]^{E_f}`.
    Fractional(FractionalSelection),
}

impl FollowerResponse {
    /// Items with a positive share.
    pub fn support(&self) -> ItemSet {
        match self {
            FollowerResponse::Binary(y) => y.clone(),
            FollowerResponse::Fractional(y) => y.iter().filter(|(_, v)| !v.is_zero()).map(|(e, _)| *e).collect(),
        }
    }

    /// The binary selection, if the response is binary.
    pub fn as_binary(&self) -> Option<&ItemSet> {
        match self {
            FollowerResponse::Binary(y) => Some(y),
            FollowerResponse::Fractional(_) => None,
        }
    }
}

/// A worst-case scenario together with the follower's answer to it.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryOutcome {
    /// The chosen follower cost function `d`.
    pub scenario: Scenario,
    /// Index of `d` in a discrete uncertainty set.
    pub scenario_index: Option<usize>,
    /// The follower's response to `d`.
    pub response: FollowerResponse,
    /// The leader's total cost (its own selection plus the response).
    pub leader_value: Rational,
}

/// Worst case over an explicit scenario list; ties go to the lowest index.
pub fn adversary_discrete(instance: &Instance, scenarios: &[Scenario], x: &ItemSet) -> Result<AdversaryOutcome> {
    instance.check_leader_set(x)?;
    if scenarios.is_empty() {
        return Err(Error::InvalidInstance("discrete uncertainty set has no scenario".into()));
    }
    let cx = instance.cost_of(x);
    let mut best: Option<AdversaryOutcome> = None;
    for (i, d) in scenarios.iter().enumerate() {
        let y = follower_respond(instance, x, d)?;
        let v = &cx + instance.cost_of(&y);
        if best.as_ref().is_none_or(|b| v > b.leader_value) {
            best = Some(AdversaryOutcome {
                scenario: d.clone(),
                scenario_index: Some(i),
                response: FollowerResponse::Binary(y),
                leader_value: v,
            });
        }
    }
    Ok(best.expect("at least one scenario"))
}

/// `e1 ≺ e2` in the interval order, i.e. `d⁺(e1) < d⁻(e2)`: `e1` precedes
/// `e2` in every realisable follower order.
pub fn interval_precedes(u: &IntervalSet, e1: ItemId, e2: ItemId) -> Result<bool> {
    Ok(u.hi_of(e1)? < u.lo_of(e2)?)
}

/// Rejects touching intervals of distinct items under the optimistic policy,
/// where the adversary's structure result needs strict separation.
pub(crate) fn check_interval_policy(instance: &Instance, u: &IntervalSet) -> Result<()> {
    if instance.policy() == Policy::Optimistic {
        if let Some((e1, e2)) = u.one_point_intersection(instance.follower_items()) {
            return Err(Error::Precondition(format!(
                "intervals of {e1} and {e2} intersect in a single point, which the optimistic policy does not support"
            )));
        }
    }
    Ok(())
}

/// Per-head data for the interval adversary: for a head `ē`, the items
/// `E⁻` that must precede it and the items `E⁰` that may precede it, the
/// latter sorted by decreasing leader cost.
#[derive(Debug, Clone)]
pub struct HeadTable {
    heads: Vec<Head>,
}

#[derive(Debug, Clone)]
struct Head {
    item: ItemId,
    minus: Vec<ItemId>,
    minus_cost: Rational,
    zero: Vec<ItemId>,
    zero_prefix: Vec<Rational>,
}

impl HeadTable {
    /// Builds the table over `items` (the follower's available items).
    pub fn new(instance: &Instance, u: &IntervalSet, items: &[ItemId]) -> Result<Self> {
        let mut by_cost: Vec<ItemId> = items.to_vec();
        // Decreasing leader cost, ties by id: the adversary's preference.
        by_cost.sort_by(|a, b| instance.cost(*b).cmp(instance.cost(*a)).then(a.cmp(b)));
        // Bounds and costs in adversary order, looked up once.
        let keyed: Vec<(ItemId, &Rational, &Rational, &Rational)> =
            by_cost.iter().map(|e| Ok((*e, u.lo_of(*e)?, u.hi_of(*e)?, instance.cost(*e)))).collect::<Result<_>>()?;
        let mut sorted_ids = items.to_vec();
        sorted_ids.sort();
        let mut heads = Vec::with_capacity(items.len());
        for &h in &sorted_ids {
            let ref_lo = u.lo_of(h)?;
            let mut minus = Vec::new();
            let mut minus_cost = Rational::zero();
            let mut zero = Vec::new();
            let mut zero_prefix = alloc::vec![Rational::zero()];
            for &(e, lo, hi, c) in &keyed {
                if hi < ref_lo {
                    minus_cost += c;
                    minus.push(e);
                } else if lo <= ref_lo {
                    let next = zero_prefix.last().unwrap() + c;
                    zero_prefix.push(next);
                    zero.push(e);
                }
            }
            heads.push(Head { item: h, minus, minus_cost, zero, zero_prefix });
        }
        Ok(HeadTable { heads })
    }

    /// Worst follower cost for `count` follower items: the best admissible
    /// head and its value (ties to the smallest head id). `None` only when
    /// `count` exceeds the number of items.
    pub fn best(&self, count: usize) -> Option<(usize, Rational)> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, h) in self.heads.iter().enumerate() {
            if h.minus.len() > count || h.zero.len() < count - h.minus.len() {
                continue;
            }
            let v = &h.minus_cost + &h.zero_prefix[count - h.minus.len()];
            if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                best = Some((i, v));
            }
        }
        best
    }

    /// The follower selection `E⁻ ∪ (top items of E⁰)` for head `i`.
    pub fn selection(&self, i: usize, count: usize) -> ItemSet {
        let h = &self.heads[i];
        h.minus.iter().chain(&h.zero[..count - h.minus.len()]).copied().collect()
    }

    /// Id of head `i`.
    pub fn head_item(&self, i: usize) -> ItemId {
        self.heads[i].item
    }

    /// Number of heads.
    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    /// `(|E⁻|, c(E⁻), E⁰ in adversary order)` of head `i`.
    pub fn parts(&self, i: usize) -> (usize, &Rational, &[ItemId]) {
        let h = &self.heads[i];
        (h.minus.len(), &h.minus_cost, &h.zero)
    }
}

/// Scenario with `d = d⁻` on `low` and `d = d⁺` elsewhere on `E_f`.
pub(crate) fn endpoint_scenario(instance: &Instance, u: &IntervalSet, low: &ItemSet) -> Scenario {
    let d: CostMap = instance
        .follower_items()
        .iter()
        .map(|e| {
            let v = if low.contains(e) { &u.lo()[e] } else { &u.hi()[e] };
            (*e, v.clone())
        })
        .collect();
    Scenario::new(d)
}

/// Worst case over an interval uncertainty set.
pub fn adversary_interval(instance: &Instance, u: &IntervalSet, x: &ItemSet) -> Result<AdversaryOutcome> {
    instance.check_leader_set(x)?;
    UncertaintySet::Interval(u.clone()).validate(instance.follower_items())?;
    check_interval_policy(instance, u)?;
    let items: Vec<ItemId> = instance.follower_items().iter().copied().filter(|e| !x.contains(e)).collect();
    let count = instance.capacity() - x.len();
    let table = HeadTable::new(instance, u, &items)?;
    let y = if items.is_empty() {
        ItemSet::new()
    } else {
        let (i, _) = table.best(count).expect("a feasible leader set admits a head");
        table.selection(i, count)
    };
    Ok(AdversaryOutcome {
        scenario: endpoint_scenario(instance, u, &y),
        scenario_index: None,
        leader_value: instance.cost_of(x) + instance.cost_of(&y),
        response: FollowerResponse::Binary(y),
    })
}

/// Worst case over any supported uncertainty set. Value sets are handled
/// through their interval hull, which has the same worst case and whose
/// endpoint witnesses lie in the original value sets.
pub fn adversary(instance: &Instance, u: &UncertaintySet, x: &ItemSet) -> Result<AdversaryOutcome> {
    match u {
        UncertaintySet::Discrete(s) => adversary_discrete(instance, s, x),
        UncertaintySet::Interval(iv) => adversary_interval(instance, iv, x),
        UncertaintySet::DiscreteUncorrelated(du) => {
            u.validate(instance.follower_items())?;
            check_du_policy(instance, du)?;
            adversary_interval(&instance.with_policy(Policy::Pessimistic), &du_to_interval(du), x)
        }
    }
}

/// Under the optimistic policy ties between distinct items must be
/// impossible, so the value sets have to be pairwise disjoint.
pub(crate) fn check_du_policy(instance: &Instance, du: &crate::uncertainty::DuSet) -> Result<()> {
    if instance.policy() == Policy::Optimistic && !du.pairwise_disjoint() {
        return Err(Error::Precondition("the optimistic policy needs pairwise disjoint value sets".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::ids;
    use crate::rational::{int, rat};
    use alloc::vec;

    fn three_items(lo: &[i64], hi: &[i64], c: &[i64], b: usize) -> (Instance, IntervalSet) {
        let mut cost = fixtures::cost_table(&[(0, 0)]);
        for (i, v) in c.iter().enumerate() {
            cost.insert(ItemId(i as u32 + 1), int(*v));
        }
        let inst = Instance::new(ids([0]), ids(1..=c.len() as u32), b, cost, Policy::Pessimistic).unwrap();
        let lo = lo.iter().enumerate().map(|(i, v)| (ItemId(i as u32 + 1), int(*v))).collect();
        let hi = hi.iter().enumerate().map(|(i, v)| (ItemId(i as u32 + 1), int(*v))).collect();
        (inst, IntervalSet::new(lo, hi).unwrap())
    }

    #[test]
    fn overlapping_intervals_take_the_two_most_expensive() {
        let (inst, u) = three_items(&[0, 1, 2], &[10, 11, 12], &[5, 1, 3], 2);
        let out = adversary_interval(&inst, &u, &ItemSet::new()).unwrap();
        assert_eq!(out.leader_value, int(8));
        assert_eq!(out.response, FollowerResponse::Binary(ids([1, 3])));
    }

    #[test]
    fn forced_predecessor_is_respected() {
        let (inst, u) = three_items(&[0, 2, 3], &[1, 5, 4], &[0, 1, 10], 2);
        let out = adversary_interval(&inst, &u, &ItemSet::new()).unwrap();
        assert_eq!(out.leader_value, int(10));
        assert_eq!(out.response, FollowerResponse::Binary(ids([1, 3])));
    }

    #[test]
    fn empty_follower_pool_gives_empty_response() {
        let (inst, u) = three_items(&[0], &[1], &[4], 1);
        let inst = Instance::new(ids([0]), ids([1]), 2, inst.leader_cost().clone(), Policy::Pessimistic).unwrap();
        let out = adversary_interval(&inst, &u, &ids([0])).unwrap();
        assert_eq!(out.response, FollowerResponse::Binary(ids([1])));
        let inst1 = inst.with_capacity(1).unwrap();
        let out = adversary_interval(&inst1, &u, &ids([0])).unwrap();
        assert_eq!(out.response, FollowerResponse::Binary(ItemSet::new()));
    }

    #[test]
    fn precedence_relation() {
        let hull = du_to_interval(&fixtures::hull_order_example());
        assert_eq!(hull.lo()[&ItemId(1)], int(1));
        assert_eq!(hull.hi()[&ItemId(1)], int(4));
        let mut relations = vec![];
        for a in 1..=3 {
            for b in 1..=3 {
                if a != b && interval_precedes(&hull, ItemId(a), ItemId(b)).unwrap() {
                    relations.push((a, b));
                }
            }
        }
        assert_eq!(relations, vec![(2, 3)]);
    }

    #[test]
    fn approximation_gap_leader_choice_costs_one() {
        let (inst, scenarios) = fixtures::approximation_gap_discrete(6, &rat(1, 4));
        for d in &scenarios {
            let out = adversary_discrete(&inst, core::slice::from_ref(d), &ids([2])).unwrap();
            assert_eq!(out.leader_value, int(1));
        }
    }

    #[test]
    fn fractional_gap_integral_leader_gets_zero() {
        let (inst, scenarios) = fixtures::fractional_gap_example();
        let out = adversary_discrete(&inst, &scenarios, &ids([1])).unwrap();
        assert_eq!(out.leader_value, int(0));
        // d1 leaves the follower {e4, e5} (cost 0), d2 leaves {e6, e4} (cost −1).
        assert_eq!(out.scenario_index, Some(0));
    }

    #[test]
    fn optimistic_rejects_touching_intervals() {
        let (inst, u) = three_items(&[0, 1, 2], &[1, 3, 4], &[1, 1, 1], 1);
        assert!(adversary_interval(&inst, &u, &ItemSet::new()).is_ok());
        let opt = inst.with_policy(Policy::Optimistic);
        assert!(matches!(adversary_interval(&opt, &u, &ItemSet::new()), Err(Error::Precondition(_))));
    }
}
