//! Small hand-checkable instances used in documentation, tests and the CLI.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{ids, CostMap, Instance, ItemId, Policy, Scenario};
use crate::rational::{int, rat, Rational};
use crate::uncertainty::{DuSet, IntervalSet};

fn costs(pairs: &[(u32, Rational)]) -> CostMap {
    pairs.iter().map(|(e, c)| (ItemId(*e), c.clone())).collect()
}

fn on(items: core::ops::RangeInclusive<u32>, values: &[i64]) -> CostMap {
    items.zip(values).map(|(e, v)| (ItemId(e), int(*v))).collect()
}

/// Certain instance with disjoint sets: four leader items `e1..e4`, four
/// follower items `e5..e8`, `b = 5`. The optimum takes three leader items
/// and the follower completes with `{e5, e6}`, total cost −4.
pub fn worked_example_certain() -> (Instance, Scenario) {
    let mut c = on(1..=4, &[-1, -1, 0, 3]);
    c.extend(on(5..=8, &[1, -3, 2, -1]));
    let inst = Instance::new(ids(1..=4), ids(5..=8), 5, c, Policy::Pessimistic).unwrap();
    (inst, Scenario::new(on(5..=8, &[-2, 0, 1, 1])))
}

/// The certain example with a second scenario added.
pub fn worked_example_two_scenarios() -> (Instance, Vec<Scenario>) {
    let (inst, d1) = worked_example_certain();
    let d2 = Scenario::new(on(5..=8, &[-1, 3, 0, -3]));
    (inst, vec![d1, d2])
}

/// Two-scenario instance where a fractional leader strictly beats every
/// integral one: leader items `e1..e3` cost nothing, follower items
/// `e4..e6` cost `(−1, 1, 0)`, `b = 3`. The continuous optimum is −1/2 at
/// leader mass 3/2, every integral leader mass yields 0.
pub fn fractional_gap_example() -> (Instance, Vec<Scenario>) {
    let mut c = on(1..=3, &[0, 0, 0]);
    c.extend(on(4..=6, &[-1, 1, 0]));
    let inst = Instance::new(ids(1..=3), ids(4..=6), 3, c, Policy::Pessimistic).unwrap();
    let d1 = Scenario::new(on(4..=6, &[0, 1, 2]));
    let d2 = Scenario::new(on(4..=6, &[1, 2, 0]));
    (inst, vec![d1, d2])
}

/// Follower costs realising `order` as consecutive integers `1, 2, …`;
/// items of `universe` missing from `order` follow in id order.
pub fn costs_from_order(order: &[u32], universe: impl IntoIterator<Item = u32>) -> Scenario {
    let mut d = CostMap::new();
    let mut next = 1;
    for e in order.iter().copied().chain(universe) {
        d.entry(ItemId(e)).or_insert_with(|| {
            next += 1;
            int(next - 1)
        });
    }
    Scenario::new(d)
}

fn approximation_gap_instance(n: u32, eps: &Rational) -> Instance {
    assert!(n >= 4, "the gap family needs at least four items");
    let mut c = BTreeMap::new();
    c.insert(ItemId(1), int(1) - eps);
    c.insert(ItemId(2), int(1));
    c.insert(ItemId(3), int(3));
    for e in 4..=n {
        c.insert(ItemId(e), int(0));
    }
    Instance::new(ids(1..=2), ids(1..=n), n as usize - 2, c, Policy::Pessimistic).unwrap()
}

/// Instance family on which the greedy 2-approximation returns `2 − ε`
/// while the optimum is 1 (two explicit scenarios, `E_l ⊆ E_f`).
pub fn approximation_gap_discrete(n: u32, eps: &Rational) -> (Instance, Vec<Scenario>) {
    let inst = approximation_gap_instance(n, eps);
    let mut o1: Vec<u32> = (4..=n).collect();
    o1.extend([3, 1, 2]);
    let mut o2 = vec![2];
    o2.extend(4..=n);
    o2.extend([1, 3]);
    (inst, vec![costs_from_order(&o1, 1..=n), costs_from_order(&o2, 1..=n)])
}

/// Interval version of [`approximation_gap_discrete`]: every follower cost
/// is fixed except for `e2`, whose interval lets it move freely between
/// `e_n` and `e3`.
pub fn approximation_gap_interval(n: u32, eps: &Rational) -> (Instance, IntervalSet) {
    let inst = approximation_gap_instance(n, eps);
    let mut fixed = CostMap::new();
    for e in 4..n {
        fixed.insert(ItemId(e), int(i64::from(e) - 3));
    }
    let m = i64::from(n);
    fixed.insert(ItemId(n), int(m - 3));
    fixed.insert(ItemId(3), int(m - 2));
    fixed.insert(ItemId(1), int(m - 1));
    let mut lo = fixed.clone();
    let mut hi = fixed;
    lo.insert(ItemId(2), rat(2 * m - 7, 2));
    hi.insert(ItemId(2), rat(2 * m - 3, 2));
    (inst, IntervalSet::new(lo, hi).unwrap())
}

/// Value sets `U_{e1} = {1, 4}`, `U_{e2} = {2}`, `U_{e3} = {3}`: the hull
/// only forces `e2` before `e3`.
pub fn hull_order_example() -> DuSet {
    let mut v = BTreeMap::new();
    v.insert(ItemId(1), vec![int(1), int(4)]);
    v.insert(ItemId(2), vec![int(2)]);
    v.insert(ItemId(3), vec![int(3)]);
    DuSet::new(v).unwrap()
}

/// Leader cost table helper for tests.
pub fn cost_table(pairs: &[(u32, i64)]) -> CostMap {
    costs(&pairs.iter().map(|(e, c)| (*e, int(*c))).collect::<Vec<_>>())
}
