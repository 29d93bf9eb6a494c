//! The robust bilevel continuous knapsack problem with independent finite
//! value sets:
//!
//! `max_{b ∈ [b⁻, b⁺]} min_{d ∈ U} c · y(b, d)`
//!
//! where the follower fills a continuous knapsack of capacity `b`
//! maximising its value `d`. The leader controls only the capacity. Item
//! sizes are positive integers, which makes a dynamic program over size
//! sums available to the adversary.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::adversary::{AdversaryOutcome, FollowerResponse};
use crate::error::{Error, Result};
use crate::greedy::FractionalSelection;
use crate::model::{CostMap, ItemId, ItemSet, Scenario};
use crate::plf::{envelope_of_segments, plf_extremum, Mode, Plf, Segment};
use crate::rational::{floor_i64, Rational};
use crate::uncertainty::DuSet;

/// An instance of the robust bilevel continuous knapsack problem.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    items: ItemSet,
    size: BTreeMap<ItemId, u64>,
    leader_value: CostMap,
    capacity_lo: Rational,
    capacity_hi: Rational,
    uncertainty: DuSet,
}

impl KnapsackInstance {
    /// Validates and builds an instance: positive integer sizes, positive
    /// follower values, leader values and value sets on every item, and
    /// `0 ≤ b⁻ ≤ b⁺ ≤ a(E)`.
    pub fn new(
        size: BTreeMap<ItemId, u64>,
        leader_value: CostMap,
        capacity_lo: Rational,
        capacity_hi: Rational,
        uncertainty: DuSet,
    ) -> Result<Self> {
        let items: ItemSet = size.keys().copied().collect();
        if let Some((e, _)) = size.iter().find(|(_, a)| **a == 0) {
            return Err(Error::InvalidInstance(format!("item {e} has size 0; sizes must be positive")));
        }
        for e in &items {
            leader_value.get(e).ok_or(Error::MissingCost(*e))?;
            if uncertainty.values_of(*e)?.iter().any(|v| !v.is_positive()) {
                return Err(Error::InvalidInstance(format!("follower values of item {e} must be positive")));
            }
        }
        let total = Rational::from_integer(BigInt::from(size.values().sum::<u64>()));
        if capacity_lo.is_negative() || capacity_lo > capacity_hi || capacity_hi > total {
            return Err(Error::InvalidInstance(format!(
                "capacity range [{capacity_lo}, {capacity_hi}] must satisfy 0 ≤ b⁻ ≤ b⁺ ≤ a(E) = {total}"
            )));
        }
        let leader_value = leader_value.into_iter().filter(|(e, _)| items.contains(e)).collect();
        Ok(KnapsackInstance { items, size, leader_value, capacity_lo, capacity_hi, uncertainty })
    }

    pub fn items(&self) -> &ItemSet {
        &self.items
    }

    /// `a`.
    pub fn size(&self) -> &BTreeMap<ItemId, u64> {
        &self.size
    }

    /// `c`.
    pub fn leader_value(&self) -> &CostMap {
        &self.leader_value
    }

    /// `b⁻`.
    pub fn capacity_lo(&self) -> &Rational {
        &self.capacity_lo
    }

    /// `b⁺`.
    pub fn capacity_hi(&self) -> &Rational {
        &self.capacity_hi
    }

    /// `U`.
    pub fn uncertainty(&self) -> &DuSet {
        &self.uncertainty
    }

    /// `A = a(E)`.
    pub fn total_size(&self) -> u64 {
        self.size.values().sum()
    }

    fn a(&self, e: ItemId) -> Rational {
        Rational::from_integer(BigInt::from(self.size[&e]))
    }

    /// `c · y`.
    pub fn value_of(&self, y: &FractionalSelection) -> Rational {
        y.iter().fold(Rational::zero(), |acc, (e, v)| acc + &self.leader_value[e] * v)
    }
}

/// Best subsets of exact total size, for every target size at once.
#[derive(Debug, Clone)]
pub struct EqualityKnapsack {
    items: Vec<(ItemId, usize)>,
    // best[i][s]: best value using the first i items with total size s.
    best: Vec<Vec<Option<Rational>>>,
}

impl EqualityKnapsack {
    /// Builds the table over `items` with the given sizes and values.
    pub fn new(items: &[ItemId], size: &BTreeMap<ItemId, u64>, value: &CostMap) -> Result<Self> {
        let sized: Vec<(ItemId, usize)> = items
            .iter()
            .map(|e| {
                let a = size.get(e).ok_or(Error::MissingCost(*e))?;
                value.get(e).ok_or(Error::MissingCost(*e))?;
                Ok((*e, usize::try_from(*a).map_err(|_| Error::InvalidInstance("size too large".into()))?))
            })
            .collect::<Result<_>>()?;
        let total: usize = sized.iter().map(|(_, a)| a).sum();
        let mut best = vec![vec![None; total + 1]];
        best[0][0] = Some(Rational::zero());
        for (e, a) in &sized {
            let prev = best.last().unwrap();
            let mut row = prev.clone();
            for s in *a..=total {
                if let Some(v) = &prev[s - a] {
                    let cand = v + &value[e];
                    if row[s].as_ref().is_none_or(|cur| cand > *cur) {
                        row[s] = Some(cand);
                    }
                }
            }
            best.push(row);
        }
        Ok(EqualityKnapsack { items: sized, best })
    }

    /// Sum of all sizes.
    pub fn total(&self) -> usize {
        self.best[0].len() - 1
    }

    /// The best value at exact size `target`, if reachable.
    pub fn value(&self, target: usize) -> Option<&Rational> {
        self.best.last().unwrap().get(target)?.as_ref()
    }

    /// A best subset of exact size `target`, if reachable. When taking and
    /// skipping an item are equally good the item is skipped.
    pub fn subset(&self, target: usize) -> Option<(ItemSet, Rational)> {
        let value = self.value(target)?.clone();
        let mut out = ItemSet::new();
        let mut s = target;
        for i in (1..=self.items.len()).rev() {
            if self.best[i - 1][s].as_ref() == self.best[i][s].as_ref() {
                continue;
            }
            let (e, a) = self.items[i - 1];
            out.insert(e);
            s -= a;
        }
        Some((out, value))
    }
}

/// Subset of `items` with total size exactly `target` maximising `value`.
pub fn dp_equality_knapsack(
    items: &[ItemId],
    size: &BTreeMap<ItemId, u64>,
    target: usize,
    value: &CostMap,
) -> Result<Option<(ItemSet, Rational)>> {
    Ok(EqualityKnapsack::new(items, size, value)?.subset(target))
}

/// Compares items for the follower: value per size descending, then leader
/// value per size ascending (ties resolved against the leader), then id.
/// Ratios are compared by cross-multiplication.
pub fn knapsack_follower_cmp(
    a: (ItemId, u64, &Rational, &Rational),
    b: (ItemId, u64, &Rational, &Rational),
) -> Ordering {
    let (ea, sa, da, ca) = a;
    let (eb, sb, db, cb) = b;
    let sa = Rational::from_integer(BigInt::from(sa));
    let sb = Rational::from_integer(BigInt::from(sb));
    (db * &sa).cmp(&(da * &sb)).then_with(|| (ca * &sb).cmp(&(cb * &sa))).then(ea.cmp(&eb))
}

/// The follower's continuous knapsack: greedy by value per size, filling
/// capacity `b` completely.
pub fn follower_continuous_knapsack(
    items: &ItemSet,
    size: &BTreeMap<ItemId, u64>,
    d: &CostMap,
    leader_value: &CostMap,
    b: &Rational,
) -> Result<FractionalSelection> {
    let mut order: Vec<ItemId> = items.iter().copied().collect();
    for e in &order {
        d.get(e).ok_or(Error::MissingCost(*e))?;
        leader_value.get(e).ok_or(Error::MissingCost(*e))?;
    }
    let total = Rational::from_integer(BigInt::from(items.iter().map(|e| size[e]).sum::<u64>()));
    if b.is_negative() || *b > total {
        return Err(Error::range("knapsack capacity", b));
    }
    order.sort_by(|x, y| {
        knapsack_follower_cmp((*x, size[x], &d[x], &leader_value[x]), (*y, size[y], &d[y], &leader_value[y]))
    });
    let mut rest = b.clone();
    let mut y = FractionalSelection::new();
    for e in order {
        let a = Rational::from_integer(BigInt::from(size[&e]));
        let take = if rest >= a { Rational::one() } else { &rest / &a };
        rest -= &take * &a;
        y.insert(e, take);
    }
    Ok(y)
}

/// A guess `(e*, δ*)` of the follower's fractional item and its value,
/// with the items that must come before it (`E⁻`, by ratio) and the items
/// that may (`E⁰`), plus the size-indexed DP over `E⁰` minimising `c`.
struct KnapsackGuess {
    item: ItemId,
    delta: Rational,
    minus: ItemSet,
    minus_size: usize,
    minus_value: Rational,
    table: EqualityKnapsack,
}

impl KnapsackGuess {
    /// Cheapest follower set of total size `bstar` consistent with the
    /// guess: `E⁻` plus a subset of `E⁰`.
    fn completion(&self, bstar: usize) -> Option<(ItemSet, Rational)> {
        if bstar < self.minus_size {
            return None;
        }
        let (sub, neg) = self.table.subset(bstar - self.minus_size)?;
        let set = self.minus.iter().chain(&sub).copied().collect();
        Some((set, &self.minus_value - neg))
    }

    fn max_size(&self) -> usize {
        self.minus_size + self.table.total()
    }
}

fn guesses(k: &KnapsackInstance) -> Result<Vec<KnapsackGuess>> {
    let hull = k.uncertainty.hull();
    let neg: CostMap = k.leader_value.iter().map(|(e, c)| (*e, -c)).collect();
    let mut out = Vec::new();
    for &star in &k.items {
        let astar = k.a(star);
        for delta in k.uncertainty.values_of(star)? {
            let mut minus = ItemSet::new();
            let mut zero = Vec::new();
            for &e in k.items.iter().filter(|e| **e != star) {
                let ae = k.a(e);
                // d(e)/a(e) compared with δ*/a(e*) by cross-multiplication.
                let ref_scaled = delta * &ae;
                if &hull.lo()[&e] * &astar > ref_scaled {
                    minus.insert(e);
                } else if &hull.hi()[&e] * &astar >= ref_scaled {
                    zero.push(e);
                }
            }
            let minus_size = minus.iter().map(|e| k.size[e] as usize).sum();
            let minus_value = minus.iter().fold(Rational::zero(), |acc, e| acc + &k.leader_value[e]);
            let table = EqualityKnapsack::new(&zero, &k.size, &neg)?;
            out.push(KnapsackGuess { item: star, delta: delta.clone(), minus, minus_size, minus_value, table });
        }
    }
    Ok(out)
}

fn knapsack_outcome(
    k: &KnapsackInstance,
    full: &ItemSet,
    star: Option<(ItemId, &Rational, Rational)>,
    d: CostMap,
) -> AdversaryOutcome {
    let mut y = FractionalSelection::new();
    for e in &k.items {
        let v = match &star {
            Some((s, _, share)) if s == e => share.clone(),
            _ if full.contains(e) => Rational::one(),
            _ => Rational::zero(),
        };
        y.insert(*e, v);
    }
    AdversaryOutcome {
        leader_value: k.value_of(&y),
        scenario: Scenario::new(d),
        scenario_index: None,
        response: FollowerResponse::Fractional(y),
    }
}

/// Worst case for capacity `b ∈ [b⁻, b⁺]`: the adversary guesses the
/// follower's fractional item `e*` with value `δ*` and the size `b*` of the
/// whole items; the cheapest fitting whole set comes from the DP. Ties go
/// to the lexicographically smallest `(e*, δ*, b*)`.
pub fn rbckp_adversary_du(k: &KnapsackInstance, b: &Rational) -> Result<AdversaryOutcome> {
    if b < &k.capacity_lo || b > &k.capacity_hi {
        return Err(Error::range("knapsack capacity", b));
    }
    let hull = k.uncertainty.hull();
    let total = k.total_size();
    if b.is_zero() || *b == Rational::from_integer(BigInt::from(total)) {
        let full = if b.is_zero() { ItemSet::new() } else { k.items.clone() };
        return Ok(knapsack_outcome(k, &full, None, hull.lo().clone()));
    }
    let bfloor = floor_i64(b);
    let mut best: Option<(Rational, ItemSet, ItemId, Rational, Rational)> = None;
    for g in guesses(k)? {
        let astar = k.a(g.item);
        let lo = (g.minus_size as i64).max(floor_i64(&(b - &astar)) + 1);
        let hi = (g.max_size() as i64).min(bfloor);
        for bstar in lo..=hi {
            let Some((set, cy)) = g.completion(bstar as usize) else { continue };
            let share = (b - Rational::from_integer(BigInt::from(bstar))) / &astar;
            let v = cy + &k.leader_value[&g.item] * &share;
            if best.as_ref().is_none_or(|bv| v < bv.0) {
                best = Some((v, set, g.item, g.delta.clone(), share));
            }
        }
    }
    let (_, full, star, delta, share) =
        best.ok_or_else(|| Error::Infeasible("no admissible guess for the capacity".into()))?;
    let d: CostMap = k
        .items
        .iter()
        .map(|e| {
            let v = if *e == star {
                delta.clone()
            } else if full.contains(e) {
                hull.hi()[e].clone()
            } else {
                hull.lo()[e].clone()
            };
            (*e, v)
        })
        .collect();
    Ok(knapsack_outcome(k, &full, Some((star, &delta, share)), d))
}

/// The leader's optimal capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackLeaderSolution {
    /// The chosen capacity `b`.
    pub capacity: Rational,
    /// The guaranteed leader value.
    pub value: Rational,
    /// The leader's objective on `[0, a(E)]`.
    pub objective: Plf,
}

/// Optimal capacity: every guess `(e*, δ*)` and every reachable whole size
/// `b*` yields a linear piece from `(b*, c(Y))` to `(b* + a(e*), c(Y) +
/// c(e*))`; the objective is the lower envelope of all pieces, maximised
/// over `[b⁻, b⁺]` (ties to the smallest capacity).
pub fn rbckp_leader_du(k: &KnapsackInstance) -> Result<KnapsackLeaderSolution> {
    let mut pieces = Vec::new();
    for g in guesses(k)? {
        let astar = k.a(g.item);
        for bstar in g.minus_size..=g.max_size() {
            let Some((_, cy)) = g.completion(bstar) else { continue };
            let x0 = Rational::from_integer(BigInt::from(bstar));
            let x1 = &x0 + &astar;
            let y1 = &cy + &k.leader_value[&g.item];
            pieces.push(Segment::new(x0, cy, x1, y1));
        }
    }
    let objective = if pieces.is_empty() {
        Plf::point(Rational::zero(), Rational::zero())
    } else {
        envelope_of_segments(&pieces, Mode::Min)?
    };
    let restricted = objective.restrict(&k.capacity_lo, &k.capacity_hi)?;
    let (capacity, value) = plf_extremum(&restricted, Mode::Max);
    Ok(KnapsackLeaderSolution { capacity, value, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ids;
    use crate::rational::{int, rat};

    fn sizes(v: &[u64]) -> BTreeMap<ItemId, u64> {
        v.iter().enumerate().map(|(i, a)| (ItemId(i as u32 + 1), *a)).collect()
    }

    fn vals(v: &[i64]) -> CostMap {
        v.iter().enumerate().map(|(i, a)| (ItemId(i as u32 + 1), int(*a))).collect()
    }

    #[test]
    fn equality_knapsack() {
        let items: Vec<ItemId> = (1..=3).map(ItemId).collect();
        let (set, v) = dp_equality_knapsack(&items, &sizes(&[2, 3, 4]), 5, &vals(&[5, 1, 7])).unwrap().unwrap();
        assert_eq!((set, v), (ids([1, 2]), int(6)));
        let (set, v) = dp_equality_knapsack(&items, &sizes(&[2, 3, 4]), 0, &vals(&[5, 1, 7])).unwrap().unwrap();
        assert_eq!((set, v), (ItemSet::new(), int(0)));
        assert_eq!(dp_equality_knapsack(&items, &sizes(&[2, 3, 4]), 1, &vals(&[5, 1, 7])).unwrap(), None);
    }

    #[test]
    fn continuous_knapsack_follower() {
        let y = follower_continuous_knapsack(&ids([1, 2]), &sizes(&[2, 3]), &vals(&[4, 3]), &vals(&[0, 0]), &int(3))
            .unwrap();
        assert_eq!((y[&ItemId(1)].clone(), y[&ItemId(2)].clone()), (int(1), rat(1, 3)));
        let all = follower_continuous_knapsack(&ids([1, 2]), &sizes(&[2, 3]), &vals(&[4, 3]), &vals(&[0, 0]), &int(5))
            .unwrap();
        assert!(all.values().all(One::is_one));
        let none = follower_continuous_knapsack(&ids([1, 2]), &sizes(&[2, 3]), &vals(&[4, 3]), &vals(&[0, 0]), &int(0))
            .unwrap();
        assert!(none.values().all(Zero::is_zero));
    }

    #[test]
    fn validation() {
        let du = DuSet::new(sizes(&[1, 1]).keys().map(|e| (*e, vec![int(1)])).collect()).unwrap();
        assert!(KnapsackInstance::new(sizes(&[0, 1]), vals(&[1, 1]), int(0), int(1), du.clone()).is_err());
        assert!(KnapsackInstance::new(sizes(&[1, 1]), vals(&[1, 1]), int(0), int(3), du.clone()).is_err());
        assert!(KnapsackInstance::new(sizes(&[1, 1]), vals(&[1, 1]), int(0), int(2), du).is_ok());
    }

    #[test]
    fn singleton_sets_match_the_follower() {
        let du = DuSet::new(vals(&[4, 3, 5]).into_iter().map(|(e, v)| (e, vec![v])).collect()).unwrap();
        let k = KnapsackInstance::new(sizes(&[2, 3, 1]), vals(&[1, -2, 3]), int(0), int(6), du).unwrap();
        for b in [rat(1, 2), int(2), rat(7, 2), int(5)] {
            let out = rbckp_adversary_du(&k, &b).unwrap();
            let y = follower_continuous_knapsack(k.items(), k.size(), &vals(&[4, 3, 5]), k.leader_value(), &b).unwrap();
            assert_eq!(out.leader_value, k.value_of(&y), "capacity {b}");
        }
        let s = rbckp_leader_du(&k).unwrap();
        let at = rbckp_adversary_du(&k, &s.capacity).unwrap();
        assert_eq!(at.leader_value, s.value);
    }
}
