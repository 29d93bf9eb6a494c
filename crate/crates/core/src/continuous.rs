//! The continuous robust problem on disjoint item sets: leader and follower
//! may take fractions of items.
//!
//! With disjoint sets only the leader's total mass `b_l = Σ x` matters; the
//! leader's objective is `g_l(b_l) + g_f(b_l)` where `g_l` is the convex
//! cost of its cheapest fractional prefix and `g_f` is the worst follower
//! cost for the remaining mass `b − b_l`. Both are piecewise linear, so the
//! optimum is found among their breakpoints.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::adversary::{check_du_policy, check_interval_policy, AdversaryOutcome, FollowerResponse, HeadTable};
use crate::error::{Error, Result};
use crate::greedy::{
    check_fractional_leader, follower_respond_continuous, solve_continuous_selection, FractionalSelection,
};
use crate::model::{CostMap, Instance, ItemId, ItemSet, Scenario};
use crate::plf::{
    envelope_of_segments, plf_envelope, plf_envelope_partial, plf_extremum, plf_join, plf_mirrored, plf_selection,
    plf_shift, plf_sum, Mode, OrderKey, Plf, Segment,
};
use crate::rational::{floor_i64, frac, from_usize, half, Rational};
use crate::uncertainty::{DuSet, IntervalSet, UncertaintySet};

/// An optimal fractional leader solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalLeaderSolution {
    /// The canonical leader vector: a fractional prefix of the cheapest
    /// leader items.
    pub x: FractionalSelection,
    /// `b_l = Σ x`.
    pub leader_amount: Rational,
    /// The optimal worst-case leader cost.
    pub value: Rational,
    /// The leader's objective as a function of `b_l`.
    pub objective: Plf,
}

fn check_disjoint(instance: &Instance) -> Result<()> {
    if instance.is_disjoint() {
        Ok(())
    } else {
        Err(Error::WrongVariant("the continuous solvers need disjoint leader and follower items".into()))
    }
}

/// `g_l` on `[b_l⁻, b_l⁺]`.
fn leader_function(instance: &Instance) -> Result<Plf> {
    let (lo, hi) = instance.leader_count_range();
    let c = instance.leader_cost();
    plf_selection(instance.leader_items().iter().copied(), OrderKey::by(c), c, lo, hi)
}

fn finish(instance: &Instance, gl: &Plf, gf: &Plf) -> Result<FractionalLeaderSolution> {
    let g = plf_sum(gl, gf)?;
    let (bl, value) = plf_extremum(&g, Mode::Min);
    let x = solve_continuous_selection(instance.leader_items().iter().copied(), &bl, instance.leader_cost())?;
    Ok(FractionalLeaderSolution { x, leader_amount: bl, value, objective: g })
}

/// The leader's fractional vector of mass `amount` (cheapest items first).
pub fn leader_vector(instance: &Instance, amount: &Rational) -> Result<FractionalSelection> {
    solve_continuous_selection(instance.leader_items().iter().copied(), amount, instance.leader_cost())
}

/// Worst case over explicit scenarios for a fractional leader vector.
pub fn rcbsp_adversary_discrete(
    instance: &Instance,
    scenarios: &[Scenario],
    x: &FractionalSelection,
) -> Result<AdversaryOutcome> {
    check_disjoint(instance)?;
    let bf = check_fractional_leader(instance, x)?;
    UncertaintySet::Discrete(scenarios.to_vec()).validate(instance.follower_items())?;
    let cx = instance.cost_of_fractional(x);
    let mut best: Option<AdversaryOutcome> = None;
    for (i, d) in scenarios.iter().enumerate() {
        let y = follower_respond_continuous(instance, &bf, d)?;
        let v = &cx + instance.cost_of_fractional(&y);
        if best.as_ref().is_none_or(|b| v > b.leader_value) {
            best = Some(AdversaryOutcome {
                scenario: d.clone(),
                scenario_index: Some(i),
                response: FollowerResponse::Fractional(y),
                leader_value: v,
            });
        }
    }
    Ok(best.expect("validated set has a scenario"))
}

/// Optimal fractional leader against explicit scenarios: `g_l` plus the
/// upper envelope of the per-scenario follower functions.
pub fn rcbsp_leader_discrete(instance: &Instance, scenarios: &[Scenario]) -> Result<FractionalLeaderSolution> {
    check_disjoint(instance)?;
    UncertaintySet::Discrete(scenarios.to_vec()).validate(instance.follower_items())?;
    let (lo, hi) = instance.leader_count_range();
    let c = instance.leader_cost();
    let fs: Vec<Plf> = scenarios
        .iter()
        .map(|d| {
            let key = OrderKey { primary: &d.follower_cost, secondary: c, policy: instance.policy() };
            plf_mirrored(instance.follower_items().iter().copied(), key, c, lo, hi, instance.capacity())
        })
        .collect::<Result<_>>()?;
    let gf = plf_envelope(&fs, Mode::Max)?;
    finish(instance, &leader_function(instance)?, &gf)
}

/// Fractional prefix of `items` (already in preference order) of mass
/// `amount`, and its leader cost.
fn fractional_take(instance: &Instance, items: &[ItemId], amount: &Rational) -> (FractionalSelection, Rational) {
    let mut rest = amount.clone();
    let mut y = FractionalSelection::new();
    let mut cost = Rational::zero();
    for e in items {
        if rest.is_zero() {
            break;
        }
        let take = if rest >= Rational::one() { Rational::one() } else { rest.clone() };
        cost += instance.cost(*e) * &take;
        rest -= &take;
        y.insert(*e, take);
    }
    (y, cost)
}

fn complete(instance: &Instance, mut y: FractionalSelection) -> FractionalSelection {
    for e in instance.follower_items() {
        y.entry(*e).or_insert_with(Rational::zero);
    }
    y
}

/// Worst case over an interval set for a fractional leader vector.
///
/// For every head `ē` the follower takes the items that must precede it,
/// then the most expensive fractional mass of the items that may precede
/// it. The witness scenario puts fully taken items at `d⁻`, untaken items
/// at `d⁺`, and the fractional item strictly between the two groups.
pub fn rcbsp_adversary_interval(
    instance: &Instance,
    u: &IntervalSet,
    x: &FractionalSelection,
) -> Result<AdversaryOutcome> {
    check_disjoint(instance)?;
    let bf = check_fractional_leader(instance, x)?;
    UncertaintySet::Interval(u.clone()).validate(instance.follower_items())?;
    check_interval_policy(instance, u)?;
    let cx = instance.cost_of_fractional(x);
    let items: Vec<ItemId> = instance.follower_items().iter().copied().collect();
    let table = HeadTable::new(instance, u, &items)?;
    let mut best: Option<(Rational, FractionalSelection)> = None;
    for i in 0..table.len() {
        let (m, minus_cost, zero) = table.parts(i);
        let rest = &bf - from_usize(m);
        if rest < Rational::zero() || from_usize(zero.len()) < rest {
            continue;
        }
        let (mut y, zc) = fractional_take(instance, zero, &rest);
        let v = minus_cost + zc;
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            let head = table.selection(i, m);
            for e in head {
                y.insert(e, Rational::one());
            }
            best = Some((v, y));
        }
    }
    let y = match best {
        Some((_, y)) => y,
        None if items.is_empty() => FractionalSelection::new(),
        None => unreachable!("a feasible amount admits a head"),
    };
    let y = complete(instance, y);
    let scenario = interval_witness(u, &y);
    Ok(AdversaryOutcome {
        scenario,
        scenario_index: None,
        leader_value: &cx + instance.cost_of_fractional(&y),
        response: FollowerResponse::Fractional(y),
    })
}

/// Scenario realising a fractional prefix `y` inside an interval box.
fn interval_witness(u: &IntervalSet, y: &FractionalSelection) -> Scenario {
    let mut d = CostMap::new();
    let mut fractional = None;
    let mut below: Option<Rational> = None; // largest cost among full items
    let mut above: Option<Rational> = None; // smallest cost among empty items
    for (e, v) in y {
        if v.is_one() {
            let c = u.lo()[e].clone();
            below = Some(below.map_or(c.clone(), |b| b.max(c.clone())));
            d.insert(*e, c);
        } else if v.is_zero() {
            let c = u.hi()[e].clone();
            above = Some(above.map_or(c.clone(), |a| a.min(c.clone())));
            d.insert(*e, c);
        } else {
            fractional = Some(*e);
        }
    }
    if let Some(f) = fractional {
        let lo = below.map_or(u.lo()[&f].clone(), |b| b.max(u.lo()[&f].clone()));
        let hi = above.map_or(u.hi()[&f].clone(), |a| a.min(u.hi()[&f].clone()));
        d.insert(f, (lo + hi) * half());
    }
    Scenario::new(d)
}

/// Optimal fractional leader against an interval set: the follower function
/// is the upper envelope over heads of shifted mirrored selection functions
/// on the items that may precede each head.
pub fn rcbsp_leader_interval(instance: &Instance, u: &IntervalSet) -> Result<FractionalLeaderSolution> {
    check_disjoint(instance)?;
    UncertaintySet::Interval(u.clone()).validate(instance.follower_items())?;
    check_interval_policy(instance, u)?;
    let b = instance.capacity();
    let (bl_lo, bl_hi) = instance.leader_count_range();
    let (bf_lo, bf_hi) = (b - bl_hi, b - bl_lo);
    let items: Vec<ItemId> = instance.follower_items().iter().copied().collect();
    let table = HeadTable::new(instance, u, &items)?;
    let neg: CostMap = instance.leader_cost().iter().map(|(e, c)| (*e, -c)).collect();
    let mut fs = Vec::new();
    for i in 0..table.len() {
        let (m, minus_cost, zero) = table.parts(i);
        if m > bf_hi || m + zero.len() < bf_lo {
            continue;
        }
        let lo = bf_lo.saturating_sub(m);
        let hi = (bf_hi - m).min(zero.len());
        let f = plf_mirrored(zero.iter().copied(), OrderKey::by(&neg), instance.leader_cost(), b - hi, b - lo, b)?;
        fs.push(plf_shift(&f, &-from_usize(m), minus_cost));
    }
    let gf = if fs.is_empty() {
        Plf::zero(from_usize(bl_lo), from_usize(bl_hi))
    } else {
        plf_envelope_partial(&fs, Mode::Max)?
    };
    finish(instance, &leader_function(instance)?, &gf)
}

/// A guess `(e*, δ*)` of the fractional item and its cost, with the items
/// that must precede it and those that may.
struct DuGuess {
    item: ItemId,
    delta: Rational,
    minus: Vec<ItemId>,
    minus_cost: Rational,
    zero: Vec<ItemId>,
    zero_prefix: Vec<Rational>,
}

impl DuGuess {
    /// Whether the guess allows `k` whole follower items before `e*`.
    fn admits(&self, k: usize) -> bool {
        self.minus.len() <= k && k <= self.minus.len() + self.zero.len()
    }

    fn cost(&self, k: usize) -> Rational {
        &self.minus_cost + &self.zero_prefix[k - self.minus.len()]
    }

    fn selection(&self, k: usize) -> ItemSet {
        self.minus.iter().chain(&self.zero[..k - self.minus.len()]).copied().collect()
    }
}

fn du_guesses(instance: &Instance, du: &DuSet) -> Result<Vec<DuGuess>> {
    let hull = du.hull();
    let mut by_cost: Vec<ItemId> = instance.follower_items().iter().copied().collect();
    by_cost.sort_by(|a, b| instance.cost(*b).cmp(instance.cost(*a)).then(a.cmp(b)));
    let mut out = Vec::new();
    for &star in instance.follower_items() {
        for delta in du.values_of(star)? {
            let mut g = DuGuess {
                item: star,
                delta: delta.clone(),
                minus: Vec::new(),
                minus_cost: Rational::zero(),
                zero: Vec::new(),
                zero_prefix: alloc::vec![Rational::zero()],
            };
            for &e in by_cost.iter().filter(|e| **e != star) {
                if hull.hi()[&e] < *delta {
                    g.minus_cost += instance.cost(e);
                    g.minus.push(e);
                } else if hull.lo()[&e] <= *delta {
                    let next = g.zero_prefix.last().unwrap() + instance.cost(e);
                    g.zero_prefix.push(next);
                    g.zero.push(e);
                }
            }
            out.push(g);
        }
    }
    Ok(out)
}

/// Worst case over independent finite value sets for a fractional leader
/// vector. The adversary guesses the fractional item `e*` and its cost
/// `δ* ∈ U_{e*}`; the witness only uses values from the sets.
pub fn rcbsp_adversary_du(instance: &Instance, du: &DuSet, x: &FractionalSelection) -> Result<AdversaryOutcome> {
    check_disjoint(instance)?;
    let bf = check_fractional_leader(instance, x)?;
    UncertaintySet::DiscreteUncorrelated(du.clone()).validate(instance.follower_items())?;
    check_du_policy(instance, du)?;
    let cx = instance.cost_of_fractional(x);
    let hull = du.hull();
    let nf = from_usize(instance.n_follower());
    if bf.is_zero() || bf == nf {
        let y: FractionalSelection = instance
            .follower_items()
            .iter()
            .map(|e| (*e, if bf.is_zero() { Rational::zero() } else { Rational::one() }))
            .collect();
        let d = Scenario::new(instance.follower_items().iter().map(|e| (*e, hull.lo()[e].clone())).collect());
        return Ok(AdversaryOutcome {
            scenario: d,
            scenario_index: None,
            leader_value: &cx + instance.cost_of_fractional(&y),
            response: FollowerResponse::Fractional(y),
        });
    }
    let k = usize::try_from(floor_i64(&bf)).expect("non-negative amount");
    let rest = frac(&bf);
    let mut best: Option<(Rational, &DuGuess)> = None;
    let guesses = du_guesses(instance, du)?;
    for g in &guesses {
        if !g.admits(k) {
            continue;
        }
        let v = g.cost(k) + instance.cost(g.item) * &rest;
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, g));
        }
    }
    let (_, g) = best.expect("some guess is admissible for a fractional amount");
    let full = g.selection(k);
    let mut d = CostMap::new();
    for e in instance.follower_items() {
        let c = if *e == g.item {
            g.delta.clone()
        } else if full.contains(e) {
            hull.lo()[e].clone()
        } else {
            hull.hi()[e].clone()
        };
        d.insert(*e, c);
    }
    // Items tied with `δ*` are ordered by the follower's own tie rule, which
    // never lowers the guessed cost; replaying keeps the response canonical.
    let scenario = Scenario::new(d);
    let y = follower_respond_continuous(instance, &bf, &scenario)?;
    Ok(AdversaryOutcome {
        scenario,
        scenario_index: None,
        leader_value: &cx + instance.cost_of_fractional(&y),
        response: FollowerResponse::Fractional(y),
    })
}

/// Optimal fractional leader against independent finite value sets. For
/// each unit cell of the follower's mass, every admissible guess
/// `(e*, δ*)` contributes one linear piece; the follower function is the
/// per-cell upper envelope, joined across cells.
pub fn rcbsp_leader_du(instance: &Instance, du: &DuSet) -> Result<FractionalLeaderSolution> {
    check_disjoint(instance)?;
    UncertaintySet::DiscreteUncorrelated(du.clone()).validate(instance.follower_items())?;
    check_du_policy(instance, du)?;
    let b = instance.capacity();
    let (bl_lo, bl_hi) = instance.leader_count_range();
    let gl = leader_function(instance)?;
    if bl_lo == bl_hi {
        let amount = from_usize(bl_lo);
        let x = leader_vector(instance, &amount)?;
        let out = rcbsp_adversary_du(instance, du, &x)?;
        let objective = Plf::point(amount.clone(), out.leader_value.clone());
        return Ok(FractionalLeaderSolution { x, leader_amount: amount, value: out.leader_value, objective });
    }
    let (bf_lo, bf_hi) = (b - bl_hi, b - bl_lo);
    let guesses = du_guesses(instance, du)?;
    let mut cells = Vec::with_capacity(bf_hi - bf_lo);
    for k in (bf_lo..bf_hi).rev() {
        let x0 = from_usize(b - k - 1);
        let x1 = from_usize(b - k);
        let pieces: Vec<Segment> = guesses
            .iter()
            .filter(|g| g.admits(k))
            .map(|g| {
                let cy = g.cost(k);
                Segment::new(x0.clone(), &cy + instance.cost(g.item), x1.clone(), cy)
            })
            .collect();
        if pieces.is_empty() {
            return Err(Error::InvalidInstance(format!("no admissible guess for {k} follower items")));
        }
        cells.push(envelope_of_segments(&pieces, Mode::Max)?);
    }
    let gf = plf_join(&cells)?;
    finish(instance, &gl, &gf)
}

/// Dispatches the continuous leader solver on the uncertainty type.
pub fn rcbsp_leader(instance: &Instance, u: &UncertaintySet) -> Result<FractionalLeaderSolution> {
    match u {
        UncertaintySet::Discrete(s) => rcbsp_leader_discrete(instance, s),
        UncertaintySet::Interval(iv) => rcbsp_leader_interval(instance, iv),
        UncertaintySet::DiscreteUncorrelated(du) => rcbsp_leader_du(instance, du),
    }
}

/// Dispatches the continuous adversary on the uncertainty type.
pub fn rcbsp_adversary(instance: &Instance, u: &UncertaintySet, x: &FractionalSelection) -> Result<AdversaryOutcome> {
    match u {
        UncertaintySet::Discrete(s) => rcbsp_adversary_discrete(instance, s, x),
        UncertaintySet::Interval(iv) => rcbsp_adversary_interval(instance, iv, x),
        UncertaintySet::DiscreteUncorrelated(du) => rcbsp_adversary_du(instance, du, x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{ids, Policy};
    use crate::rational::{int, rat};
    use alloc::collections::BTreeMap;

    #[test]
    fn fractional_gap_example_optimum() {
        let (inst, scenarios) = fixtures::fractional_gap_example();
        let s = rcbsp_leader_discrete(&inst, &scenarios).unwrap();
        assert_eq!(s.leader_amount, rat(3, 2));
        assert_eq!(s.value, rat(-1, 2));
        assert!(s.objective.breakpoints().contains(&(rat(3, 2), rat(-1, 2))));
        for bl in 0..=3 {
            let x = leader_vector(&inst, &int(bl)).unwrap();
            assert_eq!(rcbsp_adversary_discrete(&inst, &scenarios, &x).unwrap().leader_value, int(0));
        }
        let x = leader_vector(&inst, &rat(3, 2)).unwrap();
        for d in &scenarios {
            let out = rcbsp_adversary_discrete(&inst, core::slice::from_ref(d), &x).unwrap();
            assert_eq!(out.leader_value, rat(-1, 2));
        }
    }

    #[test]
    fn two_scenario_example_minimum() {
        let (inst, scenarios) = fixtures::worked_example_two_scenarios();
        let s = rcbsp_leader_discrete(&inst, &scenarios).unwrap();
        assert_eq!((s.leader_amount, s.value), (int(1), int(-2)));
        assert_eq!(s.objective.eval(&int(2)), Some(int(0)));
        assert_eq!(s.objective.eval(&int(3)), Some(int(-2)));
    }

    #[test]
    fn three_overlapping_intervals_fractional() {
        let mut c = BTreeMap::new();
        c.insert(ItemId(0), int(0));
        c.insert(ItemId(1), int(0));
        for (e, v) in [(2, 5), (3, 1), (4, 3)] {
            c.insert(ItemId(e), int(v));
        }
        let inst = Instance::new(ids([0, 1]), ids([2, 3, 4]), 2, c, Policy::Pessimistic).unwrap();
        let lo = [(2, 0), (3, 1), (4, 2)].iter().map(|(e, v)| (ItemId(*e), int(*v))).collect();
        let hi = [(2, 10), (3, 11), (4, 12)].iter().map(|(e, v)| (ItemId(*e), int(*v))).collect();
        let u = IntervalSet::new(lo, hi).unwrap();
        let x = leader_vector(&inst, &rat(1, 2)).unwrap();
        let out = rcbsp_adversary_interval(&inst, &u, &x).unwrap();
        assert_eq!(out.leader_value, rat(13, 2));
        let FollowerResponse::Fractional(y) = &out.response else { panic!() };
        assert_eq!((y[&ItemId(2)].clone(), y[&ItemId(4)].clone()), (int(1), rat(1, 2)));
        assert!(u.contains(&out.scenario));
        let replay = follower_respond_continuous(&inst, &rat(3, 2), &out.scenario).unwrap();
        assert_eq!(&replay, y);
    }

    #[test]
    fn value_sets_with_hull_order() {
        let du = fixtures::hull_order_example();
        let mut c = BTreeMap::new();
        c.insert(ItemId(0), int(0));
        c.insert(ItemId(9), int(0));
        for (e, v) in [(1, 10), (2, 0), (3, 0)] {
            c.insert(ItemId(e), int(v));
        }
        let inst = Instance::new(ids([0, 9]), ids([1, 2, 3]), 2, c, Policy::Pessimistic).unwrap();
        let x = leader_vector(&inst, &rat(1, 2)).unwrap();
        let out = rcbsp_adversary_du(&inst, &du, &x).unwrap();
        assert!(du.contains(&out.scenario));
        // Scenario d(e1) = 1 puts e1 first: the follower takes all of it.
        assert_eq!(out.leader_value, int(10));
        let s = rcbsp_leader_du(&inst, &du).unwrap();
        // Taking the whole capacity itself leaves the follower nothing.
        assert_eq!((s.leader_amount, s.value), (int(2), int(0)));
    }
}
