//! Robust leader solvers for the binary problem
//! `min_X max_{d ∈ U} c(X ∪ Y(X, d))`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::adversary::{
    adversary, adversary_discrete, check_du_policy, check_interval_policy, AdversaryOutcome, HeadTable,
};
use crate::bsp::prefix_costs;
use crate::error::{Error, Result};
use crate::greedy::{cost_order, follower_order, follower_respond, GreedyOrder};
use crate::model::{Instance, ItemId, ItemSet, Policy, Scenario};
use crate::normalize::normalize_subset;
use crate::rational::Rational;
use crate::uncertainty::{du_to_interval, UncertaintySet};

/// A leader solution with its worst case.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustSolution {
    /// `X`.
    pub leader_set: ItemSet,
    /// The follower's answer in the worst case.
    pub follower_set: ItemSet,
    /// A worst-case scenario.
    pub worst_scenario: Scenario,
    /// `max_{d ∈ U} c(X ∪ Y(X, d))`.
    pub worst_value: Rational,
    /// For discrete sets, `c(X ∪ Y(X, d))` for every scenario in order.
    pub per_scenario_values: Option<Vec<Rational>>,
}

impl RobustSolution {
    /// Evaluates `X` with the fast adversary and packages the result.
    pub fn evaluate(instance: &Instance, u: &UncertaintySet, x: ItemSet) -> Result<Self> {
        let out = adversary(instance, u, &x)?;
        Self::from_outcome(instance, u, x, out)
    }

    pub(crate) fn from_outcome(
        instance: &Instance,
        u: &UncertaintySet,
        x: ItemSet,
        out: AdversaryOutcome,
    ) -> Result<Self> {
        let per_scenario_values = match u {
            UncertaintySet::Discrete(scenarios) => {
                let cx = instance.cost_of(&x);
                let mut vals = Vec::with_capacity(scenarios.len());
                for d in scenarios {
                    vals.push(&cx + instance.cost_of(&follower_respond(instance, &x, d)?));
                }
                Some(vals)
            }
            _ => None,
        };
        Ok(RobustSolution {
            follower_set: out.response.support(),
            worst_scenario: out.scenario,
            worst_value: out.leader_value,
            per_scenario_values,
            leader_set: x,
        })
    }
}

fn check_uncertainty(instance: &Instance, u: &UncertaintySet) -> Result<()> {
    u.validate(instance.follower_items())?;
    match u {
        UncertaintySet::Interval(iv) => check_interval_policy(instance, iv),
        UncertaintySet::DiscreteUncorrelated(du) => check_du_policy(instance, du),
        UncertaintySet::Discrete(_) => Ok(()),
    }
}

/// Worst follower cost as a function of the follower's cardinality when
/// the follower's pool is all of `E_f` (disjoint sets).
enum FollowerWorst {
    Discrete(Vec<Vec<Rational>>),
    Heads(HeadTable),
}

impl FollowerWorst {
    fn new(instance: &Instance, u: &UncertaintySet) -> Result<Self> {
        Ok(match u {
            UncertaintySet::Discrete(scenarios) => {
                let mut sums = Vec::with_capacity(scenarios.len());
                for d in scenarios {
                    let order = follower_order(instance, &ItemSet::new(), d)?;
                    sums.push(prefix_costs(instance, order.as_slice()));
                }
                FollowerWorst::Discrete(sums)
            }
            UncertaintySet::Interval(iv) => {
                let items: Vec<ItemId> = instance.follower_items().iter().copied().collect();
                FollowerWorst::Heads(HeadTable::new(instance, iv, &items)?)
            }
            UncertaintySet::DiscreteUncorrelated(du) => {
                let items: Vec<ItemId> = instance.follower_items().iter().copied().collect();
                FollowerWorst::Heads(HeadTable::new(instance, &du_to_interval(du), &items)?)
            }
        })
    }

    fn value(&self, count: usize) -> Rational {
        match self {
            FollowerWorst::Discrete(sums) => sums.iter().map(|s| &s[count]).max().cloned().unwrap(),
            FollowerWorst::Heads(t) if t.is_empty() => Rational::zero(),
            FollowerWorst::Heads(t) => t.best(count).expect("count within range").1,
        }
    }
}

/// Exact robust solver for disjoint item sets: for each leader cardinality
/// the leader takes its cheapest items, so only `b_l` has to be enumerated.
/// Ties go to the smallest cardinality.
pub fn solve_disjoint(instance: &Instance, u: &UncertaintySet) -> Result<RobustSolution> {
    if !instance.is_disjoint() {
        return Err(Error::WrongVariant(
            "leader and follower items overlap; use the 2-approximation or exact enumeration".into(),
        ));
    }
    check_uncertainty(instance, u)?;
    let pl = cost_order(instance.leader_items().iter().copied(), instance.leader_cost())?;
    let cl = prefix_costs(instance, pl.as_slice());
    let worst = FollowerWorst::new(instance, u)?;
    let b = instance.capacity();
    let (lo, hi) = instance.leader_count_range();
    let mut best: Option<(Rational, usize)> = None;
    for (bl, c) in cl.iter().enumerate().take(hi + 1).skip(lo) {
        let v = c + worst.value(b - bl);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, bl));
        }
    }
    let (value, bl) = best.expect("leader cardinality range is never empty");
    let sol = RobustSolution::evaluate(instance, u, pl.prefix(bl))?;
    debug_assert_eq!(sol.worst_value, value);
    Ok(sol)
}

/// Greedy 2-approximation for arbitrary item sets with non-negative leader
/// costs: the disjoint-case enumeration run on the normalized instance.
pub fn approx2(instance: &Instance, u: &UncertaintySet) -> Result<RobustSolution> {
    if let Some((e, c)) = instance.leader_cost().iter().find(|(_, c)| c.is_negative()) {
        return Err(Error::Precondition(format!(
            "the 2-approximation needs non-negative leader costs, item {e} costs {c}"
        )));
    }
    check_uncertainty(instance, u)?;
    let (norm, nu) = normalize_subset(instance, u)?;
    let pl = cost_order(norm.leader_items().iter().copied(), norm.leader_cost())?;
    let mut best: Option<(Rational, ItemSet, AdversaryOutcome)> = None;
    for bl in 0..=norm.capacity().min(norm.n_leader()) {
        let x = pl.prefix(bl);
        let out = adversary(&norm, &nu, &x)?;
        if best.as_ref().is_none_or(|(bv, _, _)| out.leader_value < *bv) {
            best = Some((out.leader_value.clone(), x, out));
        }
    }
    let (_, x, out) = best.expect("at least the empty leader set is evaluated");
    let lifted = lift_leader_set(instance, &x, &out.response.support());
    RobustSolution::evaluate(instance, u, lifted)
}

/// Maps a leader set of the normalized instance back to the original one:
/// leader-only items the follower was forced to take belong to the leader.
fn lift_leader_set(original: &Instance, x: &ItemSet, y: &ItemSet) -> ItemSet {
    x.iter().chain(y.iter().filter(|e| !original.follower_items().contains(e))).copied().collect()
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Number of leader sets exact enumeration has to visit.
pub fn enumeration_size(instance: &Instance) -> u128 {
    let n = instance.n_leader() as u128;
    (0..=instance.capacity().min(instance.n_leader()) as u128).fold(0u128, |acc, k| acc.saturating_add(binomial(n, k)))
}

/// Exact solver by enumerating every leader set with `|X| ≤ b` in
/// colexicographic order; the first optimum wins.
pub fn exact_enumerate(instance: &Instance, u: &UncertaintySet) -> Result<RobustSolution> {
    exact_enumerate_budgeted(instance, u, u128::MAX)
}

/// [`exact_enumerate`] refusing to start when more than `max_subsets`
/// leader sets would be visited.
pub fn exact_enumerate_budgeted(instance: &Instance, u: &UncertaintySet, max_subsets: u128) -> Result<RobustSolution> {
    let needed = enumeration_size(instance);
    if needed > max_subsets || instance.n_leader() >= 64 {
        return Err(Error::BudgetExceeded { what: "leader subsets", needed, budget: max_subsets });
    }
    check_uncertainty(instance, u)?;
    let leaders: Vec<ItemId> = instance.leader_items().iter().copied().collect();
    let mut best: Option<(ItemSet, AdversaryOutcome)> = None;
    for mask in 0u64..(1u64 << leaders.len()) {
        if mask.count_ones() as usize > instance.capacity() {
            continue;
        }
        let x: ItemSet = leaders.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
        if instance.check_leader_set(&x).is_err() {
            continue;
        }
        let out = adversary(instance, u, &x)?;
        if best.as_ref().is_none_or(|(_, b)| out.leader_value < b.leader_value) {
            best = Some((x, out));
        }
    }
    let (x, out) = best.ok_or_else(|| Error::Infeasible("no feasible leader set".into()))?;
    RobustSolution::from_outcome(instance, u, x, out)
}

/// Exact solver for discrete sets whose running time is polynomial for a
/// fixed number of scenarios.
///
/// Every optimal solution induces, per scenario `d`, a prefix `P_d` of the
/// follower's greedy order that covers `X ∪ Y_d`. The algorithm guesses the
/// prefix lengths; leader items are then grouped into cells by the set of
/// scenarios whose prefix misses them, and the leader must pick
/// `b − |P_d|` items outside `P_d` for every `d`. Within a cell only the
/// count matters, and the cheapest items are best.
pub fn exact_prefix_xp(instance: &Instance, u: &UncertaintySet) -> Result<RobustSolution> {
    let UncertaintySet::Discrete(_) = u else {
        return Err(Error::WrongVariant(format!(
            "the prefix-combination algorithm needs a discrete uncertainty set, got {}",
            u.kind_name()
        )));
    };
    check_uncertainty(instance, u)?;
    let (norm, nu) = normalize_subset(instance, u)?;
    let UncertaintySet::Discrete(scenarios) = &nu else { unreachable!() };
    let k = scenarios.len();
    if k >= 16 {
        return Err(Error::BudgetExceeded { what: "scenario cells", needed: 1u128 << k, budget: 1 << 15 });
    }
    let b = norm.capacity();
    let orders: Vec<GreedyOrder> =
        scenarios.iter().map(|d| follower_order(&norm, &ItemSet::new(), d)).collect::<Result<_>>()?;
    let prefix_sums: Vec<Vec<Rational>> = orders.iter().map(|o| prefix_costs(&norm, o.as_slice())).collect();
    let positions: Vec<BTreeMap<ItemId, usize>> =
        orders.iter().map(|o| o.as_slice().iter().enumerate().map(|(i, e)| (*e, i)).collect()).collect();
    let leaders_by_cost = cost_order(norm.leader_items().iter().copied(), norm.leader_cost())?;

    let mut search = XpSearch { k, best: None };
    let mut lens = vec![0usize; k];
    loop {
        // Cells: mask of scenarios whose prefix does not contain the item.
        let mut cells: Vec<Vec<ItemId>> = vec![Vec::new(); 1 << k];
        for e in leaders_by_cost.as_slice() {
            let mask = (0..k).filter(|&s| positions[s][e] >= lens[s]).fold(0usize, |m, s| m | 1 << s);
            cells[mask].push(*e);
        }
        let cell_sums: Vec<Vec<Rational>> = cells.iter().map(|c| prefix_costs(&norm, c)).collect();
        let base: Vec<Rational> = (0..k).map(|s| prefix_sums[s][lens[s]].clone()).collect();
        let need: Vec<usize> = lens.iter().map(|l| b - l).collect();
        let mut counts = vec![0usize; 1 << k];
        search.assign(1, &cells, &cell_sums, &base, &need, &mut vec![0; k], &mut counts);

        // Next tuple of prefix lengths in 0..=b.
        let mut i = 0;
        while i < k && lens[i] == b.min(orders[i].len()) {
            lens[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        lens[i] += 1;
    }
    let (_, x) = search.best.ok_or_else(|| Error::Infeasible("no feasible leader set".into()))?;
    let out = adversary_discrete(&norm, scenarios, &x)?;
    let lifted = lift_leader_set(instance, &x, &out.response.support());
    let sol = RobustSolution::evaluate(instance, u, lifted)?;
    Ok(sol)
}

struct XpSearch {
    k: usize,
    best: Option<(Rational, ItemSet)>,
}

impl XpSearch {
    /// Enumerates counts for cells `mask..2^k` subject to the per-scenario
    /// demands; `got[s]` is the count already assigned to cells missing `s`.
    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        mask: usize,
        cells: &[Vec<ItemId>],
        sums: &[Vec<Rational>],
        base: &[Rational],
        need: &[usize],
        got: &mut Vec<usize>,
        counts: &mut Vec<usize>,
    ) {
        let k = self.k;
        if mask == 1 << k {
            if got != need {
                return;
            }
            let value = (0..k)
                .map(|s| {
                    (1..1usize << k)
                        .filter(|m| m >> s & 1 == 1)
                        .fold(base[s].clone(), |acc, m| acc + &sums[m][counts[m]])
                })
                .max()
                .unwrap();
            if self.best.as_ref().is_none_or(|(bv, _)| value < *bv) {
                let x = (1..1usize << k).flat_map(|m| cells[m][..counts[m]].iter().copied()).collect();
                self.best = Some((value, x));
            }
            return;
        }
        let room = (0..k).filter(|s| mask >> s & 1 == 1).map(|s| need[s] - got[s]).min().unwrap();
        for c in 0..=room.min(cells[mask].len()) {
            counts[mask] = c;
            for s in (0..k).filter(|s| mask >> s & 1 == 1) {
                got[s] += c;
            }
            self.assign(mask + 1, cells, sums, base, need, got, counts);
            for s in (0..k).filter(|s| mask >> s & 1 == 1) {
                got[s] -= c;
            }
        }
        counts[mask] = 0;
    }
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicate edges and bad endpoints.
    /// Edges are stored as `(smaller, larger)`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidInstance(format!("invalid edge ({a}, {b})")));
            }
            let e = (a.min(b), a.max(b));
            if out.contains(&e) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({a}, {b})")));
            }
            out.push(e);
        }
        Ok(Graph { n, edges: out })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Whether the vertex set (given as a bit mask) touches every edge.
    pub fn is_cover(&self, mask: u64) -> bool {
        self.edges.iter().all(|&(a, b)| mask >> a & 1 == 1 || mask >> b & 1 == 1)
    }
}

/// Item id of vertex `v` in a vertex-cover instance.
pub fn vertex_item(v: usize) -> ItemId {
    ItemId(v as u32 + 1)
}

/// Builds a robust instance whose optimal leader sets are exactly the
/// minimum vertex covers of `graph` (for minimum cover size in `[2, n−1]`),
/// with optimal value `(min cover size) + n`; any leader set that is not a
/// cover has worst value `2n`.
///
/// Items: vertices `v_j` (ids `1..=n`) and helpers `h_1..h_{n+3}` (ids
/// `n+1..=2n+3`); `b = n + 1`. Each edge gets a scenario whose greedy order
/// starts `h_{n+1}, h_{n+2}`, the vertices off the edge, `h_{n+3}`; one more
/// scenario starts `h_{n+3}, h_1, …, h_n`. Follower costs are consecutive
/// integers along each order.
pub fn reduce_vertex_cover(graph: &Graph) -> (Instance, Vec<Scenario>) {
    let n = graph.n as u32;
    let h = |i: u32| n + i;
    let universe = 1..=2 * n + 3;
    let mut c = BTreeMap::new();
    for v in 1..=n {
        c.insert(ItemId(v), Rational::from_integer(1.into()));
        c.insert(ItemId(h(v)), Rational::zero());
    }
    c.insert(ItemId(h(n + 1)), Rational::from_integer(1.into()));
    c.insert(ItemId(h(n + 2)), Rational::from_integer(1.into()));
    c.insert(ItemId(h(n + 3)), Rational::from_integer(i64::from(n).into()));
    let leader: ItemSet = (1..=n).map(ItemId).collect();
    let follower: ItemSet = universe.clone().map(ItemId).collect();
    let inst = Instance::new(leader, follower, graph.n + 1, c, Policy::Pessimistic).expect("valid construction");
    let mut scenarios = Vec::with_capacity(graph.edges.len() + 1);
    for &(a, b) in &graph.edges {
        let mut order = vec![h(n + 1), h(n + 2)];
        order.extend((0..graph.n).filter(|&v| v != a && v != b).map(|v| vertex_item(v).0));
        order.push(h(n + 3));
        scenarios.push(crate::fixtures::costs_from_order(&order, universe.clone()));
    }
    let mut order = vec![h(n + 3)];
    order.extend((1..=n).map(h));
    scenarios.push(crate::fixtures::costs_from_order(&order, universe));
    (inst, scenarios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::ids;
    use crate::rational::{int, rat};

    #[test]
    fn approximation_gap_discrete() {
        let (inst, scenarios) = fixtures::approximation_gap_discrete(6, &rat(1, 4));
        let u = UncertaintySet::Discrete(scenarios);
        assert_eq!(approx2(&inst, &u).unwrap().worst_value, rat(7, 4));
        let exact = exact_enumerate(&inst, &u).unwrap();
        assert_eq!(exact.worst_value, int(1));
        assert_eq!(exact.leader_set, ids([2]));
        assert_eq!(exact.per_scenario_values, Some(vec![int(1), int(1)]));
        assert_eq!(exact_prefix_xp(&inst, &u).unwrap().worst_value, int(1));
    }

    #[test]
    fn approximation_gap_interval() {
        let (inst, iv) = fixtures::approximation_gap_interval(6, &rat(1, 4));
        let u = UncertaintySet::Interval(iv);
        assert_eq!(approx2(&inst, &u).unwrap().worst_value, rat(7, 4));
        let exact = exact_enumerate(&inst, &u).unwrap();
        assert_eq!(exact.worst_value, int(1));
        assert_eq!(exact.leader_set, ids([2]));
    }

    #[test]
    fn two_scenario_disjoint_example() {
        let (inst, scenarios) = fixtures::worked_example_two_scenarios();
        let s = solve_disjoint(&inst, &UncertaintySet::Discrete(scenarios)).unwrap();
        assert_eq!(s.worst_value, int(-2));
        assert_eq!(s.leader_set.len(), 1);
    }

    #[test]
    fn overlapping_sets_are_rejected_by_disjoint_solver() {
        let (inst, scenarios) = fixtures::approximation_gap_discrete(6, &rat(1, 4));
        assert!(matches!(solve_disjoint(&inst, &UncertaintySet::Discrete(scenarios)), Err(Error::WrongVariant(_))));
    }

    #[test]
    fn negative_costs_are_rejected_by_approximation() {
        let (inst, d) = fixtures::worked_example_certain();
        assert!(matches!(approx2(&inst, &UncertaintySet::Discrete(vec![d])), Err(Error::Precondition(_))));
    }

    #[test]
    fn cycle_and_complete_graph_reductions() {
        let c4 = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (inst, scenarios) = reduce_vertex_cover(&c4);
        assert_eq!((inst.n_follower(), inst.capacity(), scenarios.len()), (11, 5, 5));
        let u = UncertaintySet::Discrete(scenarios.clone());
        assert_eq!(exact_enumerate(&inst, &u).unwrap().worst_value, int(6));
        // In the last scenario a cover leaves h_{n+3} to the follower.
        let y = follower_respond(&inst, &ids([1, 3]), &scenarios[4]).unwrap();
        assert!(y.contains(&ItemId(4 + 7)));
        let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let (inst, scenarios) = reduce_vertex_cover(&k4);
        let u = UncertaintySet::Discrete(scenarios);
        assert_eq!(exact_enumerate(&inst, &u).unwrap().worst_value, int(7));
    }

    #[test]
    fn enumeration_budget_guard() {
        let c: BTreeMap<ItemId, Rational> = (1..=40).map(|e| (ItemId(e), int(1))).collect();
        let inst = Instance::new(ids(1..=20), ids(21..=40), 20, c, Policy::Pessimistic).unwrap();
        let d = Scenario::new((21..=40).map(|e| (ItemId(e), int(0))).collect());
        let u = UncertaintySet::Discrete(vec![d]);
        assert!(matches!(exact_enumerate_budgeted(&inst, &u, 1 << 16), Err(Error::BudgetExceeded { .. })));
    }
}
