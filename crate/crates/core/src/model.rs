//! Instances, scenarios and item identifiers shared by every solver.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use core::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Identifier of an item in the universe `E_l ∪ E_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A set of items, iterated in ascending id order.
pub type ItemSet = BTreeSet<ItemId>;

/// A cost function on items.
pub type CostMap = BTreeMap<ItemId, Rational>;

/// How the follower breaks ties between items of equal own cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Policy {
    /// Ties are broken in the leader's favour (cheaper leader cost first).
    Optimistic,
    /// Ties are broken against the leader (more expensive leader cost first).
    #[default]
    Pessimistic,
}

/// A bilevel selection instance: the leader picks `X ⊆ E_l`, the follower
/// completes it with `Y ⊆ E_f \ X` so that `|X ∪ Y| = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    leader_items: ItemSet,
    follower_items: ItemSet,
    capacity: usize,
    leader_cost: CostMap,
    policy: Policy,
}

impl Instance {
    /// Validates and builds an instance. The leader cost must be defined on
    /// every item of `E_l ∪ E_f` (extra entries are dropped) and the
    /// capacity may not exceed the size of the universe.
    pub fn new(
        leader_items: ItemSet,
        follower_items: ItemSet,
        capacity: usize,
        leader_cost: CostMap,
        policy: Policy,
    ) -> Result<Self> {
        let universe: ItemSet = leader_items.union(&follower_items).copied().collect();
        if capacity > universe.len() {
            return Err(Error::InvalidInstance(format!(
                "capacity exceeds universe: b = {capacity} > n = {}",
                universe.len()
            )));
        }
        let mut cost = CostMap::new();
        for e in &universe {
            let c = leader_cost.get(e).ok_or(Error::MissingCost(*e))?;
            cost.insert(*e, c.clone());
        }
        Ok(Instance { leader_items, follower_items, capacity, leader_cost: cost, policy })
    }

    /// `E_l`.
    pub fn leader_items(&self) -> &ItemSet {
        &self.leader_items
    }

    /// `E_f`.
    pub fn follower_items(&self) -> &ItemSet {
        &self.follower_items
    }

    /// `b`.
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// The leader's cost function `c` on `E_l ∪ E_f`.
    pub fn leader_cost(&self) -> &CostMap {
        &self.leader_cost
    }

    /// The follower's tie-breaking policy.
    pub fn policy(&self) -> Policy {
        self.policy
    }

    /// Same instance with another policy.
    pub fn with_policy(&self, policy: Policy) -> Self {
        Instance { policy, ..self.clone() }
    }

    /// Same instance with another capacity.
    pub fn with_capacity(&self, capacity: usize) -> Result<Self> {
        Instance::new(
            self.leader_items.clone(),
            self.follower_items.clone(),
            capacity,
            self.leader_cost.clone(),
            self.policy,
        )
    }

    /// `n_l = |E_l|`.
    pub fn n_leader(&self) -> usize {
        self.leader_items.len()
    }

    /// `n_f = |E_f|`.
    pub fn n_follower(&self) -> usize {
        self.follower_items.len()
    }

    /// `n = |E_l ∪ E_f|`.
    pub fn n(&self) -> usize {
        self.leader_cost.len()
    }

    /// `E_l ∩ E_f = ∅`.
    pub fn is_disjoint(&self) -> bool {
        self.leader_items.is_disjoint(&self.follower_items)
    }

    /// `E_l ⊆ E_f`.
    pub fn leader_within_follower(&self) -> bool {
        self.leader_items.is_subset(&self.follower_items)
    }

    /// `c(e)`.
    pub fn cost(&self, e: ItemId) -> &Rational {
        &self.leader_cost[&e]
    }

    /// `c(S)` for any collection of items.
    pub fn cost_of<'a>(&self, items: impl IntoIterator<Item = &'a ItemId>) -> Rational {
        items.into_iter().fold(Rational::zero(), |acc, e| acc + self.cost(*e))
    }

    /// `c · x` for a fractional vector.
    pub fn cost_of_fractional(&self, x: &BTreeMap<ItemId, Rational>) -> Rational {
        x.iter().fold(Rational::zero(), |acc, (e, v)| acc + self.cost(*e) * v)
    }

    /// Range `[b_l⁻, b_l⁺]` of leader cardinalities that admit a feasible
    /// follower completion when the sets are disjoint.
    pub fn leader_count_range(&self) -> (usize, usize) {
        let lo = self.capacity.saturating_sub(self.n_follower());
        let hi = self.capacity.min(self.n_leader());
        (lo, hi)
    }

    /// Checks that `X ⊆ E_l` and that the follower can complete it.
    pub fn check_leader_set(&self, x: &ItemSet) -> Result<()> {
        if let Some(e) = x.iter().find(|e| !self.leader_items.contains(e)) {
            return Err(Error::InvalidInstance(format!("item {e} is not a leader item")));
        }
        if x.len() > self.capacity {
            return Err(Error::Infeasible(format!(
                "leader selects {} items but the capacity is {}",
                x.len(),
                self.capacity
            )));
        }
        let needed = self.capacity - x.len();
        let available = self.follower_items.iter().filter(|e| !x.contains(e)).count();
        if needed > available {
            return Err(Error::InfeasibleLeader { needed, available });
        }
        Ok(())
    }
}

/// One realisation `d` of the follower's cost function, defined on `E_f`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub follower_cost: CostMap,
}

impl Scenario {
    pub fn new(follower_cost: CostMap) -> Self {
        Scenario { follower_cost }
    }

    /// `d(e)`, or a missing-cost error.
    pub fn get(&self, e: ItemId) -> Result<&Rational> {
        self.follower_cost.get(&e).ok_or(Error::MissingCost(e))
    }

    /// Checks that `d` is defined on every follower item.
    pub fn check_total(&self, follower_items: &ItemSet) -> Result<()> {
        for e in follower_items {
            self.get(*e)?;
        }
        Ok(())
    }
}

/// Builds an id set from raw indices.
pub fn ids(raw: impl IntoIterator<Item = u32>) -> ItemSet {
    raw.into_iter().map(ItemId).collect()
}
