//! Uncertainty sets for the follower's cost function.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{CostMap, ItemId, ItemSet, Scenario};
use crate::rational::Rational;

/// Independent intervals `[d⁻(e), d⁺(e)]` per follower item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    lo: CostMap,
    hi: CostMap,
}

impl IntervalSet {
    /// Builds the set, checking `d⁻(e) ≤ d⁺(e)` and matching supports.
    pub fn new(lo: CostMap, hi: CostMap) -> Result<Self> {
        if lo.keys().ne(hi.keys()) {
            return Err(Error::InvalidInstance("interval endpoints have different supports".into()));
        }
        for (e, l) in &lo {
            if *l > hi[e] {
                return Err(Error::InvalidInstance(format!("empty interval for item {e}")));
            }
        }
        Ok(IntervalSet { lo, hi })
    }

    /// `d⁻`.
    pub fn lo(&self) -> &CostMap {
        &self.lo
    }

    /// `d⁺`.
    pub fn hi(&self) -> &CostMap {
        &self.hi
    }

    pub fn lo_of(&self, e: ItemId) -> Result<&Rational> {
        self.lo.get(&e).ok_or(Error::MissingCost(e))
    }

    pub fn hi_of(&self, e: ItemId) -> Result<&Rational> {
        self.hi.get(&e).ok_or(Error::MissingCost(e))
    }

    /// Whether `d` lies in the box.
    pub fn contains(&self, d: &Scenario) -> bool {
        self.lo.iter().all(|(e, l)| match d.follower_cost.get(e) {
            Some(v) => l <= v && *v <= self.hi[e],
            None => false,
        })
    }

    /// Finds two distinct items whose intervals touch in a single point,
    /// i.e. `d⁻(e1) = d⁺(e2)`.
    pub fn one_point_intersection(&self, items: &ItemSet) -> Option<(ItemId, ItemId)> {
        for e1 in items {
            let l = &self.lo[e1];
            if let Some(e2) = items.iter().find(|e2| *e2 != e1 && self.hi[*e2] == *l) {
                return Some((*e1, *e2));
            }
        }
        None
    }
}

/// Finite value sets `U_e` per follower item; the scenario space is their
/// product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuSet {
    values: BTreeMap<ItemId, Vec<Rational>>,
}

impl DuSet {
    /// Builds the set; each `U_e` is sorted and de-duplicated and must be
    /// non-empty.
    pub fn new(values: BTreeMap<ItemId, Vec<Rational>>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (e, mut vs) in values {
            if vs.is_empty() {
                return Err(Error::InvalidInstance(format!("empty value set for item {e}")));
            }
            vs.sort();
            vs.dedup();
            out.insert(e, vs);
        }
        Ok(DuSet { values: out })
    }

    pub fn values(&self) -> &BTreeMap<ItemId, Vec<Rational>> {
        &self.values
    }

    pub fn values_of(&self, e: ItemId) -> Result<&[Rational]> {
        self.values.get(&e).map(Vec::as_slice).ok_or(Error::MissingCost(e))
    }

    /// `u = Σ_e |U_e|`.
    pub fn total_values(&self) -> usize {
        self.values.values().map(Vec::len).sum()
    }

    /// `Π_e |U_e|`, saturating.
    pub fn scenario_count(&self) -> u128 {
        self.values.values().fold(1u128, |acc, v| acc.saturating_mul(v.len() as u128))
    }

    /// Whether `d(e) ∈ U_e` for every item.
    pub fn contains(&self, d: &Scenario) -> bool {
        self.values.iter().all(|(e, vs)| match d.follower_cost.get(e) {
            Some(v) => vs.binary_search(v).is_ok(),
            None => false,
        })
    }

    /// Whether the value sets of distinct items are pairwise disjoint.
    pub fn pairwise_disjoint(&self) -> bool {
        let mut seen = BTreeMap::new();
        for (e, vs) in &self.values {
            for v in vs {
                if let Some(prev) = seen.insert(v, *e) {
                    if prev != *e {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Interval hull `[min U_e, max U_e]`.
    pub fn hull(&self) -> IntervalSet {
        let lo = self.values.iter().map(|(e, v)| (*e, v[0].clone())).collect();
        let hi = self.values.iter().map(|(e, v)| (*e, v[v.len() - 1].clone())).collect();
        IntervalSet { lo, hi }
    }
}

/// The three supported uncertainty sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UncertaintySet {
    /// An explicit list of scenarios.
    Discrete(Vec<Scenario>),
    /// Independent cost intervals.
    Interval(IntervalSet),
    /// Independent finite value sets.
    DiscreteUncorrelated(DuSet),
}

impl UncertaintySet {
    /// Checks the set against the follower items: every scenario, interval
    /// or value set must be defined on all of `E_f`.
    pub fn validate(&self, follower_items: &ItemSet) -> Result<()> {
        match self {
            UncertaintySet::Discrete(scenarios) => {
                if scenarios.is_empty() {
                    return Err(Error::InvalidInstance("discrete uncertainty set has no scenario".into()));
                }
                scenarios.iter().try_for_each(|d| d.check_total(follower_items))
            }
            UncertaintySet::Interval(iv) => {
                for e in follower_items {
                    iv.lo_of(*e)?;
                }
                Ok(())
            }
            UncertaintySet::DiscreteUncorrelated(du) => {
                for e in follower_items {
                    du.values_of(*e)?;
                }
                Ok(())
            }
        }
    }

    /// Short name used in diagnostics.
    pub fn kind_name(&self) -> &'static str {
        match self {
            UncertaintySet::Discrete(_) => "discrete",
            UncertaintySet::Interval(_) => "interval",
            UncertaintySet::DiscreteUncorrelated(_) => "discrete-uncorrelated",
        }
    }

    /// Largest follower cost value that occurs anywhere in the set.
    pub fn max_value(&self) -> Option<Rational> {
        match self {
            UncertaintySet::Discrete(s) => s.iter().flat_map(|d| d.follower_cost.values()).max().cloned(),
            UncertaintySet::Interval(iv) => iv.hi.values().max().cloned(),
            UncertaintySet::DiscreteUncorrelated(du) => du.values.values().filter_map(|v| v.last()).max().cloned(),
        }
    }
}

/// Interval hull of a value-set family: `d⁻(e) = min U_e`, `d⁺(e) = max U_e`.
pub fn du_to_interval(du: &DuSet) -> IntervalSet {
    du.hull()
}
