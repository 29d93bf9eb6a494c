//! The JSON instance file format.
//!
//! Rationals are written as `"p/q"` strings (plain integers are accepted
//! on input, decimals are not). Per-item maps are keyed by item id.
//! Validation reports every violated invariant at once, each tagged with a
//! short invariant name.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use bilevel_core::knapsack::KnapsackInstance;
use bilevel_core::rational::{format_pq, parse_pq};
use bilevel_core::{
    CostMap, DuSet, Instance, IntervalSet, ItemId, ItemSet, Policy, Rational, Scenario, UncertaintySet,
};
use serde::{Deserialize, Serialize};

/// The only schema version this crate reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Problem variant stored in a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Certain bilevel selection.
    Bsp,
    /// Robust bilevel selection, binary leader.
    Rbsp,
    /// Robust bilevel selection, continuous leader.
    Rcbsp,
    /// Robust bilevel continuous knapsack.
    Rbckp,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Bsp => "bsp",
            ProblemKind::Rbsp => "rbsp",
            ProblemKind::Rcbsp => "rcbsp",
            ProblemKind::Rbckp => "rbckp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PolicyName {
    #[serde(rename = "opt")]
    Optimistic,
    #[default]
    #[serde(rename = "pess")]
    Pessimistic,
}

impl From<PolicyName> for Policy {
    fn from(p: PolicyName) -> Policy {
        match p {
            PolicyName::Optimistic => Policy::Optimistic,
            PolicyName::Pessimistic => Policy::Pessimistic,
        }
    }
}

impl From<Policy> for PolicyName {
    fn from(p: Policy) -> PolicyName {
        match p {
            Policy::Optimistic => PolicyName::Optimistic,
            Policy::Pessimistic => PolicyName::Pessimistic,
        }
    }
}

/// An item id used as a JSON object key (object keys are strings in
/// JSON; this reads them back as numbers and keeps numeric order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct IdKey(pub u32);

impl Serialize for IdKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for IdKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = IdKey;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an item id")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<IdKey, E> {
                v.parse().map(IdKey).map_err(|_| E::custom(format!("invalid item id {v:?}")))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<IdKey, E> {
                u32::try_from(v).map(IdKey).map_err(|_| E::custom(format!("item id {v} out of range")))
            }
        }
        d.deserialize_any(V)
    }
}

/// One item of the universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemEntry {
    pub id: u32,
    #[serde(default)]
    pub leader: bool,
    #[serde(default)]
    pub follower: bool,
    /// Leader cost `c(e)` (for the knapsack: the leader's value).
    pub cost: String,
    /// Knapsack size `a(e)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<u64>,
}

/// Follower-side data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UncertaintyBlock {
    Certain { costs: BTreeMap<IdKey, String> },
    Discrete { scenarios: Vec<BTreeMap<IdKey, String>> },
    Interval { lo: BTreeMap<IdKey, String>, hi: BTreeMap<IdKey, String> },
    DiscreteUncorrelated { values: BTreeMap<IdKey, Vec<String>> },
}

/// The on-disk representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub kind: ProblemKind,
    #[serde(default)]
    pub policy: PolicyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_range: Option<[String; 2]>,
    pub items: Vec<ItemEntry>,
    pub uncertainty: UncertaintyBlock,
}

/// A validated problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    /// Selection problems; certain instances carry a single scenario.
    Selection {
        kind: ProblemKind,
        instance: Instance,
        uncertainty: UncertaintySet,
    },
    Knapsack(KnapsackInstance),
}

impl Problem {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Problem::Selection { kind, .. } => *kind,
            Problem::Knapsack(_) => ProblemKind::Rbckp,
        }
    }
}

/// A single violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

/// Why a file could not be loaded.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid instance:\n{}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n")
}

impl FormatError {
    /// The violations, if this is a validation error.
    pub fn violations(&self) -> &[Violation] {
        match self {
            FormatError::Invalid(v) => v,
            FormatError::Parse { .. } => &[],
        }
    }
}

/// Collects violations while converting the file.
#[derive(Default)]
struct Checker {
    found: Vec<Violation>,
}

impl Checker {
    fn fail(&mut self, invariant: &'static str, detail: impl Into<String>) {
        self.found.push(Violation { invariant, detail: detail.into() });
    }

    fn rational(&mut self, field: &str, s: &str) -> Option<Rational> {
        match parse_pq(s) {
            Ok(r) => Some(r),
            Err(e) => {
                self.fail("rational-format", format!("{field}: {e}"));
                None
            }
        }
    }

    /// A map that must be defined exactly on `items`.
    fn total_map(&mut self, field: &str, map: &BTreeMap<IdKey, String>, items: &ItemSet) -> Option<CostMap> {
        let mut out = CostMap::new();
        let mut ok = true;
        for e in items {
            if !map.contains_key(&IdKey(e.0)) {
                self.fail("uncertainty-total", format!("{field}: no value for follower item {}", e.0));
                ok = false;
            }
        }
        for (IdKey(id), s) in map {
            if !items.contains(&ItemId(*id)) {
                self.fail("uncertainty-total", format!("{field}: item {id} is not a follower item"));
                ok = false;
            }
            match self.rational(&format!("{field}[{id}]"), s) {
                Some(r) => {
                    out.insert(ItemId(*id), r);
                }
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn value_sets(
        &mut self,
        values: &BTreeMap<IdKey, Vec<String>>,
        items: &ItemSet,
    ) -> Option<BTreeMap<ItemId, Vec<Rational>>> {
        let mut out = BTreeMap::new();
        let mut ok = true;
        for e in items {
            if !values.contains_key(&IdKey(e.0)) {
                self.fail("uncertainty-total", format!("values: no value set for follower item {}", e.0));
                ok = false;
            }
        }
        for (IdKey(id), vs) in values {
            if !items.contains(&ItemId(*id)) {
                self.fail("uncertainty-total", format!("values: item {id} is not a follower item"));
                ok = false;
            }
            if vs.is_empty() {
                self.fail("value-set-nonempty", format!("values[{id}] is empty"));
                ok = false;
            }
            let parsed: Vec<Option<Rational>> =
                vs.iter().enumerate().map(|(i, s)| self.rational(&format!("values[{id}][{i}]"), s)).collect();
            if parsed.iter().any(Option::is_none) {
                ok = false;
            } else {
                out.insert(ItemId(*id), parsed.into_iter().flatten().collect());
            }
        }
        ok.then_some(out)
    }
}

fn core_violation(e: bilevel_core::Error) -> Violation {
    Violation { invariant: "instance", detail: e.to_string() }
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<Problem, FormatError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_file(&file)
}

/// Validates a deserialised file.
pub fn from_file(file: &InstanceFile) -> Result<Problem, FormatError> {
    let mut ck = Checker::default();
    if file.schema_version != SCHEMA_VERSION {
        ck.fail("schema-version", format!("expected {SCHEMA_VERSION}, found {}", file.schema_version));
    }
    let mut seen = BTreeSet::new();
    let mut cost = CostMap::new();
    for item in &file.items {
        if !seen.insert(item.id) {
            ck.fail("unique-item-id", format!("item {} appears twice", item.id));
        }
        if let Some(c) = ck.rational(&format!("items[{}].cost", item.id), &item.cost) {
            cost.insert(ItemId(item.id), c);
        }
    }
    let problem = match file.kind {
        ProblemKind::Rbckp => knapsack(file, &mut ck, cost),
        kind => selection(kind, file, &mut ck, cost),
    };
    match problem {
        Some(p) if ck.found.is_empty() => Ok(p),
        _ => Err(FormatError::Invalid(ck.found)),
    }
}

fn selection(kind: ProblemKind, file: &InstanceFile, ck: &mut Checker, cost: CostMap) -> Option<Problem> {
    let leaders: ItemSet = file.items.iter().filter(|i| i.leader).map(|i| ItemId(i.id)).collect();
    let followers: ItemSet = file.items.iter().filter(|i| i.follower).map(|i| ItemId(i.id)).collect();
    let n = seen_count(file);
    for item in &file.items {
        if !item.leader && !item.follower {
            ck.fail("item-role", format!("item {} is neither a leader nor a follower item", item.id));
        }
        if item.size.is_some() {
            ck.fail("size-only-for-knapsack", format!("item {} has a size", item.id));
        }
    }
    if file.capacity_range.is_some() {
        ck.fail("capacity-present", "capacity_range is only used by rbckp");
    }
    let capacity = match file.capacity {
        None => {
            ck.fail("capacity-present", "missing capacity");
            None
        }
        Some(b) if b as usize > n => {
            ck.fail("capacity exceeds universe", format!("capacity {b} exceeds universe of {n} items"));
            None
        }
        Some(b) => Some(b as usize),
    };
    if kind == ProblemKind::Rcbsp && !leaders.is_disjoint(&followers) {
        ck.fail("continuous-disjoint", "rcbsp needs disjoint leader and follower items");
    }
    let certain = matches!(file.uncertainty, UncertaintyBlock::Certain { .. });
    if certain != (kind == ProblemKind::Bsp) {
        ck.fail("certain-iff-bsp", "a certain block is used exactly by bsp files");
    }
    let uncertainty = match &file.uncertainty {
        UncertaintyBlock::Certain { costs } => {
            ck.total_map("costs", costs, &followers).map(|d| UncertaintySet::Discrete(vec![Scenario::new(d)]))
        }
        UncertaintyBlock::Discrete { scenarios } => {
            if scenarios.is_empty() {
                ck.fail("scenario-count", "at least one scenario is required");
            }
            let parsed: Vec<Option<CostMap>> = scenarios
                .iter()
                .enumerate()
                .map(|(i, s)| ck.total_map(&format!("scenarios[{i}]"), s, &followers))
                .collect();
            (!scenarios.is_empty() && parsed.iter().all(Option::is_some))
                .then(|| UncertaintySet::Discrete(parsed.into_iter().flatten().map(Scenario::new).collect()))
        }
        UncertaintyBlock::Interval { lo, hi } => {
            let (l, h) = (ck.total_map("lo", lo, &followers), ck.total_map("hi", hi, &followers));
            match (l, h) {
                (Some(l), Some(h)) => match IntervalSet::new(l, h) {
                    Ok(iv) => Some(UncertaintySet::Interval(iv)),
                    Err(e) => {
                        ck.fail("interval-order", e.to_string());
                        None
                    }
                },
                _ => None,
            }
        }
        UncertaintyBlock::DiscreteUncorrelated { values } => match ck.value_sets(values, &followers) {
            Some(v) => match DuSet::new(v) {
                Ok(du) => Some(UncertaintySet::DiscreteUncorrelated(du)),
                Err(e) => {
                    ck.fail("value-set-nonempty", e.to_string());
                    None
                }
            },
            None => None,
        },
    };
    let policy = Policy::from(file.policy);
    match Instance::new(leaders, followers, capacity?, cost, policy) {
        Ok(instance) => Some(Problem::Selection { kind, instance, uncertainty: uncertainty? }),
        Err(e) => {
            ck.found.push(core_violation(e));
            None
        }
    }
}

fn seen_count(file: &InstanceFile) -> usize {
    file.items.iter().map(|i| i.id).collect::<BTreeSet<_>>().len()
}

fn knapsack(file: &InstanceFile, ck: &mut Checker, cost: CostMap) -> Option<Problem> {
    let items: ItemSet = file.items.iter().map(|i| ItemId(i.id)).collect();
    let mut size = BTreeMap::new();
    for item in &file.items {
        match item.size {
            Some(0) => ck.fail("positive-size", format!("item {} has size 0", item.id)),
            Some(a) => {
                size.insert(ItemId(item.id), a);
            }
            None => ck.fail("positive-size", format!("item {} has no size", item.id)),
        }
    }
    if file.capacity.is_some() {
        ck.fail("capacity-present", "rbckp uses capacity_range instead of capacity");
    }
    let range = match &file.capacity_range {
        Some([lo, hi]) => match (ck.rational("capacity_range[0]", lo), ck.rational("capacity_range[1]", hi)) {
            (Some(l), Some(h)) => Some((l, h)),
            _ => None,
        },
        None => {
            ck.fail("capacity-present", "missing capacity_range");
            None
        }
    };
    let values = match &file.uncertainty {
        UncertaintyBlock::DiscreteUncorrelated { values } => ck.value_sets(values, &items),
        _ => {
            ck.fail("knapsack-uncertainty", "rbckp needs a discrete_uncorrelated block");
            None
        }
    };
    let du = match DuSet::new(values?) {
        Ok(du) => du,
        Err(e) => {
            ck.fail("value-set-nonempty", e.to_string());
            return None;
        }
    };
    let (lo, hi) = range?;
    match KnapsackInstance::new(size, cost, lo, hi, du) {
        Ok(k) => Some(Problem::Knapsack(k)),
        Err(e) => {
            ck.found.push(core_violation(e));
            None
        }
    }
}

fn pq_map(m: &CostMap) -> BTreeMap<IdKey, String> {
    m.iter().map(|(e, v)| (IdKey(e.0), format_pq(v))).collect()
}

/// The file representation of a problem.
pub fn to_file(problem: &Problem) -> InstanceFile {
    match problem {
        Problem::Selection { kind, instance, uncertainty } => {
            let universe: ItemSet = instance.leader_items().union(instance.follower_items()).copied().collect();
            let items = universe
                .iter()
                .map(|e| ItemEntry {
                    id: e.0,
                    leader: instance.leader_items().contains(e),
                    follower: instance.follower_items().contains(e),
                    cost: format_pq(instance.cost(*e)),
                    size: None,
                })
                .collect();
            let block = match uncertainty {
                UncertaintySet::Discrete(s) if *kind == ProblemKind::Bsp => {
                    UncertaintyBlock::Certain { costs: pq_map(&s[0].follower_cost) }
                }
                UncertaintySet::Discrete(s) => {
                    UncertaintyBlock::Discrete { scenarios: s.iter().map(|d| pq_map(&d.follower_cost)).collect() }
                }
                UncertaintySet::Interval(iv) => UncertaintyBlock::Interval { lo: pq_map(iv.lo()), hi: pq_map(iv.hi()) },
                UncertaintySet::DiscreteUncorrelated(du) => UncertaintyBlock::DiscreteUncorrelated {
                    values: du
                        .values()
                        .iter()
                        .map(|(e, vs)| (IdKey(e.0), vs.iter().map(format_pq).collect()))
                        .collect(),
                },
            };
            InstanceFile {
                schema_version: SCHEMA_VERSION,
                kind: *kind,
                policy: instance.policy().into(),
                capacity: Some(instance.capacity() as u64),
                capacity_range: None,
                items,
                uncertainty: block,
            }
        }
        Problem::Knapsack(k) => InstanceFile {
            schema_version: SCHEMA_VERSION,
            kind: ProblemKind::Rbckp,
            policy: PolicyName::Pessimistic,
            capacity: None,
            capacity_range: Some([format_pq(k.capacity_lo()), format_pq(k.capacity_hi())]),
            items: k
                .items()
                .iter()
                .map(|e| ItemEntry {
                    id: e.0,
                    leader: false,
                    follower: true,
                    cost: format_pq(&k.leader_value()[e]),
                    size: Some(k.size()[e]),
                })
                .collect(),
            uncertainty: UncertaintyBlock::DiscreteUncorrelated {
                values: k
                    .uncertainty()
                    .values()
                    .iter()
                    .map(|(e, vs)| (IdKey(e.0), vs.iter().map(format_pq).collect()))
                    .collect(),
            },
        },
    }
}

/// Pretty-printed JSON for a problem, newline-terminated.
pub fn serialize_instance(problem: &Problem) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(problem)).expect("instance files always serialise");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use bilevel_core::fixtures;

    #[test]
    fn certain_example_round_trips() {
        let (instance, d) = fixtures::worked_example_certain();
        let p = Problem::Selection { kind: ProblemKind::Bsp, instance, uncertainty: UncertaintySet::Discrete(vec![d]) };
        let text = serialize_instance(&p);
        assert!(text.contains("\"kind\": \"certain\""));
        assert_eq!(parse_instance(&text).unwrap(), p);
    }

    #[test]
    fn decimals_and_oversized_capacity_are_both_reported() {
        let (instance, d) = fixtures::worked_example_certain();
        let p = Problem::Selection { kind: ProblemKind::Bsp, instance, uncertainty: UncertaintySet::Discrete(vec![d]) };
        let mut file = to_file(&p);
        file.capacity = Some(9);
        file.items[0].cost = "0.5".into();
        let err = from_file(&file).unwrap_err();
        let names: Vec<&str> = err.violations().iter().map(|v| v.invariant).collect();
        assert!(names.contains(&"capacity exceeds universe"), "{names:?}");
        assert!(names.contains(&"rational-format"), "{names:?}");
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        let err = parse_instance("{\n  \"schema_version\": 1,\n  oops\n}").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err}");
    }
}
