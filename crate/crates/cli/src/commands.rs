//! The commands behind the `bilevel` binary, independent of argument
//! parsing so that they can be tested directly.

use std::time::Instant;

use bilevel_core::adversary::{adversary as robust_adversary, FollowerResponse};
use bilevel_core::bsp::solve_bsp;
use bilevel_core::continuous::{leader_vector, rcbsp_adversary, rcbsp_leader, FractionalLeaderSolution};
use bilevel_core::greedy::FractionalSelection;
use bilevel_core::knapsack::{rbckp_adversary_du, rbckp_leader_du};
use bilevel_core::leader::{
    approx2, exact_enumerate_budgeted, exact_prefix_xp, reduce_vertex_cover, solve_disjoint, RobustSolution,
};
use bilevel_core::oracle::OracleBudget;
use bilevel_core::rational::format_pq;
use bilevel_core::{ItemId, ItemSet, Rational, Scenario, UncertaintySet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::check::{compare, random_problem, Verdict};
use crate::error::CliError;
use crate::format::{serialize_instance, Problem, ProblemKind};
use crate::generate::{
    named_graph, random_knapsack, random_selection, seeded, KnapsackParams, SelectionParams, UncertaintyKind,
};

/// Solution algorithms selectable with `--algorithm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    /// Certain bilevel selection.
    Bsp,
    /// Exact robust leader for disjoint item sets.
    Disjoint,
    /// 2-approximation for non-negative leader costs.
    Approx2,
    /// Exact robust leader by enumerating leader sets.
    Enum,
    /// Exact robust leader by guessing prefix lengths (discrete sets).
    PrefixXp,
    /// Continuous leader, discrete scenarios.
    ContinuousDiscrete,
    /// Continuous leader, interval uncertainty.
    ContinuousInterval,
    /// Continuous leader, independent value sets.
    ContinuousDu,
    /// Knapsack leader, independent value sets.
    RbckpDu,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bsp => "bsp",
            Algorithm::Disjoint => "disjoint",
            Algorithm::Approx2 => "approx2",
            Algorithm::Enum => "enum",
            Algorithm::PrefixXp => "prefix-xp",
            Algorithm::ContinuousDiscrete => "continuous-discrete",
            Algorithm::ContinuousInterval => "continuous-interval",
            Algorithm::ContinuousDu => "continuous-du",
            Algorithm::RbckpDu => "rbckp-du",
        }
    }
}

/// Human-readable list of valid algorithm/problem pairings.
/// The file's problem kind only selects the default algorithm.
pub const VALID_PAIRS: &str = "valid pairings:
  bsp                  bsp files (certain)
  disjoint             selection files, any uncertainty; disjoint item sets
  approx2              selection files, any uncertainty; non-negative leader costs
  enum                 selection files, any uncertainty
  prefix-xp            selection files, discrete or certain
  continuous-discrete  selection files, discrete or certain; disjoint item sets
  continuous-interval  selection files, interval; disjoint item sets
  continuous-du        selection files, discrete_uncorrelated; disjoint item sets
  rbckp-du             rbckp files";

fn family(u: &UncertaintySet) -> &'static str {
    u.kind_name()
}

/// Rejects algorithm/problem combinations that do not apply.
pub fn check_pairing(algorithm: Algorithm, problem: &Problem) -> Result<(), CliError> {
    let ok = match (algorithm, problem) {
        (Algorithm::RbckpDu, Problem::Knapsack(_)) => true,
        (_, Problem::Knapsack(_)) | (Algorithm::RbckpDu, _) => false,
        (a, Problem::Selection { kind, uncertainty, .. }) => match a {
            Algorithm::Bsp => *kind == ProblemKind::Bsp,
            Algorithm::Disjoint | Algorithm::Approx2 | Algorithm::Enum => true,
            Algorithm::PrefixXp | Algorithm::ContinuousDiscrete => matches!(uncertainty, UncertaintySet::Discrete(_)),
            Algorithm::ContinuousInterval => matches!(uncertainty, UncertaintySet::Interval(_)),
            Algorithm::ContinuousDu => matches!(uncertainty, UncertaintySet::DiscreteUncorrelated(_)),
            Algorithm::RbckpDu => unreachable!(),
        },
    };
    if ok {
        return Ok(());
    }
    let what = match problem {
        Problem::Knapsack(_) => "rbckp".to_string(),
        Problem::Selection { kind, uncertainty, .. } => format!("{kind} ({})", family(uncertainty)),
    };
    Err(CliError::Usage(format!("algorithm {} does not apply to {what}\n{VALID_PAIRS}", algorithm.name())))
}

/// The algorithm used when none is requested.
pub fn default_algorithm(problem: &Problem) -> Algorithm {
    match problem {
        Problem::Knapsack(_) => Algorithm::RbckpDu,
        Problem::Selection { kind: ProblemKind::Bsp, .. } => Algorithm::Bsp,
        Problem::Selection { kind: ProblemKind::Rcbsp, uncertainty, .. } => match uncertainty {
            UncertaintySet::Discrete(_) => Algorithm::ContinuousDiscrete,
            UncertaintySet::Interval(_) => Algorithm::ContinuousInterval,
            UncertaintySet::DiscreteUncorrelated(_) => Algorithm::ContinuousDu,
        },
        Problem::Selection { instance, .. } if instance.is_disjoint() => Algorithm::Disjoint,
        Problem::Selection { .. } => Algorithm::Enum,
    }
}

/// The JSON result envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub value: String,
    pub solution: Value,
    pub witness: Value,
    pub algorithm: String,
    pub runtime_ms: f64,
}

impl Envelope {
    /// Plain-text rendering, one `key: value` line per field.
    pub fn to_text(&self) -> String {
        let mut out = format!("algorithm: {}\nvalue: {}\n", self.algorithm, self.value);
        for (label, v) in [("solution", &self.solution), ("witness", &self.witness)] {
            if let Value::Object(map) = v {
                for (k, v) in map {
                    out.push_str(&format!("{label}.{k}: {}\n", text_value(v)));
                }
            }
        }
        out.push_str(&format!("runtime_ms: {:.3}\n", self.runtime_ms));
        out
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => {
            a.iter().map(|v| if v.is_u64() { format!("e{v}") } else { text_value(v) }).collect::<Vec<_>>().join(" ")
        }
        Value::Object(m) => m.iter().map(|(k, v)| format!("e{k}={}", text_value(v))).collect::<Vec<_>>().join(" "),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn id_list(s: &ItemSet) -> Value {
    json!(s.iter().map(|e| e.0).collect::<Vec<_>>())
}

fn fractional(x: &FractionalSelection) -> Value {
    Value::Object(
        x.iter()
            .filter(|(_, v)| **v != Rational::from_integer(0.into()))
            .map(|(e, v)| (e.0.to_string(), json!(format_pq(v))))
            .collect(),
    )
}

fn scenario_json(d: &Scenario) -> Value {
    Value::Object(d.follower_cost.iter().map(|(e, v)| (e.0.to_string(), json!(format_pq(v)))).collect())
}

fn response_json(r: &FollowerResponse) -> Value {
    match r {
        FollowerResponse::Binary(y) => id_list(y),
        FollowerResponse::Fractional(y) => fractional(y),
    }
}

fn robust_envelope(sol: &RobustSolution, algorithm: Algorithm, start: Instant) -> Envelope {
    Envelope {
        value: format_pq(&sol.worst_value),
        solution: json!({ "leader": id_list(&sol.leader_set), "follower": id_list(&sol.follower_set) }),
        witness: json!({
            "scenario": scenario_json(&sol.worst_scenario),
            "per_scenario_values": sol.per_scenario_values.as_ref().map(|v| v.iter().map(format_pq).collect::<Vec<_>>()),
        }),
        algorithm: algorithm.name().into(),
        runtime_ms: elapsed(start),
    }
}

fn elapsed(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Default subset budget for exhaustive enumeration.
pub const DEFAULT_BUDGET: u128 = 1 << 16;

/// `solve`: runs an algorithm on a problem.
pub fn solve(problem: &Problem, algorithm: Option<Algorithm>, budget: Option<u128>) -> Result<Envelope, CliError> {
    let algorithm = algorithm.unwrap_or_else(|| default_algorithm(problem));
    check_pairing(algorithm, problem)?;
    let start = Instant::now();
    match problem {
        Problem::Knapsack(k) => {
            let sol = rbckp_leader_du(k)?;
            let worst = rbckp_adversary_du(k, &sol.capacity)?;
            Ok(Envelope {
                value: format_pq(&sol.value),
                solution: json!({ "capacity": format_pq(&sol.capacity) }),
                witness: json!({ "scenario": scenario_json(&worst.scenario), "follower": response_json(&worst.response) }),
                algorithm: algorithm.name().into(),
                runtime_ms: elapsed(start),
            })
        }
        Problem::Selection { instance, uncertainty, .. } => {
            let robust = match algorithm {
                Algorithm::Bsp => {
                    let UncertaintySet::Discrete(s) = uncertainty else { unreachable!("checked pairing") };
                    let sol = solve_bsp(instance, &s[0])?;
                    return Ok(Envelope {
                        value: format_pq(&sol.value),
                        solution: json!({ "leader": id_list(&sol.leader_set), "follower": id_list(&sol.follower_set) }),
                        witness: json!({ "scenario": scenario_json(&s[0]) }),
                        algorithm: algorithm.name().into(),
                        runtime_ms: elapsed(start),
                    });
                }
                Algorithm::Disjoint => solve_disjoint(instance, uncertainty)?,
                Algorithm::Approx2 => approx2(instance, uncertainty)?,
                Algorithm::Enum => exact_enumerate_budgeted(instance, uncertainty, budget.unwrap_or(DEFAULT_BUDGET))?,
                Algorithm::PrefixXp => exact_prefix_xp(instance, uncertainty)?,
                _ => {
                    let sol = rcbsp_leader(instance, uncertainty)?;
                    return continuous_envelope(instance, uncertainty, &sol, algorithm, start);
                }
            };
            Ok(robust_envelope(&robust, algorithm, start))
        }
    }
}

fn continuous_envelope(
    instance: &bilevel_core::Instance,
    u: &UncertaintySet,
    sol: &FractionalLeaderSolution,
    algorithm: Algorithm,
    start: Instant,
) -> Result<Envelope, CliError> {
    let worst = rcbsp_adversary(instance, u, &sol.x)?;
    Ok(Envelope {
        value: format_pq(&sol.value),
        solution: json!({ "leader_amount": format_pq(&sol.leader_amount), "leader": fractional(&sol.x) }),
        witness: json!({ "scenario": scenario_json(&worst.scenario), "follower": response_json(&worst.response) }),
        algorithm: algorithm.name().into(),
        runtime_ms: elapsed(start),
    })
}

/// What the leader committed to, for `adversary`.
#[derive(Debug, Clone, PartialEq)]
pub enum LeaderChoice {
    /// A binary leader set.
    Set(Vec<u32>),
    /// A leader mass (continuous leader) or a capacity (knapsack).
    Amount(Rational),
}

/// `adversary`: the worst case for a fixed leader decision.
pub fn adversary(problem: &Problem, choice: &LeaderChoice) -> Result<Envelope, CliError> {
    let start = Instant::now();
    let (out, solution, name) = match (problem, choice) {
        (Problem::Knapsack(k), LeaderChoice::Amount(b)) => {
            (rbckp_adversary_du(k, b)?, json!({ "capacity": format_pq(b) }), "rbckp-adversary")
        }
        (Problem::Selection { instance, uncertainty, .. }, LeaderChoice::Amount(m)) => {
            let x = leader_vector(instance, m)?;
            let sol = json!({ "leader_amount": format_pq(m), "leader": fractional(&x) });
            (rcbsp_adversary(instance, uncertainty, &x)?, sol, "continuous-adversary")
        }
        (Problem::Selection { instance, uncertainty, .. }, LeaderChoice::Set(ids)) => {
            let x: ItemSet = ids.iter().map(|i| ItemId(*i)).collect();
            (robust_adversary(instance, uncertainty, &x)?, json!({ "leader": id_list(&x) }), "adversary")
        }
        _ => return Err(CliError::Usage("rbckp files take --amount (the capacity)".into())),
    };
    Ok(Envelope {
        value: format_pq(&out.leader_value),
        solution,
        witness: json!({
            "scenario": scenario_json(&out.scenario),
            "scenario_index": out.scenario_index,
            "follower": response_json(&out.response),
        }),
        algorithm: name.into(),
        runtime_ms: elapsed(start),
    })
}

/// `plf-dump`: breakpoints of the leader's objective, one `x y` pair per line.
pub fn plf_dump(problem: &Problem) -> Result<String, CliError> {
    match problem {
        Problem::Knapsack(k) => Ok(rbckp_leader_du(k)?.objective.to_dump()),
        Problem::Selection { instance, uncertainty, .. } if instance.is_disjoint() => {
            Ok(rcbsp_leader(instance, uncertainty)?.objective.to_dump())
        }
        Problem::Selection { .. } => {
            Err(CliError::Usage("plf-dump needs disjoint leader and follower items or a knapsack instance".into()))
        }
    }
}

/// Summary of an `oracle-check` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub algorithm: String,
    pub seed: u64,
    pub trials: u64,
    pub mismatches: u64,
    /// Largest observed approximation ratio (approx2 only).
    pub max_ratio: Option<String>,
}

impl CheckReport {
    pub fn to_text(&self) -> String {
        format!(
            "algorithm: {}\nseed: {}\ntrials: {}\nmismatches: {}\nmax_ratio: {}\n",
            self.algorithm,
            self.seed,
            self.trials,
            self.mismatches,
            self.max_ratio.as_deref().unwrap_or("-")
        )
    }
}

/// `oracle-check`: compares an algorithm with its oracle on random
/// instances; the first disagreement aborts with the instance attached.
pub fn oracle_check(
    algorithm: Algorithm,
    seed: u64,
    trials: u64,
    budget: Option<u128>,
) -> Result<CheckReport, CliError> {
    let mut rng = seeded(seed);
    let mut oracle_budget = OracleBudget::default();
    if let Some(b) = budget {
        oracle_budget.max_subsets = b;
        oracle_budget.max_scenarios = b;
    }
    let mut max_ratio: Option<Rational> = None;
    for trial in 0..trials {
        let problem = random_problem(algorithm, &mut rng);
        match compare(algorithm, &problem, &oracle_budget)? {
            Verdict::Agree { ratio } => {
                if let Some(r) = ratio {
                    if max_ratio.as_ref().is_none_or(|m| r > *m) {
                        max_ratio = Some(r);
                    }
                }
            }
            Verdict::Mismatch(detail) => {
                return Err(CliError::Mismatch {
                    detail: format!("trial {trial}: {detail}"),
                    counterexample: serialize_instance(&problem),
                })
            }
        }
    }
    Ok(CheckReport {
        algorithm: algorithm.name().into(),
        seed,
        trials,
        mismatches: 0,
        max_ratio: max_ratio.map(|r| format_pq(&r)),
    })
}

/// What `generate` produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenerateKind {
    Bsp,
    Rbsp,
    Rcbsp,
    Rbckp,
    VertexCover,
}

/// Uncertainty family requested from `generate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyName {
    Discrete,
    Interval,
    Du,
}

/// Options of `generate`.
#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub kind: GenerateKind,
    pub seed: u64,
    pub n: usize,
    pub family: FamilyName,
    pub set_size: usize,
    pub disjoint: bool,
    pub nonneg: bool,
    pub graph: Option<String>,
    pub policy: bilevel_core::Policy,
}

/// `generate`: a random (or reduction) instance as a file.
pub fn generate(o: &GenerateOptions) -> Result<String, CliError> {
    let mut rng = seeded(o.seed);
    let problem = match o.kind {
        GenerateKind::VertexCover => {
            let name = o.graph.as_deref().ok_or_else(|| CliError::Usage("vertex-cover needs --graph".into()))?;
            let graph = named_graph(name)
                .ok_or_else(|| CliError::Usage(format!("unknown graph {name}; use C<n>, K<n>, P<n> or S<n>")))?;
            let (instance, scenarios) = reduce_vertex_cover(&graph);
            Problem::Selection { kind: ProblemKind::Rbsp, instance, uncertainty: UncertaintySet::Discrete(scenarios) }
        }
        GenerateKind::Rbckp => {
            Problem::Knapsack(random_knapsack(&mut rng, &KnapsackParams { n: o.n, max_size: 3, set_size: o.set_size }))
        }
        kind => {
            if o.n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let uncertainty = match (kind, o.family) {
                (GenerateKind::Bsp, _) => UncertaintyKind::Certain,
                (_, FamilyName::Discrete) => UncertaintyKind::Discrete,
                (_, FamilyName::Interval) => UncertaintyKind::Interval,
                (_, FamilyName::Du) => UncertaintyKind::Du,
            };
            let params = SelectionParams {
                disjoint: o.disjoint || kind == GenerateKind::Rcbsp,
                nonneg: o.nonneg,
                set_size: o.set_size,
                policy: o.policy,
                ..SelectionParams::new(o.n, uncertainty)
            };
            let (instance, uncertainty) = random_selection(&mut rng, &params);
            let kind = match kind {
                GenerateKind::Bsp => ProblemKind::Bsp,
                GenerateKind::Rcbsp => ProblemKind::Rcbsp,
                _ => ProblemKind::Rbsp,
            };
            Problem::Selection { kind, instance, uncertainty }
        }
    };
    Ok(serialize_instance(&problem))
}
