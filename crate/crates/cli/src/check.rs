//! Randomised comparison of the fast algorithms against the brute-force
//! oracles, shared by the `oracle-check` command and the test suites.

use bilevel_core::bsp::solve_bsp;
use bilevel_core::continuous::{leader_vector, rcbsp_adversary_du, rcbsp_leader, rcbsp_leader_du};
use bilevel_core::knapsack::{rbckp_adversary_du, rbckp_leader_du, KnapsackInstance};
use bilevel_core::leader::{approx2, exact_enumerate, exact_prefix_xp, solve_disjoint};
use bilevel_core::oracle::{
    oracle_bsp, oracle_knapsack_adversary, oracle_knapsack_leader, oracle_plf, oracle_rbsp, OracleBudget,
};
use bilevel_core::rational::{format_pq, from_usize, int, rat};
use bilevel_core::{CostMap, DuSet, Instance, ItemId, ItemSet, Policy, Rational, UncertaintySet};
use rand::Rng;

use crate::commands::Algorithm;
use crate::format::{Problem, ProblemKind};
use crate::generate::{random_knapsack, random_selection, KnapsackParams, SelectionParams, UncertaintyKind};

/// Result of one comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Fast and oracle answers are consistent; for the approximation the
    /// ratio to the optimum (when the optimum is positive).
    Agree {
        ratio: Option<Rational>,
    },
    Mismatch(String),
}

fn family(rng: &mut impl Rng, max_scenarios: usize) -> (UncertaintyKind, usize) {
    match rng.gen_range(0..3) {
        0 => (UncertaintyKind::Discrete, rng.gen_range(1..=max_scenarios)),
        1 => (UncertaintyKind::Interval, 1),
        _ => (UncertaintyKind::Du, rng.gen_range(1..=2)),
    }
}

fn selection(kind: ProblemKind, (instance, uncertainty): (Instance, UncertaintySet)) -> Problem {
    Problem::Selection { kind, instance, uncertainty }
}

/// A random problem suited to `algorithm` and small enough for the oracles.
pub fn random_problem(algorithm: Algorithm, rng: &mut impl Rng) -> Problem {
    let n = rng.gen_range(1..=8);
    match algorithm {
        Algorithm::Bsp => {
            let p = SelectionParams::new(n.min(7), UncertaintyKind::Certain);
            let p = SelectionParams {
                policy: if rng.gen_bool(0.5) { Policy::Optimistic } else { Policy::Pessimistic },
                ..p
            };
            selection(ProblemKind::Bsp, random_selection(rng, &p))
        }
        Algorithm::Disjoint | Algorithm::Enum | Algorithm::Approx2 => {
            let (uncertainty, set_size) = family(rng, 4);
            let p = SelectionParams {
                disjoint: algorithm == Algorithm::Disjoint,
                nonneg: algorithm == Algorithm::Approx2,
                set_size,
                max_follower: Some(7),
                ..SelectionParams::new(n, uncertainty)
            };
            selection(ProblemKind::Rbsp, random_selection(rng, &p))
        }
        Algorithm::PrefixXp => {
            let p = SelectionParams {
                set_size: rng.gen_range(1..=3),
                ..SelectionParams::new(n, UncertaintyKind::Discrete)
            };
            selection(ProblemKind::Rbsp, random_selection(rng, &p))
        }
        Algorithm::ContinuousDiscrete | Algorithm::ContinuousInterval | Algorithm::ContinuousDu => {
            let (uncertainty, set_size) = match algorithm {
                Algorithm::ContinuousDiscrete => (UncertaintyKind::Discrete, rng.gen_range(1..=4)),
                Algorithm::ContinuousInterval => (UncertaintyKind::Interval, 1),
                _ => (UncertaintyKind::Du, rng.gen_range(1..=2)),
            };
            let p = SelectionParams { disjoint: true, set_size, ..SelectionParams::new(n.min(6), uncertainty) };
            selection(ProblemKind::Rcbsp, random_selection(rng, &p))
        }
        Algorithm::RbckpDu => {
            let p = KnapsackParams { n: rng.gen_range(1..=5), max_size: 3, set_size: rng.gen_range(1..=2) };
            Problem::Knapsack(random_knapsack(rng, &p))
        }
    }
}

fn differ(what: &str, fast: &Rational, slow: &Rational) -> Verdict {
    Verdict::Mismatch(format!("{what}: algorithm {} but oracle {}", format_pq(fast), format_pq(slow)))
}

/// Compares `algorithm` with its reference on `problem`.
pub fn compare(algorithm: Algorithm, problem: &Problem, budget: &OracleBudget) -> bilevel_core::Result<Verdict> {
    match problem {
        Problem::Knapsack(k) => compare_knapsack(k, budget),
        Problem::Selection { instance, uncertainty, .. } => compare_selection(algorithm, instance, uncertainty, budget),
    }
}

fn compare_selection(
    algorithm: Algorithm,
    inst: &Instance,
    u: &UncertaintySet,
    budget: &OracleBudget,
) -> bilevel_core::Result<Verdict> {
    let agree = Verdict::Agree { ratio: None };
    Ok(match algorithm {
        Algorithm::Bsp => {
            let UncertaintySet::Discrete(s) = u else {
                return Err(bilevel_core::Error::WrongVariant("bsp needs a certain instance".into()));
            };
            let (fast, slow) = (solve_bsp(inst, &s[0])?.value, oracle_bsp(inst, &s[0], budget)?.worst_value);
            if fast == slow {
                agree
            } else {
                differ("optimum", &fast, &slow)
            }
        }
        Algorithm::Disjoint | Algorithm::Enum => {
            let fast =
                if algorithm == Algorithm::Disjoint { solve_disjoint(inst, u)? } else { exact_enumerate(inst, u)? };
            let slow = oracle_rbsp(inst, u, budget)?;
            if fast.worst_value == slow.worst_value {
                agree
            } else {
                differ("optimum", &fast.worst_value, &slow.worst_value)
            }
        }
        Algorithm::PrefixXp => {
            let (fast, slow) = (exact_prefix_xp(inst, u)?.worst_value, exact_enumerate(inst, u)?.worst_value);
            if fast == slow {
                agree
            } else {
                differ("optimum", &fast, &slow)
            }
        }
        Algorithm::Approx2 => {
            let fast = approx2(inst, u)?.worst_value;
            let opt = oracle_rbsp(inst, u, budget)?.worst_value;
            if fast < opt || fast > &opt * int(2) {
                Verdict::Mismatch(format!(
                    "approximation {} outside [opt, 2·opt] with opt {}",
                    format_pq(&fast),
                    format_pq(&opt)
                ))
            } else {
                let ratio = (opt > int(0)).then(|| &fast / &opt);
                Verdict::Agree { ratio }
            }
        }
        Algorithm::ContinuousDiscrete | Algorithm::ContinuousInterval | Algorithm::ContinuousDu => {
            let sol = rcbsp_leader(inst, u)?;
            let samples = sol.objective.sample_points();
            let oracle = oracle_plf(inst, u, &samples, budget)?;
            for (x, v) in &oracle {
                match sol.objective.eval(x) {
                    Some(fx) if fx == *v => {}
                    Some(fx) => return Ok(differ(&format!("objective at {}", format_pq(x)), &fx, v)),
                    None => return Ok(Verdict::Mismatch(format!("objective undefined at {}", format_pq(x)))),
                }
            }
            let best = oracle.iter().map(|p| p.1.clone()).min().expect("at least one sample");
            if sol.value == best {
                agree
            } else {
                differ("optimum", &sol.value, &best)
            }
        }
        Algorithm::RbckpDu => {
            return Err(bilevel_core::Error::WrongVariant("rbckp-du needs a knapsack instance".into()))
        }
    })
}

/// Ten evenly spaced capacities of `[b⁻, b⁺]`.
pub fn sample_capacities(k: &KnapsackInstance) -> Vec<Rational> {
    let (lo, hi) = (k.capacity_lo(), k.capacity_hi());
    (0..10).map(|i| lo + (hi - lo) * rat(i, 9)).collect()
}

fn compare_knapsack(k: &KnapsackInstance, budget: &OracleBudget) -> bilevel_core::Result<Verdict> {
    let mut samples = sample_capacities(k);
    for b in &samples {
        let fast = rbckp_adversary_du(k, b)?.leader_value;
        let slow = oracle_knapsack_adversary(k, b, budget)?.leader_value;
        if fast != slow {
            return Ok(differ(&format!("adversary at capacity {}", format_pq(b)), &fast, &slow));
        }
    }
    let sol = rbckp_leader_du(k)?;
    samples.extend(sol.objective.sample_points().into_iter().filter(|b| b >= k.capacity_lo() && b <= k.capacity_hi()));
    let (_, best) = oracle_knapsack_leader(k, &samples, budget)?;
    Ok(if sol.value == best { Verdict::Agree { ratio: None } } else { differ("leader optimum", &sol.value, &best) })
}

/// Cross-checks a unit-size knapsack instance with integral capacities
/// against the continuous selection solvers. The follower's and leader's
/// values are negated (maximisation becomes minimisation) and zero-cost
/// leader items of total width `b⁺ − b⁻` absorb the capacity the leader
/// leaves unused, so a leader mass `m` corresponds to capacity `b⁺ − m`.
pub fn unit_size_cross_check(k: &KnapsackInstance) -> bilevel_core::Result<Verdict> {
    let whole = |r: &Rational| r.is_integer().then(|| r.to_integer().try_into().ok()).flatten();
    let (Some(lo), Some(hi)) = (whole(k.capacity_lo()), whole(k.capacity_hi())) else {
        return Err(bilevel_core::Error::Precondition("integral capacities required".into()));
    };
    if k.size().values().any(|a| *a != 1) {
        return Err(bilevel_core::Error::Precondition("unit sizes required".into()));
    }
    let (lo, hi): (usize, usize) = (lo, hi);
    let first_free = k.items().iter().next_back().map_or(1, |e| e.0 + 1);
    let padding: ItemSet = (0..(hi - lo) as u32).map(|i| ItemId(first_free + i)).collect();
    let mut cost: CostMap = k.leader_value().iter().map(|(e, c)| (*e, -c.clone())).collect();
    cost.extend(padding.iter().map(|e| (*e, int(0))));
    let inst = Instance::new(padding, k.items().clone(), hi, cost, Policy::Pessimistic)?;
    let du = DuSet::new(
        k.uncertainty().values().iter().map(|(e, vs)| (*e, vs.iter().map(|v| -v.clone()).collect())).collect(),
    )?;
    let (cont, knap) = (rcbsp_leader_du(&inst, &du)?.value, rbckp_leader_du(k)?.value);
    if cont != -knap.clone() {
        return Ok(differ("negated leader optimum", &-cont, &knap));
    }
    for b in sample_capacities(k) {
        let x = leader_vector(&inst, &(from_usize(hi) - &b))?;
        let cont = rcbsp_adversary_du(&inst, &du, &x)?.leader_value;
        let knap = rbckp_adversary_du(k, &b)?.leader_value;
        if cont != -knap.clone() {
            return Ok(differ(&format!("negated adversary at capacity {}", format_pq(&b)), &-cont, &knap));
        }
    }
    Ok(Verdict::Agree { ratio: None })
}
