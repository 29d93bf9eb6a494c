//! Continuous leader: objective functions and adversaries against
//! brute-force sampling.

mod common;

use bilevel_core::adversary::FollowerResponse;
use bilevel_core::bsp::solve_bsp;
use bilevel_core::continuous::{leader_vector, rcbsp_adversary, rcbsp_leader};
use bilevel_core::greedy::follower_respond_continuous;
use bilevel_core::oracle::{oracle_adversary_continuous, oracle_plf, OracleBudget};
use bilevel_core::rational::{from_usize, rat};
use bilevel_core::{IntervalSet, Scenario, UncertaintySet};
use common::{case, Families, Shape, ALL};
use proptest::prelude::*;

const SHAPE: Shape = Shape { min_n: 1, max_n: 6, disjoint: true, nonneg: false };

fn family(discrete: bool, interval: bool, du: bool) -> Families {
    Families { discrete, interval, du }
}

fn check_against_samples(inst: &bilevel_core::Instance, u: &UncertaintySet) -> Result<(), TestCaseError> {
    let sol = rcbsp_leader(inst, u).unwrap();
    let samples = sol.objective.sample_points();
    let oracle = oracle_plf(inst, u, &samples, &OracleBudget::default()).unwrap();
    for (x, v) in &oracle {
        let at = sol.objective.eval(x);
        prop_assert_eq!(at.as_ref(), Some(v), "objective at {}", x);
    }
    let best = oracle.iter().map(|p| p.1.clone()).min().unwrap();
    prop_assert_eq!(&sol.value, &best);
    // The reported leader vector attains the value.
    prop_assert_eq!(rcbsp_adversary(inst, u, &sol.x).unwrap().leader_value, sol.value);
    let (lo, hi) = inst.leader_count_range();
    prop_assert_eq!(sol.objective.domain(), (&from_usize(lo), &from_usize(hi)));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn discrete_leader_matches_sampled_oracle((inst, u) in case(SHAPE, family(true, false, false), 4)) {
        check_against_samples(&inst, &u)?;
    }

    #[test]
    fn interval_leader_matches_sampled_oracle((inst, u) in case(SHAPE, family(false, true, false), 1)) {
        check_against_samples(&inst, &u)?;
    }

    #[test]
    fn value_set_leader_matches_sampled_oracle((inst, u) in case(SHAPE, family(false, false, true), 1)) {
        check_against_samples(&inst, &u)?;
    }

    #[test]
    fn continuous_adversary_matches_enumeration((inst, u) in case(SHAPE, ALL, 4), k in 0i64..=8) {
        let (lo, hi) = inst.leader_count_range();
        let amount = from_usize(lo) + from_usize(hi - lo) * rat(k, 8);
        let x = leader_vector(&inst, &amount).unwrap();
        let fast = rcbsp_adversary(&inst, &u, &x).unwrap();
        let slow = oracle_adversary_continuous(&inst, &u, &x, &OracleBudget::default()).unwrap();
        prop_assert_eq!(&fast.leader_value, &slow.leader_value);
        let inside = match &u {
            UncertaintySet::Discrete(s) => s.contains(&fast.scenario),
            UncertaintySet::Interval(iv) => iv.contains(&fast.scenario),
            UncertaintySet::DiscreteUncorrelated(du) => du.contains(&fast.scenario),
        };
        prop_assert!(inside);
        let y = follower_respond_continuous(&inst, &(from_usize(inst.capacity()) - &amount), &fast.scenario).unwrap();
        prop_assert_eq!(inst.cost_of_fractional(&x) + inst.cost_of_fractional(&y), fast.leader_value.clone());
        prop_assert_eq!(FollowerResponse::Fractional(y), fast.response);
    }

    #[test]
    fn singleton_uncertainty_collapses_to_the_bilevel_problem(
        (inst, u) in case(SHAPE, family(true, false, false), 1),
        form in 0u8..3,
    ) {
        let UncertaintySet::Discrete(s) = &u else { unreachable!() };
        let d: &Scenario = &s[0];
        let single = match form {
            0 => u.clone(),
            1 => UncertaintySet::Interval(IntervalSet::new(d.follower_cost.clone(), d.follower_cost.clone()).unwrap()),
            _ => UncertaintySet::DiscreteUncorrelated(
                bilevel_core::DuSet::new(d.follower_cost.iter().map(|(e, v)| (*e, vec![v.clone()])).collect()).unwrap(),
            ),
        };
        prop_assert_eq!(rcbsp_leader(&inst, &single).unwrap().value, solve_bsp(&inst, d).unwrap().value);
    }
}
