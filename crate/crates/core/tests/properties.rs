mod common;

use budgeted_contracts::corpus::{corpus_instance, random_prices, rng_for, Family};
use budgeted_contracts::downsizing::{downsize_submodular, DownsizeParams};
use budgeted_contracts::frugality::{pof, PofQuery};
use budgeted_contracts::objectives::{check_best_conditions, key_property_gap};
use budgeted_contracts::reductions::{equivalence_pipeline, exact_solver, scale_instance, Path};
use budgeted_contracts::solvers::{
    brute_force_max, brute_force_max_with, fptas_additive_profit, knapsack_fptas, BruteForceOptions,
};
use budgeted_contracts::{Execution, Instance, Objective, SetFunction, Subset};
use common::{ceil_tol, f, max_objective, objective, payment, TOL};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Additive), Just(Family::Submodular), Just(Family::Xos)]
}

fn instance(
    fam: impl Strategy<Value = Family>,
    sizes: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Instance> {
    (fam, any::<u64>(), sizes).prop_map(|(fam, seed, n)| corpus_instance(fam, seed, 0, n).unwrap())
}

fn objectives() -> Vec<Objective> {
    vec![
        Objective::Reward,
        Objective::Profit,
        Objective::Welfare,
        Objective::convex(vec![0.2, 0.3, 0.5], vec![Objective::Reward, Objective::Profit, Objective::Welfare]).unwrap(),
    ]
}

fn budget() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.25), Just(0.5), Just(0.75), Just(1.0), 0.05f64..1.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn payment_profit_welfare_match_definitions(inst in instance(family(), 1..=8), bits in any::<u64>()) {
        let mask = bits & ((1 << inst.n()) - 1);
        let s = Subset::from_bits(mask);
        let p = payment(&inst, mask);
        let got = inst.payment(s).to_f64();
        prop_assert!(got == p || (got - p).abs() <= 1e-12 * p.abs().max(1.0), "{got} vs {p}");
        for obj in objectives() {
            let got = obj.evaluate(&inst, s);
            let want = objective(&obj, &inst, mask);
            prop_assert!(got == want || (got - want).abs() <= 1e-12, "{obj}: {got} vs {want}");
        }
        let cost: f64 = s.iter().map(|i| inst.costs()[i]).sum();
        prop_assert_eq!(inst.welfare(s), inst.value(s) - cost);
    }

    #[test]
    fn sandwich_and_best_conditions(inst in instance(family(), 1..=7)) {
        for obj in objectives() {
            prop_assert!(check_best_conditions(&obj, &inst).unwrap(), "{obj}");
            for m in 0..1u64 << inst.n() {
                let s = Subset::from_bits(m);
                let v = obj.evaluate(&inst, s);
                prop_assert!(inst.profit(s) <= v + TOL && v <= inst.value(s) + TOL);
            }
        }
    }

    #[test]
    fn key_property(inst in instance(prop_oneof![Just(Family::Xos), Just(Family::Submodular)], 1..=7)) {
        for budget in [0.25, 0.5, 0.75, 1.0] {
            for obj in objectives() {
                let gap = key_property_gap(&obj, &inst, budget).unwrap();
                prop_assert!(gap.holds(), "{obj} at {budget}: {} > {}", gap.lhs, gap.rhs);
            }
        }
    }

    #[test]
    fn brute_force_matches_oracle_and_modes(inst in instance(family(), 1..=8), b in budget()) {
        for obj in objectives() {
            let seq = brute_force_max_with(&obj, &inst, b, false, BruteForceOptions { execution: Execution::Sequential, ..Default::default() }).unwrap();
            let par = brute_force_max_with(&obj, &inst, b, false, BruteForceOptions { execution: Execution::Parallel, ..Default::default() }).unwrap();
            prop_assert_eq!(&seq, &par);
            prop_assert!((seq.value - max_objective(&obj, &inst, b, false)).abs() <= 1e-12);
            prop_assert!(seq.payment.within(b));
            prop_assert!(seq.value >= 0.0);
            let light = brute_force_max(&obj, &inst, b, true).unwrap();
            prop_assert!(light.optimum.is_subset_of(inst.light_agents()));
            if obj == Objective::Reward {
                prop_assert!(light.value <= seq.value + TOL);
            }
        }
    }

    #[test]
    fn optimum_is_monotone_in_budget(inst in instance(family(), 1..=7), lo in 0.01f64..1.0, hi in 0.01f64..1.0) {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        for obj in objectives() {
            let small = brute_force_max(&obj, &inst, lo, false).unwrap().value;
            let large = brute_force_max(&obj, &inst, hi, false).unwrap().value;
            prop_assert!(small <= large + TOL);
        }
    }

    #[test]
    fn optimal_contract_induces_team(inst in instance(family(), 1..=6), bits in any::<u64>()) {
        let s = Subset::from_bits(bits & ((1 << inst.n()) - 1));
        if let Ok(contract) = inst.optimal_contract_for(s) {
            prop_assert!(inst.is_nash_equilibrium(&contract, s));
            prop_assert!((contract.total() - inst.payment(s).to_f64()).abs() <= 1e-12);
        }
    }

    #[test]
    fn downsizing_stays_inside_team(inst in instance(Just(Family::Submodular), 1..=9), bits in 1u64.., m in 3usize..10) {
        let s = Subset::from_bits(bits & ((1 << inst.n()) - 1));
        prop_assume!(!s.is_empty() && inst.payment(s).is_finite());
        let r = downsize_submodular(&inst, s, &DownsizeParams::new(m)).unwrap();
        prop_assert!(r.subset.is_subset_of(s));
        prop_assert_eq!(r.payment_after, inst.payment(r.subset));
        prop_assert!(r.meets_submodular_guarantee(m));
    }

    #[test]
    fn scaling_round_trip(inst in instance(family(), 1..=8), b in 0.05f64..=1.0, b2 in 0.05f64..=1.0) {
        let scaled = scale_instance(&inst, b, b2).unwrap();
        prop_assert_eq!(&scaled.agents, &inst.light_agents().to_vec());
        let back = scaled.instance.restrict(scaled.instance.all_agents(), b / b2).unwrap();
        for (k, &i) in scaled.agents.iter().enumerate() {
            let c = inst.costs()[i];
            prop_assert!((back.costs()[k] - c).abs() <= 1e-15 * c.max(1.0) * 4.0);
        }
    }

    #[test]
    fn demand_is_optimal(inst in instance(family(), 1..=10), seed in any::<u64>()) {
        let prices = random_prices(&mut rng_for(seed, 0), inst.n());
        let got = inst.reward().demand(&prices).unwrap().bits();
        let surplus = |m: u64| f(&inst, m) - common::members(m).map(|i| prices[i]).sum::<f64>();
        let best = (0..1u64 << inst.n()).map(surplus).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((surplus(got) - best).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pipeline_within_product_constant(inst in instance(Just(Family::Xos), 2..=7)) {
        for (from, to) in [(Objective::Welfare, Objective::Profit), (Objective::Reward, Objective::Profit), (Objective::Profit, Objective::Profit)] {
            for (b_from, b_to) in [(1.0, 0.5), (0.5, 1.0), (0.25, 0.25)] {
                let out = equivalence_pipeline(&inst, (&from, b_from), (&to, b_to), exact_solver, 1.0, Path::Xos).unwrap();
                prop_assert_eq!(out.guarantee_factor, 820.0);
                prop_assert!(payment(&inst, out.candidate.bits()) <= b_from + TOL);
                let best = max_objective(&from, &inst, b_from, false);
                prop_assert!(820.0 * objective(&from, &inst, out.candidate.bits()) >= best - TOL);
            }
        }
    }

    #[test]
    fn submodular_pof_upper_bound(inst in instance(prop_oneof![Just(Family::Additive), Just(Family::Submodular)], 1..=8), big in 0.5f64..=1.0, frac in 0.0f64..1.0) {
        let n = inst.n();
        let floor = (0..n).map(|i| payment(&inst, 1 << i)).fold(0.01, f64::max);
        prop_assume!(floor <= big);
        let b = floor + frac * (big - floor);
        for obj in [Objective::Reward, Objective::Welfare, Objective::Profit] {
            let report = pof(&inst, &PofQuery::new(b, big, obj)).unwrap();
            let bound = (ceil_tol(2.0 * big / b) - 1.0).min(n as f64);
            prop_assert!(report.ratio.unwrap() <= bound + TOL);
            prop_assert!(report.within_bound());
        }
    }

    #[test]
    fn xos_pof_proof_constant(inst in instance(Just(Family::Xos), 1..=8), big in 0.5f64..=1.0, frac in 0.0f64..1.0) {
        let n = inst.n();
        let floor = (0..n).map(|i| payment(&inst, 1 << i)).fold(0.01, f64::max);
        prop_assume!(floor <= big);
        let b = floor + frac * (big - floor);
        for obj in objectives() {
            let at_b = max_objective(&obj, &inst, b, false);
            prop_assume!(at_b > 0.0);
            let ratio = max_objective(&obj, &inst, big, false) / at_b;
            prop_assert!(ratio <= 32.0 * (big / b).min(2.0 * n as f64) + TOL);
        }
    }

    #[test]
    fn fptas_ratio(seed in any::<u64>(), n in 1usize..=14, b in budget(), eps in prop_oneof![Just(0.3), Just(0.1), Just(0.02)]) {
        let inst = corpus_instance(Family::Additive, seed, 0, n).unwrap();
        let out = fptas_additive_profit(&inst, b, eps).unwrap();
        prop_assert!(payment(&inst, out.optimum.bits()) <= b + TOL);
        prop_assert!(out.value >= (1.0 - eps) * max_objective(&Objective::Profit, &inst, b, false) - TOL);
    }

    #[test]
    fn knapsack_lossless_rounding_is_exact(levels in prop::collection::vec(1u32..=4, 1..=8), shares in prop::collection::vec(0.01f64..0.6, 8), b in budget()) {
        // values on a grid of 1/16 are multiples of the rounding unit when ε·top/n divides them
        let n = levels.len();
        let values: Vec<f64> = levels.iter().map(|&l| l as f64 / 32.0).collect();
        let costs: Vec<f64> = values.iter().zip(&shares).map(|(v, s)| v * s).collect();
        let inst = Instance::new(costs, SetFunction::additive(values.clone()).unwrap()).unwrap();
        let top = values.iter().copied().fold(0.0, f64::max);
        let eps = (n as f64 / 32.0) / top;
        prop_assume!(eps < 1.0);
        let out = knapsack_fptas(&inst, b, eps, &Objective::Reward).unwrap();
        prop_assert!((out.value - max_objective(&Objective::Reward, &inst, b, false)).abs() <= 1e-12);
    }
}
