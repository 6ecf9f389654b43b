use crate::error::{ContractError, Result};
use crate::instance::{Instance, ENUMERATION_CAP};
use crate::objectives::Objective;
use crate::par::Execution;
use crate::real::ExtendedReal;
use crate::subset::{expand, Subset};

use super::SolveResult;

/// Knobs for [`brute_force_max_with`].
#[derive(Clone, Copy, Debug)]
pub struct BruteForceOptions {
    pub cap: usize,
    pub execution: Execution,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions { cap: ENUMERATION_CAP, execution: Execution::default() }
    }
}

/// `Max-φ(B)` by enumeration, or `Max-Reward-Light(B)`-style restriction to light agents
/// when `light_only`. Ties go to the smaller bitmask; `∅` is always feasible.
pub fn brute_force_max(obj: &Objective, inst: &Instance, budget: f64, light_only: bool) -> Result<SolveResult> {
    brute_force_max_with(obj, inst, budget, light_only, BruteForceOptions::default())
}

pub fn brute_force_max_with(
    obj: &Objective,
    inst: &Instance,
    budget: f64,
    light_only: bool,
    opts: BruteForceOptions,
) -> Result<SolveResult> {
    let n = inst.n();
    if n > opts.cap {
        return Err(ContractError::TooLarge { n, cap: opts.cap });
    }
    if !(budget.is_finite() && budget >= 0.0) {
        return Err(ContractError::input(format!("budget {budget} must be finite and non-negative")));
    }
    let domain = if light_only { inst.light_agents() } else { inst.all_agents() };
    let members = domain.to_vec();
    let count = 1u64 << members.len();

    let candidate = |k: u64| {
        let s = expand(k, &members);
        let payment = inst.payment(s);
        if !payment.within(budget) {
            return None;
        }
        Some((value_given_payment(obj, inst, s, payment), s, payment))
    };
    let pick = |a: (f64, Subset, ExtendedReal), b: (f64, Subset, ExtendedReal)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let (value, optimum, payment) =
        opts.execution.filter_reduce(count, candidate, pick).expect("the empty set is always feasible");
    Ok(SolveResult { optimum, value, payment, enumerated: count })
}

/// `φ(S)` reusing an already computed payment for the profit term.
fn value_given_payment(obj: &Objective, inst: &Instance, s: Subset, payment: ExtendedReal) -> f64 {
    match obj {
        Objective::Profit => {
            let f = inst.value(s);
            match payment {
                _ if f == 0.0 => 0.0,
                ExtendedReal::Finite(p) => (1.0 - p) * f,
                ExtendedReal::Infinite => f64::NEG_INFINITY,
            }
        }
        Objective::Convex { weights, components } => {
            weights.iter().zip(components).map(|(w, o)| w * value_given_payment(o, inst, s, payment)).sum()
        }
        _ => obj.evaluate(inst, s),
    }
}
