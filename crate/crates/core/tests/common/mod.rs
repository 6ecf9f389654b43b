//! Reference computations written directly from the model definitions, sharing nothing
//! with the library beyond the value oracle `f(S)` and the costs.
#![allow(dead_code)]

use budgeted_contracts::{Instance, Objective, Subset};

pub const TOL: f64 = 1e-9;

pub fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

pub fn f(inst: &Instance, mask: u64) -> f64 {
    inst.value(Subset::from_bits(mask))
}

/// `Σ c_i / (f(S) − f(S∖i))` with `0/0 = 0` and `c/0 = ∞`.
pub fn payment(inst: &Instance, mask: u64) -> f64 {
    let total = f(inst, mask);
    members(mask)
        .map(|i| {
            let c = inst.costs()[i];
            let gain = total - f(inst, mask & !(1 << i));
            if c == 0.0 {
                0.0
            } else if gain <= 0.0 {
                f64::INFINITY
            } else {
                c / gain
            }
        })
        .sum()
}

pub fn objective(obj: &Objective, inst: &Instance, mask: u64) -> f64 {
    match obj {
        Objective::Reward => f(inst, mask),
        Objective::Welfare => f(inst, mask) - members(mask).map(|i| inst.costs()[i]).sum::<f64>(),
        Objective::Profit => {
            let v = f(inst, mask);
            if v == 0.0 {
                0.0
            } else {
                (1.0 - payment(inst, mask)) * v
            }
        }
        Objective::Convex { weights, components } => {
            weights.iter().zip(components).map(|(w, c)| w * objective(c, inst, mask)).sum()
        }
    }
}

pub fn is_light(inst: &Instance, i: usize) -> bool {
    payment(inst, 1 << i) <= 0.5 + TOL
}

/// `max φ(S)` over `S` with `p(S) ≤ B`, optionally over light agents only.
pub fn max_objective(obj: &Objective, inst: &Instance, budget: f64, light_only: bool) -> f64 {
    let n = inst.n();
    let allowed: u64 = (0..n).filter(|&i| !light_only || is_light(inst, i)).map(|i| 1u64 << i).sum();
    (0..1u64 << n)
        .filter(|&m| m & !allowed == 0 && payment(inst, m) <= budget + TOL)
        .map(|m| objective(obj, inst, m))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn ceil_tol(x: f64) -> f64 {
    (x - TOL).ceil()
}
