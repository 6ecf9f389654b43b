//! Value-rounding dynamic programs for additive rewards.
//!
//! With additive `f`, the payment of a set is `Σ_{i∈S} c_i / f({i})`, so budgeted
//! problems become knapsack problems over weights `c_i / f({i})`.

use serde::Serialize;

use crate::error::{ContractError, Result};
use crate::instance::Instance;
use crate::objectives::Objective;
use crate::par::Execution;
use crate::real::{ceil_tol, floor_tol, ExtendedReal, TOL};
use crate::set_function::SetFunction;
use crate::subset::Subset;

use super::SolveResult;

/// Rounding parameters for one anchor guess.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FptasParams {
    pub epsilon: f64,
    /// Guess for the largest singleton value inside the optimum.
    pub anchor: f64,
    /// `epsilon / n`.
    pub delta: f64,
}

impl FptasParams {
    pub fn new(epsilon: f64, anchor: f64, n: usize) -> Self {
        FptasParams { epsilon, anchor, delta: epsilon / n as f64 }
    }

    /// Grid step `δ · anchor`; rounded rewards are multiples of it.
    pub fn unit(&self) -> f64 {
        self.delta * self.anchor
    }

    /// Highest level `⌈n/δ⌉ = ⌈n²/ε⌉`.
    pub fn max_level(&self, n: usize) -> usize {
        ceil_tol((n * n) as f64 / self.epsilon).max(0) as usize
    }
}

/// `entries[k]`: the cheapest set (by `Σ c_i / f({i})`) whose rounded reward is at least
/// `k · δ · anchor`, or `None` when no set reaches level `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundedTable {
    pub params: FptasParams,
    /// Rounded reward level of each agent, capped at the top level.
    pub levels: Vec<usize>,
    pub entries: Vec<Option<(f64, Subset)>>,
}

impl RoundedTable {
    /// Min-cost fill over agents in index order, then a suffix minimum so that each
    /// entry means "level at least k".
    pub fn build(values: &[f64], weights: &[ExtendedReal], params: FptasParams) -> Self {
        let n = values.len();
        let top = params.max_level(n);
        let unit = params.unit();
        let levels: Vec<usize> = values.iter().map(|&v| (floor_tol(v / unit).max(0) as usize).min(top)).collect();

        let mut entries: Vec<Option<(f64, Subset)>> = vec![None; top + 1];
        entries[0] = Some((0.0, Subset::EMPTY));
        for i in 0..n {
            let (ExtendedReal::Finite(w), r) = (weights[i], levels[i]) else { continue };
            if r == 0 {
                continue;
            }
            for k in (0..=top).rev() {
                let Some((base, set)) = entries[k] else { continue };
                let target = (k + r).min(top);
                let cand = base + w;
                if entries[target].is_none_or(|(cur, _)| cand < cur) {
                    entries[target] = Some((cand, set.with(i)));
                }
            }
        }
        for k in (0..top).rev() {
            if let Some((above, set)) = entries[k + 1] {
                if entries[k].is_none_or(|(cur, _)| above < cur) {
                    entries[k] = Some((above, set));
                }
            }
        }
        RoundedTable { params, levels, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The budget-feasible entry maximizing `(1 − weight) · k · δ · anchor`; ties go to the
    /// smallest `k`.
    pub fn select(&self, budget: f64) -> (usize, Subset) {
        let unit = self.params.unit();
        let mut best = (0usize, Subset::EMPTY, 0.0f64);
        for (k, entry) in self.entries.iter().enumerate() {
            if let Some((w, set)) = *entry {
                if w <= budget + TOL {
                    let estimate = (1.0 - w) * k as f64 * unit;
                    if estimate > best.2 {
                        best = (k, set, estimate);
                    }
                }
            }
        }
        (best.0, best.1)
    }
}

/// Work counters for [`fptas_additive_profit_with_stats`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FptasStats {
    pub anchors: usize,
    /// Entries per anchor table, `⌈n/δ⌉ + 1`.
    pub table_size: usize,
    pub cells: u64,
}

fn additive_values(inst: &Instance) -> Result<&[f64]> {
    match inst.reward() {
        SetFunction::Additive { values } => Ok(values),
        _ => Err(ContractError::precondition("FPTAS requires an additive reward")),
    }
}

fn check_params(budget: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ContractError::input(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if !(budget > 0.0 && budget <= 1.0) {
        return Err(ContractError::input(format!("budget {budget} outside (0, 1]")));
    }
    Ok(())
}

/// `(1 − ε)`-approximate `Max-Profit(B)` for additive rewards.
pub fn fptas_additive_profit(inst: &Instance, budget: f64, epsilon: f64) -> Result<SolveResult> {
    fptas_additive_profit_with_stats(inst, budget, epsilon, Execution::default()).map(|(r, _)| r)
}

/// Runs one rounded table per anchor guess `f({i}) > 0` and returns the most profitable
/// selection across anchors.
pub fn fptas_additive_profit_with_stats(
    inst: &Instance,
    budget: f64,
    epsilon: f64,
    execution: Execution,
) -> Result<(SolveResult, FptasStats)> {
    check_params(budget, epsilon)?;
    let values = additive_values(inst)?;
    let n = inst.n();
    let weights: Vec<ExtendedReal> = (0..n).map(|i| inst.payment(Subset::singleton(i))).collect();

    let mut anchors: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();

    let picks = execution.map(&anchors, |&anchor| {
        let table = RoundedTable::build(values, &weights, FptasParams::new(epsilon, anchor, n));
        let (_, set) = table.select(budget);
        (set, table.len())
    });

    let table_size = picks.first().map_or(0, |p| p.1);
    let mut best = Subset::EMPTY;
    let mut best_profit = 0.0;
    for &(set, _) in &picks {
        let g = inst.profit(set);
        if g > best_profit {
            best = set;
            best_profit = g;
        }
    }
    let cells = (anchors.len() * n * table_size) as u64;
    let result =
        SolveResult { optimum: best, value: inst.profit(best), payment: inst.payment(best), enumerated: cells };
    Ok((result, FptasStats { anchors: anchors.len(), table_size, cells }))
}

/// Classic value-rounding knapsack FPTAS for additive objectives (reward, welfare and
/// their convex combinations) over weights `c_i / f({i})`.
pub fn knapsack_fptas(inst: &Instance, budget: f64, epsilon: f64, obj: &Objective) -> Result<SolveResult> {
    check_params(budget, epsilon)?;
    additive_values(inst)?;
    if !obj.is_additive_when_reward_is() {
        return Err(ContractError::precondition(format!("{obj} is not an additive objective")));
    }
    let n = inst.n();
    // (agent, weight, value) of items that fit on their own and carry positive value
    let items: Vec<(usize, f64, f64)> = (0..n)
        .filter_map(|i| {
            let single = Subset::singleton(i);
            let w = inst.payment(single).finite()?;
            let v = obj.evaluate(inst, single);
            (w <= budget + TOL && v > 0.0).then_some((i, w, v))
        })
        .collect();
    let Some(top) = items.iter().map(|it| it.2).reduce(f64::max) else {
        return Ok(SolveResult {
            optimum: Subset::EMPTY,
            value: obj.evaluate(inst, Subset::EMPTY),
            payment: ExtendedReal::ZERO,
            enumerated: 0,
        });
    };
    let unit = epsilon * top / items.len() as f64;
    let scaled: Vec<usize> = items.iter().map(|it| floor_tol(it.2 / unit).max(0) as usize).collect();
    let total: usize = scaled.iter().sum();

    // dp[v]: cheapest (weight, set) with scaled value exactly v
    let mut dp: Vec<Option<(f64, Subset)>> = vec![None; total + 1];
    dp[0] = Some((0.0, Subset::EMPTY));
    for (&(i, w, _), &sv) in items.iter().zip(&scaled) {
        if sv == 0 {
            continue;
        }
        for v in (sv..=total).rev() {
            let Some((base, set)) = dp[v - sv] else { continue };
            let cand = base + w;
            if dp[v].is_none_or(|(cur, _)| cand < cur) {
                dp[v] = Some((cand, set.with(i)));
            }
        }
    }
    let (_, optimum) =
        dp.iter().rev().flatten().find(|(w, _)| *w <= budget + TOL).copied().expect("the empty set fits");
    Ok(SolveResult {
        optimum,
        value: obj.evaluate(inst, optimum),
        payment: inst.payment(optimum),
        enumerated: (items.len() * (total + 1)) as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[usize]) -> Subset {
        Subset::from_indices(ix.iter().copied())
    }

    #[test]
    fn profit_fptas_two_agents() {
        let inst = Instance::new(vec![0.1, 0.1], SetFunction::additive(vec![0.5, 0.5]).unwrap()).unwrap();
        let r = fptas_additive_profit(&inst, 1.0, 0.1).unwrap();
        assert!(r.value >= 0.54);
        assert_eq!(r.optimum, s(&[0, 1]));
    }

    #[test]
    fn profit_fptas_single_agent_is_exact() {
        let inst = Instance::new(vec![0.2], SetFunction::additive(vec![0.8]).unwrap()).unwrap();
        for eps in [0.5, 0.1, 0.01] {
            let r = fptas_additive_profit(&inst, 1.0, eps).unwrap();
            assert_eq!(r.optimum, s(&[0]));
            assert!((r.value - 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn table_shape_and_monotone_payments() {
        let values = [0.3, 0.2, 0.25, 0.1];
        let weights: Vec<_> = [0.1, 0.05, 0.2, 0.01].iter().map(|&w| ExtendedReal::Finite(w)).collect();
        let params = FptasParams::new(0.3, 0.3, 4);
        let table = RoundedTable::build(&values, &weights, params);
        assert_eq!(table.len(), ceil_tol(16.0 / 0.3) as usize + 1);
        let unit = params.unit();
        for (k, e) in table.entries.iter().enumerate() {
            if let Some((w, set)) = e {
                let level = set.iter().map(|i| table.levels[i]).sum::<usize>().min(table.len() - 1);
                assert!(level >= k);
                assert!(table.levels.iter().all(|&l| (l as f64 * unit) <= 0.3 + 1e-12));
                let direct: f64 = set
                    .iter()
                    .map(|i| match weights[i] {
                        ExtendedReal::Finite(x) => x,
                        ExtendedReal::Infinite => unreachable!(),
                    })
                    .sum();
                assert!((direct - w).abs() < 1e-12);
            }
        }
        let ws: Vec<f64> = table.entries.iter().flatten().map(|e| e.0).collect();
        assert!(ws.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn rejects_non_additive() {
        let f = SetFunction::xos(vec![vec![0.3, 0.3]]).unwrap();
        let inst = Instance::new(vec![0.1, 0.1], f).unwrap();
        assert!(matches!(fptas_additive_profit(&inst, 1.0, 0.1), Err(ContractError::Precondition(_))));
        assert!(matches!(knapsack_fptas(&inst, 1.0, 0.1, &Objective::Reward), Err(ContractError::Precondition(_))));
        let add = Instance::new(vec![0.1], SetFunction::additive(vec![0.3]).unwrap()).unwrap();
        assert!(matches!(knapsack_fptas(&add, 1.0, 0.1, &Objective::Profit), Err(ContractError::Precondition(_))));
        assert!(fptas_additive_profit(&add, 1.0, 1.5).is_err());
    }

    #[test]
    fn knapsack_examples() {
        // four agents worth 1/4 each at payment 1/4 each
        let inst = Instance::new(vec![1.0 / 16.0; 4], SetFunction::additive(vec![0.25; 4]).unwrap()).unwrap();
        let r = knapsack_fptas(&inst, 1.0, 0.1, &Objective::Reward).unwrap();
        assert!(r.value >= 0.9);

        let heavy = Instance::new(vec![0.4, 0.45], SetFunction::additive(vec![0.5, 0.5]).unwrap()).unwrap();
        let r = knapsack_fptas(&heavy, 0.5, 0.1, &Objective::Reward).unwrap();
        assert_eq!(r.optimum, Subset::EMPTY);

        let free = Instance::new(vec![0.0; 3], SetFunction::additive(vec![0.2, 0.3, 0.1]).unwrap()).unwrap();
        let r = knapsack_fptas(&free, 0.5, 0.2, &Objective::Welfare).unwrap();
        assert_eq!(r.optimum, s(&[0, 1, 2]));
        assert!((r.value - 0.6).abs() < 1e-12);
    }
}
