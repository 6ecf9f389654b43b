//! Price of frugality `Max-φ(B)/Max-φ(b)`: measurement, bound formulas and the families of
//! instances on which the bounds are attained.
//!
//! Ratios are reported as numbers `≥ 1`. Agents are indexed from 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ContractError, Result};
use crate::instance::{Instance, ENUMERATION_CAP};
use crate::objectives::Objective;
use crate::real::{ceil_tol, floor_tol, ExtendedReal, TOL};
use crate::set_function::{SetFunction, CLASSIFY_CAP};
use crate::solvers::brute_force_max;
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PofQuery {
    pub b: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub objective: Objective,
    /// Require every singleton to be feasible at `b`, and treat `Max-φ(b) = 0` as an error.
    #[serde(default)]
    pub singletons_feasible_at_b: bool,
}

impl PofQuery {
    pub fn new(b: f64, big_b: f64, objective: Objective) -> Self {
        PofQuery { b, big_b, objective, singletons_feasible_at_b: true }
    }

    #[must_use]
    pub fn unconstrained(mut self) -> Self {
        self.singletons_feasible_at_b = false;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `min(⌈2B/b⌉−1, n)`, exact for submodular reward and welfare.
    SubmodularExact,
    /// `min(B/b, n)` up to a constant, for XOS rewards.
    XosAsymptotic,
    /// `min(⌈2B/b⌉−1, n)` as an upper bound for submodular profit.
    ProfitUpper,
    /// `max(2−b, k(2−kb)/(2−b))`, a worst-case lower bound for submodular profit.
    ProfitLower,
}

impl BoundKind {
    pub fn is_upper(self) -> bool {
        !matches!(self, BoundKind::ProfitLower)
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::SubmodularExact => "submodular-exact",
            BoundKind::XosAsymptotic => "xos-asymptotic",
            BoundKind::ProfitUpper => "profit-upper",
            BoundKind::ProfitLower => "profit-lower",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PofReport {
    #[serde(rename = "max_at_B")]
    pub max_at_big_b: f64,
    pub max_at_b: f64,
    /// `None` when `Max-φ(b) = 0`.
    pub ratio: Option<f64>,
    pub theoretical_bound: Option<f64>,
    pub bound_kind: Option<BoundKind>,
}

impl PofReport {
    /// The ratio respects the attached bound, if that bound is an upper bound.
    pub fn within_bound(&self) -> bool {
        match (self.ratio, self.theoretical_bound, self.bound_kind) {
            (Some(r), Some(bound), Some(kind)) if kind.is_upper() && kind != BoundKind::XosAsymptotic => {
                r <= bound + TOL
            }
            _ => true,
        }
    }
}

fn check_budgets(b: f64, big_b: f64) -> Result<()> {
    if b > 0.0 && b <= big_b + TOL && big_b <= 1.0 {
        Ok(())
    } else {
        Err(ContractError::input(format!("budgets need 0 < b ≤ B ≤ 1, got b = {b}, B = {big_b}")))
    }
}

/// `⌈2B/b⌉ − 1`, the largest team size whose equal split stays above `b/2` per agent.
fn team_cap(b: f64, big_b: f64) -> usize {
    (ceil_tol(2.0 * big_b / b) - 1).max(1) as usize
}

/// The bound formula of the given kind.
pub fn pof_bound(b: f64, big_b: f64, n: usize, kind: BoundKind) -> Result<f64> {
    check_budgets(b, big_b)?;
    if n == 0 {
        return Err(ContractError::input("bounds need at least one agent"));
    }
    let same = (big_b - b).abs() <= TOL;
    Ok(match kind {
        BoundKind::SubmodularExact | BoundKind::ProfitUpper => team_cap(b, big_b).min(n) as f64,
        BoundKind::XosAsymptotic => (big_b / b).min(n as f64),
        BoundKind::ProfitLower if same || n == 1 => 1.0,
        BoundKind::ProfitLower => {
            let k = (floor_tol(1.0 / b + 0.5).max(1) as usize).min(team_cap(b, big_b)).min(n) as f64;
            (2.0 - b).max(k * (2.0 - k * b) / (2.0 - b))
        }
    })
}

/// The upper-bound kind that applies to this reward and objective, if any.
pub fn applicable_bound(inst: &Instance, objective: &Objective) -> Option<BoundKind> {
    let submodular = match inst.reward() {
        SetFunction::Additive { .. } => true,
        f if f.n() <= CLASSIFY_CAP => f.classify().map(|c| c.is_submodular && c.is_monotone).unwrap_or(false),
        _ => false,
    };
    let xos = submodular || matches!(inst.reward(), SetFunction::XosClauses { .. });
    match objective {
        Objective::Reward | Objective::Welfare if submodular => Some(BoundKind::SubmodularExact),
        Objective::Profit if submodular => Some(BoundKind::ProfitUpper),
        _ if xos => Some(BoundKind::XosAsymptotic),
        _ => None,
    }
}

/// Measures `Max-φ(B)/Max-φ(b)` by enumeration.
pub fn pof(inst: &Instance, query: &PofQuery) -> Result<PofReport> {
    let (b, big_b) = (query.b, query.big_b);
    check_budgets(b, big_b)?;
    if inst.n() > ENUMERATION_CAP {
        return Err(ContractError::TooLarge { n: inst.n(), cap: ENUMERATION_CAP });
    }
    if query.singletons_feasible_at_b {
        if let Some(i) = (0..inst.n()).find(|&i| !inst.is_feasible(Subset::singleton(i), b)) {
            return Err(ContractError::precondition(format!(
                "agent {i} is not feasible alone at b = {b} (payment {})",
                inst.payment(Subset::singleton(i))
            )));
        }
    }
    let at_big = brute_force_max(&query.objective, inst, big_b, false)?.value;
    let at_small = brute_force_max(&query.objective, inst, b, false)?.value;
    let ratio = if at_small > 0.0 {
        Some(at_big / at_small)
    } else if query.singletons_feasible_at_b {
        return Err(ContractError::UndefinedRatio);
    } else {
        None
    };
    let bound_kind = if inst.n() == 0 { None } else { applicable_bound(inst, &query.objective) };
    let theoretical_bound = bound_kind.map(|k| pof_bound(b, big_b, inst.n(), k)).transpose()?;
    Ok(PofReport { max_at_big_b: at_big, max_at_b: at_small, ratio, theoretical_bound, bound_kind })
}

/// One step of `p ↦ Max-φ(p)`: from budget `payment` on the optimum is `value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub payment: f64,
    pub value: f64,
    pub team: Subset,
}

/// The step function `p ↦ Max-φ(p)` on `p ∈ [0, 1]`, listed at the payments where it jumps.
pub fn budget_curve(inst: &Instance, objective: &Objective) -> Result<Vec<CurvePoint>> {
    let n = inst.n();
    if n > ENUMERATION_CAP {
        return Err(ContractError::TooLarge { n, cap: ENUMERATION_CAP });
    }
    let mut teams: Vec<(f64, f64, Subset)> = (0..1u64 << n)
        .map(Subset::from_bits)
        .filter_map(|s| match inst.payment(s) {
            ExtendedReal::Finite(p) if p <= 1.0 + TOL => Some((p, objective.evaluate(inst, s), s)),
            _ => None,
        })
        .collect();
    teams.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let mut curve: Vec<CurvePoint> = Vec::new();
    for (payment, value, team) in teams {
        match curve.last_mut() {
            Some(last) if value <= last.value => {}
            Some(last) if payment == last.payment => *last = CurvePoint { payment, value, team },
            _ => curve.push(CurvePoint { payment, value, team }),
        }
    }
    Ok(curve)
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(ContractError::input(format!("{name} = {x} must lie in (0, 1]")))
    }
}

/// Default perturbation for the profit families: `min(0.01, range/2)`.
pub fn default_epsilon(range: f64) -> f64 {
    (range / 2.0).min(0.01)
}

/// Team size `M = min(⌈2B/b⌉−1, n)` of [`gen_additive_lb`].
pub fn additive_lb_size(n: usize, b: f64, big_b: f64) -> usize {
    team_cap(b, big_b).min(n)
}

/// `f(S) = |S ∩ {0,…,M−1}|/M` with `M = min(⌈2B/b⌉−1, n)`, as a table.
///
/// Each of the first `M` agents costs `min(B/M, b)/M`, so alone it is paid `min(B/M, b) ≤ b`
/// and the whole team is paid `min(B, M·b) ≤ B`, while any two of them exceed `b`. The
/// remaining agents are free and contribute nothing. Reward and welfare PoF both equal `M`.
pub fn gen_additive_lb(n: usize, b: f64, big_b: f64) -> Result<Instance> {
    check_unit("B", big_b)?;
    check_budgets(b, big_b)?;
    if n == 0 {
        return Err(ContractError::input("n must be at least 1"));
    }
    let m = additive_lb_size(n, b, big_b);
    let cost = (big_b / m as f64).min(b) / m as f64;
    let costs = (0..n).map(|i| if i < m { cost } else { 0.0 }).collect();
    let core = Subset::full(m);
    let f = SetFunction::table_from_fn(n, |s| s.intersection(core).len() as f64 / m as f64)?;
    Instance::new(costs, f)
}

/// The three-agent XOS instance with clauses `(2/5, 2/5, 1/5)` and `(0, 0, 2/5)` and costs
/// `(B/5, B/5, 0)`, whose reward PoF is `5/2`. `B` is lowered to `2b` when larger.
pub fn gen_xos_separation(b: f64, big_b: f64) -> Result<Instance> {
    check_unit("B", big_b)?;
    if !(b > 0.0 && b < big_b) {
        return Err(ContractError::input(format!("need 0 < b < B, got b = {b}, B = {big_b}")));
    }
    let big_b = big_b.min(2.0 * b);
    let f = SetFunction::xos(vec![vec![0.4, 0.4, 0.2], vec![0.0, 0.0, 0.4]])?;
    Instance::new(vec![big_b / 5.0, big_b / 5.0, 0.0], f)
}

/// Scale applied to the subadditive family so its largest value stays at most 1.
pub fn subadditive_lb_scale(n: usize) -> f64 {
    let top = 2.0 / (n as f64).sqrt() + 0.5;
    (1.0 / top).min(1.0)
}

/// `f(S) = 1/√n + |S|/n` for `1 ≤ |S| ≤ n/2` and `2/√n + 1/2` above, with equal costs
/// `B/((n/2+1)√n)`; values and costs share the factor [`subadditive_lb_scale`], which leaves
/// payments unchanged. Reward PoF is at least `(2/√n + 1/2)/(2/√n)`.
pub fn gen_subadditive_lb(n: usize, b: f64, big_b: f64) -> Result<Instance> {
    check_unit("B", big_b)?;
    check_budgets(b, big_b)?;
    if n < 4 || !n.is_multiple_of(2) {
        return Err(ContractError::input(format!("n = {n} must be even and at least 4")));
    }
    if big_b > n as f64 * b / 2.0 + TOL {
        return Err(ContractError::input(format!("need B ≤ n·b/2, got B = {big_b}, n·b/2 = {}", n as f64 * b / 2.0)));
    }
    let root = (n as f64).sqrt();
    let scale = subadditive_lb_scale(n);
    let half = n / 2;
    let f = SetFunction::table_from_fn(n, |s| {
        let size = s.len();
        let raw = match size {
            0 => 0.0,
            k if k <= half => 1.0 / root + k as f64 / n as f64,
            _ => 2.0 / root + 0.5,
        };
        raw * scale
    })?;
    let cost = scale * big_b / ((half + 1) as f64 * root);
    Instance::new(vec![cost; n], f)
}

/// Two additive agents with values `(1/2, 1/2 − b/2)` and costs `(b/2, ε(1/2 − b/2)²)`;
/// profit PoF is at least `(1 − ε/2)(2 − b)`.
pub fn gen_profit_lb_two(b: f64, big_b: f64, eps: f64) -> Result<Instance> {
    check_unit("B", big_b)?;
    check_budgets(b, big_b)?;
    if !(eps > 0.0 && eps < big_b - b) {
        return Err(ContractError::input(format!("need 0 < ε < B − b, got ε = {eps}")));
    }
    let second = 0.5 - b / 2.0;
    let f = SetFunction::additive(vec![0.5, second])?;
    Instance::new(vec![b / 2.0, eps * second * second], f)
}

/// `k` additive agents with value `1/k` and cost `(b + ε)/(2k)` each; profit PoF is at
/// least `k(2 − k(b+ε))/(2 − b − ε)`.
pub fn gen_profit_lb_k(b: f64, big_b: f64, k: usize, eps: f64) -> Result<Instance> {
    check_unit("B", big_b)?;
    check_budgets(b, big_b)?;
    if k == 0 || k as f64 >= 2.0 * big_b / b {
        return Err(ContractError::input(format!("need 1 ≤ k < 2B/b, got k = {k}")));
    }
    if !(eps > 0.0 && eps < 2.0 * big_b / k as f64 - b) {
        return Err(ContractError::input(format!("need 0 < ε < 2B/k − b, got ε = {eps}")));
    }
    let kf = k as f64;
    let f = SetFunction::additive(vec![1.0 / kf; k])?;
    Instance::new(vec![(b / 2.0 + eps / 2.0) / kf; k], f)
}
