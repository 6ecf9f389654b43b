//! Price-of-frugality sweeps over generated families.

use budgeted_contracts::frugality::{
    additive_lb_size, default_epsilon, gen_additive_lb, gen_profit_lb_k, gen_profit_lb_two, gen_subadditive_lb,
    gen_xos_separation, pof, PofQuery,
};
use budgeted_contracts::real::{floor_tol, parse_real, TOL};
use budgeted_contracts::{ContractError, Execution, Instance, Objective};
use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PofFamily {
    AdditiveLb,
    XosSep,
    SubaddLb,
    #[value(name = "profit-2")]
    ProfitTwo,
    #[value(name = "profit-k")]
    ProfitK,
}

impl PofFamily {
    pub fn name(self) -> &'static str {
        match self {
            PofFamily::AdditiveLb => "additive-lb",
            PofFamily::XosSep => "xos-sep",
            PofFamily::SubaddLb => "subadd-lb",
            PofFamily::ProfitTwo => "profit-2",
            PofFamily::ProfitK => "profit-k",
        }
    }
}

/// Parses `b=lo:hi:step` or `b=v1,v2,...`.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let (name, values) =
        text.split_once('=').ok_or_else(|| CliError::usage(format!("grid {text:?} must look like b=lo:hi:step")))?;
    if name.trim() != "b" {
        return Err(CliError::usage(format!("only the b axis can be swept, got {name:?}")));
    }
    let real = |s: &str| parse_real(s).map_err(CliError::usage);
    let parts: Vec<&str> = values.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (real(lo)?, real(hi)?, real(step)?);
            if step.is_nan() || step <= 0.0 || hi < lo {
                return Err(CliError::usage(format!("grid {text:?} needs lo ≤ hi and a positive step")));
            }
            let count = floor_tol((hi - lo) / step).max(0) as usize;
            // rounding keeps decimal grids such as 0.1:0.9:0.1 free of representation noise
            Ok((0..=count).map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12).collect())
        }
        [list] => list.split(',').map(|v| real(v.trim())).collect(),
        _ => Err(CliError::usage(format!("grid {text:?} must look like b=lo:hi:step"))),
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub family: PofFamily,
    pub n: usize,
    pub b: f64,
    pub big_b: f64,
    pub objective: Objective,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub family: String,
    pub n: usize,
    pub b: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub objective: String,
    pub max_b: f64,
    #[serde(rename = "max_B")]
    pub max_big_b: f64,
    pub ratio: Option<f64>,
    pub bound: Option<f64>,
    pub tight: bool,
}

/// The instance of a family at a cell, with the ratio its construction guarantees for the
/// cell's objective (exact for `additive-lb`, a lower bound otherwise).
pub fn build(cell: &Cell) -> Result<(Instance, Option<f64>), ContractError> {
    let (b, big_b) = (cell.b, cell.big_b);
    let obj = &cell.objective;
    let reward_like = matches!(obj, Objective::Reward | Objective::Welfare);
    Ok(match cell.family {
        PofFamily::AdditiveLb => {
            let inst = gen_additive_lb(cell.n, b, big_b)?;
            (inst, reward_like.then(|| additive_lb_size(cell.n, b, big_b) as f64))
        }
        PofFamily::XosSep => (gen_xos_separation(b, big_b)?, (*obj == Objective::Reward).then_some(2.5)),
        PofFamily::SubaddLb => {
            let inst = gen_subadditive_lb(cell.n, b, big_b)?;
            let root = (cell.n as f64).sqrt();
            (inst, (*obj == Objective::Reward).then(|| (2.0 / root + 0.5) / (2.0 / root)))
        }
        PofFamily::ProfitTwo => {
            let eps = cell.epsilon.unwrap_or_else(|| default_epsilon(big_b - b));
            let inst = gen_profit_lb_two(b, big_b, eps)?;
            (inst, (*obj == Objective::Profit).then(|| (1.0 - eps / 2.0) * (2.0 - b)))
        }
        PofFamily::ProfitK => {
            let k = cell.k.unwrap_or_else(|| default_k(b, big_b, cell.n));
            let eps = cell.epsilon.unwrap_or_else(|| default_epsilon(2.0 * big_b / k as f64 - b));
            let inst = gen_profit_lb_k(b, big_b, k, eps)?;
            let kf = k as f64;
            (inst, (*obj == Objective::Profit).then(|| (2.0 - kf * (b + eps)) * kf / (2.0 - b - eps)))
        }
    })
}

/// `k = min(⌊1/b + 1/2⌋, ⌈2B/b⌉ − 1, n)`, the team size of the profit lower bound.
pub fn default_k(b: f64, big_b: f64, n: usize) -> usize {
    let by_b = floor_tol(1.0 / b + 0.5).max(1) as usize;
    let by_budget = (budgeted_contracts::real::ceil_tol(2.0 * big_b / b) - 1).max(1) as usize;
    by_b.min(by_budget).min(n.max(1))
}

/// Evaluates one cell; `Ok(None)` when the family is undefined there.
pub fn evaluate(cell: &Cell) -> CliResult<Option<(Row, Instance)>> {
    let (inst, bound) = match build(cell) {
        Ok(built) => built,
        Err(ContractError::Input(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let report = match pof(&inst, &PofQuery::new(cell.b, cell.big_b, cell.objective.clone())) {
        Ok(r) => r,
        Err(ContractError::Precondition(_) | ContractError::UndefinedRatio | ContractError::Input(_)) => {
            return Ok(None)
        }
        Err(e) => return Err(e.into()),
    };
    let row = Row {
        family: cell.family.name().to_string(),
        n: inst.n(),
        b: cell.b,
        big_b: cell.big_b,
        objective: cell.objective.to_string(),
        max_b: report.max_at_b,
        max_big_b: report.max_at_big_b,
        ratio: report.ratio,
        bound,
        tight: matches!((report.ratio, bound), (Some(r), Some(t)) if (r - t).abs() <= TOL),
    };
    Ok(Some((row, inst)))
}

/// Evaluates all cells, keeping their order.
pub fn run(cells: &[Cell], execution: Execution) -> CliResult<Vec<(Row, Instance)>> {
    let results = execution.map(cells, evaluate);
    let mut rows = Vec::with_capacity(cells.len());
    for r in results {
        if let Some(row) = r? {
            rows.push(row);
        }
    }
    Ok(rows)
}
