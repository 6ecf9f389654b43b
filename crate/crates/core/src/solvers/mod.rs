//! Exact and approximate solvers for `Max-φ(B)`.

mod brute;
mod fptas;

pub use brute::{brute_force_max, brute_force_max_with, BruteForceOptions};
pub use fptas::{
    fptas_additive_profit, fptas_additive_profit_with_stats, knapsack_fptas, FptasParams, FptasStats, RoundedTable,
};

use serde::{Deserialize, Serialize};

use crate::real::ExtendedReal;
use crate::subset::Subset;

/// An optimum (or approximate optimum) of a budgeted maximization problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub optimum: Subset,
    pub value: f64,
    pub payment: ExtendedReal,
    /// Subsets (brute force) or table cells (FPTAS) examined.
    pub enumerated: u64,
}
