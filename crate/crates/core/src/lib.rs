//! Budgeted multi-agent contract design with binary actions.
//!
//! A principal pays each agent of a team `S` a share of the project's success so that
//! exerting effort is an equilibrium; the cheapest such contract costs
//! `p(S) = Σ_{i∈S} c_i / f_S(i)`. This crate computes payments and equilibria, shrinks
//! teams to fit a budget ([`downsizing`]), reduces between budgeted objectives
//! ([`reductions`]), solves instances exactly or by an FPTAS ([`solvers`]), and measures the
//! price of frugality on the instance families where it is extreme ([`frugality`]).

pub mod corpus;
pub mod downsizing;
pub mod error;
pub mod frugality;
pub mod instance;
pub mod objectives;
pub mod par;
pub mod real;
pub mod reductions;
pub mod set_function;
pub mod solvers;
pub mod subset;

pub use downsizing::{downsize_submodular, downsize_xos, recover_marginals_xos, DownsizeParams, DownsizeResult};
pub use error::{ContractError, Result};
pub use frugality::{pof, pof_bound, BoundKind, PofQuery, PofReport};
pub use instance::{Contract, Instance};
pub use objectives::{check_best_conditions, key_property_gap, Objective};
pub use par::Execution;
pub use real::{ExtendedReal, TOL};
pub use reductions::{
    equivalence_pipeline, reduce_from_mrl, reduce_to_mrl, scale_instance, Path, ReductionOutcome, ScaledInstance,
};
pub use set_function::{Classification, SetFunction};
pub use solvers::{brute_force_max, fptas_additive_profit, knapsack_fptas, SolveResult};
pub use subset::Subset;
