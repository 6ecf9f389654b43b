//! Reductions between `Max-φ(B)` for BEST objectives and `Max-Reward-Light(B)`.
//!
//! [`reduce_to_mrl`] turns an approximate light-agent reward optimum into an approximate
//! `Max-φ(B)` solution by downsizing and comparing against singletons.
//! [`reduce_from_mrl`] goes the other way by solving `Max-φ(B')` on the light agents with
//! costs rescaled by `B'/B`. Composing both gives [`equivalence_pipeline`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::downsizing::{downsize_submodular, downsize_xos, DownsizeParams};
use crate::error::{ContractError, Result};
use crate::instance::Instance;
use crate::objectives::Objective;
use crate::real::ExtendedReal;
use crate::solvers::brute_force_max;
use crate::subset::Subset;

/// Which reward class the reduction relies on; fixes the downsizing step and constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    Xos,
    Submodular,
}

impl Path {
    /// Downsizing parameter `M` used when reducing to light rewards.
    pub fn downsize_m(self) -> usize {
        match self {
            Path::Xos => 5,
            Path::Submodular => 3,
        }
    }

    /// Approximation factor of [`reduce_to_mrl`] given a `γ`-approximate light optimum.
    pub fn to_mrl_factor(self, gamma: f64) -> f64 {
        match self {
            Path::Xos => 40.0 * gamma + 1.0,
            Path::Submodular => 6.0 * gamma + 1.0,
        }
    }

    /// Approximation factor of [`reduce_from_mrl`] given a `γ`-approximate inner solver.
    pub fn from_mrl_factor(self, gamma: f64) -> f64 {
        match self {
            Path::Xos => 20.0 * gamma,
            Path::Submodular => 6.0 * gamma,
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Path::Xos => "xos",
            Path::Submodular => "submodular",
        })
    }
}

impl std::str::FromStr for Path {
    type Err = ContractError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xos" => Ok(Path::Xos),
            "submodular" => Ok(Path::Submodular),
            other => Err(ContractError::input(format!("unknown path `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionOutcome {
    pub candidate: Subset,
    /// `φ(candidate)` for [`reduce_to_mrl`], `f(candidate)` for [`reduce_from_mrl`].
    pub candidate_value: f64,
    pub guarantee_factor: f64,
    pub budget_used: ExtendedReal,
    pub path: Path,
}

/// The light agents of an instance with costs scaled by `B'/B`, re-indexed in ascending
/// order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledInstance {
    pub instance: Instance,
    /// Original index of each agent of `instance`.
    pub agents: Vec<usize>,
    pub scale: f64,
}

impl ScaledInstance {
    /// Maps a team of the scaled instance back to original indices.
    pub fn lift(&self, s: Subset) -> Result<Subset> {
        s.iter()
            .map(|i| {
                self.agents.get(i).copied().ok_or(ContractError::AgentOutOfRange { index: i, n: self.agents.len() })
            })
            .collect()
    }
}

fn check_budget(name: &str, b: f64) -> Result<()> {
    if b > 0.0 && b <= 1.0 {
        Ok(())
    } else {
        Err(ContractError::input(format!("{name} = {b} must lie in (0, 1]")))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 1.0 {
        Ok(())
    } else {
        Err(ContractError::input(format!("approximation factor γ = {gamma} must be at least 1")))
    }
}

/// Restricts to the light agents and multiplies their costs by `B'/B`.
pub fn scale_instance(inst: &Instance, budget: f64, budget_prime: f64) -> Result<ScaledInstance> {
    check_budget("B", budget)?;
    check_budget("B'", budget_prime)?;
    let light = inst.light_agents();
    let scale = budget_prime / budget;
    Ok(ScaledInstance { instance: inst.restrict(light, scale)?, agents: light.to_vec(), scale })
}

/// The best budget-feasible member of `pool` under `score`; earlier members win ties.
fn best_of(
    inst: &Instance,
    budget: f64,
    pool: impl IntoIterator<Item = Subset>,
    score: impl Fn(Subset) -> f64,
) -> (Subset, f64) {
    pool.into_iter()
        .filter(|&s| inst.is_feasible(s, budget))
        .map(|s| (s, score(s)))
        .fold((Subset::EMPTY, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

fn singletons(inst: &Instance, within: Subset) -> impl Iterator<Item = Subset> + '_ {
    (0..inst.n()).filter(move |&i| within.contains(i)).map(Subset::singleton)
}

/// Turns a `γ`-approximate `Max-Reward-Light(B)` team into a `Max-φ(B)` candidate.
///
/// The downsized team, every budget-feasible singleton and `∅` form the pool; the member
/// with the largest `φ` is returned. The guarantee is `(40γ+1)` on the XOS path and
/// `(6γ+1)` on the submodular path.
pub fn reduce_to_mrl(
    inst: &Instance,
    budget: f64,
    obj: &Objective,
    s_mrl: Subset,
    gamma: f64,
    path: Path,
) -> Result<ReductionOutcome> {
    check_budget("B", budget)?;
    check_gamma(gamma)?;
    inst.check_subset(s_mrl)?;
    if !inst.is_feasible(s_mrl, budget) {
        return Err(ContractError::precondition(format!("light team {s_mrl} is not feasible at budget {budget}")));
    }
    if !s_mrl.is_subset_of(inst.light_agents()) {
        return Err(ContractError::precondition(format!("team {s_mrl} contains heavy agents")));
    }
    let downsized = if s_mrl.is_empty() {
        Subset::EMPTY
    } else {
        match path {
            Path::Xos => downsize_xos(inst, s_mrl, path.downsize_m())?.subset,
            Path::Submodular => downsize_submodular(inst, s_mrl, &DownsizeParams::new(path.downsize_m()))?.subset,
        }
    };
    let pool =
        std::iter::once(downsized).chain(singletons(inst, inst.all_agents())).chain(std::iter::once(Subset::EMPTY));
    let (candidate, value) = best_of(inst, budget, pool, |s| obj.evaluate(inst, s));
    Ok(ReductionOutcome {
        candidate,
        candidate_value: value,
        guarantee_factor: path.to_mrl_factor(gamma),
        budget_used: inst.payment(candidate),
        path,
    })
}

/// Signature of an inner `Max-φ(B')` solver: `(instance, budget, objective) -> team`.
pub trait InnerSolver: FnMut(&Instance, f64, &Objective) -> Result<Subset> {}

impl<F: FnMut(&Instance, f64, &Objective) -> Result<Subset>> InnerSolver for F {}

/// Exact inner solver by enumeration (`γ = 1`).
pub fn exact_solver(inst: &Instance, budget: f64, obj: &Objective) -> Result<Subset> {
    Ok(brute_force_max(obj, inst, budget, false)?.optimum)
}

/// Turns a `γ`-approximate `Max-φ(B')` solver into a `Max-Reward-Light(B)` candidate.
///
/// The solver runs on [`scale_instance`]`(B, B')`; its output (mapped back) and every light
/// singleton feasible at `B` are ranked by reward. The guarantee is `20γ` on the XOS path and
/// `6γ` on the submodular path.
pub fn reduce_from_mrl(
    inst: &Instance,
    budget: f64,
    budget_prime: f64,
    obj: &Objective,
    mut solver: impl InnerSolver,
    gamma: f64,
    path: Path,
) -> Result<ReductionOutcome> {
    check_gamma(gamma)?;
    let scaled = scale_instance(inst, budget, budget_prime)?;
    let light = inst.light_agents();
    let lifted = if scaled.agents.is_empty() {
        Subset::EMPTY
    } else {
        let inner = solver(&scaled.instance, budget_prime, obj)?;
        scaled.instance.check_subset(inner)?;
        let paid = scaled.instance.payment(inner);
        if !paid.within(budget_prime) {
            return Err(ContractError::ContractViolation(format!(
                "inner solver returned {inner} with payment {paid} above budget {budget_prime}"
            )));
        }
        scaled.lift(inner)?
    };
    let pool = std::iter::once(lifted).chain(singletons(inst, light)).chain(std::iter::once(Subset::EMPTY));
    let (candidate, value) = best_of(inst, budget, pool, |s| inst.value(s));
    Ok(ReductionOutcome {
        candidate,
        candidate_value: value,
        guarantee_factor: path.from_mrl_factor(gamma),
        budget_used: inst.payment(candidate),
        path,
    })
}

/// Solves `Max-φ_from(B_from)` through a solver for `Max-φ_to(B_to)`.
///
/// The reported factor is the product of the two stage constants, which bounds the composed
/// guarantee `40·(20γ)+1` on the XOS path.
pub fn equivalence_pipeline(
    inst: &Instance,
    (obj_from, budget_from): (&Objective, f64),
    (obj_to, budget_to): (&Objective, f64),
    solver: impl InnerSolver,
    gamma: f64,
    path: Path,
) -> Result<ReductionOutcome> {
    let light = reduce_from_mrl(inst, budget_from, budget_to, obj_to, solver, gamma, path)?;
    let mut out = reduce_to_mrl(inst, budget_from, obj_from, light.candidate, light.guarantee_factor, path)?;
    out.guarantee_factor = path.to_mrl_factor(1.0) * light.guarantee_factor;
    Ok(out)
}
