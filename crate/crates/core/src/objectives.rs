//! Objectives sandwiched between profit and reward, and checks of the conditions that
//! make them reducible to one another.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ContractError, Result};
use crate::instance::{Instance, ENUMERATION_CAP};
use crate::real::{de_real_vec, TOL};
use crate::solvers::brute_force_max;
use crate::subset::Subset;

/// An objective `φ(S)` evaluated per instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObjectiveRepr", into = "ObjectiveRepr")]
pub enum Objective {
    Reward,
    Profit,
    Welfare,
    /// `Σ_j λ_j · φ_j(S)` with `λ_j > 0` summing to one.
    Convex {
        weights: Vec<f64>,
        components: Vec<Objective>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ObjectiveRepr {
    Reward,
    Profit,
    Welfare,
    Convex {
        #[serde(deserialize_with = "de_real_vec")]
        weights: Vec<f64>,
        components: Vec<Objective>,
    },
}

impl TryFrom<ObjectiveRepr> for Objective {
    type Error = ContractError;

    fn try_from(r: ObjectiveRepr) -> Result<Self> {
        Ok(match r {
            ObjectiveRepr::Reward => Objective::Reward,
            ObjectiveRepr::Profit => Objective::Profit,
            ObjectiveRepr::Welfare => Objective::Welfare,
            ObjectiveRepr::Convex { weights, components } => Objective::convex(weights, components)?,
        })
    }
}

impl From<Objective> for ObjectiveRepr {
    fn from(o: Objective) -> Self {
        match o {
            Objective::Reward => ObjectiveRepr::Reward,
            Objective::Profit => ObjectiveRepr::Profit,
            Objective::Welfare => ObjectiveRepr::Welfare,
            Objective::Convex { weights, components } => ObjectiveRepr::Convex { weights, components },
        }
    }
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

impl Objective {
    pub fn convex(weights: Vec<f64>, components: Vec<Objective>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(ContractError::input("convex objective needs one weight per component"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(ContractError::input("convex weights must be strictly positive"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(ContractError::input(format!("convex weights sum to {sum}, not 1")));
        }
        Ok(Objective::Convex { weights, components })
    }

    /// `φ(S)` on `inst`.
    pub fn evaluate(&self, inst: &Instance, s: Subset) -> f64 {
        match self {
            Objective::Reward => inst.value(s),
            Objective::Profit => inst.profit(s),
            Objective::Welfare => inst.welfare(s),
            Objective::Convex { weights, components } => {
                weights.iter().zip(components).map(|(w, o)| w * o.evaluate(inst, s)).sum()
            }
        }
    }

    /// Whether `φ` is additive whenever `f` is (reward and welfare).
    pub fn is_additive_when_reward_is(&self) -> bool {
        match self {
            Objective::Reward | Objective::Welfare => true,
            Objective::Profit => false,
            Objective::Convex { components, .. } => components.iter().all(Objective::is_additive_when_reward_is),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Reward => write!(f, "reward"),
            Objective::Profit => write!(f, "profit"),
            Objective::Welfare => write!(f, "welfare"),
            Objective::Convex { weights, components } => {
                write!(f, "convex(")?;
                for (k, (w, o)) in weights.iter().zip(components).enumerate() {
                    if k > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{w}*{o}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for Objective {
    type Err = ContractError;

    /// Accepts `reward`, `profit`, `welfare` or an objective JSON document.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "reward" => Ok(Objective::Reward),
            "profit" => Ok(Objective::Profit),
            "welfare" => Ok(Objective::Welfare),
            t if t.starts_with('{') => {
                serde_json::from_str(t).map_err(|e| ContractError::input(format!("objective JSON: {e}")))
            }
            t => Err(ContractError::input(format!("unknown objective {t:?}"))),
        }
    }
}

/// The first failing condition found by [`best_violation`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BestViolation {
    /// `g(S) ≤ φ(S) ≤ f(S)` fails.
    Sandwich { set: Subset, profit: f64, value: f64, reward: f64 },
    /// `φ(S) ≤ f(S∖{i}) + φ({i})` fails.
    Singleton { set: Subset, agent: usize, value: f64, bound: f64 },
}

/// Exhaustively searches for a set violating either defining condition.
pub fn best_violation(obj: &Objective, inst: &Instance) -> Result<Option<BestViolation>> {
    let n = inst.n();
    if n > ENUMERATION_CAP {
        return Err(ContractError::TooLarge { n, cap: ENUMERATION_CAP });
    }
    let singles: Vec<f64> = (0..n).map(|i| obj.evaluate(inst, Subset::singleton(i))).collect();
    for s in (0..1u64 << n).map(Subset::from_bits) {
        let value = obj.evaluate(inst, s);
        let profit = inst.profit(s);
        let reward = inst.value(s);
        if profit > value + TOL || value > reward + TOL {
            return Ok(Some(BestViolation::Sandwich { set: s, profit, value, reward }));
        }
        for i in s.iter() {
            let bound = inst.value(s.without(i)) + singles[i];
            if value > bound + TOL {
                return Ok(Some(BestViolation::Singleton { set: s, agent: i, value, bound }));
            }
        }
    }
    Ok(None)
}

/// Whether `obj` satisfies both defining conditions on every subset of `inst`.
pub fn check_best_conditions(obj: &Objective, inst: &Instance) -> Result<bool> {
    Ok(best_violation(obj, inst)?.is_none())
}

/// Both sides of the bound `Max-φ(B) ≤ κ·Max-Reward-Light(B) + max_i φ({i})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KeyPropertyGap {
    pub lhs: f64,
    pub rhs: f64,
    /// κ: 1 for submodular rewards, 2 otherwise.
    pub coefficient: f64,
    pub max_reward_light: f64,
    pub best_singleton: f64,
}

impl KeyPropertyGap {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + TOL
    }
}

/// Computes both sides by brute force. The coefficient is 1 when the reward is verified
/// submodular and 2 otherwise.
pub fn key_property_gap(obj: &Objective, inst: &Instance, budget: f64) -> Result<KeyPropertyGap> {
    if !(budget > 0.0 && budget <= 1.0) {
        return Err(ContractError::input(format!("budget {budget} outside (0, 1]")));
    }
    let lhs = brute_force_max(obj, inst, budget, false)?.value;
    let max_reward_light = brute_force_max(&Objective::Reward, inst, budget, true)?.value;
    let best_singleton = (0..inst.n()).map(|i| obj.evaluate(inst, Subset::singleton(i))).fold(0.0, f64::max);
    let coefficient = if inst.reward().classify()?.is_submodular { 1.0 } else { 2.0 };
    Ok(KeyPropertyGap {
        lhs,
        rhs: coefficient * max_reward_light + best_singleton,
        coefficient,
        max_reward_light,
        best_singleton,
    })
}
