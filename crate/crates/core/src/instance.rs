//! Instances `⟨A, f, c⟩`, incentive payments, profit, contracts and equilibria.

use serde::{Deserialize, Serialize};

use crate::error::{ContractError, Result};
use crate::real::{de_real_vec, ExtendedReal, TOL};
use crate::set_function::SetFunction;
use crate::subset::{Subset, MAX_AGENTS};

/// Largest `n` for exhaustive enumeration (equilibria, brute-force optima).
pub const ENUMERATION_CAP: usize = 20;

/// Heavy/light threshold on the singleton payment `c_i / f({i})`.
pub const LIGHT_THRESHOLD: f64 = 0.5;

/// A multi-agent binary-action instance: per-agent effort costs and a reward function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    costs: Vec<f64>,
    reward: SetFunction,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    n: usize,
    #[serde(deserialize_with = "de_real_vec")]
    costs: Vec<f64>,
    reward: SetFunction,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = ContractError;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        if r.costs.len() != r.n {
            return Err(ContractError::input(format!("n = {} but {} costs given", r.n, r.costs.len())));
        }
        Instance::new(r.costs, r.reward)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(inst: Instance) -> Self {
        InstanceRepr { n: inst.n(), costs: inst.costs, reward: inst.reward }
    }
}

impl Instance {
    /// Validates costs (finite, non-negative) and the reward (shape matches, `f(∅) ≥ 0`,
    /// values within `[0, 1]`).
    pub fn new(costs: Vec<f64>, reward: SetFunction) -> Result<Self> {
        reward.validate()?;
        let n = costs.len();
        if n > MAX_AGENTS {
            return Err(ContractError::TooLarge { n, cap: MAX_AGENTS });
        }
        if reward.n() != n {
            return Err(ContractError::input(format!("reward is over {} agents but {n} costs given", reward.n())));
        }
        if let Some(i) = costs.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(ContractError::input(format!("cost of agent {i} must be finite and non-negative")));
        }
        if reward.eval(Subset::EMPTY) < -TOL {
            return Err(ContractError::input("reward of the empty set is negative"));
        }
        if reward.lower_value() < -TOL || reward.upper_value() > 1.0 + TOL {
            return Err(ContractError::input("reward values must lie in [0, 1]"));
        }
        Ok(Instance { costs, reward })
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn reward(&self) -> &SetFunction {
        &self.reward
    }

    pub fn all_agents(&self) -> Subset {
        Subset::full(self.n())
    }

    pub(crate) fn check_subset(&self, s: Subset) -> Result<()> {
        if s.span() > self.n() {
            return Err(ContractError::AgentOutOfRange { index: s.span() - 1, n: self.n() });
        }
        Ok(())
    }

    /// `f(S)`.
    pub fn value(&self, s: Subset) -> f64 {
        self.reward.eval(s)
    }

    /// `f_S(i)`; requires `i ∈ S`.
    pub fn marginal(&self, s: Subset, i: usize) -> Result<f64> {
        self.reward.marginal(s, i)
    }

    /// Σ_{i∈S} c_i.
    pub fn cost(&self, s: Subset) -> f64 {
        s.iter().map(|i| self.costs[i]).sum()
    }

    /// `c_i / f_S(i)` with `0/0 = 0` and `x/0 = ∞`.
    pub fn incentive(&self, i: usize, marginal: f64) -> ExtendedReal {
        ratio(self.costs[i], marginal)
    }

    /// Per-agent incentive terms `c_i / f_S(i)` in ascending agent order.
    pub fn incentives(&self, s: Subset) -> Vec<(usize, ExtendedReal)> {
        self.reward.marginals(s).into_iter().map(|(i, m)| (i, self.incentive(i, m))).collect()
    }

    /// Minimum total payment incentivizing exactly `S`: `p(S) = Σ_{i∈S} c_i / f_S(i)`.
    pub fn payment(&self, s: Subset) -> ExtendedReal {
        if s.is_empty() {
            return ExtendedReal::ZERO;
        }
        let mut total = 0.0;
        for (i, m) in self.reward.marginals(s) {
            match self.incentive(i, m) {
                ExtendedReal::Finite(x) => total += x,
                ExtendedReal::Infinite => return ExtendedReal::Infinite,
            }
        }
        ExtendedReal::Finite(total)
    }

    /// `g(S) = (1 − p(S)) · f(S)`; `−∞` when the payment is infinite and `f(S) > 0`.
    pub fn profit(&self, s: Subset) -> f64 {
        let f = self.value(s);
        if f == 0.0 {
            return 0.0;
        }
        match self.payment(s) {
            ExtendedReal::Finite(p) => (1.0 - p) * f,
            ExtendedReal::Infinite => f64::NEG_INFINITY,
        }
    }

    /// `f(S) − Σ_{i∈S} c_i`.
    pub fn welfare(&self, s: Subset) -> f64 {
        self.value(s) - self.cost(s)
    }

    /// Budget-feasibility `p(S) ≤ budget` (tolerance [`TOL`]).
    pub fn is_feasible(&self, s: Subset, budget: f64) -> bool {
        self.payment(s).within(budget)
    }

    /// The cheapest contract incentivizing `S`: `α_i = c_i / f_S(i)` on `S`, zero elsewhere.
    pub fn optimal_contract_for(&self, s: Subset) -> Result<Contract> {
        self.check_subset(s)?;
        let mut alpha = vec![0.0; self.n()];
        for (i, term) in self.incentives(s) {
            match term {
                ExtendedReal::Finite(a) => alpha[i] = a,
                ExtendedReal::Infinite => return Err(ContractError::InfeasibleSet(s.to_string())),
            }
        }
        Contract::new(alpha)
    }

    /// Whether `S` is a pure Nash equilibrium of the effort game under `contract`.
    pub fn is_nash_equilibrium(&self, contract: &Contract, s: Subset) -> bool {
        assert_eq!(contract.alpha.len(), self.n(), "contract length must equal n");
        let fs = self.value(s);
        (0..self.n()).all(|i| {
            let a = contract.alpha[i];
            let c = self.costs[i];
            if s.contains(i) {
                a * fs - c >= a * self.value(s.without(i)) - TOL
            } else {
                a * fs >= a * self.value(s.with(i)) - c - TOL
            }
        })
    }

    /// Every equilibrium set under `contract`, in ascending bitmask order.
    pub fn enumerate_equilibria(&self, contract: &Contract) -> Result<Vec<Subset>> {
        self.enumerate_equilibria_capped(contract, ENUMERATION_CAP)
    }

    pub fn enumerate_equilibria_capped(&self, contract: &Contract, cap: usize) -> Result<Vec<Subset>> {
        let n = self.n();
        if n > cap {
            return Err(ContractError::TooLarge { n, cap });
        }
        if contract.alpha.len() != n {
            return Err(ContractError::input("contract length must equal n"));
        }
        Ok((0..1u64 << n).map(Subset::from_bits).filter(|&s| self.is_nash_equilibrium(contract, s)).collect())
    }

    /// Agents with `c_i / f({i}) ≤ 1/2`.
    pub fn light_agents(&self) -> Subset {
        (0..self.n())
            .filter(|&i| match self.payment(Subset::singleton(i)) {
                ExtendedReal::Finite(p) => p <= LIGHT_THRESHOLD + TOL,
                ExtendedReal::Infinite => false,
            })
            .collect()
    }

    /// The sub-instance on `agents` (re-indexed in ascending order) with costs multiplied by
    /// `cost_scale`.
    pub fn restrict(&self, agents: Subset, cost_scale: f64) -> Result<Instance> {
        self.check_subset(agents)?;
        let members = agents.to_vec();
        let costs = members.iter().map(|&i| self.costs[i] * cost_scale).collect();
        Instance::new(costs, self.reward.restrict(&members)?)
    }

    /// Copy with the reward materialized as a table.
    pub fn with_table_reward(&self) -> Result<Instance> {
        Instance::new(self.costs.clone(), self.reward.to_table()?)
    }
}

fn ratio(cost: f64, marginal: f64) -> ExtendedReal {
    if cost == 0.0 {
        ExtendedReal::ZERO
    } else if marginal <= 0.0 {
        ExtendedReal::Infinite
    } else {
        ExtendedReal::Finite(cost / marginal)
    }
}

/// Success-contingent payments `α_i ≥ 0`, one per agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contract {
    #[serde(deserialize_with = "de_real_vec")]
    alpha: Vec<f64>,
}

impl Contract {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(ContractError::input("contract payments must be finite and non-negative"));
        }
        Ok(Contract { alpha })
    }

    pub fn zero(n: usize) -> Self {
        Contract { alpha: vec![0.0; n] }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Σ α_i; the contract is budget-feasible at `B` when this is at most `B`.
    pub fn total(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// Principal's expected utility `(1 − Σ α_i) · f(S)` when `S` exerts effort.
    pub fn principal_utility(&self, inst: &Instance, s: Subset) -> f64 {
        (1.0 - self.total()) * inst.value(s)
    }
}
