//! Downsizing: shrink a team so its payment drops to a target fraction while keeping a
//! guaranteed share of a subadditive objective.
//!
//! [`downsize_submodular`] splits the team into heavy agents `Z` (incentive above
//! `p(S)/M`) and bags of light agents each carrying about `p(S)/M` of the payment; either a
//! heavy singleton, a bag, or the leftover agents keep `ψ(S)/(M−1)`. Bags and leftovers
//! pay at most `(2/M)·p(S)` when `f` is submodular.
//!
//! [`recover_marginals_xos`] removes agents whose marginal in the smaller team fell below
//! half their marginal in the original one; for XOS `f` this keeps half the reward.
//! [`downsize_xos`] chains the two, giving `p(U) ≤ (4/M)·p(S)` or `|U| = 1`, and
//! `f(U) ≥ f(S)/(2M−2)`.

use serde::{Deserialize, Serialize};

use crate::error::{ContractError, Result};
use crate::instance::Instance;
use crate::objectives::Objective;
use crate::real::{ExtendedReal, TOL};
use crate::set_function::{SetFunction, CLASSIFY_CAP};
use crate::subset::Subset;

/// Slack on the algorithm's own "keeps a large enough share" tests.
const SHARE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DownsizeParams {
    /// The target parameter `M ≥ 3`.
    pub m: usize,
    /// The subadditive objective `ψ` whose share is preserved.
    pub psi: Objective,
    /// Verify submodularity of `f` and subadditivity of `ψ` exhaustively before running.
    #[serde(default)]
    pub check_preconditions: bool,
}

impl DownsizeParams {
    pub fn new(m: usize) -> Self {
        DownsizeParams { m, psi: Objective::Reward, check_preconditions: false }
    }

    #[must_use]
    pub fn with_psi(mut self, psi: Objective) -> Self {
        self.psi = psi;
        self
    }

    #[must_use]
    pub fn checked(mut self) -> Self {
        self.check_preconditions = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DownsizeResult {
    pub subset: Subset,
    pub payment_before: ExtendedReal,
    pub payment_after: ExtendedReal,
    pub objective_before: f64,
    pub objective_after: f64,
    /// The team was cut down to one heavy agent.
    pub singleton_exit: bool,
}

fn check_team(inst: &Instance, s: Subset, m: usize) -> Result<f64> {
    inst.check_subset(s)?;
    if m < 3 {
        return Err(ContractError::input(format!("M = {m} but downsizing needs M ≥ 3")));
    }
    if s.is_empty() {
        return Err(ContractError::input("cannot downsize the empty team"));
    }
    inst.payment(s).finite().ok_or_else(|| ContractError::InfeasibleSet(s.to_string()))
}

fn check_psi_subadditive(psi: &Objective, inst: &Instance) -> Result<()> {
    let n = inst.n();
    if n > CLASSIFY_CAP {
        return Ok(());
    }
    let values: Vec<f64> = (0..1u64 << n).map(|m| psi.evaluate(inst, Subset::from_bits(m))).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ContractError::precondition(format!("{psi} takes infinite values on this instance")));
    }
    let table = SetFunction::Table { values };
    if !table.classify()?.is_subadditive {
        return Err(ContractError::precondition(format!("{psi} is not subadditive on this instance")));
    }
    Ok(())
}

/// Shrinks `s` to `T ⊆ s` with `ψ(T) ≥ ψ(s)/(M−1)` and (`p(T) ≤ (2/M)·p(s)` or `|T| = 1`).
///
/// Agents are taken in ascending index order when filling bags.
pub fn downsize_submodular(inst: &Instance, s: Subset, params: &DownsizeParams) -> Result<DownsizeResult> {
    let m = params.m;
    let payment = check_team(inst, s, m)?;
    if params.check_preconditions {
        if inst.n() <= CLASSIFY_CAP && !inst.reward().classify()?.is_submodular {
            return Err(ContractError::precondition("reward is not submodular"));
        }
        check_psi_subadditive(&params.psi, inst)?;
    }
    let psi = |t: Subset| params.psi.evaluate(inst, t);
    let psi_s = psi(s);
    let share = psi_s / (m - 1) as f64 - SHARE_SLACK;
    let threshold = payment / m as f64;

    let terms: Vec<(usize, f64)> = inst.incentives(s).into_iter().map(|(i, t)| (i, t.to_f64())).collect();
    let heavy: Vec<usize> = terms.iter().filter(|t| t.1 > threshold).map(|t| t.0).collect();

    let finish = |t: Subset, singleton_exit: bool| DownsizeResult {
        subset: t,
        payment_before: ExtendedReal::Finite(payment),
        payment_after: inst.payment(t),
        objective_before: psi_s,
        objective_after: psi(t),
        singleton_exit,
    };

    if let Some(&i) = heavy.iter().find(|&&i| psi(Subset::singleton(i)) >= share) {
        return Ok(finish(Subset::singleton(i), true));
    }

    // With M−1 heavy agents no bag is formed and the leftovers alone may fall short of
    // the share. Adding the heavy agent with the smallest incentive repairs this: the
    // other heavy singletons failed the share test, so by subadditivity this part holds
    // it, and its payment stays below p/M + (p − p/M)/(M−1) = 2p/M.
    if heavy.len() + 1 == m {
        let cheapest = terms
            .iter()
            .filter(|t| t.1 > threshold)
            .fold((usize::MAX, f64::INFINITY), |best, &t| if t.1 < best.1 { t } else { best })
            .0;
        let light: Subset = terms.iter().filter(|t| t.1 <= threshold).map(|t| t.0).collect();
        return Ok(finish(light.with(cheapest), false));
    }

    let mut rest = terms.iter().filter(|t| t.1 <= threshold);
    let mut remainder: Subset = terms.iter().filter(|t| t.1 <= threshold).map(|t| t.0).collect();
    for _ in 0..m.saturating_sub(heavy.len() + 2) {
        let mut bag = Subset::EMPTY;
        let mut load = 0.0;
        while load <= threshold {
            let Some(&(i, term)) = rest.next() else { break };
            remainder = remainder.without(i);
            bag = bag.with(i);
            load += term;
        }
        if psi(bag) >= share {
            return Ok(finish(bag, false));
        }
    }
    Ok(finish(remainder, false))
}

/// Shrinks `t ⊆ s` to `U ⊆ t` with `f(U) ≥ f(t)/2` and `f_U(i) ≥ f_s(i)/2` for every
/// `i ∈ U`, for XOS `f`.
///
/// Repeatedly drops the agent minimizing `f_U(i)/f_s(i)` (ratio `+∞` when `f_s(i) = 0`,
/// smallest index on ties) while some agent violates the marginal condition.
pub fn recover_marginals_xos(inst: &Instance, t: Subset, s: Subset) -> Result<Subset> {
    inst.check_subset(s)?;
    if !t.is_subset_of(s) {
        return Err(ContractError::input(format!("{t} is not a subset of {s}")));
    }
    let f = inst.reward();
    let base: Vec<f64> = {
        let mut v = vec![0.0; inst.n()];
        for (i, m) in f.marginals(s) {
            v[i] = m;
        }
        v
    };
    let mut u = t;
    loop {
        let current = f.marginals(u);
        let violated = current.iter().any(|&(i, m)| m < base[i] / 2.0 - SHARE_SLACK);
        if !violated {
            return Ok(u);
        }
        let ratio = |&(i, m): &(usize, f64)| {
            if base[i] > 0.0 {
                m / base[i]
            } else {
                f64::INFINITY
            }
        };
        let (drop, _) = current.iter().map(|c| (c.0, ratio(c))).fold((usize::MAX, f64::INFINITY), |best, c| {
            if c.1 < best.1 {
                c
            } else {
                best
            }
        });
        debug_assert!(drop != usize::MAX);
        u = u.without(drop);
    }
}

/// Downsizing for XOS rewards: `p(U) ≤ (4/M)·p(s)` or `|U| = 1`, and `f(U) ≥ f(s)/(2M−2)`.
pub fn downsize_xos(inst: &Instance, s: Subset, m: usize) -> Result<DownsizeResult> {
    let first = downsize_submodular(inst, s, &DownsizeParams::new(m))?;
    let u = recover_marginals_xos(inst, first.subset, s)?;
    Ok(DownsizeResult {
        subset: u,
        payment_before: first.payment_before,
        payment_after: inst.payment(u),
        objective_before: inst.value(s),
        objective_after: inst.value(u),
        singleton_exit: first.singleton_exit && u.len() == 1,
    })
}

impl DownsizeResult {
    /// Checks the submodular guarantee for parameter `m` (tolerance [`TOL`]).
    pub fn meets_submodular_guarantee(&self, m: usize) -> bool {
        let share = self.objective_after >= self.objective_before / (m - 1) as f64 - TOL;
        let pay = self.subset.len() == 1 || self.payment_after.within(2.0 / m as f64 * self.payment_before.to_f64());
        share && pay
    }

    /// Checks the XOS guarantee for parameter `m` (tolerance [`TOL`]).
    pub fn meets_xos_guarantee(&self, m: usize) -> bool {
        let share = self.objective_after >= self.objective_before / (2 * m - 2) as f64 - TOL;
        let pay = self.subset.len() == 1 || self.payment_after.within(4.0 / m as f64 * self.payment_before.to_f64());
        share && pay
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[usize]) -> Subset {
        Subset::from_indices(ix.iter().copied())
    }

    fn uniform_four() -> Instance {
        let f = SetFunction::table_from_fn(4, |t| t.len() as f64 / 4.0).unwrap();
        Instance::new(vec![1.0 / 16.0; 4], f).unwrap()
    }

    fn xos_three() -> Instance {
        let f = SetFunction::xos(vec![vec![0.4, 0.4, 0.2], vec![0.0, 0.0, 0.4]]).unwrap();
        Instance::new(vec![0.2, 0.2, 0.0], f).unwrap()
    }

    #[test]
    fn first_bag_on_uniform_instance() {
        let r = downsize_submodular(&uniform_four(), s(&[0, 1, 2, 3]), &DownsizeParams::new(4)).unwrap();
        assert_eq!(r.subset, s(&[0, 1]));
        assert_eq!(r.payment_after, ExtendedReal::Finite(0.5));
        assert!((r.objective_after - 0.5).abs() < 1e-12);
        assert!(!r.singleton_exit);
        assert!(r.meets_submodular_guarantee(4));
    }

    #[test]
    fn singleton_team_is_kept() {
        let inst = uniform_four();
        for m in [3, 4, 7] {
            let r = downsize_submodular(&inst, s(&[2]), &DownsizeParams::new(m)).unwrap();
            assert_eq!(r.subset, s(&[2]));
        }
        let free = Instance::new(vec![0.0, 0.0], SetFunction::additive(vec![0.3, 0.3]).unwrap()).unwrap();
        let r = downsize_submodular(&free, s(&[1]), &DownsizeParams::new(3)).unwrap();
        assert_eq!(r.subset, s(&[1]));
    }

    #[test]
    fn additive_uniform_m3() {
        let inst = Instance::new(vec![1.0 / 16.0; 4], SetFunction::additive(vec![0.25; 4]).unwrap()).unwrap();
        let r = downsize_submodular(&inst, s(&[0, 1, 2, 3]), &DownsizeParams::new(3)).unwrap();
        assert!(r.payment_after.to_f64() <= 2.0 / 3.0 + 1e-12);
        assert!(r.objective_after >= 0.5 - 1e-12);
    }

    #[test]
    fn all_but_one_heavy() {
        // M = 3 with heavy agents 0 and 2: the light leftover {1} alone keeps too little
        let values = [0.19, 0.23, 0.19];
        let costs = vec![0.45 * values[0], 0.04 * values[1], 0.43 * values[2]];
        let inst = Instance::new(costs, SetFunction::additive(values.to_vec()).unwrap()).unwrap();
        let r = downsize_submodular(&inst, s(&[0, 1, 2]), &DownsizeParams::new(3)).unwrap();
        assert_eq!(r.subset, s(&[1, 2]));
        assert!(r.meets_submodular_guarantee(3));
    }

    #[test]
    fn errors() {
        let inst = uniform_four();
        assert!(matches!(
            downsize_submodular(&inst, Subset::EMPTY, &DownsizeParams::new(3)),
            Err(ContractError::Input(_))
        ));
        assert!(downsize_submodular(&inst, s(&[0]), &DownsizeParams::new(2)).is_err());
        let err = downsize_submodular(&xos_three(), s(&[0, 1, 2]), &DownsizeParams::new(3).checked());
        assert!(matches!(err, Err(ContractError::Precondition(_))));
        let inf = Instance::new(vec![0.1, 0.1], SetFunction::additive(vec![0.3, 0.0]).unwrap()).unwrap();
        assert!(matches!(
            downsize_submodular(&inf, s(&[0, 1]), &DownsizeParams::new(3)),
            Err(ContractError::InfeasibleSet(_))
        ));
    }

    #[test]
    fn recover_examples() {
        let inst = xos_three();
        let all = s(&[0, 1, 2]);
        assert_eq!(recover_marginals_xos(&inst, all, all).unwrap(), all);
        assert_eq!(recover_marginals_xos(&inst, Subset::EMPTY, all).unwrap(), Subset::EMPTY);
        assert!(recover_marginals_xos(&inst, s(&[0]), s(&[1, 2])).is_err());

        // clauses (1, 0) and (0.6, 0.6) halved so that f stays within [0, 1]
        let f = SetFunction::xos(vec![vec![0.5, 0.0], vec![0.3, 0.3]]).unwrap();
        let inst = Instance::new(vec![0.0, 0.0], f).unwrap();
        let u = recover_marginals_xos(&inst, s(&[0, 1]), s(&[0, 1])).unwrap();
        assert_eq!(u, s(&[0, 1]));
        assert!((inst.marginal(u, 1).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn recover_drops_weak_agent() {
        // in {0,1,2} agent 2 contributes 0.5 but inside {1,2} only 0.1
        let f = SetFunction::xos(vec![vec![0.2, 0.2, 0.5], vec![0.0, 0.5, 0.1]]).unwrap();
        let inst = Instance::new(vec![0.0; 3], f).unwrap();
        let u = recover_marginals_xos(&inst, s(&[1, 2]), s(&[0, 1, 2])).unwrap();
        assert!(inst.value(u) >= inst.value(s(&[1, 2])) / 2.0);
        let full_marg = |i| inst.marginal(s(&[0, 1, 2]), i).unwrap();
        for i in u.iter() {
            assert!(inst.marginal(u, i).unwrap() >= full_marg(i) / 2.0 - 1e-12);
        }
    }

    #[test]
    fn xos_pipeline_examples() {
        let inst = xos_three();
        let r = downsize_xos(&inst, s(&[0, 1, 2]), 5).unwrap();
        assert!(r.objective_after >= 1.0 / 8.0 - 1e-12);
        assert!(r.meets_xos_guarantee(5));

        let r = downsize_xos(&uniform_four(), s(&[0, 1, 2, 3]), 4).unwrap();
        assert!(r.objective_after >= 1.0 / 6.0 - 1e-12);
        assert!(r.meets_xos_guarantee(4));

        let r = downsize_xos(&inst, s(&[1]), 3).unwrap();
        assert_eq!(r.subset, s(&[1]));
    }
}
