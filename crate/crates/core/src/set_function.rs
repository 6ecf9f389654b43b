//! Reward set functions: additive vectors, XOS clause matrices and explicit tables.

use serde::{Deserialize, Serialize};

use crate::error::{ContractError, Result};
use crate::real::{de_real_matrix, de_real_vec, TOL};
use crate::subset::{Subset, MAX_AGENTS};

/// Largest `n` for which exhaustive class checks run.
pub const CLASSIFY_CAP: usize = 16;

/// Largest `n` for which a table (2^n entries) may be materialized.
pub const TABLE_CAP: usize = 26;

/// A set function over agents `0..n`.
///
/// `XosClauses` holds the clause matrix row-major: `clauses[j][i]` is the weight of
/// agent `i` in clause `j`, and `f(S) = max_j Σ_{i∈S} clauses[j][i]`. `Table` is
/// indexed by subset bitmask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SetFunction {
    Additive {
        #[serde(deserialize_with = "de_real_vec")]
        values: Vec<f64>,
    },
    #[serde(rename = "xos")]
    XosClauses {
        #[serde(deserialize_with = "de_real_matrix")]
        clauses: Vec<Vec<f64>>,
    },
    Table {
        #[serde(deserialize_with = "de_real_vec")]
        values: Vec<f64>,
    },
}

/// Outcome of the exhaustive class checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub is_monotone: bool,
    pub is_submodular: bool,
    pub is_subadditive: bool,
}

impl SetFunction {
    pub fn additive(values: Vec<f64>) -> Result<Self> {
        let f = SetFunction::Additive { values };
        f.validate()?;
        Ok(f)
    }

    pub fn xos(clauses: Vec<Vec<f64>>) -> Result<Self> {
        let f = SetFunction::XosClauses { clauses };
        f.validate()?;
        Ok(f)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let f = SetFunction::Table { values };
        f.validate()?;
        Ok(f)
    }

    /// Builds a table by evaluating `g` on every subset of `0..n`.
    pub fn table_from_fn(n: usize, g: impl Fn(Subset) -> f64) -> Result<Self> {
        if n > TABLE_CAP {
            return Err(ContractError::TooLarge { n, cap: TABLE_CAP });
        }
        SetFunction::table((0..1u64 << n).map(|m| g(Subset::from_bits(m))).collect())
    }

    /// Structural checks: shapes agree, entries finite, clause weights non-negative.
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            SetFunction::Additive { values } => {
                if values.len() > MAX_AGENTS {
                    return Err(ContractError::TooLarge { n: values.len(), cap: MAX_AGENTS });
                }
                if !finite(values) {
                    return Err(ContractError::input("additive values must be finite"));
                }
            }
            SetFunction::XosClauses { clauses } => {
                let Some(first) = clauses.first() else {
                    return Err(ContractError::input("XOS function needs at least one clause"));
                };
                let n = first.len();
                if n > MAX_AGENTS {
                    return Err(ContractError::TooLarge { n, cap: MAX_AGENTS });
                }
                if clauses.iter().any(|c| c.len() != n) {
                    return Err(ContractError::input("XOS clauses must all have length n"));
                }
                if clauses.iter().any(|c| !finite(c) || c.iter().any(|&x| x < 0.0)) {
                    return Err(ContractError::input("XOS clause weights must be finite and non-negative"));
                }
            }
            SetFunction::Table { values } => {
                if !values.len().is_power_of_two() {
                    return Err(ContractError::input(format!("table length {} is not a power of two", values.len())));
                }
                if !finite(values) {
                    return Err(ContractError::input("table values must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Number of agents.
    pub fn n(&self) -> usize {
        match self {
            SetFunction::Additive { values } => values.len(),
            SetFunction::XosClauses { clauses } => clauses[0].len(),
            SetFunction::Table { values } => values.len().trailing_zeros() as usize,
        }
    }

    fn check_range(&self, s: Subset) -> Result<()> {
        let n = self.n();
        if s.span() > n {
            return Err(ContractError::AgentOutOfRange { index: s.span() - 1, n });
        }
        Ok(())
    }

    /// `f(S)`, rejecting agents outside `0..n`.
    pub fn value(&self, s: Subset) -> Result<f64> {
        self.check_range(s)?;
        Ok(self.eval(s))
    }

    /// `f(S)` for a set already known to lie in `0..n`.
    pub fn eval(&self, s: Subset) -> f64 {
        debug_assert!(s.span() <= self.n());
        match self {
            SetFunction::Additive { values } => s.iter().map(|i| values[i]).sum(),
            SetFunction::XosClauses { clauses } => {
                clauses.iter().map(|c| s.iter().map(|i| c[i]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max)
            }
            SetFunction::Table { values } => values[s.bits() as usize],
        }
    }

    /// `f_S(i) = f(S) − f(S∖{i})`; requires `i ∈ S`.
    pub fn marginal(&self, s: Subset, i: usize) -> Result<f64> {
        self.check_range(s)?;
        if !s.contains(i) {
            return Err(ContractError::NotMember(i));
        }
        Ok(self.marginal_in(s, i))
    }

    pub(crate) fn marginal_in(&self, s: Subset, i: usize) -> f64 {
        match self {
            SetFunction::Additive { values } => values[i],
            _ => self.eval(s) - self.eval(s.without(i)),
        }
    }

    /// Every marginal `f_S(i)` for `i ∈ S`, in ascending agent order, sharing one `f(S)` query.
    pub(crate) fn marginals(&self, s: Subset) -> Vec<(usize, f64)> {
        match self {
            SetFunction::Additive { values } => s.iter().map(|i| (i, values[i])).collect(),
            _ => {
                let whole = self.eval(s);
                s.iter().map(|i| (i, whole - self.eval(s.without(i)))).collect()
            }
        }
    }

    /// A maximizer of `f(S) − Σ_{i∈S} q_i`.
    ///
    /// XOS: the best of the per-clause sets `{i : clause[i] > q_i}`. Table: exhaustive scan.
    /// Ties go to the smallest bitmask.
    pub fn demand(&self, prices: &[f64]) -> Result<Subset> {
        let n = self.n();
        if prices.len() != n {
            return Err(ContractError::input(format!("price vector has length {}, expected {n}", prices.len())));
        }
        if prices.iter().any(|&q| q.is_nan() || q < 0.0 || !q.is_finite()) {
            return Err(ContractError::input("prices must be finite and non-negative"));
        }
        let surplus = |s: Subset| self.eval(s) - s.iter().map(|i| prices[i]).sum::<f64>();
        let pick = |best: Option<(f64, Subset)>, s: Subset| {
            let v = surplus(s);
            match best {
                Some((bv, bs)) if bv > v || (bv == v && bs <= s) => Some((bv, bs)),
                _ => Some((v, s)),
            }
        };
        let best = match self {
            SetFunction::Additive { values } => {
                return Ok((0..n).filter(|&i| values[i] > prices[i]).collect());
            }
            SetFunction::XosClauses { clauses } => {
                clauses.iter().map(|c| (0..n).filter(|&i| c[i] > prices[i]).collect::<Subset>()).fold(None, pick)
            }
            SetFunction::Table { .. } => (0..1u64 << n).map(Subset::from_bits).fold(None, pick),
        };
        Ok(best.map(|(_, s)| s).unwrap_or(Subset::EMPTY))
    }

    /// Materializes the function as a table over all `2^n` subsets.
    pub fn to_table(&self) -> Result<SetFunction> {
        match self {
            SetFunction::Table { .. } => Ok(self.clone()),
            _ => SetFunction::table_from_fn(self.n(), |s| self.eval(s)),
        }
    }

    /// The function restricted to `agents`, re-indexed so `agents[k]` becomes agent `k`.
    pub fn restrict(&self, agents: &[usize]) -> Result<SetFunction> {
        match self {
            SetFunction::Additive { values } => SetFunction::additive(agents.iter().map(|&i| values[i]).collect()),
            SetFunction::XosClauses { clauses } => {
                if agents.is_empty() {
                    return SetFunction::xos(vec![Vec::new()]);
                }
                SetFunction::xos(clauses.iter().map(|c| agents.iter().map(|&i| c[i]).collect()).collect())
            }
            SetFunction::Table { .. } => {
                SetFunction::table_from_fn(agents.len(), |s| self.eval(crate::subset::expand(s.bits(), agents)))
            }
        }
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> SetFunction {
        let scale = |xs: &[f64]| xs.iter().map(|x| x * factor).collect::<Vec<_>>();
        match self {
            SetFunction::Additive { values } => SetFunction::Additive { values: scale(values) },
            SetFunction::XosClauses { clauses } => {
                SetFunction::XosClauses { clauses: clauses.iter().map(|c| scale(c)).collect() }
            }
            SetFunction::Table { values } => SetFunction::Table { values: scale(values) },
        }
    }

    /// The largest value the function takes, `f(A)` when monotone.
    pub(crate) fn upper_value(&self) -> f64 {
        match self {
            SetFunction::Additive { values } => values.iter().filter(|&&v| v > 0.0).sum(),
            SetFunction::XosClauses { clauses } => clauses.iter().map(|c| c.iter().sum::<f64>()).fold(0.0, f64::max),
            SetFunction::Table { values } => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub(crate) fn lower_value(&self) -> f64 {
        match self {
            SetFunction::Additive { values } => values.iter().filter(|&&v| v < 0.0).sum(),
            SetFunction::XosClauses { .. } => 0.0,
            SetFunction::Table { values } => values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Exhaustively verifies monotonicity, submodularity and subadditivity (tolerance [`TOL`]).
    pub fn classify(&self) -> Result<Classification> {
        let n = self.n();
        if let SetFunction::Additive { values } = self {
            let nonneg = values.iter().all(|&v| v >= 0.0);
            return Ok(Classification { is_monotone: nonneg, is_submodular: true, is_subadditive: nonneg });
        }
        if n > CLASSIFY_CAP {
            return Err(ContractError::TooLarge { n, cap: CLASSIFY_CAP });
        }
        let table: Vec<f64> = match self {
            SetFunction::Table { values } => values.clone(),
            _ => (0..1u64 << n).map(|m| self.eval(Subset::from_bits(m))).collect(),
        };
        let full = (1u64 << n) - 1;

        let is_monotone = (0..=full).all(|m| {
            (0..n).filter(|&i| m & (1 << i) == 0).all(|i| table[(m | 1 << i) as usize] >= table[m as usize] - TOL)
        });

        // Diminishing returns: f(S+i) − f(S) ≥ f(S+j+i) − f(S+j) for i, j ∉ S.
        let is_submodular = (0..=full).all(|m| {
            let outside: Vec<usize> = (0..n).filter(|&i| m & (1 << i) == 0).collect();
            outside.iter().all(|&i| {
                let gain = table[(m | 1 << i) as usize] - table[m as usize];
                outside.iter().filter(|&&j| j != i).all(|&j| {
                    let mj = m | 1 << j;
                    table[(mj | 1 << i) as usize] - table[mj as usize] <= gain + TOL
                })
            })
        });

        let is_subadditive = table[0] >= -TOL && subadditive(&table, n, is_monotone)?;

        Ok(Classification { is_monotone, is_submodular, is_subadditive })
    }
}

/// Largest `n` for which subadditivity of a non-monotone table is checked over all pairs.
const NON_MONOTONE_SUBADDITIVE_CAP: usize = 12;

fn subadditive(table: &[f64], n: usize, monotone: bool) -> Result<bool> {
    let full = (1u64 << n) - 1;
    if monotone {
        // Disjoint pairs suffice: f(S∪T) = f(S ∪ (T∖S)) ≤ f(S) + f(T∖S) ≤ f(S) + f(T).
        for s in 0..=full {
            let rest = full & !s;
            let mut t = rest;
            loop {
                if table[(s | t) as usize] > table[s as usize] + table[t as usize] + TOL {
                    return Ok(false);
                }
                if t == 0 {
                    break;
                }
                t = (t - 1) & rest;
            }
        }
        return Ok(true);
    }
    if n > NON_MONOTONE_SUBADDITIVE_CAP {
        return Err(ContractError::TooLarge { n, cap: NON_MONOTONE_SUBADDITIVE_CAP });
    }
    for s in 0..=full {
        for t in s..=full {
            if table[(s | t) as usize] > table[s as usize] + table[t as usize] + TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
