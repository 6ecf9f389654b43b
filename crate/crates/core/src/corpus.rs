//! Seeded random instance corpora. Instance `index` of a corpus depends only on
//! `(seed, index)`, so corpora can be generated in any order or in parallel.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instance::Instance;
use crate::set_function::SetFunction;
use crate::subset::Subset;

/// Bumped whenever any recipe below changes the instances it produces.
pub const RECIPE_VERSION: u32 = 1;

/// Probability that an agent is heavy.
pub const HEAVY_SHARE: f64 = 0.2;
/// Range of `c_i/f({i})` for light agents.
pub const LIGHT_PAYMENT: (f64, f64) = (0.02, 0.3);
/// Range of `c_i/f({i})` for heavy agents.
pub const HEAVY_PAYMENT: (f64, f64) = (0.5, 0.9);
/// Number of concave features behind a random submodular reward.
pub const FEATURES: usize = 4;
/// Largest number of clauses of a random XOS reward.
pub const MAX_CLAUSES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Additive,
    Submodular,
    Xos,
}

/// The generator for instance `index` of the corpus `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Costs making each singleton's payment a random share of the budget, light or heavy.
pub fn random_costs(rng: &mut impl Rng, singleton_values: &[f64]) -> Vec<f64> {
    singleton_values
        .iter()
        .map(|&v| {
            let (lo, hi) = if rng.gen_bool(HEAVY_SHARE) { HEAVY_PAYMENT } else { LIGHT_PAYMENT };
            v * rng.gen_range(lo..hi)
        })
        .collect()
}

fn singleton_values(f: &SetFunction) -> Vec<f64> {
    (0..f.n()).map(|i| f.eval(Subset::singleton(i))).collect()
}

fn with_costs(rng: &mut impl Rng, f: SetFunction) -> Result<Instance> {
    let costs = random_costs(rng, &singleton_values(&f));
    Instance::new(costs, f)
}

/// Additive reward with total value in `[0.5, 1)`.
pub fn random_additive(rng: &mut impl Rng, n: usize) -> Result<Instance> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let scale = rng.gen_range(0.5..1.0) / total;
    with_costs(rng, SetFunction::additive(raw.iter().map(|v| v * scale).collect())?)
}

/// Table reward `Σ_j w_j (1 − exp(−Σ_{i∈S} a_ij))`, a sum of concave functions of additive
/// weights, normalized so that `f(A) ∈ [0.6, 1)`.
pub fn random_submodular(rng: &mut impl Rng, n: usize) -> Result<Instance> {
    let weights: Vec<f64> = (0..FEATURES).map(|_| rng.gen_range(0.1..1.0)).collect();
    let loads: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..FEATURES).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) }).collect())
        .collect();
    let raw = |s: Subset| -> f64 {
        weights.iter().enumerate().map(|(j, w)| w * (1.0 - (-s.iter().map(|i| loads[i][j]).sum::<f64>()).exp())).sum()
    };
    let top = raw(Subset::full(n)).max(f64::MIN_POSITIVE);
    let scale = rng.gen_range(0.6..1.0) / top;
    with_costs(rng, SetFunction::table_from_fn(n, |s| raw(s) * scale)?)
}

/// XOS reward with `clauses` clauses, each with total weight at most one.
pub fn random_xos(rng: &mut impl Rng, n: usize, clauses: usize) -> Result<Instance> {
    let clauses: Vec<Vec<f64>> = (0..clauses.max(1))
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
            let total: f64 = raw.iter().sum();
            let scale = if total > 0.0 { rng.gen_range(0.5..1.0) / total } else { 0.0 };
            raw.iter().map(|v| v * scale).collect()
        })
        .collect();
    with_costs(rng, SetFunction::xos(clauses)?)
}

/// Instance `index` of the corpus `seed` for a family, with `n` agents.
pub fn corpus_instance(family: Family, seed: u64, index: u64, n: usize) -> Result<Instance> {
    let mut rng = rng_for(seed, index);
    match family {
        Family::Additive => random_additive(&mut rng, n),
        Family::Submodular => random_submodular(&mut rng, n),
        Family::Xos => {
            let k = rng.gen_range(1..=MAX_CLAUSES);
            random_xos(&mut rng, n, k)
        }
    }
}

/// Prices `q_i ∈ (0, 0.5)` for demand queries.
pub fn random_prices(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(1e-3..0.5)).collect()
}
