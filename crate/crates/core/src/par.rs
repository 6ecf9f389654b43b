//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the [`Execution::Parallel`] mode runs on the rayon
//! global pool; without it both modes run sequentially. Reductions used here are
//! associative with deterministic tie-breaking, so results do not depend on the mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How data-parallel loops are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether loops will actually fan out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `f` over `0..count`, keeping `Some` results, reduced with `pick`.
    pub fn filter_reduce<T, F, P>(self, count: u64, f: F, pick: P) -> Option<T>
    where
        T: Send,
        F: Fn(u64) -> Option<T> + Sync + Send,
        P: Fn(T, T) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return (0..count).into_par_iter().filter_map(f).reduce_with(pick);
        }
        (0..count).filter_map(f).reduce(pick)
    }

    /// `f` applied to every item, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// `f` over `0..count`, preserving order.
    pub fn map_range<R, F>(self, count: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return (0..count).into_par_iter().map(f).collect();
        }
        (0..count).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let pick = |a: (u64, u64), b: (u64, u64)| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a };
        let f = |k: u64| (!k.is_multiple_of(3)).then_some(((k * 7) % 11, k));
        let seq = Execution::Sequential.filter_reduce(1000, f, pick);
        let par = Execution::Parallel.filter_reduce(1000, f, pick);
        assert_eq!(seq, par);
        assert_eq!(seq, Some((10, 14)));
        let items: Vec<u32> = (0..100).collect();
        assert_eq!(Execution::Sequential.map(&items, |x| x * 2), Execution::Parallel.map(&items, |x| x * 2));
    }
}
