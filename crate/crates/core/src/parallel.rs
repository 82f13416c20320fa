//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature the map runs on rayon; without it, or with
//! [`Parallelism::Sequential`], it is a plain iterator. Results are always
//! returned in index order, so output does not depend on scheduling.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parallelism {
    /// Rayon's global pool (sequential without the `parallel` feature).
    #[default]
    Auto,
    Sequential,
    /// A dedicated pool capped at this many workers.
    Threads(usize),
}

impl Parallelism {
    /// `None` or `0` means [`Parallelism::Auto`], `1` is sequential.
    pub fn from_jobs(jobs: Option<usize>) -> Self {
        match jobs {
            None | Some(0) => Self::Auto,
            Some(1) => Self::Sequential,
            Some(n) => Self::Threads(n),
        }
    }
}

pub fn map_indexed<T, F>(n: usize, par: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match par {
            Parallelism::Sequential | Parallelism::Threads(1) => {}
            Parallelism::Auto => return (0..n).into_par_iter().map(f).collect(),
            Parallelism::Threads(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => return pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(e) => log::warn!("could not build a {k}-thread pool ({e}); running sequentially"),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = par;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for par in [Parallelism::Auto, Parallelism::Sequential, Parallelism::Threads(3)] {
            let v = map_indexed(100, par, |i| i * i);
            assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn jobs_mapping() {
        assert_eq!(Parallelism::from_jobs(None), Parallelism::Auto);
        assert_eq!(Parallelism::from_jobs(Some(1)), Parallelism::Sequential);
        assert_eq!(Parallelism::from_jobs(Some(4)), Parallelism::Threads(4));
    }
}
