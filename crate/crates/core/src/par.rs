//! Deterministic parallel search helpers.
//!
//! `workers == 0` uses the global rayon pool, `1` runs on the calling thread,
//! and any other value runs inside a dedicated pool of that size. The result
//! never depends on the choice.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rayon::ThreadPool;

fn pool(workers: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().expect("pool cache poisoned");
    pools
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .expect("thread pool"),
            )
        })
        .clone()
}

pub(crate) fn run<R: Send>(workers: usize, job: impl FnOnce() -> R + Send) -> R {
    match workers {
        0 | 1 => job(),
        n => pool(n).install(job),
    }
}

/// The smallest index in `0..count` for which `test` yields a value.
pub(crate) fn first_hit<T, F>(workers: usize, count: u64, test: F) -> Option<(u64, T)>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    if workers == 1 {
        return (0..count).find_map(|i| test(i).map(|t| (i, t)));
    }
    run(workers, || {
        (0..count)
            .into_par_iter()
            .find_map_first(|i| test(i).map(|t| (i, t)))
    })
}

/// Map every index in `0..count` and keep the largest value, breaking ties by
/// the smallest index.
pub(crate) fn argmax<T, F>(workers: usize, count: u64, eval: F) -> Option<(u64, f64, T)>
where
    T: Send,
    F: Fn(u64) -> (f64, T) + Sync + Send,
{
    fn better<T>(x: (u64, f64, T), y: (u64, f64, T)) -> (u64, f64, T) {
        if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
            y
        } else {
            x
        }
    }
    if workers == 1 {
        return (0..count).map(|i| {
            let (v, t) = eval(i);
            (i, v, t)
        })
        .fold(None, |acc, x| Some(match acc {
            None => x,
            Some(a) => better(a, x),
        }));
    }
    run(workers, || {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let (v, t) = eval(i);
                (i, v, t)
            })
            .reduce_with(better)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_hit_is_smallest_index() {
        for workers in [0, 1, 3] {
            let hit = first_hit(workers, 10_000, |i| (i % 997 == 996).then_some(i * 2));
            assert_eq!(hit, Some((996, 1992)));
        }
        assert_eq!(first_hit(2, 100, |_| None::<()>), None);
    }

    #[test]
    fn argmax_breaks_ties_low() {
        for workers in [0, 1, 4] {
            let best = argmax(workers, 1000, |i| (if i % 100 == 7 { 5.0 } else { 1.0 }, ()));
            assert_eq!(best.map(|b| (b.0, b.1)), Some((7, 5.0)));
        }
    }
}
