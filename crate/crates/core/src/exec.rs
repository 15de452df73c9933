//! Replica execution and seeding.
//!
//! Every replica draws from its own ChaCha8 stream: the generator is seeded
//! with the master seed and the replica index selects the stream. Results are
//! collected in replica-index order, so output does not depend on how many
//! workers ran or how work was split between them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for replica `index` under `seed`.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// How replica loops are run.
///
/// `workers == 1` (or building without the `parallel` feature) runs
/// everything on the calling thread. `workers == 0` means the rayon default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Exec {
    workers: usize,
}

impl Exec {
    pub fn sequential() -> Self {
        Exec { workers: 1 }
    }

    pub fn with_workers(workers: usize) -> Self {
        Exec { workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn is_sequential(&self) -> bool {
        self.workers == 1 || !cfg!(feature = "parallel")
    }

    /// `f(0), f(1), …, f(count - 1)` in index order.
    pub fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if !self.is_sequential() {
            use rayon::prelude::*;
            return self.install(|| (0..count).into_par_iter().map(&f).collect());
        }
        (0..count).map(f).collect()
    }

    /// Like [`Exec::map`] but each worker keeps mutable scratch state built by
    /// `init`. Scratch must not influence results.
    pub fn map_init<S, T, I, F>(&self, count: usize, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if !self.is_sequential() {
            use rayon::prelude::*;
            return self.install(|| {
                (0..count)
                    .into_par_iter()
                    .map_init(&init, |s, i| f(s, i))
                    .collect()
            });
        }
        let mut scratch = init();
        (0..count).map(|i| f(&mut scratch, i)).collect()
    }

    #[cfg(feature = "parallel")]
    fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        if self.workers == 0 {
            return op();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
        {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
}
