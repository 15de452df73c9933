//! Shared tables of `ln k` and `ln k!`.
//!
//! `ln n!` is accumulated term by term (compensated) rather than taken from
//! Stirling's series, so `LP = 2H - ln n!` holds to rounding.

use std::sync::{Arc, RwLock};

/// Largest `n` for which `ln n!` is tabulated.
pub const LN_FACTORIAL_CAP: usize = 2_000_000;

#[derive(Debug)]
pub struct LnTables {
    ln: Vec<f64>,
    ln_fact: Vec<f64>,
}

impl LnTables {
    fn build(max: usize) -> Self {
        let mut ln = Vec::with_capacity(max + 1);
        let mut ln_fact = Vec::with_capacity(max + 1);
        ln.push(f64::NEG_INFINITY);
        ln_fact.push(0.0);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for k in 1..=max {
            let v = (k as f64).ln();
            ln.push(v);
            // Neumaier summation
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
            ln_fact.push(sum + comp);
        }
        LnTables { ln, ln_fact }
    }

    pub fn max(&self) -> usize {
        self.ln.len() - 1
    }

    #[inline]
    pub fn ln(&self, k: usize) -> f64 {
        self.ln[k]
    }

    /// `ln k` for `k = 0..=max`; entry 0 is `−∞`.
    #[inline]
    pub fn ln_slice(&self) -> &[f64] {
        &self.ln
    }

    #[inline]
    pub fn ln_factorial(&self, n: usize) -> f64 {
        self.ln_fact[n]
    }
}

static CACHE: RwLock<Option<Arc<LnTables>>> = RwLock::new(None);

/// Returns tables covering at least `0..=max`.
///
/// Panics if `max` exceeds [`LN_FACTORIAL_CAP`].
pub fn ln_tables(max: usize) -> Arc<LnTables> {
    assert!(
        max <= LN_FACTORIAL_CAP,
        "ln-factorial table request {max} exceeds cap {LN_FACTORIAL_CAP}"
    );
    if let Some(t) = CACHE.read().unwrap().as_ref() {
        if t.max() >= max {
            return Arc::clone(t);
        }
    }
    let mut guard = CACHE.write().unwrap();
    if let Some(t) = guard.as_ref() {
        if t.max() >= max {
            return Arc::clone(t);
        }
    }
    let size = guard
        .as_ref()
        .map_or(max.max(1024), |t| max.max(2 * t.max()))
        .min(LN_FACTORIAL_CAP);
    let built = Arc::new(LnTables::build(size));
    *guard = Some(Arc::clone(&built));
    built
}

pub fn ln_factorial(n: usize) -> f64 {
    ln_tables(n).ln_factorial(n)
}
