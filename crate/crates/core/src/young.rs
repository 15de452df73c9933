//! Young diagrams, standard tableaux and the hook-length formula.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::lntable::{ln_tables, LnTables};

/// Exact tableau counts are arbitrary precision; `f^λ` leaves `u64` near n = 20.
pub type BigCount = BigUint;

/// Default bound on `n` for [`syt_count`].
pub const DEFAULT_EXACT_CAP: usize = 200;

/// A Young shape: weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<usize>,
    n: usize,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("zero part in {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts not weakly decreasing: {parts:?}"
            )));
        }
        Ok(Self::from_parts_unchecked(parts))
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        let n = parts.iter().sum();
        Partition { parts, n }
    }

    /// The empty shape, `n = 0`.
    pub fn empty() -> Self {
        Partition::default()
    }

    /// The single row `(n)`.
    pub fn row(n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        Self::from_parts_unchecked(vec![n])
    }

    /// The single column `(1^n)`.
    pub fn column(n: usize) -> Self {
        Self::from_parts_unchecked(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<usize> {
        self.parts
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows, `s(n)` in level-process terms.
    pub fn num_rows(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        Partition::from_parts_unchecked(conjugate_parts(&self.parts))
    }

    /// Cells in row-reading order, 0-indexed `(row, column)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
    }

    /// Cells that can be removed leaving a valid shape.
    pub fn removable_corners(&self) -> Vec<(usize, usize)> {
        let p = &self.parts;
        (0..p.len())
            .filter(|&r| r + 1 == p.len() || p[r + 1] < p[r])
            .map(|r| (r, p[r] - 1))
            .collect()
    }

    /// Cells that can be added keeping a valid shape.
    pub fn addable_corners(&self) -> Vec<(usize, usize)> {
        let p = &self.parts;
        let mut out: Vec<_> = (0..p.len())
            .filter(|&r| r == 0 || p[r - 1] > p[r])
            .map(|r| (r, p[r]))
            .collect();
        out.push((p.len(), 0));
        out
    }

    /// Comparison in the enumeration order of [`partitions_of`]
    /// (reverse lexicographic: `(n)` first, `(1^n)` last).
    pub fn cmp_enumeration_order(&self, other: &Partition) -> Ordering {
        other.parts.cmp(&self.parts)
    }
}

pub(crate) fn conjugate_parts(parts: &[usize]) -> Vec<usize> {
    let mut conj = Vec::new();
    conjugate_into(parts, &mut conj);
    conj
}

pub(crate) fn conjugate_into(parts: &[usize], conj: &mut Vec<usize>) {
    conj.clear();
    let width = parts.first().copied().unwrap_or(0);
    conj.resize(width, 0);
    for &len in parts {
        for c in conj.iter_mut().take(len) {
            *c += 1;
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the comma-separated text form, e.g. `"5,3,2,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidPartition(format!("bad part {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Hook numbers of every cell, laid out like the diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HookField {
    rows: Vec<Vec<usize>>,
}

impl HookField {
    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> Option<usize> {
        self.rows.get(row).and_then(|r| r.get(col)).copied()
    }

    pub fn product(&self) -> BigCount {
        self.rows
            .iter()
            .flatten()
            .fold(BigCount::one(), |acc, &h| acc * h)
    }

    /// Sorted multiset of hook numbers.
    pub fn sorted_values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.rows.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }
}

/// `hook(i, j) = arm + leg + 1`.
pub fn hook_lengths(shape: &Partition) -> HookField {
    let conj = conjugate_parts(shape.parts());
    let rows = shape
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &len)| (0..len).map(|j| (len - j) + (conj[j] - i) - 1).collect())
        .collect();
    HookField { rows }
}

/// Number of standard tableaux of the shape, `n! / ∏ hooks`, computed exactly.
pub fn syt_count(shape: &Partition) -> Result<BigCount> {
    syt_count_with_cap(shape, DEFAULT_EXACT_CAP)
}

pub fn syt_count_with_cap(shape: &Partition, cap: usize) -> Result<BigCount> {
    let n = shape.n();
    if n > cap {
        return Err(Error::ExactCapExceeded { n, cap });
    }
    let factorial = (2..=n).fold(BigCount::one(), |acc, k| acc * k);
    Ok(factorial / hook_lengths(shape).product())
}

/// `H(λ) = Σ ln hook` over all cells.
pub fn hook_log_sum(shape: &Partition) -> f64 {
    let tables = ln_tables(shape.n().max(1));
    let mut scratch = Vec::new();
    hook_log_sum_with(shape.parts(), &tables, &mut scratch)
}

/// `H` for a raw part slice, reusing `scratch` for the conjugate.
///
/// The sum is always taken over the lexicographically larger of the shape
/// and its conjugate, so conjugate shapes get bit-identical values.
pub fn hook_log_sum_with(parts: &[usize], tables: &LnTables, scratch: &mut Vec<usize>) -> f64 {
    conjugate_into(parts, scratch);
    if scratch.as_slice() > parts {
        let conj = std::mem::take(scratch);
        let mut back = Vec::with_capacity(parts.len());
        conjugate_into(&conj, &mut back);
        let h = hook_sum_oriented(&conj, &back, tables);
        *scratch = conj;
        h
    } else {
        hook_sum_oriented(parts, scratch, tables)
    }
}

fn hook_sum_oriented(parts: &[usize], conj: &[usize], tables: &LnTables) -> f64 {
    let mut h = 0.0;
    for (i, &len) in parts.iter().enumerate() {
        for (j, &col) in conj.iter().enumerate().take(len) {
            h += tables.ln(len + col - i - j - 1);
        }
    }
    h
}

/// `ln f^λ = ln n! - H(λ)`.
pub fn log_dim(shape: &Partition) -> f64 {
    let tables = ln_tables(shape.n().max(1));
    tables.ln_factorial(shape.n()) - hook_log_sum(shape)
}

/// Streams the partitions of `n` in reverse lexicographic order without
/// materializing them.
///
/// [`Partitions::advance`] lends the current parts; the `Iterator` impl
/// allocates one [`Partition`] per item.
#[derive(Clone, Debug)]
pub struct Partitions {
    parts: Vec<usize>,
    fixed: usize,
    started: bool,
    done: bool,
}

impl Partitions {
    pub fn new(n: usize) -> Self {
        Self::with_max_part(n, n)
    }

    /// Partitions of `n` whose parts are all at most `max_part`.
    pub fn with_max_part(n: usize, max_part: usize) -> Self {
        let mut parts = Vec::new();
        let done = n > 0 && max_part == 0;
        fill_greedy(&mut parts, n, max_part.max(1));
        Partitions {
            parts,
            fixed: 0,
            started: false,
            done,
        }
    }

    /// Partitions of `n` with largest part exactly `first`.
    pub fn with_first_part(n: usize, first: usize) -> Self {
        let mut parts = vec![first];
        let done = first == 0 || first > n;
        if !done {
            fill_greedy(&mut parts, n - first, first);
        }
        Partitions {
            parts,
            fixed: 1,
            started: false,
            done,
        }
    }

    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.parts);
        }
        let mut ones = 0;
        while self.parts.len() > self.fixed && *self.parts.last().unwrap() == 1 {
            self.parts.pop();
            ones += 1;
        }
        if self.parts.len() == self.fixed {
            self.done = true;
            return None;
        }
        let last = self.parts.last_mut().unwrap();
        *last -= 1;
        let bound = *last;
        fill_greedy(&mut self.parts, ones + 1, bound);
        Some(&self.parts)
    }
}

fn fill_greedy(parts: &mut Vec<usize>, mut rem: usize, bound: usize) {
    while rem > 0 {
        let take = rem.min(bound);
        parts.push(take);
        rem -= take;
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        self.advance()
            .map(|p| Partition::from_parts_unchecked(p.to_vec()))
    }
}

/// Every partition of `n`, once each, in reverse lexicographic order.
pub fn partitions_of(n: usize) -> Partitions {
    Partitions::new(n)
}

/// Number of partitions of `n` (Euler recurrence), used to size work.
pub fn partition_count(n: usize) -> BigCount {
    let mut p = vec![BigCount::one()];
    for m in 1..=n {
        let mut plus = BigCount::default();
        let mut minus = BigCount::default();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let bucket = if k % 2 == 1 { &mut plus } else { &mut minus };
            *bucket += &p[m - g1];
            if g2 <= m {
                *bucket += &p[m - g2];
            }
        }
        p.push(plus - minus);
    }
    p.swap_remove(n)
}

/// A filling of a Young shape by `1..=n`, increasing along rows and columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardTableau {
    rows: Vec<Vec<usize>>,
    shape: Partition,
}

impl StandardTableau {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        if !is_standard(&rows) {
            return Err(Error::MalformedTableau(format!("not standard: {rows:?}")));
        }
        let shape = Partition::from_parts_unchecked(rows.iter().map(Vec::len).collect());
        Ok(StandardTableau { rows, shape })
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<usize>>) -> Self {
        debug_assert!(is_standard(&rows));
        let shape = Partition::from_parts_unchecked(rows.iter().map(Vec::len).collect());
        StandardTableau { rows, shape }
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    /// Row (0-indexed) holding each entry; `result[v - 1]` is the row of `v`.
    pub fn row_of_entries(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for (r, row) in self.rows.iter().enumerate() {
            for &v in row {
                out[v - 1] = r;
            }
        }
        out
    }
}

/// Checks shape validity, strict row/column increase and that the entries
/// are exactly `1..=n`.
pub fn is_standard(rows: &[Vec<usize>]) -> bool {
    if rows.iter().any(Vec::is_empty) {
        return false;
    }
    if rows.windows(2).any(|w| w[0].len() < w[1].len()) {
        return false;
    }
    let n: usize = rows.iter().map(Vec::len).sum();
    let mut seen = vec![false; n + 1];
    for row in rows {
        for &v in row {
            if v == 0 || v > n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        if row.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
    }
    rows.windows(2)
        .all(|w| w[1].iter().zip(&w[0]).all(|(below, above)| above < below))
}

/// All standard tableaux of a shape, by removing the largest entry from each
/// corner in turn. Order is deterministic.
pub fn standard_tableaux(shape: &Partition) -> Vec<StandardTableau> {
    fn rec(parts: &mut Vec<usize>, n: usize, fill: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if n == 0 {
            out.push(fill.clone());
            return;
        }
        for r in 0..parts.len() {
            let corner = parts[r] > 0 && (r + 1 == parts.len() || parts[r + 1] < parts[r]);
            if !corner {
                continue;
            }
            parts[r] -= 1;
            let col = parts[r];
            fill[r][col] = n;
            rec(parts, n - 1, fill, out);
            parts[r] += 1;
        }
    }
    let mut parts = shape.parts().to_vec();
    let mut fill: Vec<Vec<usize>> = parts.iter().map(|&l| vec![0; l]).collect();
    let mut out = Vec::new();
    rec(&mut parts, shape.n(), &mut fill, &mut out);
    out.into_iter()
        .map(StandardTableau::from_rows_unchecked)
        .collect()
}
