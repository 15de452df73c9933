//! Row insertion (Robinson–Schensted) on permutations and real samples.
//!
//! A new value sits down in the first row at its sorted place, displacing the
//! first entry strictly greater than it, which moves on to the next row in the
//! same way. The level of a value is the row it finally occupies.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::young::{Partition, StandardTableau};

/// A permutation of `1..=n` in one-line notation, `images[i - 1] = π(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for (i, &v) in images.iter().enumerate() {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} at position {} outside 1..={n}",
                    i + 1
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} repeated at position {}",
                    i + 1
                )));
            }
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        Permutation { images }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    pub fn reversal(n: usize) -> Self {
        Permutation {
            images: (1..=n).rev().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    /// `π(i)` for 1-indexed `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n());
        Permutation {
            images: other.images.iter().map(|&j| self.images[j - 1]).collect(),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Whitespace-separated 1-indexed images.
    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::InvalidPermutation(format!("bad entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(images)
    }
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<usize> = (1..=n).collect();
    let mut out = vec![Permutation::from_images_unchecked(cur.clone())];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Permutation::from_images_unchecked(cur.clone()));
    }
}

/// Position of `perm` in [`all_permutations`] order (Lehmer code).
pub fn lex_index(perm: &[usize]) -> usize {
    let n = perm.len();
    let mut idx = 0;
    for i in 0..n {
        let smaller_after = perm[i + 1..].iter().filter(|&&v| v < perm[i]).count();
        idx = idx * (n - i) + smaller_after;
    }
    idx
}

/// Ranks of `values` as a permutation; ties are ranked in order of
/// appearance, which reproduces the insertion rule for equal values.
pub fn rank_permutation(values: &[f64]) -> Result<Permutation> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(Permutation::from_images_unchecked(stable_ranks(values)))
}

pub(crate) fn stable_ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

/// Inserts `x` into `rows`, returning the row where a cell was created.
#[inline]
fn row_insert<T: PartialOrd + Copy>(rows: &mut Vec<Vec<T>>, mut x: T) -> usize {
    for (r, row) in rows.iter_mut().enumerate() {
        let pos = row.partition_point(|y| *y <= x);
        if pos == row.len() {
            row.push(x);
            return r;
        }
        x = std::mem::replace(&mut row[pos], x);
    }
    rows.push(vec![x]);
    rows.len() - 1
}

/// Reusable row storage for shape-only insertion.
///
/// Keeping one per worker avoids reallocating rows across replicas.
#[derive(Clone, Debug, Default)]
pub struct ShapeBuilder<T> {
    rows: Vec<Vec<T>>,
    used: usize,
}

impl<T: PartialOrd + Copy> ShapeBuilder<T> {
    pub fn new() -> Self {
        ShapeBuilder {
            rows: Vec::new(),
            used: 0,
        }
    }

    pub fn clear(&mut self) {
        for row in &mut self.rows[..self.used] {
            row.clear();
        }
        self.used = 0;
    }

    pub fn insert(&mut self, mut x: T) {
        for row in &mut self.rows[..self.used] {
            let pos = row.partition_point(|y| *y <= x);
            if pos == row.len() {
                row.push(x);
                return;
            }
            x = std::mem::replace(&mut row[pos], x);
        }
        if self.used == self.rows.len() {
            self.rows.push(Vec::new());
        }
        self.rows[self.used].push(x);
        self.used += 1;
    }

    pub fn parts(&self) -> Vec<usize> {
        self.rows[..self.used].iter().map(Vec::len).collect()
    }

    pub fn shape(&self) -> Partition {
        Partition::from_parts_unchecked(self.parts())
    }

    /// Clears, inserts every value in order and returns the shape.
    pub fn shape_of(&mut self, values: &[T]) -> Partition {
        self.clear();
        for &v in values {
            self.insert(v);
        }
        self.shape()
    }
}

/// Shape of the insertion tableau of `values`, without a recording tableau.
///
/// Equals the shape of [`rsk`] applied to the rank permutation of `values`.
/// NaN values make the order meaningless; callers validate real input.
pub fn rsk_shape<T: PartialOrd + Copy>(values: &[T]) -> Partition {
    ShapeBuilder::new().shape_of(values)
}

/// The insertion tableau of a real sample, `Y_{k,t}` for level `k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealTableau {
    rows: Vec<Vec<f64>>,
}

impl RealTableau {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Entries of level `k` (1-indexed), ascending.
    pub fn level(&self, k: usize) -> Option<&[f64]> {
        self.rows.get(k.checked_sub(1)?).map(Vec::as_slice)
    }

    pub fn num_levels(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn shape(&self) -> Partition {
        Partition::from_parts_unchecked(self.rows.iter().map(Vec::len).collect())
    }

    pub fn insert(&mut self, mut x: f64) -> Result<()> {
        if x.is_nan() {
            return Err(Error::NanValue);
        }
        #[cfg(debug_assertions)]
        let mut path = Vec::new();
        let mut placed = false;
        for (_r, row) in self.rows.iter_mut().enumerate() {
            let pos = row.partition_point(|y| *y <= x);
            #[cfg(debug_assertions)]
            path.push((_r, pos));
            if pos == row.len() {
                row.push(x);
                placed = true;
                break;
            }
            x = std::mem::replace(&mut row[pos], x);
        }
        if !placed {
            #[cfg(debug_assertions)]
            path.push((self.rows.len(), 0));
            self.rows.push(vec![x]);
        }
        #[cfg(debug_assertions)]
        for (r, c) in path {
            self.debug_check_cell(r, c);
        }
        Ok(())
    }

    #[cfg(debug_assertions)]
    fn debug_check_cell(&self, r: usize, c: usize) {
        let v = self.rows[r][c];
        if r > 0 {
            debug_assert!(self.rows[r - 1][c] < v, "column invariant broken above ({r}, {c})");
        }
        if let Some(below) = self.rows.get(r + 1).and_then(|row| row.get(c)) {
            debug_assert!(v < *below, "column invariant broken below ({r}, {c})");
        }
    }

    /// Checks every row and column invariant; O(n).
    pub fn check_invariants(&self) -> bool {
        let rows_ok = self
            .rows
            .iter()
            .all(|r| !r.is_empty() && r.windows(2).all(|w| w[0] < w[1]));
        let cols_ok = self.rows.windows(2).all(|w| {
            w[1].len() <= w[0].len() && w[1].iter().zip(&w[0]).all(|(b, a)| a < b)
        });
        rows_ok && cols_ok
    }

    pub fn scaled(&self, factor: f64) -> RealTableau {
        RealTableau {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| v * factor).collect())
                .collect(),
        }
    }
}

/// Functional form of a single insertion step.
pub fn insert_value(mut state: RealTableau, x: f64) -> Result<RealTableau> {
    state.insert(x)?;
    Ok(state)
}

/// Inserts the whole sample in arrival order.
pub fn y_process(sample: &[f64]) -> Result<RealTableau> {
    let mut t = RealTableau::new();
    for (i, &x) in sample.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite(i));
        }
        t.insert(x)?;
    }
    Ok(t)
}

/// `Z(n) = n·Y(n)`.
pub fn z_rescale(y: &RealTableau, n: usize) -> RealTableau {
    y.scaled(n as f64)
}

/// Insertion and recording tableaux of a permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RskPair {
    p: StandardTableau,
    q: StandardTableau,
}

impl RskPair {
    pub fn new(p: StandardTableau, q: StandardTableau) -> Result<Self> {
        if p.shape() != q.shape() {
            return Err(Error::MalformedTableau(format!(
                "shape mismatch: P has {}, Q has {}",
                p.shape(),
                q.shape()
            )));
        }
        Ok(RskPair { p, q })
    }

    pub fn p(&self) -> &StandardTableau {
        &self.p
    }

    pub fn q(&self) -> &StandardTableau {
        &self.q
    }

    pub fn shape(&self) -> &Partition {
        self.p.shape()
    }
}

pub fn rsk(perm: &Permutation) -> RskPair {
    let mut p: Vec<Vec<usize>> = Vec::new();
    let mut q: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in perm.images().iter().enumerate() {
        let r = row_insert(&mut p, v);
        if r == q.len() {
            q.push(Vec::new());
        }
        q[r].push(i + 1);
    }
    RskPair {
        p: StandardTableau::from_rows_unchecked(p),
        q: StandardTableau::from_rows_unchecked(q),
    }
}

/// Inverts [`rsk`] by reverse bumping in decreasing arrival order.
pub fn inverse_rsk(pair: &RskPair) -> Result<Permutation> {
    let n = pair.shape().n();
    let q_row = pair.q.row_of_entries();
    let mut p: Vec<Vec<usize>> = pair.p.rows().to_vec();
    let mut images = vec![0; n];
    for arrival in (1..=n).rev() {
        let r = q_row[arrival - 1];
        let mut x = p[r].pop().ok_or_else(|| {
            Error::MalformedTableau(format!("recording entry {arrival} is not at a corner"))
        })?;
        for row in p[..r].iter_mut().rev() {
            let pos = row.partition_point(|y| *y < x);
            if pos == 0 {
                return Err(Error::MalformedTableau(
                    "reverse bump found no smaller entry".into(),
                ));
            }
            x = std::mem::replace(&mut row[pos - 1], x);
        }
        images[arrival - 1] = x;
    }
    Permutation::new(images)
}

/// Level (1-indexed row) of each value in the insertion tableau.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelProcess {
    level: Vec<usize>,
}

impl LevelProcess {
    /// Level of value `v` (1-indexed).
    pub fn level(&self, v: usize) -> usize {
        self.level[v - 1]
    }

    pub fn levels(&self) -> &[usize] {
        &self.level
    }

    pub fn n(&self) -> usize {
        self.level.len()
    }

    /// Values grouped by level, ascending within each level.
    pub fn tableau(&self) -> StandardTableau {
        let depth = self.level.iter().copied().max().unwrap_or(0);
        let mut rows = vec![Vec::new(); depth];
        for (v, &k) in self.level.iter().enumerate() {
            rows[k - 1].push(v + 1);
        }
        StandardTableau::from_rows_unchecked(rows)
    }
}

pub fn level_process(perm: &Permutation) -> LevelProcess {
    let pair = rsk(perm);
    LevelProcess {
        level: pair.p.row_of_entries().into_iter().map(|r| r + 1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: [usize; 11] = [5, 2, 11, 9, 8, 1, 3, 10, 4, 7, 6];
    const SAMPLE: [f64; 11] = [
        0.473, 0.117, 0.973, 0.832, 0.771, 0.032, 0.251, 0.914, 0.343, 0.652, 0.574,
    ];

    fn worked() -> Permutation {
        Permutation::new(WORKED.to_vec()).unwrap()
    }

    #[test]
    fn first_insertions() {
        let t = insert_value(RealTableau::new(), 0.473).unwrap();
        assert_eq!(t.rows(), &[vec![0.473]]);
        let t2 = insert_value(t.clone(), 0.117).unwrap();
        assert_eq!(t2.rows(), &[vec![0.117], vec![0.473]]);
        let t3 = insert_value(insert_value(RealTableau::new(), 0.117).unwrap(), 0.473).unwrap();
        assert_eq!(t3.rows(), &[vec![0.117, 0.473]]);
    }

    #[test]
    fn nan_rejected() {
        assert_eq!(insert_value(RealTableau::new(), f64::NAN), Err(Error::NanValue));
        assert_eq!(y_process(&[1.0, f64::INFINITY]), Err(Error::NonFinite(1)));
    }

    #[test]
    fn ties_append_after_twins() {
        let t = y_process(&[0.5, 0.5, 0.2]).unwrap();
        assert_eq!(t.rows(), &[vec![0.2, 0.5], vec![0.5]]);
        assert_eq!(
            t.shape(),
            rsk(&rank_permutation(&[0.5, 0.5, 0.2]).unwrap()).shape().clone()
        );
    }

    #[test]
    fn worked_example_tableau() {
        let pair = rsk(&worked());
        let expected: Vec<Vec<usize>> = vec![
            vec![1, 3, 4, 6],
            vec![2, 7, 10],
            vec![5, 8],
            vec![9],
            vec![11],
        ];
        assert_eq!(pair.p().rows(), expected.as_slice());
        assert_eq!(pair.shape().parts(), &[4, 3, 2, 1, 1]);
        let kappa = level_process(&worked());
        assert_eq!(kappa.levels(), &[1, 2, 1, 1, 3, 1, 2, 3, 4, 2, 5]);
        assert_eq!(kappa.tableau().rows(), expected.as_slice());
    }

    #[test]
    fn worked_sample_matches_ranks() {
        let ranks = rank_permutation(&SAMPLE).unwrap();
        assert_eq!(ranks, worked());
        let y = y_process(&SAMPLE).unwrap();
        assert_eq!(y.shape().parts(), &[4, 3, 2, 1, 1]);
        assert_eq!(y.level(1).unwrap(), &[0.032, 0.251, 0.343, 0.574]);
        assert!(y.check_invariants());
        assert_eq!(rsk_shape(&SAMPLE), y.shape());
        assert_eq!(rsk_shape(&WORKED), y.shape());
    }

    #[test]
    fn identity_and_reversal() {
        let id = rsk(&Permutation::identity(6));
        assert_eq!(id.p().rows(), &[vec![1, 2, 3, 4, 5, 6]]);
        assert_eq!(id.q().rows(), id.p().rows());
        assert_eq!(rsk(&Permutation::reversal(6)).shape(), &Partition::column(6));
        assert!(level_process(&Permutation::identity(5))
            .levels()
            .iter()
            .all(|&k| k == 1));
    }

    #[test]
    fn two_element_levels() {
        let k = level_process(&Permutation::new(vec![2, 1]).unwrap());
        assert_eq!(k.levels(), &[1, 2]);
    }

    #[test]
    fn inverse_of_worked_example() {
        let pair = rsk(&worked());
        assert_eq!(inverse_rsk(&pair).unwrap(), worked());
        let single = rsk(&Permutation::identity(4));
        assert_eq!(inverse_rsk(&single).unwrap(), Permutation::identity(4));
    }

    #[test]
    fn malformed_pair_rejected() {
        let p = StandardTableau::new(vec![vec![1, 2], vec![3]]).unwrap();
        let q = StandardTableau::new(vec![vec![1, 2, 3]]).unwrap();
        assert!(RskPair::new(p, q).is_err());
    }

    #[test]
    fn z_rescale_examples() {
        let y = y_process(&[0.001]).unwrap();
        assert_eq!(z_rescale(&y, 1000).rows(), &[vec![1.0]]);
        assert!(z_rescale(&RealTableau::new(), 10).is_empty());
    }

    #[test]
    fn shape_builder_reuse() {
        let mut b = ShapeBuilder::new();
        assert_eq!(b.shape_of(&WORKED).parts(), &[4, 3, 2, 1, 1]);
        assert_eq!(b.shape_of(&[1, 2, 3]).parts(), &[3]);
        assert_eq!(b.shape_of(&[3, 2, 1]).parts(), &[1, 1, 1]);
        assert!(b.shape_of::<>(&[]).is_empty());
    }

    #[test]
    fn lexicographic_enumeration() {
        let all = all_permutations(4);
        assert_eq!(all.len(), 24);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(lex_index(p.images()), i);
        }
        assert_eq!(all[0], Permutation::identity(4));
        assert_eq!(all[23], Permutation::reversal(4));
        assert_eq!(all_permutations(1).len(), 1);
    }

    #[test]
    fn permutation_parsing() {
        assert_eq!("5 2 11 9 8 1 3 10 4 7 6".parse::<Permutation>().unwrap(), worked());
        assert!("1 1".parse::<Permutation>().is_err());
        assert!("0 1".parse::<Permutation>().is_err());
    }
}
