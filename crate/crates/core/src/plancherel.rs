//! The Plancherel measure `p(λ) = (f^λ)² / n!` and statistics of it.
//!
//! Two statistics are carried for every shape: `H(λ) = Σ ln hook` and
//! `LP(λ) = −ln p(λ)`. Since `f^λ = n!/∏ hooks`, they satisfy
//! `LP = 2H − ln n!`, so a test on one is a test on the other.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{replica_rng, Exec};
use crate::lntable::{ln_tables, LnTables};
use crate::rsk::ShapeBuilder;
use crate::stats::CompensatedSum;
use crate::young::{hook_log_sum_with, partition_count, syt_count, BigCount, Partition, Partitions};

/// Largest `n` for full enumeration of the Plancherel measure.
pub const DEFAULT_ENUMERATION_CAP: usize = 130;

/// Largest `n` for the exact log-dimension histogram.
pub const DEFAULT_HISTOGRAM_CAP: usize = 40;

/// LP bins used to locate the acceptance cutoff.
const ACCEPT_BINS: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct PlancherelRecord {
    pub shape: Partition,
    /// `ln f^λ`
    pub log_f: f64,
    pub prob: f64,
    /// `Σ ln hook`
    pub h: f64,
    /// `−ln prob`
    pub lp: f64,
}

/// `(h, lp)` for a raw part slice of a partition of `n`.
#[inline]
pub(crate) fn h_and_lp(parts: &[usize], n: usize, tables: &LnTables, scratch: &mut Vec<usize>) -> (f64, f64) {
    let h = hook_log_sum_with(parts, tables, scratch);
    (h, 2.0 * h - tables.ln_factorial(n))
}

pub fn plancherel_record(shape: &Partition) -> PlancherelRecord {
    let n = shape.n();
    let tables = ln_tables(n.max(1));
    let mut scratch = Vec::new();
    record_with(shape.parts(), n, &tables, &mut scratch)
}

fn record_with(parts: &[usize], n: usize, tables: &LnTables, scratch: &mut Vec<usize>) -> PlancherelRecord {
    let (h, lp) = h_and_lp(parts, n, tables, scratch);
    PlancherelRecord {
        shape: Partition::from_parts_unchecked(parts.to_vec()),
        log_f: tables.ln_factorial(n) - h,
        prob: (-lp).exp(),
        h,
        lp,
    }
}

/// `H(λ)` alone.
pub fn h_statistic(shape: &Partition) -> f64 {
    plancherel_record(shape).h
}

/// `LP(λ)` alone.
pub fn lp_statistic(shape: &Partition) -> f64 {
    plancherel_record(shape).lp
}

/// Exact moments of `LP` under Plancherel(n).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    /// `E[LP] / √n`
    pub ave: f64,
    /// `SD[LP]`
    pub sd: f64,
    pub total_prob: f64,
    /// `E[LP]`
    pub mean_lp: f64,
}

impl MomentReport {
    /// `E[H] = (E[LP] + ln n!) / 2`
    pub fn mean_h(&self) -> f64 {
        (self.mean_lp + ln_tables(self.n.max(1)).ln_factorial(self.n)) / 2.0
    }

    /// `SD[H] = SD[LP] / 2`
    pub fn sd_h(&self) -> f64 {
        self.sd / 2.0
    }
}

/// Shapes with `LP` above `ln p(n) + 50` carry at most `e^{−50}` mass in
/// total; the acceptance-set bins stop there.
fn lp_tail(n: usize) -> f64 {
    let count: f64 = partition_count(n).to_string().parse().unwrap_or(f64::INFINITY);
    count.ln() + 50.0
}

/// Depth-first walk over partitions of `n`, built from the bottom row up.
///
/// With `β = λ_i + (rows below i)`, the hook product is
/// `∏ β_i! / ∏_{i above k} (β_i − β_k)`, and every factor involving a row is
/// fixed once the row is placed, so `H` is updated in `O(rows)` per node.
/// `visit` receives `H` and the parts, bottom row first.
struct HookWalk<'a, F> {
    tables: &'a LnTables,
    /// Subtrees whose partial `H` exceeds this are skipped; row terms are
    /// logs of hook products, so `H` never decreases down the tree.
    h_max: f64,
    betas: Vec<usize>,
    parts: Vec<usize>,
    visit: F,
}

impl<'a, F: FnMut(f64, &[usize])> HookWalk<'a, F> {
    /// Visits every partition of `n` whose smallest part is `bottom`.
    fn run(n: usize, bottom: usize, tables: &'a LnTables, h_max: f64, visit: F) {
        let mut walk = HookWalk {
            tables,
            h_max,
            betas: Vec::with_capacity(n),
            parts: Vec::with_capacity(n),
            visit,
        };
        walk.place(n, bottom, 0.0, true);
    }

    #[inline]
    fn row_term(&self, part: usize) -> f64 {
        let beta = part + self.betas.len();
        let ln = self.tables.ln_slice();
        // independent accumulators keep the adds from serializing
        let mut acc = [0.0f64; 4];
        let mut chunks = self.betas.chunks_exact(4);
        for c in &mut chunks {
            for k in 0..4 {
                acc[k] += ln[beta - c[k]];
            }
        }
        for &b in chunks.remainder() {
            acc[0] += ln[beta - b];
        }
        self.tables.ln_factorial(beta) - ((acc[0] + acc[1]) + (acc[2] + acc[3]))
    }

    /// Places rows of length `>= min` summing to `remaining` on top; with
    /// `exact_first`, the next row has length exactly `min`.
    fn place(&mut self, remaining: usize, min: usize, h: f64, exact_first: bool) {
        let max = if exact_first { min } else { remaining };
        for part in min..=max {
            if part != remaining && remaining - part < part {
                continue;
            }
            let h = h + self.row_term(part);
            if h > self.h_max {
                continue;
            }
            if part == remaining {
                self.parts.push(part);
                (self.visit)(h, &self.parts);
                self.parts.pop();
            } else {
                self.betas.push(part + self.betas.len());
                self.parts.push(part);
                self.place(remaining - part, part, h, false);
                self.parts.pop();
                self.betas.pop();
            }
        }
    }
}

/// Runs `visit` over every partition of `n >= 1` with `H <= h_max`, sharded
/// by smallest part; shard results come back in a fixed order.
fn walk_shards<A, I, V>(n: usize, exec: &Exec, tables: &LnTables, h_max: f64, init: I, visit: V) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, f64, &[usize]) + Sync + Send,
{
    exec.map(n, |i| {
        let mut acc = init();
        HookWalk::run(n, i + 1, tables, h_max, |h, parts: &[usize]| visit(&mut acc, h, parts));
        acc
    })
}

pub fn exact_moments(n: usize) -> Result<MomentReport> {
    exact_moments_with(n, DEFAULT_ENUMERATION_CAP, &Exec::default())
}

pub fn exact_moments_with(n: usize, cap: usize, exec: &Exec) -> Result<MomentReport> {
    if n > cap {
        return Err(Error::EnumerationCapExceeded { n, cap });
    }
    let tables = ln_tables(2 * n + 1);
    let ln_nfact = tables.ln_factorial(n);
    let shards = if n == 0 {
        let mut acc = [CompensatedSum::new(); 3];
        acc[0].add(1.0);
        vec![acc]
    } else {
        walk_shards(n, exec, &tables, f64::INFINITY, || [CompensatedSum::new(); 3], |acc, h, _| {
            let lp = 2.0 * h - ln_nfact;
            let p = (-lp).exp();
            acc[0].add(p);
            acc[1].add(p * lp);
            acc[2].add(p * lp * lp);
        })
    };
    let mut acc = [CompensatedSum::new(); 3];
    for shard in &shards {
        acc.iter_mut().zip(shard).for_each(|(a, s)| a.merge(s));
    }
    let mean = acc[1].value();
    let var = acc[2].value() - mean * mean;
    Ok(MomentReport {
        n,
        ave: mean / (n as f64).sqrt(),
        sd: var.max(0.0).sqrt(),
        total_prob: acc[0].value(),
        mean_lp: mean,
    })
}

/// Every Plancherel record of `n`, in enumeration order.
pub fn enumerate_records(n: usize) -> Result<Vec<PlancherelRecord>> {
    if n > DEFAULT_ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            n,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    let tables = ln_tables(n.max(1));
    let mut scratch = Vec::new();
    let mut stream = Partitions::new(n);
    let mut out = Vec::new();
    while let Some(parts) = stream.advance() {
        out.push(record_with(parts, n, &tables, &mut scratch));
    }
    Ok(out)
}

/// Highest-probability shapes whose total mass first reaches `1 − α`.
///
/// Built greedily by decreasing probability; equal probabilities are taken
/// in enumeration order. Membership is decided from the last admitted shape,
/// so the set itself need not be stored.
#[derive(Clone, Debug, PartialEq)]
pub struct AcceptanceSet {
    n: usize,
    alpha: f64,
    cutoff_prob: f64,
    cutoff_shape: Partition,
    size: usize,
    mass: f64,
}

impl AcceptanceSet {
    pub fn build(n: usize, alpha: f64) -> Result<Self> {
        Self::build_with(n, alpha, &Exec::default())
    }

    pub fn build_with(n: usize, alpha: f64, exec: &Exec) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} not in (0, 1)")));
        }
        if n > DEFAULT_ENUMERATION_CAP {
            return Err(Error::EnumerationCapExceeded {
                n,
                cap: DEFAULT_ENUMERATION_CAP,
            });
        }
        if n == 0 {
            return Ok(AcceptanceSet {
                n,
                alpha,
                cutoff_prob: 1.0,
                cutoff_shape: Partition::empty(),
                size: 1,
                mass: 1.0,
            });
        }
        let target = 1.0 - alpha;
        let tables = ln_tables(2 * n + 1);
        let ln_nfact = tables.ln_factorial(n);
        let lp_max = lp_tail(n);
        // the last bin also takes every shape above `lp_max`
        let width = lp_max / (ACCEPT_BINS - 1) as f64;
        let bin_of = |h: f64| (((2.0 * h - ln_nfact).max(0.0) / width) as usize).min(ACCEPT_BINS - 1);

        // pass 1: Plancherel mass and shape count per bin of LP
        let shards = walk_shards(
            n,
            exec,
            &tables,
            f64::INFINITY,
            || (vec![0.0f64; ACCEPT_BINS], vec![0u64; ACCEPT_BINS]),
            |(mass, count), h, _| {
                let b = bin_of(h);
                mass[b] += (ln_nfact - 2.0 * h).exp();
                count[b] += 1;
            },
        );
        let mut mass = vec![CompensatedSum::new(); ACCEPT_BINS];
        let mut count = vec![0u64; ACCEPT_BINS];
        for (m, c) in &shards {
            for b in 0..ACCEPT_BINS {
                mass[b].add(m[b]);
                count[b] += c[b];
            }
        }
        drop(shards);
        let mut cum = CompensatedSum::new();
        let mut crossing = ACCEPT_BINS - 1;
        for (b, m) in mass.iter().enumerate() {
            cum.merge(m);
            if cum.value() >= target {
                crossing = b;
                break;
            }
        }
        let lo = crossing.saturating_sub(1);
        let hi = (crossing + 1).min(ACCEPT_BINS - 1);
        let mut before = CompensatedSum::new();
        mass[..lo].iter().for_each(|m| before.merge(m));
        let count_before: u64 = count[..lo].iter().sum();

        // pass 2: rank the shapes of the bins around the crossing exactly,
        // with the same arithmetic as `contains`
        let h_max = if hi == ACCEPT_BINS - 1 {
            f64::INFINITY
        } else {
            (width * (hi + 1) as f64 + ln_nfact) / 2.0 + 1e-9
        };
        let shards = walk_shards(n, exec, &tables, h_max, Vec::new, |out: &mut Vec<(f64, Vec<usize>)>, h, bottom_up| {
            let b = bin_of(h);
            if (lo..=hi).contains(&b) {
                let parts: Vec<usize> = bottom_up.iter().rev().copied().collect();
                let mut scratch = Vec::new();
                let (_, lp) = h_and_lp(&parts, n, &tables, &mut scratch);
                out.push(((-lp).exp(), parts));
            }
        });
        let mut candidates: Vec<(f64, Vec<usize>)> = shards.into_iter().flatten().collect();
        candidates.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then_with(|| b.1.cmp(&a.1)));
        let mut mass = before;
        let mut cut = candidates.len() - 1;
        for (k, (p, _)) in candidates.iter().enumerate() {
            mass.add(*p);
            if mass.value() >= target {
                cut = k;
                break;
            }
        }
        let (cutoff_prob, parts) = candidates.swap_remove(cut);
        Ok(AcceptanceSet {
            n,
            alpha,
            cutoff_prob,
            cutoff_shape: Partition::from_parts_unchecked(parts),
            size: count_before as usize + cut + 1,
            mass: mass.value(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Plancherel mass of the set.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Probability of the least likely admitted shape.
    pub fn cutoff_prob(&self) -> f64 {
        self.cutoff_prob
    }

    pub fn contains(&self, shape: &Partition) -> bool {
        if shape.n() != self.n {
            return false;
        }
        let p = plancherel_record(shape).prob;
        self.admits(p, shape.parts())
    }

    fn admits(&self, prob: f64, parts: &[usize]) -> bool {
        prob > self.cutoff_prob || (prob == self.cutoff_prob && parts >= self.cutoff_shape.parts())
    }

    /// Admitted shapes sorted by decreasing probability.
    pub fn members(&self) -> Vec<PlancherelRecord> {
        let tables = ln_tables(self.n.max(1));
        let mut scratch = Vec::new();
        let mut stream = Partitions::new(self.n);
        let mut out = Vec::with_capacity(self.size);
        while let Some(parts) = stream.advance() {
            let rec = record_with(parts, self.n, &tables, &mut scratch);
            if self.admits(rec.prob, parts) {
                out.push(rec);
            }
        }
        // stable: equal probabilities stay in enumeration order
        out.sort_by(|a, b| b.prob.total_cmp(&a.prob));
        out
    }
}

pub fn acceptance_set(n: usize, alpha: f64) -> Result<Vec<PlancherelRecord>> {
    Ok(AcceptanceSet::build(n, alpha)?.members())
}

/// `bin[C]` sums `(f^λ)²` over shapes with `ln f^λ ∈ (C − ½, C + ½]`; the
/// total over all bins is `n!`.
pub fn log_dim_histogram(n: usize) -> Result<BTreeMap<i64, BigCount>> {
    if n > DEFAULT_HISTOGRAM_CAP {
        return Err(Error::EnumerationCapExceeded {
            n,
            cap: DEFAULT_HISTOGRAM_CAP,
        });
    }
    let mut bins: BTreeMap<i64, BigCount> = BTreeMap::new();
    for shape in Partitions::new(n) {
        let f = syt_count(&shape)?;
        let c = (plancherel_record(&shape).log_f - 0.5).ceil() as i64;
        *bins.entry(c).or_default() += &f * &f;
    }
    Ok(bins)
}

/// Bins `C` whose permutation count exceeds `e^{2C}`.
pub fn bins_exceeding_exp2c(hist: &BTreeMap<i64, BigCount>) -> Vec<i64> {
    hist.iter()
        .filter(|(&c, count)| {
            let count: f64 = count.to_string().parse().unwrap_or(f64::INFINITY);
            count > (2.0 * c as f64).exp()
        })
        .map(|(&c, _)| c)
        .collect()
}

/// Plancherel(n) shape: row insertion of a uniformly shuffled `1..=n`.
pub fn sample_shape<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    let mut builder = ShapeBuilder::new();
    let mut buf = Vec::new();
    sample_shape_with(n, rng, &mut builder, &mut buf)
}

/// [`sample_shape`] with caller-owned scratch.
pub fn sample_shape_with<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    builder: &mut ShapeBuilder<u32>,
    buf: &mut Vec<u32>,
) -> Partition {
    buf.clear();
    buf.extend(1..=n as u32);
    buf.shuffle(rng);
    builder.shape_of(buf)
}

/// Per-replica `(h, lp)` for `replicas` Plancherel(n) shapes.
pub fn sample_statistics(n: usize, replicas: usize, seed: u64, exec: &Exec) -> Vec<(f64, f64)> {
    let tables = ln_tables(n.max(1));
    exec.map_init(
        replicas,
        || (ShapeBuilder::new(), Vec::new(), Vec::new()),
        |(builder, buf, scratch), i| {
            let mut rng = replica_rng(seed, i as u64);
            let shape = sample_shape_with(n, &mut rng, builder, buf);
            h_and_lp(shape.parts(), n, &tables, scratch)
        },
    )
}

/// Knobs for [`min_h_search`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinHConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_steps: usize,
    pub exec: Exec,
}

impl Default for MinHConfig {
    fn default() -> Self {
        MinHConfig {
            restarts: 8,
            seed: 0,
            max_steps: 10_000_000,
            exec: Exec::default(),
        }
    }
}

/// Row and column lengths of a shape under single-cell edits.
#[derive(Clone, Debug)]
struct ShapeState {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl ShapeState {
    fn new(parts: &[usize]) -> Self {
        let mut cols = Vec::new();
        crate::young::conjugate_into(parts, &mut cols);
        ShapeState {
            rows: parts.to_vec(),
            cols,
        }
    }

    fn row_len(&self, r: usize) -> usize {
        self.rows.get(r).copied().unwrap_or(0)
    }

    fn col_len(&self, c: usize) -> usize {
        self.cols.get(c).copied().unwrap_or(0)
    }

    #[inline]
    fn hook(&self, r: usize, c: usize) -> usize {
        self.rows[r] + self.cols[c] - r - c - 1
    }

    fn can_remove(&self, r: usize) -> bool {
        r < self.rows.len() && (r + 1 == self.rows.len() || self.rows[r + 1] < self.rows[r])
    }

    fn can_add(&self, r: usize) -> bool {
        r <= self.rows.len() && (r == 0 || self.rows[r - 1] > self.row_len(r))
    }

    fn removable(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&r| self.can_remove(r)).collect()
    }

    fn addable(&self) -> Vec<usize> {
        (0..=self.rows.len()).filter(|&r| self.can_add(r)).collect()
    }

    /// Change in `H` from removing the last cell of row `r`.
    fn delta_remove(&self, r: usize, ln: &LnTables) -> f64 {
        let c = self.rows[r] - 1;
        let mut d = 0.0;
        for k in 0..c {
            let h = self.hook(r, k);
            d += ln.ln(h - 1) - ln.ln(h);
        }
        for s in 0..r {
            let h = self.hook(s, c);
            d += ln.ln(h - 1) - ln.ln(h);
        }
        d
    }

    /// Change in `H` from appending a cell to row `r`.
    fn delta_add(&self, r: usize, ln: &LnTables) -> f64 {
        let c = self.row_len(r);
        let mut d = 0.0;
        for k in 0..c {
            let h = self.hook(r, k);
            d += ln.ln(h + 1) - ln.ln(h);
        }
        debug_assert_eq!(self.col_len(c), r);
        for s in 0..r {
            // column c is absent when r == 0, so this loop is empty then
            let h = self.rows[s] + r - s - c - 1;
            d += ln.ln(h + 1) - ln.ln(h);
        }
        d
    }

    fn remove(&mut self, r: usize) {
        let c = self.rows[r] - 1;
        self.rows[r] -= 1;
        self.cols[c] -= 1;
        if self.rows[r] == 0 {
            self.rows.pop();
        }
        if self.cols[c] == 0 {
            self.cols.pop();
        }
    }

    fn add(&mut self, r: usize) {
        let c = self.row_len(r);
        if r == self.rows.len() {
            self.rows.push(0);
        }
        if c == self.cols.len() {
            self.cols.push(0);
        }
        self.rows[r] += 1;
        self.cols[c] += 1;
    }

    fn size(&self) -> usize {
        self.rows.iter().sum()
    }
}

/// Pairs examined exactly per step before falling back to a shortlist.
const EXACT_PAIR_LIMIT: usize = 4096;
const SHORTLIST: usize = 24;

/// Steepest descent of `H` over "move one corner cell" steps.
fn descend(state: &mut ShapeState, ln: &LnTables, max_steps: usize) {
    for _ in 0..max_steps {
        let removable = state.removable();
        let addable = state.addable();
        let mut rem: Vec<(f64, usize)> = removable
            .iter()
            .map(|&r| (state.delta_remove(r, ln), r))
            .collect();
        let mut add: Vec<(f64, usize)> = addable
            .iter()
            .map(|&r| (state.delta_add(r, ln), r))
            .collect();
        if rem.len() * add.len() > EXACT_PAIR_LIMIT {
            rem.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            add.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            rem.truncate(SHORTLIST);
            add.truncate(SHORTLIST);
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for &(dr, r) in &rem {
            state.remove(r);
            for &(_, a) in &add {
                if a == r || !state.can_add(a) {
                    continue;
                }
                let d = dr + state.delta_add(a, ln);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, r, a));
                }
            }
            state.add(r);
        }
        match best {
            Some((d, r, a)) if d < -1e-12 => {
                state.remove(r);
                state.add(a);
            }
            _ => return,
        }
    }
}

/// Balanced profile following the limit shape of Plancherel-typical
/// diagrams, rounded and then corrected to exactly `n` cells.
fn limit_profile(n: usize, ln: &LnTables) -> ShapeState {
    let s = (n as f64).sqrt();
    let omega = |u: f64| {
        if u.abs() >= 2.0 {
            u.abs()
        } else {
            2.0 / std::f64::consts::PI * (u * (u / 2.0).asin() + (4.0 - u * u).sqrt())
        }
    };
    let mut parts: Vec<usize> = Vec::new();
    for r in 0.. {
        let y = (r as f64 + 0.5) / s;
        if y >= 2.0 {
            break;
        }
        // boundary point of row r: x + y = Ω(x − y)
        let (mut lo, mut hi) = (0.0f64, 2.0f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if omega(mid - y) - mid - y > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let len = (s * lo).round() as usize;
        let len = parts.last().map_or(len, |&prev| len.min(prev));
        if len == 0 {
            break;
        }
        parts.push(len);
    }
    let mut state = ShapeState::new(&parts);
    let mut size = state.size();
    while size < n {
        let r = state
            .addable()
            .into_iter()
            .min_by(|&a, &b| state.delta_add(a, ln).total_cmp(&state.delta_add(b, ln)))
            .expect("a shape always has an addable cell");
        state.add(r);
        size += 1;
    }
    while size > n {
        let r = state
            .removable()
            .into_iter()
            .min_by(|&a, &b| state.delta_remove(a, ln).total_cmp(&state.delta_remove(b, ln)))
            .expect("non-empty shape has a corner");
        state.remove(r);
        size -= 1;
    }
    state
}

/// A shape locally minimal for `H` under single-cell corner moves, and its `H`.
///
/// Restart 0 starts from the limit-shape profile; later restarts start from
/// that profile scrambled by random corner moves. The best result wins,
/// earlier restarts winning ties.
pub fn min_h_search(n: usize, cfg: &MinHConfig) -> (Partition, f64) {
    if n == 0 {
        return (Partition::empty(), 0.0);
    }
    let ln = ln_tables(n + 1);
    let start = limit_profile(n, &ln);
    let scramble = ((n as f64).sqrt().ceil() as usize).max(4);
    let results = cfg.exec.map(cfg.restarts.max(1), |k| {
        let mut state = start.clone();
        if k > 0 {
            let mut rng = replica_rng(cfg.seed, k as u64);
            for _ in 0..k * scramble {
                let rem = state.removable();
                let r = rem[rng.random_range(0..rem.len())];
                state.remove(r);
                let add: Vec<usize> = state.addable().into_iter().filter(|&a| a != r).collect();
                let a = if add.is_empty() {
                    r
                } else {
                    add[rng.random_range(0..add.len())]
                };
                state.add(a);
            }
        }
        descend(&mut state, &ln, cfg.max_steps);
        let shape = Partition::from_parts_unchecked(state.rows);
        let h = plancherel_record(&shape).h;
        (shape, h)
    });
    results
        .into_iter()
        .reduce(|best, cand| if cand.1 < best.1 { cand } else { best })
        .expect("at least one restart")
}
