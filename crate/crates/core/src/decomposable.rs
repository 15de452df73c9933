//! Proper (decomposable) random permutations.
//!
//! A random permutation is proper when, for every cut `k`, the prefix and the
//! suffix are conditionally independent given the set `G_k` of the first `k`
//! values. Such laws are parametrized by step conditionals `q(j | G)` over the
//! subset lattice: `P*(π) = ∏_k q(π_{k+1} | G_k)`.
//!
//! The projection used here keeps every step conditional of the input law.
//! Because the step marginals of `P*` and `d` then coincide, the Pythagorean
//! identity `D(d‖U) = D(d‖P*) + D(P*‖U)` holds exactly.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{replica_rng, Exec};
use crate::lntable::ln_factorial;
use crate::rsk::{all_permutations, inverse_rsk, lex_index, Permutation, RskPair};
use crate::young::{standard_tableaux, syt_count, Partition};

/// Largest `n` for an explicit probability table.
pub const EXPLICIT_CAP: usize = 8;
/// Largest `n` for the subset-lattice tables.
pub const LATTICE_CAP: usize = 11;
/// Largest `n` for [`double_proper_dimension`].
pub const DIMENSION_CAP: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub enum PermutationDistribution {
    /// Probabilities indexed by lexicographic rank.
    Explicit { n: usize, probs: Vec<f64> },
    /// Uniform over the permutations whose insertion shape is `shape`.
    ShapeUniform { shape: Partition },
}

impl PermutationDistribution {
    pub fn explicit(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n > EXPLICIT_CAP {
            return Err(Error::InvalidParameter(format!(
                "explicit distributions need n <= {EXPLICIT_CAP}"
            )));
        }
        let size: usize = (1..=n).product();
        if probs.len() != size {
            return Err(Error::InvalidParameter(format!(
                "expected {size} probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter("probabilities must be finite and >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(PermutationDistribution::Explicit { n, probs })
    }

    /// Normalizes nonnegative weights given per permutation.
    pub fn from_weights(n: usize, weight: impl Fn(&Permutation) -> f64) -> Result<Self> {
        let w: Vec<f64> = all_permutations(n).iter().map(weight).collect();
        let total: f64 = w.iter().sum();
        Self::explicit(n, w.into_iter().map(|x| x / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(n, |_| 1.0)
    }

    pub fn point_mass(perm: &Permutation) -> Result<Self> {
        let idx = lex_index(perm.images());
        Self::from_weights(perm.n(), |p| if lex_index(p.images()) == idx { 1.0 } else { 0.0 })
    }

    pub fn shape_uniform(shape: Partition) -> Result<Self> {
        if shape.n() > LATTICE_CAP {
            return Err(Error::InvalidParameter(format!(
                "shape-uniform laws need n <= {LATTICE_CAP}"
            )));
        }
        Ok(PermutationDistribution::ShapeUniform { shape })
    }

    pub fn n(&self) -> usize {
        match self {
            PermutationDistribution::Explicit { n, .. } => *n,
            PermutationDistribution::ShapeUniform { shape } => shape.n(),
        }
    }

    /// Probability of `perm` (explicit laws only).
    pub fn prob(&self, perm: &Permutation) -> Option<f64> {
        match self {
            PermutationDistribution::Explicit { probs, .. } => Some(probs[lex_index(perm.images())]),
            PermutationDistribution::ShapeUniform { .. } => None,
        }
    }
}

/// Joint step masses `m(G, j) = P(G_k = G, π_{k+1} = j)` over the subset
/// lattice; `q(j | G) = m(G, j) / Σ_j m(G, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixConditionalTable {
    n: usize,
    mass: Vec<f64>,
}

impl PrefixConditionalTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Joint mass of initializing set `set` (bit `v − 1` for value `v`)
    /// followed by value `j` (1-indexed).
    pub fn joint(&self, set: usize, j: usize) -> f64 {
        self.mass[set * self.n + j - 1]
    }

    /// Probability that `set` is ever the initializing set.
    pub fn set_mass(&self, set: usize) -> f64 {
        self.mass[set * self.n..(set + 1) * self.n].iter().sum()
    }

    /// `q(j | set)`; `None` when `set` is unreachable.
    pub fn q(&self, set: usize, j: usize) -> Option<f64> {
        let total = self.set_mass(set);
        (total > 0.0).then(|| self.joint(set, j) / total)
    }

    fn from_counts(n: usize, counts: &[u64], total: u64) -> Self {
        let t = total as f64;
        PrefixConditionalTable {
            n,
            mass: counts.iter().map(|&c| c as f64 / t).collect(),
        }
    }
}

/// Adds `weight` to every `(G_k, π_{k+1})` cell along `perm`'s prefix chain.
#[inline]
fn accumulate<T: Copy + std::ops::AddAssign>(table: &mut [T], n: usize, perm: &[usize], weight: T) {
    let mut set = 0usize;
    for &v in perm {
        table[set * n + v - 1] += weight;
        set |= 1 << (v - 1);
    }
}

/// Number of shards the shape-uniform stream is split into; fixed so the
/// merge does not depend on the worker count.
const SHARDS: usize = 64;

/// Calls `visit` for every permutation with the given insertion shape, by
/// inverting each pair of standard tableaux. Sharded over `P`.
fn stream_shape<A, I, V>(shape: &Partition, exec: &Exec, init: I, visit: V) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &[usize]) + Sync + Send,
{
    let tableaux = standard_tableaux(shape);
    let per = tableaux.len().div_ceil(SHARDS).max(1);
    let shards = tableaux.len().div_ceil(per);
    exec.map(shards, |s| -> Result<A> {
        let mut acc = init();
        for p in &tableaux[s * per..((s + 1) * per).min(tableaux.len())] {
            for q in &tableaux {
                let pair = RskPair::new(p.clone(), q.clone())?;
                let perm = inverse_rsk(&pair)?;
                visit(&mut acc, perm.images());
            }
        }
        Ok(acc)
    })
    .into_iter()
    .collect()
}

pub fn prefix_conditionals(d: &PermutationDistribution) -> Result<PrefixConditionalTable> {
    prefix_conditionals_with(d, &Exec::default())
}

pub fn prefix_conditionals_with(d: &PermutationDistribution, exec: &Exec) -> Result<PrefixConditionalTable> {
    let n = d.n();
    if n > LATTICE_CAP {
        return Err(Error::InvalidParameter(format!("n = {n} exceeds {LATTICE_CAP}")));
    }
    let cells = (1usize << n) * n;
    match d {
        PermutationDistribution::Explicit { probs, .. } => {
            let mut mass = vec![0.0; cells];
            for (perm, &p) in all_permutations(n).iter().zip(probs) {
                if p > 0.0 {
                    accumulate(&mut mass, n, perm.images(), p);
                }
            }
            Ok(PrefixConditionalTable { n, mass })
        }
        PermutationDistribution::ShapeUniform { shape } => {
            let shards = stream_shape(shape, exec, || vec![0u64; cells], |acc, perm| {
                accumulate(acc, n, perm, 1u64)
            })?;
            let mut counts = vec![0u64; cells];
            for shard in shards {
                counts.iter_mut().zip(shard).for_each(|(c, s)| *c += s);
            }
            let f = syt_count(shape)?;
            let total: u64 = (&f * &f).try_into().expect("f² fits in u64 for n <= 11");
            Ok(PrefixConditionalTable::from_counts(n, &counts, total))
        }
    }
}

/// `P*(π) = ∏_k q(π_{k+1} | G_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProperDistribution {
    table: PrefixConditionalTable,
}

impl ProperDistribution {
    pub fn from_table(table: PrefixConditionalTable) -> Self {
        ProperDistribution { table }
    }

    pub fn table(&self) -> &PrefixConditionalTable {
        &self.table
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    pub fn log_prob(&self, perm: &[usize]) -> f64 {
        let mut set = 0usize;
        let mut lp = 0.0;
        for &v in perm {
            match self.table.q(set, v) {
                Some(q) if q > 0.0 => lp += q.ln(),
                _ => return f64::NEG_INFINITY,
            }
            set |= 1 << (v - 1);
        }
        lp
    }

    pub fn prob(&self, perm: &[usize]) -> f64 {
        self.log_prob(perm).exp()
    }

    /// Explicit probability table, lexicographic order.
    pub fn to_explicit(&self) -> Result<PermutationDistribution> {
        let n = self.n();
        let probs: Vec<f64> = all_permutations(n)
            .iter()
            .map(|p| self.prob(p.images()))
            .collect();
        let total: f64 = probs.iter().sum();
        PermutationDistribution::explicit(n, probs.into_iter().map(|p| p / total).collect())
    }
}

pub fn proper_projection(d: &PermutationDistribution) -> Result<ProperDistribution> {
    Ok(ProperDistribution::from_table(prefix_conditionals(d)?))
}

/// Output of the forward pass over the subset lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePass {
    pub kl_to_uniform: f64,
    /// Total mass reaching sets of size `k`, for `k = 0..=n`.
    pub level_mass: Vec<f64>,
}

/// `D(P*‖U)` by pushing mass forward `G → G ∪ {j}` through the lattice.
pub fn kl_to_uniform(p: &ProperDistribution) -> f64 {
    lattice_pass(p).kl_to_uniform
}

pub fn lattice_pass(p: &ProperDistribution) -> LatticePass {
    let n = p.n();
    let size = 1usize << n;
    let mut reach = vec![0.0f64; size];
    reach[0] = 1.0;
    let mut kl = 0.0;
    let mut level_mass = vec![0.0; n + 1];
    // every superset of G is numerically larger, so ascending order is topological
    for set in 0..size {
        let m = reach[set];
        if m == 0.0 {
            continue;
        }
        let k = set.count_ones() as usize;
        level_mass[k] += m;
        let total = p.table.set_mass(set);
        if total == 0.0 {
            continue;
        }
        for j in 1..=n {
            if set & (1 << (j - 1)) != 0 {
                continue;
            }
            let q = p.table.joint(set, j) / total;
            if q > 0.0 {
                reach[set | 1 << (j - 1)] += m * q;
                kl += m * q * (q * (n - k) as f64).ln();
            }
        }
    }
    LatticePass {
        kl_to_uniform: kl,
        level_mass,
    }
}

/// The three divergences relating `d`, its projection `P*` and uniform `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceReport {
    pub n: usize,
    pub shape: Option<Partition>,
    /// `D(P*‖U)`
    pub kl_proper_to_uniform: f64,
    /// `D(d‖P*)`
    pub kl_d_to_proper: f64,
    /// `D(d‖U)`
    pub kl_d_to_uniform: f64,
}

pub fn divergence_report(d: &PermutationDistribution, exec: &Exec) -> Result<DivergenceReport> {
    let n = d.n();
    let proper = ProperDistribution::from_table(prefix_conditionals_with(d, exec)?);
    let kl_proper_to_uniform = kl_to_uniform(&proper);
    let ln_nfact = ln_factorial(n);
    match d {
        PermutationDistribution::Explicit { probs, .. } => {
            let (mut to_u, mut to_p) = (0.0, 0.0);
            for (perm, &p) in all_permutations(n).iter().zip(probs) {
                if p > 0.0 {
                    to_u += p * (p.ln() + ln_nfact);
                    to_p += p * (p.ln() - proper.log_prob(perm.images()));
                }
            }
            Ok(DivergenceReport {
                n,
                shape: None,
                kl_proper_to_uniform,
                kl_d_to_proper: to_p,
                kl_d_to_uniform: to_u,
            })
        }
        PermutationDistribution::ShapeUniform { shape } => {
            let f = syt_count(shape)?;
            let count: u64 = (&f * &f).try_into().expect("f² fits in u64 for n <= 11");
            let ln_count = (count as f64).ln();
            let sums = stream_shape(shape, exec, || 0.0f64, |acc, perm| {
                *acc += proper.log_prob(perm)
            })?;
            let mean_log_p: f64 = sums.iter().sum::<f64>() / count as f64;
            Ok(DivergenceReport {
                n,
                shape: Some(shape.clone()),
                kl_proper_to_uniform,
                kl_d_to_proper: -ln_count - mean_log_p,
                kl_d_to_uniform: ln_nfact - ln_count,
            })
        }
    }
}

/// Indicator features of "the first `k` values form set `G` and the `k`-th
/// is `j`", for every `k`, plus the constant. Rows are permutations in
/// lexicographic order.
fn prefix_features(perms: &[Vec<usize>]) -> DMatrix<f64> {
    let n = perms.first().map_or(0, Vec::len);
    let cells = (1usize << n) * n;
    let mut used = vec![usize::MAX; cells];
    let mut cols: Vec<Vec<usize>> = Vec::new();
    for (row, perm) in perms.iter().enumerate() {
        let mut set = 0usize;
        for &v in perm {
            set |= 1 << (v - 1);
            let cell = set * n + v - 1;
            if used[cell] == usize::MAX {
                used[cell] = cols.len();
                cols.push(Vec::new());
            }
            cols[used[cell]].push(row);
        }
    }
    let mut m = DMatrix::zeros(perms.len(), cols.len() + 1);
    for (c, rows) in cols.iter().enumerate() {
        for &r in rows {
            m[(r, c)] = 1.0;
        }
    }
    m.column_mut(cols.len()).fill(1.0);
    m
}

/// Orthonormal basis of the column span.
fn column_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let tol = 1e-10 * svd.singular_values.max().max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Log-probability subspaces of proper laws for `π` and for `π⁻¹`.
fn proper_subspaces(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let perms: Vec<Vec<usize>> = all_permutations(n).into_iter().map(|p| p.into_images()).collect();
    let inverses: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| Permutation::new(p.clone()).unwrap().inverse().into_images())
        .collect();
    (
        column_basis(&prefix_features(&perms)),
        column_basis(&prefix_features(&inverses)),
    )
}

/// Limit of alternating projections `(P₂P₁)^k` onto both log-linear
/// families, reached by repeated squaring.
fn alternating_limit(b1: &DMatrix<f64>, b2: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = (b2 * b2.transpose()) * (b1 * b1.transpose());
    for _ in 0..200 {
        let sq = &m * &m;
        let change = (&sq - &m).norm();
        m = sq;
        if change <= 1e-15 * m.nrows() as f64 {
            break;
        }
    }
    m
}

/// The double-proper law nearest (in log space) to `exp(θ)`, as normalized
/// log-probabilities.
fn double_proper_log_probs(limit: &DMatrix<f64>, theta: &DVector<f64>) -> DVector<f64> {
    let v = limit * theta;
    let max = v.max();
    let log_z = max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    v.add_scalar(-log_z)
}

/// Dimension of the set of double-proper laws (proper, with a proper
/// inverse), as the numeric rank of the Jacobian of the fixed-point
/// parametrization at a random interior point.
pub fn double_proper_dimension(n: usize) -> Result<usize> {
    Ok(double_proper_jacobian_spectrum(n, 0)?
        .iter()
        .filter(|&&s| s > 1e-8)
        .count())
}

/// Singular values of the finite-difference Jacobian behind
/// [`double_proper_dimension`], at the point drawn from `seed`.
pub fn double_proper_jacobian_spectrum(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 || n > DIMENSION_CAP {
        return Err(Error::InvalidParameter(format!(
            "double_proper_dimension needs 1 <= n <= {DIMENSION_CAP}"
        )));
    }
    let (b1, b2) = proper_subspaces(n);
    let limit = alternating_limit(&b1, &b2);
    let size = b1.nrows();
    let mut rng = replica_rng(seed, 0);
    let theta = DVector::from_fn(size, |_, _| rng.random_range(-1.0..1.0));
    let h = 1e-5;
    let mut jac = DMatrix::zeros(size, size);
    for i in 0..size {
        let mut plus = theta.clone();
        plus[i] += h;
        let mut minus = theta.clone();
        minus[i] -= h;
        let col = (double_proper_log_probs(&limit, &plus)
            - double_proper_log_probs(&limit, &minus))
            / (2.0 * h);
        jac.set_column(i, &col);
    }
    let mut sv: Vec<f64> = jac.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// The same dimension by subspace algebra:
/// `dim(L₁ ∩ L₂) − 1 = dim L₁ + dim L₂ − dim(L₁ + L₂) − 1`.
pub fn double_proper_dimension_algebraic(n: usize) -> Result<usize> {
    if n == 0 || n > DIMENSION_CAP {
        return Err(Error::InvalidParameter(format!(
            "double_proper_dimension needs 1 <= n <= {DIMENSION_CAP}"
        )));
    }
    let (b1, b2) = proper_subspaces(n);
    let mut both = DMatrix::zeros(b1.nrows(), b1.ncols() + b2.ncols());
    both.columns_mut(0, b1.ncols()).copy_from(&b1);
    both.columns_mut(b1.ncols(), b2.ncols()).copy_from(&b2);
    let sum_dim = column_basis(&both).ncols();
    Ok(b1.ncols() + b2.ncols() - sum_dim - 1)
}
