//! Samplers for the null model and its alternatives.
//!
//! Sequence models produce real samples whose order carries the dependence;
//! permutation models produce a permutation directly. Either way the data
//! reduce to a shape through row insertion.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::lntable::ln_tables;
use crate::plancherel::h_and_lp;
use crate::rsk::{Permutation, ShapeBuilder};
use crate::young::Partition;

/// Marginal law of an IID sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Marginal {
    Uniform01,
    Exponential1,
}

pub fn sample_iid<R: Rng + ?Sized>(n: usize, marginal: Marginal, rng: &mut R) -> Vec<f64> {
    match marginal {
        Marginal::Uniform01 => (0..n).map(|_| rng.random::<f64>()).collect(),
        Marginal::Exponential1 => (0..n).map(|_| Exp1.sample(rng)).collect(),
    }
}

/// Stationary Gaussian AR(1): `X₁ ~ N(0,1)`, `X_{i+1} = ρX_i + √(1−ρ²)ε_i`.
pub fn sample_ar1<R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("AR(1) needs |rho| < 1, got {rho}")));
    }
    let innov = (1.0 - rho * rho).sqrt();
    let mut out = Vec::with_capacity(n);
    let mut x: f64 = StandardNormal.sample(rng);
    for i in 0..n {
        if i > 0 {
            let e: f64 = StandardNormal.sample(rng);
            x = rho * x + innov * e;
        }
        out.push(x);
    }
    Ok(out)
}

/// Ranks of `values`, failing on ties.
fn strict_ranks(values: &[f64], which: &'static str) -> Result<Vec<usize>> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    if let Some(w) = order.windows(2).find(|w| values[w[0]] == values[w[1]]) {
        let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
        return Err(Error::Ties {
            which,
            first: first + 1,
            second: second + 1,
        });
    }
    let mut ranks = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    Ok(ranks)
}

/// The permutation carrying the ordered `x` sample onto the ordered `u`
/// sample: `π(rank_x(i)) = rank_u(i)` for every observation `i`.
pub fn permutation_from_two_samples(x: &[f64], u: &[f64]) -> Result<Permutation> {
    if x.len() != u.len() {
        return Err(Error::LengthMismatch(x.len(), u.len()));
    }
    let rx = strict_ranks(x, "x")?;
    let ru = strict_ranks(u, "u")?;
    let mut images = vec![0; x.len()];
    for (a, b) in rx.into_iter().zip(ru) {
        images[a - 1] = b;
    }
    Ok(Permutation::from_images_unchecked(images))
}

/// Rank-matching permutation of `n` bivariate normal pairs with correlation ρ.
pub fn sample_gauss_pair<R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Result<Permutation> {
    if !(rho.abs() <= 1.0) {
        return Err(Error::InvalidParameter(format!("need |rho| <= 1, got {rho}")));
    }
    let innov = (1.0 - rho * rho).max(0.0).sqrt();
    let mut x = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    for _ in 0..n {
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        x.push(z1);
        u.push(rho * z1 + innov * z2);
    }
    permutation_from_two_samples(&x, &u)
}

/// Burn-in and thinning of the permutation Metropolis chains, in sweeps of
/// `n` proposals each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McmcConfig {
    pub burn_in: usize,
    pub thinning: usize,
}

impl McmcConfig {
    /// 50·n sweeps of burn-in, n sweeps between draws.
    pub fn for_n(n: usize) -> Self {
        McmcConfig {
            burn_in: 50 * n.max(1),
            thinning: n.max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in == 0 || self.thinning == 0 {
            return Err(Error::InvalidParameter(
                "burn-in and thinning must be at least one sweep".into(),
            ));
        }
        Ok(())
    }
}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                rows[i].len()
            )));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        SquareMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, 0-indexed.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `Σ_i a[i][π(i)]`, the unnormalized log-probability.
    pub fn log_weight(&self, perm: &Permutation) -> f64 {
        perm.images()
            .iter()
            .enumerate()
            .map(|(i, &v)| self.get(i, v - 1))
            .sum()
    }
}

/// Target of a transposition Metropolis chain on S_n.
pub trait PermutationTarget {
    /// Log-weight change after positions `i`, `j` of `perm` were swapped.
    fn delta_after_swap(&mut self, perm: &[usize], i: usize, j: usize) -> f64;
    /// The swap was accepted.
    fn commit(&mut self) {}
}

/// `log P(π) = Σ a[i][π(i)] + const`.
#[derive(Clone, Debug)]
pub struct Checkerboard {
    a: Arc<SquareMatrix>,
}

impl Checkerboard {
    pub fn new(a: Arc<SquareMatrix>) -> Self {
        Checkerboard { a }
    }
}

impl PermutationTarget for Checkerboard {
    fn delta_after_swap(&mut self, perm: &[usize], i: usize, j: usize) -> f64 {
        let a = &self.a;
        // perm is already swapped: old π(i) = perm[j], old π(j) = perm[i]
        a.get(i, perm[i] - 1) + a.get(j, perm[j] - 1) - a.get(i, perm[j] - 1) - a.get(j, perm[i] - 1)
    }
}

/// `P_t(π) ∝ exp(t · LP(shape(π)))`.
#[derive(Clone, Debug)]
pub struct ExpFamily {
    t: f64,
    current_lp: Option<f64>,
    pending_lp: f64,
    builder: ShapeBuilder<usize>,
    scratch: Vec<usize>,
}

impl ExpFamily {
    pub fn new(t: f64) -> Self {
        ExpFamily {
            t,
            current_lp: None,
            pending_lp: 0.0,
            builder: ShapeBuilder::new(),
            scratch: Vec::new(),
        }
    }

    fn lp(&mut self, perm: &[usize]) -> f64 {
        let n = perm.len();
        let tables = ln_tables(n.max(1));
        self.builder.clear();
        for &v in perm {
            self.builder.insert(v);
        }
        h_and_lp(&self.builder.parts(), n, &tables, &mut self.scratch).1
    }
}

impl PermutationTarget for ExpFamily {
    fn delta_after_swap(&mut self, perm: &[usize], i: usize, j: usize) -> f64 {
        let old = match self.current_lp {
            Some(v) => v,
            None => {
                let mut orig = perm.to_vec();
                orig.swap(i, j);
                self.lp(&orig)
            }
        };
        self.current_lp = Some(old);
        self.pending_lp = self.lp(perm);
        self.t * (self.pending_lp - old)
    }

    fn commit(&mut self) {
        self.current_lp = Some(self.pending_lp);
    }
}

/// Metropolis chain on S_n with uniformly random transposition proposals.
pub struct MetropolisChain<T, R> {
    perm: Vec<usize>,
    target: T,
    rng: R,
    cfg: McmcConfig,
    burned_in: bool,
    proposals: u64,
    accepted: u64,
}

impl<T: PermutationTarget, R: Rng> MetropolisChain<T, R> {
    /// Starts from a uniformly random permutation of `1..=n`.
    pub fn new(n: usize, target: T, cfg: McmcConfig, mut rng: R) -> Result<Self> {
        cfg.validate()?;
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(&mut rng);
        Ok(MetropolisChain {
            perm,
            target,
            rng,
            cfg,
            burned_in: false,
            proposals: 0,
            accepted: 0,
        })
    }

    fn step(&mut self) {
        let n = self.perm.len();
        if n < 2 {
            return;
        }
        let i = self.rng.random_range(0..n);
        let mut j = self.rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        self.perm.swap(i, j);
        let delta = self.target.delta_after_swap(&self.perm, i, j);
        self.proposals += 1;
        let u: f64 = self.rng.random();
        if delta >= 0.0 || u < delta.exp() {
            self.target.commit();
            self.accepted += 1;
        } else {
            self.perm.swap(i, j);
        }
    }

    fn sweeps(&mut self, count: usize) {
        for _ in 0..count * self.perm.len() {
            self.step();
        }
    }

    /// Next thinned state; the first call runs burn-in instead of thinning.
    pub fn next_draw(&mut self) -> Permutation {
        if self.burned_in {
            self.sweeps(self.cfg.thinning);
        } else {
            self.sweeps(self.cfg.burn_in);
            self.burned_in = true;
        }
        Permutation::from_images_unchecked(self.perm.clone())
    }

    /// Current state as a slice, without advancing.
    pub fn state(&self) -> &[usize] {
        &self.perm
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

/// One checkerboard draw after burn-in.
pub fn sample_checkerboard<R: Rng>(a: Arc<SquareMatrix>, cfg: McmcConfig, rng: R) -> Result<Permutation> {
    let n = a.n();
    Ok(MetropolisChain::new(n, Checkerboard::new(a), cfg, rng)?.next_draw())
}

/// One exponential-family draw after burn-in.
pub fn sample_exp_family<R: Rng>(n: usize, t: f64, cfg: McmcConfig, rng: R) -> Result<Permutation> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
    }
    Ok(MetropolisChain::new(n, ExpFamily::new(t), cfg, rng)?.next_draw())
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    IidUniform,
    IidExponential,
    Ar1 { rho: f64 },
    GaussPair { rho: f64 },
    Checkerboard { a: Arc<SquareMatrix> },
    ExpFamily { t: f64 },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::IidUniform => "iid_uniform",
            ModelKind::IidExponential => "iid_exponential",
            ModelKind::Ar1 { .. } => "ar1",
            ModelKind::GaussPair { .. } => "gauss_pair",
            ModelKind::Checkerboard { .. } => "checkerboard",
            ModelKind::ExpFamily { .. } => "exp_family",
        }
    }

    /// The model's scalar parameter, if it has one.
    pub fn param(&self) -> Option<f64> {
        match self {
            ModelKind::Ar1 { rho } | ModelKind::GaussPair { rho } => Some(*rho),
            ModelKind::ExpFamily { t } => Some(*t),
            _ => None,
        }
    }

    /// Whether the model obeys the IID null hypothesis.
    pub fn is_null(&self) -> bool {
        match self {
            ModelKind::IidUniform | ModelKind::IidExponential => true,
            ModelKind::Ar1 { rho } | ModelKind::GaussPair { rho } => *rho == 0.0,
            ModelKind::ExpFamily { t } => *t == 0.0,
            ModelKind::Checkerboard { a } => {
                let n = a.n();
                (0..n).all(|i| (0..n).all(|j| a.get(i, j) == a.get(0, 0)))
            }
        }
    }
}

/// Data produced by one model draw.
#[derive(Clone, Debug, PartialEq)]
pub enum Draw {
    Sequence(Vec<f64>),
    Permutation(Permutation),
}

impl Draw {
    /// Shape of the insertion tableau.
    pub fn shape(&self) -> Partition {
        match self {
            Draw::Sequence(v) => crate::rsk::rsk_shape(v),
            Draw::Permutation(p) => crate::rsk::rsk_shape(p.images()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: usize,
    pub mcmc: McmcConfig,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, n: usize) -> Result<Self> {
        let spec = ModelSpec {
            kind,
            n,
            mcmc: McmcConfig::for_n(n),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_mcmc(mut self, mcmc: McmcConfig) -> Result<Self> {
        mcmc.validate()?;
        self.mcmc = mcmc;
        Ok(self)
    }

    /// Builds a spec from a model name and its parameters.
    pub fn from_name(
        name: &str,
        n: usize,
        rho: Option<f64>,
        t: Option<f64>,
        matrix: Option<Arc<SquareMatrix>>,
    ) -> Result<Self> {
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::InvalidParameter(format!("model {name} needs --{what}")))
        };
        let kind = match name {
            "iid_uniform" | "iid" => ModelKind::IidUniform,
            "iid_exponential" => ModelKind::IidExponential,
            "ar1" => ModelKind::Ar1 { rho: need(rho, "rho")? },
            "gauss_pair" => ModelKind::GaussPair { rho: need(rho, "rho")? },
            "exp_family" => ModelKind::ExpFamily { t: need(t, "t")? },
            "checkerboard" => ModelKind::Checkerboard {
                a: matrix.ok_or_else(|| {
                    Error::InvalidParameter("model checkerboard needs --matrix".into())
                })?,
            },
            other => return Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        };
        ModelSpec::new(kind, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        match &self.kind {
            ModelKind::Ar1 { rho } if !(rho.abs() < 1.0) => Err(Error::InvalidParameter(format!(
                "AR(1) needs |rho| < 1, got {rho}"
            ))),
            ModelKind::GaussPair { rho } if !(rho.abs() <= 1.0) => Err(Error::InvalidParameter(
                format!("gauss_pair needs |rho| <= 1, got {rho}"),
            )),
            ModelKind::ExpFamily { t } if !t.is_finite() => {
                Err(Error::InvalidParameter(format!("t must be finite, got {t}")))
            }
            ModelKind::Checkerboard { a } if a.n() != self.n => Err(Error::InvalidParameter(
                format!("matrix is {0}x{0} but n = {1}", a.n(), self.n),
            )),
            _ => self.mcmc.validate(),
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> Result<Draw> {
        Ok(match &self.kind {
            ModelKind::IidUniform => Draw::Sequence(sample_iid(self.n, Marginal::Uniform01, rng)),
            ModelKind::IidExponential => {
                Draw::Sequence(sample_iid(self.n, Marginal::Exponential1, rng))
            }
            ModelKind::Ar1 { rho } => Draw::Sequence(sample_ar1(self.n, *rho, rng)?),
            ModelKind::GaussPair { rho } => Draw::Permutation(sample_gauss_pair(self.n, *rho, rng)?),
            ModelKind::Checkerboard { a } => {
                Draw::Permutation(sample_checkerboard(Arc::clone(a), self.mcmc, &mut *rng)?)
            }
            ModelKind::ExpFamily { t } => {
                Draw::Permutation(sample_exp_family(self.n, *t, self.mcmc, &mut *rng)?)
            }
        })
    }

    pub fn draw_shape<R: Rng>(&self, rng: &mut R) -> Result<Partition> {
        Ok(self.draw(rng)?.shape())
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}", self.kind.name(), self.n)?;
        match &self.kind {
            ModelKind::Ar1 { rho } | ModelKind::GaussPair { rho } => write!(f, ", rho={rho}")?,
            ModelKind::ExpFamily { t } => write!(f, ", t={t}")?,
            _ => {}
        }
        f.write_str(")")
    }
}
