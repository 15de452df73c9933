//! Tests of the IID hypothesis based on the insertion shape, and a power
//! harness for comparing them against the alternative models.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::{replica_rng, Exec};
use crate::models::ModelSpec;
use crate::plancherel::{
    exact_moments_with, plancherel_record, MomentReport, sample_statistics, AcceptanceSet, DEFAULT_ENUMERATION_CAP,
};
use crate::rsk::Permutation;
use crate::stats::{binomial_se, mean, normal_quantile, sd};
use crate::young::Partition;

/// Default test level.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Offset separating calibration streams from data streams under one seed.
const CALIBRATION_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

/// What the observed statistic was compared against.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    Gaussian { mean: f64, sd: f64 },
    AcceptanceSet { n: usize, size: usize, mass: f64 },
    Empirical { replicas: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestDecision {
    pub statistic: &'static str,
    pub n: usize,
    pub observed: f64,
    pub reference: Reference,
    pub z: Option<f64>,
    pub p_value: Option<f64>,
    pub accept: bool,
    pub alpha: f64,
    /// Set when the reference distribution has zero spread.
    pub degenerate: bool,
}

impl TestDecision {
    /// Single-line `key=value` record.
    pub fn record_line(&self) -> String {
        let mut s = format!(
            "test={} n={} observed={:.17e}",
            self.statistic, self.n, self.observed
        );
        match &self.reference {
            Reference::Gaussian { mean, sd } => {
                s += &format!(" mean={mean:.17e} sd={sd:.17e}");
            }
            Reference::AcceptanceSet { size, mass, .. } => {
                s += &format!(" set_size={size} set_mass={mass:.17e}");
            }
            Reference::Empirical { replicas } => s += &format!(" replicas={replicas}"),
        }
        if let Some(z) = self.z {
            s += &format!(" z={z:.17e}");
        }
        if let Some(p) = self.p_value {
            s += &format!(" p={p:.17e}");
        }
        s += &format!(
            " alpha={} degenerate={} decision={}",
            self.alpha,
            self.degenerate,
            if self.accept { "accept" } else { "reject" }
        );
        s
    }
}

impl fmt::Display for TestDecision {
    /// Human-readable summary.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.accept {
            "consistent with IID"
        } else {
            "IID rejected"
        };
        match &self.reference {
            Reference::AcceptanceSet { size, mass, .. } => write!(
                f,
                "shape-set test at alpha={}: shape {} the {size}-shape set of mass {mass:.4}; {verdict}",
                self.alpha,
                if self.accept { "is in" } else { "is outside" }
            ),
            Reference::Gaussian { mean, sd } => write!(
                f,
                "H test at alpha={}: H={:.4}, reference {mean:.4} ± {sd:.4}, z={:.3}; {verdict}",
                self.alpha,
                self.observed,
                self.z.unwrap_or(f64::NAN)
            ),
            Reference::Empirical { replicas } => write!(
                f,
                "H test (Monte Carlo, {replicas} replicas) at alpha={}: H={:.4}, p={:.4}; {verdict}",
                self.alpha,
                self.observed,
                self.p_value.unwrap_or(f64::NAN)
            ),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha = {alpha} not in (0, 1)")))
    }
}

/// Accepts iff the shape belongs to the highest-probability set of mass
/// `1 − α`.
pub fn shape_set_test(shape: &Partition, n: usize, alpha: f64) -> Result<TestDecision> {
    check_alpha(alpha)?;
    if shape.n() != n {
        return Err(Error::InvalidParameter(format!(
            "shape has {} cells, expected {n}",
            shape.n()
        )));
    }
    if n > DEFAULT_ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            n,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    Ok(shape_set_test_with(shape, &AcceptanceSet::build(n, alpha)?))
}

/// [`shape_set_test`] against a prebuilt set.
pub fn shape_set_test_with(shape: &Partition, set: &AcceptanceSet) -> TestDecision {
    TestDecision {
        statistic: "shape_set",
        n: set.n(),
        observed: plancherel_record(shape).prob,
        reference: Reference::AcceptanceSet {
            n: set.n(),
            size: set.len(),
            mass: set.mass(),
        },
        z: None,
        p_value: None,
        accept: set.contains(shape),
        alpha: set.alpha(),
        degenerate: false,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CalibrationSource {
    Exact,
    MonteCarlo { replicas: usize, seed: u64 },
}

/// Null mean and standard deviation of `H` for one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HCalibration {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub source: CalibrationSource,
    /// Sorted simulated `H` values (Monte Carlo calibrations only).
    samples: Vec<f64>,
}

impl HCalibration {
    /// Exact calibration from precomputed moments.
    pub fn from_moments(m: &MomentReport) -> Self {
        HCalibration {
            n: m.n,
            mean: m.mean_h(),
            sd: m.sd_h(),
            source: CalibrationSource::Exact,
            samples: Vec::new(),
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Exact calibration when `n` is within the enumeration cap, Monte Carlo
/// otherwise.
pub fn calibrate_h(n: usize, replicas: usize, seed: u64, exec: &Exec) -> Result<HCalibration> {
    if n <= DEFAULT_ENUMERATION_CAP {
        return Ok(HCalibration::from_moments(&exact_moments_with(
            n,
            DEFAULT_ENUMERATION_CAP,
            exec,
        )?));
    }
    calibrate_h_monte_carlo(n, replicas, seed, exec)
}

/// Monte Carlo calibration regardless of `n`; keeps the samples for
/// [`h_test_empirical`].
pub fn calibrate_h_monte_carlo(n: usize, replicas: usize, seed: u64, exec: &Exec) -> Result<HCalibration> {
    if replicas < 2 {
        return Err(Error::InvalidParameter("calibration needs at least 2 replicas".into()));
    }
    let mut hs: Vec<f64> = sample_statistics(n, replicas, seed, exec)
        .into_iter()
        .map(|(h, _)| h)
        .collect();
    let (m, s) = (mean(&hs), sd(&hs));
    hs.sort_by(f64::total_cmp);
    Ok(HCalibration {
        n,
        mean: m,
        sd: s,
        source: CalibrationSource::MonteCarlo { replicas, seed },
        samples: hs,
    })
}

/// Two-sided z-test on `H` with a Gaussian reference.
pub fn h_test(shape: &Partition, cal: &HCalibration, alpha: f64) -> Result<TestDecision> {
    check_alpha(alpha)?;
    if shape.n() != cal.n {
        return Err(Error::InvalidParameter(format!(
            "shape has {} cells, calibration is for n = {}",
            shape.n(),
            cal.n
        )));
    }
    let h = plancherel_record(shape).h;
    let reference = Reference::Gaussian {
        mean: cal.mean,
        sd: cal.sd,
    };
    if cal.sd <= 1e-12 {
        let accept = (h - cal.mean).abs() <= 1e-9 * cal.mean.abs().max(1.0);
        return Ok(TestDecision {
            statistic: "h",
            n: cal.n,
            observed: h,
            reference,
            z: None,
            p_value: None,
            accept,
            alpha,
            degenerate: true,
        });
    }
    let z = (h - cal.mean) / cal.sd;
    let crit = normal_quantile(1.0 - alpha / 2.0);
    Ok(TestDecision {
        statistic: "h",
        n: cal.n,
        observed: h,
        reference,
        z: Some(z),
        p_value: Some(2.0 * crate::stats::normal_cdf(-z.abs())),
        accept: z.abs() <= crit,
        alpha,
        degenerate: false,
    })
}

/// Two-sided Monte Carlo p-value of `H` against simulated null values,
/// `p = min(1, 2·min(#{H_i ≤ h} + 1, #{H_i ≥ h} + 1) / (R + 1))`.
pub fn h_test_empirical(shape: &Partition, cal: &HCalibration, alpha: f64) -> Result<TestDecision> {
    check_alpha(alpha)?;
    if cal.samples.is_empty() {
        return Err(Error::InvalidParameter(
            "empirical H test needs a Monte Carlo calibration".into(),
        ));
    }
    if shape.n() != cal.n {
        return Err(Error::InvalidParameter(format!(
            "shape has {} cells, calibration is for n = {}",
            shape.n(),
            cal.n
        )));
    }
    let h = plancherel_record(shape).h;
    let r = cal.samples.len();
    let below = cal.samples.partition_point(|&x| x <= h);
    let above = r - cal.samples.partition_point(|&x| x < h);
    let p = (2.0 * (below.min(above) + 1) as f64 / (r + 1) as f64).min(1.0);
    Ok(TestDecision {
        statistic: "h_mc",
        n: cal.n,
        observed: h,
        reference: Reference::Empirical { replicas: r },
        z: None,
        p_value: Some(p),
        accept: p > alpha,
        alpha,
        degenerate: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestKind {
    ShapeSet,
    H,
    HEmpirical,
}

impl TestKind {
    pub fn name(&self) -> &'static str {
        match self {
            TestKind::ShapeSet => "shape-set",
            TestKind::H => "h",
            TestKind::HEmpirical => "h-mc",
        }
    }
}

impl std::str::FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shape-set" | "shape_set" => Ok(TestKind::ShapeSet),
            "h" => Ok(TestKind::H),
            "h-mc" | "h_mc" => Ok(TestKind::HEmpirical),
            other => Err(Error::InvalidParameter(format!("unknown test {other:?}"))),
        }
    }
}

/// A test ready to apply to shapes of one size.
#[derive(Clone, Debug)]
pub enum PreparedTest {
    ShapeSet(AcceptanceSet),
    H(HCalibration),
    HEmpirical(HCalibration),
}

impl PreparedTest {
    pub fn prepare(kind: TestKind, n: usize, alpha: f64, calibration_replicas: usize, seed: u64, exec: &Exec) -> Result<Self> {
        check_alpha(alpha)?;
        let cal_seed = seed.wrapping_add(CALIBRATION_SEED_OFFSET);
        Ok(match kind {
            TestKind::ShapeSet => PreparedTest::ShapeSet(AcceptanceSet::build_with(n, alpha, exec)?),
            TestKind::H => PreparedTest::H(calibrate_h(n, calibration_replicas, cal_seed, exec)?),
            TestKind::HEmpirical => PreparedTest::HEmpirical(calibrate_h_monte_carlo(
                n,
                calibration_replicas,
                cal_seed,
                exec,
            )?),
        })
    }

    pub fn apply(&self, shape: &Partition, alpha: f64) -> Result<TestDecision> {
        match self {
            PreparedTest::ShapeSet(set) => Ok(shape_set_test_with(shape, set)),
            PreparedTest::H(cal) => h_test(shape, cal, alpha),
            PreparedTest::HEmpirical(cal) => h_test_empirical(shape, cal, alpha),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerRow {
    pub model: String,
    pub param: Option<f64>,
    pub n: usize,
    pub replicas: usize,
    pub rejections: usize,
    pub power: f64,
    pub se: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PowerTable {
    pub rows: Vec<PowerRow>,
}

#[derive(Clone, Copy, Debug)]
pub struct PowerConfig {
    pub test: TestKind,
    pub alpha: f64,
    pub replicas: usize,
    pub calibration_replicas: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            test: TestKind::H,
            alpha: DEFAULT_ALPHA,
            replicas: 1000,
            calibration_replicas: 2000,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

/// Rejection rate of the chosen test under each model of the grid.
///
/// Replica `r` of grid row `m` uses stream `(m << 32) | r` of the master
/// seed; tests are prepared once per distinct `n`.
pub fn power_study(grid: &[ModelSpec], cfg: &PowerConfig) -> Result<PowerTable> {
    if cfg.replicas == 0 {
        return Err(Error::InvalidParameter("replicas must be at least 1".into()));
    }
    let mut prepared: Vec<(usize, PreparedTest)> = Vec::new();
    let mut rows = Vec::with_capacity(grid.len());
    for (m, spec) in grid.iter().enumerate() {
        spec.validate()?;
        if !prepared.iter().any(|(n, _)| *n == spec.n) {
            let t = PreparedTest::prepare(
                cfg.test,
                spec.n,
                cfg.alpha,
                cfg.calibration_replicas,
                cfg.seed,
                &cfg.exec,
            )?;
            prepared.push((spec.n, t));
        }
        let test = &prepared.iter().find(|(n, _)| *n == spec.n).unwrap().1;
        let outcomes = cfg.exec.map(cfg.replicas, |r| -> Result<bool> {
            let mut rng = replica_rng(cfg.seed, ((m as u64) << 32) | r as u64);
            let shape = spec.draw_shape(&mut rng)?;
            Ok(!test.apply(&shape, cfg.alpha)?.accept)
        });
        let rejections = outcomes
            .into_iter()
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&x| x)
            .count();
        let power = rejections as f64 / cfg.replicas as f64;
        rows.push(PowerRow {
            model: spec.kind.name().to_string(),
            param: spec.kind.param(),
            n: spec.n,
            replicas: cfg.replicas,
            rejections,
            power,
            se: binomial_se(power, cfg.replicas),
        });
    }
    Ok(PowerTable { rows })
}

/// Cycle type of `δ`, where `δ(π_i) = π_{i+1}` cyclically.
pub fn delta_dynamics(perm: &Permutation) -> Partition {
    let delta = delta_permutation(perm);
    cycle_type(&delta)
}

/// The permutation `δ` itself.
pub fn delta_permutation(perm: &Permutation) -> Permutation {
    let p = perm.images();
    let n = p.len();
    let mut delta = vec![0; n];
    for i in 0..n {
        delta[p[i] - 1] = p[(i + 1) % n];
    }
    Permutation::from_images_unchecked(delta)
}

pub fn cycle_type(perm: &Permutation) -> Partition {
    let n = perm.n();
    let mut seen = vec![false; n];
    let mut lengths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm.images()[i] - 1;
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    Partition::from_parts_unchecked(lengths)
}
