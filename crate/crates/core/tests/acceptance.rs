//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `ACCEPTANCE_ONLY=1,5,13` runs a subset; `ACCEPTANCE_LONG=1` adds the
//! optional min-H job at n = 11^6.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use plancherel_core::decomposable::{
    divergence_report, double_proper_dimension, PermutationDistribution,
};
use plancherel_core::models::{
    sample_ar1, sample_iid, Checkerboard, ExpFamily, Marginal, McmcConfig, MetropolisChain, ModelKind,
    ModelSpec, PermutationTarget, SquareMatrix,
};
use plancherel_core::plancherel::{
    exact_moments, min_h_search, plancherel_record, sample_shape, sample_statistics, AcceptanceSet,
    MinHConfig, MomentReport,
};
use plancherel_core::report::{decompose_csv, enumerate_csv, power_csv, simulate_csv, simulate_replicas};
use plancherel_core::rsk::{all_permutations, lex_index};
use plancherel_core::stats::{binomial_se, ks_one_sample, mean, sd, skewness};
use plancherel_core::testing::{
    calibrate_h_monte_carlo, h_test, power_study, shape_set_test_with, HCalibration, PowerConfig, TestKind,
};
use plancherel_core::young::hook_log_sum;
use plancherel_core::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Collects sub-checks of one criterion.
#[derive(Default)]
struct Checks {
    pass: bool,
    parts: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            pass: true,
            parts: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.parts.push(format!("{}{}", if ok { "" } else { "[x] " }, what));
    }

    fn done(self) -> Outcome {
        Outcome::new(self.pass, self.parts.join("; "))
    }
}

fn p(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn moments_121() -> &'static MomentReport {
    static M: OnceLock<MomentReport> = OnceLock::new();
    M.get_or_init(|| exact_moments(121).unwrap())
}

const SEED: u64 = 1;

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::new();
    let count = partitions_of(11).count();
    c.check(count == 56, format!("{count} shapes of 11"));
    let prob = plancherel_record(&p(&[5, 3, 2, 1])).prob;
    c.check((prob - 0.1337).abs() <= 5e-5, format!("p(5,3,2,1) = {prob:.6}"));
    let expected: BTreeSet<Vec<usize>> = [
        &[7, 2, 1, 1][..],
        &[6, 4, 1],
        &[6, 3, 2],
        &[6, 3, 1, 1],
        &[6, 2, 2, 1],
        &[6, 2, 1, 1, 1],
        &[5, 4, 2],
        &[5, 4, 1, 1],
        &[5, 3, 3],
        &[5, 3, 2, 1],
        &[5, 3, 1, 1, 1],
        &[5, 2, 2, 2],
        &[5, 2, 2, 1, 1],
        &[5, 2, 1, 1, 1, 1],
        &[4, 4, 2, 1],
        &[4, 4, 1, 1, 1],
        &[4, 3, 3, 1],
        &[4, 3, 2, 2],
        &[4, 3, 2, 1, 1],
        &[4, 3, 1, 1, 1, 1],
        &[4, 2, 2, 2, 1],
        &[4, 2, 2, 1, 1, 1],
        &[4, 2, 1, 1, 1, 1, 1],
        &[3, 3, 3, 1, 1],
        &[3, 3, 2, 2, 1],
        &[3, 3, 2, 1, 1, 1],
        &[3, 2, 2, 2, 1, 1],
    ]
    .iter()
    .map(|s| s.to_vec())
    .collect();
    let set = AcceptanceSet::build(11, 0.05).unwrap();
    let members: BTreeSet<Vec<usize>> = set.members().into_iter().map(|r| r.shape.into_parts()).collect();
    c.check(
        members == expected,
        format!("acceptance set has {} shapes, equal to the 27-row table: {}", members.len(), members == expected),
    );
    c.check(
        (set.mass() - 0.951).abs() <= 5e-4,
        format!("mass {:.6}", set.mass()),
    );
    let hooks = hook_lengths(&p(&[4, 3, 2, 1, 1]));
    let table = vec![vec![8, 5, 3, 1], vec![6, 3, 1], vec![4, 1], vec![2], vec![1]];
    c.check(hooks.rows() == table.as_slice(), "hook table of (4,3,2,1,1)".into());
    let f = syt_count(&p(&[4, 3, 2, 1, 1])).unwrap();
    c.check(f == BigUint::from(2310u32), format!("f = {f}"));
    let elapsed = start.elapsed().as_secs_f64();
    c.check(elapsed < 1.0, format!("{elapsed:.3} s"));
    c.done()
}

fn criterion_2() -> Outcome {
    let m = moments_121();
    let mut c = Checks::new();
    c.check((m.ave - 1.46).abs() <= 0.01, format!("E[LP]/sqrt(n) = {:.6} (target 1.46 +- 0.01)", m.ave));
    c.check((m.sd - 1.8468).abs() <= 0.001, format!("SD[LP] = {:.6} (target 1.8468 +- 0.001)", m.sd));
    c.check(
        (m.total_prob - 1.0).abs() <= 1e-9,
        format!("total probability 1 {:+.1e}", m.total_prob - 1.0),
    );
    c.done()
}

fn mc_lp(n: usize, replicas: usize, seed: u64) -> (f64, f64) {
    let lp: Vec<f64> = sample_statistics(n, replicas, seed, &Exec::default())
        .into_iter()
        .map(|(_, lp)| lp)
        .collect();
    (mean(&lp) / (n as f64).sqrt(), sd(&lp))
}

fn criterion_3() -> Outcome {
    let mut c = Checks::new();
    let (ave, s1331) = mc_lp(1331, 10_000, SEED);
    c.check((ave - 1.72).abs() <= 0.01, format!("n=1331 ave {ave:.4}"));
    c.check(
        (s1331 / 3.7652 - 1.0).abs() <= 0.02,
        format!("n=1331 sd {s1331:.4} ({:+.2}% vs 3.7652, gate 2%)", 100.0 * (s1331 / 3.7652 - 1.0)),
    );
    let (ave, s) = mc_lp(14641, 1000, SEED + 1);
    c.check((ave - 1.82).abs() <= 0.01, format!("n=14641 ave {ave:.4}"));
    c.check(
        (s / 6.7102 - 1.0).abs() <= 0.05,
        format!("n=14641 sd {s:.4} ({:+.2}% vs 6.7102, gate 5%)", 100.0 * (s / 6.7102 - 1.0)),
    );
    let s11 = exact_moments(11).unwrap().sd;
    for (n, sdv) in [(11usize, s11), (121, moments_121().sd), (1331, s1331)] {
        let r = sdv / (0.57 * (n as f64).powf(0.25));
        c.check((r - 1.0).abs() <= 0.15, format!("n={n} sd/0.57n^0.25 = {r:.3}"));
    }
    c.done()
}

fn criterion_4() -> Outcome {
    let n = 14641;
    let mut c = Checks::new();
    for (k, (rho, target, tol, sd_target)) in [(0.5, 63008.0, 1.0, 3.00), (0.95, 63017.0, 3.0, 9.23), (0.995, 63129.0, 30.0, 101.35)]
        .into_iter()
        .enumerate()
    {
        let hs: Vec<f64> = Exec::default()
            .map(100, |r| {
                let xs = sample_ar1(n, rho, &mut replica_rng(SEED + 10 + k as u64, r as u64)).unwrap();
                plancherel_record(&rsk_shape(&xs)).h
            });
        let (m, s) = (mean(&hs), sd(&hs));
        c.check((m - target).abs() <= tol, format!("rho={rho} mean H {m:.2} (target {target} +- {tol})"));
        c.check(
            (s / sd_target - 1.0).abs() <= 0.30,
            format!("sd {s:.2} ({:+.1}% vs {sd_target})", 100.0 * (s / sd_target - 1.0)),
        );
    }
    c.done()
}

fn criterion_5() -> Outcome {
    let perm = Permutation::new(vec![5, 2, 11, 9, 8, 1, 3, 10, 4, 7, 6]).unwrap();
    let kappa = level_process(&perm);
    let mut c = Checks::new();
    c.check(
        kappa.levels() == [1, 2, 1, 1, 3, 1, 2, 3, 4, 2, 5],
        format!("kappa {:?}", kappa.levels()),
    );
    let pair = rsk(&perm);
    let rows = vec![vec![1, 3, 4, 6], vec![2, 7, 10], vec![5, 8], vec![9], vec![11]];
    c.check(pair.p().rows() == rows.as_slice(), format!("P rows {:?}", pair.p().rows()));
    c.check(kappa.tableau().rows() == rows.as_slice(), "level sets match P".into());
    c.done()
}

fn criterion_6() -> Outcome {
    let mut c = Checks::new();
    let mut bijective = true;
    for n in 0..=7 {
        for perm in all_permutations(n) {
            bijective &= inverse_rsk(&rsk(&perm)).unwrap() == perm;
        }
    }
    c.check(bijective, "inverse_rsk(rsk(pi)) = pi for n <= 7".into());
    let (mut sums, mut extremes) = (true, true);
    for n in 1..=30 {
        let nfact = factorial(n);
        let mut total = BigUint::from(0u32);
        let mut ones = 0;
        for l in partitions_of(n) {
            let f = syt_count(&l).unwrap();
            let sq = &f * &f;
            extremes &= sq <= nfact;
            ones += usize::from(f.is_one());
            total += sq;
        }
        sums &= total == nfact;
        extremes &= n < 2 || ones == 2;
    }
    c.check(sums, "sum of f^2 = n! for n <= 30".into());
    c.check(extremes, "two shapes with f = 1 and f <= sqrt(n!) for n <= 30".into());
    c.done()
}

fn criterion_7() -> Outcome {
    let n = 1000;
    let z: Vec<f64> = Exec::default().map(10_000, |r| {
        let xs = sample_iid(n, Marginal::Exponential1, &mut replica_rng(SEED + 20, r as u64));
        let y = y_process(&xs).unwrap();
        z_rescale(&y, n).level(1).unwrap()[0]
    });
    let ks = ks_one_sample(&z, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x).exp() });
    Outcome::new(
        ks.p_value > 0.01,
        format!("KS D = {:.5}, p = {:.4} (gate p > 0.01), mean {:.4}", ks.statistic, ks.p_value, mean(&z)),
    )
}

fn criterion_8() -> Outcome {
    let reps = 10_000;
    let alpha = 0.05;
    let band = 3.0 * binomial_se(alpha, reps);
    let mut c = Checks::new();
    for n in [11usize, 121] {
        let set = AcceptanceSet::build(n, alpha).unwrap();
        let cal = if n == 121 {
            HCalibration::from_moments(moments_121())
        } else {
            HCalibration::from_moments(&exact_moments(n).unwrap())
        };
        let outcomes: Vec<(bool, bool)> = Exec::default().map(reps, |r| {
            let shape = sample_shape(n, &mut replica_rng(SEED + 30 + n as u64, r as u64));
            (
                !shape_set_test_with(&shape, &set).accept,
                !h_test(&shape, &cal, alpha).unwrap().accept,
            )
        });
        let set_rate = outcomes.iter().filter(|o| o.0).count() as f64 / reps as f64;
        let h_rate = outcomes.iter().filter(|o| o.1).count() as f64 / reps as f64;
        c.check(
            (set_rate - alpha).abs() <= band,
            format!("n={n} shape-set size {set_rate:.4}"),
        );
        c.check((h_rate - alpha).abs() <= band, format!("n={n} H size {h_rate:.4}"));
    }
    c.parts.push(format!("band 0.05 +- {band:.4}"));
    c.done()
}

/// Frequencies of a chain over S_n and their batch-means standard errors.
fn chain_frequencies<T: PermutationTarget>(n: usize, target: T, draws: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let size: usize = (1..=n).product();
    let batches = 1000;
    let per = draws / batches;
    let mut chain = MetropolisChain::new(n, target, McmcConfig::for_n(n), replica_rng(seed, 0)).unwrap();
    let mut batch_counts = vec![vec![0u32; size]; batches];
    for counts in batch_counts.iter_mut() {
        for _ in 0..per {
            counts[lex_index(chain.next_draw().images())] += 1;
        }
    }
    let mut freq = vec![0.0; size];
    let mut sigma = vec![0.0; size];
    for k in 0..size {
        let fs: Vec<f64> = batch_counts.iter().map(|b| b[k] as f64 / per as f64).collect();
        freq[k] = mean(&fs);
        sigma[k] = sd(&fs) / (batches as f64).sqrt();
    }
    (freq, sigma)
}

fn compare(label: &str, exact: &[f64], freq: &[f64], sigma: &[f64]) -> (bool, String) {
    let worst = exact
        .iter()
        .zip(freq)
        .zip(sigma)
        .map(|((e, f), s)| (f - e).abs() / s.max(1e-12))
        .fold(0.0, f64::max);
    (worst <= 3.0, format!("{label}: max |freq - p|/sigma = {worst:.2}"))
}

fn normalized(weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

fn criterion_9() -> Outcome {
    let draws = 1_000_000;
    let mut c = Checks::new();
    for n in [3usize, 4] {
        let a = Arc::new(SquareMatrix::from_fn(n, |i, j| {
            0.9 * ((i + 2 * j) % 3) as f64 - 0.4 * (i as f64) * (j as f64) / n as f64
        }));
        let exact = normalized(all_permutations(n).iter().map(|p| a.log_weight(p).exp()).collect());
        let (freq, sigma) = chain_frequencies(n, Checkerboard::new(Arc::clone(&a)), draws, SEED + 40 + n as u64);
        let (ok, msg) = compare(&format!("checkerboard S{n}"), &exact, &freq, &sigma);
        c.check(ok, msg);
        for t in [1.0, -1.0] {
            let exact = normalized(
                all_permutations(n)
                    .iter()
                    .map(|p| (t * plancherel_record(&rsk_shape(p.images())).lp).exp())
                    .collect(),
            );
            let (freq, sigma) = chain_frequencies(n, ExpFamily::new(t), draws, SEED + 50 + n as u64);
            let (ok, msg) = compare(&format!("exp-family S{n} t={t}"), &exact, &freq, &sigma);
            c.check(ok, msg);
        }
    }
    c.done()
}

fn criterion_10() -> Outcome {
    let mut c = Checks::new();
    let mut agree = true;
    for n in 1..=8 {
        let brute = partitions_of(n).map(|l| hook_log_sum(&l)).fold(f64::INFINITY, f64::min);
        let (_, h) = min_h_search(n, &MinHConfig::default());
        agree &= (h - brute).abs() < 1e-9;
    }
    c.check(agree, "min_h_search = exhaustive minimum for n <= 8".into());
    if std::env::var("ACCEPTANCE_LONG").is_ok_and(|v| v == "1") {
        let n = 11usize.pow(6);
        let (shape, h) = min_h_search(n, &MinHConfig::default());
        c.check(h <= 11_859_260.0, format!("n=11^6 H_min = {h:.2} (gate <= 11859260)"));
        let cal = calibrate_h_monte_carlo(n, 16, SEED + 60, &Exec::default()).unwrap();
        let d = h_test(&shape, &cal, 0.05).unwrap();
        let z = d.z.unwrap_or(f64::NAN);
        c.check(!d.accept && z.abs() > 10.0, format!("h_test on the minimizer: z = {z:.1}"));
    } else {
        c.parts.push("n=11^6 job skipped (set ACCEPTANCE_LONG=1)".into());
    }
    c.done()
}

fn criterion_11() -> Outcome {
    let mut c = Checks::new();
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        for seed in 0..10u64 {
            let mut rng = replica_rng(SEED + 70 + seed, n as u64);
            let size: usize = (1..=n).product();
            let w: Vec<f64> = (0..size).map(|_| rng.random_range(0.01..1.0)).collect();
            let d = PermutationDistribution::explicit(n, normalized(w)).unwrap();
            let r = divergence_report(&d, &Exec::default()).unwrap();
            worst = worst.max((r.kl_d_to_uniform - r.kl_d_to_proper - r.kl_proper_to_uniform).abs());
        }
    }
    c.check(worst <= 1e-8, format!("Pythagorean identity, max gap {worst:.1e}"));
    let d = PermutationDistribution::shape_uniform(p(&[5, 3, 2, 1])).unwrap();
    let r = divergence_report(&d, &Exec::default()).unwrap();
    let csv = decompose_csv(&[(r.clone(), Some(7.5))]);
    let finite = [r.kl_proper_to_uniform, r.kl_d_to_proper, r.kl_d_to_uniform]
        .iter()
        .all(|x| x.is_finite());
    c.check(
        finite && csv.lines().count() == 2 && csv.trim_end().ends_with(&report::fmt_f64(7.5)),
        format!(
            "n=11 (5,3,2,1): D(P*|U) = {:.4}, D(d|P*) = {:.4}, D(d|U) = {:.4} (exp = {:.3}; reference 7.5, informational)",
            r.kl_proper_to_uniform,
            r.kl_d_to_proper,
            r.kl_d_to_uniform,
            r.kl_d_to_uniform.exp()
        ),
    );
    let dim = double_proper_dimension(4).unwrap();
    c.check(dim == 14, format!("double_proper_dimension(4) = {dim}"));
    c.done()
}

fn criterion_12() -> Outcome {
    let hs: Vec<f64> = sample_statistics(14641, 20_000, SEED + 80, &Exec::default())
        .into_iter()
        .map(|(h, _)| h)
        .collect();
    let g = skewness(&hs);
    Outcome::new(g.abs() < 0.15, format!("skewness of H at n=14641 = {g:.4} (gate |g| < 0.15)"))
}

fn criterion_13() -> Outcome {
    let mut c = Checks::new();
    let runs: Vec<Exec> = vec![Exec::sequential(), Exec::with_workers(2), Exec::with_workers(3), Exec::default()];
    let spec = ModelSpec::new(ModelKind::Ar1 { rho: 0.3 }, 300).unwrap();
    let sims: Vec<String> = runs
        .iter()
        .map(|e| simulate_csv(&simulate_replicas(&spec, 500, SEED, e).unwrap()))
        .collect();
    c.check(sims.windows(2).all(|w| w[0] == w[1]), "simulate CSV".into());
    let grid = vec![
        ModelSpec::new(ModelKind::IidUniform, 60).unwrap(),
        ModelSpec::new(ModelKind::ExpFamily { t: 0.5 }, 8).unwrap(),
    ];
    let powers: Vec<String> = runs
        .iter()
        .map(|e| {
            let cfg = PowerConfig {
                test: TestKind::H,
                replicas: 200,
                calibration_replicas: 500,
                seed: SEED,
                exec: *e,
                ..PowerConfig::default()
            };
            power_csv(&power_study(&grid, &cfg).unwrap())
        })
        .collect();
    c.check(powers.windows(2).all(|w| w[0] == w[1]), "power CSV".into());
    let sets: Vec<String> = runs
        .iter()
        .map(|e| {
            let set = AcceptanceSet::build_with(40, 0.05, e).unwrap();
            let m = plancherel::exact_moments_with(40, 130, e).unwrap();
            format!("{}{:?}", enumerate_csv(&set.members(), Some(&set)), m)
        })
        .collect();
    c.check(sets.windows(2).all(|w| w[0] == w[1]), "enumerate CSV and exact moments".into());
    let decs: Vec<String> = runs
        .iter()
        .map(|e| {
            let d = PermutationDistribution::shape_uniform(p(&[3, 2, 1, 1])).unwrap();
            decompose_csv(&[(divergence_report(&d, e).unwrap(), Some(7.5))])
        })
        .collect();
    c.check(decs.windows(2).all(|w| w[0] == w[1]), "decompose CSV".into());
    c.done()
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() {
    let only: Option<BTreeSet<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let criteria: [Criterion; 13] = [
        (1, "exact n=11 golden suite", criterion_1),
        (2, "exact n=121 enumeration", criterion_2),
        (3, "Monte Carlo LP table", criterion_3),
        (4, "AR(1) table", criterion_4),
        (5, "worked example", criterion_5),
        (6, "bijection and counting", criterion_6),
        (7, "rescaled exponential process", criterion_7),
        (8, "test size", criterion_8),
        (9, "MCMC oracle", criterion_9),
        (10, "min-H", criterion_10),
        (11, "decomposability", criterion_11),
        (12, "H-distribution shape", criterion_12),
        (13, "determinism", criterion_13),
    ];
    let mut failed = Vec::new();
    let mut ran = 0;
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        ran += 1;
        println!(
            "criterion {id:>2} {} {name} [{:.1} s]: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        std::io::stdout().flush().ok();
        if !outcome.pass {
            failed.push(id);
        }
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
