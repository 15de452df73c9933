mod input;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plancherel_core::decomposable::{divergence_report, PermutationDistribution};
use plancherel_core::models::{ModelSpec, SquareMatrix};
use plancherel_core::plancherel::{
    enumerate_records, min_h_search, plancherel_record, AcceptanceSet, MinHConfig,
};
use plancherel_core::report::{self, simulate_replicas};
use plancherel_core::stats::{mean, sd};
use plancherel_core::testing::{power_study, PowerConfig, PreparedTest, TestKind, DEFAULT_ALPHA};
use plancherel_core::{level_process, replica_rng, rsk, y_process, Exec, Partition};
use rand::Rng;

use input::{parse_grid, parse_matrix, parse_sequence, InputError};

#[derive(Parser, Debug)]
#[command(name = "plancherel", version, about = "Young-tableau statistics for randomness testing")]
struct Cli {
    /// Master seed; every replica draws from (seed, replica index).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores, 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Directory for CSV/SVG output; CSV goes to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// iid_uniform, iid_exponential, ar1, gauss_pair, checkerboard, exp_family.
    #[arg(long, default_value = "iid_uniform")]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// Square matrix file for the checkerboard model.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Figure {
    YProcess,
    HHist,
    MinShape,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TestArg {
    ShapeSet,
    H,
    HMc,
}

impl From<TestArg> for TestKind {
    fn from(t: TestArg) -> Self {
        match t {
            TestArg::ShapeSet => TestKind::ShapeSet,
            TestArg::H => TestKind::H,
            TestArg::HMc => TestKind::HEmpirical,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Insertion tableau of a permutation or real sample.
    Rsk {
        /// File of whitespace/comma separated values; `-` reads stdin.
        input: PathBuf,
        /// Also print the P and Q rows (and write pq.csv under --out).
        #[arg(long)]
        emit_pq: bool,
    },
    /// Full Plancherel table with the acceptance-set marker.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Per-replica H, LP and shape under a model.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1000)]
        replicas: usize,
    },
    /// Tests a permutation, sample or shape for randomness. Exit 0 accept, 1 reject.
    Test {
        /// Sequence file; omit when --shape is given.
        input: Option<PathBuf>,
        /// Shape such as 5,3,2,1 instead of an input file.
        #[arg(long, conflicts_with = "input")]
        shape: Option<String>,
        #[arg(long = "test", value_enum, default_value = "shape-set")]
        test: TestArg,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Calibration replicas when n is too large to enumerate.
        #[arg(long, default_value_t = 2000)]
        replicas: usize,
    },
    /// CSV (and SVG under --out) for one figure.
    Figures {
        #[arg(long, value_enum)]
        figure: Figure,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        replicas: usize,
        /// y-process: tableau columns to emit (1-based); all when empty.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<usize>,
        /// y-process: upper end of the uniform value range.
        #[arg(long, default_value_t = 3_000_000.0)]
        range: f64,
        /// h-hist: number of bins; defaults to about sqrt(replicas).
        #[arg(long)]
        bins: Option<usize>,
        /// h-hist: model to simulate.
        #[arg(long, default_value = "iid_uniform")]
        model: String,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Power table over a grid file of `model,n[,param]` lines.
    Power {
        grid: PathBuf,
        #[arg(long = "test", value_enum, default_value = "h")]
        test: TestArg,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        replicas: usize,
        #[arg(long, default_value_t = 2000)]
        calibration_replicas: usize,
        /// Matrix for checkerboard rows.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Divergence decomposition for the uniform law on one RSK shape class.
    Decompose {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        shape: String,
        /// Reference value attached to the CSV row.
        #[arg(long)]
        reference: Option<f64>,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure {
            code: 2,
            msg: e.to_string(),
        }
    }
}

impl From<plancherel_core::Error> for Failure {
    fn from(e: plancherel_core::Error) -> Self {
        Failure {
            code: 2,
            msg: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        msg: format!("{}: {e}", path.display()),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| io_failure(path, e))
    } else {
        fs::read_to_string(path).map_err(|e| io_failure(path, e))
    }
}

fn load_matrix(path: &Option<PathBuf>) -> Result<Option<Arc<SquareMatrix>>, Failure> {
    match path {
        Some(p) => {
            let text = read_text(p)?;
            let m = parse_matrix(&text).map_err(|e| Failure {
                code: 2,
                msg: format!("{}: {e}", p.display()),
            })?;
            Ok(Some(Arc::new(m)))
        }
        None => Ok(None),
    }
}

fn parse_shape(s: &str) -> Result<Partition, Failure> {
    Ok(s.parse::<Partition>()?)
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    /// Writes `name` under --out, or CSV to stdout without it. SVG is only
    /// written to a directory.
    fn emit(&self, name: &str, content: &str) -> Result<(), Failure> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
                let path = dir.join(name);
                fs::write(&path, content).map_err(|e| io_failure(&path, e))
            }
            None if name.ends_with(".csv") => {
                print!("{content}");
                Ok(())
            }
            None => Ok(()),
        }
    }
}

fn rows_line(rows: &[Vec<usize>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let exec = Exec::with_workers(cli.workers);
    let out = Output { dir: cli.out };
    match cli.cmd {
        Command::Rsk { input, emit_pq } => {
            let perm = parse_sequence(&read_text(&input)?)?.permutation();
            let pair = rsk(&perm);
            let rec = plancherel_record(pair.shape());
            let kappa = level_process(&perm);
            println!("shape={}", pair.shape());
            println!("H={}", report::fmt_f64(rec.h));
            println!("LP={}", report::fmt_f64(rec.lp));
            println!(
                "kappa={}",
                kappa.levels().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
            );
            if emit_pq {
                println!("P={}", rows_line(pair.p().rows()));
                println!("Q={}", rows_line(pair.q().rows()));
                if out.dir.is_some() {
                    let mut csv = report::Csv::new(&["tableau", "row", "entries"]);
                    for (name, t) in [("P", pair.p()), ("Q", pair.q())] {
                        for (r, row) in t.rows().iter().enumerate() {
                            let entries = row.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                            csv.row([name.to_string(), (r + 1).to_string(), entries]);
                        }
                    }
                    out.emit("pq.csv", &csv.finish())?;
                }
            }
            Ok(0)
        }
        Command::Enumerate { n, alpha } => {
            let set = AcceptanceSet::build_with(n, alpha, &exec)?;
            let records = enumerate_records(n)?;
            out.emit("enumerate.csv", &report::enumerate_csv(&records, Some(&set)))?;
            eprintln!(
                "n={n}: {} shapes, acceptance set of {} shapes with mass {:.6}",
                records.len(),
                set.len(),
                set.mass()
            );
            Ok(0)
        }
        Command::Simulate { model, replicas } => {
            let matrix = load_matrix(&model.matrix)?;
            let spec = ModelSpec::from_name(&model.model, model.n, model.rho, model.t, matrix)?;
            let rows = simulate_replicas(&spec, replicas, cli.seed, &exec)?;
            out.emit("simulate.csv", &report::simulate_csv(&rows))?;
            let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
            let lps: Vec<f64> = rows.iter().map(|r| r.lp).collect();
            eprintln!(
                "{spec}: {replicas} replicas, H mean {:.4} sd {:.4}, LP/sqrt(n) mean {:.4}, LP sd {:.4}",
                mean(&hs),
                sd(&hs),
                mean(&lps) / (spec.n as f64).sqrt(),
                sd(&lps)
            );
            Ok(0)
        }
        Command::Test {
            input,
            shape,
            test,
            alpha,
            replicas,
        } => {
            let shape = match (input, shape) {
                (_, Some(s)) => parse_shape(&s)?,
                (Some(path), None) => {
                    rsk(&parse_sequence(&read_text(&path)?)?.permutation()).shape().clone()
                }
                (None, None) => {
                    return Err(Failure {
                        code: 2,
                        msg: "give an input file or --shape".into(),
                    })
                }
            };
            let prepared = PreparedTest::prepare(test.into(), shape.n(), alpha, replicas, cli.seed, &exec)?;
            let decision = prepared.apply(&shape, alpha)?;
            println!("{}", decision.record_line());
            eprintln!("{decision}");
            Ok(if decision.accept { 0 } else { 1 })
        }
        Command::Figures {
            figure,
            n,
            replicas,
            columns,
            range,
            bins,
            model,
            rho,
            t,
            matrix,
        } => {
            match figure {
                Figure::YProcess => {
                    if !(range > 0.0 && range.is_finite()) {
                        return Err(Failure {
                            code: 2,
                            msg: format!("--range must be positive, got {range}"),
                        });
                    }
                    let mut rng = replica_rng(cli.seed, 0);
                    let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * range).collect();
                    let y = y_process(&xs)?;
                    out.emit("y_process.csv", &report::y_process_csv(&y, n, &columns))?;
                    let mut points = Vec::new();
                    for (k, level) in y.rows().iter().enumerate() {
                        for (c, &v) in level.iter().enumerate() {
                            if columns.is_empty() || columns.contains(&(c + 1)) {
                                points.push((v, (k + 1) as f64));
                            }
                        }
                    }
                    out.emit("y_process.svg", &report::svg_plot(&points, false))?;
                }
                Figure::HHist => {
                    let matrix = load_matrix(&matrix)?;
                    let spec = ModelSpec::from_name(&model, n, rho, t, matrix)?;
                    let hs: Vec<f64> = simulate_replicas(&spec, replicas, cli.seed, &exec)?
                        .into_iter()
                        .map(|r| r.h)
                        .collect();
                    let bins = bins.unwrap_or(((hs.len() as f64).sqrt().round() as usize).clamp(1, 100));
                    let csv = report::h_hist_csv(&hs, bins);
                    out.emit("h_hist.csv", &csv)?;
                    let points: Vec<(f64, f64)> = csv
                        .lines()
                        .skip(1)
                        .filter_map(|l| {
                            let f: Vec<&str> = l.split(',').collect();
                            Some((f[0].parse().ok()?, f[2].parse().ok()?))
                        })
                        .collect();
                    out.emit("h_hist.svg", &report::svg_plot(&points, true))?;
                }
                Figure::MinShape => {
                    let cfg = MinHConfig {
                        seed: cli.seed,
                        exec,
                        ..MinHConfig::default()
                    };
                    let (shape, h) = min_h_search(n, &cfg);
                    out.emit("min_shape.csv", &report::min_shape_csv(&shape))?;
                    let points: Vec<(f64, f64)> = shape
                        .parts()
                        .iter()
                        .enumerate()
                        .map(|(k, &p)| ((k + 1) as f64, p as f64))
                        .collect();
                    out.emit("min_shape.svg", &report::svg_plot(&points, true))?;
                    eprintln!("n={n}: minimal H {} with {} rows", report::fmt_f64(h), shape.num_rows());
                }
            }
            Ok(0)
        }
        Command::Power {
            grid,
            test,
            alpha,
            replicas,
            calibration_replicas,
            matrix,
        } => {
            let matrix = load_matrix(&matrix)?;
            let specs = parse_grid(&read_text(&grid)?, matrix.as_ref()).map_err(|e| Failure {
                code: 2,
                msg: format!("{}: {e}", grid.display()),
            })?;
            let cfg = PowerConfig {
                test: test.into(),
                alpha,
                replicas,
                calibration_replicas,
                seed: cli.seed,
                exec,
            };
            out.emit("power.csv", &report::power_csv(&power_study(&specs, &cfg)?))?;
            Ok(0)
        }
        Command::Decompose { n, shape, reference } => {
            let shape = parse_shape(&shape)?;
            if shape.n() != n {
                return Err(Failure {
                    code: 2,
                    msg: format!("shape {shape} has {} cells, but n = {n}", shape.n()),
                });
            }
            let d = PermutationDistribution::shape_uniform(shape)?;
            let r = divergence_report(&d, &exec)?;
            out.emit("decompose.csv", &report::decompose_csv(&[(r, reference)]))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
