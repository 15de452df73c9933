//! CSV and SVG emitters. Every CSV has a header row, `\n` line endings and
//! floats at 17 significant digits, so outputs can be compared byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::decomposable::DivergenceReport;
use crate::error::Result;
use crate::exec::{replica_rng, Exec};
use crate::models::ModelSpec;
use crate::plancherel::{plancherel_record, AcceptanceSet, PlancherelRecord};
use crate::rsk::{Permutation, RealTableau};
use crate::testing::PowerTable;
use crate::young::{BigCount, Partition};

/// Float at 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Row-by-row CSV builder.
#[derive(Clone, Debug, Default)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv { out: String::new() };
        csv.row(header.iter().map(|h| h.to_string()));
        csv
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.out.push(',');
            }
            first = false;
            let f = f.as_ref();
            if f.contains([',', '"', '\n']) {
                self.out.push('"');
                self.out.push_str(&f.replace('"', "\"\""));
                self.out.push('"');
            } else {
                self.out.push_str(f);
            }
        }
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// `shape,prob,lp,h,log_f,accept`
pub fn enumerate_csv(records: &[PlancherelRecord], set: Option<&AcceptanceSet>) -> String {
    let mut csv = Csv::new(&["shape", "prob", "lp", "h", "log_f", "accept"]);
    for r in records {
        let accept = set.map_or(String::new(), |s| u8::from(s.contains(&r.shape)).to_string());
        csv.row([
            r.shape.to_string(),
            fmt_f64(r.prob),
            fmt_f64(r.lp),
            fmt_f64(r.h),
            fmt_f64(r.log_f),
            accept,
        ]);
    }
    csv.finish()
}

/// `C,count`, counts exact.
pub fn histogram_csv(hist: &BTreeMap<i64, BigCount>) -> String {
    let mut csv = Csv::new(&["C", "count"]);
    for (c, count) in hist {
        csv.row([c.to_string(), count.to_string()]);
    }
    csv.finish()
}

pub fn power_csv(table: &PowerTable) -> String {
    let mut csv = Csv::new(&["model", "param", "n", "replicas", "rejections", "power", "se"]);
    for r in &table.rows {
        csv.row([
            r.model.clone(),
            r.param.map_or(String::new(), fmt_f64),
            r.n.to_string(),
            r.replicas.to_string(),
            r.rejections.to_string(),
            fmt_f64(r.power),
            fmt_f64(r.se),
        ]);
    }
    csv.finish()
}

/// One simulated replica.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulatedReplica {
    pub h: f64,
    pub lp: f64,
    pub shape: Partition,
}

/// Replica `r` draws from stream `r` of `seed`.
pub fn simulate_replicas(spec: &ModelSpec, replicas: usize, seed: u64, exec: &Exec) -> Result<Vec<SimulatedReplica>> {
    spec.validate()?;
    exec.map(replicas, |r| -> Result<SimulatedReplica> {
        let shape = spec.draw_shape(&mut replica_rng(seed, r as u64))?;
        let rec = plancherel_record(&shape);
        Ok(SimulatedReplica {
            h: rec.h,
            lp: rec.lp,
            shape,
        })
    })
    .into_iter()
    .collect()
}

/// `replica,h,lp,shape`
pub fn simulate_csv(rows: &[SimulatedReplica]) -> String {
    let mut csv = Csv::new(&["replica", "h", "lp", "shape"]);
    for (i, r) in rows.iter().enumerate() {
        csv.row([i.to_string(), fmt_f64(r.h), fmt_f64(r.lp), r.shape.to_string()]);
    }
    csv.finish()
}

/// `i,pi_of_i`
pub fn pictorial_csv(perm: &Permutation) -> String {
    let mut csv = Csv::new(&["i", "pi_of_i"]);
    for (i, &v) in perm.images().iter().enumerate() {
        csv.row([(i + 1).to_string(), v.to_string()]);
    }
    csv.finish()
}

/// `n,shape,kl_to_uniform,kl_d_to_proper,kl_d_to_uniform,reference_value`
pub fn decompose_csv(reports: &[(DivergenceReport, Option<f64>)]) -> String {
    let mut csv = Csv::new(&[
        "n",
        "shape",
        "kl_to_uniform",
        "kl_d_to_proper",
        "kl_d_to_uniform",
        "reference_value",
    ]);
    for (r, reference) in reports {
        csv.row([
            r.n.to_string(),
            r.shape.as_ref().map_or(String::new(), Partition::to_string),
            fmt_f64(r.kl_proper_to_uniform),
            fmt_f64(r.kl_d_to_proper),
            fmt_f64(r.kl_d_to_uniform),
            reference.map_or(String::new(), fmt_f64),
        ]);
    }
    csv.finish()
}

/// `y_value,level,n`: the entries of the given tableau columns (1-indexed;
/// all columns when `columns` is empty) with their levels.
pub fn y_process_csv(t: &RealTableau, n: usize, columns: &[usize]) -> String {
    let mut csv = Csv::new(&["y_value", "level", "n"]);
    for (k, level) in t.rows().iter().enumerate() {
        for (c, &y) in level.iter().enumerate() {
            if columns.is_empty() || columns.contains(&(c + 1)) {
                csv.row([fmt_f64(y), (k + 1).to_string(), n.to_string()]);
            }
        }
    }
    csv.finish()
}

/// Histogram of `values` over `bins` equal-width bins, with the expected
/// count under the normal law of the same mean and sd.
/// Columns: `bin_lo,bin_hi,count,normal`.
pub fn h_hist_csv(values: &[f64], bins: usize) -> String {
    let mut csv = Csv::new(&["bin_lo", "bin_hi", "count", "normal"]);
    if values.is_empty() || bins == 0 {
        return csv.finish();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let m = crate::stats::mean(values);
    let s = crate::stats::sd(values);
    let total = values.len() as f64;
    for (b, &count) in counts.iter().enumerate() {
        let a = lo + b as f64 * width;
        let z = a + width;
        let expected = if s > 0.0 {
            total * (crate::stats::normal_cdf((z - m) / s) - crate::stats::normal_cdf((a - m) / s))
        } else {
            0.0
        };
        csv.row([fmt_f64(a), fmt_f64(z), count.to_string(), fmt_f64(expected)]);
    }
    csv.finish()
}

/// `k,lambda_k`
pub fn min_shape_csv(shape: &Partition) -> String {
    let mut csv = Csv::new(&["k", "lambda_k"]);
    for (k, &p) in shape.parts().iter().enumerate() {
        csv.row([(k + 1).to_string(), p.to_string()]);
    }
    csv.finish()
}

/// Minimal SVG: a scatter of points (`polyline == false`) or one polyline.
pub fn svg_plot(points: &[(f64, f64)], polyline: bool) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 20.0;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let sx = if x1 > x0 { (W - 2.0 * PAD) / (x1 - x0) } else { 1.0 };
    let sy = if y1 > y0 { (H - 2.0 * PAD) / (y1 - y0) } else { 1.0 };
    let map = |(x, y): (f64, f64)| (PAD + (x - x0) * sx, H - PAD - (y - y0) * sy);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    );
    if polyline {
        out.push_str("<polyline fill=\"none\" stroke=\"black\" points=\"");
        for (i, &p) in points.iter().enumerate() {
            let (x, y) = map(p);
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{x:.3},{y:.3}");
        }
        out.push_str("\"/>\n");
    } else {
        for &p in points {
            let (x, y) = map(p);
            let _ = writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"1\"/>");
        }
    }
    out.push_str("</svg>\n");
    out
}
