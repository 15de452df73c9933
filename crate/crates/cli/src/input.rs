//! Parsers for the CLI's input files. Errors carry a 1-based line number.

use std::fmt;
use std::sync::Arc;

use plancherel_core::models::{ModelSpec, SquareMatrix};
use plancherel_core::{rank_permutation, Permutation};

#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub line: Option<usize>,
    pub msg: String,
}

impl InputError {
    pub fn at(line: usize, msg: impl Into<String>) -> Self {
        InputError {
            line: Some(line),
            msg: msg.into(),
        }
    }

    pub fn general(msg: impl Into<String>) -> Self {
        InputError {
            line: None,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.msg),
            None => f.write_str(&self.msg),
        }
    }
}

/// Non-empty lines with `#` comments stripped, paired with line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty())
}

/// What an `rsk`/`test` input file held.
#[derive(Debug, Clone, PartialEq)]
pub enum Sequence {
    Permutation(Permutation),
    Sample(Vec<f64>),
}

impl Sequence {
    /// The permutation itself, or the ranks of the sample.
    pub fn permutation(&self) -> Permutation {
        match self {
            Sequence::Permutation(p) => p.clone(),
            Sequence::Sample(xs) => rank_permutation(xs).expect("finite values checked on parse"),
        }
    }
}

/// Numbers separated by whitespace or commas. Integers forming a
/// permutation of `1..=n` are read as a permutation; anything else as a
/// real sample.
pub fn parse_sequence(text: &str) -> Result<Sequence, InputError> {
    let mut values = Vec::new();
    let mut last_line = 0;
    for (line, l) in content_lines(text) {
        last_line = line;
        for t in tokens(l) {
            let v: f64 = t
                .parse()
                .map_err(|_| InputError::at(line, format!("not a number: {t:?}")))?;
            if !v.is_finite() {
                return Err(InputError::at(line, format!("non-finite value {t:?}")));
            }
            values.push((t, v));
        }
    }
    if values.is_empty() {
        return Err(InputError::general("input holds no values"));
    }
    let ints: Option<Vec<usize>> = values.iter().map(|(t, _)| t.parse::<usize>().ok()).collect();
    if let Some(images) = ints {
        if let Ok(p) = Permutation::new(images) {
            return Ok(Sequence::Permutation(p));
        }
    }
    let xs: Vec<f64> = values.iter().map(|&(_, v)| v).collect();
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(InputError::at(last_line, "tied values; not a permutation and not a continuous sample"));
    }
    Ok(Sequence::Sample(xs))
}

/// Square matrix, one row per line.
pub fn parse_matrix(text: &str) -> Result<SquareMatrix, InputError> {
    let mut rows = Vec::new();
    let mut width = None;
    for (line, l) in content_lines(text) {
        let row = tokens(l)
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| InputError::at(line, format!("bad matrix entry {t:?}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(InputError::at(line, format!("row has {} entries, expected {w}", row.len())))
            }
            _ => {}
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(InputError::general("matrix file is empty"));
    }
    if width != Some(n) {
        return Err(InputError::general(format!("matrix is {n} rows by {} columns", width.unwrap_or(0))));
    }
    SquareMatrix::from_rows(rows).map_err(|e| InputError::general(e.to_string()))
}

/// Power grid: one model per line as `model,n[,param]`. For
/// `checkerboard` the parameter is omitted and `matrix` is used.
pub fn parse_grid(text: &str, matrix: Option<&Arc<SquareMatrix>>) -> Result<Vec<ModelSpec>, InputError> {
    let mut grid = Vec::new();
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(InputError::at(line, "expected model,n[,param]"));
        }
        let n: usize = fields[1]
            .parse()
            .map_err(|_| InputError::at(line, format!("bad n {:?}", fields[1])))?;
        let param = match fields.get(2) {
            Some(s) => Some(
                s.parse::<f64>()
                    .map_err(|_| InputError::at(line, format!("bad parameter {s:?}")))?,
            ),
            None => None,
        };
        let spec = ModelSpec::from_name(fields[0], n, param, param, matrix.cloned())
            .map_err(|e| InputError::at(line, e.to_string()))?;
        grid.push(spec);
    }
    if grid.is_empty() {
        return Err(InputError::general("grid file lists no models"));
    }
    Ok(grid)
}
