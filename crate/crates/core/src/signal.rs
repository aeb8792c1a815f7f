//! Finite signals on `Z_N` and the circular operations used throughout the crate.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;

/// A real signal on `Z_N`, `N >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("signal must have at least one sample"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("signal contains non-finite values"));
        }
        Ok(Signal(values))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Signal::new(vec![0.0; n])
    }

    /// Unit impulse at `k mod n`.
    pub fn delta(n: usize, k: usize) -> Result<Self> {
        let mut s = Signal::zeros(n)?;
        s.0[k % n] = 1.0;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Sample at an arbitrary integer index, read modulo `N`.
    pub fn at(&self, k: i64) -> f64 {
        self.0[k.rem_euclid(self.0.len() as i64) as usize]
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute difference to `other`.
    pub fn sup_distance(&self, other: &Signal) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        same_len(self.len(), other.len())?;
        Signal::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        same_len(self.len(), other.len())?;
        Signal::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Signal {
        Signal(self.0.iter().map(|v| v * s).collect())
    }

    /// Reads one value per line, no header. Blank lines are ignored.
    pub fn read_csv(path: &Path) -> Result<Signal> {
        let text = fs::read_to_string(path)?;
        Signal::parse_csv(&text)
    }

    pub fn parse_csv(text: &str) -> Result<Signal> {
        let mut values = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let v: f64 = t
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: `{t}` is not a number", line_no + 1)))?;
            values.push(v);
        }
        Signal::new(values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for v in &self.0 {
            out.push_str(&format!("{v:?}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }

    /// Parses `{"n": N, "values": [...]}`.
    pub fn parse_json(text: &str) -> Result<Signal> {
        let doc: SignalDoc = serde_json::from_str(text)?;
        if doc.values.len() != doc.n {
            return Err(Error::Parse(format!(
                "signal declares n = {} but has {} values",
                doc.n,
                doc.values.len()
            )));
        }
        Signal::new(doc.values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SignalDoc {
            n: self.len(),
            values: self.0.clone(),
        })
        .expect("signal serialisation cannot fail")
    }

    /// Loads a signal, choosing the format from the file extension (`.json` or CSV otherwise).
    pub fn load(path: &Path) -> Result<Signal> {
        if path.extension().is_some_and(|e| e == "json") {
            Signal::parse_json(&fs::read_to_string(path)?)
        } else {
            Signal::read_csv(path)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SignalDoc {
    n: usize,
    values: Vec<f64>,
}

pub(crate) fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::domain(format!("length mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// `(L_m x)(n) = x(n - m)`. Negative `m` shifts the other way.
pub fn circular_shift(x: &[f64], m: i64) -> Vec<f64> {
    let n = x.len() as i64;
    (0..n).map(|k| x[(k - m).rem_euclid(n) as usize]).collect()
}

/// `(x * h)(n) = sum_m x(m) h(n - m)`, evaluated directly.
pub fn circular_convolution(x: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    same_len(x.len(), h.len())?;
    if x.is_empty() {
        return Err(Error::domain("empty signal"));
    }
    let n = x.len();
    Ok((0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(m, xm)| xm * h[(k + n - m) % n])
                .sum()
        })
        .collect())
}

pub fn inner_product(x: &[f64], y: &[f64]) -> Result<f64> {
    same_len(x.len(), y.len())?;
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
}
