//! Periodic one-dimensional grid functions.
//!
//! A [`GridFunction1D`] samples a function on the periodic interval `[0, L)` at the `n` nodes
//! `x_i = i L / n`. It carries both norms of the two-norm pair used by the transport instances:
//! the sup norm (weak) and the discrete Lipschitz norm `|u|_inf + max_i |u_{i+1} - u_i| / dx`
//! (strong, periodic wrap included).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{max_of, Scalar};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("domain length must be positive and finite, got {0}")]
    InvalidLength(String),
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("grids are not compatible ({0})")]
    Mismatch(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Reconstruction used between grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Linear,
    /// Periodic 4-point Catmull-Rom cubic.
    #[default]
    Cubic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction1D<S> {
    n: usize,
    length: S,
    values: Vec<S>,
}

#[derive(Deserialize)]
struct GridFunctionRaw<S> {
    n: usize,
    length: S,
    values: Vec<S>,
}

impl<'de, S: Scalar + Deserialize<'de>> Deserialize<'de> for GridFunction1D<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GridFunctionRaw::<S>::deserialize(deserializer)?;
        if raw.values.len() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "n = {} but {} values given",
                raw.n,
                raw.values.len()
            )));
        }
        GridFunction1D::new(raw.length, raw.values).map_err(serde::de::Error::custom)
    }
}

impl<S: Scalar> GridFunction1D<S> {
    pub fn new(length: S, values: Vec<S>) -> Result<Self, GridError> {
        let n = values.len();
        if n < 2 {
            return Err(GridError::TooFewPoints(n));
        }
        if !(length > S::zero()) || !length.is_finite() {
            return Err(GridError::InvalidLength(format!("{length}")));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self { n, length, values })
    }

    pub fn zeros(n: usize, length: S) -> Result<Self, GridError> {
        Self::new(length, vec![S::zero(); n])
    }

    /// Samples `f` at every node.
    pub fn sample(n: usize, length: S, f: impl Fn(S) -> S) -> Result<Self, GridError> {
        let dx = length / S::from_count(n.max(1));
        Self::new(length, (0..n).map(|i| f(S::from_count(i) * dx)).collect())
    }

    /// Builds a grid function from a closure of the node index, used by the steppers.
    pub(crate) fn from_fn_unchecked(n: usize, length: S, values: Vec<S>) -> Self {
        debug_assert_eq!(values.len(), n);
        Self { n, length, values }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> S {
        self.length
    }

    #[inline]
    pub fn dx(&self) -> S {
        self.length / S::from_count(self.n)
    }

    #[inline]
    pub fn values(&self) -> &[S] {
        &self.values
    }

    #[inline]
    pub fn node(&self, i: usize) -> S {
        S::from_count(i) * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = S> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }

    /// Pointwise difference, for norm computations on `u - v`.
    pub fn sub(&self, other: &Self) -> Result<Self, GridError> {
        if !self.same_grid(other) {
            return Err(GridError::Mismatch(format!(
                "n {} vs {}, length {} vs {}",
                self.n, other.n, self.length, other.length
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| *a - *b)
            .collect();
        Ok(Self::from_fn_unchecked(self.n, self.length, values))
    }

    pub fn scale(&self, a: S) -> Self {
        Self::from_fn_unchecked(
            self.n,
            self.length,
            self.values.iter().map(|v| a * *v).collect(),
        )
    }

    /// Largest forward difference quotient, periodic wrap included.
    pub fn max_slope(&self) -> S {
        let dx = self.dx();
        max_of((0..self.n).map(|i| {
            let next = self.values[(i + 1) % self.n];
            (next - self.values[i]).abs() / dx
        }))
    }

    /// Max of `|u - v|` over nodes without allocating the difference.
    pub fn sup_distance(&self, other: &Self) -> S {
        debug_assert!(self.same_grid(other));
        max_of(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (*a - *b).abs()),
        )
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), GridError> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| GridError::Csv(e.to_string());
        w.write_record(["x", "value"]).map_err(csv_err)?;
        for (x, v) in self.nodes().zip(&self.values) {
            w.write_record([x.to_string(), v.to_string()])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `(x, value)` rows written by [`write_csv`](Self::write_csv). The domain length is
    /// not recoverable from the nodes alone and must be supplied.
    pub fn read_csv<R: Read>(reader: R, length: S) -> Result<Self, GridError> {
        let mut r = csv::Reader::from_reader(reader);
        let mut values = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record.map_err(|e| GridError::Csv(e.to_string()))?;
            let field = record
                .get(1)
                .ok_or_else(|| GridError::Csv(format!("row {}: missing value column", row + 1)))?;
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| GridError::Csv(format!("row {}: bad number {field:?}", row + 1)))?;
            values.push(S::lit(v));
        }
        Self::new(length, values)
    }
}

impl GridFunction1D<f64> {
    pub fn to_json(&self) -> Result<String, GridError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, GridError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `max_i |u_i|`.
pub fn sup_norm<S: Scalar>(u: &GridFunction1D<S>) -> S {
    max_of(u.values.iter().map(|v| v.abs()))
}

/// Full discrete Lipschitz norm: sup norm plus the largest forward slope.
pub fn lip_norm<S: Scalar>(u: &GridFunction1D<S>) -> S {
    sup_norm(u) + u.max_slope()
}

/// Periodic reconstruction at an arbitrary real `x` (wrapped into `[0, L)`).
pub fn interpolate<S: Scalar>(u: &GridFunction1D<S>, x: S, scheme: Interpolation) -> S {
    let n = u.n;
    let len = u.length;
    let wrapped = x - len * (x / len).floor();
    let s = wrapped * S::from_count(n) / len;
    let nearest = s.round();
    let tol = S::lit(4.0) * S::epsilon() * S::one().max(s.abs());
    if (s - nearest).abs() <= tol {
        let i = nearest.to_usize().unwrap_or(0) % n;
        return u.values[i];
    }
    let base = s.floor();
    let frac = s - base;
    let i = base.to_usize().unwrap_or(0) % n;
    let v = &u.values;
    let at = |k: isize| v[(i as isize + k).rem_euclid(n as isize) as usize];
    match scheme {
        Interpolation::Linear => {
            let (a, b) = (at(0), at(1));
            a + frac * (b - a)
        }
        Interpolation::Cubic => {
            let (pm, p0, p1, p2) = (at(-1), at(0), at(1), at(2));
            let h = S::half();
            let c1 = h * (p1 - pm);
            let c2 = pm - S::lit(2.5) * p0 + S::two() * p1 - h * p2;
            let c3 = h * (p2 - pm) + S::lit(1.5) * (p0 - p1);
            p0 + frac * (c1 + frac * (c2 + frac * c3))
        }
    }
}
