//! Coefficient rings and column-major sparse matrices.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("modulus {0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("unknown ring `{0}`: expected z, q or fp:<prime>")]
    Unknown(String),
}

/// Coefficient ring of a chain complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RingSpec {
    Integers,
    Rationals,
    PrimeField(u32),
}

impl RingSpec {
    pub fn prime_field(p: u64) -> Result<Self, RingError> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(RingSpec::PrimeField(p as u32))
    }

    pub fn is_field(self) -> bool {
        !matches!(self, RingSpec::Integers)
    }

    /// Reduces an integer into the ring's canonical representative.
    pub fn reduce(self, value: i64) -> i64 {
        match self {
            RingSpec::PrimeField(p) => value.rem_euclid(p as i64),
            _ => value,
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => f.write_str("z"),
            RingSpec::Rationals => f.write_str("q"),
            RingSpec::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "z" | "Z" => Ok(RingSpec::Integers),
            "q" | "Q" => Ok(RingSpec::Rationals),
            other => {
                let p = other
                    .strip_prefix("fp:")
                    .and_then(|m| m.parse::<u64>().ok())
                    .ok_or_else(|| RingError::Unknown(other.to_string()))?;
                RingSpec::prime_field(p)
            }
        }
    }
}

impl TryFrom<String> for RingSpec {
    type Error = RingError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RingSpec> for String {
    fn from(r: RingSpec) -> Self {
        r.to_string()
    }
}

/// Column-major sparse matrix. Row indices within a column are strictly
/// increasing and no stored coefficient is zero in the tagged ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(u32, i64)>>,
    ring: RingSpec,
}

impl SparseMatrix {
    /// Entries are reduced into `ring`; zeros are dropped and rows sorted.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>, ring: RingSpec) -> Self {
        let columns = columns
            .into_iter()
            .map(|mut col| {
                col.sort_unstable_by_key(|e| e.0);
                let mut out: Vec<(u32, i64)> = Vec::with_capacity(col.len());
                for (r, v) in col {
                    assert!((r as usize) < rows, "row {r} out of range");
                    match out.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => out.push((r, v)),
                    }
                }
                out.iter_mut().for_each(|e| e.1 = ring.reduce(e.1));
                out.retain(|e| e.1 != 0);
                out
            })
            .collect();
        SparseMatrix {
            rows,
            columns,
            ring,
        }
    }

    pub fn zeros(rows: usize, cols: usize, ring: RingSpec) -> Self {
        SparseMatrix {
            rows,
            columns: vec![Vec::new(); cols],
            ring,
        }
    }

    /// Dense row-major input, mostly for tests and small examples.
    pub fn from_dense(data: &[Vec<i64>], ring: RingSpec) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        let columns = (0..cols)
            .map(|c| (0..rows).map(|r| (r as u32, data[r][c])).collect())
            .collect();
        Self::from_columns(rows, columns, ring)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn column(&self, c: usize) -> &[(u32, i64)] {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[Vec<(u32, i64)>] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// The same entries re-tagged and reduced into another ring.
    pub fn over(&self, ring: RingSpec) -> Self {
        Self::from_columns(self.rows, self.columns.clone(), ring)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols()]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                out[r as usize][c] = v;
            }
        }
        out
    }

    /// Row-major adjacency: for each row, its `(col, value)` entries in column order.
    pub fn to_rows(&self) -> Vec<Vec<(u32, i64)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                out[r as usize].push((c as u32, v));
            }
        }
        out
    }

    /// Product `self * rhs` with coefficients reduced in `self.ring()`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), rhs.rows(), "dimension mismatch");
        let columns = rhs
            .columns
            .iter()
            .map(|rcol| {
                let mut acc: Vec<(u32, i64)> = Vec::new();
                for &(k, b) in rcol {
                    for &(r, a) in &self.columns[k as usize] {
                        acc.push((r, self.ring.reduce(a * b)));
                    }
                }
                acc
            })
            .collect();
        Self::from_columns(self.rows, columns, self.ring)
    }

    /// Coordinate text form: a header `level rows cols ring`, then one
    /// 1-indexed `row col value` line per entry in column-major order.
    pub fn write_coordinate<W: Write>(&self, level: usize, mut out: W) -> io::Result<()> {
        writeln!(out, "{level} {} {} {}", self.rows, self.cols(), self.ring)?;
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                writeln!(out, "{} {} {}", r + 1, c + 1, v)?;
            }
        }
        Ok(())
    }
}
