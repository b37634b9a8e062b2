//! Exact ranks, Smith normal forms and homology over `Z`, `Q` and `F_p`.
//!
//! All three rings share one sparse elimination kernel. It pivots only on
//! units (`±1` over the integers, any nonzero entry over `F_p`), picking the
//! sparsest remaining column and, inside it, the shortest row. Unit pivots
//! contribute an invariant factor of 1 and are peeled off; whatever is left
//! when no unit pivot remains is handed to a dense big-integer
//! diagonalization. Integer arithmetic runs on checked `i64` and restarts on
//! `BigInt` if any entry leaves machine range.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, GeneratedComplex};
use crate::matrix::{RingSpec, SparseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("Smith normal form needs integer coefficients, got {0}")]
    NotIntegers(RingSpec),
    #[error("rank/nullity needs a field, got {0}; use the Smith normal form instead")]
    NotAField(RingSpec),
    #[error("invariant factor {0} does not fit in 64 bits")]
    FactorTooLarge(BigUint),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Homology of a complex in degrees `0..n`, degree 0 unreduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub ring: RingSpec,
    /// Free rank (Betti number) per degree.
    pub betti: Vec<u64>,
    /// Invariant factors greater than one per degree, in divisibility order.
    pub torsion: Vec<Vec<u64>>,
}

impl HomologySummary {
    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(Vec::is_empty)
    }

    /// True when the summary is that of a point.
    pub fn is_acyclic(&self) -> bool {
        self.is_torsion_free()
            && self.betti.first() == Some(&1)
            && self.betti.iter().skip(1).all(|&b| b == 0)
    }
}

#[derive(Debug)]
struct Overflow;

trait Domain: Sync {
    type Elem: Clone + Send;

    fn lift(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, e: &Self::Elem) -> bool;
    fn is_unit(&self, e: &Self::Elem) -> bool;
    /// `f` with `entry - f * pivot == 0`, for a unit `pivot`.
    fn quotient(&self, entry: &Self::Elem, pivot: &Self::Elem) -> Result<Self::Elem, Overflow>;
    /// `x - f * y`.
    fn sub_mul(
        &self,
        x: &Self::Elem,
        f: &Self::Elem,
        y: &Self::Elem,
    ) -> Result<Self::Elem, Overflow>;
    fn neg_mul(&self, f: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem, Overflow>;
    fn to_big(&self, e: &Self::Elem) -> BigInt;
}

struct ModP {
    p: u64,
}

impl ModP {
    fn inverse(&self, a: u64) -> u64 {
        let (mut base, mut exp, mut acc) = (a % self.p, self.p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

impl Domain for ModP {
    type Elem = u64;

    fn lift(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, e: &u64) -> bool {
        *e == 0
    }
    fn is_unit(&self, e: &u64) -> bool {
        *e != 0
    }
    fn quotient(&self, entry: &u64, pivot: &u64) -> Result<u64, Overflow> {
        Ok(entry * self.inverse(*pivot) % self.p)
    }
    fn sub_mul(&self, x: &u64, f: &u64, y: &u64) -> Result<u64, Overflow> {
        Ok((x + self.p - f * y % self.p) % self.p)
    }
    fn neg_mul(&self, f: &u64, y: &u64) -> Result<u64, Overflow> {
        Ok((self.p - f * y % self.p) % self.p)
    }
    fn to_big(&self, e: &u64) -> BigInt {
        BigInt::from(*e)
    }
}

struct SmallInt;

impl Domain for SmallInt {
    type Elem = i64;

    fn lift(&self, v: i64) -> i64 {
        v
    }
    fn is_zero(&self, e: &i64) -> bool {
        *e == 0
    }
    fn is_unit(&self, e: &i64) -> bool {
        *e == 1 || *e == -1
    }
    fn quotient(&self, entry: &i64, pivot: &i64) -> Result<i64, Overflow> {
        entry.checked_mul(*pivot).ok_or(Overflow)
    }
    fn sub_mul(&self, x: &i64, f: &i64, y: &i64) -> Result<i64, Overflow> {
        f.checked_mul(*y)
            .and_then(|fy| x.checked_sub(fy))
            .ok_or(Overflow)
    }
    fn neg_mul(&self, f: &i64, y: &i64) -> Result<i64, Overflow> {
        f.checked_mul(*y).and_then(i64::checked_neg).ok_or(Overflow)
    }
    fn to_big(&self, e: &i64) -> BigInt {
        BigInt::from(*e)
    }
}

struct BigInts;

impl Domain for BigInts {
    type Elem = BigInt;

    fn lift(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn is_zero(&self, e: &BigInt) -> bool {
        e.is_zero()
    }
    fn is_unit(&self, e: &BigInt) -> bool {
        e.abs().is_one()
    }
    fn quotient(&self, entry: &BigInt, pivot: &BigInt) -> Result<BigInt, Overflow> {
        Ok(entry * pivot)
    }
    fn sub_mul(&self, x: &BigInt, f: &BigInt, y: &BigInt) -> Result<BigInt, Overflow> {
        Ok(x - f * y)
    }
    fn neg_mul(&self, f: &BigInt, y: &BigInt) -> Result<BigInt, Overflow> {
        Ok(-(f * y))
    }
    fn to_big(&self, e: &BigInt) -> BigInt {
        e.clone()
    }
}

/// Outcome of the sparse phase: how many unit pivots were eliminated and
/// the dense leftover that has no unit entry.
struct Reduced {
    unit_pivots: usize,
    residual: Vec<Vec<BigInt>>,
}

type Row<E> = Vec<(u32, E)>;

fn eliminate<D: Domain>(dom: &D, m: &SparseMatrix) -> Result<Reduced, Overflow> {
    let ncols = m.cols();
    let mut rows: Vec<Row<D::Elem>> = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|(c, v)| (c, dom.lift(v))).collect())
        .collect();
    let mut row_alive = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<u32>> = m
        .columns()
        .iter()
        .map(|col| col.iter().map(|e| e.0).collect())
        .collect();
    let mut col_count: Vec<u32> = m.columns().iter().map(|c| c.len() as u32).collect();
    let mut col_done = vec![false; ncols];
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = (0..ncols)
        .map(|c| Reverse((col_count[c], c as u32)))
        .collect();
    let mut unit_pivots = 0;
    let mut touched: Vec<u32> = Vec::new();

    while let Some(Reverse((count, c))) = heap.pop() {
        let cu = c as usize;
        if col_done[cu] || count != col_count[cu] {
            continue;
        }
        if count == 0 {
            col_done[cu] = true;
            continue;
        }
        let mut candidates = std::mem::take(&mut col_rows[cu]);
        candidates.sort_unstable();
        candidates.dedup();
        let mut present: Vec<(u32, D::Elem)> = Vec::with_capacity(count as usize);
        for r in candidates {
            if !row_alive[r as usize] {
                continue;
            }
            let row = &rows[r as usize];
            if let Ok(pos) = row.binary_search_by_key(&c, |e| e.0) {
                present.push((r, row[pos].1.clone()));
            }
        }
        debug_assert_eq!(present.len(), count as usize);
        let pivot = present
            .iter()
            .filter(|(_, v)| dom.is_unit(v))
            .min_by_key(|(r, _)| (rows[*r as usize].len(), *r))
            .cloned();
        let Some((pivot_row_idx, pivot_value)) = pivot else {
            // No unit here yet; revisit if the column changes.
            col_rows[cu] = present.into_iter().map(|(r, _)| r).collect();
            continue;
        };

        let pivot_row = std::mem::take(&mut rows[pivot_row_idx as usize]);
        row_alive[pivot_row_idx as usize] = false;
        touched.clear();
        for (r, a) in present {
            if r == pivot_row_idx {
                continue;
            }
            let factor = dom.quotient(&a, &pivot_value)?;
            let old = std::mem::take(&mut rows[r as usize]);
            let mut merged: Row<D::Elem> = Vec::with_capacity(old.len() + pivot_row.len());
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < pivot_row.len() {
                let take_old = j >= pivot_row.len() || (i < old.len() && old[i].0 < pivot_row[j].0);
                let take_pivot =
                    i >= old.len() || (j < pivot_row.len() && pivot_row[j].0 < old[i].0);
                if take_old {
                    merged.push(old[i].clone());
                    i += 1;
                } else if take_pivot {
                    let col = pivot_row[j].0;
                    let v = dom.neg_mul(&factor, &pivot_row[j].1)?;
                    if !dom.is_zero(&v) {
                        merged.push((col, v));
                        col_count[col as usize] += 1;
                        col_rows[col as usize].push(r);
                        touched.push(col);
                    }
                    j += 1;
                } else {
                    let col = old[i].0;
                    let v = dom.sub_mul(&old[i].1, &factor, &pivot_row[j].1)?;
                    if dom.is_zero(&v) {
                        col_count[col as usize] -= 1;
                        touched.push(col);
                    } else {
                        merged.push((col, v));
                        touched.push(col);
                    }
                    i += 1;
                    j += 1;
                }
            }
            rows[r as usize] = merged;
        }
        for (col, _) in &pivot_row {
            col_count[*col as usize] -= 1;
            touched.push(*col);
        }
        debug_assert_eq!(col_count[cu], 0);
        col_done[cu] = true;
        unit_pivots += 1;
        touched.sort_unstable();
        touched.dedup();
        for &col in &touched {
            if !col_done[col as usize] {
                heap.push(Reverse((col_count[col as usize], col)));
            }
        }
    }

    let mut live_cols: Vec<u32> = rows
        .iter()
        .zip(&row_alive)
        .filter(|(_, alive)| **alive)
        .flat_map(|(r, _)| r.iter().map(|e| e.0))
        .collect();
    live_cols.sort_unstable();
    live_cols.dedup();
    let residual = rows
        .iter()
        .zip(&row_alive)
        .filter(|(r, alive)| **alive && !r.is_empty())
        .map(|(r, _)| {
            let mut dense = vec![BigInt::zero(); live_cols.len()];
            for (c, v) in r {
                let pos = live_cols.binary_search(c).expect("live column");
                dense[pos] = dom.to_big(v);
            }
            dense
        })
        .collect();
    Ok(Reduced {
        unit_pivots,
        residual,
    })
}

fn eliminate_integers(m: &SparseMatrix) -> Reduced {
    match eliminate(&SmallInt, m) {
        Ok(r) => r,
        Err(Overflow) => eliminate(&BigInts, m).expect("big integers do not overflow"),
    }
}

/// Diagonalizes a dense integer matrix by unimodular row and column
/// operations; returns the absolute values of the nonzero diagonal entries
/// (not yet in divisibility order).
fn diagonalize(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pr, pc)) = min_abs_entry(&a, t, t) else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let delta = &q * &a[t][j];
                    a[i][j] -= delta;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let delta = &q * &row[t];
                    row[j] -= delta;
                }
                dirty |= !a[t][j].is_zero();
            }
            if !dirty {
                break;
            }
            // A remainder survived: move the smallest entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

fn min_abs_entry(a: &[Vec<BigInt>], r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(r0) {
        for (j, v) in row.iter().enumerate().skip(c0) {
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
                if v.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Puts a multiset of positive diagonal entries into divisibility order.
fn divisibility_chain(mut d: Vec<BigInt>) -> Vec<BigUint> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d.into_iter()
        .map(|x| x.to_biguint().expect("diagonal entries are positive"))
        .collect()
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of an integer matrix; `r` is its rank.
pub fn smith_normal_form(m: &SparseMatrix) -> Result<Vec<BigUint>, HomologyError> {
    if m.ring() != RingSpec::Integers {
        return Err(HomologyError::NotIntegers(m.ring()));
    }
    let reduced = eliminate_integers(m);
    let mut factors = vec![BigUint::one(); reduced.unit_pivots];
    factors.extend(divisibility_chain(diagonalize(reduced.residual)));
    Ok(factors)
}

/// `(rank, nullity)` over `Q` or `F_p`; nullity counts columns.
pub fn rank_nullity(m: &SparseMatrix) -> Result<(usize, usize), HomologyError> {
    let rank = match m.ring() {
        RingSpec::Integers => return Err(HomologyError::NotAField(RingSpec::Integers)),
        _ => field_rank(m),
    };
    Ok((rank, m.cols() - rank))
}

fn field_rank(m: &SparseMatrix) -> usize {
    match m.ring() {
        RingSpec::PrimeField(p) => {
            let reduced =
                eliminate(&ModP { p: p as u64 }, m).expect("modular arithmetic cannot overflow");
            debug_assert!(reduced.residual.is_empty());
            reduced.unit_pivots
        }
        _ => {
            let reduced = eliminate_integers(m);
            reduced.unit_pivots + diagonalize(reduced.residual).len()
        }
    }
}

struct LevelRank {
    rank: usize,
    torsion: Vec<u64>,
}

fn level_rank(
    c: &GeneratedComplex,
    len: usize,
    ring: RingSpec,
) -> Result<LevelRank, HomologyError> {
    let m = c.boundary_matrix(len, ring)?;
    if m.cols() == 0 || m.rows() == 0 {
        return Ok(LevelRank {
            rank: 0,
            torsion: Vec::new(),
        });
    }
    match ring {
        RingSpec::Integers => {
            let factors = smith_normal_form(&m)?;
            let torsion = factors
                .iter()
                .filter(|f| !f.is_one())
                .map(|f| {
                    f.to_u64()
                        .ok_or_else(|| HomologyError::FactorTooLarge(f.clone()))
                })
                .collect::<Result<_, _>>()?;
            Ok(LevelRank {
                rank: factors.len(),
                torsion,
            })
        }
        _ => Ok(LevelRank {
            rank: field_rank(&m),
            torsion: Vec::new(),
        }),
    }
}

/// Homology of the cellular chain complex of `c` with coefficients in `ring`.
///
/// Degree `d` is spanned by words of length `d + 1`. Degree 0 is unreduced,
/// so a contractible complex reports Betti numbers `(1, 0, ..., 0)`.
pub fn homology(c: &GeneratedComplex, ring: RingSpec) -> Result<HomologySummary, HomologyError> {
    let n = c.n() as usize;
    let ranks: Vec<LevelRank> = (2..=n)
        .into_par_iter()
        .map(|len| level_rank(c, len, ring))
        .collect::<Result<_, _>>()?;
    // rank of the boundary leaving length `len`; zero for len = 1 and len = n + 1
    let out_rank = |len: usize| {
        if (2..=n).contains(&len) {
            ranks[len - 2].rank
        } else {
            0
        }
    };
    let mut betti = Vec::with_capacity(n);
    let mut torsion = Vec::with_capacity(n);
    for d in 0..n {
        let chains = c.level(d + 1).len();
        betti.push((chains - out_rank(d + 1) - out_rank(d + 2)) as u64);
        torsion.push(if d + 2 <= n {
            ranks[d].torsion.clone()
        } else {
            Vec::new()
        });
    }
    Ok(HomologySummary {
        ring,
        betti,
        torsion,
    })
}

/// Dimension of the top cycle space `ker(d)` on words of length `n`, over a field.
pub fn top_cycle_dimension(c: &GeneratedComplex, ring: RingSpec) -> Result<usize, HomologyError> {
    if !ring.is_field() {
        return Err(HomologyError::NotAField(ring));
    }
    let n = c.n() as usize;
    if c.level(n).is_empty() {
        return Err(ComplexError::EmptyLevel(n).into());
    }
    let m = c.boundary_matrix(n, ring)?;
    Ok(rank_nullity(&m)?.1)
}
