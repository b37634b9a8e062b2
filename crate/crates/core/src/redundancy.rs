//! Redundancy certificates for the top faces of `X(P_n)`.
//!
//! `F` is the set of words of length `n - 1`; each misses one letter `k`.
//! `sigma(t, i)` reinserts `k` at position `i`, and `M(t)` collects the
//! positions for which that permutation has a fixed point. A face whose
//! every top coface but one is known to vanish from all top cycles forces the
//! last one to vanish as well. The certificate orders all of `F` so that
//! each face, for every `i` in `M(t) \ {k}`, names a strictly earlier face
//! `t'` inside `sigma(t, i)`. Earlier means smaller excess, or equal excess
//! and larger gap-word pair `omega`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word::{self, InjWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("position {pos} outside [1, {max}]")]
    PositionOutOfRange { pos: usize, max: usize },
    #[error("no witness for t={t}, i={i}: {reason}")]
    NoWitness { t: String, i: usize, reason: String },
    #[error("record t={t}, i={i} fails verification: {reason}")]
    InvalidRecord { t: String, i: usize, reason: String },
    #[error("certificate invalid: {0}")]
    InvalidCertificate(String),
    #[error("certificates are built for 3 <= n <= 8, got {0}")]
    Range(u8),
}

/// A subset of positions `[1, n - 1]`, as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PositionSet {
    n: u8,
    mask: u16,
}

impl PositionSet {
    pub fn new<I: IntoIterator<Item = usize>>(n: u8, positions: I) -> Result<Self, ProverError> {
        let mut mask = 0u16;
        for p in positions {
            if p == 0 || p >= n as usize {
                return Err(ProverError::PositionOutOfRange {
                    pos: p,
                    max: n as usize - 1,
                });
            }
            mask |= 1 << p;
        }
        Ok(PositionSet { n, mask })
    }

    fn from_mask(n: u8, mask: u16) -> Self {
        PositionSet { n, mask }
    }

    pub fn n(self) -> u8 {
        self.n
    }

    pub fn contains(self, p: usize) -> bool {
        p < 16 && self.mask & (1 << p) != 0
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Ascending.
    pub fn iter(self) -> impl DoubleEndedIterator<Item = usize> {
        (1..self.n as usize).filter(move |&p| self.contains(p))
    }

    pub fn max(self) -> Option<usize> {
        self.iter().next_back()
    }

    pub fn min(self) -> Option<usize> {
        self.iter().next()
    }

    /// Intersection with the integer interval `[lo, hi]` (empty when `lo > hi`).
    pub fn within(self, lo: i64, hi: i64) -> Self {
        let keep = self.iter().filter(|&p| lo <= p as i64 && p as i64 <= hi);
        PositionSet::from_mask(self.n, keep.fold(0, |m, p| m | (1 << p)))
    }

    pub fn union(self, other: Self) -> Self {
        PositionSet::from_mask(self.n, self.mask | other.mask)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for PositionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite sequence of positive integers, ordered lexicographically with
/// proper prefixes first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct GapWord(pub Vec<u8>);

impl GapWord {
    pub fn sum(&self) -> usize {
        self.0.iter().map(|&g| g as usize).sum()
    }
}

/// Gaps of `J ∪ {0}` read downward: `(j1 - j2, ..., jp - 0)` for `j1 > ... > jp`.
pub fn delta_left(set: PositionSet) -> GapWord {
    let mut out = Vec::with_capacity(set.len());
    let mut prev: Option<usize> = None;
    for j in set.iter().rev().chain(std::iter::once(0)) {
        if let Some(p) = prev {
            out.push((p - j) as u8);
        }
        prev = Some(j);
    }
    GapWord(out)
}

/// Gaps of `J ∪ {n}` read upward: `(j2 - j1, ..., n - jp)` for `j1 < ... < jp`.
pub fn delta_right(set: PositionSet) -> GapWord {
    let n = set.n() as usize;
    let mut out = Vec::with_capacity(set.len());
    let mut prev: Option<usize> = None;
    for j in set.iter().chain(std::iter::once(n)) {
        if let Some(p) = prev {
            out.push((j - p) as u8);
        }
        prev = Some(j);
    }
    GapWord(out)
}

/// `(delta_left(J1), delta_right(J0))`, compared in the product order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Omega {
    pub left: GapWord,
    pub right: GapWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaOrdering {
    Less,
    Greater,
    Equal,
    Incomparable,
}

pub fn omega_compare(a: &Omega, b: &Omega) -> OmegaOrdering {
    match (a.left.cmp(&b.left), a.right.cmp(&b.right)) {
        (Ordering::Equal, Ordering::Equal) => OmegaOrdering::Equal,
        (Ordering::Less | Ordering::Equal, Ordering::Less | Ordering::Equal) => OmegaOrdering::Less,
        (Ordering::Greater | Ordering::Equal, Ordering::Greater | Ordering::Equal) => {
            OmegaOrdering::Greater
        }
        _ => OmegaOrdering::Incomparable,
    }
}

/// Position data of a face `t` of length `n - 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Profile {
    pub t: InjWord,
    /// Missing letter.
    pub k: u8,
    /// Positions `j` with `t_j = j`.
    pub j0: PositionSet,
    /// Positions `j` with `t_j = j + 1`.
    pub j1: PositionSet,
    /// `max(J1 ∪ {0})`.
    pub lambda: usize,
    /// `min(J0 ∪ {n})`.
    pub rho: usize,
    /// `lambda - rho`.
    pub excess: i32,
    pub omega: Omega,
}

pub fn profile(t: InjWord) -> Result<Profile, ProverError> {
    let k = t.missing_letter()?;
    let n = t.n();
    let (mut m0, mut m1) = (0u16, 0u16);
    for (idx, letter) in t.letters().enumerate() {
        let j = idx + 1;
        if letter as usize == j {
            m0 |= 1 << j;
        } else if letter as usize == j + 1 {
            m1 |= 1 << j;
        }
    }
    let j0 = PositionSet::from_mask(n, m0);
    let j1 = PositionSet::from_mask(n, m1);
    let lambda = j1.max().unwrap_or(0);
    let rho = j0.min().unwrap_or(n as usize);
    Ok(Profile {
        t,
        k,
        j0,
        j1,
        lambda,
        rho,
        excess: lambda as i32 - rho as i32,
        omega: Omega {
            left: delta_left(j1),
            right: delta_right(j0),
        },
    })
}

/// `M(t) = [1, lambda] ∪ [rho + 1, n] ∪ {k}`, ascending.
pub fn m_set(t: InjWord) -> Result<Vec<usize>, ProverError> {
    let p = profile(t)?;
    Ok(m_set_of(&p))
}

fn m_set_of(p: &Profile) -> Vec<usize> {
    let n = p.t.n() as usize;
    (1..=n)
        .filter(|&i| i <= p.lambda || i > p.rho || i == p.k as usize)
        .collect()
}

/// Positions `i` for which `sigma(t, i)` has a fixed point, found by trying each.
pub fn m_set_direct(t: InjWord) -> Result<Vec<usize>, ProverError> {
    let n = t.n() as usize;
    t.missing_letter()?;
    Ok((1..=n)
        .filter(|&i| t.sigma(i).map(|s| s.has_fixed_point()).unwrap_or(false))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `i <= lambda`: delete position `b + 1`, `b = min J1 ∩ [i, n - 1]`.
    #[serde(rename = "L")]
    Left,
    /// `i >= rho + 1`: delete position `b`, `b = max J0 ∩ [1, i - 1]`.
    #[serde(rename = "R")]
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Progress {
    /// `excess(t') < excess(t)`.
    Excess,
    /// Equal excess and `omega(t) < omega(t')` strictly.
    Omega,
}

/// A face `t'` of `sigma(t, i)` that precedes `t` in the induction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WitnessRecord {
    pub t: InjWord,
    pub i: usize,
    pub case: Side,
    pub b: usize,
    pub t_prime: InjWord,
    pub progress: Progress,
}

impl Serialize for WitnessRecord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            t: String,
            i: usize,
            case: Side,
            b: usize,
            t_prime: String,
            progress: Progress,
        }
        Repr {
            t: self.t.to_string(),
            i: self.i,
            case: self.case,
            b: self.b,
            t_prime: self.t_prime.to_string(),
            progress: self.progress,
        }
        .serialize(serializer)
    }
}

/// Builds the witness for `(t, i)`, taking the left case whenever `i <= lambda`.
pub fn witness(t: InjWord, i: usize) -> Result<WitnessRecord, ProverError> {
    let p = profile(t)?;
    witness_from_profile(&p, i)
}

fn witness_from_profile(p: &Profile, i: usize) -> Result<WitnessRecord, ProverError> {
    let t = p.t;
    let n = t.n() as usize;
    let fail = |reason: &str| ProverError::NoWitness {
        t: t.to_string(),
        i,
        reason: reason.to_string(),
    };
    if i == 0 || i > n {
        return Err(ProverError::PositionOutOfRange { pos: i, max: n });
    }
    if i == p.k as usize {
        return Err(fail("i equals the missing letter"));
    }
    let s = t.sigma(i)?.word();
    let (case, b, t_prime) = if i <= p.lambda {
        let b =
            p.j1.within(i as i64, n as i64 - 1)
                .min()
                .ok_or_else(|| fail("J1 ∩ [i, n-1] is empty"))?;
        (Side::Left, b, s.delete(b + 1)?)
    } else if i > p.rho {
        let b =
            p.j0.within(1, i as i64 - 1)
                .max()
                .ok_or_else(|| fail("J0 ∩ [1, i-1] is empty"))?;
        (Side::Right, b, s.delete(b)?)
    } else {
        return Err(fail("i is not in M(t)"));
    };
    let q = profile(t_prime)?;
    let progress = if q.excess < p.excess {
        Progress::Excess
    } else if q.excess == p.excess && omega_compare(&p.omega, &q.omega) == OmegaOrdering::Less {
        Progress::Omega
    } else {
        return Err(fail("neither excess nor omega makes progress"));
    };
    Ok(WitnessRecord {
        t,
        i,
        case,
        b,
        t_prime,
        progress,
    })
}

// ---------------------------------------------------------------------------
// First-principles checker. Everything below recomputes from letters and
// plain vectors, sharing nothing with the builder above except `InjWord`.

struct Scan {
    n: usize,
    k: usize,
    j0: Vec<usize>,
    j1: Vec<usize>,
    lambda: usize,
    rho: usize,
}

fn scan(letters: &[u8], n: usize) -> Scan {
    let j0: Vec<usize> = (1..n).filter(|&j| letters[j - 1] as usize == j).collect();
    let j1: Vec<usize> = (1..n)
        .filter(|&j| letters[j - 1] as usize == j + 1)
        .collect();
    let k = (1..=n)
        .find(|&x| !letters.contains(&(x as u8)))
        .expect("one letter is missing");
    let lambda = j1.iter().copied().max().unwrap_or(0);
    let rho = j0.iter().copied().min().unwrap_or(n);
    Scan {
        n,
        k,
        j0,
        j1,
        lambda,
        rho,
    }
}

fn gaps_down(set: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = set.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v.push(0);
    v.windows(2).map(|w| w[0] - w[1]).collect()
}

fn gaps_up(set: &[usize], n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = set.to_vec();
    v.sort_unstable();
    v.push(n);
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

fn in_intervals(x: usize, intervals: &[(i64, i64)]) -> bool {
    intervals
        .iter()
        .any(|&(lo, hi)| lo <= x as i64 && x as i64 <= hi)
}

/// Recomputes a record from scratch and checks every claim it carries,
/// including both lemma conclusions and the intersection formulas.
pub fn verify_record(rec: &WitnessRecord) -> Result<(), ProverError> {
    let bad = |reason: String| ProverError::InvalidRecord {
        t: rec.t.to_string(),
        i: rec.i,
        reason,
    };
    let n = rec.t.n() as usize;
    let t: Vec<u8> = rec.t.to_vec();
    if t.len() != n - 1 {
        return Err(bad(format!(
            "face has length {}, expected {}",
            t.len(),
            n - 1
        )));
    }
    let st = scan(&t, n);
    let i = rec.i;
    if i == 0 || i > n {
        return Err(bad("position out of range".into()));
    }
    if i == st.k {
        return Err(bad("i equals the missing letter".into()));
    }
    let mut s = t.clone();
    s.insert(i - 1, st.k as u8);
    if !s.iter().enumerate().any(|(idx, &l)| l as usize == idx + 1) {
        return Err(bad(
            "sigma_i(t) is a derangement, so i is not in M(t)".into()
        ));
    }
    let expected_case = if i <= st.lambda {
        Side::Left
    } else {
        Side::Right
    };
    if rec.case != expected_case {
        return Err(bad(format!("case should be {expected_case:?}")));
    }
    let (b, delete_at) = match rec.case {
        Side::Left => {
            let b = st.j1.iter().copied().filter(|&j| j >= i).min();
            let b = b.ok_or_else(|| bad("J1 ∩ [i, n-1] empty".into()))?;
            if !(i <= b && b <= st.lambda) {
                return Err(bad("b outside [i, lambda]".into()));
            }
            (b, b + 1)
        }
        Side::Right => {
            if i <= st.rho {
                return Err(bad("right case needs i >= rho + 1".into()));
            }
            let b = st.j0.iter().copied().filter(|&j| j < i).max();
            let b = b.ok_or_else(|| bad("J0 ∩ [1, i-1] empty".into()))?;
            if !(st.rho <= b && b < i) {
                return Err(bad("b outside [rho, i-1]".into()));
            }
            (b, b)
        }
    };
    if b != rec.b {
        return Err(bad(format!("pivot is {b}, record says {}", rec.b)));
    }
    let mut tp = s.clone();
    tp.remove(delete_at - 1);
    if tp != rec.t_prime.to_vec() || rec.t_prime.n() as usize != n {
        return Err(bad(format!("t' should be {tp:?}")));
    }
    let s_word = InjWord::new(n as u8, &s)?;
    if !rec.t_prime.is_subword_of(s_word) {
        return Err(bad("t' is not a face of sigma_i(t)".into()));
    }
    let sp = scan(&tp, n);
    let rho = st.rho as i64;
    let lambda = st.lambda as i64;
    let (b64, i64_) = (b as i64, i as i64);
    match rec.case {
        Side::Left => {
            if sp.k != b + 1 {
                return Err(bad(format!("t' misses {}, expected {}", sp.k, b + 1)));
            }
            let k_set = [(rho, i64_ - 1), (rho.max(b64 + 1), n as i64 - 1)];
            let formula: Vec<usize> = st
                .j0
                .iter()
                .copied()
                .filter(|&j| in_intervals(j, &k_set))
                .collect();
            if formula != sp.j0 {
                return Err(bad(format!(
                    "J0(t') = {:?}, formula gives {formula:?}",
                    sp.j0
                )));
            }
            if b == st.lambda {
                if sp.lambda >= st.lambda {
                    return Err(bad("b = lambda but lambda did not drop".into()));
                }
            } else if sp.lambda != st.lambda || gaps_down(&st.j1) >= gaps_down(&sp.j1) {
                return Err(bad("b < lambda but left gap word did not rise".into()));
            }
        }
        Side::Right => {
            if sp.k != b {
                return Err(bad(format!("t' misses {}, expected {b}", sp.k)));
            }
            let k_set = [(1, lambda.min(b64 - 1)), (i64_, lambda)];
            let formula: Vec<usize> = st
                .j1
                .iter()
                .copied()
                .filter(|&j| in_intervals(j, &k_set))
                .collect();
            if formula != sp.j1 {
                return Err(bad(format!(
                    "J1(t') = {:?}, formula gives {formula:?}",
                    sp.j1
                )));
            }
            if b == st.rho {
                if sp.rho <= st.rho {
                    return Err(bad("b = rho but rho did not rise".into()));
                }
            } else if sp.rho != st.rho || gaps_up(&st.j0, n) >= gaps_up(&sp.j0, n) {
                return Err(bad("b > rho but right gap word did not rise".into()));
            }
        }
    }
    let excess = st.lambda as i64 - st.rho as i64;
    let excess_p = sp.lambda as i64 - sp.rho as i64;
    let actual = if excess_p < excess {
        Progress::Excess
    } else {
        let (l0, l1) = (gaps_down(&st.j1), gaps_down(&sp.j1));
        let (r0, r1) = (gaps_up(&st.j0, sp.n), gaps_up(&sp.j0, sp.n));
        let strictly_below = l0 <= l1 && r0 <= r1 && (l0, r0) != (l1, r1);
        if excess_p != excess || !strictly_below {
            return Err(bad(
                "no progress: excess did not drop and omega did not rise".into(),
            ));
        }
        Progress::Omega
    };
    if actual != rec.progress {
        return Err(bad(format!(
            "progress is {actual:?}, record says {:?}",
            rec.progress
        )));
    }
    Ok(())
}

/// All words of length `n - 1`, lexicographic. Dropping the last letter of
/// a permutation is a bijection onto them.
pub fn top_faces(n: u8) -> Result<Vec<InjWord>, ProverError> {
    let mut faces: Vec<InjWord> = word::permutations(n)?
        .into_iter()
        .map(|p| p.word().delete(n as usize))
        .collect::<Result<_, _>>()?;
    faces.sort_unstable();
    Ok(faces)
}

/// Witness records of one face of `F`; empty when `M(t) = {k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceEntry {
    pub t: InjWord,
    pub excess: i32,
    pub records: Vec<WitnessRecord>,
}

/// Faces of `F` listed in an induction order, each with its witnesses.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub n: u8,
    /// Entries in topological order: every witness `t'` appears before its `t`.
    pub entries: Vec<FaceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub n: u8,
    pub faces: usize,
    pub records: usize,
    /// Faces with `M(t) = {k}`, which need no witness.
    pub base_faces: usize,
    pub excess_steps: usize,
    pub omega_steps: usize,
    pub min_excess: i32,
    pub max_excess: i32,
    pub acyclic: bool,
}

impl Certificate {
    pub fn edges(&self) -> impl Iterator<Item = (InjWord, InjWord)> + '_ {
        self.entries
            .iter()
            .flat_map(|e| e.records.iter().map(|r| (r.t, r.t_prime)))
    }

    pub fn records(&self) -> impl Iterator<Item = &WitnessRecord> + '_ {
        self.entries.iter().flat_map(|e| e.records.iter())
    }

    /// Re-derives every claim: coverage of `F`, the exact record set per
    /// face, each record from first principles, and that every edge points
    /// to an earlier entry.
    pub fn verify(&self) -> Result<(), ProverError> {
        let bad = |msg: String| ProverError::InvalidCertificate(msg);
        let faces = top_faces(self.n)?;
        let position: HashMap<InjWord, usize> = self
            .entries
            .iter()
            .enumerate()
            .map(|(idx, e)| (e.t, idx))
            .collect();
        if position.len() != self.entries.len() {
            return Err(bad("a face is listed twice".into()));
        }
        if position.len() != faces.len() || faces.iter().any(|f| !position.contains_key(f)) {
            return Err(bad(format!(
                "covers {} of {} faces",
                position.len(),
                faces.len()
            )));
        }
        self.entries
            .par_iter()
            .enumerate()
            .try_for_each(|(idx, entry)| {
                let t = entry.t;
                let letters = t.to_vec();
                let k = scan(&letters, self.n as usize).k;
                let needed: Vec<usize> = (1..=self.n as usize)
                    .filter(|&i| i != k)
                    .filter(|&i| {
                        let mut s = letters.clone();
                        s.insert(i - 1, k as u8);
                        s.iter().enumerate().any(|(j, &l)| l as usize == j + 1)
                    })
                    .collect();
                let listed: Vec<usize> = entry.records.iter().map(|r| r.i).collect();
                if listed != needed {
                    return Err(bad(format!("{t}: records for {listed:?}, need {needed:?}")));
                }
                for rec in &entry.records {
                    if rec.t != t {
                        return Err(bad(format!("record for {} filed under {t}", rec.t)));
                    }
                    verify_record(rec)?;
                    match position.get(&rec.t_prime) {
                        Some(&p) if p < idx => {}
                        _ => {
                            return Err(bad(format!("edge {t} -> {} points forward", rec.t_prime)))
                        }
                    }
                }
                Ok(())
            })
    }

    pub fn summary(&self) -> CertificateSummary {
        let records: Vec<&WitnessRecord> = self.records().collect();
        CertificateSummary {
            n: self.n,
            faces: self.entries.len(),
            records: records.len(),
            base_faces: self.entries.iter().filter(|e| e.records.is_empty()).count(),
            excess_steps: records
                .iter()
                .filter(|r| r.progress == Progress::Excess)
                .count(),
            omega_steps: records
                .iter()
                .filter(|r| r.progress == Progress::Omega)
                .count(),
            min_excess: self.entries.iter().map(|e| e.excess).min().unwrap_or(0),
            max_excess: self.entries.iter().map(|e| e.excess).max().unwrap_or(0),
            acyclic: true,
        }
    }

    /// One JSON object per record, in certificate order, then a footer line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for rec in self.records() {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        let footer =
            serde_json::json!({ "n": self.n, "faces": self.entries.len(), "acyclic": true });
        serde_json::to_writer(&mut out, &footer)?;
        out.write_all(b"\n")
    }
}

/// Builds and verifies the certificate for `n`. Any record that fails to
/// verify is an error; nothing is skipped.
pub fn build_certificate(n: u8) -> Result<Certificate, ProverError> {
    if !(3..=8).contains(&n) {
        return Err(ProverError::Range(n));
    }
    let faces = top_faces(n)?;
    let mut built: Vec<(Profile, Vec<WitnessRecord>)> = faces
        .par_iter()
        .map(|&t| {
            let p = profile(t)?;
            let records = m_set_of(&p)
                .into_iter()
                .filter(|&i| i != p.k as usize)
                .map(|i| witness_from_profile(&p, i))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((p, records))
        })
        .collect::<Result<_, ProverError>>()?;
    // excess ascending, then omega descending along a linear extension of the product order
    built.sort_by(|(a, _), (b, _)| {
        a.excess
            .cmp(&b.excess)
            .then_with(|| b.omega.left.cmp(&a.omega.left))
            .then_with(|| b.omega.right.cmp(&a.omega.right))
            .then_with(|| a.t.cmp(&b.t))
    });
    let entries = built
        .into_iter()
        .map(|(p, records)| FaceEntry {
            t: p.t,
            excess: p.excess,
            records,
        })
        .collect();
    let cert = Certificate { n, entries };
    cert.verify()?;
    Ok(cert)
}

/// Outcome of the iterative redundancy marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoint {
    pub n: u8,
    /// Number of rounds that marked at least one face.
    pub rounds: usize,
    /// Total marked after each such round.
    pub round_sizes: Vec<usize>,
    pub marked: Vec<InjWord>,
    pub faces: usize,
}

impl FixedPoint {
    pub fn complete(&self) -> bool {
        self.marked.len() == self.faces
    }
}

/// Marks faces round by round: `t` is marked once some `l ∈ M(t)` exists such
/// that every `sigma_i(t)`, `i ∈ M(t) \ {l}`, has a face marked in an earlier
/// round. Stops at the first round that marks nothing.
pub fn fred_fixed_point(n: u8) -> Result<FixedPoint, ProverError> {
    if !(3..=8).contains(&n) {
        return Err(ProverError::Range(n));
    }
    let faces = top_faces(n)?;
    let tops: Vec<Vec<InjWord>> = faces
        .iter()
        .map(|&t| {
            Ok(m_set_direct(t)?
                .into_iter()
                .map(|i| t.sigma(i).map(|s| s.word()))
                .collect::<Result<Vec<_>, _>>()?)
        })
        .collect::<Result<_, ProverError>>()?;
    let mut marked: HashSet<InjWord> = HashSet::new();
    let mut round_sizes = Vec::new();
    loop {
        let fresh: Vec<InjWord> = faces
            .par_iter()
            .zip(tops.par_iter())
            .filter(|(t, _)| !marked.contains(*t))
            .filter(|(_, cofaces)| {
                let blocked = cofaces
                    .iter()
                    .filter(|s| {
                        !(1..=n as usize).any(|pos| marked.contains(&s.delete_unchecked(pos)))
                    })
                    .count();
                blocked <= 1
            })
            .map(|(t, _)| *t)
            .collect();
        if fresh.is_empty() {
            break;
        }
        marked.extend(fresh);
        round_sizes.push(marked.len());
    }
    let mut marked: Vec<InjWord> = marked.into_iter().collect();
    marked.sort_unstable();
    Ok(FixedPoint {
        n,
        rounds: round_sizes.len(),
        round_sizes,
        marked,
        faces: faces.len(),
    })
}
