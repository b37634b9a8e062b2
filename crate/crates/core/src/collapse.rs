//! Free faces and elementary collapses.
//!
//! In a downward-closed set of injective words a face `t` lies in some word
//! of length `len(t) + 2` only if it lies in two words of length
//! `len(t) + 1`. So `t` is free exactly when its count of covering words is
//! one, and the cover is then maximal; removing both keeps the set closed.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::complex::{generate_complex, nonderangement_generators, ComplexError, GeneratedComplex};
use crate::word::InjWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollapseError {
    #[error("{face} is not a free face of {coface} in this complex")]
    NotFree { face: String, coface: String },
    #[error("unknown policy `{0}`: expected lex or topdim")]
    UnknownPolicy(String),
    #[error("top-cell experiment needs 3 <= n <= 8, got {0}")]
    ExperimentRange(u8),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A free face together with the only cell that contains it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CollapsePair {
    pub face: InjWord,
    pub coface: InjWord,
}

impl Serialize for CollapsePair {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            face: String,
            coface: String,
        }
        Repr {
            face: self.face.to_string(),
            coface: self.coface.to_string(),
        }
        .serialize(serializer)
    }
}

/// Which free pair to collapse next when several are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Policy {
    /// Lexicographically smallest free face.
    #[default]
    Lexicographic,
    /// Longest coface first, then lexicographically smallest face.
    TopDimensionFirst,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Lexicographic => "lex",
            Policy::TopDimensionFirst => "topdim",
        })
    }
}

impl FromStr for Policy {
    type Err = CollapseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lex" => Ok(Policy::Lexicographic),
            "topdim" => Ok(Policy::TopDimensionFirst),
            other => Err(CollapseError::UnknownPolicy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CollapseTrace {
    pub pairs: Vec<CollapsePair>,
    pub residual: GeneratedComplex,
    /// The residual is a single vertex.
    pub success: bool,
}

impl Serialize for CollapseTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            pairs: &'a [CollapsePair],
            success: bool,
            residual_sizes: Vec<usize>,
        }
        Repr {
            pairs: &self.pairs,
            success: self.success,
            residual_sizes: self.residual.level_sizes(),
        }
        .serialize(serializer)
    }
}

/// Result of repeatedly collapsing top cells of `X(P_n)` through their free faces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopExperimentReport {
    pub n: u8,
    pub policy: String,
    /// No top cell is left.
    pub success: bool,
    pub steps: usize,
    pub initial_top_cells: usize,
    pub remaining_top_cells: usize,
    pub residual_sizes: Vec<usize>,
}

fn unique_coface(
    c: &GeneratedComplex,
    live: &impl Fn(InjWord) -> bool,
    t: InjWord,
) -> Option<InjWord> {
    let present = t.letter_set();
    let mut found = None;
    for letter in 1..=c.n() {
        if present & (1 << letter) != 0 {
            continue;
        }
        for pos in 1..=t.len() + 1 {
            let s = t.insert_unchecked(pos, letter);
            if c.contains(s) && live(s) {
                if found.is_some() {
                    return None;
                }
                found = Some(s);
            }
        }
    }
    found
}

/// Every free face of `c` with its coface, sorted by face.
pub fn free_faces(c: &GeneratedComplex) -> Vec<CollapsePair> {
    let mut out = Vec::new();
    for t in c.cells() {
        if c.coface_count(t) == Some(1) {
            let coface = unique_coface(c, &|_| true, t).expect("count says exactly one coface");
            out.push(CollapsePair { face: t, coface });
        }
    }
    out.sort_unstable();
    out
}

/// Removes a free pair.
pub fn collapse_step(
    c: &GeneratedComplex,
    pair: CollapsePair,
) -> Result<GeneratedComplex, CollapseError> {
    let free = c.contains(pair.face)
        && c.contains(pair.coface)
        && pair.coface.len() == pair.face.len() + 1
        && pair.face.is_subword_of(pair.coface)
        && c.coface_count(pair.face) == Some(1);
    if !free {
        return Err(CollapseError::NotFree {
            face: pair.face.to_string(),
            coface: pair.coface.to_string(),
        });
    }
    let cells = c.cells().filter(|w| *w != pair.face && *w != pair.coface);
    Ok(GeneratedComplex::from_cells(c.n(), cells)?)
}

/// Mutable collapse state over a fixed initial complex.
struct Collapser<'a> {
    complex: &'a GeneratedComplex,
    policy: Policy,
    /// Only faces of length `n - 1` (codimension one in top cells) are eligible.
    top_only: bool,
    live: Vec<Vec<bool>>,
    counts: Vec<Vec<u32>>,
    candidates: BTreeSet<(usize, InjWord)>,
}

impl<'a> Collapser<'a> {
    fn new(complex: &'a GeneratedComplex, policy: Policy, top_only: bool) -> Self {
        let n = complex.n() as usize;
        let live: Vec<Vec<bool>> = (1..=n)
            .map(|l| vec![true; complex.level(l).len()])
            .collect();
        let counts: Vec<Vec<u32>> = (1..=n)
            .map(|l| {
                complex
                    .level(l)
                    .iter()
                    .map(|w| complex.coface_count(*w).unwrap())
                    .collect()
            })
            .collect();
        let mut me = Collapser {
            complex,
            policy,
            top_only,
            live,
            counts,
            candidates: BTreeSet::new(),
        };
        for w in complex.cells() {
            me.refresh(w);
        }
        me
    }

    fn slot(&self, w: InjWord) -> (usize, usize) {
        (
            w.len() - 1,
            self.complex
                .ordinal(w)
                .expect("word belongs to the complex"),
        )
    }

    fn is_live(&self, w: InjWord) -> bool {
        let (l, o) = self.slot(w);
        self.live[l][o]
    }

    fn key(&self, w: InjWord) -> (usize, InjWord) {
        match self.policy {
            Policy::Lexicographic => (0, w),
            Policy::TopDimensionFirst => (self.complex.n() as usize - w.len(), w),
        }
    }

    fn refresh(&mut self, w: InjWord) {
        let key = self.key(w);
        self.candidates.remove(&key);
        let (l, o) = self.slot(w);
        let eligible = !self.top_only || w.len() + 1 == self.complex.n() as usize;
        if self.live[l][o] && self.counts[l][o] == 1 && eligible {
            self.candidates.insert(key);
        }
    }

    fn next_pair(&self) -> Option<CollapsePair> {
        let &(_, face) = self.candidates.first()?;
        let coface = unique_coface(self.complex, &|s| self.is_live(s), face)
            .expect("candidate has exactly one live coface");
        Some(CollapsePair { face, coface })
    }

    fn remove(&mut self, pair: CollapsePair) {
        for w in [pair.face, pair.coface] {
            let (l, o) = self.slot(w);
            self.live[l][o] = false;
        }
        self.refresh(pair.face);
        // faces of the coface and faces of the face each lose one cover
        for (word, len) in [
            (pair.coface, pair.coface.len()),
            (pair.face, pair.face.len()),
        ] {
            if len < 2 {
                continue;
            }
            for pos in 1..=len {
                let f = word.delete_unchecked(pos);
                let (l, o) = self.slot(f);
                self.counts[l][o] -= 1;
                self.refresh(f);
            }
        }
    }

    fn live_count(&self, len: usize) -> usize {
        self.live[len - 1].iter().filter(|&&b| b).count()
    }

    fn residual(&self) -> GeneratedComplex {
        let cells = self.complex.cells().filter(|w| self.is_live(*w));
        GeneratedComplex::from_cells(self.complex.n(), cells).expect("collapses preserve closure")
    }
}

/// Collapses free pairs, chosen by `policy`, until none is left.
pub fn greedy_collapse(c: &GeneratedComplex, policy: Policy) -> CollapseTrace {
    let mut engine = Collapser::new(c, policy, false);
    let mut pairs = Vec::new();
    while let Some(pair) = engine.next_pair() {
        engine.remove(pair);
        pairs.push(pair);
    }
    let residual = engine.residual();
    let success = residual.num_cells() == 1;
    CollapseTrace {
        pairs,
        residual,
        success,
    }
}

/// Removes top cells of `X(P_n)` together with a free face of codimension
/// one, as long as one exists. Succeeds when no top cell remains.
pub fn top_collapse_experiment(
    n: u8,
    policy: Policy,
) -> Result<TopExperimentReport, CollapseError> {
    if !(3..=8).contains(&n) {
        return Err(CollapseError::ExperimentRange(n));
    }
    let gens = nonderangement_generators(n).map_err(ComplexError::from)?;
    let c = generate_complex(gens, n)?;
    let top = n as usize;
    let initial_top_cells = c.level(top).len();
    let mut engine = Collapser::new(&c, policy, true);
    let mut steps = 0;
    while engine.live_count(top) > 0 {
        let Some(pair) = engine.next_pair() else {
            break;
        };
        engine.remove(pair);
        steps += 1;
    }
    let remaining_top_cells = engine.live_count(top);
    Ok(TopExperimentReport {
        n,
        policy: policy.to_string(),
        success: remaining_top_cells == 0,
        steps,
        initial_top_cells,
        remaining_top_cells,
        residual_sizes: (1..=top).map(|l| engine.live_count(l)).collect(),
    })
}
