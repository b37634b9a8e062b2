//! Downward closures of generator sets, stored level by level.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::matrix::{RingSpec, SparseMatrix};
use crate::word::{self, InjWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("generator {word} is over alphabet {found}, expected {expected}")]
    AlphabetMismatch {
        word: String,
        found: u8,
        expected: u8,
    },
    #[error("level {level} outside [{min}, {max}]")]
    LevelOutOfRange {
        level: usize,
        min: usize,
        max: usize,
    },
    #[error("level {0} is empty")]
    EmptyLevel(usize),
    #[error("word {0} is not in the complex")]
    Absent(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// The complex of injective words generated by a set of words.
///
/// `levels[l - 1]` holds the words of length `l`, sorted. The ordinal of a
/// word is its rank inside its level; boundary matrices use these ordinals.
#[derive(Debug, Clone)]
pub struct GeneratedComplex {
    n: u8,
    levels: Vec<Vec<InjWord>>,
    index: HashMap<InjWord, u32>,
    coface_counts: Vec<Vec<u32>>,
}

/// Downward closure of `generators` over the alphabet `[1, n]`.
pub fn generate_complex<I>(generators: I, n: u8) -> Result<GeneratedComplex, ComplexError>
where
    I: IntoIterator<Item = InjWord>,
{
    // validates n
    InjWord::new(n, &[1])?;
    let mut buckets: Vec<HashSet<InjWord>> = vec![HashSet::new(); n as usize];
    for g in generators {
        if g.n() != n {
            return Err(ComplexError::AlphabetMismatch {
                word: g.to_string(),
                found: g.n(),
                expected: n,
            });
        }
        buckets[g.len() - 1].insert(g);
    }
    for len in (2..=n as usize).rev() {
        let (lower, upper) = buckets.split_at_mut(len - 1);
        let faces = &mut lower[len - 2];
        for w in upper[0].iter() {
            for pos in 1..=len {
                faces.insert(w.delete_unchecked(pos));
            }
        }
    }
    let levels = buckets
        .into_iter()
        .map(|set| {
            let mut v: Vec<InjWord> = set.into_iter().collect();
            v.sort_unstable();
            v
        })
        .collect();
    Ok(GeneratedComplex::from_sorted_levels(n, levels))
}

impl GeneratedComplex {
    fn from_sorted_levels(n: u8, levels: Vec<Vec<InjWord>>) -> Self {
        let mut index = HashMap::with_capacity(levels.iter().map(Vec::len).sum());
        for level in &levels {
            for (ord, w) in level.iter().enumerate() {
                index.insert(*w, ord as u32);
            }
        }
        let mut coface_counts: Vec<Vec<u32>> = levels.iter().map(|l| vec![0; l.len()]).collect();
        for len in 2..=levels.len() {
            for w in &levels[len - 1] {
                for pos in 1..=len {
                    let face = w.delete_unchecked(pos);
                    if let Some(&ord) = index.get(&face) {
                        coface_counts[len - 2][ord as usize] += 1;
                    }
                }
            }
        }
        GeneratedComplex {
            n,
            levels,
            index,
            coface_counts,
        }
    }

    /// Builds a complex from an explicit cell set, which must already be downward closed.
    pub fn from_cells<I>(n: u8, cells: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = InjWord>,
    {
        InjWord::new(n, &[1])?;
        let mut levels: Vec<Vec<InjWord>> = vec![Vec::new(); n as usize];
        for w in cells {
            if w.n() != n {
                return Err(ComplexError::AlphabetMismatch {
                    word: w.to_string(),
                    found: w.n(),
                    expected: n,
                });
            }
            levels[w.len() - 1].push(w);
        }
        for level in &mut levels {
            level.sort_unstable();
            level.dedup();
        }
        let c = Self::from_sorted_levels(n, levels);
        c.check_closure()?;
        Ok(c)
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Words of length `len` (1-based), sorted.
    pub fn level(&self, len: usize) -> &[InjWord] {
        if len == 0 || len > self.levels.len() {
            return &[];
        }
        &self.levels[len - 1]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn num_cells(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Largest occupied length, or 0 for the empty complex.
    pub fn top_len(&self) -> usize {
        self.levels
            .iter()
            .rposition(|l| !l.is_empty())
            .map_or(0, |i| i + 1)
    }

    pub fn contains(&self, w: InjWord) -> bool {
        w.n() == self.n && self.index.contains_key(&w)
    }

    /// Rank of `w` inside its level.
    pub fn ordinal(&self, w: InjWord) -> Option<usize> {
        if w.n() != self.n {
            return None;
        }
        self.index.get(&w).map(|&o| o as usize)
    }

    /// Number of stored words of length `len(w) + 1` containing `w`.
    pub fn coface_count(&self, w: InjWord) -> Option<u32> {
        let ord = self.ordinal(w)?;
        Some(self.coface_counts[w.len() - 1][ord])
    }

    pub fn cells(&self) -> impl Iterator<Item = InjWord> + '_ {
        self.levels.iter().flatten().copied()
    }

    /// Stored covering words of `t`, each with the position at which the new letter sits.
    pub fn coface_list(&self, t: InjWord) -> Result<Vec<(InjWord, usize)>, ComplexError> {
        if !self.contains(t) {
            return Err(ComplexError::Absent(t.to_string()));
        }
        let mut out = Vec::new();
        if t.len() == self.n as usize {
            return Ok(out);
        }
        let present = t.letter_set();
        for letter in 1..=self.n {
            if present & (1 << letter) != 0 {
                continue;
            }
            for pos in 1..=t.len() + 1 {
                let s = t.insert_unchecked(pos, letter);
                if self.index.contains_key(&s) {
                    out.push((s, pos));
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// `sum_l (-1)^(l-1) |X_l|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.levels
            .iter()
            .enumerate()
            .map(|(idx, l)| {
                if idx % 2 == 0 {
                    l.len() as i64
                } else {
                    -(l.len() as i64)
                }
            })
            .sum()
    }

    /// The boundary `d` from length-`len` words to length-`(len - 1)` words.
    ///
    /// Column `c` is the `c`-th word `s` of level `len`; it carries
    /// `(-1)^(j-1)` in the row of `delete(s, j)` for every position `j`.
    pub fn boundary_matrix(
        &self,
        len: usize,
        ring: RingSpec,
    ) -> Result<SparseMatrix, ComplexError> {
        let n = self.n as usize;
        if len < 2 || len > n {
            return Err(ComplexError::LevelOutOfRange {
                level: len,
                min: 2,
                max: n,
            });
        }
        let cols = self.level(len);
        let rows = self.level(len - 1).len();
        let mut columns = Vec::with_capacity(cols.len());
        for s in cols {
            let mut col: Vec<(u32, i64)> = (1..=len)
                .map(|j| {
                    let face = s.delete_unchecked(j);
                    let row = self.index[&face];
                    (row, if j % 2 == 1 { 1 } else { -1 })
                })
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            columns.push(col);
        }
        Ok(SparseMatrix::from_columns(rows, columns, ring))
    }

    fn check_closure(&self) -> Result<(), ComplexError> {
        for len in 2..=self.levels.len() {
            for w in &self.levels[len - 1] {
                for pos in 1..=len {
                    let face = w.delete_unchecked(pos);
                    if !self.index.contains_key(&face) {
                        return Err(ComplexError::Invariant(format!(
                            "face {face} of {w} is missing"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Recomputes every structural invariant from scratch.
    pub fn check_invariants(&self) -> Result<(), ComplexError> {
        if self.levels.len() != self.n as usize {
            return Err(ComplexError::Invariant("wrong number of levels".into()));
        }
        for (idx, level) in self.levels.iter().enumerate() {
            if level.windows(2).any(|p| p[0] >= p[1]) {
                return Err(ComplexError::Invariant(format!(
                    "level {} not strictly sorted",
                    idx + 1
                )));
            }
            for (ord, w) in level.iter().enumerate() {
                if w.len() != idx + 1 || w.n() != self.n {
                    return Err(ComplexError::Invariant(format!(
                        "{w} stored in level {}",
                        idx + 1
                    )));
                }
                if self.index.get(w) != Some(&(ord as u32)) {
                    return Err(ComplexError::Invariant(format!(
                        "index entry for {w} is wrong"
                    )));
                }
            }
        }
        if self.index.len() != self.num_cells() {
            return Err(ComplexError::Invariant("index has stale entries".into()));
        }
        self.check_closure()?;
        for (idx, level) in self.levels.iter().enumerate() {
            let upper = self.levels.get(idx + 1).map(Vec::as_slice).unwrap_or(&[]);
            for (ord, t) in level.iter().enumerate() {
                let brute = upper.iter().filter(|s| t.is_subword_of(**s)).count() as u32;
                if brute != self.coface_counts[idx][ord] {
                    return Err(ComplexError::Invariant(format!(
                        "coface count of {t} is stale"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The generator set `Sigma_n` of all permutations.
pub fn full_generators(n: u8) -> Result<Vec<InjWord>, WordError> {
    Ok(word::permutations(n)?
        .into_iter()
        .map(|p| p.word())
        .collect())
}

/// The generator set of permutations with a fixed point.
pub fn nonderangement_generators(n: u8) -> Result<Vec<InjWord>, WordError> {
    Ok(word::non_derangements(n)?
        .into_iter()
        .map(|p| p.word())
        .collect())
}
