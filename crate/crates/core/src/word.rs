//! Injective words over the alphabet `[1, n]`.
//!
//! A word is packed into a single `u64`: twelve 4-bit letter slots in the
//! high 48 bits (first letter in the highest nibble, unused slots zero),
//! then the length nibble and the alphabet-size nibble. Because empty slots
//! are zero and letters are at least 1, comparing the packed integers orders
//! words lexicographically with a proper prefix sorting first.
//!
//! Positions and letters are 1-indexed everywhere in the public API.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Largest supported alphabet.
pub const MAX_ALPHABET: u8 = 12;
/// Largest `n` for which [`derangement_count`] is exact.
pub const MAX_COUNT_ALPHABET: u8 = 20;

const LETTER_BITS: u32 = 4;
const LETTER_REGION: u32 = 48;
const LETTER_MASK: u64 = (1 << LETTER_REGION) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet size {0} outside [2, {MAX_ALPHABET}]")]
    AlphabetSize(u8),
    #[error("word is empty")]
    Empty,
    #[error("word has {len} letters but the alphabet has only {n}")]
    TooLong { len: usize, n: u8 },
    #[error("letter {letter} outside [1, {n}]")]
    LetterOutOfRange { letter: u32, n: u8 },
    #[error("duplicate letter {0}")]
    DuplicateLetter(u8),
    #[error("position {pos} outside [1, {len}]")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("cannot delete from a word of length 1")]
    DeleteSingleton,
    #[error("expected a word of length {expected}, got length {actual}")]
    WrongLength { expected: usize, actual: usize },
    #[error("alphabet sizes differ ({0} vs {1})")]
    AlphabetMismatch(u8, u8),
    #[error("malformed word `{0}`: expected a form like [3,1,2]")]
    Malformed(String),
}

/// A non-empty word of pairwise distinct letters from `[1, n]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InjWord {
    bits: u64,
}

impl InjWord {
    pub fn new(n: u8, letters: &[u8]) -> Result<Self, WordError> {
        check_alphabet(n)?;
        if letters.is_empty() {
            return Err(WordError::Empty);
        }
        if letters.len() > n as usize {
            return Err(WordError::TooLong {
                len: letters.len(),
                n,
            });
        }
        let mut seen = 0u16;
        let mut packed = 0u64;
        for (idx, &letter) in letters.iter().enumerate() {
            if letter == 0 || letter > n {
                return Err(WordError::LetterOutOfRange {
                    letter: letter as u32,
                    n,
                });
            }
            if seen & (1 << letter) != 0 {
                return Err(WordError::DuplicateLetter(letter));
            }
            seen |= 1 << letter;
            packed |= (letter as u64) << slot_shift(idx + 1);
        }
        Ok(Self::from_parts(packed, letters.len(), n))
    }

    /// Parses the canonical form `[3,1,2]` over the alphabet `[1, n]`.
    pub fn parse(text: &str, n: u8) -> Result<Self, WordError> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| WordError::Malformed(trimmed.to_string()))?;
        if inner.trim().is_empty() {
            return Err(WordError::Empty);
        }
        let mut letters = Vec::new();
        for part in inner.split(',') {
            let value: u32 = part
                .trim()
                .parse()
                .map_err(|_| WordError::Malformed(trimmed.to_string()))?;
            if value == 0 || value > n as u32 {
                check_alphabet(n)?;
                return Err(WordError::LetterOutOfRange { letter: value, n });
            }
            letters.push(value as u8);
        }
        Self::new(n, &letters)
    }

    #[inline]
    fn from_parts(letter_bits: u64, len: usize, n: u8) -> Self {
        InjWord {
            bits: (letter_bits << 16) | ((len as u64) << 4) | n as u64,
        }
    }

    #[inline]
    fn letter_bits(self) -> u64 {
        self.bits >> 16
    }

    #[inline]
    pub fn n(self) -> u8 {
        (self.bits & 0xf) as u8
    }

    #[inline]
    pub fn len(self) -> usize {
        ((self.bits >> 4) & 0xf) as usize
    }

    /// Always false; the empty word is not an element of the poset.
    pub fn is_empty(self) -> bool {
        false
    }

    /// Letter at 1-indexed position `pos`. Panics when out of range.
    #[inline]
    pub fn at(self, pos: usize) -> u8 {
        assert!(pos >= 1 && pos <= self.len(), "position {pos} out of range");
        ((self.letter_bits() >> slot_shift(pos)) & 0xf) as u8
    }

    pub fn letters(self) -> impl Iterator<Item = u8> {
        (1..=self.len()).map(move |pos| self.at(pos))
    }

    pub fn to_vec(self) -> Vec<u8> {
        self.letters().collect()
    }

    /// Bit `j` set iff letter `j` occurs.
    pub fn letter_set(self) -> u16 {
        self.letters().fold(0, |acc, l| acc | (1 << l))
    }

    pub fn contains_letter(self, letter: u8) -> bool {
        self.letters().any(|l| l == letter)
    }

    /// Removes the letter at `pos`.
    pub fn delete(self, pos: usize) -> Result<Self, WordError> {
        let len = self.len();
        if pos == 0 || pos > len {
            return Err(WordError::PositionOutOfRange { pos, len });
        }
        if len == 1 {
            return Err(WordError::DeleteSingleton);
        }
        Ok(self.delete_unchecked(pos))
    }

    #[inline]
    pub(crate) fn delete_unchecked(self, pos: usize) -> Self {
        let bits = self.letter_bits();
        let keep_shift = LETTER_REGION - LETTER_BITS * (pos as u32 - 1);
        let head = if keep_shift >= 64 {
            0
        } else {
            (bits >> keep_shift) << keep_shift
        };
        let tail_width = LETTER_REGION - LETTER_BITS * pos as u32;
        let tail = bits & ((1u64 << tail_width) - 1);
        Self::from_parts(head | (tail << LETTER_BITS), self.len() - 1, self.n())
    }

    /// Inserts `letter` so that it lands at position `pos`. The letter must be absent.
    pub fn insert(self, pos: usize, letter: u8) -> Result<Self, WordError> {
        let len = self.len();
        if pos == 0 || pos > len + 1 {
            return Err(WordError::PositionOutOfRange { pos, len: len + 1 });
        }
        if letter == 0 || letter > self.n() {
            return Err(WordError::LetterOutOfRange {
                letter: letter as u32,
                n: self.n(),
            });
        }
        if self.contains_letter(letter) {
            return Err(WordError::DuplicateLetter(letter));
        }
        if len == self.n() as usize {
            return Err(WordError::TooLong {
                len: len + 1,
                n: self.n(),
            });
        }
        Ok(self.insert_unchecked(pos, letter))
    }

    #[inline]
    pub(crate) fn insert_unchecked(self, pos: usize, letter: u8) -> Self {
        let bits = self.letter_bits();
        let keep_shift = LETTER_REGION - LETTER_BITS * (pos as u32 - 1);
        let head = if keep_shift >= 64 {
            0
        } else {
            (bits >> keep_shift) << keep_shift
        };
        let tail = bits & ((1u64 << keep_shift) - 1);
        let packed = head | ((letter as u64) << slot_shift(pos)) | (tail >> LETTER_BITS);
        Self::from_parts(packed & LETTER_MASK, self.len() + 1, self.n())
    }

    /// All non-empty subsequences, including the word itself.
    pub fn subwords(self) -> BTreeSet<InjWord> {
        let letters = self.to_vec();
        let k = letters.len();
        let mut out = BTreeSet::new();
        let mut picked = Vec::with_capacity(k);
        for mask in 1u32..(1 << k) {
            picked.clear();
            picked.extend((0..k).filter(|b| mask & (1 << b) != 0).map(|b| letters[b]));
            out.insert(Self::new(self.n(), &picked).expect("subsequence of an injective word"));
        }
        out
    }

    /// True iff `self` is a subsequence of `other` (reflexive).
    pub fn is_subword_of(self, other: InjWord) -> bool {
        if self.n() != other.n() || self.len() > other.len() {
            return false;
        }
        let mut it = other.letters();
        self.letters().all(|l| it.any(|m| m == l))
    }

    /// The unique letter absent from a word of length `n - 1`.
    pub fn missing_letter(self) -> Result<u8, WordError> {
        let expected = self.n() as usize - 1;
        if self.len() != expected {
            return Err(WordError::WrongLength {
                expected,
                actual: self.len(),
            });
        }
        Ok(self.missing_letter_unchecked())
    }

    #[inline]
    pub(crate) fn missing_letter_unchecked(self) -> u8 {
        let full: u16 = ((1u32 << (self.n() + 1)) - 2) as u16;
        (full & !self.letter_set()).trailing_zeros() as u8
    }

    /// Inserts the missing letter of a length-`(n-1)` word at position `i`.
    pub fn sigma(self, i: usize) -> Result<Permutation, WordError> {
        let k = self.missing_letter()?;
        let n = self.n() as usize;
        if i == 0 || i > n {
            return Err(WordError::PositionOutOfRange { pos: i, len: n });
        }
        Ok(Permutation(self.insert_unchecked(i, k)))
    }
}

impl fmt::Display for InjWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (idx, l) in self.letters().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for InjWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.n())
    }
}

#[inline]
fn slot_shift(pos: usize) -> u32 {
    LETTER_REGION - LETTER_BITS * pos as u32
}

fn check_alphabet(n: u8) -> Result<(), WordError> {
    if (2..=MAX_ALPHABET).contains(&n) {
        Ok(())
    } else {
        Err(WordError::AlphabetSize(n))
    }
}

/// An injective word of full length `n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Permutation(InjWord);

impl Permutation {
    pub fn from_word(word: InjWord) -> Result<Self, WordError> {
        if word.len() != word.n() as usize {
            return Err(WordError::WrongLength {
                expected: word.n() as usize,
                actual: word.len(),
            });
        }
        Ok(Permutation(word))
    }

    pub fn new(n: u8, letters: &[u8]) -> Result<Self, WordError> {
        Self::from_word(InjWord::new(n, letters)?)
    }

    pub fn identity(n: u8) -> Result<Self, WordError> {
        Self::new(n, &(1..=n).collect::<Vec<_>>())
    }

    pub fn word(self) -> InjWord {
        self.0
    }

    pub fn has_fixed_point(self) -> bool {
        self.0
            .letters()
            .enumerate()
            .any(|(idx, l)| l as usize == idx + 1)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// All permutations of `[1, n]` in lexicographic order.
pub fn permutations(n: u8) -> Result<Vec<Permutation>, WordError> {
    check_alphabet(n)?;
    let mut current: Vec<u8> = (1..=n).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation(InjWord::new(n, &current)?));
        if !next_permutation(&mut current) {
            return Ok(out);
        }
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
    let Some(pivot) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let successor = v
        .iter()
        .rposition(|&x| x > v[pivot])
        .expect("pivot has a successor");
    v.swap(pivot, successor);
    v[pivot + 1..].reverse();
    true
}

/// Fixed-point-free permutations of `[1, n]`, lexicographic.
pub fn derangements(n: u8) -> Result<Vec<Permutation>, WordError> {
    Ok(permutations(n)?
        .into_iter()
        .filter(|p| !p.has_fixed_point())
        .collect())
}

/// Permutations with at least one fixed point, lexicographic.
pub fn non_derangements(n: u8) -> Result<Vec<Permutation>, WordError> {
    Ok(permutations(n)?
        .into_iter()
        .filter(|p| p.has_fixed_point())
        .collect())
}

/// Number of derangements of `[1, n]`, from `D_n = n D_{n-1} + (-1)^n`.
pub fn derangement_count(n: u8) -> Result<u128, WordError> {
    if !(1..=MAX_COUNT_ALPHABET).contains(&n) {
        return Err(WordError::AlphabetSize(n));
    }
    let mut d: i128 = 1; // D_0
    for m in 1..=n as i128 {
        d = m * d + if m % 2 == 0 { 1 } else { -1 };
    }
    Ok(d as u128)
}

/// `n! / (n - len)!`, the number of injective words of length `len`.
pub fn falling_factorial(n: u8, len: u8) -> u128 {
    (0..len as u128).map(|j| n as u128 - j).product()
}
