//! Generator sets: built-in presets and word-per-line files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use injwords::complex::{full_generators, nonderangement_generators};
use injwords::word::{InjWord, WordError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {source}")]
    Parse {
        path: String,
        line: usize,
        source: WordError,
    },
    #[error("{0} lists no generators")]
    NoGenerators(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("--gen expects full, nonderangements or `file <path>`")]
    BadSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Full,
    Nonderangements,
    File(PathBuf),
}

impl GeneratorSpec {
    /// Parses the one or two values given to `--gen`.
    pub fn from_args(values: &[String]) -> Result<Self, GeneratorError> {
        match values {
            [kind] if kind == "full" => Ok(GeneratorSpec::Full),
            [kind] if kind == "nonderangements" => Ok(GeneratorSpec::Nonderangements),
            [kind, path] if kind == "file" => Ok(GeneratorSpec::File(PathBuf::from(path))),
            _ => Err(GeneratorError::BadSpec),
        }
    }

    pub fn load(&self, n: u8) -> Result<Vec<InjWord>, GeneratorError> {
        match self {
            GeneratorSpec::Full => Ok(full_generators(n)?),
            GeneratorSpec::Nonderangements => Ok(nonderangement_generators(n)?),
            GeneratorSpec::File(path) => load_generators(path, n),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Full => f.write_str("full"),
            GeneratorSpec::Nonderangements => f.write_str("nonderangements"),
            GeneratorSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

/// Reads one canonical word per line. Blank lines and lines starting with
/// `#` are skipped; duplicates collapse.
pub fn load_generators(path: &Path, n: u8) -> Result<Vec<InjWord>, GeneratorError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| GeneratorError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_generators(&text, n, &shown)
}

pub fn parse_generators(text: &str, n: u8, origin: &str) -> Result<Vec<InjWord>, GeneratorError> {
    let mut words = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let word = InjWord::parse(line, n).map_err(|source| GeneratorError::Parse {
            path: origin.to_string(),
            line: idx + 1,
            source,
        })?;
        words.push(word);
    }
    if words.is_empty() {
        return Err(GeneratorError::NoGenerators(origin.to_string()));
    }
    words.sort_unstable();
    words.dedup();
    Ok(words)
}
