//! Incidence tables for `X(P_3)` and the two complexes obtained from it by
//! collapsing free pairs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::collapse::{collapse_step, free_faces, CollapseError, CollapsePair};
use crate::complex::{generate_complex, nonderangement_generators, GeneratedComplex};
use crate::word::InjWord;

/// A labelled stage of the collapse sequence.
#[derive(Debug, Clone)]
pub struct Stage {
    pub name: &'static str,
    pub complex: GeneratedComplex,
    /// Pairs removed to reach this stage from the previous one.
    pub removed: Vec<CollapsePair>,
}

/// `X(P_3)`, then `Y` after its free pairs are collapsed, then `Z` after the
/// free pairs of `Y` are collapsed. Each step removes every pair that is free
/// at the start of the step.
pub fn n3_stages() -> Result<Vec<Stage>, CollapseError> {
    let x = generate_complex(
        nonderangement_generators(3).map_err(crate::complex::ComplexError::from)?,
        3,
    )?;
    let mut stages = vec![Stage {
        name: "X",
        complex: x,
        removed: Vec::new(),
    }];
    for name in ["Y", "Z"] {
        let prev = &stages.last().expect("non-empty").complex;
        let pairs = free_faces(prev);
        let mut next = prev.clone();
        for &pair in &pairs {
            next = collapse_step(&next, pair)?;
        }
        stages.push(Stage {
            name,
            complex: next,
            removed: pairs,
        });
    }
    Ok(stages)
}

/// Renders the three tables. Top cells keep the labels `s1..s4` they get in
/// `X(P_3)` (lexicographic order) throughout.
pub fn render_n3_tables() -> Result<String, CollapseError> {
    let stages = n3_stages()?;
    let labels: BTreeMap<InjWord, String> = stages[0]
        .complex
        .level(3)
        .iter()
        .enumerate()
        .map(|(idx, &w)| (w, format!("s{}", idx + 1)))
        .collect();
    let mut out = String::new();
    for (idx, stage) in stages.iter().enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        render_stage(&mut out, stage, &labels);
    }
    Ok(out)
}

fn render_stage(out: &mut String, stage: &Stage, labels: &BTreeMap<InjWord, String>) {
    let c = &stage.complex;
    let name = stage.name;
    let suffix = if name == "X" { "(P)" } else { "" };
    let _ = writeln!(out, "== {name} ==");
    if !stage.removed.is_empty() {
        let removed: Vec<String> = stage
            .removed
            .iter()
            .map(|p| format!("({}, {})", p.face, p.coface))
            .collect();
        let _ = writeln!(out, "collapsed: {}", removed.join(" "));
    }
    let _ = writeln!(out, "{name}_3{suffix}");
    for &w in c.level(3) {
        let _ = writeln!(out, "  {} = {}", labels[&w], w);
    }
    for len in [2usize, 1] {
        let _ = writeln!(out, "{name}_{len}{suffix} | incident with");
        for &w in c.level(len) {
            let cofaces: Vec<String> = c
                .level(len + 1)
                .iter()
                .filter(|s| w.is_subword_of(**s))
                .map(|s| labels.get(s).cloned().unwrap_or_else(|| s.to_string()))
                .collect();
            let _ = writeln!(out, "  {:<9} | {}", w.to_string(), cofaces.join(", "));
        }
    }
}
