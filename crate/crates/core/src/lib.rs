//! Complexes of injective words: generation, exact homology, elementary
//! collapses, and certificates that no top-dimensional cycle survives in
//! the complex generated by the non-derangements.

pub mod collapse;
pub mod complex;
pub mod homology;
pub mod matrix;
pub mod redundancy;
pub mod tables;
pub mod word;

pub use collapse::{
    collapse_step, free_faces, greedy_collapse, top_collapse_experiment, CollapseError,
    CollapsePair, CollapseTrace, Policy, TopExperimentReport,
};
pub use complex::{
    full_generators, generate_complex, nonderangement_generators, ComplexError, GeneratedComplex,
};
pub use homology::{
    homology, rank_nullity, smith_normal_form, top_cycle_dimension, HomologyError, HomologySummary,
};
pub use matrix::{RingError, RingSpec, SparseMatrix};
pub use redundancy::{
    build_certificate, fred_fixed_point, Certificate, ProverError, WitnessRecord,
};
pub use word::{InjWord, Permutation, WordError};
