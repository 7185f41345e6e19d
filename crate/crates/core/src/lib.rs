//! Chance-corrected agreement for span annotation.
//!
//! Agreement between two span annotations (for example named-entity tags) is
//! scored with token-level F1. Part of that agreement happens by chance: a
//! random annotator who keeps the same number and lengths of spans but places
//! them uniformly at random still overlaps with the reference. This crate
//! computes that chance level exactly under a random placement model and
//! reports the Kappa-style corrected score `(observed - chance) / (1 - chance)`.
//!
//! * [`combinatorics`]: exact placement counts and per-segment start distributions.
//! * [`agreement`]: observed, chance and corrected F1, difficulty, zero-agreement probability.
//! * [`oracle`]: exhaustive enumeration and an exactly uniform sampler for validation.
//! * [`corpus`]: CoNLL ingestion, micro-averaged corpus scores, partitioning, report output.
//!
//! ```
//! use spanchance::{chance_f1, corrected_f1, Model, SegmentProfile, SequenceSpec};
//!
//! let seq = SequenceSpec::new(20)?;
//! let a = SegmentProfile::new(vec![2, 3, 4])?;
//! let b = SegmentProfile::new(vec![3, 4, 5])?;
//! let chance = chance_f1(seq, &a, &b, Model::NonOverlapping)?;
//! assert!((chance - 0.5335).abs() < 1e-4);
//! let corrected = corrected_f1(6.0 / 7.0, chance)?;
//! assert!((corrected - 0.6938).abs() < 1e-4);
//! # Ok::<(), spanchance::Error>(())
//! ```

pub mod agreement;
pub mod annotation;
pub mod combinatorics;
pub mod corpus;
pub mod count;
mod error;
pub mod oracle;

pub use agreement::{
    chance_f1, chance_f1_with, corrected_f1, difficulty, difficulty_against_fixed, difficulty_with,
    evaluate_pair, expected_pair_overlap, token_f1, zero_agreement_probability, AgreementReport,
    ChanceEstimate, ChanceOptions, ComputationMode, DifficultyReading, Model, ProfileCoverage,
};
pub use annotation::{PlacedAnnotation, Span};
pub use combinatorics::{
    flat_region, location_count, location_distribution, location_distribution_with,
    overlapping_location_distribution, subset_length_table, total_configurations,
    uniform_approx_applicable, Arithmetic, DistributionMode, DistributionOptions,
    LocationDistribution, SegmentProfile, SequenceSpec, SubsetLengthTable, DEFAULT_ALPHA,
    DEFAULT_EXACT_LIMIT,
};
pub use count::{falling_factorial, ln_falling_factorial, BigCount};
pub use error::{Error, Result};
pub use oracle::{
    empirical_location_distribution, enumerate_configurations, exact_expected_f1, mc_expected_f1,
    sample_configuration, Configuration, McEstimate, DEFAULT_BUDGET,
};
