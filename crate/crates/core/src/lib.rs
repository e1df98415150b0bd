//! Exact, decidable fragments of the combinatorics of filters, slaloms and
//! covers on ℕ, computed over eventually periodic sets and quasi-affine
//! functions.

pub mod compression;
pub mod constructions;
pub mod covers;
pub mod epset;
pub mod error;
pub mod families;
pub mod harness;
pub mod lazy;
pub mod qafun;
pub mod text;

pub use compression::{
    build_slalom, classify_trichotomy, compress_family, compress_set, frechet_after, is_slalom, Certificate, Side,
    TrichotomyTag, TrichotomyVerdict,
};
pub use constructions::{
    bounding_reduction, escape_function, filter_subbase_from_bound, first2n, gtilde, ij_from_guesser, maxfin_closure,
    recursive_slalom_stream, rothberger_guesser, splitter_from_slalom, BoundingReport, BoundingRow, GuesserProgram,
    LazyFun,
};
pub use covers::{
    classify_cover, evaluate_selection, gamma_glueable, gamma_glueable_with, glue_cover, split_cover, CoverSequence,
    CoverTags, CoverTrace, GlueCase, GluePartition, PickSchedule, PointTrace, SelectionMode, SelectionVerdict,
};
pub use epset::EpSet;
pub use error::{LabError, ParseError, Result};
pub use families::{reaping_relative, split_witness_check, FamilySpec, KindClaim, TestBattery};
pub use lazy::{baire_to_roth, GreedySide, LazySet, LazySource, LazyTruncation};
pub use qafun::{QaFun, StrandFun};
