//! Searches standing in for the existence arguments: numerical preimages of
//! torus targets inside SU(2), exact rational discriminant-square sampling,
//! and the bounded exhaustive scan showing x^4 y^4 misses -I over Q.

mod discriminant;
mod preimage;
mod prop41;

pub use discriminant::{sample_discriminant_squares, DiscriminantReport, DiscriminantSample};
pub use preimage::{
    conjugate_witnesses, empirical_threshold, su2_preimage, PreimageResult, SearchBudget,
};
pub use prop41::{prop41_search, NearSolution, Prop41Report};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("the trivial word has no preimage search")]
    TrivialWord,
    #[error(transparent)]
    Word(#[from] crate::word::WordError),
    #[error(transparent)]
    Exact(#[from] crate::exact::ExactError),
}
