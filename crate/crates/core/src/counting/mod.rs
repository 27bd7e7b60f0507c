//! Exact counting: representation tables, exceptional sets, mean values.

pub mod mean;
pub mod mitm;
pub mod table;

pub use mean::{
    count_solutions, diagonal_split, mean_value, restricted_mean_value, weighted_count, weighted_counts, DiagonalSplit,
    FactorSource, MeanFactor, MeanValue, MeanValueSpec, RestrictedMean,
};
pub use mitm::{choose_split, MeetInMiddle};
pub use table::{ExceptionalSet, RepresentationTable, TableMode};
