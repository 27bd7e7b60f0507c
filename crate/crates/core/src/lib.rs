pub mod arcs;
pub mod arith;
pub mod cli;
pub mod counting;
pub mod error;
pub mod exponents;
pub mod numeric;
pub mod params;
pub mod quad;
pub mod report;
pub mod series;
pub mod signature;
pub mod sums;
