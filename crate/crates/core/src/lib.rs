//! Executable checks for a set of number-theory claims and kernel-projection
//! differential-equation solutions, each paired with an independent oracle.

pub mod decomposition;
pub mod integer;
pub mod rational;
pub mod report;
pub mod diophantine;
pub mod factor_bounds;
pub mod de;
pub mod harness;
