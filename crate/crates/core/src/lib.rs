//! Exact certification of generic rank for finite-dimensional affinor
//! structures, with supporting algebra, Clifford, distribution and planarity
//! tooling.

pub mod algebra;
pub mod cli;
pub mod clifford;
pub mod distributions;
pub mod frobenius;
pub mod hullrank;
pub mod planarity;
pub mod poly;
pub mod report;
pub mod sampling;
pub mod scalarlinalg;
