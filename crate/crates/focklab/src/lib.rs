//! Numerical laboratory for Volterra-type and companion integral operators
//! on the Fock space of Gaussian-square-integrable entire functions.
//!
//! The pipeline: polynomial symbols ([`poly`]) induce operators
//! ([`operator`]) on the weighted Hilbert space ([`fock`]); truncated
//! matrices feed singular-value and Schatten-norm diagnostics
//! ([`spectrum`]); planar quadrature with certified Gaussian tails
//! ([`quadrature`]) evaluates the transform and criterion integrals whose
//! finiteness decides class membership ([`criteria`]); and [`harness`]
//! wraps it all in configs, verification suites, and CSV/JSON reports.
//!
//! Every value is immutable after construction and every operation is
//! pure, so the whole API is safe for unrestricted concurrent use.

pub mod criteria;
pub mod fock;
pub mod harness;
pub mod operator;
pub mod poly;
pub mod quadrature;
pub mod special;
pub mod spectrum;
