//! Hausdorff dimensions of limsup sets of annuli centred at rational points.
//!
//! The crate evaluates the closed-form dimension formulas for max-norm
//! annuli, rectangular annuli and norm-difference quasi-annuli, and
//! cross-checks them with the machinery the formulas rest on:
//!
//! - [`formulas`]: exact closed forms, regime predicates, limit evaluations.
//! - [`geometry`]: exact membership for every shape involved, the split of a
//!   rectangular annulus into shifted rectangles, and the cube inscribed in a
//!   quasi-annulus.
//! - [`mtp`]: the rectangles-to-rectangles transference bound, the exponent
//!   selection that feeds it, shift and series conditions.
//! - [`enumerate`]: deterministic streams of rational centres and shapes.
//! - [`cover`]: predicted and measured covering counts and the critical
//!   exponent of the natural covers.
//! - [`sweep`]: seeded consistency sweeps with CSV reports.
//!
//! Arithmetic is exact over rationals. Irrational radii (non-integer
//! exponents) are carried as certified dyadic [`Interval`]s.

pub mod cover;
pub mod enumerate;
pub mod error;
pub mod formulas;
pub mod geometry;
pub mod interval;
pub mod mtp;
pub mod numeric;
pub mod sweep;

pub use error::{Error, Result};
pub use formulas::{Branch, DimensionResult, ExponentProfile, Hypotheses};
pub use interval::Interval;
pub use numeric::Q;
