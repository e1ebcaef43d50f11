//! Multiplicative cascades on the dyadic tree and their bivariate multifractal analysis.
//!
//! The crate covers binomial measures `μ_p`, measures `ν_η` switched by a random
//! environment, and a deterministic pair of Cantor-like measures whose bivariate
//! spectrum and Legendre spectrum have disjoint supports. Scaling functions are
//! computed exactly (closed forms, O(j) collapses, a run-length DP) or by brute
//! enumeration, and Legendre conjugates are taken numerically on grids.

pub mod cascades;
pub mod checks;
pub mod closedform;
pub mod dyadic;
mod error;
pub mod numeric;
pub mod scaling;

pub use error::{Error, Result};
