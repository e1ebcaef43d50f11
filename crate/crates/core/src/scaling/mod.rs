//! Empirical scaling functions, Legendre conjugation, coarse-grain counts and
//! local-dimension traces.

mod coarse;
mod grid;
mod legendre;
mod localdim;
mod tilde;
mod window;

pub use coarse::{coarse_counts, CoarseCount};
pub use grid::{extended_reals, fmt17, Axis, GridFunction1D, GridFunction2D};
pub use legendre::{
    legendre_1d, legendre_1d_at, legendre_2d, legendre_2d_at, legendre_2d_fn, legendre_2d_rows, LegendreOptions,
};
pub use localdim::{local_dim_trace, LocalDimTrace, PointSpec};
pub use tilde::{tilde_tau_exact, PairFactors};
pub use window::{
    tau3_dp, tau3_enumerated, tilde_tau_enumerated, Cells, EnumeratedSums, RunLengthDp, ENUMERATION_CAP,
};
