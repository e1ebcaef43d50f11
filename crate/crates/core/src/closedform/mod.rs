//! Closed-form scaling functions, spectra and support regions.

mod binomial;
mod bivariate;
mod mixed;
mod regions;

pub use binomial::{binomial_range, binomial_spectrum, tau_binomial, tau_binomial_deriv, BinomialRange};
pub use bivariate::{big_t, bivariate_tau_closed, g_map, kappa, taue, tauet, BivariateCaseParams, CaseTag};
pub use mixed::{spectrum_mixed, spectrum_nu_eta, NuEtaSolution};
pub use regions::{convex_hull, RegionKind, SupportRegion};
