//! Special functions and numerical kernels.

pub mod bell;
pub mod expint;
pub mod gamma;
pub mod hyper;
pub mod laplace;
pub mod quad;

pub use bell::{complete_bell, complete_bell_all, falling_factorial, rising_factorial};
pub use expint::exp_integral;
pub use gamma::{gamma, ln_gamma, regularized_upper_gamma, upper_incomplete_gamma};
pub use hyper::gauss_2f1_special;
pub use laplace::{inverse_laplace_cdf, InverseLaplaceOptions};
pub use quad::{integrate_adaptive, QuadOptions, QuadResult};
