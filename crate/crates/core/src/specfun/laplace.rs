//! Numerical inversion of Laplace transforms of probability densities.
//!
//! Abate–Whitt Euler summation of the Bromwich integral, trapezoidal rule
//! with the Fourier series accelerated by binomial averaging of partial sums.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseLaplaceOptions {
    /// Contour abscissa parameter; discretization error is about e^(−A).
    pub a: f64,
    /// Plain terms of the alternating series before averaging.
    pub pre_terms: usize,
    /// Binomial (Euler) averaging terms.
    pub euler_terms: usize,
    /// Maximum accepted tail estimate.
    pub tol: f64,
}

impl Default for InverseLaplaceOptions {
    fn default() -> Self {
        InverseLaplaceOptions {
            a: 18.4,
            pre_terms: 15,
            euler_terms: 11,
            tol: 1e-6,
        }
    }
}

/// Inverts a transform `f_hat` at t > 0. Returns the value and the tail
/// estimate (difference of two consecutive Euler sums).
pub fn euler_inversion(
    f_hat: impl Fn(Complex64) -> Complex64 + Copy,
    t: f64,
    opts: &InverseLaplaceOptions,
) -> (f64, f64) {
    let n = opts.pre_terms;
    let m = opts.euler_terms;
    let scale = (opts.a / 2.0).exp() / t;
    let base = opts.a / (2.0 * t);

    let mut partial = Vec::with_capacity(n + m + 2);
    let mut sum = 0.5 * f_hat(Complex64::new(base, 0.0)).re;
    for k in 1..=n + m + 1 {
        let s = Complex64::new(base, k as f64 * PI / t);
        let term = f_hat(s).re;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        if k >= n {
            partial.push(sum);
        }
    }
    // partial[j] is the partial sum through k = n + j
    let binom = binomial_row(m);
    let avg = |offset: usize| -> f64 {
        binom
            .iter()
            .enumerate()
            .map(|(j, c)| c * partial[offset + j])
            .sum::<f64>()
            * 0.5f64.powi(m as i32)
    };
    let e0 = scale * avg(0);
    let e1 = scale * avg(1);
    (e1, (e1 - e0).abs())
}

fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0f64; m + 1];
    for j in 1..m {
        row[j] = row[j - 1] * (m - j + 1) as f64 / j as f64;
    }
    row
}

/// F(x) for the density whose Laplace transform is `laplace`, obtained by
/// inverting L(s)/s. The result is clamped to [0, 1].
///
/// `laplace` is only evaluated in the right half-plane Re s > 0.
pub fn inverse_laplace_cdf(
    laplace: impl Fn(Complex64) -> Complex64,
    x: f64,
    opts: &InverseLaplaceOptions,
) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "inverse_laplace_cdf",
            format!("x must be positive and finite, got {x}"),
        ));
    }
    let f_hat = |s: Complex64| laplace(s) / s;
    let (mut value, mut tail) = euler_inversion(f_hat, x, opts);
    // slowly converging series: retry once with a longer head
    if value.is_finite() && tail > opts.tol {
        let longer = InverseLaplaceOptions {
            pre_terms: 4 * opts.pre_terms,
            euler_terms: opts.euler_terms + 4,
            ..*opts
        };
        (value, tail) = euler_inversion(f_hat, x, &longer);
    }
    if !value.is_finite() || tail > opts.tol {
        return Err(Error::InverseLaplace { x, tail });
    }
    Ok(value.clamp(0.0, 1.0))
}
