//! The Gauss hypergeometric function ₂F₁(1, δ; 1+δ; z) on the closed left
//! half-plane.
//!
//! Three expansions cover the region:
//! - |z| ≤ 0.5: the defining series Σ δ/(δ+n) zⁿ;
//! - 0.5 < |z| ≤ 2: Pfaff, (1−z)⁻¹ ₂F₁(1, 1; 1+δ; z/(z−1));
//! - |z| > 2: the expansion in 1/z,
//!   δπ/sin(πδ)·(−z)^(−δ) − δ Σ_k (−1)^k (−z)^(−1−k)/(k+1−δ).
//!
//! The complex form is needed when the Laplace transform is inverted
//! numerically; the public real entry point checks the documented domain.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const SERIES_RADIUS: f64 = 0.5;
const ASYMPTOTIC_RADIUS: f64 = 2.0;
const MAX_TERMS: usize = 5_000;

/// ₂F₁(1, δ; 1+δ; z) for 0 < δ < 1 and real z ≤ 0.
pub fn gauss_2f1_special(delta: f64, z: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(
            "gauss_2f1_special",
            format!("delta must lie in (0, 1), got {delta}"),
        ));
    }
    if !(z <= 0.0) || z.is_infinite() {
        return Err(Error::domain(
            "gauss_2f1_special",
            format!("z must be finite and <= 0, got {z}"),
        ));
    }
    Ok(hyp2f1_left_half_plane(delta, Complex64::new(z, 0.0)).re)
}

/// Same function at complex z with Re z ≤ 0. The caller guarantees the
/// domain; nothing is checked here.
pub(crate) fn hyp2f1_left_half_plane(delta: f64, z: Complex64) -> Complex64 {
    let r = z.norm();
    if r <= SERIES_RADIUS {
        origin_series(delta, z)
    } else if r <= ASYMPTOTIC_RADIUS {
        pfaff(delta, z)
    } else {
        large_argument(delta, -z)
    }
}

fn origin_series(delta: f64, z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for n in 1..MAX_TERMS {
        pow *= z;
        let term = pow * (delta / (delta + n as f64));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn pfaff(delta: f64, z: Complex64) -> Complex64 {
    let w = z / (z - 1.0);
    // ₂F₁(1, 1; 1+δ; w) = Σ n!/(1+δ)_n wⁿ
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= w * ((nf + 1.0) / (nf + 1.0 + delta));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum / (1.0 - z)
}

/// u = −z, |u| > 1.
fn large_argument(delta: f64, u: Complex64) -> Complex64 {
    let head = u.powf(-delta) * (delta * PI / (PI * delta).sin());
    let inv = u.inv();
    let mut pow = inv;
    let mut tail = Complex64::new(0.0, 0.0);
    for k in 0..MAX_TERMS {
        let term = pow / (k as f64 + 1.0 - delta);
        if k % 2 == 0 {
            tail += term;
        } else {
            tail -= term;
        }
        if term.norm() <= 1e-17 * tail.norm() {
            break;
        }
        pow *= inv;
    }
    head - tail * delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad::{integrate_adaptive, QuadOptions};
    use proptest::prelude::*;

    /// δ ∫₀¹ t^(δ−1)/(1−zt) dt, with t = s^(1/δ) to remove the endpoint
    /// singularity: ∫₀¹ ds / (1 − z s^(1/δ)).
    fn integral_representation(delta: f64, z: f64) -> f64 {
        let opts = QuadOptions::default().with_tolerances(0.0, 1e-13);
        let mut breaks = Vec::new();
        if z < -1.0 {
            // the integrand drops from 1 to ~0 around s = (−1/z)^δ
            let knee = (-1.0 / z).powf(delta);
            breaks.extend([knee * 0.1, knee, (knee * 10.0).min(0.5)]);
            breaks.retain(|b| *b > 0.0 && *b < 1.0);
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
        }
        integrate_adaptive(|s| 1.0 / (1.0 - z * s.powf(1.0 / delta)), 0.0, 1.0, &breaks, &opts)
            .unwrap()
            .value
    }

    #[test]
    fn value_at_origin() {
        assert_eq!(gauss_2f1_special(0.3, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn two_thirds_at_minus_half() {
        let v = gauss_2f1_special(2.0 / 3.0, -0.5).unwrap();
        let oracle = integral_representation(2.0 / 3.0, -0.5);
        assert!((v / oracle - 1.0).abs() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn delta_one_half_closed_form() {
        // ₂F₁(1, ½; 3/2; −u²) = atan(u)/u
        for u in [0.1f64, 0.7, 1.0, 1.3, 3.0, 40.0, 1e4] {
            let v = gauss_2f1_special(0.5, -u * u).unwrap();
            assert!((v - u.atan() / u).abs() < 1e-14, "u = {u}");
        }
    }

    #[test]
    fn grid_matches_integral_representation() {
        for i in 0..20 {
            let delta = (i as f64 + 0.5) / 20.0;
            for j in 0..20 {
                // log-spaced from −1e-3 to −1e6, plus exact 0 at j = 0
                let z = if j == 0 {
                    0.0
                } else {
                    -(10f64).powf(-3.0 + 9.0 * (j - 1) as f64 / 18.0)
                };
                let v = gauss_2f1_special(delta, z).unwrap();
                let oracle = integral_representation(delta, z);
                assert!(
                    (v / oracle - 1.0).abs() < 1e-10,
                    "delta={delta} z={z}: {v} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn continuous_across_switch_points() {
        for delta in [0.05, 2.0 / 3.0, 0.5, 0.95] {
            for r in [SERIES_RADIUS, ASYMPTOTIC_RADIUS] {
                let inner = gauss_2f1_special(delta, -r).unwrap();
                let outer = gauss_2f1_special(delta, -r * (1.0 + 1e-15)).unwrap();
                assert!((inner - outer).abs() < 1e-9);
                // neighbouring branches agree at each switch
                let z = Complex64::new(-r, 0.0);
                let (a, b) = if r == SERIES_RADIUS {
                    (origin_series(delta, z).re, pfaff(delta, z).re)
                } else {
                    (pfaff(delta, z).re, large_argument(delta, -z).re)
                };
                assert!((a - b).abs() < 1e-12, "delta={delta} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn complex_argument_consistency() {
        // The three branches agree off the real axis too.
        let delta = 2.0 / 3.0;
        for z in [
            Complex64::new(-0.3, 0.35),
            Complex64::new(-1.1, 1.2),
            Complex64::new(-0.1, -1.9),
        ] {
            let p = pfaff(delta, z);
            if z.norm() < 1.0 {
                assert!((origin_series(delta, z) - p).norm() < 1e-12);
            }
            if z.norm() > 1.0 {
                assert!((large_argument(delta, -z) - p).norm() < 1e-12, "{z}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(gauss_2f1_special(0.0, -1.0).is_err());
        assert!(gauss_2f1_special(1.0, -1.0).is_err());
        assert!(gauss_2f1_special(0.5, 0.1).is_err());
        assert!(gauss_2f1_special(0.5, f64::NEG_INFINITY).is_err());
        assert!(gauss_2f1_special(0.5, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn decreasing_in_modulus(delta in 0.01f64..0.99, a in 0.0f64..1e4, frac in 0.0f64..1.0) {
            let b = a * frac;
            let fa = gauss_2f1_special(delta, -a).unwrap();
            let fb = gauss_2f1_special(delta, -b).unwrap();
            prop_assert!(fa <= fb + 1e-15);
            prop_assert!(fa > 0.0 && fa <= 1.0);
        }
    }
}
