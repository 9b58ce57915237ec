//! Globally adaptive 21-point Gauss–Kronrod quadrature with interior
//! breakpoints and semi-infinite ranges.
//!
//! Infinite ranges are mapped onto a finite interval with
//! `x = a + t/(1 − t)` (and its mirror for `(−∞, b]`), after which the
//! integrand is integrated on `t ∈ [0, 1)`. Breakpoints are mapped through
//! the same substitution.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_478,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error }
}

fn adaptive_finite<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    opts: &QuadOptions,
) -> std::result::Result<QuadResult, QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod(f, w[0], w[1]));
            evaluations += 21;
        }
    }
    let total = |heap: &BinaryHeap<Panel>| {
        // Sum in a fixed order so the result does not depend on heap layout.
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let mut subdivisions = 0;
    loop {
        let (value, error) = total(&heap);
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        let result = QuadResult {
            value,
            error,
            evaluations,
        };
        if error <= tol {
            return Ok(result);
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(result);
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval exhausted at machine precision; keep it as is.
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            if heap.iter().all(|p| p.error == 0.0) {
                return Err(result);
            }
            continue;
        }
        heap.push(gauss_kronrod(f, worst.a, mid));
        heap.push(gauss_kronrod(f, mid, worst.b));
        evaluations += 42;
        subdivisions += 1;
    }
}

/// Integrates `f` over `[a, b]`, where either bound may be infinite.
///
/// `breakpoints` lists interior points where `f` or its derivatives jump;
/// points outside `(a, b)` are ignored. On failure the error carries the best
/// estimate and its error bound.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    integrate_dyn(&f, a, b, breakpoints, opts)
}

fn integrate_dyn(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::domain("integrate_adaptive", "NaN bound"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        return integrate_dyn(f, b, a, breakpoints, opts).map(|r| QuadResult {
            value: -r.value,
            ..r
        });
    }
    let interior = |map: &dyn Fn(f64) -> f64| -> Vec<f64> {
        let mut pts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&x| x > a && x < b)
            .map(map)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    };
    let outcome = match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            let mut pts = vec![a];
            pts.extend(interior(&|x| x));
            pts.push(b);
            adaptive_finite(&f, &pts, opts)
        }
        (true, false) => {
            let g = |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let u = 1.0 - t;
                f(a + t / u) / (u * u)
            };
            let mut pts = vec![0.0];
            pts.extend(interior(&|x| (x - a) / (1.0 + x - a)));
            pts.push(1.0);
            adaptive_finite(&g, &pts, opts)
        }
        (false, true) => {
            let g = |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let u = 1.0 - t;
                f(b - t / u) / (u * u)
            };
            let mut pts = vec![0.0];
            pts.extend(interior(&|x| (b - x) / (1.0 + b - x)));
            pts.push(1.0);
            adaptive_finite(&g, &pts, opts)
        }
        (false, false) => {
            let left = integrate_dyn(f, f64::NEG_INFINITY, 0.0, breakpoints, opts)?;
            let right = integrate_dyn(f, 0.0, f64::INFINITY, breakpoints, opts)?;
            return Ok(QuadResult {
                value: left.value + right.value,
                error: left.error + right.error,
                evaluations: left.evaluations + right.evaluations,
            });
        }
    };
    outcome.map_err(|r| Error::Quadrature {
        context: format!("[{a}, {b}]"),
        estimate: r.value,
        error_bound: r.error,
    })
}
