use std::f64::consts::PI;

use hybridnet_core::model::Regime;
use hybridnet_core::{Error, Result, SystemParams};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

pub type Point = [f64; 2];

/// One network realization around the typical UE at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub bs_points: Vec<Point>,
    /// IRSs within D2 of the origin; the rest never reach the UE.
    pub irs_points: Vec<Point>,
    pub active_mask: Vec<bool>,
    pub serving_bs: usize,
    /// Nearest IRS, if it lies within D1.
    pub assoc_irs: Option<usize>,
}

fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Topology {
    pub fn l0(&self) -> f64 {
        norm(self.bs_points[self.serving_bs])
    }

    /// Distance to the nearest retained IRS, infinite when there is none.
    pub fn d0(&self) -> f64 {
        self.irs_points.iter().map(|p| norm(*p)).fold(f64::INFINITY, f64::min)
    }

    pub fn regime(&self) -> Regime {
        if self.assoc_irs.is_some() {
            Regime::Beamformed
        } else if self.irs_points.is_empty() {
            Regime::NoIrs
        } else {
            Regime::ScatteredOnly
        }
    }
}

/// Smallest disk radius accepted: 20 mean cell radii.
pub fn min_disk_radius(params: &SystemParams) -> f64 {
    20.0 / (params.lambda_b() * PI).sqrt()
}

fn check_disk(params: &SystemParams, disk_radius: f64) -> Result<()> {
    let min = min_disk_radius(params);
    if !(disk_radius >= min) || !disk_radius.is_finite() {
        return Err(Error::InvalidParameter {
            name: "disk_radius",
            reason: format!("{disk_radius} m is below 20 mean cell radii ({min:.1} m)"),
        });
    }
    Ok(())
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let n: f64 = Poisson::new(mean).expect("positive mean").sample(rng);
    n as usize
}

/// Uniform point in the annulus inner < |x| ≤ outer.
fn annulus_point<R: Rng + ?Sized>(inner: f64, outer: f64, rng: &mut R) -> Point {
    let r = (inner * inner + rng.random::<f64>() * (outer * outer - inner * inner)).sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    [r * phi.cos(), r * phi.sin()]
}

fn ppp_annulus<R: Rng + ?Sized>(lambda: f64, inner: f64, outer: f64, rng: &mut R) -> Vec<Point> {
    let n = poisson(lambda * PI * (outer * outer - inner * inner), rng);
    (0..n).map(|_| annulus_point(inner, outer, rng)).collect()
}

fn activity<R: Rng + ?Sized>(count: usize, serving: usize, p: f64, rng: &mut R) -> Vec<bool> {
    (0..count)
        .map(|m| {
            let on = rng.random::<f64>() < p;
            on || m == serving
        })
        .collect()
}

fn associate(irs: &[Point], params: &SystemParams) -> Option<usize> {
    let (idx, d) = irs
        .iter()
        .enumerate()
        .map(|(i, p)| (i, norm(*p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    (d <= params.d1()).then_some(idx)
}

/// PPP topology in a disk. The serving BS is the nearest one and is always
/// active; realizations without any BS are redrawn.
pub fn sample_topology<R: Rng + ?Sized>(
    params: &SystemParams,
    disk_radius: f64,
    rng: &mut R,
) -> Result<Topology> {
    check_disk(params, disk_radius)?;
    let bs_points = loop {
        let pts = ppp_annulus(params.lambda_b(), 0.0, disk_radius, rng);
        if !pts.is_empty() {
            break pts;
        }
    };
    let serving_bs = bs_points
        .iter()
        .enumerate()
        .min_by(|a, b| norm(*a.1).total_cmp(&norm(*b.1)))
        .map(|(i, _)| i)
        .expect("nonempty");
    let active_mask = activity(bs_points.len(), serving_bs, params.p(), rng);
    let irs_points = ppp_annulus(params.lambda_i(), 0.0, params.d2(), rng);
    let assoc_irs = associate(&irs_points, params);
    Ok(Topology {
        bs_points,
        irs_points,
        active_mask,
        serving_bs,
        assoc_irs,
    })
}

/// Topology conditioned on the serving distance l₀ and the nearest-IRS
/// distance d₀ (infinite for no IRS within D2). Other BSs form a PPP beyond
/// l₀, other IRSs a PPP in (d₀, D2]. With `with_interferers = false` only
/// the serving BS is placed.
pub fn sample_conditioned_topology<R: Rng + ?Sized>(
    l0: f64,
    d0: f64,
    params: &SystemParams,
    disk_radius: f64,
    with_interferers: bool,
    rng: &mut R,
) -> Result<Topology> {
    if !(l0 >= 0.0 && l0 < disk_radius) {
        return Err(Error::InvalidParameter {
            name: "l0",
            reason: format!("{l0} must lie in [0, disk radius)"),
        });
    }
    if !(d0 >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "d0",
            reason: format!("{d0} must be nonnegative"),
        });
    }
    let mut bs_points = vec![annulus_point(l0, l0, rng)];
    if with_interferers {
        check_disk(params, disk_radius)?;
        bs_points.extend(ppp_annulus(params.lambda_b(), l0, disk_radius, rng));
    }
    let active_mask = activity(bs_points.len(), 0, params.p(), rng);
    let mut irs_points = Vec::new();
    if d0 <= params.d2() {
        irs_points.push(annulus_point(d0, d0, rng));
        irs_points.extend(ppp_annulus(params.lambda_i(), d0, params.d2(), rng));
    }
    let assoc_irs = associate(&irs_points, params);
    Ok(Topology {
        bs_points,
        irs_points,
        active_mask,
        serving_bs: 0,
        assoc_irs,
    })
}
