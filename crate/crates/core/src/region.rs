//! Two-user secrecy rate regions (time-sharing MAC, broadcast) and their
//! downward-closed convex hulls.

use serde::{Deserialize, Serialize};

use crate::channel::MainChannel;
use crate::error::{dim, invalid, Result};
use crate::rates::{slot_rate, validate_grid, Convention};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }

    fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Raw achievable points plus the counterclockwise extreme points of the
/// convex hull of their downward closure (origin first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub raw_points: Vec<RatePoint>,
    pub hull: Vec<RatePoint>,
}

impl RateRegion {
    pub fn from_points(raw_points: Vec<RatePoint>) -> Result<Self> {
        let hull = convex_hull_2d(&raw_points)?;
        Ok(Self { raw_points, hull })
    }

    /// Largest `r1 + r2` over the region.
    pub fn max_sum_rate(&self) -> f64 {
        self.hull.iter().map(RatePoint::sum).fold(0.0, f64::max)
    }

    /// Whether `p` lies in the region (boundary included, up to `tol`).
    pub fn contains(&self, p: RatePoint, tol: f64) -> bool {
        if p.r1 < -tol || p.r2 < -tol {
            return false;
        }
        match self.hull.len() {
            0 => false,
            1 => p.r1.abs() <= tol && p.r2.abs() <= tol,
            2 => on_segment(self.hull[0], self.hull[1], p, tol),
            n => (0..n).all(|i| {
                let a = self.hull[i];
                let b = self.hull[(i + 1) % n];
                let len = ((b.r1 - a.r1).powi(2) + (b.r2 - a.r2).powi(2)).sqrt();
                cross(a, b, p) >= -tol * len.max(1.0)
            }),
        }
    }

    /// Every hull vertex of `self` lies inside `other`.
    pub fn is_subset_of(&self, other: &RateRegion, tol: f64) -> bool {
        self.hull.iter().all(|&p| other.contains(p, tol))
    }
}

fn on_segment(a: RatePoint, b: RatePoint, p: RatePoint, tol: f64) -> bool {
    let len = ((b.r1 - a.r1).powi(2) + (b.r2 - a.r2).powi(2)).sqrt();
    if cross(a, b, p).abs() > tol * len.max(1.0) {
        return false;
    }
    let dot = (p.r1 - a.r1) * (b.r1 - a.r1) + (p.r2 - a.r2) * (b.r2 - a.r2);
    dot >= -tol && dot <= len * len + tol
}

/// `(b - a) × (p - a)`; positive when `p` is left of `a → b`.
fn cross(a: RatePoint, b: RatePoint, p: RatePoint) -> f64 {
    (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1)
}

/// Counterclockwise extreme points of the hull of `points`, their axis
/// projections and the origin. Collinear boundary points are dropped.
pub fn convex_hull_2d(points: &[RatePoint]) -> Result<Vec<RatePoint>> {
    if points.is_empty() {
        return invalid("convex hull needs at least one point");
    }
    if points.iter().any(|p| !p.r1.is_finite() || !p.r2.is_finite()) {
        return invalid("rate points must be finite");
    }
    if points.iter().any(|p| p.r1 < 0.0 || p.r2 < 0.0) {
        return invalid("rate points must be nonnegative");
    }
    let mut pts = Vec::with_capacity(3 * points.len() + 1);
    pts.push(RatePoint::new(0.0, 0.0));
    for p in points {
        pts.push(*p);
        pts.push(RatePoint::new(p.r1, 0.0));
        pts.push(RatePoint::new(0.0, p.r2));
    }
    pts.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(pts);
    }
    let scale = pts
        .iter()
        .map(|p| p.r1.abs().max(p.r2.abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-12 * scale * scale;

    // Andrew's monotone chain.
    let mut lower: Vec<RatePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<RatePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(lower)
}

/// 101 uniform points in `[0.01, 1]`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=100).map(|k| 0.01 + 0.99 * k as f64 / 100.0).collect()
}

fn check_pair(ch1: &MainChannel, ch2: &MainChannel) -> Result<usize> {
    let n_t = ch1.n_t();
    if ch1.n_r() != n_t || ch2.n_t() != n_t || ch2.n_r() != n_t {
        return dim("both users' channels must be N_T x N_T with the same N_T");
    }
    Ok(n_t)
}

/// Time-sharing MAC region: user 1 transmits alone for a fraction `α` at
/// power `[P̄/α - N_T]⁺`, user 2 for the remaining `1 - α`.
pub fn mac_region(
    ch1: &MainChannel,
    ch2: &MainChannel,
    pbar: f64,
    n_e: usize,
    alpha_grid: &[f64],
    conv: Convention,
) -> Result<RateRegion> {
    let n_t = check_pair(ch1, ch2)? as f64;
    if alpha_grid.is_empty() {
        return invalid("alpha grid is empty");
    }
    if alpha_grid.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
        return invalid("alpha values must lie in (0, 1]");
    }
    if !(pbar >= 0.0) {
        return invalid("power budget must be >= 0");
    }
    let user = |ch: &MainChannel, frac: f64| {
        if frac <= 0.0 {
            0.0
        } else {
            frac * slot_rate(ch, (pbar / frac - n_t).max(0.0), n_e, conv)
        }
    };
    let raw = alpha_grid
        .iter()
        .map(|&a| RatePoint::new(user(ch1, a), user(ch2, 1.0 - a)))
        .collect();
    RateRegion::from_points(raw)
}

/// Broadcast region: hull of the origin and the two single-user corners.
pub fn bc_region(
    ch1: &MainChannel,
    ch2: &MainChannel,
    pbar: f64,
    n_e: usize,
    conv: Convention,
) -> Result<RateRegion> {
    let n_t = check_pair(ch1, ch2)?;
    if !(pbar >= 0.0) {
        return invalid("power budget must be >= 0");
    }
    let p = (pbar - n_t as f64).max(0.0);
    let raw = vec![
        RatePoint::new(0.0, 0.0),
        RatePoint::new(slot_rate(ch1, p, n_e, conv), 0.0),
        RatePoint::new(0.0, slot_rate(ch2, p, n_e, conv)),
    ];
    RateRegion::from_points(raw)
}

/// Slope of the maximal sum rate against `log2 P̄`.
pub fn region_sum_sdof<F>(region_fn: F, pbar_grid: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> Result<RateRegion>,
{
    validate_grid(pbar_grid)?;
    let xs: Vec<f64> = pbar_grid.iter().map(|p| p.log2()).collect();
    let ys = pbar_grid
        .iter()
        .map(|&p| region_fn(p).map(|r| r.max_sum_rate()))
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::mc::ols_slope(&xs, &ys))
}
