//! Mean estimators under central DP, LDP and SLDP, and the point-perturbation
//! mechanisms compared in the classification study.

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::mechanisms::{check_eps, laplace_noise, sample_planar_laplace, RngStream};
use crate::scheme::Partition;

/// A function with values in `[0, C]` on the domain, with a closed-form
/// oscillation over rectangles.
#[derive(Debug, Clone)]
pub enum BoundedFunction {
    /// `f(x) = ‖x‖²`.
    SquaredNorm,
    /// `f(x) = exp(-‖x‖² / (2σ²))`.
    GaussianBump { sigma: f64 },
    /// Any other function. It can be evaluated and bounded, but has no
    /// oscillation, so it cannot drive SLDP releases.
    Custom { name: String, eval: fn(&Point) -> f64, bound: f64 },
}

impl BoundedFunction {
    pub fn eval(&self, p: &Point) -> f64 {
        match self {
            BoundedFunction::SquaredNorm => p.norm_sq(),
            BoundedFunction::GaussianBump { sigma } => (-p.norm_sq() / (2.0 * sigma * sigma)).exp(),
            BoundedFunction::Custom { eval, .. } => eval(p),
        }
    }

    /// Range bound `C` over `domain`.
    pub fn bound(&self, domain: &Rect) -> f64 {
        match self {
            BoundedFunction::SquaredNorm => farthest_sq(domain),
            BoundedFunction::GaussianBump { .. } => 1.0,
            BoundedFunction::Custom { bound, .. } => *bound,
        }
    }

    /// `max f - min f` over `region`.
    pub fn oscillation(&self, region: &Rect) -> Result<f64> {
        let (near, far) = (nearest_sq(region), farthest_sq(region));
        match self {
            BoundedFunction::SquaredNorm => Ok(far - near),
            BoundedFunction::GaussianBump { sigma } => {
                let s2 = 2.0 * sigma * sigma;
                Ok((-near / s2).exp() - (-far / s2).exp())
            }
            BoundedFunction::Custom { name, .. } => Err(Error::UnsupportedFunction(name.clone())),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            BoundedFunction::GaussianBump { sigma } if !(*sigma > 0.0 && sigma.is_finite()) => {
                Err(Error::invalid(format!("bump width must be positive, got {sigma}")))
            }
            BoundedFunction::Custom { bound, .. } if !(*bound > 0.0 && bound.is_finite()) => {
                Err(Error::invalid(format!("range bound must be positive, got {bound}")))
            }
            _ => Ok(()),
        }
    }
}

fn nearest_sq(r: &Rect) -> f64 {
    r.clamp(&Point::new(0.0, 0.0)).norm_sq()
}

fn farthest_sq(r: &Rect) -> f64 {
    let x = r.xmin.abs().max(r.xmax.abs());
    let y = r.ymin.abs().max(r.ymax.abs());
    x * x + y * y
}

/// Oscillation of `f` over one privacy region.
pub fn region_oscillation(f: &BoundedFunction, region: &Rect) -> Result<f64> {
    f.validate()?;
    f.oscillation(region)
}

fn check_values(values: &[f64], c: f64) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid("cannot estimate the mean of an empty sample"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("range bound must be positive, got {c}")));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=c).contains(*v)) {
        return Err(Error::invalid(format!("value {v} outside [0, {c}]")));
    }
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Central DP: the exact mean plus one `Lap(C / (N ε))` draw.
pub fn dp_mean(values: &[f64], c: f64, eps: f64, rng: &mut RngStream) -> Result<f64> {
    check_values(values, c)?;
    check_eps(eps)?;
    Ok(mean(values) + laplace_noise(rng, c / (values.len() as f64 * eps)))
}

/// LDP: every user adds `Lap(C / ε)` to their own value.
pub fn ldp_mean(values: &[f64], c: f64, eps: f64, rng: &mut RngStream) -> Result<f64> {
    check_values(values, c)?;
    check_eps(eps)?;
    let scale = c / eps;
    let total: f64 = values.iter().map(|v| v + laplace_noise(rng, scale)).sum();
    Ok(total / values.len() as f64)
}

/// One user's SLDP release: `f(x) + Lap(osc(U) / ε)`. Returns the report and
/// its noise scale.
pub fn sldp_report(p: &Point, region: &Rect, f: &BoundedFunction, eps: f64, rng: &mut RngStream) -> Result<(f64, f64)> {
    if !region.contains_closed(p) {
        return Err(Error::invalid(format!("point ({}, {}) outside its privacy region", p.x, p.y)));
    }
    let scale = f.oscillation(region)? / eps;
    Ok((f.eval(p) + laplace_noise(rng, scale), scale))
}

/// SLDP: every user adds Laplace noise scaled by the oscillation of `f` over
/// their own privacy region.
pub fn sldp_mean(points: &[Point], regions: &[Rect], f: &BoundedFunction, eps: f64, rng: &mut RngStream) -> Result<f64> {
    if points.len() != regions.len() {
        return Err(Error::LengthMismatch { left: points.len(), right: regions.len() });
    }
    if points.is_empty() {
        return Err(Error::invalid("cannot estimate the mean of an empty sample"));
    }
    f.validate()?;
    check_eps(eps)?;
    let mut total = 0.0;
    for (p, r) in points.iter().zip(regions) {
        total += sldp_report(p, r, f, eps, rng)?.0;
    }
    Ok(total / points.len() as f64)
}

/// SLDP-Quantization: the centroid of the leaf holding `p`.
pub fn perturb_quantize(p: &Point, partition: &Partition) -> Result<Point> {
    Ok(partition.leaf_containing(p)?.rect.centroid())
}

/// SLDP-Split: leaf centroid plus per-axis Laplace noise with scale
/// `side / eps_half`.
pub fn perturb_split(p: &Point, partition: &Partition, eps_half: f64, rng: &mut RngStream) -> Result<Point> {
    check_eps(eps_half)?;
    let rect = partition.leaf_containing(p)?.rect;
    let c = rect.centroid();
    let dx = laplace_noise(rng, rect.width() / eps_half);
    let dy = laplace_noise(rng, rect.height() / eps_half);
    Ok(Point::new(c.x + dx, c.y + dy))
}

/// Standard LDP: per-axis `Lap(side / ε)` then clipping to the domain. On the
/// unit square the scale is `1 / ε`.
pub fn perturb_ldp(p: &Point, domain: &Rect, eps: f64, rng: &mut RngStream) -> Result<Point> {
    check_eps(eps)?;
    let dx = laplace_noise(rng, domain.width() / eps);
    let dy = laplace_noise(rng, domain.height() / eps);
    Ok(domain.clamp(&Point::new(p.x + dx, p.y + dy)))
}

/// Geo-indistinguishability via planar Laplace. Not clipped.
pub fn perturb_geo(p: &Point, eps: f64, rng: &mut RngStream) -> Result<Point> {
    sample_planar_laplace(rng, *p, eps)
}
