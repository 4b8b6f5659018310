use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::mechanisms::{check_eps, laplace_noise, RngStream};
use crate::scheme::{cells_at_depth, CellId, Partition, MAX_DEPTH};

fn grid_cell(domain: &Rect, depth: usize, p: &Point) -> Result<CellId> {
    if !domain.contains_closed(p) {
        return Err(Error::OutsideDomain { x: p.x, y: p.y });
    }
    let mut id = CellId::ROOT;
    let mut rect = *domain;
    for _ in 0..depth {
        let code = rect.quadrant_of(p);
        id = id.child(code)?;
        rect = rect.quadrant(code);
    }
    Ok(id)
}

fn exact_histogram(points: &[Point], domain: &Rect, depth: usize) -> Result<(Vec<CellId>, Vec<f64>)> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthOverflow { depth, max: MAX_DEPTH });
    }
    let cells = cells_at_depth(depth)?;
    let mut counts = vec![0.0; cells.len()];
    for p in points {
        let id = grid_cell(domain, depth, p)?;
        let slot = cells.binary_search(&id).expect("grid cells are sorted");
        counts[slot] += 1.0;
    }
    Ok((cells, counts))
}

/// Uniform `2^g × 2^g` grid where every user reports a one-hot cell vector
/// with `Lap(1/ε)` on each entry. The per-cell sum of `N` Laplace draws is
/// sampled directly as the difference of two `Gamma(N, 1/ε)` variables.
pub fn ldp_grid_build(points: &[Point], domain: &Rect, g: usize, eps: f64, rng: &mut RngStream) -> Result<Partition> {
    check_eps(eps)?;
    let (cells, mut counts) = exact_histogram(points, domain, g)?;
    if eps.is_finite() && !points.is_empty() {
        let gamma = Gamma::new(points.len() as f64, 1.0 / eps).map_err(|e| Error::invalid(e.to_string()))?;
        for c in &mut counts {
            *c += gamma.sample(rng) - gamma.sample(rng);
        }
    }
    Partition::from_leaves(*domain, cells.into_iter().zip(counts).map(|(id, c)| (id, c, eps.is_infinite())))
}

/// Same mechanism simulated report by report: `N · 4^g` Laplace draws.
pub fn ldp_grid_build_per_user(points: &[Point], domain: &Rect, g: usize, eps: f64, rng: &mut RngStream) -> Result<Partition> {
    check_eps(eps)?;
    let (cells, mut counts) = exact_histogram(points, domain, g)?;
    let scale = 1.0 / eps;
    for _ in points {
        for c in &mut counts {
            *c += laplace_noise(rng, scale);
        }
    }
    Partition::from_leaves(*domain, cells.into_iter().zip(counts).map(|(id, c)| (id, c, eps.is_infinite())))
}
