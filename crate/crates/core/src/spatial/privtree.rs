use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::mechanisms::{check_eps, laplace_noise, RngStream};
use crate::scheme::{CellId, Partition, MAX_DEPTH};

/// Split-test parameters: noise scale `λ`, per-level decay `δ` and threshold `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivTreeParams {
    pub lambda: f64,
    pub delta: f64,
    pub theta: f64,
}

impl PrivTreeParams {
    /// `λ = 7 / (3 ε_tree)`, `δ = λ ln 4`, `θ = 0`.
    pub fn new(eps_tree: f64) -> Result<Self> {
        check_eps(eps_tree)?;
        let lambda = 7.0 / (3.0 * eps_tree);
        Ok(PrivTreeParams { lambda, delta: lambda * 4f64.ln(), theta: 0.0 })
    }

    /// Depth-decayed, floored count used by the split test.
    pub fn biased_count(&self, count: usize, depth: usize) -> f64 {
        (count as f64 - depth as f64 * self.delta).max(self.theta - self.delta)
    }
}

/// Central-DP PrivTree decomposition over raw points. A node is split when
/// its biased count plus `Lap(λ)` exceeds `θ`, up to `max_depth`; leaf counts
/// get fresh `Lap(1 / eps_count)` noise.
pub fn privtree_build(
    points: &[Point],
    domain: &Rect,
    eps_tree: f64,
    eps_count: f64,
    max_depth: usize,
    rng: &mut RngStream,
) -> Result<Partition> {
    let params = PrivTreeParams::new(eps_tree)?;
    check_eps(eps_count)?;
    if max_depth > MAX_DEPTH {
        return Err(Error::DepthOverflow { depth: max_depth, max: MAX_DEPTH });
    }
    if let Some(p) = points.iter().find(|p| !domain.contains_closed(p)) {
        return Err(Error::OutsideDomain { x: p.x, y: p.y });
    }
    let mut leaves = Vec::new();
    let mut stack = vec![(CellId::ROOT, *domain, points.to_vec())];
    while let Some((id, rect, members)) = stack.pop() {
        let depth = id.depth();
        let b = params.biased_count(members.len(), depth);
        if depth < max_depth && b + laplace_noise(rng, params.lambda) > params.theta {
            let mut parts: [Vec<Point>; 4] = Default::default();
            for p in members {
                parts[rect.quadrant_of(&p) as usize].push(p);
            }
            // Reverse push so children are visited in code order.
            for (code, part) in parts.into_iter().enumerate().rev() {
                stack.push((id.child(code as u8)?, rect.quadrant(code as u8), part));
            }
        } else {
            let noisy = members.len() as f64 + laplace_noise(rng, 1.0 / eps_count);
            leaves.push((id, noisy, eps_count.is_infinite()));
        }
    }
    Partition::from_leaves(*domain, leaves)
}
