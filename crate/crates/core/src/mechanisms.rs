//! Seedable randomness and the noise primitives built on it: Laplace samples
//! and the planar Laplace mechanism for geo-indistinguishability.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// A reproducible random stream addressed by `(seed, stream id)`.
///
/// Identical addresses yield bit-identical sequences. Sub-streams for a
/// trial, user or round are derived with [`RngStream::substream`] so that
/// protocol runs can be replayed and coupled.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Fresh stream at the position addressed by `tags` below this one.
    /// Does not advance `self`.
    pub fn substream(&self, tags: &[u64]) -> RngStream {
        let id = tags.iter().fold(mix(self.stream ^ 0x243f_6a88_85a3_08d3), |acc, &t| mix(acc ^ mix(t)));
        RngStream::new(self.seed, id)
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Checks a privacy budget. `f64::INFINITY` is accepted and means "no noise".
pub fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && !eps.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(format!("privacy budget must be positive, got {eps}")))
    }
}

/// One draw from the centred Laplace distribution with scale `b > 0`.
pub fn sample_laplace(rng: &mut RngStream, b: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::invalid(format!("Laplace scale must be positive and finite, got {b}")));
    }
    Ok(laplace(rng, b))
}

/// Laplace noise allowing `scale == 0`, which is the limit of an infinite budget.
pub(crate) fn laplace_noise(rng: &mut RngStream, scale: f64) -> f64 {
    if scale == 0.0 {
        0.0
    } else {
        laplace(rng, scale)
    }
}

fn laplace(rng: &mut RngStream, b: f64) -> f64 {
    // inverse CDF on v in (-1/2, 1/2)
    let v = rng.open01() - 0.5;
    -b * v.signum() * (1.0 - 2.0 * v.abs()).ln()
}

/// Exponential draw with the given rate; zero for an infinite rate.
pub(crate) fn exponential(rng: &mut RngStream, rate: f64) -> f64 {
    if rate.is_infinite() {
        0.0
    } else {
        -rng.open01().ln() / rate
    }
}

/// Planar Laplace: `center` displaced in a uniform direction by a radius with
/// density proportional to `r exp(-eps r)`.
pub fn sample_planar_laplace(rng: &mut RngStream, center: Point, eps: f64) -> Result<Point> {
    check_eps(eps)?;
    let theta = 2.0 * PI * rng.random::<f64>();
    // Gamma(2, eps) as the sum of two Exponential(eps) draws.
    let r = exponential(rng, eps) + exponential(rng, eps);
    Ok(Point::new(center.x + r * theta.cos(), center.y + r * theta.sin()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma};

    const DRAWS: usize = 1_000_000;

    #[test]
    fn streams_are_reproducible() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut c = RngStream::new(7, 4);
        assert_ne!(xs[0], c.next_u64());
        let s1 = a.substream(&[1, 2]).next_u64();
        assert_eq!(s1, b.substream(&[1, 2]).next_u64());
        assert_ne!(s1, a.substream(&[2, 1]).next_u64());
    }

    #[test]
    fn laplace_rejects_bad_scale() {
        let mut rng = RngStream::new(1, 0);
        assert!(sample_laplace(&mut rng, 0.0).is_err());
        assert!(sample_laplace(&mut rng, -1.0).is_err());
        assert!(sample_planar_laplace(&mut rng, Point::new(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn laplace_moments_and_tail() {
        let mut rng = RngStream::new(11, 0);
        let b = 1.0;
        let xs: Vec<f64> = (0..DRAWS).map(|_| sample_laplace(&mut rng, b).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / DRAWS as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / DRAWS as f64;
        let tail = xs.iter().filter(|x| x.abs() > b * 2f64.ln()).count() as f64 / DRAWS as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 2.0).abs() < 0.05, "var {var}");
        assert!((tail - 0.5).abs() < 0.01, "tail {tail}");
    }

    #[test]
    fn planar_radius_mean_and_isotropy() {
        let mut rng = RngStream::new(12, 0);
        let c = Point::new(0.0, 0.0);
        let mut radius_sum = 0.0;
        let mut sectors = [0usize; 8];
        for _ in 0..DRAWS {
            let p = sample_planar_laplace(&mut rng, c, 1.0).unwrap();
            radius_sum += p.distance(&c);
            let angle = p.y.atan2(p.x).rem_euclid(2.0 * PI);
            sectors[((angle / (2.0 * PI) * 8.0) as usize).min(7)] += 1;
        }
        let mean_r = radius_sum / DRAWS as f64;
        assert!((mean_r - 2.0).abs() < 0.02, "mean radius {mean_r}");
        let expected = DRAWS as f64 / 8.0;
        let chi2: f64 = sectors.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        let critical = ChiSquared::new(7.0).unwrap().inverse_cdf(0.99);
        assert!(chi2 < critical, "chi2 {chi2} >= {critical}");
    }

    #[test]
    fn planar_radius_ks_against_gamma() {
        let eps = 2.5;
        let n = 100_000;
        let mut rng = RngStream::new(13, 0);
        let mut radii: Vec<f64> = (0..n)
            .map(|_| sample_planar_laplace(&mut rng, Point::new(0.3, 0.3), eps).unwrap().distance(&Point::new(0.3, 0.3)))
            .collect();
        radii.sort_by(f64::total_cmp);
        let gamma = Gamma::new(2.0, eps).unwrap();
        let d = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let f = gamma.cdf(r);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn infinite_budget_is_noiseless() {
        let mut rng = RngStream::new(14, 0);
        let c = Point::new(0.5, 0.5);
        assert_eq!(sample_planar_laplace(&mut rng, c, f64::INFINITY).unwrap(), c);
        assert_eq!(laplace_noise(&mut rng, 0.0), 0.0);
    }

    #[test]
    fn indicator_reporter_density_ratio() {
        // Reports 0 + Lap(1/eps) and 1 + Lap(1/eps); the histogram density
        // ratio on [-3, 4] stays within e^eps up to sampling slack.
        let eps = 1.0;
        let bins = 7;
        let (lo, hi) = (-3.0, 4.0);
        let width = (hi - lo) / bins as f64;
        let mut rng = RngStream::new(15, 0);
        let mut h = [vec![0usize; bins], vec![0usize; bins]];
        for (bit, hist) in h.iter_mut().enumerate() {
            for _ in 0..DRAWS {
                let y = bit as f64 + sample_laplace(&mut rng, 1.0 / eps).unwrap();
                if (lo..hi).contains(&y) {
                    hist[((y - lo) / width) as usize] += 1;
                }
            }
        }
        let bound = eps.exp() * 1.05;
        for (i, (&a, &b)) in h[0].iter().zip(&h[1]).enumerate() {
            let (a, b) = (a as f64, b as f64);
            assert!(a / b <= bound && b / a <= bound, "bin {i}: {a} vs {b}");
        }
    }
}
