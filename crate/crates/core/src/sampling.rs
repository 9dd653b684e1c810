//! Deterministic low-discrepancy samples of the bidisk.
//!
//! A 4-dimensional additive recurrence (R-sequence) with a seeded
//! Cranley-Patterson rotation; coordinates (0,1) feed the first disk and
//! (2,3) the second, each through the area-preserving polar map.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::error::Result;
use crate::geometry::BidiskPoint;

pub const DEFAULT_SEED: u64 = 0xD2;

/// Samples never get closer to the circle than this.
pub const RADIUS_CAP: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone)]
pub struct BidiskSampler {
    alpha: [f64; 4],
    shift: [f64; 4],
}

impl BidiskSampler {
    pub fn new(seed: u64) -> Self {
        // unique positive root of x^5 = x + 1
        let mut g = 1.2f64;
        for _ in 0..50 {
            g -= (g.powi(5) - g - 1.0) / (5.0 * g.powi(4) - 1.0);
        }
        let mut alpha = [0.0; 4];
        for (i, a) in alpha.iter_mut().enumerate() {
            *a = g.powi(-(i as i32 + 1)).fract();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        BidiskSampler { alpha, shift }
    }

    /// The `i`-th point of the sequence in the unit hypercube.
    pub fn unit(&self, i: usize) -> [f64; 4] {
        let n = (i + 1) as f64;
        std::array::from_fn(|k| (self.shift[k] + n * self.alpha[k]).fract())
    }

    pub fn point(&self, i: usize) -> BidiskPoint {
        let u = self.unit(i);
        BidiskPoint::unchecked(polar(u[0], u[1]), polar(u[2], u[3]))
    }
}

fn polar(u: f64, v: f64) -> Complex64 {
    Complex64::from_polar(u.sqrt().min(RADIUS_CAP), TAU * v)
}

/// Maximum of `f` over `0..n`, evaluated in parallel. Ties go to the
/// lowest index so the result does not depend on scheduling.
pub fn par_argmax<F>(n: usize, f: F) -> Result<(f64, usize)>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let best = (0..n)
        .into_par_iter()
        .map(|i| f(i).map(|v| (v, i)))
        .try_reduce(|| (f64::NEG_INFINITY, usize::MAX), |a, b| Ok(if better(b, a) { b } else { a }))?;
    Ok(best)
}

fn better(a: (f64, usize), b: (f64, usize)) -> bool {
    // NaN counts as the worst possible value so it is never hidden
    match (a.0.is_nan(), b.0.is_nan()) {
        (true, false) => true,
        (false, true) => false,
        _ => a.0 > b.0 || (a.0 == b.0 && a.1 < b.1),
    }
}
