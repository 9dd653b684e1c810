use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, Side};
use crate::maps::{eval_slice, ScalarMap};
use crate::numerics::richardson;

const PICARD_PROBE: usize = 2000;
pub const N_ITER: usize = 1_000_000;
const INTERIOR_MARGIN: f64 = 1e-6;
/// Orbit counts as escaping once this close to the circle.
const ESCAPE: f64 = 1e-4;
const RESIDUAL_TOL: f64 = 1e-10;
const SLOW_RATIO: f64 = 0.999;
pub const K_RAD: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SliceDW {
    InteriorFixed { p: Complex64, multiplier: Complex64 },
    BoundaryDW { tau: Complex64, alpha: f64 },
}

struct Slice<'a> {
    m: &'a ScalarMap,
    side: Side,
    fixed: Complex64,
}

impl Slice<'_> {
    fn at(&self, z: Complex64) -> Result<Complex64> {
        eval_slice(self.m, self.side, self.fixed, z)
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let h = 1e-4 * (1.0 - z.norm()).clamp(1e-12, 1.0);
        Ok((self.at(z + h)? - self.at(z - h)?) / (2.0 * h))
    }

    /// Damped Newton on `s(z) - z`. Accepts only a simple root well inside
    /// the disk: near a boundary fixed point the Newton correction stays
    /// comparable to the distance from the circle.
    fn newton(&self, start: Complex64) -> Option<Complex64> {
        let mut z = start;
        for _ in 0..200 {
            let g = self.at(z).ok()? - z;
            let d = self.derivative(z).ok()? - 1.0;
            if d.norm() == 0.0 || !d.re.is_finite() {
                return None;
            }
            let step = g / d;
            let mut lam = 1.0;
            while (z - lam * step).norm() >= 1.0 && lam > 1e-12 {
                lam *= 0.5;
            }
            let next = z - lam * step;
            let moved = (next - z).norm();
            z = next;
            if moved <= 4.0 * f64::EPSILON {
                break;
            }
        }
        let g = self.at(z).ok()? - z;
        let d = self.derivative(z).ok()? - 1.0;
        let gap = 1.0 - z.norm();
        if gap > 0.0 && g.norm() <= RESIDUAL_TOL && (g / d).norm() <= 1e-3 * gap {
            Some(z)
        } else {
            None
        }
    }
}

fn check_fixed(fixed: Complex64) -> Result<()> {
    if !(fixed.norm() < 1.0) {
        return Err(Error::InvalidArgument(format!("slice parameter |{fixed}| must be < 1")));
    }
    Ok(())
}

/// Denjoy-Wolff point of the one-variable slice through `fixed`.
pub fn slice_denjoy_wolff(m: &ScalarMap, side: Side, fixed: Complex64) -> Result<SliceDW> {
    check_fixed(fixed)?;
    let s = Slice { m, side, fixed };
    let zero = Complex64::new(0.0, 0.0);
    let probe = Complex64::new(0.3, 0.0);
    if s.at(zero)?.norm() <= 1e-14 && (s.at(probe)? - probe).norm() <= 1e-14 {
        return Err(Error::IdentitySlice);
    }
    let interior = |p: Complex64| -> Result<SliceDW> { Ok(SliceDW::InteriorFixed { p, multiplier: s.derivative(p)? }) };

    let mut z = zero;
    for _ in 0..PICARD_PROBE {
        let next = s.at(z)?;
        let moved = (next - z).norm();
        z = next;
        if moved <= 1e-14 && z.norm() <= 1.0 - INTERIOR_MARGIN {
            let p = s.newton(z).unwrap_or(z);
            return interior(p);
        }
    }
    for start in [z, zero] {
        if let Some(p) = s.newton(start) {
            if p.norm() <= 1.0 - INTERIOR_MARGIN {
                return interior(p);
            }
        }
    }

    // keep iterating until the orbit hugs the circle
    let mut n = PICARD_PROBE;
    let mut half_dir = z / z.norm();
    let mut checkpoint = 2 * n;
    while 1.0 - z.norm() > ESCAPE {
        if n >= N_ITER {
            return Err(Error::Undecided(format!("|orbit| = {} after {n} steps", z.norm())));
        }
        z = s.at(z)?;
        n += 1;
        if n == checkpoint {
            half_dir = z / z.norm();
            checkpoint *= 2;
        }
    }
    let tau = z / z.norm();
    let dir_err = (tau - half_dir).norm();

    // stop the radial probe well before the angular uncertainty matters
    let mut levels = 0;
    while levels < 24 && 0.5f64.powi(3 + levels as i32) >= (100.0 * dir_err).max(1e-9) {
        levels += 1;
    }
    let lim = richardson(levels.max(2), |k| {
        let h = 0.5f64.powi(3 + k as i32);
        Ok(Complex64::new((1.0 - s.at(tau * (1.0 - h))?.norm()) / h, 0.0))
    })?;
    let alpha = lim.value.re;
    if !(alpha > 0.0) || alpha > 1.0 + 1e-6 {
        return Err(Error::Undecided(format!("angular derivative {alpha} at {tau} is out of range")));
    }
    Ok(SliceDW::BoundaryDW { tau, alpha: alpha.min(1.0) })
}

/// Interior fixed point of the slice through `fixed`, i.e. `ξ(fixed)` on the
/// left or `η(fixed)` on the right.
pub fn slice_fixed_point(m: &ScalarMap, side: Side, fixed: Complex64) -> Result<Complex64> {
    slice_fixed_point_from(m, side, fixed, Complex64::new(0.0, 0.0))
}

/// [`slice_fixed_point`] with a warm start.
pub fn slice_fixed_point_from(m: &ScalarMap, side: Side, fixed: Complex64, start: Complex64) -> Result<Complex64> {
    check_fixed(fixed)?;
    let s = Slice { m, side, fixed };
    let escaped = || Error::NoInteriorFixedPoint(format!("slice through {fixed} has no attracting interior point"));
    let mut z = start;
    let mut prev_step = f64::INFINITY;
    for _ in 0..10_000 {
        let next = s.at(z)?;
        let step = (next - z).norm();
        z = next;
        if step <= 4.0 * f64::EPSILON || step / prev_step > SLOW_RATIO || !(z.norm() < 1.0) {
            break;
        }
        prev_step = step;
    }
    if !(z.norm() < 1.0) {
        return Err(escaped());
    }
    // polish (and rescue slow Picard runs)
    s.newton(z).ok_or_else(escaped)
}

/// Type II constant from the radial behaviour of the fixed-point map:
/// `A = 1 / lim (1 - |ξ(μ)|) / (1 - |μ|)` as `μ -> τ²` radially.
pub fn a_from_xi(m: &ScalarMap, tau: &BoundaryPoint, side: Side) -> Result<f64> {
    let (m, tau) = match side {
        Side::Left => (m.clone(), *tau),
        Side::Right => (m.swap_args(), tau.swap()),
    };
    if !tau.is_corner() {
        return Err(Error::InvalidArgument(format!("{tau} is not on the torus")));
    }
    let mut warm = Complex64::new(0.0, 0.0);
    let lim = richardson(K_RAD - 2, |k| {
        let h = 0.5f64.powi(3 + k as i32);
        let mu = tau.t2 * (1.0 - h);
        let xi = slice_fixed_point_from(&m, Side::Left, mu, warm)?;
        warm = xi;
        Ok(Complex64::new((1.0 - xi.norm()) / h, 0.0))
    })?;
    let q = lim.value.re;
    if !(lim.error <= 1e-5 * q.abs().max(1.0)) || !(q > 0.0) {
        return Err(Error::NoLimit(lim.error));
    }
    Ok(1.0 / q)
}
