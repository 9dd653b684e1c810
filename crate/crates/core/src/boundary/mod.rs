//! Boundary behaviour of scalar maps: Carathéodory quotients, the K-curve
//! `M -> K_τ(M)` along `δ_M = (τ¹, τ²M)`, Denjoy-Wolff classification and
//! slice analysis.

mod classify;
mod slice;

pub use classify::{
    classify_dw, classify_dw_detailed, find_constant_a, Classification, DWClass, Diagnostics, ETA, GRID_MAX, GRID_MIN,
    GRID_N,
};
pub use slice::{a_from_xi, slice_denjoy_wolff, slice_fixed_point, slice_fixed_point_from, SliceDW};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::BoundaryPoint;
use crate::maps::ScalarMap;
use crate::numerics::{log_grid, richardson};

pub const T0: f64 = 1e-2;
pub const K_STEPS: usize = 18;
/// Smallest displacement used by any difference quotient.
pub const T_FLOOR: f64 = 1e-8;
pub const FIXED_TOL: f64 = 1e-6;
pub const LIMIT_TOL: f64 = 1e-5;
pub const IMAG_TOL: f64 = 1e-6;
pub const MONOTONE_SLACK: f64 = 1e-7;

fn require_corner(tau: &BoundaryPoint) -> Result<()> {
    if !tau.is_corner() {
        return Err(Error::InvalidArgument(format!("{tau} is not on the torus")));
    }
    Ok(())
}

fn num_levels(t0: f64, scale: f64) -> usize {
    let mut n = 0;
    while n <= K_STEPS && t0 * scale * 0.5f64.powi(n as i32) >= T_FLOOR {
        n += 1;
    }
    n.max(2)
}

/// `(1 - |m(τ - tδ_M)|) / (1 - ‖τ - tδ_M‖)`.
pub fn radial_quotient(m: &ScalarMap, tau: &BoundaryPoint, big_m: f64, t: f64) -> Result<f64> {
    require_corner(tau)?;
    if !(big_m > 0.0) || !(t > 0.0) || t * big_m.max(1.0) >= 1.0 {
        return Err(Error::InvalidArgument(format!("need t·max(1,M) < 1 (t={t}, M={big_m})")));
    }
    let v = m.eval(tau.t1 * (1.0 - t), tau.t2 * (1.0 - t * big_m))?;
    Ok((1.0 - v.norm()) / (t * big_m.min(1.0)))
}

/// Radial limit of `m` at `tau` and whether it equals `τ¹`.
pub fn boundary_value(m: &ScalarMap, tau: &BoundaryPoint) -> Result<(Complex64, bool)> {
    let point = |t: f64| match (tau.on_circle1, tau.on_circle2) {
        (true, true) => (tau.t1 * (1.0 - t), tau.t2 * (1.0 - t)),
        (true, false) => (tau.t1 * (1.0 - t), tau.t2),
        _ => (tau.t1, tau.t2 * (1.0 - t)),
    };
    let lim = richardson(num_levels(T0, 1.0), |k| {
        let (a, b) = point(T0 * 0.5f64.powi(k as i32));
        m.eval(a, b)
    })?;
    if !(lim.error <= LIMIT_TOL) {
        return Err(Error::NoLimit(lim.error));
    }
    Ok((lim.value, (lim.value - tau.t1).norm() <= FIXED_TOL))
}

/// One point of the K-curve with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSample {
    pub m: f64,
    pub k: f64,
    pub imag_residual: f64,
    pub error_estimate: f64,
}

/// `D_{-δ_M} m(τ) / (-m(τ))` without the realness check.
pub fn k_sample(m: &ScalarMap, tau: &BoundaryPoint, big_m: f64) -> Result<KSample> {
    require_corner(tau)?;
    if !(big_m > 0.0) || !big_m.is_finite() {
        return Err(Error::InvalidArgument(format!("M={big_m} must be positive")));
    }
    let (value, fixed) = boundary_value(m, tau)?;
    let anchor = if fixed { tau.t1 } else { value };
    let scale = big_m.max(1.0);
    let h0 = T0 / scale;
    let lim = richardson(num_levels(h0, scale), |k| {
        let t = h0 * 0.5f64.powi(k as i32);
        let v = m.eval(tau.t1 * (1.0 - t), tau.t2 * (1.0 - t * big_m))?;
        Ok((v - anchor) / t)
    })?;
    if !(lim.error <= LIMIT_TOL * lim.value.norm().max(1.0)) {
        return Err(Error::NoLimit(lim.error));
    }
    let q = lim.value / (-anchor);
    Ok(KSample { m: big_m, k: q.re, imag_residual: q.im, error_estimate: lim.error / anchor.norm() })
}

/// `K_τ(M)`.
pub fn k_value(m: &ScalarMap, tau: &BoundaryPoint, big_m: f64) -> Result<f64> {
    let s = k_sample(m, tau, big_m)?;
    if s.imag_residual.abs() > IMAG_TOL {
        return Err(Error::NonRealDerivative(s.imag_residual));
    }
    Ok(s.k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KCurve {
    pub tau: BoundaryPoint,
    pub m_grid: Vec<f64>,
    pub k_values: Vec<f64>,
    pub imag_residuals: Vec<f64>,
    pub error_estimates: Vec<f64>,
    /// Non-decreasing within [`MONOTONE_SLACK`].
    pub monotone: bool,
    /// Every imaginary residual within [`IMAG_TOL`].
    pub valid: bool,
}

impl KCurve {
    pub fn k_min(&self) -> f64 {
        self.k_values[0]
    }

    pub fn k_max(&self) -> f64 {
        *self.k_values.last().expect("curves have at least two points")
    }

    /// Grid interval `[M_i, M_j]` with `K_i` below 1 and `K_j` above it, each
    /// by more than its own error estimate.
    pub fn bracket_one(&self) -> Option<(f64, f64)> {
        let clear = |i: usize| self.error_estimates[i].max(f64::EPSILON);
        let hi = (0..self.k_values.len()).find(|&i| self.k_values[i] - 1.0 > clear(i))?;
        let lo = (0..hi).rev().find(|&i| 1.0 - self.k_values[i] > clear(i))?;
        Some((self.m_grid[lo], self.m_grid[hi]))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("M,K,imag_residual,error_estimate\n");
        for i in 0..self.m_grid.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                crate::fmt_f64(self.m_grid[i]),
                crate::fmt_f64(self.k_values[i]),
                crate::fmt_f64(self.imag_residuals[i]),
                crate::fmt_f64(self.error_estimates[i]),
            ));
        }
        out
    }
}

/// K at `n` log-spaced values of M in `[m_min, m_max]`.
pub fn k_curve(m: &ScalarMap, tau: &BoundaryPoint, m_min: f64, m_max: f64, n: usize) -> Result<KCurve> {
    if !(m_min > 0.0 && m_min < m_max && m_max.is_finite()) || n < 2 {
        return Err(Error::InvalidArgument(format!("bad grid [{m_min}, {m_max}] x {n}")));
    }
    require_corner(tau)?;
    let grid = log_grid(m_min, m_max, n);
    let samples: Vec<KSample> = grid.par_iter().map(|&big_m| k_sample(m, tau, big_m)).collect::<Result<_>>()?;
    let k_values: Vec<f64> = samples.iter().map(|s| s.k).collect();
    let imag_residuals: Vec<f64> = samples.iter().map(|s| s.imag_residual).collect();
    let monotone = k_values.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK);
    let valid = imag_residuals.iter().all(|r| r.abs() <= IMAG_TOL);
    Ok(KCurve {
        tau: *tau,
        m_grid: grid,
        k_values,
        imag_residuals,
        error_estimates: samples.iter().map(|s| s.error_estimate).collect(),
        monotone,
        valid,
    })
}
