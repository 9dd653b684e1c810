use num_complex::Complex64;

use super::{boundary_value, k_curve, k_value, slice_denjoy_wolff, KCurve, SliceDW, FIXED_TOL};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, Side};
use crate::maps::ScalarMap;
use crate::numerics::linear_fit;

pub const GRID_MIN: f64 = 1.0 / 4096.0;
pub const GRID_MAX: f64 = 4096.0;
pub const GRID_N: usize = 49;
pub const ETA: f64 = 1e-4;
pub const ALPHA_SLACK: f64 = 1e-4;
const WIDEN: f64 = 4.0;
const BISECT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DWClass {
    NotFixed,
    NotBPoint,
    TypeICPoint {
        alpha: f64,
    },
    TypeINonC {
        k_limit: f64,
    },
    TypeII {
        a: f64,
    },
    /// `k_min` is the smallest K seen on the grid; `None` for facial points.
    Neither {
        k_min: Option<f64>,
    },
}

impl DWClass {
    pub fn kind(&self) -> &'static str {
        match self {
            DWClass::NotFixed => "NotFixed",
            DWClass::NotBPoint => "NotBPoint",
            DWClass::TypeICPoint { .. } => "TypeI_CPoint",
            DWClass::TypeINonC { .. } => "TypeI_NonC",
            DWClass::TypeII { .. } => "TypeII",
            DWClass::Neither { .. } => "Neither",
        }
    }

    pub fn is_type_one(&self) -> bool {
        matches!(self, DWClass::TypeICPoint { .. } | DWClass::TypeINonC { .. })
    }

    pub fn is_type_two(&self) -> bool {
        matches!(self, DWClass::TypeII { .. })
    }

    /// Short text such as `TypeII(A=2)`.
    pub fn summary(&self) -> String {
        match self {
            DWClass::TypeICPoint { alpha } => format!("TypeI_CPoint(alpha={alpha})"),
            DWClass::TypeINonC { k_limit } => format!("TypeI_NonC(k_limit={k_limit})"),
            DWClass::TypeII { a } => format!("TypeII(A={a})"),
            DWClass::Neither { k_min: Some(k) } => format!("Neither(k_min={k})"),
            other => other.kind().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub side: Side,
    pub boundary_value: Option<Complex64>,
    pub curve: Option<KCurve>,
    pub widened: bool,
    pub slice: Option<SliceDW>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: DWClass,
    pub diagnostics: Diagnostics,
}

pub fn classify_dw(m: &ScalarMap, tau: &BoundaryPoint, side: Side) -> Result<DWClass> {
    classify_dw_detailed(m, tau, side).map(|c| c.class)
}

/// Classifies `tau` as a left (or right) Denjoy-Wolff candidate of `m`.
pub fn classify_dw_detailed(m: &ScalarMap, tau: &BoundaryPoint, side: Side) -> Result<Classification> {
    let mut diag = Diagnostics { side, boundary_value: None, curve: None, widened: false, slice: None };
    let (m, tau) = match side {
        Side::Left => (m.clone(), *tau),
        Side::Right => (m.swap_args(), tau.swap()),
    };
    if !tau.on_circle1 {
        return Err(Error::InvalidArgument(format!(
            "{side} classification needs a unimodular {} coordinate",
            if side == Side::Left { "first" } else { "second" }
        )));
    }
    let done = |class, diag| Ok(Classification { class, diagnostics: diag });

    let (value, fixed) = match boundary_value(&m, &tau) {
        Ok(v) => v,
        Err(Error::NoLimit(_)) => return done(DWClass::NotBPoint, diag),
        Err(e) => return Err(e),
    };
    diag.boundary_value = Some(value);
    if !fixed {
        return done(DWClass::NotFixed, diag);
    }

    if !tau.on_circle2 {
        let s = slice_denjoy_wolff(&m, Side::Left, tau.t2)?;
        diag.slice = Some(s);
        let class = match s {
            SliceDW::BoundaryDW { tau: t, alpha } if (t - tau.t1).norm() <= FIXED_TOL && alpha <= 1.0 + 1e-6 => {
                DWClass::TypeICPoint { alpha }
            }
            _ => DWClass::Neither { k_min: None },
        };
        return done(class, diag);
    }

    let (mut lo, mut hi, mut n) = (GRID_MIN, GRID_MAX, GRID_N);
    loop {
        let curve = match k_curve(&m, &tau, lo, hi, n) {
            Ok(c) => c,
            Err(Error::NoLimit(_)) => return done(DWClass::NotBPoint, diag),
            Err(e) => return Err(e),
        };
        if !curve.valid {
            let worst = curve.imag_residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
            return Err(Error::NonRealDerivative(worst));
        }
        let decided = decide(&m, &tau, &curve)?;
        diag.curve = Some(curve.clone());
        match decided {
            Some(class) => return done(class, diag),
            None if !diag.widened => {
                let step = (hi / lo).ln() / (n - 1) as f64;
                let extra = (WIDEN.ln() / step).ceil() as usize;
                lo /= WIDEN;
                hi *= WIDEN;
                n += 2 * extra;
                diag.widened = true;
            }
            None => {
                return Err(Error::Ambiguous(format!(
                    "K stays within {ETA} of 1 without crossing on [{lo:e}, {hi:e}]: K(M_min)={}, K(M_max)={}",
                    curve.k_min(),
                    curve.k_max()
                )))
            }
        }
    }
}

fn decide(m: &ScalarMap, tau: &BoundaryPoint, curve: &KCurve) -> Result<Option<DWClass>> {
    let ks = &curve.k_values;
    let mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let (kmin, kmax) = ks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &k| (a.min(k), b.max(k)));
    if kmax - kmin < 1e-6 * (1.0 + mean) {
        return Ok(Some(if mean <= 1.0 + ALPHA_SLACK {
            DWClass::TypeICPoint { alpha: mean }
        } else {
            DWClass::Neither { k_min: Some(kmin) }
        }));
    }
    if curve.k_max() < 1.0 - ETA {
        return Ok(Some(DWClass::TypeINonC { k_limit: k_limit(curve) }));
    }
    if curve.bracket_one().is_some() {
        return Ok(Some(DWClass::TypeII { a: find_constant_a(m, tau, curve)? }));
    }
    if curve.k_min() > 1.0 + ETA {
        return Ok(Some(DWClass::Neither { k_min: Some(curve.k_min()) }));
    }
    Ok(None)
}

/// Intercept of the least-squares line through `(1/M, K)` over the top decade
/// of the grid.
fn k_limit(curve: &KCurve) -> f64 {
    let top = curve.m_grid.last().copied().unwrap_or(1.0) / 10.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = curve
        .m_grid
        .iter()
        .zip(&curve.k_values)
        .filter(|(big_m, _)| **big_m >= top)
        .map(|(big_m, k)| (1.0 / big_m, *k))
        .unzip();
    if xs.len() < 2 {
        return curve.k_max();
    }
    linear_fit(&xs, &ys).0
}

/// Bisection for the unique `A` with `K(A) = 1`, refreshing `K` at each
/// midpoint.
pub fn find_constant_a(m: &ScalarMap, tau: &BoundaryPoint, curve: &KCurve) -> Result<f64> {
    let (mut lo, mut hi) = curve.bracket_one().ok_or(Error::NoRoot)?;
    let mut best = (f64::INFINITY, 0.5 * (lo + hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let k = k_value(m, tau, mid)?;
        if (k - 1.0).abs() < best.0 {
            best = ((k - 1.0).abs(), mid);
        }
        if k < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi && best.0 <= BISECT_TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
