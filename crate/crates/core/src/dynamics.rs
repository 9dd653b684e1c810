//! Iteration of `F = (φ, ψ)`: orbits with horosphere telemetry, fixed points
//! of `rF`, continuation `r -> 1`, and Hervé's case split.

use num_complex::Complex64;

use crate::boundary::{classify_dw, DWClass};
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::geometry::{fmt_point, horocyclic_level, BidiskPoint, BoundaryPoint, Side};
use crate::maps::SelfMap2;
use crate::numerics::linear_fit;

/// Orbits stop once a coordinate gets this close to the circle.
pub const HALT_MODULUS: f64 = 1.0 - 1e-14;
pub const STEP_TOL: f64 = 1e-13;
pub const RESIDUAL_TOL: f64 = 1e-12;
const MAX_PICARD: usize = 100_000;
const SLOW_RATIO: f64 = 0.99;
const MONOTONE_SLACK: f64 = 1e-12;
const FIT_STAGES: usize = 5;
const DEGENERATE_SLOPE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub points: Vec<BidiskPoint>,
    pub a_seq: Vec<f64>,
    pub b_seq: Vec<f64>,
    pub r_seq: Vec<f64>,
    pub tau: BoundaryPoint,
    pub k: f64,
    /// Step at which iteration stopped near the boundary, if it did.
    pub halted_at: Option<usize>,
}

impl Orbit {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re1,im1,re2,im2,A,B,R\n");
        for (i, p) in self.points.iter().enumerate() {
            let row = [p.z1.re, p.z1.im, p.z2.re, p.z2.im, self.a_seq[i], self.b_seq[i], self.r_seq[i]];
            out.push_str(&i.to_string());
            for v in row {
                out.push(',');
                out.push_str(&fmt_f64(v));
            }
            out.push('\n');
        }
        out
    }
}

fn require_corner(tau: &BoundaryPoint) -> Result<()> {
    if !tau.is_corner() {
        return Err(Error::InvalidArgument(format!("{tau} is not on the torus")));
    }
    Ok(())
}

pub fn horosphere_radii(tau: &BoundaryPoint, z: &BidiskPoint) -> (f64, f64) {
    (horocyclic_level(tau.t1, z.z1), horocyclic_level(tau.t2, z.z2))
}

/// `z0, F(z0), ..., F^n(z0)` with `A_n`, `B_n` and `R_n = max{A_n, B_n/K}`.
pub fn iterate_orbit(f: &SelfMap2, z0: &BidiskPoint, n: usize, tau: &BoundaryPoint, k: f64) -> Result<Orbit> {
    require_corner(tau)?;
    if n == 0 || !(k > 0.0) {
        return Err(Error::InvalidArgument("need n >= 1 and K > 0".into()));
    }
    let mut orbit = Orbit {
        points: Vec::with_capacity(n + 1),
        a_seq: Vec::with_capacity(n + 1),
        b_seq: Vec::with_capacity(n + 1),
        r_seq: Vec::with_capacity(n + 1),
        tau: *tau,
        k,
        halted_at: None,
    };
    let push = |o: &mut Orbit, p: BidiskPoint| {
        let (a, b) = horosphere_radii(tau, &p);
        o.points.push(p);
        o.a_seq.push(a);
        o.b_seq.push(b);
        o.r_seq.push(a.max(b / k));
    };
    push(&mut orbit, *z0);
    let mut z = *z0;
    for step in 1..=n {
        z = f.apply(&z)?;
        if z.max_modulus() > HALT_MODULUS {
            orbit.halted_at = Some(step);
            break;
        }
        push(&mut orbit, z);
    }
    Ok(orbit)
}

fn sup_dist(a: &BidiskPoint, b: &BidiskPoint) -> f64 {
    (a.z1 - b.z1).norm().max((a.z2 - b.z2).norm())
}

fn scaled(f: &SelfMap2, r: f64, z: &BidiskPoint) -> Result<BidiskPoint> {
    let w = f.apply(z)?;
    Ok(BidiskPoint::unchecked(r * w.z1, r * w.z2))
}

/// Damped Newton step for `rF(z) - z` with a central-difference Jacobian.
fn newton_step(f: &SelfMap2, r: f64, z: &BidiskPoint) -> Result<BidiskPoint> {
    let w = scaled(f, r, z)?;
    let g = [w.z1 - z.z1, w.z2 - z.z2];
    let gap = 1.0 - z.max_modulus();
    let h = 1e-4 * gap.clamp(1e-12, 1.0);
    let d1 = {
        let p = scaled(f, r, &BidiskPoint::unchecked(z.z1 + h, z.z2))?;
        let m = scaled(f, r, &BidiskPoint::unchecked(z.z1 - h, z.z2))?;
        [(p.z1 - m.z1) / (2.0 * h), (p.z2 - m.z2) / (2.0 * h)]
    };
    let d2 = {
        let p = scaled(f, r, &BidiskPoint::unchecked(z.z1, z.z2 + h))?;
        let m = scaled(f, r, &BidiskPoint::unchecked(z.z1, z.z2 - h))?;
        [(p.z1 - m.z1) / (2.0 * h), (p.z2 - m.z2) / (2.0 * h)]
    };
    // J = r·DF - I
    let (a, b, c, d) = (d1[0] - 1.0, d2[0], d1[1], d2[1] - 1.0);
    let det = a * d - b * c;
    if det.norm() == 0.0 || !det.re.is_finite() {
        return Ok(*z);
    }
    let dx = (d * g[0] - b * g[1]) / det;
    let dy = (a * g[1] - c * g[0]) / det;
    let mut lam = 1.0;
    loop {
        let next = BidiskPoint::unchecked(z.z1 - lam * dx, z.z2 - lam * dy);
        if next.max_modulus() < 1.0 || lam < 1e-12 {
            return Ok(next);
        }
        lam *= 0.5;
    }
}

/// Fixed point of `rF` and its residual `‖rF(p) - p‖∞`.
pub fn scaled_fixed_point(f: &SelfMap2, r: f64, start: &BidiskPoint) -> Result<(BidiskPoint, f64)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("r={r} must lie in (0,1)")));
    }
    let mut z = *start;
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for it in 0..MAX_PICARD {
        let w = scaled(f, r, &z)?;
        let step = sup_dist(&w, &z);
        z = w;
        if step <= STEP_TOL {
            converged = true;
            break;
        }
        // slow contraction: switch to Newton
        if it > 10 && step / prev > SLOW_RATIO {
            break;
        }
        prev = step;
    }
    if !converged {
        for _ in 0..100 {
            let next = newton_step(f, r, &z)?;
            let moved = sup_dist(&next, &z);
            z = next;
            if moved <= STEP_TOL {
                break;
            }
        }
        // a couple of Picard sweeps to settle rounding
        for _ in 0..3 {
            z = scaled(f, r, &z)?;
        }
    }
    let residual = sup_dist(&scaled(f, r, &z)?, &z);
    if !(residual <= RESIDUAL_TOL) || !(z.max_modulus() < 1.0) {
        return Err(Error::MaxIterations(MAX_PICARD));
    }
    Ok((z, residual))
}

/// Fixed point of `rF` reached from the origin.
pub fn picard_fixed_point(f: &SelfMap2, r: f64) -> Result<BidiskPoint> {
    scaled_fixed_point(f, r, &BidiskPoint::origin()).map(|(p, _)| p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub k: usize,
    pub r: f64,
    pub point: BidiskPoint,
    pub residual: f64,
    /// `(1 - |λ|²) / (1 - |μ|²)` at the fixed point `(λ, μ)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContinuationStatus {
    Converged,
    /// The ratio trends to 0 or infinity.
    Degenerate,
    InteriorFixedPoint,
    /// A stage failed; earlier stages are kept.
    Truncated {
        stage: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationResult {
    pub stages: Vec<Stage>,
    pub status: ContinuationStatus,
    pub tau_estimate: Option<BoundaryPoint>,
    pub k_estimate: Option<f64>,
    /// Fitted slope of `ln ratio` per stage.
    pub slope: Option<f64>,
    pub interior_point: Option<BidiskPoint>,
}

impl ContinuationResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,r,re1,im1,re2,im2,residual,ratio\n");
        for s in &self.stages {
            let row = [s.r, s.point.z1.re, s.point.z1.im, s.point.z2.re, s.point.z2.im, s.residual, s.ratio];
            out.push_str(&s.k.to_string());
            for v in row {
                out.push(',');
                out.push_str(&fmt_f64(v));
            }
            out.push('\n');
        }
        out
    }
}

/// Locates a Denjoy-Wolff point as the limit of fixed points of `rF`,
/// `r = 1 - 2^-k`, warm-starting each stage from the previous one.
pub fn continuation_dw(f: &SelfMap2, k_max: usize) -> Result<ContinuationResult> {
    if f.phi.coordinate_projection() == Some(1) || f.psi.coordinate_projection() == Some(2) {
        return Err(Error::InvalidArgument("a component is a coordinate projection".into()));
    }
    if k_max < 2 {
        return Err(Error::InvalidArgument("need at least two stages".into()));
    }
    let mut stages: Vec<Stage> = Vec::with_capacity(k_max);
    let mut z = BidiskPoint::origin();
    let mut status = None;
    for k in 1..=k_max {
        let r = 1.0 - 0.5f64.powi(k as i32);
        match scaled_fixed_point(f, r, &z) {
            Ok((p, residual)) => {
                let ratio = (1.0 - p.z1.norm_sqr()) / (1.0 - p.z2.norm_sqr());
                stages.push(Stage { k, r, point: p, residual, ratio });
                z = p;
            }
            Err(e) => {
                status = Some(ContinuationStatus::Truncated { stage: k, reason: e.to_string() });
                break;
            }
        }
    }
    let mut result = ContinuationResult {
        stages,
        status: ContinuationStatus::Converged,
        tau_estimate: None,
        k_estimate: None,
        slope: None,
        interior_point: None,
    };
    let n = result.stages.len();
    if n < 2 {
        result.status = status.unwrap_or(ContinuationStatus::Degenerate);
        return Ok(result);
    }
    let last = result.stages[n - 1].point;
    let before = result.stages[n - 2].point;
    if 1.0 - last.max_modulus() > 1e-2 && sup_dist(&last, &before) <= 1e-3 {
        result.status = ContinuationStatus::InteriorFixedPoint;
        result.interior_point = Some(last);
        return Ok(result);
    }

    let snap = |w: Complex64| if 1.0 - w.norm() < 1e-3 { w / w.norm() } else { w };
    result.tau_estimate = BoundaryPoint::new(snap(last.z1), snap(last.z2)).ok();

    let tail = &result.stages[n.saturating_sub(FIT_STAGES)..];
    let xs: Vec<f64> = tail.iter().map(|s| s.k as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.ratio.ln()).collect();
    if ys.iter().all(|y| y.is_finite()) && xs.len() >= 2 {
        let (a, b) = linear_fit(&xs, &ys);
        result.slope = Some(b);
        if b.abs() > DEGENERATE_SLOPE {
            result.status = ContinuationStatus::Degenerate;
        } else {
            result.k_estimate = Some(1.0 / (a + b * xs[xs.len() - 1]).exp());
        }
    } else {
        result.status = ContinuationStatus::Degenerate;
    }
    if let Some(s) = status {
        result.status = s;
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HerveLabel {
    CoordProjection,
    II,
    III,
    IIIRight,
    IIII,
}

impl HerveLabel {
    pub fn label(self) -> &'static str {
        match self {
            HerveLabel::CoordProjection => "coord_projection",
            HerveLabel::II => "I_I",
            HerveLabel::III => "I_II",
            HerveLabel::IIIRight => "II_I",
            HerveLabel::IIII => "II_II",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HerveCase {
    pub case: HerveLabel,
    pub expected: String,
    /// The non-C-point refinement applies.
    pub refined: bool,
    pub phi_class: Option<DWClass>,
    pub psi_class: Option<DWClass>,
}

/// Hervé's case for `F` read off the component classes at `tau_hint`.
pub fn herve_case(f: &SelfMap2, tau: &BoundaryPoint) -> Result<HerveCase> {
    require_corner(tau)?;
    if f.phi.coordinate_projection() == Some(1) || f.psi.coordinate_projection() == Some(2) {
        return Ok(HerveCase {
            case: HerveLabel::CoordProjection,
            expected: "one component is a coordinate projection; F^n need not converge".into(),
            refined: false,
            phi_class: None,
            psi_class: None,
        });
    }
    let component = |side: Side| -> Result<DWClass> {
        let m = if side == Side::Left { &f.phi } else { &f.psi };
        let class = classify_dw(m, tau, side).map_err(|e| match e {
            Error::Ambiguous(msg) => Error::Unclassifiable(format!("{side}: {msg}")),
            other => other,
        })?;
        if class.is_type_one() || class.is_type_two() {
            Ok(class)
        } else {
            Err(Error::Unclassifiable(format!("{side} component is {}", class.summary())))
        }
    };
    let phi = component(Side::Left)?;
    let psi = component(Side::Right)?;
    let (t1, t2) = (fmt_point(tau.t1), fmt_point(tau.t2));
    let corner = format!("F^n → ({t1},{t2}) uniformly on compact subsets");
    let phi_nonc = matches!(phi, DWClass::TypeINonC { .. });
    let psi_nonc = matches!(psi, DWClass::TypeINonC { .. });
    let (case, refined, expected) = match (phi.is_type_two(), psi.is_type_two()) {
        (true, true) => (HerveLabel::IIII, false, corner),
        (false, true) if phi_nonc => (HerveLabel::III, true, corner),
        (false, true) => (HerveLabel::III, false, format!("every cluster point of F^n has first coordinate {t1}")),
        (true, false) if psi_nonc => (HerveLabel::IIIRight, true, corner),
        (true, false) => {
            (HerveLabel::IIIRight, false, format!("every cluster point of F^n has second coordinate {t2}"))
        }
        (false, false) => {
            let text = match (phi_nonc, psi_nonc) {
                (true, true) => corner,
                (true, false) => format!("every cluster point of F^n has first coordinate {t1}"),
                (false, true) => format!("every cluster point of F^n has second coordinate {t2}"),
                (false, false) => {
                    format!("every cluster point of F^n has first coordinate {t1} or second coordinate {t2}")
                }
            };
            (HerveLabel::II, phi_nonc || psi_nonc, text)
        }
    };
    Ok(HerveCase { case, expected, refined, phi_class: Some(phi), psi_class: Some(psi) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub limit: Option<BoundaryPoint>,
    pub n_at_tol: Option<usize>,
    pub monotone_a: bool,
    pub monotone_r: bool,
}

pub fn convergence_report(orbit: &Orbit, tol: f64) -> ConvergenceReport {
    let target = BidiskPoint::unchecked(orbit.tau.t1, orbit.tau.t2);
    let n_at_tol = orbit.points.iter().position(|p| sup_dist(p, &target) <= tol);
    let non_increasing = |xs: &[f64]| xs.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    ConvergenceReport {
        converged: n_at_tol.is_some(),
        limit: n_at_tol.map(|_| orbit.tau),
        n_at_tol,
        monotone_a: non_increasing(&orbit.a_seq),
        monotone_r: non_increasing(&orbit.r_seq),
    }
}
