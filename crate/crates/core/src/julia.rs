//! Sampled checks of the weighted Julia inequality and of horosphere
//! invariance, plus the Wolff-set scan built on them.

use num_complex::Complex64;

use crate::boundary::{boundary_value, classify_dw, DWClass};
use crate::error::{Error, Result};
use crate::geometry::{horocyclic_level, BidiskPoint, BoundaryPoint, Side};
use crate::maps::{ScalarMap, SelfMap2};
use crate::sampling::{par_argmax, BidiskSampler, DEFAULT_SEED};

/// Differences below this are rounding, not counterexamples.
pub const NOISE: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const SPOT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct JuliaReport {
    pub n_samples: usize,
    /// Sampled max of LHS - RHS; negative when the inequality held everywhere.
    pub max_violation: f64,
    /// Sampled max of LHS / RHS.
    pub tightness: f64,
    pub worst_point: BidiskPoint,
}

fn require_corner(tau: &BoundaryPoint) -> Result<()> {
    if !tau.is_corner() {
        return Err(Error::InvalidArgument(format!("{tau} is not on the torus")));
    }
    Ok(())
}

/// `|ω - m(λ)|² / (1 - |m(λ)|²)`, infinite once `m(λ)` leaves the disk.
fn image_level(omega: Complex64, w: Complex64) -> f64 {
    let d = 1.0 - w.norm_sqr();
    if d <= 0.0 {
        f64::INFINITY
    } else {
        (omega - w).norm_sqr() / d
    }
}

fn weighted_radius(tau: &BoundaryPoint, big_m: f64, z1: Complex64, z2: Complex64) -> f64 {
    horocyclic_level(tau.t1, z1).max(horocyclic_level(tau.t2, z2) / big_m)
}

fn anchor(m: &ScalarMap, tau: &BoundaryPoint) -> Result<Complex64> {
    let (value, fixed) = boundary_value(m, tau)?;
    Ok(if fixed { tau.t1 } else { value })
}

pub fn julia_max_violation(
    m: &ScalarMap,
    tau: &BoundaryPoint,
    big_m: f64,
    alpha: f64,
    n: usize,
) -> Result<JuliaReport> {
    julia_max_violation_seeded(m, tau, big_m, alpha, n, DEFAULT_SEED)
}

/// Sampled `max |ω-φ(λ)|²/(1-|φ(λ)|²) - α·max{R₁, R₂/M}`.
pub fn julia_max_violation_seeded(
    m: &ScalarMap,
    tau: &BoundaryPoint,
    big_m: f64,
    alpha: f64,
    n: usize,
    seed: u64,
) -> Result<JuliaReport> {
    require_corner(tau)?;
    if !(big_m > 0.0) || n == 0 {
        return Err(Error::InvalidArgument("need M > 0 and at least one sample".into()));
    }
    let omega = anchor(m, tau)?;
    let sampler = BidiskSampler::new(seed);
    let terms = |i: usize| -> Result<(f64, f64)> {
        let p = sampler.point(i);
        let lhs = image_level(omega, m.eval(p.z1, p.z2)?);
        let r = weighted_radius(tau, big_m, p.z1, p.z2);
        Ok((lhs, r))
    };
    let (max_violation, worst) = par_argmax(n, |i| terms(i).map(|(lhs, r)| lhs - alpha * r))?;
    let (tightness, _) = par_argmax(n, |i| terms(i).map(|(lhs, r)| lhs / (alpha * r)))?;
    Ok(JuliaReport { n_samples: n, max_violation, tightness, worst_point: sampler.point(worst) })
}

/// Sup of `LHS / max{R₁, R₂/M}` along the ray `τ - tδ_M`, `t = 2^-k`.
pub fn julia_tightness(m: &ScalarMap, tau: &BoundaryPoint, big_m: f64) -> Result<f64> {
    require_corner(tau)?;
    if !(big_m > 0.0) {
        return Err(Error::InvalidArgument(format!("M={big_m} must be positive")));
    }
    let omega = anchor(m, tau)?;
    let scale = big_m.max(1.0);
    let ratios: Vec<f64> = (1..=27)
        .map(|k| {
            let t = 0.5f64.powi(k) / scale;
            let (z1, z2) = (tau.t1 * (1.0 - t), tau.t2 * (1.0 - t * big_m));
            Ok(image_level(omega, m.eval(z1, z2)?) / weighted_radius(tau, big_m, z1, z2))
        })
        .collect::<Result<_>>()?;
    let last = ratios[ratios.len() - 1];
    let earlier = ratios[ratios.len() - 4];
    if !last.is_finite() || (last - earlier).abs() > 1e-4 {
        return Err(Error::NoLimit((last - earlier).abs()));
    }
    Ok(ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub n_samples: usize,
    pub k: f64,
    /// Sampled max of `max{A(F z) - R, B(F z) - K R}` with `R = max{A(z), B(z)/K}`.
    pub max_violation: f64,
    pub worst_point: BidiskPoint,
}

pub fn horosphere_invariance_violation(f: &SelfMap2, tau: &BoundaryPoint, k: f64, n: usize) -> Result<f64> {
    horosphere_invariance(f, tau, k, n, DEFAULT_SEED).map(|r| r.max_violation)
}

/// Checks `F(E(τ,R,KR)) ⊂ E(τ,R,KR)` on samples, each tested against the
/// smallest member of the family that contains it.
pub fn horosphere_invariance(
    f: &SelfMap2,
    tau: &BoundaryPoint,
    k: f64,
    n: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    require_corner(tau)?;
    if !(k > 0.0) || n == 0 {
        return Err(Error::InvalidArgument("need K > 0 and at least one sample".into()));
    }
    let sampler = BidiskSampler::new(seed);
    let (max_violation, worst) = par_argmax(n, |i| {
        let p = sampler.point(i);
        let r = weighted_radius(tau, k, p.z1, p.z2);
        let w = f.apply(&p)?;
        let a = image_level(tau.t1, w.z1);
        let b = image_level(tau.t2, w.z2);
        Ok((a - r).max(b - k * r))
    })?;
    Ok(InvarianceReport { n_samples: n, k, max_violation, worst_point: sampler.point(worst) })
}

/// Sampled max of `level(τⁱ, F(z)ⁱ) - level(τⁱ, zⁱ)` for one coordinate.
fn coordinate_invariance(f: &SelfMap2, coord: usize, t: Complex64, n: usize, seed: u64) -> Result<f64> {
    let sampler = BidiskSampler::new(seed);
    par_argmax(n, |i| {
        let p = sampler.point(i);
        let w = f.apply(&p)?;
        let (before, after) = if coord == 1 { (p.z1, w.z1) } else { (p.z2, w.z2) };
        Ok(image_level(t, after) - horocyclic_level(t, before))
    })
    .map(|(v, _)| v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WolffCase {
    Point,
    FaceFirst,
    FaceSecond,
    Cross,
}

impl WolffCase {
    pub fn label(self) -> &'static str {
        match self {
            WolffCase::Point => "II_II_point",
            WolffCase::FaceFirst => "I_II_face",
            WolffCase::FaceSecond => "II_I_face",
            WolffCase::Cross => "I_I_cross",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacialCheck {
    pub side: Side,
    pub point: BoundaryPoint,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerCheck {
    /// Admissible weights `[lo, hi]` for `E(τ,R,KR)`.
    pub band: (f64, f64),
    pub k: f64,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WolffSetReport {
    pub case: WolffCase,
    pub phi_class: DWClass,
    pub psi_class: DWClass,
    pub witness_tau: BoundaryPoint,
    pub facial_checks: Vec<FacialCheck>,
    pub corner_check: CornerCheck,
}

pub fn wolff_set_structure(f: &SelfMap2, tau_hint: &BoundaryPoint) -> Result<WolffSetReport> {
    wolff_set_structure_seeded(f, tau_hint, SPOT_SAMPLES, DEFAULT_SEED)
}

/// Classifies `φ` on the left and `ψ` on the right at `tau_hint` and reads off
/// the shape of the generalized Wolff set.
pub fn wolff_set_structure_seeded(f: &SelfMap2, tau: &BoundaryPoint, n: usize, seed: u64) -> Result<WolffSetReport> {
    require_corner(tau)?;
    let component = |m: &ScalarMap, side: Side| -> Result<DWClass> {
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
    let phi_class = component(&f.phi, Side::Left)?;
    let psi_class = component(&f.psi, Side::Right)?;

    let case = match (phi_class.is_type_two(), psi_class.is_type_two()) {
        (true, true) => WolffCase::Point,
        (false, true) => WolffCase::FaceFirst,
        (true, false) => WolffCase::FaceSecond,
        (false, false) => WolffCase::Cross,
    };

    let zero = Complex64::new(0.0, 0.0);
    let mut facial_checks = Vec::new();
    if phi_class.is_type_one() {
        facial_checks.push(FacialCheck {
            side: Side::Left,
            point: BoundaryPoint::new(tau.t1, zero)?,
            max_violation: coordinate_invariance(f, 1, tau.t1, n, seed)?,
        });
    }
    if psi_class.is_type_one() {
        facial_checks.push(FacialCheck {
            side: Side::Right,
            point: BoundaryPoint::new(zero, tau.t2)?,
            max_violation: coordinate_invariance(f, 2, tau.t2, n, seed)?,
        });
    }

    // A(Fz) <= max{A, B/A_φ} needs K <= A_φ; B(Fz) <= max{B, A/A_ψ} needs K >= 1/A_ψ
    let lo = match psi_class {
        DWClass::TypeII { a } => 1.0 / a,
        _ => 0.0,
    };
    let hi = match phi_class {
        DWClass::TypeII { a } => a,
        _ => f64::INFINITY,
    };
    let k = match (lo > 0.0, hi.is_finite()) {
        (true, true) => (lo * hi).sqrt(),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 1.0,
    };
    let inv = horosphere_invariance(f, tau, k, n, seed)?;
    Ok(WolffSetReport {
        case,
        phi_class,
        psi_class,
        witness_tau: *tau,
        facial_checks,
        corner_check: CornerCheck { band: (lo, hi), k, max_violation: inv.max_violation },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Builtin;

    fn tau11() -> BoundaryPoint {
        "1,0;1,0".parse().unwrap()
    }

    #[test]
    fn herve_julia_examples() {
        let h = ScalarMap::builtin(Builtin::HerveEx1Phi);
        let ok = julia_max_violation(&h, &tau11(), 1.0, 0.5, 20_000).unwrap();
        assert!(ok.max_violation <= NOISE, "{ok:?}");
        assert!(ok.tightness <= 1.0 + 1e-9);
        let bad = julia_max_violation(&h, &tau11(), 1.0, 0.4, 20_000).unwrap();
        assert!(bad.max_violation > 0.0, "{bad:?}");
    }

    #[test]
    fn violation_decreases_with_alpha() {
        let h = ScalarMap::builtin(Builtin::SolaEx2Phi);
        let vs: Vec<f64> = [0.3, 0.5, 0.8, 1.2]
            .iter()
            .map(|&a| julia_max_violation(&h, &tau11(), 2.0, a, 2000).unwrap().max_violation)
            .collect();
        assert!(vs.windows(2).all(|w| w[1] <= w[0]), "{vs:?}");
    }

    #[test]
    fn tightness_matches_k() {
        let h = ScalarMap::builtin(Builtin::HerveEx1Phi);
        assert!((julia_tightness(&h, &tau11(), 1.0).unwrap() - 0.5).abs() < 1e-4);
        let a = ScalarMap::builtin(Builtin::AvgShiftPhi);
        assert!((julia_tightness(&a, &tau11(), 2.0).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn invariance_band_for_avg_shift() {
        let f = SelfMap2::avg_shift();
        for k in [0.5, 1.0, 2.0] {
            let v = horosphere_invariance_violation(&f, &tau11(), k, 5000).unwrap();
            assert!(v <= NOISE, "K={k}: {v}");
        }
        assert!(horosphere_invariance_violation(&f, &tau11(), 100.0, 5000).unwrap() > 0.0);
    }

    #[test]
    fn wolff_cases() {
        let r = wolff_set_structure(&SelfMap2::avg_shift(), &tau11()).unwrap();
        assert_eq!(r.case, WolffCase::Point);
        assert!((r.corner_check.band.0 - 0.5).abs() < 1e-9 && (r.corner_check.band.1 - 2.0).abs() < 1e-9);
        assert!(r.corner_check.max_violation <= NOISE);
        assert!(r.facial_checks.is_empty());

        let r = wolff_set_structure(&SelfMap2::example_two(), &tau11()).unwrap();
        assert_eq!(r.case, WolffCase::Cross);
        assert_eq!(r.facial_checks.len(), 2);
        assert!(r.facial_checks.iter().all(|c| c.max_violation <= NOISE), "{r:?}");
    }
}
