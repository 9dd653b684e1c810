//! The named example maps.
//!
//! Every formula is rewritten in terms of `u = 1 - λ¹`, `v = 1 - λ²` and
//! returns `1 - (something small)` near `(1, 1)`. The textbook forms cancel
//! catastrophically there, which is exactly where the boundary engine and
//! long orbits spend their time.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Below this gap the log map switches to its diagonal formula.
pub const DIAGONAL_GAP: f64 = 1e-9;
pub(crate) const DEN_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    HerveEx1Phi,
    McpEx1Psi,
    SolaEx2Phi,
    AvgShiftPhi,
    AvgShiftPsi,
}

impl Builtin {
    pub const ALL: [Builtin; 5] =
        [Builtin::HerveEx1Phi, Builtin::McpEx1Psi, Builtin::SolaEx2Phi, Builtin::AvgShiftPhi, Builtin::AvgShiftPsi];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::HerveEx1Phi => "herve_ex1_phi",
            Builtin::McpEx1Psi => "mcp_ex1_psi",
            Builtin::SolaEx2Phi => "sola_ex2_phi",
            Builtin::AvgShiftPhi => "avg_shift_phi",
            Builtin::AvgShiftPsi => "avg_shift_psi",
        }
    }

    pub fn eval(self, l1: Complex64, l2: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let u = one - l1;
        let v = one - l2;
        match self {
            Builtin::HerveEx1Phi => {
                // (1 - λ¹λ²) / (2 - λ¹ - λ²)
                let den = u + v;
                check_den(den)?;
                Ok(one - u * v / den)
            }
            Builtin::SolaEx2Phi => {
                // -(3λ¹λ² - λ¹ - λ² - 1) / (3 - λ¹ - λ² - λ¹λ²)
                let den = 2.0 * (u + v) - u * v;
                check_den(den)?;
                Ok(one - 2.0 * u * v / den)
            }
            Builtin::McpEx1Psi => {
                if (l1 - l2).norm() < DIAGONAL_GAP {
                    // (-3 + 5λ¹) / (5 - 3λ¹)
                    let den = 5.0 - 3.0 * l1;
                    check_den(den)?;
                    return Ok(one - 8.0 * u / den);
                }
                // a = λ² - λ¹, b = 2(1-λ¹)(1-λ²) log[(1+λ²)(1-λ¹) / ((1-λ²)(1+λ¹))],
                // value (a - b) / (a + b)
                let a = u - v;
                let b = 2.0 * u * v * ((one + l2) / v * (u / (one + l1))).ln();
                let den = a + b;
                check_den(den)?;
                Ok(one - 2.0 * b / den)
            }
            Builtin::AvgShiftPhi => Ok(one - (u + 0.5 * v) * 0.5),
            Builtin::AvgShiftPsi => Ok(one - (v + 0.5 * u) * 0.5),
        }
    }
}

fn check_den(den: Complex64) -> Result<()> {
    let d = den.norm();
    if d < DEN_EPS || !d.is_finite() {
        return Err(Error::DenominatorNearZero(d));
    }
    Ok(())
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL.iter().copied().find(|b| b.name() == s).ok_or_else(|| Error::UnknownBuiltin(s.to_string()))
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Textbook forms, used as the reference away from (1, 1).
    fn herve_naive(a: Complex64, b: Complex64) -> Complex64 {
        (1.0 - a * b) / (2.0 - a - b)
    }
    fn sola_naive(a: Complex64, b: Complex64) -> Complex64 {
        -(3.0 * a * b - a - b - 1.0) / (3.0 - a - b - a * b)
    }
    fn mcp_naive(a: Complex64, b: Complex64) -> Complex64 {
        let one = c(1.0, 0.0);
        let l = ((one + b) / (one - b) * (one - a) / (one + a)).ln();
        let p = b - a;
        let q = 2.0 * (one - a) * (one - b) * l;
        (p - q) / (p + q)
    }

    #[test]
    fn values_at_origin() {
        let z = c(0.0, 0.0);
        assert!((Builtin::HerveEx1Phi.eval(z, z).unwrap() - 0.5).norm() < 1e-15);
        assert!((Builtin::McpEx1Psi.eval(z, z).unwrap() + 0.6).norm() < 1e-15);
        assert!((Builtin::SolaEx2Phi.eval(z, z).unwrap() - 1.0 / 3.0).norm() < 1e-15);
        assert!((Builtin::AvgShiftPhi.eval(z, z).unwrap() - 0.25).norm() < 1e-15);
        assert!((Builtin::AvgShiftPsi.eval(z, z).unwrap() - 0.25).norm() < 1e-15);
    }

    #[test]
    fn stable_forms_match_textbook_forms() {
        let pts = [
            (c(0.3, 0.1), c(-0.2, 0.5)),
            (c(-0.7, 0.0), c(0.1, -0.1)),
            (c(0.0, 0.9), c(0.5, 0.2)),
            (c(0.45, -0.3), c(-0.6, -0.6)),
        ];
        for (a, b) in pts {
            let h = Builtin::HerveEx1Phi.eval(a, b).unwrap();
            assert!((h - herve_naive(a, b)).norm() < 1e-14);
            let s = Builtin::SolaEx2Phi.eval(a, b).unwrap();
            assert!((s - sola_naive(a, b)).norm() < 1e-14);
            let m = Builtin::McpEx1Psi.eval(a, b).unwrap();
            assert!((m - mcp_naive(a, b)).norm() < 1e-13);
        }
    }

    #[test]
    fn log_map_diagonal_branch_is_continuous() {
        for k in 0..10 {
            let theta = 0.6 * k as f64;
            let z = Complex64::from_polar(0.05 + 0.09 * k as f64, theta);
            let on = Builtin::McpEx1Psi.eval(z, z).unwrap();
            let off = Builtin::McpEx1Psi.eval(z, z + c(1e-6, 0.0)).unwrap();
            assert!((on - off).norm() < 1e-4, "k={k}: {on} vs {off}");
        }
    }

    #[test]
    fn names_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(b.name().parse::<Builtin>().unwrap(), b);
        }
        assert!("nope".parse::<Builtin>().is_err());
    }
}
