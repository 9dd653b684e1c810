//! Holomorphic maps of the bidisk into the disk, and pairs of them.

mod builtin;
mod spec;

pub use builtin::{Builtin, DIAGONAL_GAP};
pub use spec::{load_map, load_map_file, parse_map_spec, resolve_map, to_spec, validate_map};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BidiskPoint, Side};
use builtin::DEN_EPS;

/// Polynomial quotient with coefficient matrices; entry `[i][j]` multiplies
/// `(λ¹)^i (λ²)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    pub num: Vec<Vec<Complex64>>,
    pub den: Vec<Vec<Complex64>>,
}

/// `s·(w1·λ¹ + w2·λ²) + (1 - s)·c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendMap {
    pub s: f64,
    pub w1: f64,
    pub w2: f64,
    pub c: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarMap {
    Rational(RationalMap),
    Builtin { kind: Builtin, swapped: bool },
    Blend(BlendMap),
}

/// `F = (φ, ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfMap2 {
    pub phi: ScalarMap,
    pub psi: ScalarMap,
}

impl RationalMap {
    pub fn new(num: Vec<Vec<Complex64>>, den: Vec<Vec<Complex64>>) -> Result<Self> {
        for (what, m) in [("num", &num), ("den", &den)] {
            if m.is_empty() || m.iter().all(|row| row.is_empty()) {
                return Err(Error::Parse(format!("{what} has no coefficients")));
            }
            if m.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::Parse(format!("{what} has a non-finite coefficient")));
            }
        }
        Ok(RationalMap { num, den })
    }

    pub fn transpose(&self) -> Self {
        RationalMap { num: transpose(&self.num), den: transpose(&self.den) }
    }

    fn eval(&self, l1: Complex64, l2: Complex64) -> Result<Complex64> {
        let den = poly2(&self.den, l1, l2);
        let d = den.norm();
        if d < DEN_EPS || !d.is_finite() {
            return Err(Error::DenominatorNearZero(d));
        }
        Ok(poly2(&self.num, l1, l2) / den)
    }

    /// `Some(c)` when the matrix is the single monomial `c·(λ¹)^i (λ²)^j`.
    fn monomial(m: &[Vec<Complex64>]) -> Option<(usize, usize, Complex64)> {
        let mut found = None;
        for (i, row) in m.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != Complex64::new(0.0, 0.0) {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((i, j, c));
                }
            }
        }
        found
    }
}

fn transpose(m: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let cols = m.iter().map(Vec::len).max().unwrap_or(0);
    (0..cols).map(|j| m.iter().map(|row| row.get(j).copied().unwrap_or_default()).collect()).collect()
}

/// Horner in λ² per row, then in λ¹.
fn poly2(m: &[Vec<Complex64>], l1: Complex64, l2: Complex64) -> Complex64 {
    m.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, row| {
        let r = row.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &c| a * l2 + c);
        acc * l1 + r
    })
}

impl BlendMap {
    pub fn new(s: f64, w1: f64, c: Complex64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidArgument(format!("blend s={s} must lie in (0,1]")));
        }
        if !(0.0..=1.0).contains(&w1) {
            return Err(Error::InvalidArgument(format!("blend w1={w1} must lie in [0,1]")));
        }
        if !(c.norm() < 1.0) {
            return Err(Error::InvalidArgument(format!("blend constant |{c}| must be < 1")));
        }
        Ok(BlendMap { s, w1, w2: 1.0 - w1, c })
    }

    fn eval(&self, l1: Complex64, l2: Complex64) -> Complex64 {
        self.s * (self.w1 * l1 + self.w2 * l2) + (1.0 - self.s) * self.c
    }
}

impl ScalarMap {
    pub fn builtin(kind: Builtin) -> Self {
        ScalarMap::Builtin { kind, swapped: false }
    }

    /// Evaluates without the interior check; the boundary engine probes
    /// points whose modulus rounds to 1.
    pub fn eval(&self, l1: Complex64, l2: Complex64) -> Result<Complex64> {
        let v = match self {
            ScalarMap::Rational(r) => r.eval(l1, l2)?,
            ScalarMap::Builtin { kind, swapped: false } => kind.eval(l1, l2)?,
            ScalarMap::Builtin { kind, swapped: true } => kind.eval(l2, l1)?,
            ScalarMap::Blend(b) => b.eval(l1, l2),
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::DenominatorNearZero(0.0));
        }
        Ok(v)
    }

    pub fn swap_args(&self) -> ScalarMap {
        match self {
            ScalarMap::Rational(r) => ScalarMap::Rational(r.transpose()),
            ScalarMap::Builtin { kind, swapped } => ScalarMap::Builtin { kind: *kind, swapped: !swapped },
            ScalarMap::Blend(b) => ScalarMap::Blend(BlendMap { w1: b.w2, w2: b.w1, ..*b }),
        }
    }

    /// `Some(1)` if the map is `λ¹`, `Some(2)` if it is `λ²`, decided from
    /// the representation alone.
    pub fn coordinate_projection(&self) -> Option<usize> {
        match self {
            ScalarMap::Builtin { .. } => None,
            ScalarMap::Blend(b) if b.s == 1.0 && b.w1 == 1.0 => Some(1),
            ScalarMap::Blend(b) if b.s == 1.0 && b.w2 == 1.0 => Some(2),
            ScalarMap::Blend(_) => None,
            ScalarMap::Rational(r) => {
                let (di, dj, dc) = RationalMap::monomial(&r.den)?;
                let (ni, nj, nc) = RationalMap::monomial(&r.num)?;
                if (di, dj) != (0, 0) || nc != dc {
                    return None;
                }
                match (ni, nj) {
                    (1, 0) => Some(1),
                    (0, 1) => Some(2),
                    _ => None,
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ScalarMap::Builtin { kind, swapped: false } => format!("builtin:{kind}"),
            ScalarMap::Builtin { kind, swapped: true } => format!("swap(builtin:{kind})"),
            ScalarMap::Rational(r) => format!("rational({}x.. / {}x..)", r.num.len(), r.den.len()),
            ScalarMap::Blend(b) => format!("blend(s={}, w1={}, c={})", b.s, b.w1, b.c),
        }
    }
}

pub fn eval_scalar(m: &ScalarMap, z: &BidiskPoint) -> Result<Complex64> {
    m.eval(z.z1, z.z2)
}

pub fn swap_args(m: &ScalarMap) -> ScalarMap {
    m.swap_args()
}

/// `m(z, fixed)` for the left slice, `m(fixed, z)` for the right one.
pub fn eval_slice(m: &ScalarMap, side: Side, fixed: Complex64, z: Complex64) -> Result<Complex64> {
    match side {
        Side::Left => m.eval(z, fixed),
        Side::Right => m.eval(fixed, z),
    }
}

impl SelfMap2 {
    pub fn new(phi: ScalarMap, psi: ScalarMap) -> Self {
        SelfMap2 { phi, psi }
    }

    pub fn apply(&self, z: &BidiskPoint) -> Result<BidiskPoint> {
        Ok(BidiskPoint::unchecked(self.phi.eval(z.z1, z.z2)?, self.psi.eval(z.z1, z.z2)?))
    }

    pub fn avg_shift() -> Self {
        SelfMap2::new(ScalarMap::builtin(Builtin::AvgShiftPhi), ScalarMap::builtin(Builtin::AvgShiftPsi))
    }

    /// `(herve_ex1_phi, mcp_ex1_psi)`.
    pub fn example_one() -> Self {
        SelfMap2::new(ScalarMap::builtin(Builtin::HerveEx1Phi), ScalarMap::builtin(Builtin::McpEx1Psi))
    }

    /// `(sola_ex2_phi, swap(sola_ex2_phi))`.
    pub fn example_two() -> Self {
        let phi = ScalarMap::builtin(Builtin::SolaEx2Phi);
        let psi = phi.swap_args();
        SelfMap2::new(phi, psi)
    }
}
