//! Points of the bidisk and its boundary, horocycles and horospheres.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tolerance for deciding that a coordinate lies on the unit circle.
pub const CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            other => Err(Error::Parse(format!("side must be left or right, got '{other}'"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {z}")));
        }
        if z.norm() >= 1.0 {
            return Err(Error::InvalidPoint(format!("|{z}| >= 1")));
        }
        Ok(DiskPoint(z))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// A point of the open bidisk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BidiskPoint {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl BidiskPoint {
    pub fn new(z1: Complex64, z2: Complex64) -> Result<Self> {
        DiskPoint::new(z1)?;
        DiskPoint::new(z2)?;
        Ok(BidiskPoint { z1, z2 })
    }

    /// Builds a point without the interior check; used for iterates that may
    /// have drifted onto the boundary in floating point.
    pub fn unchecked(z1: Complex64, z2: Complex64) -> Self {
        BidiskPoint { z1, z2 }
    }

    pub fn origin() -> Self {
        BidiskPoint { z1: Complex64::new(0.0, 0.0), z2: Complex64::new(0.0, 0.0) }
    }

    pub fn max_modulus(&self) -> f64 {
        self.z1.norm().max(self.z2.norm())
    }

    pub fn swap(self) -> Self {
        BidiskPoint { z1: self.z2, z2: self.z1 }
    }
}

impl FromStr for BidiskPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (z1, z2) = parse_pair(s)?;
        BidiskPoint::new(z1, z2)
    }
}

/// A point of the closed bidisk with at least one unimodular coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub t1: Complex64,
    pub t2: Complex64,
    pub on_circle1: bool,
    pub on_circle2: bool,
}

impl BoundaryPoint {
    pub fn new(t1: Complex64, t2: Complex64) -> Result<Self> {
        for t in [t1, t2] {
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::InvalidPoint(format!("non-finite coordinate {t}")));
            }
            if t.norm() > 1.0 + CIRCLE_TOL {
                return Err(Error::InvalidPoint(format!("|{t}| > 1")));
            }
        }
        let on_circle1 = (t1.norm() - 1.0).abs() <= CIRCLE_TOL;
        let on_circle2 = (t2.norm() - 1.0).abs() <= CIRCLE_TOL;
        if !on_circle1 && !on_circle2 {
            return Err(Error::InvalidPoint(format!("({t1}, {t2}) is not on the boundary")));
        }
        Ok(BoundaryPoint { t1, t2, on_circle1, on_circle2 })
    }

    /// Distinguished boundary point (both coordinates unimodular).
    pub fn is_corner(&self) -> bool {
        self.on_circle1 && self.on_circle2
    }

    pub fn swap(self) -> Self {
        BoundaryPoint { t1: self.t2, t2: self.t1, on_circle1: self.on_circle2, on_circle2: self.on_circle1 }
    }
}

impl FromStr for BoundaryPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (t1, t2) = parse_pair(s)?;
        BoundaryPoint::new(t1, t2)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_complex(self.t1), fmt_complex(self.t2))
    }
}

/// Horocycle at `tau` of radius `radius`:
/// `{ z : |z - tau|^2 / (1 - |z|^2) < radius }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horocycle {
    pub tau: Complex64,
    pub radius: f64,
}

impl Horocycle {
    pub fn new(tau: Complex64, radius: f64) -> Result<Self> {
        if (tau.norm() - 1.0).abs() > CIRCLE_TOL {
            return Err(Error::InvalidArgument(format!("horocycle center {tau} is not unimodular")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("horocycle radius {radius} must be positive")));
        }
        Ok(Horocycle { tau, radius })
    }
}

/// Product of two horocycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horosphere {
    pub first: Horocycle,
    pub second: Horocycle,
}

impl Horosphere {
    pub fn new(tau1: Complex64, tau2: Complex64, r1: f64, r2: f64) -> Result<Self> {
        Ok(Horosphere { first: Horocycle::new(tau1, r1)?, second: Horocycle::new(tau2, r2)? })
    }
}

/// `|tau - z|^2 / (1 - |z|^2)`, the horocyclic level of `z` relative to `tau`.
pub fn horocyclic_level(tau: Complex64, z: Complex64) -> f64 {
    (tau - z).norm_sqr() / (1.0 - z.norm_sqr())
}

pub fn horocycle_contains(h: &Horocycle, z: Complex64) -> bool {
    if z.norm_sqr() >= 1.0 {
        return false;
    }
    horocyclic_level(h.tau, z) < h.radius
}

/// Euclidean center and radius of the horocycle.
pub fn horocycle_disk_form(h: &Horocycle) -> (Complex64, f64) {
    let s = h.radius + 1.0;
    (h.tau / s, h.radius / s)
}

/// Membership through the Euclidean disk form; agrees with
/// [`horocycle_contains`] away from rounding at the boundary circle.
pub fn horocycle_contains_euclidean(h: &Horocycle, z: Complex64) -> bool {
    let (c, r) = horocycle_disk_form(h);
    (z - c).norm() < r
}

pub fn horosphere_contains(e: &Horosphere, z: &BidiskPoint) -> bool {
    horocycle_contains(&e.first, z.z1) && horocycle_contains(&e.second, z.z2)
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Real points print as plain numbers: `1`, `-0.5`, `0.6-0.8i`.
pub fn fmt_point(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        fmt_complex(z)
    }
}

/// Parses `re,im` (or a bare real).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{p}' in '{s}'"))).and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::Parse(format!("non-finite number in '{s}'")))
            }
        })
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Parse(format!("expected 're,im', got '{s}'"))),
    }
}

/// Parses `re,im;re,im`.
pub fn parse_pair(s: &str) -> Result<(Complex64, Complex64)> {
    let mut it = s.split(';');
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((parse_complex(a)?, parse_complex(b)?)),
        _ => Err(Error::Parse(format!("expected 're,im;re,im', got '{s}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_form_of_unit_horocycle() {
        let h = Horocycle::new(c(1.0, 0.0), 1.0).unwrap();
        let (center, r) = horocycle_disk_form(&h);
        assert_eq!(center, c(0.5, 0.0));
        assert_eq!(r, 0.5);
    }

    #[test]
    fn membership_is_strict() {
        let h = Horocycle::new(c(1.0, 0.0), 1.0).unwrap();
        // level of the origin is exactly 1
        assert!(!horocycle_contains(&h, c(0.0, 0.0)));
        assert!(horocycle_contains(&h, c(0.1, 0.0)));
        assert!(!horocycle_contains(&h, c(-0.1, 0.0)));
    }

    #[test]
    fn boundary_point_flags() {
        let p: BoundaryPoint = "1,0;0.5,0".parse().unwrap();
        assert!(p.on_circle1 && !p.on_circle2);
        assert!("0.5,0;0.5,0".parse::<BoundaryPoint>().is_err());
        assert!("1,0;1.5,0".parse::<BoundaryPoint>().is_err());
        let q: BoundaryPoint = "0,1;-1,0".parse().unwrap();
        assert!(q.is_corner());
    }

    #[test]
    fn bidisk_point_rejects_boundary() {
        assert!("1,0;0,0".parse::<BidiskPoint>().is_err());
        assert!("0.3,0.2;0,-0.5".parse::<BidiskPoint>().is_ok());
        assert!("nan,0;0,0".parse::<BidiskPoint>().is_err());
    }

    #[test]
    fn parse_complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex(" -1e-3 , 2 ").unwrap(), c(-1e-3, 2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("abc").is_err());
    }
}
