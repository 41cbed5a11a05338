//! Hamilton quaternions and the commutative axis subalgebras `span{1, u}`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    /// Basis element `e_l` for `l` in `0..4` (1, i, j, k).
    pub fn basis(l: usize) -> Self {
        match l {
            0 => Self::ONE,
            1 => Self::I,
            2 => Self::J,
            3 => Self::K,
            _ => panic!("quaternion basis index {l} out of range"),
        }
    }

    pub fn components(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_components(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }

    pub fn re(self) -> f64 {
        self.w
    }

    /// Vector part as a pure quaternion.
    pub fn im(self) -> Self {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Modulus, overflow-safe.
    pub fn norm(self) -> f64 {
        self.w.hypot(self.x).hypot(self.y.hypot(self.z))
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `|self - other|`.
    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn inv(self) -> Result<Self> {
        qinv(self)
    }
}

/// Hamilton product.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion {
        w: p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        x: p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        y: p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        z: p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    }
}

/// `conj(q) / |q|^2`.
pub fn qinv(q: Quaternion) -> Result<Quaternion> {
    let n2 = q.norm_sqr();
    if n2 == 0.0 || !n2.is_finite() {
        return Err(Error::ZeroQuaternion);
    }
    Ok(q.conj() / n2)
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        qmul(self, rhs)
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, rhs: Quaternion) {
        *self = qmul(*self, rhs);
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl MulAssign<f64> for Quaternion {
    fn mul_assign(&mut self, s: f64) {
        *self = *self * s;
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, r: Quaternion) {
        self.w += r.w;
        self.x += r.x;
        self.y += r.y;
        self.z += r.z;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, r: Quaternion) {
        self.w -= r.w;
        self.x -= r.x;
        self.y -= r.y;
        self.z -= r.z;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

/// A pure unit quaternion; squares to -1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitAxis(Quaternion);

impl UnitAxis {
    pub const I: UnitAxis = UnitAxis(Quaternion::I);
    pub const J: UnitAxis = UnitAxis(Quaternion::J);
    pub const K: UnitAxis = UnitAxis(Quaternion::K);

    /// Normalizes `(x, y, z)`; rejects the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = x.hypot(y).hypot(z);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParam(format!(
                "axis ({x}, {y}, {z}) has no direction"
            )));
        }
        Ok(UnitAxis(Quaternion::new(0.0, x / n, y / n, z / n)))
    }

    pub fn quaternion(self) -> Quaternion {
        self.0
    }

    /// `s + t u` in the subalgebra.
    pub fn element(self, s: f64, t: f64) -> Quaternion {
        Quaternion::new(s, t * self.0.x, t * self.0.y, t * self.0.z)
    }
}

impl Default for UnitAxis {
    fn default() -> Self {
        UnitAxis::I
    }
}

impl From<UnitAxis> for Quaternion {
    fn from(u: UnitAxis) -> Quaternion {
        u.0
    }
}

impl From<UnitAxis> for [f64; 3] {
    fn from(u: UnitAxis) -> [f64; 3] {
        [u.0.x, u.0.y, u.0.z]
    }
}

impl TryFrom<[f64; 3]> for UnitAxis {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        UnitAxis::new(v[0], v[1], v[2])
    }
}

impl FromStr for UnitAxis {
    type Err = Error;

    /// Accepts `i`, `j`, `k` (optionally signed) or a triple `x,y,z`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (sign, name) = match t.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, t.strip_prefix('+').unwrap_or(t)),
        };
        match name {
            "i" => return UnitAxis::new(sign, 0.0, 0.0),
            "j" => return UnitAxis::new(0.0, sign, 0.0),
            "k" => return UnitAxis::new(0.0, 0.0, sign),
            _ => {}
        }
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("axis `{s}`: expected i, j, k or x,y,z")));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("axis component `{p}`: {e}")))?;
        }
        UnitAxis::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for UnitAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0.x, self.0.y, self.0.z)
    }
}

/// `cos t + u sin t`.
pub fn axis_exp(u: UnitAxis, t: f64) -> Quaternion {
    let (s, c) = t.sin_cos();
    u.element(c, s)
}

/// Principal power `(s + u t)^gamma`, argument in `(-pi, pi]`.
pub fn axis_complex_pow(s: f64, t: f64, u: UnitAxis, gamma: f64) -> Result<Quaternion> {
    if s == 0.0 && t == 0.0 {
        return Err(Error::ZeroBase);
    }
    let modulus = s.hypot(t);
    let arg = t.atan2(s);
    Ok(axis_exp(u, gamma * arg) * modulus.powf(gamma))
}
