//! Angle reduction and routing near multiples of pi.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Below this `|sin theta|` an angle is treated as a multiple of pi.
pub const SIN_FLOOR: f64 = 1e-8;

/// Representative of `theta` in `(-pi, pi]`.
pub fn reduce_angle(theta: f64) -> f64 {
    let mut t = theta - TAU * (theta / TAU).round();
    if t <= -PI {
        t += TAU;
    }
    if t > PI {
        t -= TAU;
    }
    t
}

/// How a transform angle is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleClass {
    /// Even multiple of pi: the identity.
    Identity,
    /// Odd multiple of pi: `f(-y)`.
    Reflection,
    /// Kernel regime; `theta` reduced to `(-pi, pi]`.
    Regular { theta: f64, sin: f64, cot: f64 },
}

pub fn classify(theta: f64) -> AngleClass {
    let t = reduce_angle(theta);
    let s = t.sin();
    if s.abs() < SIN_FLOOR {
        if t.abs() < 1.0 {
            AngleClass::Identity
        } else {
            AngleClass::Reflection
        }
    } else {
        AngleClass::Regular {
            theta: t,
            sin: s,
            cot: t.cos() / s,
        }
    }
}

/// `(theta, sin, cot)` or `ThetaSingular`.
pub fn regular(theta: f64) -> Result<(f64, f64, f64)> {
    match classify(theta) {
        AngleClass::Regular { theta, sin, cot } => Ok((theta, sin, cot)),
        _ => Err(Error::ThetaSingular {
            sin_abs: reduce_angle(theta).sin().abs(),
            floor: SIN_FLOOR,
        }),
    }
}
