//! Generalized Hermite functions, rank-one Dunkl kernels and the fractional Dunkl operator.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::angle::regular;
use crate::error::{Error, Result};
use crate::quadrature::{Grid2D, SampledField};
use crate::quat::{axis_exp, Quaternion, UnitAxis};
use crate::special::{bessel_pair, gamma, laguerre_unchecked};

/// Monic recurrence coefficient `b_k`: `p_{k+1} = x p_k - b_k p_{k-1}` for `|x|^{2chi+1} e^{-x^2}`.
pub fn recurrence_b(chi: f64, k: usize) -> f64 {
    let odd = if k % 2 == 1 { 2.0 * chi + 1.0 } else { 0.0 };
    0.5 * (k as f64 + odd)
}

/// `h_0(x), ..., h_{count-1}(x)`, orthonormal in `L^2(|x|^{2chi+1} dx)`.
///
/// Log-scaled recurrence: values stay finite where `e^{-x^2/2}` alone would underflow.
pub fn hermite_functions(chi: f64, count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let mut log_scale = -0.5 * x * x - 0.5 * gamma(chi + 1.0).ln();
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    out.push(log_scale.exp());
    for n in 0..count - 1 {
        let bn = if n == 0 { 0.0 } else { recurrence_b(chi, n) };
        let next = (x * cur - bn.sqrt() * prev) / recurrence_b(chi, n + 1).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > 1e100 {
            prev *= 1e-100;
            cur *= 1e-100;
            log_scale += 100.0 * std::f64::consts::LN_10;
        }
        out.push(cur * log_scale.exp());
    }
    out
}

/// `h_n^chi(x)` from the Laguerre closed form; positive for large positive `x`.
pub fn hermite_h(n: usize, chi: f64, x: f64) -> Result<f64> {
    if !(chi >= 0.0) {
        return Err(Error::InvalidParam(format!("chi = {chi} must be >= 0")));
    }
    let m = n / 2;
    let odd = n % 2 == 1;
    let a = if odd { chi + 1.0 } else { chi };
    // m! / Gamma(m + a + 1) = prod_{k<=m} k/(k+a) / Gamma(a+1)
    let ratio: f64 = (1..=m).map(|k| k as f64 / (k as f64 + a)).product::<f64>() / gamma(a + 1.0);
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let lag = laguerre_unchecked(m, a, x * x);
    let head = if odd { x } else { 1.0 };
    Ok(sign * ratio.sqrt() * head * (-0.5 * x * x).exp() * lag)
}

/// Truncation order for a generalized Hermite family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteParams {
    pub chi: f64,
    pub nmax: usize,
}

impl HermiteParams {
    /// `[h_0(x), ..., h_nmax(x)]`.
    pub fn eval(&self, x: f64) -> Vec<f64> {
        hermite_functions(self.chi, self.nmax + 1, x)
    }
}

/// Coefficients of `x^2 h_n = alpha_{n+2} h_{n+2} + beta_n h_n + alpha_n h_{n-2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCoeffs {
    pub chi: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// `beta_n = n + chi + 1`, `alpha_n = sqrt(b_{n-1} b_n)` (`alpha_0 = alpha_1 = 0`), for `n <= nmax + 2`.
pub fn recurrence_coeffs(chi: f64, nmax: usize) -> RecurrenceCoeffs {
    let len = nmax + 3;
    let beta = (0..len).map(|n| n as f64 + chi + 1.0).collect();
    let alpha = (0..len)
        .map(|n| {
            if n < 2 {
                0.0
            } else {
                (recurrence_b(chi, n - 1) * recurrence_b(chi, n)).sqrt()
            }
        })
        .collect();
    RecurrenceCoeffs { chi, alpha, beta }
}

impl RecurrenceCoeffs {
    /// `x^2 h_n(x)` rebuilt from neighbours; `hs` holds `h_0..` at one point.
    pub fn apply(&self, n: usize, hs: &[f64]) -> f64 {
        let mut v = self.alpha[n + 2] * hs[n + 2] + self.beta[n] * hs[n];
        if n >= 2 {
            v += self.alpha[n] * hs[n - 2];
        }
        v
    }
}

/// `H_{n,m}(x1, x2) = h_n^{chi1}(x1) h_m^{chi2}(x2)` on the grid.
pub fn hermite2d(n: usize, m: usize, grid: &Arc<Grid2D>) -> SampledField {
    let c1 = grid.rule1.chi;
    let c2 = grid.rule2.chi;
    let h1: Vec<f64> = grid
        .rule1
        .nodes
        .iter()
        .map(|&x| hermite_functions(c1, n + 1, x)[n])
        .collect();
    let h2: Vec<f64> = grid
        .rule2
        .nodes
        .iter()
        .map(|&x| hermite_functions(c2, m + 1, x)[m])
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    for a in &h1 {
        for b in &h2 {
            values.push(Quaternion::real(a * b));
        }
    }
    SampledField {
        grid: grid.clone(),
        values,
    }
}

/// `E_chi(x, i u)` with `i -> axis`: `j_chi(xu) + axis (xu/(2chi+2)) j_{chi+1}(xu)`.
pub fn dunkl_kernel_imag(chi: f64, x: f64, u: f64, axis: UnitAxis) -> Quaternion {
    let (even, odd) = bessel_pair(chi, x * u);
    axis.element(even, odd)
}

/// `(re, im)` of the fractional kernel in `span{1, axis}`, given `sin` and `cot` of the angle.
#[inline]
pub(crate) fn frac_kernel_parts(chi: f64, sin: f64, cot: f64, x: f64, y: f64) -> (f64, f64) {
    let (even, odd) = bessel_pair(chi, x * y / sin);
    let (ps, pc) = (-0.5 * (x * x + y * y) * cot).sin_cos();
    (pc * even - ps * odd, pc * odd + ps * even)
}

/// Chirp-modulated kernel `e^{-axis (x^2+y^2) cot/2} E_chi(x, i y / sin theta)`; `|K| <= 1`.
pub fn frac_kernel(chi: f64, theta: f64, x: f64, y: f64, axis: UnitAxis) -> Result<Quaternion> {
    let (_, sin, cot) = regular(theta)?;
    let (re, im) = frac_kernel_parts(chi, sin, cot, x, y);
    Ok(axis.element(re, im))
}

/// Radial Hankel kernel `e^{-axis (x^2+y^2) cot/2} j_nu(x y / sin theta)`.
#[inline]
pub(crate) fn hankel_kernel_parts(nu: f64, sin: f64, cot: f64, x: f64, y: f64) -> (f64, f64) {
    let (even, _) = bessel_pair(nu, x * y / sin);
    let (ps, pc) = (-0.5 * (x * x + y * y) * cot).sin_cos();
    (pc * even, ps * even)
}

/// Chirp factor `axis_exp(axis, -(x^2 + y^2) cot / 2)`.
pub fn chirp(axis: UnitAxis, cot: f64, x: f64, y: f64) -> Quaternion {
    axis_exp(axis, -0.5 * (x * x + y * y) * cot)
}

/// First-derivative weights at `x0` over `xs` (Fornberg).
fn fd_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // c[j][k]: weight of xs[j] for the k-th derivative, k in {0, 1}
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// `Lambda f(y) = f'(y) + (2chi+1)/y (f(y) - f(-y))/2 + axis cot(theta) y f(y)`.
///
/// `ys` sorted, symmetric, without `0`. Derivative: five-point stencils, centred in the
/// interior and one-sided at the ends (fourth order).
pub fn dunkl_operator_apply(
    ys: &[f64],
    f: &[Quaternion],
    chi: f64,
    theta: f64,
    axis: UnitAxis,
) -> Result<Vec<Quaternion>> {
    let (_, _, cot) = regular(theta)?;
    let n = ys.len();
    if f.len() != n {
        return Err(Error::GridMismatch(format!("{} samples on {n} points", f.len())));
    }
    if ys.contains(&0.0) {
        return Err(Error::GridContainsZero);
    }
    if n < 5 {
        return Err(Error::InvalidParam("need at least five points".into()));
    }
    for i in 0..n {
        if (ys[i] + ys[n - 1 - i]).abs() > 1e-12 * ys[i].abs().max(1.0) {
            return Err(Error::InvalidParam("grid is not symmetric about 0".into()));
        }
        if i > 0 && ys[i] <= ys[i - 1] {
            return Err(Error::InvalidParam("grid is not increasing".into()));
        }
    }
    let u = axis.quaternion();
    let out = (0..n)
        .map(|i| {
            let start = i.saturating_sub(2).min(n - 5);
            let w = fd_weights(ys[i], &ys[start..start + 5]);
            let deriv: Quaternion = w
                .iter()
                .zip(&f[start..start + 5])
                .map(|(&wk, &fk)| fk * wk)
                .sum();
            let y = ys[i];
            let diff = (f[i] - f[n - 1 - i]) * ((2.0 * chi + 1.0) / y * 0.5);
            let chirp_term = u * f[i] * (cot * y);
            deriv + diff + chirp_term
        })
        .collect();
    Ok(out)
}
