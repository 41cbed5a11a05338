//! One-dimensional fractional Dunkl and Hankel transforms.
//!
//! Every transform is materialized as an [`AxisOperator`]: a matrix of `span{1, u}` elements
//! mapping samples on a rule's nodes to values at target points. The quadrature operator
//! integrates the kernel against the band-limited Hermite interpolant of the samples on an
//! oversampled panel rule; the spectral operator multiplies Hermite coefficients by
//! `e^{u n theta}`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{classify, regular, AngleClass};
use crate::basis::{frac_kernel_parts, hankel_kernel_parts};
use crate::error::{Error, Result};
use crate::quadrature::{basis_matrix, PanelRule, QuadratureRule1D, DEFAULT_NODE_BUDGET};
use crate::quat::{axis_complex_pow, axis_exp, Quaternion, UnitAxis};
use crate::special::{alpha_chi, gamma};

/// Which side of the integrand the kernel multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisTransformSpec {
    pub chi: f64,
    pub theta: f64,
    pub axis: UnitAxis,
    pub side: Side,
}

impl AxisTransformSpec {
    pub fn new(chi: f64, theta: f64, axis: UnitAxis, side: Side) -> Self {
        AxisTransformSpec {
            chi,
            theta,
            axis,
            side,
        }
    }
}

/// `c_chi^theta` in `span{1, axis}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormConstant {
    pub value: Quaternion,
    /// `(re, im)` coordinates in the subalgebra.
    pub parts: (f64, f64),
}

/// `axis_exp(axis, (chi+1)(sgn(sin) pi/2 - theta)) alpha_chi / |sin theta|^{chi+1}`, `theta` reduced to `(-pi, pi]`.
pub fn norm_constant(chi: f64, theta: f64, axis: UnitAxis) -> Result<NormConstant> {
    let (t, sin, _) = regular(theta)?;
    let hat = sin.signum();
    let phase = (chi + 1.0) * (hat * std::f64::consts::FRAC_PI_2 - t);
    let modulus = alpha_chi(chi) / sin.abs().powf(chi + 1.0);
    let (ps, pc) = phase.sin_cos();
    let parts = (modulus * pc, modulus * ps);
    Ok(NormConstant {
        value: axis.element(parts.0, parts.1),
        parts,
    })
}

/// Matrix of `span{1, axis}` elements `T[t, i] = re[t, i] + axis im[t, i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisOperator {
    pub axis: UnitAxis,
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

/// Chunk of panel nodes processed per task; fixed so reductions are reproducible.
const PANEL_CHUNK: usize = 2048;

impl AxisOperator {
    pub fn targets(&self) -> usize {
        self.re.nrows()
    }

    pub fn sources(&self) -> usize {
        self.re.ncols()
    }

    pub fn entry(&self, t: usize, i: usize) -> Quaternion {
        self.axis.element(self.re[(t, i)], self.im[(t, i)])
    }

    /// Quadrature operator of the fractional Dunkl transform; fails near `pi Z`.
    pub fn dunkl(
        chi: f64,
        theta: f64,
        axis: UnitAxis,
        rule: &QuadratureRule1D,
        targets: &[f64],
        budget: usize,
    ) -> Result<AxisOperator> {
        check_rule_chi(rule, chi)?;
        let (_, sin, cot) = regular(theta)?;
        let c = norm_constant(chi, theta, axis)?;
        let (length, freq) = panel_extent(rule, targets, sin, cot);
        let panel = PanelRule::symmetric(chi, length, freq, budget)?;
        let (gre, gim) = kernel_projection(rule, targets, &panel, |x, y| {
            frac_kernel_parts(chi, sin, cot, x, y)
        });
        Ok(finish(axis, c.parts, gre, gim, &rule.analysis_matrix()))
    }

    /// Spectral operator `sum_{n <= nmax} e^{axis n theta} h_n(y) c_n`; valid for every angle.
    pub fn spectral(
        theta: f64,
        axis: UnitAxis,
        rule: &QuadratureRule1D,
        targets: &[f64],
        nmax: usize,
    ) -> Result<AxisOperator> {
        if nmax >= rule.degree {
            return Err(Error::TruncationTooHigh {
                requested: nmax,
                needed: nmax + 1,
                available: rule.degree,
            });
        }
        let count = nmax + 1;
        let by = basis_matrix(rule.chi, count, targets);
        let analysis = rule.analysis_matrix().rows(0, count).into_owned();
        let mut bc = by.clone();
        let mut bs = by;
        for n in 0..count {
            let (s, c) = (n as f64 * theta).sin_cos();
            bc.column_mut(n).scale_mut(c);
            bs.column_mut(n).scale_mut(s);
        }
        Ok(AxisOperator {
            axis,
            re: bc * &analysis,
            im: bs * &analysis,
        })
    }

    /// Identity or reflection (evaluated through the interpolant off the nodes).
    pub fn special(
        class: AngleClass,
        axis: UnitAxis,
        rule: &QuadratureRule1D,
        targets: &[f64],
    ) -> Result<AxisOperator> {
        let reflect = match class {
            AngleClass::Identity => false,
            AngleClass::Reflection => true,
            AngleClass::Regular { .. } => {
                return Err(Error::InvalidParam(
                    "angle is not a multiple of pi".into(),
                ))
            }
        };
        let n = rule.len();
        let re = if targets == rule.nodes.as_slice() {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                m[(i, if reflect { rule.mirror(i) } else { i })] = 1.0;
            }
            m
        } else {
            let pts: Vec<f64> = targets
                .iter()
                .map(|&y| if reflect { -y } else { y })
                .collect();
            rule.interpolation_matrix(&pts)
        };
        let im = DMatrix::zeros(re.nrows(), re.ncols());
        Ok(AxisOperator { axis, re, im })
    }

    /// Quadrature operator for any angle: special cases near `pi Z`, kernel rule otherwise.
    pub fn dunkl_any(
        chi: f64,
        theta: f64,
        axis: UnitAxis,
        rule: &QuadratureRule1D,
        targets: &[f64],
        budget: usize,
    ) -> Result<AxisOperator> {
        match classify(theta) {
            AngleClass::Regular { .. } => {
                AxisOperator::dunkl(chi, theta, axis, rule, targets, budget)
            }
            class => AxisOperator::special(class, axis, rule, targets),
        }
    }

    /// Weighted fractional Hankel operator on even samples; columns index positive nodes.
    pub fn hankel(
        nu: f64,
        theta: f64,
        axis: UnitAxis,
        rule: &QuadratureRule1D,
        targets: &[f64],
        budget: usize,
    ) -> Result<AxisOperator> {
        check_rule_chi(rule, nu)?;
        let (_, sin, cot) = regular(theta)?;
        let c = norm_constant(nu, theta, axis)?;
        let (length, freq) = panel_extent(rule, targets, sin, cot);
        let panel = PanelRule::half(nu, length, freq, budget)?;
        let (gre, gim) = kernel_projection(rule, targets, &panel, |x, y| {
            let (re, im) = hankel_kernel_parts(nu, sin, cot, x, y);
            (2.0 * re, 2.0 * im)
        });
        let full = finish(axis, c.parts, gre, gim, &rule.analysis_matrix());
        // fold the even extension back onto the positive nodes
        let half = rule.len() / 2;
        let fold = |m: &DMatrix<f64>| {
            DMatrix::from_fn(m.nrows(), half, |t, k| {
                let i = half + k;
                m[(t, i)] + m[(t, rule.mirror(i))]
            })
        };
        Ok(AxisOperator {
            axis,
            re: fold(&full.re),
            im: fold(&full.im),
        })
    }

    /// `out[t] = sum_i T[t,i] f_i` (left) or `sum_i f_i T[t,i]` (right).
    pub fn apply(&self, f: &[Quaternion], side: Side) -> Result<Vec<Quaternion>> {
        if f.len() != self.sources() {
            return Err(Error::GridMismatch(format!(
                "{} samples for an operator on {} nodes",
                f.len(),
                self.sources()
            )));
        }
        let fm = DMatrix::from_fn(f.len(), 4, |i, l| f[i].components()[l]);
        let p = &self.re * &fm;
        let q = &self.im * &fm;
        let u = self.axis.quaternion();
        Ok((0..self.targets())
            .map(|t| {
                let pt = Quaternion::new(p[(t, 0)], p[(t, 1)], p[(t, 2)], p[(t, 3)]);
                let qt = Quaternion::new(q[(t, 0)], q[(t, 1)], q[(t, 2)], q[(t, 3)]);
                match side {
                    Side::Left => pt + u * qt,
                    Side::Right => pt + qt * u,
                }
            })
            .collect())
    }

    /// Applies to real samples; result lies in `span{1, axis}`.
    pub fn apply_real(&self, f: &[f64]) -> Result<Vec<Quaternion>> {
        if f.len() != self.sources() {
            return Err(Error::GridMismatch(format!(
                "{} samples for an operator on {} nodes",
                f.len(),
                self.sources()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(f);
        let p = &self.re * &v;
        let q = &self.im * &v;
        Ok((0..self.targets())
            .map(|t| self.axis.element(p[t], q[t]))
            .collect())
    }
}

fn check_rule_chi(rule: &QuadratureRule1D, chi: f64) -> Result<()> {
    if rule.chi != chi {
        return Err(Error::GridMismatch(format!(
            "rule built for chi = {} used with chi = {chi}",
            rule.chi
        )));
    }
    Ok(())
}

/// Integration half-length and the highest oscillation rate of kernel times interpolant.
fn panel_extent(rule: &QuadratureRule1D, targets: &[f64], sin: f64, cot: f64) -> (f64, f64) {
    let length = rule.max_node() + 5.0;
    let ymax = targets.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let band = (2.0 * rule.degree as f64 + 2.0 * rule.chi + 2.0).sqrt();
    let freq = cot.abs() * length + ymax / sin.abs() + band + 1.0;
    (length, freq)
}

/// `G[t, n] = sum_p K(xi_p, y_t) omega_p h_n(xi_p)` as `(re, im)`.
fn kernel_projection<K>(
    rule: &QuadratureRule1D,
    targets: &[f64],
    panel: &PanelRule,
    kernel: K,
) -> (DMatrix<f64>, DMatrix<f64>)
where
    K: Fn(f64, f64) -> (f64, f64) + Sync,
{
    let count = rule.degree;
    let nt = targets.len();
    let chunks: Vec<(usize, usize)> = (0..panel.len())
        .step_by(PANEL_CHUNK)
        .map(|s| (s, (s + PANEL_CHUNK).min(panel.len())))
        .collect();
    let parts: Vec<(DMatrix<f64>, DMatrix<f64>)> = chunks
        .par_iter()
        .map(|&(s, e)| {
            let xs = &panel.nodes[s..e];
            let ws = &panel.weights[s..e];
            let hx = basis_matrix(rule.chi, count, xs);
            let mut kre = DMatrix::zeros(nt, xs.len());
            let mut kim = DMatrix::zeros(nt, xs.len());
            for (p, (&x, &w)) in xs.iter().zip(ws).enumerate() {
                for (t, &y) in targets.iter().enumerate() {
                    let (a, b) = kernel(x, y);
                    kre[(t, p)] = a * w;
                    kim[(t, p)] = b * w;
                }
            }
            (kre * &hx, kim * &hx)
        })
        .collect();
    let mut gre = DMatrix::zeros(nt, count);
    let mut gim = DMatrix::zeros(nt, count);
    for (a, b) in parts {
        gre += a;
        gim += b;
    }
    (gre, gim)
}

/// `c * G * analysis` in the subalgebra.
fn finish(
    axis: UnitAxis,
    c: (f64, f64),
    gre: DMatrix<f64>,
    gim: DMatrix<f64>,
    analysis: &DMatrix<f64>,
) -> AxisOperator {
    let re = (&gre * c.0 - &gim * c.1) * analysis;
    let im = (&gim * c.0 + &gre * c.1) * analysis;
    AxisOperator { axis, re, im }
}

/// Quadrature path of the fractional Dunkl transform of samples on `rule.nodes`.
pub fn frac_dunkl_quadrature(
    f: &[Quaternion],
    spec: &AxisTransformSpec,
    rule: &QuadratureRule1D,
    y_targets: &[f64],
) -> Result<Vec<Quaternion>> {
    if f.len() != rule.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples on a {}-node rule",
            f.len(),
            rule.len()
        )));
    }
    let op = AxisOperator::dunkl(
        spec.chi,
        spec.theta,
        spec.axis,
        rule,
        y_targets,
        DEFAULT_NODE_BUDGET,
    )?;
    op.apply(f, spec.side)
}

/// Spectral path: coefficients up to `nmax` times `e^{axis n theta}`.
pub fn frac_dunkl_spectral(
    f: &[Quaternion],
    spec: &AxisTransformSpec,
    rule: &QuadratureRule1D,
    y_targets: &[f64],
    nmax: usize,
) -> Result<Vec<Quaternion>> {
    check_rule_chi(rule, spec.chi)?;
    let op = AxisOperator::spectral(spec.theta, spec.axis, rule, y_targets, nmax)?;
    op.apply(f, spec.side)
}

/// Identity (`theta` in `2 pi Z`) or reflection (odd multiples) on the rule's nodes.
pub fn frac_dunkl_special(f: &[Quaternion], theta: f64) -> Result<Vec<Quaternion>> {
    match classify(theta) {
        AngleClass::Identity => Ok(f.to_vec()),
        AngleClass::Reflection => Ok(f.iter().rev().copied().collect()),
        AngleClass::Regular { .. } => Err(Error::InvalidParam(format!(
            "theta = {theta} is not a multiple of pi"
        ))),
    }
}

/// `2 c_nu^theta int_0^inf chirp j_nu(x y / sin) psi(x) x^{2nu+1} dx`; `psi` sampled on the
/// positive nodes of `rule` (built with `chi = nu`).
pub fn frac_hankel(
    psi: &[f64],
    nu: f64,
    theta: f64,
    axis: UnitAxis,
    rule: &QuadratureRule1D,
    y_targets: &[f64],
) -> Result<Vec<Quaternion>> {
    if psi.len() != rule.len() / 2 {
        return Err(Error::GridMismatch(format!(
            "{} radial samples for {} positive nodes",
            psi.len(),
            rule.len() / 2
        )));
    }
    let op = AxisOperator::hankel(nu, theta, axis, rule, y_targets, DEFAULT_NODE_BUDGET)?;
    op.apply_real(psi)
}

/// Hankel transform conjugated to `L^2(dx)`: `y^{nu+1/2} H(x^{-nu-1/2} phi)(y)`.
pub fn frac_hankel_unweighted(
    phi: &[f64],
    nu: f64,
    theta: f64,
    axis: UnitAxis,
    rule: &QuadratureRule1D,
    y_targets: &[f64],
) -> Result<Vec<Quaternion>> {
    let half = rule.half_line();
    if phi.len() != half.nodes.len() {
        return Err(Error::GridMismatch(format!(
            "{} radial samples for {} positive nodes",
            phi.len(),
            half.nodes.len()
        )));
    }
    let psi: Vec<f64> = phi
        .iter()
        .zip(&half.nodes)
        .map(|(p, x)| p * x.powf(-nu - 0.5))
        .collect();
    if y_targets.iter().any(|&y| y < 0.0) {
        return Err(Error::InvalidParam("radial targets must be >= 0".into()));
    }
    let out = frac_hankel(&psi, nu, theta, axis, rule, y_targets)?;
    Ok(out
        .into_iter()
        .zip(y_targets)
        .map(|(q, &y)| q * y.powf(nu + 0.5))
        .collect())
}

/// Closed form of the Hankel transform of `e^{-alpha x^2}` for `0 < theta < pi`.
pub fn hankel_gaussian(
    alpha: f64,
    nu: f64,
    theta: f64,
    axis: UnitAxis,
    y: f64,
) -> Result<Quaternion> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParam(format!("alpha = {alpha} must be > 0")));
    }
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::InvalidParam(format!(
            "closed form needs 0 < theta < pi, got {theta}"
        )));
    }
    let (_, sin, cot) = regular(theta)?;
    let c = norm_constant(nu, theta, axis)?;
    let half_cot = 0.5 * cot;
    let power = axis_complex_pow(alpha, half_cot, axis, -nu - 1.0)?;
    // -y^2 / (4 A sin^2) with 1/A = (alpha - axis cot/2) / |A|^2
    let a2 = alpha * alpha + half_cot * half_cot;
    let scale = y * y / (4.0 * sin * sin * a2);
    let re = -scale * alpha;
    let im = -0.5 * y * y * cot + scale * half_cot;
    let expo = axis_exp(axis, im) * re.exp();
    Ok(c.value * power * expo * gamma(nu + 1.0))
}
