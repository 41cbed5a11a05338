//! Two-sided 2-D fractional quaternionic Dunkl transform.
//!
//! The transform is `F(y) = sum T_a(y1, x1) f(x) T_b(y2, x2)` with the `a`-kernel always on the
//! left and the `b`-kernel always on the right. Samples are split into four real component
//! matrices so every product with `1, i, j, k` is carried out explicitly in its stated order.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::{classify, regular, AngleClass};
use crate::error::{Error, Result};
use crate::quadrature::{
    basis_matrix, build_rule, norm2, Grid2D, SampledField, DEFAULT_NODE_BUDGET,
};
use crate::quat::{axis_exp, Quaternion, UnitAxis};
use crate::report::Report;
use crate::special::{alpha_chi, gamma};
use crate::transform1d::{frac_hankel, hankel_gaussian, AxisOperator, Side};

/// Extra grid points required beyond the highest analysed index.
pub const TRUNCATION_MARGIN: usize = 8;
pub const DEFAULT_TRUNCATION: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub chi1: f64,
    pub chi2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub a: UnitAxis,
    pub b: UnitAxis,
}

impl Default for TransformSpec {
    fn default() -> Self {
        TransformSpec {
            chi1: 0.0,
            chi2: 0.0,
            theta1: FRAC_PI_2,
            theta2: FRAC_PI_2,
            a: UnitAxis::I,
            b: UnitAxis::J,
        }
    }
}

impl TransformSpec {
    /// Axes default to `a = i`, `b = j`.
    pub fn new(chi1: f64, chi2: f64, theta1: f64, theta2: f64) -> Self {
        TransformSpec {
            chi1,
            chi2,
            theta1,
            theta2,
            ..TransformSpec::default()
        }
    }

    pub fn with_axes(self, a: UnitAxis, b: UnitAxis) -> Self {
        TransformSpec { a, b, ..self }
    }

    pub fn with_angles(self, theta1: f64, theta2: f64) -> Self {
        TransformSpec {
            theta1,
            theta2,
            ..self
        }
    }

    pub fn inverse(self) -> Self {
        self.with_angles(-self.theta1, -self.theta2)
    }

    fn validate(&self) -> Result<()> {
        for (name, chi) in [("chi1", self.chi1), ("chi2", self.chi2)] {
            if !(chi >= 0.0 && chi.is_finite()) {
                return Err(Error::InvalidParam(format!("{name} = {chi} must be >= 0")));
            }
        }
        for (name, t) in [("theta1", self.theta1), ("theta2", self.theta2)] {
            if !t.is_finite() {
                return Err(Error::InvalidParam(format!("{name} = {t} is not finite")));
            }
        }
        Ok(())
    }

    fn check_grid(&self, grid: &Grid2D) -> Result<()> {
        self.validate()?;
        if grid.rule1.chi != self.chi1 || grid.rule2.chi != self.chi2 {
            return Err(Error::GridMismatch(format!(
                "grid built for chi = ({}, {}), transform uses ({}, {})",
                grid.rule1.chi, grid.rule2.chi, self.chi1, self.chi2
            )));
        }
        Ok(())
    }

    pub fn params(&self, report: Report) -> Report {
        report
            .with("chi1", self.chi1)
            .with("chi2", self.chi2)
            .with("theta1", self.theta1)
            .with("theta2", self.theta2)
            .with("a", self.a.quaternion().im().components()[1..].to_vec())
            .with("b", self.b.quaternion().im().components()[1..].to_vec())
    }
}

/// Hermite coefficients `c[n, m]`, row-major over `0..=nmax` by `0..=mmax`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoeffs {
    pub nmax: usize,
    pub mmax: usize,
    pub c: Vec<Quaternion>,
}

impl SpectralCoeffs {
    pub fn zeros(nmax: usize, mmax: usize) -> Self {
        SpectralCoeffs {
            nmax,
            mmax,
            c: vec![Quaternion::ZERO; (nmax + 1) * (mmax + 1)],
        }
    }

    pub fn get(&self, n: usize, m: usize) -> Quaternion {
        self.c[n * (self.mmax + 1) + m]
    }

    pub fn set(&mut self, n: usize, m: usize, q: Quaternion) {
        let cols = self.mmax + 1;
        self.c[n * cols + m] = q;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|q| q.norm_sqr()).sum()
    }

    pub fn max_dist(&self, other: &SpectralCoeffs) -> f64 {
        self.c
            .iter()
            .zip(&other.c)
            .map(|(p, q)| p.dist(*q))
            .fold(0.0, f64::max)
    }

    /// Independent uniform components in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(nmax: usize, mmax: usize, rng: &mut R) -> Self {
        let c = (0..(nmax + 1) * (mmax + 1))
            .map(|_| {
                Quaternion::new(
                    rng.gen_range(-1.0..=1.0),
                    rng.gen_range(-1.0..=1.0),
                    rng.gen_range(-1.0..=1.0),
                    rng.gen_range(-1.0..=1.0),
                )
            })
            .collect();
        SpectralCoeffs { nmax, mmax, c }
    }

    fn component(&self, l: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.nmax + 1, self.mmax + 1, |n, m| {
            self.get(n, m).components()[l]
        })
    }
}

/// `c[n, m] = <f, H_{n,m}>`, one real component at a time.
pub fn analyze(f: &SampledField, nmax: usize, mmax: usize) -> Result<SpectralCoeffs> {
    let grid = &f.grid;
    let available = grid.n1().min(grid.n2());
    let needed = nmax.max(mmax) + TRUNCATION_MARGIN;
    if available < needed {
        return Err(Error::TruncationTooHigh {
            requested: nmax.max(mmax),
            needed,
            available,
        });
    }
    let weighted = |rule: &crate::quadrature::QuadratureRule1D, count: usize| {
        let mut h = basis_matrix(rule.chi, count, &rule.nodes);
        for (i, w) in rule.scaled_weights.iter().enumerate() {
            h.row_mut(i).scale_mut(*w);
        }
        h
    };
    let h1 = weighted(&grid.rule1, nmax + 1);
    let h2 = weighted(&grid.rule2, mmax + 1);
    let comps = f.components();
    let cl: Vec<DMatrix<f64>> = comps.iter().map(|fl| h1.transpose() * fl * &h2).collect();
    let mut out = SpectralCoeffs::zeros(nmax, mmax);
    for n in 0..=nmax {
        for m in 0..=mmax {
            out.set(
                n,
                m,
                Quaternion::new(cl[0][(n, m)], cl[1][(n, m)], cl[2][(n, m)], cl[3][(n, m)]),
            );
        }
    }
    Ok(out)
}

/// `sum c[n, m] H_{n,m}` on `grid`.
pub fn synthesize(coeffs: &SpectralCoeffs, grid: &Arc<Grid2D>) -> SampledField {
    let h1 = basis_matrix(grid.rule1.chi, coeffs.nmax + 1, &grid.rule1.nodes);
    let h2 = basis_matrix(grid.rule2.chi, coeffs.mmax + 1, &grid.rule2.nodes);
    let comps = [0, 1, 2, 3].map(|l| &h1 * coeffs.component(l) * h2.transpose());
    SampledField::from_components(grid.clone(), &comps).expect("shapes follow the grid")
}

/// `c'[n, m] = e^{a n theta1} c[n, m] e^{b m theta2}`.
pub fn frqdt_spectral(coeffs: &SpectralCoeffs, spec: &TransformSpec) -> SpectralCoeffs {
    let mut out = coeffs.clone();
    for n in 0..=coeffs.nmax {
        let left = axis_exp(spec.a, n as f64 * spec.theta1);
        for m in 0..=coeffs.mmax {
            let right = axis_exp(spec.b, m as f64 * spec.theta2);
            out.set(n, m, left * coeffs.get(n, m) * right);
        }
    }
    out
}

/// Analyse, rotate, synthesize on the input grid.
pub fn frqdt_spectral_field(
    f: &SampledField,
    spec: &TransformSpec,
    nmax: usize,
    mmax: usize,
) -> Result<SampledField> {
    spec.check_grid(&f.grid)?;
    let c = analyze(f, nmax, mmax)?;
    Ok(synthesize(&frqdt_spectral(&c, spec), &f.grid))
}

/// A 2-D transform materialized as one 1-D operator per coordinate.
#[derive(Clone, Debug)]
pub struct FrqdtPlan {
    pub spec: TransformSpec,
    pub grid: Arc<Grid2D>,
    pub op1: AxisOperator,
    pub op2: AxisOperator,
    targets_are_nodes: bool,
}

impl FrqdtPlan {
    /// Quadrature plan evaluated at the grid's own nodes.
    pub fn quadrature(spec: &TransformSpec, grid: &Arc<Grid2D>) -> Result<FrqdtPlan> {
        let mut plan = FrqdtPlan::quadrature_at(
            spec,
            grid,
            &grid.rule1.nodes,
            &grid.rule2.nodes,
        )?;
        plan.targets_are_nodes = true;
        Ok(plan)
    }

    /// Quadrature plan evaluated at arbitrary target coordinates.
    pub fn quadrature_at(
        spec: &TransformSpec,
        grid: &Arc<Grid2D>,
        y1: &[f64],
        y2: &[f64],
    ) -> Result<FrqdtPlan> {
        spec.check_grid(grid)?;
        let (r1, r2) = (&grid.rule1, &grid.rule2);
        let (op1, op2) = rayon::join(
            || AxisOperator::dunkl_any(spec.chi1, spec.theta1, spec.a, r1, y1, DEFAULT_NODE_BUDGET),
            || AxisOperator::dunkl_any(spec.chi2, spec.theta2, spec.b, r2, y2, DEFAULT_NODE_BUDGET),
        );
        Ok(FrqdtPlan {
            spec: *spec,
            grid: grid.clone(),
            op1: op1?,
            op2: op2?,
            targets_are_nodes: false,
        })
    }

    /// Spectral plan truncated at `(nmax, mmax)`, valid for every angle.
    pub fn spectral(
        spec: &TransformSpec,
        grid: &Arc<Grid2D>,
        nmax: usize,
        mmax: usize,
    ) -> Result<FrqdtPlan> {
        spec.check_grid(grid)?;
        let op1 = AxisOperator::spectral(spec.theta1, spec.a, &grid.rule1, &grid.rule1.nodes, nmax)?;
        let op2 = AxisOperator::spectral(spec.theta2, spec.b, &grid.rule2, &grid.rule2.nodes, mmax)?;
        Ok(FrqdtPlan {
            spec: *spec,
            grid: grid.clone(),
            op1,
            op2,
            targets_are_nodes: true,
        })
    }

    /// Values at the targets, row-major; `a`-kernel on the left, `b`-kernel on the right.
    pub fn apply_values(&self, f: &SampledField) -> Result<Vec<Quaternion>> {
        self.apply_with_sides(f, Side::Left, Side::Right)
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        if !self.targets_are_nodes {
            return Err(Error::GridMismatch(
                "plan targets are not the grid nodes; use apply_values".into(),
            ));
        }
        let values = self.apply_values(f)?;
        SampledField::from_values(self.grid.clone(), values)
    }

    /// Places each 1-D kernel on the requested side; only `(Left, Right)` is the transform.
    pub fn apply_with_sides(
        &self,
        f: &SampledField,
        side1: Side,
        side2: Side,
    ) -> Result<Vec<Quaternion>> {
        if !(Arc::ptr_eq(&f.grid, &self.grid) || f.grid.same_as(&self.grid)) {
            return Err(Error::GridMismatch("field and plan grids differ".into()));
        }
        let comps = f.components();
        let stage = along(&comps, &self.op1, Dim::Rows, side1);
        let out = along(&stage, &self.op2, Dim::Cols, side2);
        let (t1, t2) = (out[0].nrows(), out[0].ncols());
        let mut values = Vec::with_capacity(t1 * t2);
        for i in 0..t1 {
            for j in 0..t2 {
                values.push(Quaternion::new(
                    out[0][(i, j)],
                    out[1][(i, j)],
                    out[2][(i, j)],
                    out[3][(i, j)],
                ));
            }
        }
        Ok(values)
    }
}

#[derive(Clone, Copy)]
enum Dim {
    Rows,
    Cols,
}

/// Applies `re + u im` along one index of the component stack `f = sum f_l e_l`.
fn along(f: &[DMatrix<f64>; 4], op: &AxisOperator, dim: Dim, side: Side) -> [DMatrix<f64>; 4] {
    let prod = |m: &DMatrix<f64>, fl: &DMatrix<f64>| match dim {
        Dim::Rows => m * fl,
        Dim::Cols => fl * m.transpose(),
    };
    let p: Vec<DMatrix<f64>> = f.iter().map(|fl| prod(&op.re, fl)).collect();
    let q: Vec<DMatrix<f64>> = f.iter().map(|fl| prod(&op.im, fl)).collect();
    let u = op.axis.quaternion();
    let mut out = [p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()];
    for (l, ql) in q.iter().enumerate() {
        let e = Quaternion::basis(l);
        let mixed = match side {
            Side::Left => u * e,
            Side::Right => e * u,
        };
        for (k, coef) in mixed.components().iter().enumerate() {
            if *coef != 0.0 {
                out[k] += ql * *coef;
            }
        }
    }
    out
}

/// Quadrature path on the input grid; multiples of `pi` route to identity or reflection.
pub fn frqdt_quadrature(f: &SampledField, spec: &TransformSpec) -> Result<SampledField> {
    FrqdtPlan::quadrature(spec, &f.grid)?.apply(f)
}

/// Transform with both angles negated.
pub fn inverse_frqdt(g: &SampledField, spec: &TransformSpec) -> Result<SampledField> {
    frqdt_quadrature(g, &spec.inverse())
}

fn relative(diff: f64, norm: f64) -> f64 {
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

/// Relative residual `||F^theta F^beta f - F^{theta+beta} f|| / ||f||`.
pub fn compose_check(
    f: &SampledField,
    spec1: &TransformSpec,
    spec2: &TransformSpec,
    tolerance: f64,
) -> Result<Report> {
    if spec1.with_angles(0.0, 0.0) != spec2.with_angles(0.0, 0.0) {
        return Err(Error::InvalidParam(
            "composition needs matching chi and axes".into(),
        ));
    }
    for t in [spec1.theta1, spec1.theta2, spec2.theta1, spec2.theta2] {
        regular(t)?;
    }
    let sum = spec1.with_angles(spec1.theta1 + spec2.theta1, spec1.theta2 + spec2.theta2);
    let lhs = frqdt_quadrature(&frqdt_quadrature(f, spec2)?, spec1)?;
    let rhs = frqdt_quadrature(f, &sum)?;
    let residual = relative(norm2(&lhs.sub(&rhs)?), norm2(f));
    Ok(spec1
        .params(Report::residual("composition", residual, tolerance))
        .with("beta1", spec2.theta1)
        .with("beta2", spec2.theta2))
}

/// `e^{-alpha r^2} sum_k coeffs[k] r^{2k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub alpha: f64,
    pub coeffs: Vec<f64>,
}

impl RadialProfile {
    pub fn gaussian(alpha: f64) -> Self {
        RadialProfile {
            alpha,
            coeffs: vec![1.0],
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r2 = r * r;
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r2 + c);
        poly * (-self.alpha * r2).exp()
    }
}

/// Compares the quadrature transform of `q x1^r1 x2^r2 psi1(|x1|) psi2(|x2|)` with
/// `e^{a r1 theta1} (H psi1)(|y1|) q y1^r1 y2^r2 e^{b r2 theta2} (H psi2)(|y2|)`,
/// the Hankel orders being `r_i + chi_i`.
pub fn bochner_check(
    degrees: (u32, u32),
    psi1: &RadialProfile,
    psi2: &RadialProfile,
    q: Quaternion,
    spec: &TransformSpec,
    grid: &Arc<Grid2D>,
    tolerance: f64,
) -> Result<Report> {
    for r in [degrees.0, degrees.1] {
        if r >= 2 {
            return Err(Error::UnsupportedDegree(r));
        }
    }
    spec.check_grid(grid)?;
    let (r1, r2) = (degrees.0 as i32, degrees.1 as i32);
    let f = SampledField::from_fn(grid.clone(), |x1, x2| {
        q * (x1.powi(r1) * x2.powi(r2) * psi1.eval(x1.abs()) * psi2.eval(x2.abs()))
    });
    let lhs = frqdt_quadrature(&f, spec)?;

    let radial = |rule: &crate::quadrature::QuadratureRule1D,
                  r: i32,
                  theta: f64,
                  axis: UnitAxis,
                  psi: &RadialProfile|
     -> Result<Vec<Quaternion>> {
        let nu = rule.chi + r as f64;
        let hr = build_rule(nu, rule.degree)?;
        let half = hr.half_line();
        let samples: Vec<f64> = half.nodes.iter().map(|&x| psi.eval(x)).collect();
        let ys: Vec<f64> = rule.nodes.iter().map(|y| y.abs()).collect();
        frac_hankel(&samples, nu, theta, axis, &hr, &ys)
    };
    let h1 = radial(&grid.rule1, r1, spec.theta1, spec.a, psi1)?;
    let h2 = radial(&grid.rule2, r2, spec.theta2, spec.b, psi2)?;
    let p1 = axis_exp(spec.a, r1 as f64 * spec.theta1);
    let p2 = axis_exp(spec.b, r2 as f64 * spec.theta2);
    let rhs = SampledField::from_values(grid.clone(), {
        let mut v = Vec::with_capacity(grid.len());
        for (i, &y1) in grid.rule1.nodes.iter().enumerate() {
            for (j, &y2) in grid.rule2.nodes.iter().enumerate() {
                let poly = y1.powi(r1) * y2.powi(r2);
                v.push(p1 * h1[i] * q * poly * p2 * h2[j]);
            }
        }
        v
    })?;
    let residual = relative(norm2(&lhs.sub(&rhs)?), norm2(&f));
    Ok(spec
        .params(Report::residual("bochner", residual, tolerance))
        .with("r1", degrees.0)
        .with("r2", degrees.1))
}

/// Closed-form transform of `e^{-alpha |x|^2}` at the grid nodes of `targets`.
pub fn gaussian_closed_form_2d(
    alpha: f64,
    spec: &TransformSpec,
    targets: &Arc<Grid2D>,
) -> Result<SampledField> {
    spec.validate()?;
    let g1: Vec<Quaternion> = targets
        .rule1
        .nodes
        .iter()
        .map(|&y| hankel_gaussian(alpha, spec.chi1, spec.theta1, spec.a, y))
        .collect::<Result<_>>()?;
    let g2: Vec<Quaternion> = targets
        .rule2
        .nodes
        .iter()
        .map(|&y| hankel_gaussian(alpha, spec.chi2, spec.theta2, spec.b, y))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(targets.len());
    for l in &g1 {
        for r in &g2 {
            values.push(*l * *r);
        }
    }
    SampledField::from_values(targets.clone(), values)
}

/// `1 / (Gamma(chi1+1) Gamma(chi2+1) 2^{chi1+chi2+2} |sin1|^{chi1+1} |sin2|^{chi2+1})`.
pub fn sup_bound_constant(spec: &TransformSpec) -> Result<f64> {
    let (_, s1, _) = regular(spec.theta1)?;
    let (_, s2, _) = regular(spec.theta2)?;
    Ok(alpha_chi(spec.chi1) * alpha_chi(spec.chi2)
        / (s1.abs().powf(spec.chi1 + 1.0) * s2.abs().powf(spec.chi2 + 1.0)))
}

/// `max |Ff| <= C ||f||_1` on the grid; reports `max |Ff| / (C ||f||_1)` as the residual.
pub fn sup_bound_check(f: &SampledField, spec: &TransformSpec) -> Result<Report> {
    let c = sup_bound_constant(spec)?;
    let lhs = frqdt_quadrature(f, spec)?.max_abs();
    let rhs = c * f.norm1();
    let (residual, pass) = if rhs > 0.0 {
        (lhs / rhs, lhs <= rhs * (1.0 + 1e-12))
    } else {
        (lhs, lhs == 0.0)
    };
    Ok(spec
        .params(Report::residual("bounds", residual, 1.0))
        .with("sup", lhs)
        .with("bound", rhs)
        .with("slack", rhs - lhs)
        .with_pass(pass))
}

/// `||F f - F' f|| / ||f||` where `F'` swaps the kernels' sides.
pub fn order_sensitivity(f: &SampledField, spec: &TransformSpec) -> Result<f64> {
    let plan = FrqdtPlan::quadrature(spec, &f.grid)?;
    let proper = plan.apply_values(f)?;
    let swapped = plan.apply_with_sides(f, Side::Right, Side::Left)?;
    let a = SampledField::from_values(f.grid.clone(), proper)?;
    let b = SampledField::from_values(f.grid.clone(), swapped)?;
    Ok(relative(norm2(&a.sub(&b)?), norm2(f)))
}

/// Whether both angles are special, i.e. the transform is a signed permutation of nodes.
pub fn is_trivial(spec: &TransformSpec) -> bool {
    !matches!(classify(spec.theta1), AngleClass::Regular { .. })
        && !matches!(classify(spec.theta2), AngleClass::Regular { .. })
}

/// `Gamma(chi+1)`-normalized ground-state Gaussian coefficient helper.
pub fn ground_state_scale(chi1: f64, chi2: f64) -> f64 {
    (gamma(chi1 + 1.0) * gamma(chi2 + 1.0)).sqrt()
}
