//! Gauss rules for the weight `|x|^{2chi+1}` and sampled quaternion fields on tensor grids.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::{hermite_functions, recurrence_b};
use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::special::{gamma, laguerre_unchecked, ln_gamma};

/// Largest supported rule size; keeps `e^{x^2}` of every node finite.
pub const MAX_RULE_SIZE: usize = 512;

/// Default nodes per axis.
pub const DEFAULT_RULE_SIZE: usize = 48;

/// Generalized Gauss-Hermite rule for `|x|^{2chi+1} e^{-x^2}`.
///
/// `weights` carry the Gaussian (`sum w_i psi(x_i) ~ int psi e^{-x^2} |x|^{2chi+1}`);
/// `scaled_weights` have it folded out (`sum W_i g(x_i) ~ int g |x|^{2chi+1}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule1D {
    pub chi: f64,
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

/// Builds the `N`-point rule: Golub-Welsch nodes, one Newton polish, Christoffel weights.
pub fn build_rule(chi: f64, n: usize) -> Result<QuadratureRule1D> {
    if !(chi >= 0.0) || !chi.is_finite() {
        return Err(Error::InvalidParam(format!("chi = {chi} must be finite and >= 0")));
    }
    if n < 2 || !n.is_multiple_of(2) || n > MAX_RULE_SIZE {
        return Err(Error::InvalidParam(format!(
            "rule size {n} must be even and in [2, {MAX_RULE_SIZE}]"
        )));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = recurrence_b(chi, k).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut positive: Vec<f64> = eig.eigenvalues.iter().copied().filter(|&x| x > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    debug_assert_eq!(positive.len(), n / 2);
    for x in positive.iter_mut() {
        for _ in 0..2 {
            *x -= newton_step(chi, n, *x);
        }
    }
    let half: Vec<(f64, f64)> = positive
        .iter()
        .map(|&x| {
            let h = hermite_functions(chi, n, x);
            (x, 1.0 / h.iter().map(|v| v * v).sum::<f64>())
        })
        .collect();
    let mut nodes = Vec::with_capacity(n);
    let mut scaled = Vec::with_capacity(n);
    for &(x, w) in half.iter().rev() {
        nodes.push(-x);
        scaled.push(w);
    }
    for &(x, w) in &half {
        nodes.push(x);
        scaled.push(w);
    }
    let weights = nodes
        .iter()
        .zip(&scaled)
        .map(|(x, w)| w * (-x * x).exp())
        .collect();
    Ok(QuadratureRule1D {
        chi,
        degree: n,
        nodes,
        weights,
        scaled_weights: scaled,
    })
}

/// `p_N(x) / p_N'(x)` for the monic-scaled orthogonal polynomial, overflow-safe.
fn newton_step(chi: f64, n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (0.0f64, 1.0f64);
    let (mut d0, mut d1) = (0.0f64, 0.0f64);
    for k in 0..n {
        let bk = if k == 0 { 0.0 } else { recurrence_b(chi, k) };
        let p2 = x * p1 - bk * p0;
        let d2 = p1 + x * d1 - bk * d0;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        let m = p1.abs().max(d1.abs());
        if m > 1e150 {
            p0 /= m;
            p1 /= m;
            d0 /= m;
            d1 /= m;
        }
    }
    p1 / d1
}

impl QuadratureRule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_node(&self) -> f64 {
        self.nodes.last().copied().unwrap_or(0.0)
    }

    /// `sum W_i g(x_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    /// `sum w_i psi(x_i)` against the Gaussian-damped weight.
    pub fn integrate_damped<F: Fn(f64) -> f64>(&self, psi: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * psi(x)).sum()
    }

    /// Index of the mirror node `-x_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    /// Positive half of the rule; integrates even `g` over `(0, inf)` against `x^{2chi+1}`.
    pub fn half_line(&self) -> HalfLineRule {
        let start = self.len() / 2;
        HalfLineRule {
            chi: self.chi,
            nodes: self.nodes[start..].to_vec(),
            weights: self.scaled_weights[start..].to_vec(),
        }
    }

    /// `h_n(x_j)` for `n < degree`, as a `len x degree` matrix.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        basis_matrix(self.chi, self.degree, &self.nodes)
    }

    /// Maps samples on the nodes to values of their degree-`N` Hermite interpolant at `targets`.
    pub fn interpolation_matrix(&self, targets: &[f64]) -> DMatrix<f64> {
        basis_matrix(self.chi, self.degree, targets) * self.analysis_matrix()
    }

    /// Rows give discrete Hermite coefficients: `c_n = sum_j W_j h_n(x_j) f_j`.
    pub fn analysis_matrix(&self) -> DMatrix<f64> {
        let mut a = self.basis_matrix().transpose();
        for (j, mut col) in a.column_iter_mut().enumerate() {
            col *= self.scaled_weights[j];
        }
        a
    }
}

/// `h_n(x_t)` for `n < count`, rows indexed by `t`.
pub fn basis_matrix(chi: f64, count: usize, xs: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(xs.len(), count);
    for (t, &x) in xs.iter().enumerate() {
        for (n, v) in hermite_functions(chi, count, x).into_iter().enumerate() {
            m[(t, n)] = v;
        }
    }
    m
}

/// Positive-node rule on `(0, inf)` for the weight `x^{2chi+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfLineRule {
    pub chi: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HalfLineRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Gauss-Jacobi rule for `(1-t)^a (1+t)^b` on `[-1, 1]`.
pub fn gauss_jacobi(a: f64, b: f64, q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = DMatrix::<f64>::zeros(q, q);
    for k in 0..q {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        m[(k, k)] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if k > 0 {
            let off = (4.0 * kf * (kf + a) * (kf + b) * (kf + a + b)
                / (s * s * (s + 1.0) * (s - 1.0)))
                .sqrt();
            m[(k, k - 1)] = off;
            m[(k - 1, k)] = off;
        }
    }
    let mu0 = ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
    .exp();
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&t, v)| (t, mu0 * v[0] * v[0]))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// Generalized Gauss-Laguerre rule for `s^alpha e^{-s}` on `[0, inf)`.
pub fn gauss_laguerre(alpha: f64, q: usize) -> (Vec<f64>, Vec<f64>) {
    let (nodes, log_weights) = gauss_laguerre_log(alpha, q);
    (nodes, log_weights.iter().map(|l| l.exp()).collect())
}

/// Nodes and `ln` of the weights; the small weights at large nodes keep full relative accuracy.
pub fn gauss_laguerre_log(alpha: f64, q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = DMatrix::<f64>::zeros(q, q);
    for k in 0..q {
        let kf = k as f64;
        m[(k, k)] = 2.0 * kf + alpha + 1.0;
        if k > 0 {
            let off = (kf * (kf + alpha)).sqrt();
            m[(k, k - 1)] = off;
            m[(k - 1, k)] = off;
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let qf = q as f64;
    let log_weights = nodes
        .iter_mut()
        .map(|x| {
            for _ in 0..2 {
                let (lq, lq1) = laguerre_pair(q, alpha, *x);
                let deriv = (qf * lq - (qf + alpha) * lq1) / *x;
                *x -= lq / deriv;
            }
            // w = Gamma(q+alpha+1) x / (q! (q+1)^2 L_{q+1}(x)^2)
            let next = laguerre_unchecked(q + 1, alpha, *x);
            ln_gamma(qf + alpha + 1.0) - ln_gamma(qf + 1.0) + x.ln()
                - 2.0 * ((qf + 1.0) * next.abs()).ln()
        })
        .collect();
    (nodes, log_weights)
}

/// `(L_q^alpha(x), L_{q-1}^alpha(x))`.
fn laguerre_pair(q: usize, alpha: f64, x: f64) -> (f64, f64) {
    (
        laguerre_unchecked(q, alpha, x),
        laguerre_unchecked(q - 1, alpha, x),
    )
}

pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(0.0, 0.0, q)
}

/// Nodes per panel of the oversampled kernel rule.
pub const PANEL_ORDER: usize = 20;

/// Phase (radians) one panel is allowed to span.
const PANEL_PHASE: f64 = 12.0;

/// Default cap on kernel-rule nodes before the quadrature path gives up.
pub const DEFAULT_NODE_BUDGET: usize = 200_000;

/// Composite rule on `[-L, L]` (or `[0, L]`) for `int g(x) |x|^{2chi+1} dx`.
///
/// The first panel at the origin is Gauss-Jacobi so the weight's kink is integrated exactly;
/// the rest are Gauss-Legendre with the weight folded into the weights.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelRule {
    pub chi: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelRule {
    /// Half-line rule on `[0, length]` resolving oscillations up to `freq` rad per unit.
    pub fn half(chi: f64, length: f64, freq: f64, budget: usize) -> Result<PanelRule> {
        let width = (PANEL_PHASE / freq.max(1e-9)).clamp(1e-3, length);
        let panels = (length / width).ceil() as usize;
        let needed = 2 * panels * PANEL_ORDER;
        if needed > budget {
            return Err(Error::QuadratureUnresolved { needed, budget });
        }
        let h = length / panels as f64;
        let beta = 2.0 * chi + 1.0;
        let (tj, wj) = gauss_jacobi(0.0, beta, PANEL_ORDER);
        let (tl, wl) = gauss_legendre(PANEL_ORDER);
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        let scale = (0.5 * h).powf(beta + 1.0);
        for (t, w) in tj.iter().zip(&wj) {
            nodes.push(0.5 * h * (t + 1.0));
            weights.push(w * scale);
        }
        for p in 1..panels {
            let left = p as f64 * h;
            for (t, w) in tl.iter().zip(&wl) {
                let x = left + 0.5 * h * (t + 1.0);
                nodes.push(x);
                weights.push(w * 0.5 * h * x.powf(beta));
            }
        }
        Ok(PanelRule { chi, nodes, weights })
    }

    /// Mirrored rule on `[-length, length]`.
    pub fn symmetric(chi: f64, length: f64, freq: f64, budget: usize) -> Result<PanelRule> {
        let half = PanelRule::half(chi, length, freq, budget)?;
        let mut nodes: Vec<f64> = half.nodes.iter().rev().map(|x| -x).collect();
        let mut weights: Vec<f64> = half.weights.iter().rev().copied().collect();
        nodes.extend_from_slice(&half.nodes);
        weights.extend_from_slice(&half.weights);
        Ok(PanelRule { chi, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Tensor grid carrying `dmu = |x1|^{2chi1+1} |x2|^{2chi2+1} dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    pub rule1: QuadratureRule1D,
    pub rule2: QuadratureRule1D,
}

impl Grid2D {
    pub fn new(chi1: f64, chi2: f64, n: usize) -> Result<Arc<Grid2D>> {
        Ok(Arc::new(Grid2D {
            rule1: build_rule(chi1, n)?,
            rule2: build_rule(chi2, n)?,
        }))
    }

    pub fn from_rules(rule1: QuadratureRule1D, rule2: QuadratureRule1D) -> Arc<Grid2D> {
        Arc::new(Grid2D { rule1, rule2 })
    }

    pub fn n1(&self) -> usize {
        self.rule1.len()
    }

    pub fn n2(&self) -> usize {
        self.rule2.len()
    }

    pub fn len(&self) -> usize {
        self.n1() * self.n2()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.rule1.nodes[i], self.rule2.nodes[j])
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.rule1.scaled_weights[i] * self.rule2.scaled_weights[j]
    }

    pub fn same_as(&self, other: &Grid2D) -> bool {
        self.rule1.chi == other.rule1.chi
            && self.rule2.chi == other.rule2.chi
            && self.rule1.nodes == other.rule1.nodes
            && self.rule2.nodes == other.rule2.nodes
    }
}

/// Quaternion samples on a grid, row-major in `(i, j)`.
#[derive(Clone, Debug)]
pub struct SampledField {
    pub grid: Arc<Grid2D>,
    pub values: Vec<Quaternion>,
}

impl SampledField {
    pub fn zeros(grid: Arc<Grid2D>) -> Self {
        let values = vec![Quaternion::ZERO; grid.len()];
        SampledField { grid, values }
    }

    pub fn from_fn<F: Fn(f64, f64) -> Quaternion>(grid: Arc<Grid2D>, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &x1 in &grid.rule1.nodes {
            for &x2 in &grid.rule2.nodes {
                values.push(f(x1, x2));
            }
        }
        SampledField { grid, values }
    }

    pub fn from_values(grid: Arc<Grid2D>, values: Vec<Quaternion>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.n1(),
                grid.n2()
            )));
        }
        Ok(SampledField { grid, values })
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.values[i * self.grid.n2() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        let n2 = self.grid.n2();
        self.values[i * n2 + j] = q;
    }

    pub fn check_same_grid(&self, other: &SampledField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    /// The four real component matrices `f_l`, `f = f_0 + i f_1 + j f_2 + k f_3`.
    pub fn components(&self) -> [DMatrix<f64>; 4] {
        let (n1, n2) = (self.grid.n1(), self.grid.n2());
        let mut out = [
            DMatrix::zeros(n1, n2),
            DMatrix::zeros(n1, n2),
            DMatrix::zeros(n1, n2),
            DMatrix::zeros(n1, n2),
        ];
        for i in 0..n1 {
            for j in 0..n2 {
                let c = self.get(i, j).components();
                for l in 0..4 {
                    out[l][(i, j)] = c[l];
                }
            }
        }
        out
    }

    pub fn from_components(grid: Arc<Grid2D>, comps: &[DMatrix<f64>; 4]) -> Result<Self> {
        let (n1, n2) = (grid.n1(), grid.n2());
        if comps.iter().any(|m| m.nrows() != n1 || m.ncols() != n2) {
            return Err(Error::GridMismatch("component matrix shape".into()));
        }
        let mut values = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                values.push(Quaternion::new(
                    comps[0][(i, j)],
                    comps[1][(i, j)],
                    comps[2][(i, j)],
                    comps[3][(i, j)],
                ));
            }
        }
        Ok(SampledField { grid, values })
    }

    pub fn map<F: Fn(Quaternion) -> Quaternion>(&self, f: F) -> SampledField {
        SampledField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&q| f(q)).collect(),
        }
    }

    pub fn zip_with<F: Fn(Quaternion, Quaternion) -> Quaternion>(
        &self,
        other: &SampledField,
        f: F,
    ) -> Result<SampledField> {
        self.check_same_grid(other)?;
        Ok(SampledField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&p, &q)| f(p, q))
                .collect(),
        })
    }

    pub fn sub(&self, other: &SampledField) -> Result<SampledField> {
        self.zip_with(other, |p, q| p - q)
    }

    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        self.zip_with(other, |p, q| p + q)
    }

    pub fn scale(&self, s: f64) -> SampledField {
        self.map(|q| q * s)
    }

    pub fn left_mul(&self, c: Quaternion) -> SampledField {
        self.map(|q| c * q)
    }

    pub fn right_mul(&self, c: Quaternion) -> SampledField {
        self.map(|q| q * c)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// `sum |f| dmu`.
    pub fn norm1(&self) -> f64 {
        let n2 = self.grid.n2();
        let terms: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, q)| q.norm() * self.grid.weight(k / n2, k % n2))
            .collect();
        tree_sum_f64(&terms)
    }

    /// Writes `x1,x2,w,x,y,z` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::from("x1,x2,w,x,y,z\n");
        for i in 0..self.grid.n1() {
            for j in 0..self.grid.n2() {
                let (x1, x2) = self.grid.point(i, j);
                let q = self.get(i, j);
                let _ = writeln!(
                    buf,
                    "{x1},{x2},{},{},{},{}",
                    q.w, q.x, q.y, q.z
                );
            }
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }

    /// Reads rows written by [`SampledField::write_csv`] onto `grid`; coordinates must match.
    pub fn read_csv<R: BufRead>(grid: Arc<Grid2D>, input: R) -> Result<SampledField> {
        let mut rows = Vec::new();
        for (ln, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (ln == 0 && line.starts_with("x1")) {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: `{c}`: {e}", ln + 1)))
                })
                .collect::<Result<_>>()?;
            if cols.len() != 6 {
                return Err(Error::Parse(format!(
                    "line {}: expected 6 columns, found {}",
                    ln + 1,
                    cols.len()
                )));
            }
            rows.push(FieldRow {
                x1: cols[0],
                x2: cols[1],
                w: cols[2],
                x: cols[3],
                y: cols[4],
                z: cols[5],
            });
        }
        SampledField::from_rows(grid, &rows)
    }

    pub fn rows(&self) -> Vec<FieldRow> {
        let mut rows = Vec::with_capacity(self.values.len());
        for i in 0..self.grid.n1() {
            for j in 0..self.grid.n2() {
                let (x1, x2) = self.grid.point(i, j);
                let q = self.get(i, j);
                rows.push(FieldRow {
                    x1,
                    x2,
                    w: q.w,
                    x: q.x,
                    y: q.y,
                    z: q.z,
                });
            }
        }
        rows
    }

    pub fn from_rows(grid: Arc<Grid2D>, rows: &[FieldRow]) -> Result<SampledField> {
        if rows.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} rows for a {}x{} grid",
                rows.len(),
                grid.n1(),
                grid.n2()
            )));
        }
        let n2 = grid.n2();
        let mut values = Vec::with_capacity(rows.len());
        for (k, r) in rows.iter().enumerate() {
            let (x1, x2) = grid.point(k / n2, k % n2);
            let tol = 1e-9 * (1.0 + x1.abs().max(x2.abs()));
            if (r.x1 - x1).abs() > tol || (r.x2 - x2).abs() > tol {
                return Err(Error::GridMismatch(format!(
                    "row {k} at ({}, {}) but grid node is ({x1}, {x2})",
                    r.x1, r.x2
                )));
            }
            values.push(Quaternion::new(r.w, r.x, r.y, r.z));
        }
        Ok(SampledField { grid, values })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.rows()).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(grid: Arc<Grid2D>, text: &str) -> Result<SampledField> {
        let rows: Vec<FieldRow> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        SampledField::from_rows(grid, &rows)
    }
}

/// One serialized sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub x1: f64,
    pub x2: f64,
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

const TREE_LEAF: usize = 1024;

/// Pairwise sum with a fixed split tree; identical result for any thread count.
pub fn tree_sum(xs: &[Quaternion]) -> Quaternion {
    if xs.len() <= TREE_LEAF {
        return xs.iter().copied().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    let (a, b) = rayon::join(|| tree_sum(l), || tree_sum(r));
    a + b
}

pub fn tree_sum_f64(xs: &[f64]) -> f64 {
    if xs.len() <= TREE_LEAF {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    let (a, b) = rayon::join(|| tree_sum_f64(l), || tree_sum_f64(r));
    a + b
}

/// `<f, g> = sum f conj(g) dmu`.
pub fn inner_product(f: &SampledField, g: &SampledField) -> Result<Quaternion> {
    f.check_same_grid(g)?;
    let n2 = f.grid.n2();
    let terms: Vec<Quaternion> = f
        .values
        .iter()
        .zip(&g.values)
        .enumerate()
        .map(|(k, (&p, &q))| (p * q.conj()) * f.grid.weight(k / n2, k % n2))
        .collect();
    Ok(tree_sum(&terms))
}

/// `||f||_2`; the product `f conj(f)` is real term by term.
pub fn norm2(f: &SampledField) -> f64 {
    let n2 = f.grid.n2();
    let terms: Vec<f64> = f
        .values
        .iter()
        .enumerate()
        .map(|(k, q)| q.norm_sqr() * f.grid.weight(k / n2, k % n2))
        .collect();
    tree_sum_f64(&terms).max(0.0).sqrt()
}

/// Real part of `<f, f>` after checking that the imaginary residue is negligible.
pub fn checked_norm_sq(f: &SampledField) -> Result<f64> {
    let ip = inner_product(f, f)?;
    let residue = ip.im().norm();
    if residue > 1e-12 * ip.w.abs() {
        return Err(Error::ImaginaryResidue {
            residue,
            norm_sq: ip.w,
        });
    }
    Ok(ip.w)
}

/// `int e^{-x^2} |x|^{2chi+1} x^{2k} dx = Gamma(k + chi + 1)`.
pub fn gaussian_moment(chi: f64, k: usize) -> f64 {
    gamma(k as f64 + chi + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_rule(-0.1, 16).is_err());
        assert!(build_rule(0.5, 15).is_err());
        assert!(build_rule(0.5, 0).is_err());
        assert!(build_rule(0.5, MAX_RULE_SIZE + 2).is_err());
    }

    #[test]
    fn ground_moments() {
        let r = build_rule(0.0, 16).unwrap();
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 1.0, max_relative = 1e-13);
        let r = build_rule(0.5, 16).unwrap();
        assert_relative_eq!(
            r.integrate_damped(|_| 1.0),
            std::f64::consts::PI.sqrt() / 2.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn moments_exact_to_full_degree() {
        for &chi in &[0.0, 0.3, 1.0, 2.5] {
            let n = 24;
            let r = build_rule(chi, n).unwrap();
            for k in 0..n {
                let got = r.integrate_damped(|x| x.powi(2 * k as i32));
                let want = gaussian_moment(chi, k);
                assert_relative_eq!(got, want, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn symmetric_and_sorted() {
        let r = build_rule(0.7, 48).unwrap();
        for i in 0..r.len() {
            assert_eq!(r.nodes[i], -r.nodes[r.mirror(i)]);
            assert_eq!(r.weights[i], r.weights[r.mirror(i)]);
            assert!(r.weights[i] > 0.0);
        }
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.max_node() < 11.0);
    }

    #[test]
    fn interpolation_reproduces_samples() {
        let r = build_rule(0.4, 32).unwrap();
        let p = r.interpolation_matrix(&r.nodes);
        let id = DMatrix::<f64>::identity(32, 32);
        assert!((p - id).abs().max() < 1e-12);
    }

    #[test]
    fn jacobi_rule_weights() {
        let (t, w) = gauss_jacobi(0.0, 1.6, 20);
        // int_{-1}^{1} (1+t)^b dt = 2^{b+1}/(b+1)
        assert_relative_eq!(w.iter().sum::<f64>(), 2f64.powf(2.6) / 2.6, max_relative = 1e-13);
        let m3: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(3)).sum();
        let exact = {
            // int (1+t)^b t^3: expand t = (1+t) - 1
            let b: f64 = 1.6;
            let mom = |p: f64| 2f64.powf(b + p + 1.0) / (b + p + 1.0);
            mom(3.0) - 3.0 * mom(2.0) + 3.0 * mom(1.0) - mom(0.0)
        };
        assert_relative_eq!(m3, exact, max_relative = 1e-12);
    }

    #[test]
    fn laguerre_rule_moments() {
        let alpha = 2.3;
        let (x, w) = gauss_laguerre(alpha, 40);
        // int s^k s^alpha e^{-s} ds = Gamma(alpha + k + 1)
        for k in 0..6 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            assert_relative_eq!(got, gamma(alpha + k as f64 + 1.0), max_relative = 1e-12);
        }
        let (_, lw) = gauss_laguerre_log(alpha, 40);
        for (w, l) in w.iter().zip(&lw) {
            assert_relative_eq!(w.ln(), *l, max_relative = 1e-12);
        }
    }

    #[test]
    fn panel_rule_integrates_oscillatory_gaussian() {
        let chi = 0.3;
        let p = PanelRule::symmetric(chi, 12.0, 40.0, DEFAULT_NODE_BUDGET).unwrap();
        // int cos(b x) e^{-x^2} |x|^{2chi+1} dx = Gamma(chi+1) 1F1(chi+1; 1/2; -b^2/4)
        let got = p.integrate(|x| (-x * x).exp());
        assert_relative_eq!(got, gamma(chi + 1.0), max_relative = 1e-13);
        let r = build_rule(chi, 64).unwrap();
        let got = p.integrate(|x| x.powi(4) * (-x * x).exp());
        assert_relative_eq!(got, r.integrate_damped(|x| x.powi(4)), max_relative = 1e-12);
    }

    #[test]
    fn panel_budget_enforced() {
        let e = PanelRule::half(0.0, 10.0, 1e6, 1000).unwrap_err();
        assert!(matches!(e, Error::QuadratureUnresolved { .. }));
    }

    #[test]
    fn field_norms_and_products() {
        let grid = Grid2D::new(0.5, 1.0, 24).unwrap();
        let c = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        let f = SampledField::from_fn(grid.clone(), |x1, x2| c * (-(x1 * x1 + x2 * x2) / 2.0).exp());
        let want = 2.0 * (gamma(1.5) * gamma(2.0)).sqrt();
        assert_relative_eq!(norm2(&f), want, max_relative = 1e-13);
        assert_eq!(norm2(&SampledField::zeros(grid.clone())), 0.0);
        assert_relative_eq!(checked_norm_sq(&f).unwrap(), want * want, max_relative = 1e-13);
        let other = Grid2D::new(0.5, 1.0, 16).unwrap();
        assert!(matches!(
            inner_product(&f, &SampledField::zeros(other)),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn csv_and_json_round_trip() {
        let grid = Grid2D::new(0.2, 0.9, 8).unwrap();
        let f = SampledField::from_fn(grid.clone(), |x1, x2| {
            Quaternion::new(x1, x2, x1 * x2, -1.5)
        });
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,w,x,y,z\n"));
        let g = SampledField::read_csv(grid.clone(), buf.as_slice()).unwrap();
        assert_eq!(g.values, f.values);
        let h = SampledField::from_json(grid.clone(), &f.to_json().unwrap()).unwrap();
        assert_eq!(h.values, f.values);
        let wrong = Grid2D::new(0.2, 0.9, 10).unwrap();
        assert!(SampledField::read_csv(wrong, buf.as_slice()).is_err());
    }

    fn field(grid: Arc<Grid2D>, seed: Vec<f64>) -> SampledField {
        let vals = seed
            .chunks(4)
            .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
            .collect();
        SampledField::from_values(grid, vals).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn inner_product_hermitian(a in prop::collection::vec(-1.0f64..1.0, 256),
                                   b in prop::collection::vec(-1.0f64..1.0, 256)) {
            let grid = Grid2D::new(0.3, 0.8, 8).unwrap();
            let f = field(grid.clone(), a);
            let g = field(grid, b);
            let fg = inner_product(&f, &g).unwrap();
            let gf = inner_product(&g, &f).unwrap();
            prop_assert!(fg.dist(gf.conj()) < 1e-12);
            let ff = inner_product(&f, &f).unwrap();
            prop_assert!(ff.w >= 0.0);
            prop_assert!(ff.im().norm() <= 1e-14 * ff.w.max(1.0));
        }

        #[test]
        fn rule_total_mass(chi in 0.0f64..3.0, half in 1usize..40) {
            let r = build_rule(chi, 2 * half).unwrap();
            let total: f64 = r.weights.iter().sum();
            prop_assert!((total / gamma(chi + 1.0) - 1.0).abs() < 1e-12);
        }
    }
}
