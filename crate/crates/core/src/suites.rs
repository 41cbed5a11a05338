//! Named verification suites, each producing one or more [`Report`]s.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::hermite2d;
use crate::error::{Error, Result};
use crate::frqdt::{
    bochner_check, compose_check, frqdt_spectral, gaussian_closed_form_2d, is_trivial, synthesize,
    analyze, sup_bound_check, FrqdtPlan, RadialProfile, SpectralCoeffs, TransformSpec,
    DEFAULT_TRUNCATION,
};
use crate::quadrature::{norm2, Grid2D, SampledField, DEFAULT_RULE_SIZE};
use crate::quat::{axis_exp, Quaternion};
use crate::report::Report;
use crate::uncertainty::{
    diagonal_coeffs, diagonal_p1, frqft_corollary_check, moment_report, sharp_constant,
    MEASURE_CAVEAT, RATIO_TOLERANCE,
};

/// Band of the random test functions.
pub const RANDOM_BAND: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Plancherel,
    Inversion,
    Composition,
    Bochner,
    Eigen,
    Gaussian,
    Heisenberg,
    HigherOrder,
    Frqft,
    Bounds,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Plancherel,
        Suite::Inversion,
        Suite::Composition,
        Suite::Bochner,
        Suite::Eigen,
        Suite::Gaussian,
        Suite::Heisenberg,
        Suite::HigherOrder,
        Suite::Frqft,
        Suite::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Plancherel => "plancherel",
            Suite::Inversion => "inversion",
            Suite::Composition => "composition",
            Suite::Bochner => "bochner",
            Suite::Eigen => "eigen",
            Suite::Gaussian => "gaussian",
            Suite::Heisenberg => "heisenberg",
            Suite::HigherOrder => "higher_order",
            Suite::Frqft => "frqft",
            Suite::Bounds => "bounds",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub spec: TransformSpec,
    /// Gauss rule size per coordinate.
    pub n: usize,
    pub nmax: usize,
    pub mmax: usize,
    /// Gaussian exponent for the closed-form and Bochner suites.
    pub alpha: f64,
    /// Second angle pair of the composition suite.
    pub beta: (f64, f64),
    pub seed: u64,
    pub samples: usize,
    pub moment_samples: usize,
    /// Replaces every suite's default tolerance.
    pub tolerance: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            spec: TransformSpec::new(0.5, 1.0, 1.0, 0.7),
            n: DEFAULT_RULE_SIZE,
            nmax: DEFAULT_TRUNCATION,
            mmax: DEFAULT_TRUNCATION,
            alpha: 0.8,
            beta: (FRAC_PI_4, FRAC_PI_6),
            seed: 0,
            samples: 20,
            moment_samples: 50,
            tolerance: None,
        }
    }
}

impl SuiteConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    fn grid(&self) -> Result<Arc<Grid2D>> {
        Grid2D::new(self.spec.chi1, self.spec.chi2, self.n)
    }

    fn annotate(&self, r: Report) -> Report {
        self.spec
            .params(r)
            .with("n", self.n)
            .with("seed", self.seed)
    }
}

/// Seeded band-limited fields with uniform coefficient components in `[-1, 1]`.
pub fn random_fields(grid: &Arc<Grid2D>, count: usize, seed: u64) -> Vec<SampledField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| synthesize(&SpectralCoeffs::random(RANDOM_BAND, RANDOM_BAND, &mut rng), grid))
        .collect()
}

/// `C e^{-|x|^2/2}`.
pub fn gaussian_field(grid: &Arc<Grid2D>, c: Quaternion, alpha: f64) -> SampledField {
    SampledField::from_fn(grid.clone(), |x1, x2| c * (-alpha * (x1 * x1 + x2 * x2)).exp())
}

fn relative(a: &SampledField, b: &SampledField) -> Result<f64> {
    let nb = norm2(b);
    let d = norm2(&a.sub(b)?);
    Ok(if nb > 0.0 { d / nb } else { d })
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Report>> {
    match suite {
        Suite::Plancherel => plancherel(cfg),
        Suite::Inversion => inversion(cfg),
        Suite::Composition => composition(cfg),
        Suite::Bochner => bochner(cfg),
        Suite::Eigen => eigen(cfg),
        Suite::Gaussian => gaussian(cfg),
        Suite::Heisenberg => heisenberg(cfg),
        Suite::HigherOrder => higher_order(cfg),
        Suite::Frqft => frqft(cfg),
        Suite::Bounds => bounds(cfg),
    }
}

fn plancherel(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let plan = FrqdtPlan::quadrature(&cfg.spec, &grid)?;
    let mut worst = 0.0f64;
    for f in random_fields(&grid, cfg.samples, cfg.seed) {
        let nf = norm2(&f);
        let ng = norm2(&plan.apply(&f)?);
        worst = worst.max((ng - nf).abs() / nf);
    }
    Ok(vec![cfg
        .annotate(Report::residual("plancherel", worst, cfg.tol(1e-7)))
        .with("samples", cfg.samples)])
}

fn inversion(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let forward = FrqdtPlan::quadrature(&cfg.spec, &grid)?;
    let backward = FrqdtPlan::quadrature(&cfg.spec.inverse(), &grid)?;
    let mut worst = 0.0f64;
    let mut fields = random_fields(&grid, cfg.samples, cfg.seed);
    fields.push(gaussian_field(&grid, Quaternion::ONE, 0.5));
    for f in &fields {
        let back = backward.apply(&forward.apply(f)?)?;
        worst = worst.max(relative(&back, f)?);
    }
    let mut r = cfg
        .annotate(Report::residual("inversion", worst, cfg.tol(1e-7)))
        .with("samples", fields.len());
    if is_trivial(&cfg.spec) {
        r = r.with_note("both angles are multiples of pi: identity or reflection");
    }
    Ok(vec![r])
}

fn composition(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let f = gaussian_field(&grid, Quaternion::new(1.0, 0.5, -0.5, 0.25), 0.5)
        .add(&random_fields(&grid, 1, cfg.seed)[0])?;
    let second = cfg.spec.with_angles(cfg.beta.0, cfg.beta.1);
    let r = compose_check(&f, &cfg.spec, &second, cfg.tol(1e-6))?;
    Ok(vec![r.with("n", cfg.n).with("seed", cfg.seed)])
}

fn bochner(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let psi = RadialProfile::gaussian(cfg.alpha);
    let q = Quaternion::new(1.0, 0.0, 0.0, 1.0);
    [(0, 0), (1, 0), (0, 1), (1, 1)]
        .into_iter()
        .map(|deg| {
            bochner_check(deg, &psi, &psi, q, &cfg.spec, &grid, cfg.tol(1e-6))
                .map(|r| r.with("alpha", cfg.alpha).with("n", cfg.n))
        })
        .collect()
}

fn eigen(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let spec = &cfg.spec;
    let plan = FrqdtPlan::quadrature(spec, &grid)?;
    let (mut quad, mut spectral) = (0.0f64, 0.0f64);
    for n in 0..=RANDOM_BAND {
        for m in 0..=RANDOM_BAND {
            let h = hermite2d(n, m, &grid);
            let l = axis_exp(spec.a, n as f64 * spec.theta1);
            let r = axis_exp(spec.b, m as f64 * spec.theta2);
            let want = h.map(|q| l * q * r);
            quad = quad.max(norm2(&plan.apply(&h)?.sub(&want)?));
            let via = synthesize(&frqdt_spectral(&analyze(&h, cfg.nmax, cfg.mmax)?, spec), &grid);
            spectral = spectral.max(norm2(&via.sub(&want)?));
        }
    }
    let tol = cfg.tol(1e-7);
    Ok(vec![
        cfg.annotate(Report::residual("eigen_quadrature", quad, tol)),
        cfg.annotate(Report::residual("eigen_spectral", spectral, tol)),
    ])
}

fn gaussian(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let f = gaussian_field(&grid, Quaternion::ONE, cfg.alpha);
    let closed = gaussian_closed_form_2d(cfg.alpha, &cfg.spec, &grid)?;
    let quad = FrqdtPlan::quadrature(&cfg.spec, &grid)?.apply(&f)?;
    let err = closed
        .values
        .iter()
        .zip(&quad.values)
        .map(|(p, q)| p.dist(*q))
        .fold(0.0, f64::max);
    let tol = cfg.tol(1e-7);
    let mut out = vec![cfg
        .annotate(Report::residual("gaussian_closed_form", err, tol))
        .with("alpha", cfg.alpha)];
    if cfg.alpha == 0.5 {
        let fixed = quad
            .values
            .iter()
            .zip(&f.values)
            .map(|(p, q)| p.dist(*q))
            .fold(0.0, f64::max);
        out.push(cfg.annotate(Report::residual("gaussian_fixed_point", fixed, tol)));
    }
    Ok(out)
}

/// Unit quaternions from the seeded stream.
fn unit_quaternions(count: usize, seed: u64) -> Vec<Quaternion> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let q = Quaternion::new(
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            );
            let n = q.norm();
            if n > 0.1 && n <= 1.0 {
                break q / n;
            }
        })
        .collect()
}

/// Smallest ratio over the seeded random set for moment order `p`.
fn random_ratio(cfg: &SuiteConfig, plan: &FrqdtPlan, p: f64, constant: f64) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for f in random_fields(&plan.grid, cfg.moment_samples, cfg.seed) {
        worst = worst.min(moment_report(&f, plan, p, constant, RATIO_TOLERANCE)?.ratio);
    }
    Ok(worst)
}

fn heisenberg(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let plan = FrqdtPlan::quadrature(&cfg.spec, &grid)?;
    let constant = sharp_constant(1.0, cfg.spec.chi1, cfg.spec.chi2)?;
    let tol = cfg.tol(RATIO_TOLERANCE);
    let mut worst_dev = 0.0f64;
    let mut worst_ratio = 1.0;
    for c in unit_quaternions(5, cfg.seed) {
        let r = moment_report(&gaussian_field(&grid, c, 0.5), &plan, 1.0, constant, tol)?;
        if (r.ratio - 1.0).abs() >= worst_dev {
            worst_dev = (r.ratio - 1.0).abs();
            worst_ratio = r.ratio;
        }
    }
    let equality = cfg
        .annotate(Report::residual("heisenberg_gaussian_equality", worst_dev, tol))
        .with("ratio", worst_ratio)
        .with("sharp_constant", constant);
    let min_ratio = random_ratio(cfg, &plan, 1.0, constant)?;
    let random = cfg
        .annotate(Report::ratio("heisenberg_random", min_ratio, tol))
        .with("samples", cfg.moment_samples)
        .with("sharp_constant", constant);
    Ok(vec![equality, random])
}

fn higher_order(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let plan = FrqdtPlan::quadrature(&cfg.spec, &grid)?;
    let (c1, c2) = (cfg.spec.chi1, cfg.spec.chi2);
    let tol = cfg.tol(RATIO_TOLERANCE);
    let mut out = Vec::new();
    for p in [1.5, 2.0] {
        let d = diagonal_coeffs(p, c1, c2, cfg.nmax, cfg.mmax)?;
        let min_ratio = random_ratio(cfg, &plan, p, d.amin * d.amin)?;
        out.push(
            cfg.annotate(Report::ratio("higher_order_random", min_ratio, tol))
                .with("p", p)
                .with("amin", d.amin)
                .with("argmin", vec![d.argmin.0, d.argmin.1])
                .with("samples", cfg.moment_samples),
        );
    }
    // p = 1 table against 2(n+m) + 2(chi1+chi2) + 2
    let d = diagonal_coeffs(1.0, c1, c2, cfg.nmax, cfg.mmax)?;
    let (mut stated, mut closed) = (0.0f64, 0.0f64);
    for (n, row) in d.table.iter().enumerate() {
        for (m, &v) in row.iter().enumerate() {
            let target = 2.0 * (n + m) as f64 + 2.0 * (c1 + c2) + 2.0;
            stated = stated.max((v - target).abs());
            closed = closed.max((v - diagonal_p1(n, m, c1, c2)).abs());
        }
    }
    out.push(
        cfg.annotate(Report::residual("higher_order_p1_table", stated, cfg.tol(1e-10)))
            .with("deviation_from_n_plus_m_plus_chi_plus_2", closed)
            .with_note("table compared with 2(n+m)+2(chi1+chi2)+2; the computed diagonal is n+m+chi1+chi2+2"),
    );
    Ok(out)
}

fn frqft(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = Grid2D::new(0.0, 0.0, cfg.n)?;
    let f = gaussian_field(&grid, Quaternion::ONE, 0.5);
    let r = frqft_corollary_check(&f, cfg.spec.theta1, cfg.spec.theta2)?;
    let tol = cfg.tol(RATIO_TOLERANCE);
    let dev = (r.ratio - 1.0).abs();
    Ok(vec![Report::residual("frqft_gaussian", dev, tol)
        .with("theta1", cfg.spec.theta1)
        .with("theta2", cfg.spec.theta2)
        .with("ratio", r.ratio)
        .with("sharp_constant", r.sharp_constant)
        .with("n", cfg.n)
        .with_pass(dev <= tol && r.sharp_constant == 4.0)
        .with_note(MEASURE_CAVEAT)])
}

fn bounds(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let grid = cfg.grid()?;
    let mut fields = vec![gaussian_field(&grid, Quaternion::ONE, 0.5)];
    fields.extend(random_fields(&grid, cfg.samples, cfg.seed));
    let mut worst = 0.0f64;
    let mut pass = true;
    for f in &fields {
        let r = sup_bound_check(f, &cfg.spec)?;
        pass &= r.pass;
        worst = worst.max(r.residual.unwrap_or(0.0));
    }
    Ok(vec![cfg
        .annotate(Report::residual("bounds", worst, 1.0))
        .with("samples", fields.len())
        .with_pass(pass)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fast_suites_pass_with_defaults() {
        let cfg = SuiteConfig {
            samples: 3,
            moment_samples: 3,
            ..SuiteConfig::default()
        };
        for s in [Suite::Plancherel, Suite::Inversion, Suite::Eigen, Suite::Bounds, Suite::Frqft] {
            for r in run_suite(s, &cfg).unwrap() {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn trivial_inversion() {
        let cfg = SuiteConfig {
            spec: TransformSpec::new(0.5, 1.0, 0.0, 0.0),
            samples: 2,
            ..SuiteConfig::default()
        };
        let r = &run_suite(Suite::Inversion, &cfg).unwrap()[0];
        assert!(r.pass && r.residual == Some(0.0));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = SuiteConfig {
            samples: 2,
            ..SuiteConfig::default()
        };
        let a = serde_json::to_string(&run_suite(Suite::Plancherel, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::Plancherel, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
