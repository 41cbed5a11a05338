//! Built-in test signals, written as `name(arg, ...)`.

use std::sync::Arc;

use qdunkl::basis::{hermite2d, hermite_h};
use qdunkl::error::{Error, Result};
use qdunkl::frqdt::TransformSpec;
use qdunkl::quadrature::{Grid2D, SampledField};
use qdunkl::quat::Quaternion;
use qdunkl::special::laguerre;

fn call(text: &str) -> Result<(String, Vec<f64>)> {
    let t = text.trim();
    let (name, rest) = t
        .split_once('(')
        .ok_or_else(|| Error::Parse(format!("signal '{text}' must look like name(args)")))?;
    let body = rest
        .strip_suffix(')')
        .ok_or_else(|| Error::Parse(format!("signal '{text}' is missing ')'")))?;
    let args = body
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("signal '{text}': {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((name.trim().to_ascii_lowercase(), args))
}

fn arity(name: &str, args: &[f64], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(Error::Parse(format!(
            "{name} takes {n} argument(s), got {}",
            args.len()
        )));
    }
    Ok(())
}

fn index(v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e6 {
        Ok(v as usize)
    } else {
        Err(Error::Parse(format!("{v} is not a non-negative integer index")))
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParam(format!("{name} needs alpha > 0, got {v}")))
    }
}

/// 1-D signal on the given nodes: `gaussian(alpha)` or `hermite(n)`.
pub fn signal_1d(text: &str, chi: f64, nodes: &[f64]) -> Result<Vec<Quaternion>> {
    let (name, args) = call(text)?;
    match name.as_str() {
        "gaussian" => {
            arity(&name, &args, 1)?;
            let alpha = positive(&name, args[0])?;
            Ok(nodes
                .iter()
                .map(|&x| Quaternion::real((-alpha * x * x).exp()))
                .collect())
        }
        "hermite" => {
            arity(&name, &args, 1)?;
            let n = index(args[0])?;
            nodes
                .iter()
                .map(|&x| hermite_h(n, chi, x).map(Quaternion::real))
                .collect()
        }
        _ => Err(Error::Parse(format!("unknown 1-D signal '{name}'"))),
    }
}

/// Radial profile on positive nodes: `gaussian(alpha)` or `laguerre(n)`.
pub fn radial(text: &str, nu: f64, nodes: &[f64], unweighted: bool) -> Result<Vec<f64>> {
    let (name, args) = call(text)?;
    let scale = |x: f64| if unweighted { x.powf(nu + 0.5) } else { 1.0 };
    match name.as_str() {
        "gaussian" => {
            arity(&name, &args, 1)?;
            let alpha = positive(&name, args[0])?;
            Ok(nodes
                .iter()
                .map(|&x| scale(x) * (-alpha * x * x).exp())
                .collect())
        }
        "laguerre" => {
            arity(&name, &args, 1)?;
            let n = index(args[0])?;
            nodes
                .iter()
                .map(|&x| Ok(scale(x) * (-0.5 * x * x).exp() * laguerre(n, nu, x * x)?))
                .collect()
        }
        _ => Err(Error::Parse(format!("unknown radial signal '{name}'"))),
    }
}

/// 2-D field: `gaussian(alpha)`, `hermite(n,m)`, `example_eigen(t1,r1,t2,r2)`.
pub fn field(text: &str, spec: &TransformSpec, grid: &Arc<Grid2D>) -> Result<SampledField> {
    let (name, args) = call(text)?;
    match name.as_str() {
        "gaussian" => {
            arity(&name, &args, 1)?;
            let alpha = positive(&name, args[0])?;
            Ok(SampledField::from_fn(grid.clone(), |x1, x2| {
                Quaternion::real((-alpha * (x1 * x1 + x2 * x2)).exp())
            }))
        }
        "hermite" => {
            arity(&name, &args, 2)?;
            Ok(hermite2d(index(args[0])?, index(args[1])?, grid))
        }
        "example_eigen" => {
            // (t1 + r1 a) |x1|^chi1 |x2|^chi2 e^{-|x|^2/2} (t2 + r2 b)
            arity(&name, &args, 4)?;
            let left = spec.a.element(args[0], args[1]);
            let right = spec.b.element(args[2], args[3]);
            let (c1, c2) = (grid.rule1.chi, grid.rule2.chi);
            Ok(SampledField::from_fn(grid.clone(), |x1, x2| {
                let r = x1.abs().powf(c1) * x2.abs().powf(c2) * (-0.5 * (x1 * x1 + x2 * x2)).exp();
                left * r * right
            }))
        }
        _ => Err(Error::Parse(format!("unknown 2-D signal '{name}'"))),
    }
}
