mod args;
mod signals;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use qdunkl::basis::frac_kernel;
use qdunkl::error::Error;
use qdunkl::frqdt::{frqdt_spectral_field, FrqdtPlan};
use qdunkl::quadrature::{build_rule, norm2, Grid2D, SampledField, DEFAULT_NODE_BUDGET};
use qdunkl::quat::Quaternion;
use qdunkl::report::Report;
use qdunkl::suites::{run_suite, Suite, SuiteConfig};
use qdunkl::transform1d::{
    frac_dunkl_spectral, frac_hankel, frac_hankel_unweighted, AxisOperator, AxisTransformSpec,
    Side,
};
use qdunkl::uncertainty::{heisenberg_check, MEASURE_CAVEAT};

use args::{
    Cli, Command, FormatArg, HankelArgs, KernelArgs, MomentsArgs, PathArg, SideArg,
    Transform1dArgs, Transform2dArgs, VerifyArgs,
};

/// Exit 2: the request itself was unusable.
const EXIT_CONFIG: u8 = 2;
/// Exit 1: everything ran but some check failed.
const EXIT_CHECK: u8 = 1;

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = match &cli.command {
        Command::Kernel(a) => kernel(a),
        Command::Transform1d(a) => transform1d(a),
        Command::Transform2d(a) => transform2d(a),
        Command::Hankel(a) => hankel(a),
        Command::Verify(a) => verify(a),
        Command::Moments(a) => moments(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(EXIT_CHECK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Error> {
    let mut out = sink(path)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Rows `coordinate,w,x,y,z`.
fn write_profile(
    path: Option<&Path>,
    header: &str,
    coords: &[f64],
    values: &[Quaternion],
) -> Result<(), Error> {
    let mut out = sink(path)?;
    writeln!(out, "{header},w,x,y,z")?;
    for (t, q) in coords.iter().zip(values) {
        writeln!(out, "{},{},{},{},{}", t, q.w, q.x, q.y, q.z)?;
    }
    out.flush()?;
    Ok(())
}

fn kernel(a: &KernelArgs) -> Result<Outcome, Error> {
    let eval = |x: f64, y: f64| frac_kernel(a.chi, a.theta, x, y, a.axis);
    if let Some(path) = &a.input {
        let reader = BufReader::new(File::open(path)?);
        let mut out = sink(a.output.as_deref())?;
        writeln!(out, "x,y,w,i,j,k")?;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected x,y", lineno + 1)));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let (x, y) = (num(parts[0])?, num(parts[1])?);
            let k = eval(x, y)?;
            writeln!(out, "{x},{y},{},{},{},{}", k.w, k.x, k.y, k.z)?;
        }
        out.flush()?;
        return Ok(Outcome::Pass);
    }
    let (Some(x), Some(y)) = (a.x, a.y) else {
        return Err(Error::InvalidParam(
            "kernel needs --x and --y, or --input".into(),
        ));
    };
    let k = eval(x, y)?;
    let body = serde_json::json!({
        "chi": a.chi,
        "theta": a.theta,
        "x": x,
        "y": y,
        "kernel": [k.w, k.x, k.y, k.z],
        "modulus": k.norm(),
    });
    write_text(a.output.as_deref(), &json(&body)?)?;
    Ok(Outcome::Pass)
}

fn transform1d(a: &Transform1dArgs) -> Result<Outcome, Error> {
    let rule = build_rule(a.chi, a.n)?;
    let f = signals::signal_1d(&a.signal, a.chi, &rule.nodes)?;
    let side = match a.side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    };
    let spec = AxisTransformSpec::new(a.chi, a.theta, a.axis, side);
    let out = match a.path {
        PathArg::Quadrature => {
            AxisOperator::dunkl_any(a.chi, a.theta, a.axis, &rule, &rule.nodes, DEFAULT_NODE_BUDGET)?
                .apply(&f, side)?
        }
        PathArg::Spectral => frac_dunkl_spectral(&f, &spec, &rule, &rule.nodes, a.nmax)?,
    };
    write_profile(a.output.as_deref(), "t", &rule.nodes, &out)?;
    Ok(Outcome::Pass)
}

fn hankel(a: &HankelArgs) -> Result<Outcome, Error> {
    let rule = build_rule(a.nu, a.n)?;
    let half = rule.half_line();
    let psi = signals::radial(&a.signal, a.nu, &half.nodes, a.unweighted)?;
    let out = if a.unweighted {
        frac_hankel_unweighted(&psi, a.nu, a.theta, a.axis, &rule, &half.nodes)?
    } else {
        frac_hankel(&psi, a.nu, a.theta, a.axis, &rule, &half.nodes)?
    };
    write_profile(a.output.as_deref(), "r", &half.nodes, &out)?;
    Ok(Outcome::Pass)
}

fn load_field(
    input: Option<&Path>,
    signal: Option<&str>,
    spec: &qdunkl::frqdt::TransformSpec,
    n: usize,
) -> Result<SampledField, Error> {
    let grid = Grid2D::new(spec.chi1, spec.chi2, n)?;
    match (input, signal) {
        (Some(path), _) => {
            let is_json = path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("json"));
            if is_json {
                let text = std::fs::read_to_string(path)?;
                SampledField::from_json(grid, &text)
            } else {
                SampledField::read_csv(grid, BufReader::new(File::open(path)?))
            }
        }
        (None, Some(sig)) => signals::field(sig, spec, &grid),
        (None, None) => Err(Error::InvalidParam(
            "give --input or --signal".into(),
        )),
    }
}

fn transform2d(a: &Transform2dArgs) -> Result<Outcome, Error> {
    let spec = a.spec.spec();
    let f = load_field(a.input.as_deref(), a.signal.as_deref(), &spec, a.spec.n)?;
    let quadrature = || FrqdtPlan::quadrature(&spec, &f.grid)?.apply(&f);
    let spectral = || frqdt_spectral_field(&f, &spec, a.nmax, a.mmax);
    let (out, other) = match (a.path, a.compare) {
        (PathArg::Quadrature, false) => (quadrature()?, None),
        (PathArg::Spectral, false) => (spectral()?, None),
        (PathArg::Quadrature, true) => (quadrature()?, Some(spectral()?)),
        (PathArg::Spectral, true) => (spectral()?, Some(quadrature()?)),
    };
    match a.format {
        FormatArg::Csv => {
            let mut w = sink(a.output.as_deref())?;
            out.write_csv(&mut w)?;
            w.flush()?;
        }
        FormatArg::Json => {
            let mut s = out.to_json()?;
            s.push('\n');
            write_text(a.output.as_deref(), &s)?;
        }
    }
    if let Some(other) = other {
        let nf = norm2(&f);
        let diff = norm2(&out.sub(&other)?);
        let residual = if nf > 0.0 { diff / nf } else { diff };
        let report = spec
            .params(Report::residual("path_agreement", residual, 1e-7))
            .with("n", a.spec.n)
            .with("nmax", a.nmax)
            .with("mmax", a.mmax);
        eprint!("{}", json(&report)?);
        if !report.pass {
            return Ok(Outcome::Fail);
        }
    }
    Ok(Outcome::Pass)
}

fn verify(a: &VerifyArgs) -> Result<Outcome, Error> {
    let suites: Vec<Suite> = if a.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        a.suite
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?
    };
    if let Some(t) = a.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParam(format!("tolerance {t} must be > 0")));
        }
    }
    let cfg = SuiteConfig {
        spec: a.spec.spec(),
        n: a.spec.n,
        nmax: a.nmax,
        mmax: a.mmax,
        alpha: a.alpha,
        beta: (a.beta1, a.beta2),
        seed: a.seed,
        samples: a.samples,
        moment_samples: a.moment_samples,
        tolerance: a.tolerance,
    };
    let mut reports = Vec::new();
    for suite in suites {
        reports.extend(run_suite(suite, &cfg)?);
    }
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {}", r.check);
    }
    if reports.iter().any(|r| r.note.as_deref() == Some(MEASURE_CAVEAT)) {
        eprintln!("note: {MEASURE_CAVEAT}");
    }
    write_text(a.output.as_deref(), &json(&reports)?)?;
    Ok(if reports.iter().all(|r| r.pass) {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn moments(a: &MomentsArgs) -> Result<Outcome, Error> {
    let spec = a.spec.spec();
    let f = load_field(a.input.as_deref(), Some(&a.signal), &spec, a.spec.n)?;
    let reports = a
        .p
        .iter()
        .map(|&p| heisenberg_check(&f, &spec, p))
        .collect::<Result<Vec<_>, _>>()?;
    if spec.chi1 == 0.0 && spec.chi2 == 0.0 {
        eprintln!("note: {MEASURE_CAVEAT}");
    }
    if a.csv {
        let mut out = sink(a.output.as_deref())?;
        writeln!(out, "p,chi1,chi2,theta1,theta2,ratio,pass")?;
        for r in &reports {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.p, spec.chi1, spec.chi2, spec.theta1, spec.theta2, r.ratio, r.pass
            )?;
        }
        out.flush()?;
    } else {
        write_text(a.output.as_deref(), &json(&reports)?)?;
    }
    Ok(if reports.iter().all(|r| r.pass) {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}
