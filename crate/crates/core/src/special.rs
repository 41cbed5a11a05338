//! Gamma wrappers, generalized Laguerre polynomials and normalized Bessel functions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `1 / (2^{chi+1} Gamma(chi+1))`.
pub fn alpha_chi(chi: f64) -> f64 {
    (-(chi + 1.0) * std::f64::consts::LN_2 - ln_gamma(chi + 1.0)).exp()
}

/// `L_n^{(a)}(z)` by the forward three-term recurrence.
pub fn laguerre(n: usize, a: f64, z: f64) -> Result<f64> {
    if !(a > -1.0) {
        return Err(Error::InvalidParam(format!(
            "Laguerre parameter a = {a} must exceed -1"
        )));
    }
    Ok(laguerre_unchecked(n, a, z))
}

pub(crate) fn laguerre_unchecked(n: usize, a: f64, z: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - z) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

const SERIES_LIMIT: f64 = 5.0;

/// Normalized Bessel function `j_nu(x) = Gamma(nu+1) (2/x)^nu J_nu(x)`; `j_nu(0) = 1`.
pub fn bessel_j_chi(chi: f64, x: f64) -> f64 {
    bessel_pair(chi, x).0
}

/// Returns `(j_nu(x), x/(2nu+2) j_{nu+1}(x))`, the even and odd parts of the
/// rank-one Dunkl kernel `E_nu(x, i)`.
///
/// Even part is even in `x`, odd part is odd. Requires `nu > -1`.
pub fn bessel_pair(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(nu > -1.0, "bessel order {nu} must exceed -1");
    let z = x.abs();
    let (even, odd) = if z <= SERIES_LIMIT {
        pair_series(nu, z)
    } else if z > asymptotic_threshold(nu) {
        pair_asymptotic(nu, z)
    } else {
        pair_miller(nu, z)
    };
    if x < 0.0 {
        (even, -odd)
    } else {
        (even, odd)
    }
}

fn asymptotic_threshold(nu: f64) -> f64 {
    (2.0 * nu * nu + 20.0).max(30.0)
}

fn pair_series(nu: f64, z: f64) -> (f64, f64) {
    let q = -0.25 * z * z;
    let mut even = 0.0;
    let mut term = 1.0f64;
    let mut odd = 0.0;
    let mut oterm = 0.5 * z / (nu + 1.0);
    for n in 0..200 {
        let nf = n as f64;
        even += term;
        odd += oterm;
        term *= q / ((nf + 1.0) * (nf + nu + 1.0));
        oterm *= q / ((nf + 1.0) * (nf + nu + 2.0));
        if term.abs() < 1e-18 * even.abs().max(1e-300) && oterm.abs() < 1e-18 * odd.abs().max(1e-300)
        {
            break;
        }
    }
    (even, odd)
}

/// Backward recurrence normalized by `(z/2)^nu = sum_k (nu+2k) Gamma(nu+k)/k! J_{nu+2k}(z)`.
fn pair_miller(nu: f64, z: f64) -> (f64, f64) {
    let start = (z + 30.0 + 4.0 * z.sqrt()).ceil() as usize;
    // f[k] ~ J_{nu+k}(z) up to a common factor
    let mut f = vec![0.0f64; start + 2];
    f[start + 1] = 0.0;
    f[start] = 1e-300;
    for k in (1..=start).rev() {
        let mu = nu + k as f64;
        f[k - 1] = 2.0 * mu / z * f[k] - f[k + 1];
        if f[k - 1].abs() > 1e250 {
            for v in f[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    // g_k = (nu+2k) Gamma(nu+k) / (k! Gamma(nu+1)), g_0 = 1
    let mut sum = f[0];
    let mut p = 1.0;
    let mut k = 1;
    while 2 * k <= start {
        let kf = k as f64;
        if k > 1 {
            p *= (nu + kf - 1.0) / kf;
        }
        sum += (nu + 2.0 * kf) * p * f[2 * k];
        k += 1;
    }
    (f[0] / sum, f[1] / sum)
}

/// Hankel expansion; returns `(J_nu(z), J_{nu+1}(z))` rescaled to the normalized pair.
fn pair_asymptotic(nu: f64, z: f64) -> (f64, f64) {
    let jn = bessel_j_asymptotic(nu, z);
    let jn1 = bessel_j_asymptotic(nu + 1.0, z);
    let scale = (ln_gamma(nu + 1.0) + nu * (2.0 / z).ln()).exp();
    (scale * jn, scale * jn1)
}

fn bessel_j_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 0..200 {
        let kf = k as f64;
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if mag < 1e-17 * p.abs().max(q.abs()).max(1e-300) && k > 2 {
            break;
        }
        let odd = 2.0 * kf + 1.0;
        term *= (mu - odd * odd) / ((kf + 1.0) * 8.0 * z);
    }
    let omega = z - nu * FRAC_PI_2 - FRAC_PI_4;
    (2.0 / (PI * z)).sqrt() * (p * omega.cos() - q * omega.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 0.4, 3.0).unwrap(), 1.0);
        assert_relative_eq!(laguerre(1, 0.7, 2.3).unwrap(), 1.0 + 0.7 - 2.3);
        assert!(laguerre(2, -1.0, 1.0).is_err());
    }

    fn laguerre_series(n: usize, a: f64, z: f64) -> f64 {
        // sum_k (-1)^k binom(n+a, n-k) z^k / k!
        (0..=n)
            .map(|k| {
                let binom: f64 = (1..=n - k).map(|i| (k as f64 + a + i as f64) / i as f64).product();
                let fact: f64 = (1..=k).map(|i| i as f64).product();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * binom * z.powi(k as i32) / fact
            })
            .sum()
    }

    #[test]
    fn laguerre_matches_series() {
        let v = laguerre(5, 0.7, 2.3).unwrap();
        assert_relative_eq!(v, laguerre_series(5, 0.7, 2.3), max_relative = 1e-13);
        // frozen from a 50-digit evaluation
        assert_relative_eq!(v, 0.787_135_333_333_333_3, max_relative = 1e-12);
    }

    #[test]
    fn bessel_at_origin() {
        assert_eq!(bessel_pair(0.8, 0.0), (1.0, 0.0));
    }

    #[test]
    fn bessel_minus_half_is_cosine() {
        for &x in &[0.3, 3.0, std::f64::consts::PI, 17.0, 55.0] {
            let (e, o) = bessel_pair(-0.5, x);
            assert_relative_eq!(e, x.cos(), epsilon = 1e-13);
            assert_relative_eq!(o, x.sin(), epsilon = 1e-13);
        }
    }

    #[test]
    fn bessel_half_is_sinc() {
        for &x in &[0.1, 4.9, 5.1, 12.0, 31.0, 80.0] {
            let (e, _) = bessel_pair(0.5, x);
            assert_relative_eq!(e, x.sin() / x, epsilon = 1e-14);
        }
    }

    #[test]
    fn bessel_frozen_values() {
        // (nu, x, j_nu(x), x/(2nu+2) j_{nu+1}(x)) frozen from 50-digit series sums
        let table: &[(f64, f64, f64, f64)] = &[
            (0.8, 3.7, -0.032_778_101_114_779_293, 0.220_756_544_352_947_6),
            (0.0, 7.25, 0.291_996_924_191_779, 0.068_581_700_653_131_745),
            (1.3, 22.0, 0.008_243_823_661_559_88, 0.003_733_213_835_482_449),
            (2.5, 48.0, 0.000_109_492_099_466_990_37, -0.000_073_248_847_335_382_5),
            (0.3, 250.0, -0.009_029_941_984_246_84, -0.005_655_352_654_982_995),
        ];
        for &(nu, x, e, o) in table {
            let (ce, co) = bessel_pair(nu, x);
            assert!((ce - e).abs() < 1e-14, "nu={nu} x={x}: {ce} vs {e}");
            assert!((co - o).abs() < 1e-14, "nu={nu} x={x}: {co} vs {o}");
        }
    }

    proptest! {
        #[test]
        fn branches_agree_at_switchpoints(nu in 0.0f64..4.0) {
            for z0 in [SERIES_LIMIT, asymptotic_threshold(nu)] {
                let below = if z0 == SERIES_LIMIT { pair_series(nu, z0) } else { pair_miller(nu, z0) };
                let above = if z0 == SERIES_LIMIT { pair_miller(nu, z0) } else { pair_asymptotic(nu, z0) };
                prop_assert!((below.0 - above.0).abs() < 1e-13);
                prop_assert!((below.1 - above.1).abs() < 1e-13);
            }
        }

        #[test]
        fn kernel_modulus_bounded(nu in 0.0f64..4.0, x in -400.0f64..400.0) {
            let (e, o) = bessel_pair(nu, x);
            prop_assert!(e.hypot(o) <= 1.0 + 1e-13);
        }

        #[test]
        fn parity(nu in 0.0f64..4.0, x in 0.0f64..100.0) {
            let (e1, o1) = bessel_pair(nu, x);
            let (e2, o2) = bessel_pair(nu, -x);
            prop_assert_eq!(e1, e2);
            prop_assert_eq!(o1, -o2);
        }
    }
}
