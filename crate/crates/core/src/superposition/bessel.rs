//! Modified Bessel functions of the second kind, K0 and K1, implemented
//! in-module so the commutator-kernel numerics are self-contained and
//! testable to 1e-10 relative.
//!
//! For x <= 2 the classical ascending series are used:
//!
//!   K0(x) = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k H_k / (k!)^2,
//!   K1(x) = I0(x)/x + (ln(x/2) + gamma) I1(x)
//!             - sum_{k>=1} H_k k (x/2) (x^2/4)^{k-1} / (k!)^2,
//!
//! with H_k the harmonic numbers (the K1 series is minus the derivative of
//! the K0 series). For x > 2 the Steed continued fraction with Temme
//! normalization evaluates K0 and K1 together at full double precision.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn check(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel K argument must be finite and > 0, got {x}"
        )));
    }
    Ok(x)
}

/// Both K0(x) and K1(x).
pub fn bessel_k0_k1(x: f64) -> Result<(f64, f64)> {
    let x = check(x)?;
    if x <= 2.0 {
        Ok(series_small(x))
    } else {
        Ok(continued_fraction(x))
    }
}

pub fn bessel_k0(x: f64) -> Result<f64> {
    Ok(bessel_k0_k1(x)?.0)
}

pub fn bessel_k1(x: f64) -> Result<f64> {
    Ok(bessel_k0_k1(x)?.1)
}

fn series_small(x: f64) -> (f64, f64) {
    let t = x * x / 4.0;
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    // I0, I1, and the two logarithm-free sums, accumulated together
    let mut i0 = 1.0;
    let mut i1 = x / 2.0;
    let mut s0 = 0.0; // sum H_k t^k/(k!)^2
    let mut s1 = 0.0; // sum H_k k (x/2) t^{k-1}/(k!)^2
    let mut term0 = 1.0; // t^k/(k!)^2
    let mut term1 = x / 2.0; // (x/2) t^k/(k!(k+1)!)
    let mut tkm1 = x / 2.0; // k (x/2) t^{k-1}/(k!)^2
    let mut h = 0.0;
    for k in 1..64 {
        let kf = k as f64;
        term0 *= t / (kf * kf);
        // u_k = k (x/2) t^{k-1}/(k!)^2; u_k/u_{k-1} = t/(k(k-1))
        tkm1 *= if k == 1 { 1.0 } else { t / (kf * (kf - 1.0)) };
        h += 1.0 / kf;
        i0 += term0;
        s0 += term0 * h;
        s1 += tkm1 * h;
        term1 *= t / (kf * (kf + 1.0));
        i1 += term1;
        if term0 < 1e-18 * i0 && tkm1 < 1e-18 * (s1.abs() + 1.0) {
            break;
        }
    }
    let k0 = -lg * i0 + s0;
    let k1 = i0 / x + lg * i1 - s1;
    (k0, k1)
}

/// Steed's continued fraction CF2 with Temme normalization at order nu = 0,
/// accurate to machine precision for x > 2.
fn continued_fraction(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;
    let nu = 0.0f64;
    let a1 = 0.25 - nu * nu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (nu + x + 0.5 - h) / x;
    (k0, k1)
}
