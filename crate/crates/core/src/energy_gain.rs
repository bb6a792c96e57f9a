//! Anomalous energy-gain rate of free particles under energy-density
//! collapse.
//!
//! The master equation transfers momentum-space population between nearby
//! modes, and because the transfer weight is symmetric while phase space is
//! not, the mean energy of every free particle grows. The growth is governed
//! by the kernel
//!
//!   f(k1) = int d^3 k2  w1 w2 (w2 - w1) e^{-(k2-k1)^2 a^2},
//!
//! with w = sqrt(k^2 + M^2), which has simple closed forms at small and
//! large k1 a. The resulting mean-energy growth is exponential with the
//! tiny rate lambda (lambdabar_N / a)^2.

use crate::error::{Error, Result};
use crate::quadrature::{self, GaussianWeight3D};
use crate::units::{omega, CollapseParams, HBAR_C_J_CM};

/// Which expression produced an energy-gain rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FRegime {
    /// Full quadrature of the kernel.
    Exact,
    /// Massless, k1 a << 1 closed form.
    LowKaPhoton,
    /// k1 a >> 1 closed form.
    HighKa,
    /// Nonrelativistic massive-particle rate.
    NonRel,
}

impl std::fmt::Display for FRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FRegime::Exact => "exact",
            FRegime::LowKaPhoton => "low_ka",
            FRegime::HighKa => "high_ka",
            FRegime::NonRel => "nonrel",
        })
    }
}

impl std::str::FromStr for FRegime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(FRegime::Exact),
            "low_ka" => Ok(FRegime::LowKaPhoton),
            "high_ka" => Ok(FRegime::HighKa),
            "nonrel" => Ok(FRegime::NonRel),
            other => Err(Error::Domain(format!(
                "unknown energy-gain regime {other:?}; expected exact, low_ka, high_ka, or nonrel"
            ))),
        }
    }
}

/// Per-particle energy-gain rate with the inputs that produced it.
///
/// The relativistic rates apply to free particles only; interactions are
/// outside this model's scope.
#[derive(Debug, Clone, Copy)]
pub struct EnergyGainResult {
    /// dE/dt as a wavenumber rate, cm^-1 / s.
    pub rate_cm_inv_per_s: f64,
    /// The same rate converted to J/s.
    pub rate_j_per_s: f64,
    pub regime: FRegime,
    /// Input momentum (cm^-1).
    pub k1: f64,
    /// Input mass as a wavenumber (cm^-1); 0 for photons.
    pub mass: f64,
    /// Smearing length a (cm).
    pub a: f64,
}

/// The exact kernel f(k1) by 2-D reduced quadrature.
///
/// The difference w2 - w1 is evaluated as (k2^2 - k1^2)/(w1 + w2) to avoid
/// catastrophic cancellation where the Gaussian confines k2 near k1.
pub fn f_exact(k1: f64, mass: f64, a: f64, tol: f64) -> Result<f64> {
    if !(k1 >= 0.0) || !k1.is_finite() {
        return Err(Error::Domain(format!("k1 must be >= 0, got {k1}")));
    }
    if !(mass >= 0.0) || !mass.is_finite() {
        return Err(Error::Domain(format!("mass must be >= 0, got {mass}")));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!("a must be > 0, got {a}")));
    }
    let w1 = omega(k1, mass)?;
    let weight = GaussianWeight3D::on_axis(k1, a)?;
    let r = quadrature::integrate_gaussian_3d(
        |k2v| {
            let k2sq = quadrature::norm2(k2v);
            let w2 = (k2sq + mass * mass).sqrt();
            w1 * w2 * (k2sq - k1 * k1) / (w1 + w2)
        },
        &weight,
        tol,
    )?;
    Ok(r.value)
}

/// Massless low-k1a closed form: k1 (pi/a^2)^{3/2} 3/(2 a^2).
pub fn f_low_ka_photon(k1: f64, a: f64) -> f64 {
    let pi = std::f64::consts::PI;
    k1 * (pi / (a * a)).powf(1.5) * 1.5 / (a * a)
}

/// High-k1a closed form: w1 pi^{3/2} a^-5 [3/4 + k1^2/(4 w1^2)].
pub fn f_high_ka(k1: f64, mass: f64, a: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let w1 = k1.hypot(mass);
    if w1 == 0.0 {
        return 0.0;
    }
    w1 * pi.powf(1.5) / a.powi(5) * (0.75 + k1 * k1 / (4.0 * w1 * w1))
}

/// Per-particle dE/dt = (lambda/M_N^2)(a^2/pi)^{3/2} f(k1) in the requested
/// regime.
pub fn growth_rate_per_particle(
    k1: f64,
    mass: f64,
    params: &CollapseParams,
    regime: FRegime,
    tol: f64,
) -> Result<EnergyGainResult> {
    let a = params.a;
    let f = match regime {
        FRegime::Exact => f_exact(k1, mass, a, tol)?,
        FRegime::LowKaPhoton => {
            if mass != 0.0 {
                return Err(Error::Domain(
                    "low_ka closed form applies to massless particles only".into(),
                ));
            }
            f_low_ka_photon(k1, a)
        }
        FRegime::HighKa => f_high_ka(k1, mass, a),
        FRegime::NonRel => {
            return Err(Error::Domain(
                "use dHdt_nonrel for the nonrelativistic rate".into(),
            ))
        }
    };
    let pi = std::f64::consts::PI;
    let m_n = params.mass_ref();
    let rate = params.lambda_rate / (m_n * m_n) * (a * a / pi).powf(1.5) * f;
    Ok(EnergyGainResult {
        rate_cm_inv_per_s: rate,
        rate_j_per_s: rate * HBAR_C_J_CM,
        regime,
        k1,
        mass,
        a,
    })
}

/// Mean-energy growth rate dH/dt for an ensemble with mean energy `h_bar_mean`
/// (as a wavenumber, cm^-1): (3/2) lambda (lambdabar_N/a)^2 H for the low
/// regime, lambda (lambdabar_N/a)^2 H for the high regime.
pub fn mean_energy_growth(
    h_bar_mean: f64,
    regime: FRegime,
    params: &CollapseParams,
) -> Result<f64> {
    if !(h_bar_mean >= 0.0) {
        return Err(Error::Domain(format!(
            "mean energy must be >= 0, got {h_bar_mean}"
        )));
    }
    let coeff = match regime {
        FRegime::LowKaPhoton => 1.5,
        FRegime::HighKa => 1.0,
        other => {
            return Err(Error::Domain(format!(
                "mean_energy_growth needs low_ka or high_ka, got {other}"
            )))
        }
    };
    let lb = params.constants.lambdabar_n_cm;
    Ok(coeff * params.lambda_rate * (lb / params.a).powi(2) * h_bar_mean)
}

/// Nonrelativistic rate of energy increase for N particles of mass M:
/// lambda * 3/(4 M a^2) * (M/M_N)^2 * N  (wavenumber rate, cm^-1/s).
pub fn dhdt_nonrel(n_particles: f64, mass: f64, params: &CollapseParams) -> Result<f64> {
    if !(n_particles >= 0.0) {
        return Err(Error::Domain(format!(
            "particle count must be >= 0, got {n_particles}"
        )));
    }
    if !(mass > 0.0) {
        return Err(Error::Domain(
            "nonrelativistic rate needs M > 0; photons use the massless paths".into(),
        ));
    }
    let m_n = params.mass_ref();
    let a2 = params.a * params.a;
    Ok(params.lambda_rate * 3.0 / (4.0 * mass * a2) * (mass / m_n).powi(2) * n_particles)
}
