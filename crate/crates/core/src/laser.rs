//! Photon loss and collapse-excited spectra for coherent laser pulses.
//!
//! A coherent pulse of mean photon number n(0) in a mode centered at k0 with
//! momentum-space width 1/sigma loses photons to a halo of modes within ~1/a
//! of k0. To first order in lambda t,
//!
//!   n(t) = n(0) [1 - C lambda t],
//!
//! with C = 4 sqrt(pi) n(0) lambdabar_N^2/(lambda0 a) for k0 a << 1 and
//! C = n(0) (k0 lambdabar_N)^2 for k0 a >> 1 (lambda0 = 2 pi / k0). The
//! excited photons appear with probability density per d^3k
//!
//!   P(k) = n(0) (lambda t / M_N^2) (a^2/pi)^{3/2} k0 k e^{-(k0-k)^2 a^2},
//!
//! and the trace and mean-energy bookkeeping between the loss and the halo
//! close exactly at first order.

use crate::energy_gain;
use crate::error::{Error, Result};
use crate::quadrature::{self, GaussianWeight3D};
use crate::units::{wavelength_to_wavenumber, CollapseParams};

use std::f64::consts::PI;

/// Coherent-pulse parameters.
///
/// The mode function is a Gaussian of spatial length sigma centered at
/// wavenumber k0; the transverse width is taken equal to sigma (the aspect
/// ratio has no effect on the rates).
#[derive(Debug, Clone, Copy)]
pub struct LaserPulseSpec {
    /// Central wavenumber k0 (cm^-1, angular: k0 = 2 pi / lambda0).
    pub k0: f64,
    /// Pulse length scale sigma (cm).
    pub sigma: f64,
    /// Initial mean photon number.
    pub n_mean0: f64,
}

impl LaserPulseSpec {
    /// The narrow-band condition k0 sigma >> 1 is enforced as k0 sigma > 100.
    pub fn new(k0: f64, sigma: f64, n_mean0: f64) -> Result<Self> {
        if !(k0 > 0.0) || !(sigma > 0.0) {
            return Err(Error::Domain(format!(
                "k0 and sigma must be > 0, got k0 = {k0}, sigma = {sigma}"
            )));
        }
        if !(n_mean0 >= 0.0) || !n_mean0.is_finite() {
            return Err(Error::Domain(format!(
                "mean photon number must be finite and >= 0, got {n_mean0}"
            )));
        }
        if k0 * sigma <= 100.0 {
            return Err(Error::Domain(format!(
                "narrow-band condition violated: k0 sigma = {:.3e} must exceed 100",
                k0 * sigma
            )));
        }
        Ok(Self { k0, sigma, n_mean0 })
    }

    /// Construct from the full wavelength lambda0 = 2 pi / k0.
    pub fn from_wavelength(lambda0: f64, sigma: f64, n_mean0: f64) -> Result<Self> {
        Self::new(wavelength_to_wavenumber(lambda0)?, sigma, n_mean0)
    }

    /// Soft warnings for parameter corners the first-order formulas dislike.
    pub fn warnings(&self, params: &CollapseParams) -> Vec<String> {
        let mut w = Vec::new();
        if self.k0 * self.sigma <= 1e3 {
            w.push(format!(
                "k0 sigma = {:.3e} is marginal (prefer > 1e3)",
                self.k0 * self.sigma
            ));
        }
        if self.sigma <= params.a {
            w.push(format!(
                "sigma = {:.3e} cm is not larger than a = {:.3e} cm",
                self.sigma, params.a
            ));
        }
        w
    }
}

/// Which loss expression was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossRegime {
    /// Closed form for k0 a << 1.
    LowK0a,
    /// Closed form for k0 a >> 1.
    HighK0a,
    /// Quadrature of the full loss integral.
    Exact,
}

impl std::fmt::Display for LossRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossRegime::LowK0a => "low_k0a",
            LossRegime::HighK0a => "high_k0a",
            LossRegime::Exact => "exact",
        })
    }
}

impl std::str::FromStr for LossRegime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low_k0a" | "low" => Ok(LossRegime::LowK0a),
            "high_k0a" | "high" => Ok(LossRegime::HighK0a),
            "exact" => Ok(LossRegime::Exact),
            other => Err(Error::Domain(format!(
                "unknown loss regime {other:?}; expected low_k0a, high_k0a, or exact"
            ))),
        }
    }
}

/// First-order photon-number decrease and the coefficient that drives it.
#[derive(Debug, Clone, Copy)]
pub struct PhotonLossResult {
    pub n_mean0: f64,
    /// n(t) = n(0)(1 - loss_fraction).
    pub n_mean_t: f64,
    /// C in n(t) = n(0)[1 - C lambda t] (dimensionless per unit lambda t).
    pub loss_coefficient: f64,
    /// C lambda t.
    pub loss_fraction: f64,
    pub regime: LossRegime,
    /// False when the loss fraction exceeds 0.5, outside first-order
    /// validity.
    pub within_first_order: bool,
}

/// The mode-overlap loss integral
///
///   L = (pi/sigma^2)^{-3/2} int d^3k1 d^3k2 k1 k2
///         e^{-(k1-k2)^2 a^2} e^{-(k1-k0)^2 sigma^2}
///
/// by nested reduced quadrature. Limits: k0 2 pi/a^4 for k0 a << 1 and
/// k0^2 (pi/a^2)^{3/2} for k0 a >> 1.
pub fn loss_integral(k0: f64, sigma: f64, a: f64, tol: f64) -> Result<f64> {
    if !(k0 > 0.0) || !(sigma > 0.0) || !(a > 0.0) {
        return Err(Error::Domain(format!(
            "k0, sigma, a must be > 0, got {k0}, {sigma}, {a}"
        )));
    }
    let inner_tol = (tol * 0.1).max(1e-12);
    // inner: h(k1) = int d^3 k2 |k2| e^{-(k2-k1)^2 a^2}, numeric-angle path
    let h = |k1: f64| -> Result<f64> {
        let w = GaussianWeight3D::on_axis(k1, a)?;
        Ok(quadrature::integrate_gaussian_3d(quadrature::norm, &w, inner_tol)?.value)
    };
    // outer over k1: radial quadrature with the analytic angle average of
    // the sigma Gaussian
    let lo = (k0 - 10.0 / sigma).max(0.0);
    let hi = k0 + 10.0 / sigma;
    let r = quadrature::integrate_radial(
        |k1| {
            let hv = h(k1).unwrap_or(f64::NAN);
            4.0 * PI
                * k1 * k1
                * k1
                * hv
                * quadrature::gaussian_angle_average(k1, k0, sigma)
        },
        lo,
        hi,
        tol,
    )?;
    if !r.value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            estimate: r.value,
            error_estimate: r.error_estimate,
            evaluations: r.evaluations,
        });
    }
    Ok((sigma * sigma / PI).powf(1.5) * r.value)
}

/// Low-regime loss coefficient C = 4 sqrt(pi) n0 lambdabar_N^2/(lambda0 a)
/// with lambda0 = 2 pi / k0, i.e. C = (2/sqrt(pi)) n0 lambdabar_N^2 k0 / a.
pub fn loss_coefficient_low(spec: &LaserPulseSpec, params: &CollapseParams) -> f64 {
    let lb = params.constants.lambdabar_n_cm;
    2.0 / PI.sqrt() * spec.n_mean0 * lb * lb * spec.k0 / params.a
}

/// High-regime loss coefficient C = n0 (k0 lambdabar_N)^2.
pub fn loss_coefficient_high(spec: &LaserPulseSpec, params: &CollapseParams) -> f64 {
    let x = spec.k0 * params.constants.lambdabar_n_cm;
    spec.n_mean0 * x * x
}

/// Mean photon number after time t in the requested regime.
pub fn mean_photons(
    spec: &LaserPulseSpec,
    params: &CollapseParams,
    t: f64,
    regime: LossRegime,
) -> Result<PhotonLossResult> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    let coeff = match regime {
        LossRegime::LowK0a => loss_coefficient_low(spec, params),
        LossRegime::HighK0a => loss_coefficient_high(spec, params),
        LossRegime::Exact => {
            let lb = params.constants.lambdabar_n_cm;
            let l = loss_integral(spec.k0, spec.sigma, params.a, 1e-8)?;
            spec.n_mean0 * lb * lb * (params.a * params.a / PI).powf(1.5) * l
        }
    };
    let loss_fraction = coeff * params.lambda_rate * t;
    Ok(PhotonLossResult {
        n_mean0: spec.n_mean0,
        n_mean_t: spec.n_mean0 * (1.0 - loss_fraction),
        loss_coefficient: coeff,
        loss_fraction,
        regime,
        within_first_order: loss_fraction <= 0.5,
    })
}

/// Spectrum of collapse-excited photons on a radial grid.
#[derive(Debug, Clone)]
pub struct ExcitationSpectrum {
    /// Radial wavenumbers (cm^-1).
    pub k: Vec<f64>,
    /// Direction-averaged probability density per d^3k at each grid point.
    pub p: Vec<f64>,
    /// Fraction of the total excitation probability below each grid point.
    pub cumulative_fraction: Vec<f64>,
    /// Total excitation probability int P d^3k by quadrature.
    pub total: f64,
}

/// Prefactor n0 lambda t / M_N^2 (a^2/pi)^{3/2}.
fn excitation_prefactor(spec: &LaserPulseSpec, params: &CollapseParams, t: f64) -> f64 {
    let lb = params.constants.lambdabar_n_cm;
    spec.n_mean0 * params.lambda_rate * t * lb * lb
        * (params.a * params.a / PI).powf(1.5)
}

/// Pointwise P(k) for a 3-vector k.
pub fn excitation_density_at(
    kvec: [f64; 3],
    spec: &LaserPulseSpec,
    params: &CollapseParams,
    t: f64,
) -> f64 {
    let a = params.a;
    let d = quadrature::sub(kvec, [0.0, 0.0, spec.k0]);
    excitation_prefactor(spec, params, t)
        * spec.k0
        * quadrature::norm(kvec)
        * (-quadrature::norm2(d) * a * a).exp()
}

/// Default radial grid: 512 log-spaced points on [1e-3/a, 10/a].
pub fn default_excitation_grid(a: f64) -> Vec<f64> {
    log_grid(1e-3 / a, 10.0 / a, 512)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Direction-averaged excitation spectrum on `grid`, with the total from an
/// independent radial quadrature.
pub fn excitation_density(
    grid: &[f64],
    spec: &LaserPulseSpec,
    params: &CollapseParams,
    t: f64,
) -> Result<ExcitationSpectrum> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] <= 0.0 {
        return Err(Error::Domain(
            "grid must be strictly increasing with positive wavenumbers".into(),
        ));
    }
    let a = params.a;
    let k0 = spec.k0;
    let hi_needed = k0 + 5.0 / a;
    let lo_needed = (k0 - 5.0 / a).max(1e-2 / a);
    if *grid.last().unwrap() < hi_needed || grid[0] > lo_needed {
        return Err(Error::Domain(format!(
            "grid [{:.3e}, {:.3e}] does not cover the excitation support [{:.3e}, {:.3e}]",
            grid[0],
            grid.last().unwrap(),
            lo_needed,
            hi_needed
        )));
    }
    let pref = excitation_prefactor(spec, params, t);
    let p: Vec<f64> = grid
        .iter()
        .map(|&k| pref * k0 * k * quadrature::gaussian_angle_average(k, k0, a))
        .collect();
    let total = total_excitation(spec, params, t, 1e-9)?;
    // cumulative fraction by trapezoid of 4 pi k^2 P over the grid
    let mut cumulative_fraction = vec![0.0; grid.len()];
    let mut acc = 0.0;
    for i in 1..grid.len() {
        let f0 = 4.0 * PI * grid[i - 1] * grid[i - 1] * p[i - 1];
        let f1 = 4.0 * PI * grid[i] * grid[i] * p[i];
        acc += 0.5 * (f0 + f1) * (grid[i] - grid[i - 1]);
        cumulative_fraction[i] = if total > 0.0 { acc / total } else { 0.0 };
    }
    Ok(ExcitationSpectrum {
        k: grid.to_vec(),
        p,
        cumulative_fraction,
        total,
    })
}

/// int P d^3k by radial quadrature with the analytic angle average.
fn total_excitation(
    spec: &LaserPulseSpec,
    params: &CollapseParams,
    t: f64,
    tol: f64,
) -> Result<f64> {
    let a = params.a;
    let k0 = spec.k0;
    let pref = excitation_prefactor(spec, params, t);
    if pref == 0.0 {
        return Ok(0.0);
    }
    let lo = (k0 - 12.0 / a).max(0.0);
    let hi = k0 + 12.0 / a;
    let r = quadrature::integrate_radial(
        |k| 4.0 * PI * k * k * k * quadrature::gaussian_angle_average(k, k0, a),
        lo,
        hi,
        tol,
    )?;
    Ok(pref * k0 * r.value)
}

/// The residual two-Gaussian term of the excited-photon density (the R(k)
/// the halo formula neglects), scaled like P(k):
///
///   n0 (lambda t/M_N^2)(a^2/pi)^{3/2} [ k0^2 2^{3/2} e^{-(k-k0)^2 sigma^2}
///       - 2 k0^2 (4/3)^{3/2} e^{-(k-k0)^2 2 sigma^2/3} ].
pub fn residual_r(k: f64, spec: &LaserPulseSpec, params: &CollapseParams, t: f64) -> f64 {
    excitation_prefactor(spec, params, t) * residual_bracket(k, spec.k0, spec.sigma)
}

/// The unscaled bracket; its d^3k integral is -k0^2 (2 pi/sigma^2)^{3/2}.
pub fn residual_bracket(k: f64, k0: f64, sigma: f64) -> f64 {
    let d2 = (k - k0) * (k - k0);
    let s2 = sigma * sigma;
    k0 * k0
        * (2.0f64.powf(1.5) * (-d2 * s2).exp()
            - 2.0 * (4.0f64 / 3.0).powf(1.5) * (-d2 * 2.0 * s2 / 3.0).exp())
}

/// Per-photon anomalous excitation rate Gamma = 4 sqrt(pi) lambda
/// lambdabar_N^2 / (lambda0 a), lambda0 = 2 pi / k0 (valid for k0 a << 1).
pub fn total_excitation_rate(spec: &LaserPulseSpec, params: &CollapseParams) -> f64 {
    let lb = params.constants.lambdabar_n_cm;
    2.0 / PI.sqrt() * params.lambda_rate * lb * lb * spec.k0 / params.a
}

/// Expected number of anomalous photons Gamma n(0) t.
pub fn expected_anomalous_photons(
    spec: &LaserPulseSpec,
    params: &CollapseParams,
    t: f64,
) -> f64 {
    total_excitation_rate(spec, params) * spec.n_mean0 * t
}

/// First-order trace bookkeeping: [1 - loss] + int P d^3k - 1.
///
/// The loss term and the excitation total are the same integral; they are
/// assembled through different code paths (numeric-angle 3-D quadrature vs
/// analytic angle average on a radial quadrature), so the residual measures
/// numerical consistency and must be far below lambda t times the loss
/// coefficient.
pub fn trace_check(spec: &LaserPulseSpec, params: &CollapseParams, t: f64) -> Result<f64> {
    let lb = params.constants.lambdabar_n_cm;
    let lam_t = params.lambda_rate * t;
    if lam_t == 0.0 {
        return Ok(0.0);
    }
    let a = params.a;
    // loss path: delta-concentrated pulse, loss fraction
    //   n0 lambda t lb^2 (a^2/pi)^{3/2} k0 h(k0), numeric-angle inner
    let w = GaussianWeight3D::on_axis(spec.k0, a)?;
    let h = quadrature::integrate_gaussian_3d(quadrature::norm, &w, 1e-10)?.value;
    let loss = spec.n_mean0 * lam_t * lb * lb * (a * a / PI).powf(1.5) * spec.k0 * h;
    let exc = total_excitation(spec, params, t, 1e-10)?;
    Ok(exc - loss)
}

/// Two-path mean-energy bookkeeping: the energy carried into the halo,
/// int (k - k0) P(k) d^3k, against t dH/dt from the energy-gain kernel
/// f(k0). Returns the relative mismatch.
pub fn energy_balance_check(
    spec: &LaserPulseSpec,
    params: &CollapseParams,
    t: f64,
) -> Result<f64> {
    let lam_t = params.lambda_rate * t;
    if lam_t == 0.0 {
        return Ok(0.0);
    }
    let a = params.a;
    let k0 = spec.k0;
    let pref = excitation_prefactor(spec, params, t);
    let lo = (k0 - 12.0 / a).max(0.0);
    let hi = k0 + 12.0 / a;
    // path A: radial quadrature of the halo spectrum
    let r = quadrature::integrate_radial(
        |k| {
            4.0 * PI
                * k * k
                * (k - k0)
                * k
                * quadrature::gaussian_angle_average(k, k0, a)
        },
        lo,
        hi,
        1e-10,
    )?;
    let delta_e = pref * k0 * r.value;
    // path B: energy-gain kernel through the 3-D numeric-angle quadrature
    let lb = params.constants.lambdabar_n_cm;
    let f = energy_gain::f_exact(k0, 0.0, a, 1e-10)?;
    let dhdt_t = spec.n_mean0 * lam_t * lb * lb * (a * a / PI).powf(1.5) * f;
    let scale = delta_e.abs().max(dhdt_t.abs());
    Ok(if scale == 0.0 {
        0.0
    } else {
        (delta_e - dhdt_t).abs() / scale
    })
}

/// Closed form of the quartic mode-overlap integral I ~ k0^2 (2 pi)^{3/2} /
/// sigma^3, with a validity flag for the sigma >> a assumption.
#[derive(Debug, Clone, Copy)]
pub struct QuarticOverlap {
    pub value: f64,
    /// False when sigma <= 2 a, where a^2 + sigma^2/4 ~ sigma^2/4 degrades.
    pub sigma_much_larger_than_a: bool,
}

/// The coherent-state self-overlap integral appearing in the n(n-1) - n^2
/// loss bracket.
pub fn quartic_overlap(k0: f64, sigma: f64, a: f64) -> Result<QuarticOverlap> {
    if !(k0 > 0.0) || !(sigma > 0.0) || !(a >= 0.0) {
        return Err(Error::Domain(format!(
            "k0, sigma must be > 0 and a >= 0, got {k0}, {sigma}, {a}"
        )));
    }
    Ok(QuarticOverlap {
        value: k0 * k0 * (2.0 * PI).powf(1.5) / sigma.powi(3),
        sigma_much_larger_than_a: sigma > 2.0 * a,
    })
}
