//! Physical constants, the internal unit policy, and conversions between
//! laboratory inputs and internal natural units.
//!
//! Internal system: hbar = c = 1, lengths in cm, wavenumbers k in cm^-1,
//! times in s.  Energies are carried as (angular) wavenumbers, E = hbar c k,
//! with explicit conversion factors to J and eV.

use crate::error::{Error, Result};

/// Speed of light (cm/s).
pub const C_CM_PER_S: f64 = 2.997_924_58e10;

/// hbar*c (erg cm).
pub const HBAR_C_ERG_CM: f64 = 3.161_526_77e-17;

/// hbar*c (J cm).
pub const HBAR_C_J_CM: f64 = 3.161_526_77e-24;

/// h*c (J cm); single-photon energy is h c / lambda.
pub const HC_J_CM: f64 = 1.986_445_86e-23;

/// hbar*c (eV cm).
pub const HBAR_C_EV_CM: f64 = 1.973_269_80e-5;

/// Boltzmann constant (erg/K).
pub const K_B_ERG_PER_K: f64 = 1.380_649e-16;

/// Julian year (s).
pub const SECONDS_PER_YEAR: f64 = 3.155_76e7;

/// Default reduced Compton wavelength of the nucleon (cm).
pub const LAMBDABAR_N_CM: f64 = 2.1e-14;

/// Allowed range for the configurable nucleon Compton wavelength.
pub const LAMBDABAR_N_RANGE: (f64, f64) = (1.9e-14, 2.2e-14);

/// Physical constants bundle. The nucleon Compton wavelength is
/// configurable because headline numbers in the source literature are
/// quoted with it rounded differently in different sections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// hbar*c (erg cm).
    pub hbar_c_erg_cm: f64,
    /// Reduced Compton wavelength of the nucleon (cm).
    pub lambdabar_n_cm: f64,
    /// Boltzmann constant (erg/K).
    pub k_b_erg_per_k: f64,
    /// Speed of light (cm/s).
    pub c_cm_per_s: f64,
    /// Seconds per year.
    pub seconds_per_year: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar_c_erg_cm: HBAR_C_ERG_CM,
            lambdabar_n_cm: LAMBDABAR_N_CM,
            k_b_erg_per_k: K_B_ERG_PER_K,
            c_cm_per_s: C_CM_PER_S,
            seconds_per_year: SECONDS_PER_YEAR,
        }
    }
}

impl PhysicalConstants {
    /// Constants with an explicit nucleon Compton wavelength (cm).
    ///
    /// Values outside [1.9e-14, 2.2e-14] cm are rejected; use field access
    /// to override the guard deliberately.
    pub fn with_lambdabar_n(lambdabar_n_cm: f64) -> Result<Self> {
        let (lo, hi) = LAMBDABAR_N_RANGE;
        if !(lo..=hi).contains(&lambdabar_n_cm) {
            return Err(Error::Domain(format!(
                "lambdabar_n = {lambdabar_n_cm:e} cm outside [{lo:e}, {hi:e}]"
            )));
        }
        Ok(Self {
            lambdabar_n_cm,
            ..Self::default()
        })
    }
}

/// The phenomenological collapse parameters: rate lambda (s^-1), range a (cm),
/// and the nucleon reference mass carried as an inverse length 1/lambdabar_N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseParams {
    /// Collapse rate (s^-1).
    pub lambda_rate: f64,
    /// Collapse range (cm).
    pub a: f64,
    /// Physical constants, including the configurable lambdabar_N.
    pub constants: PhysicalConstants,
}

impl CollapseParams {
    /// GRW-suggested values: lambda = 1e-16 s^-1, a = 1e-5 cm.
    pub fn grw() -> Self {
        Self::new(1e-16, 1e-5).expect("GRW values are valid")
    }

    pub fn new(lambda_rate: f64, a: f64) -> Result<Self> {
        Self::with_constants(lambda_rate, a, PhysicalConstants::default())
    }

    pub fn with_constants(
        lambda_rate: f64,
        a: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        if !(lambda_rate >= 0.0) {
            return Err(Error::Domain(format!(
                "lambda_rate must be >= 0, got {lambda_rate}"
            )));
        }
        if !(a > 0.0) {
            return Err(Error::Domain(format!("a must be > 0, got {a}")));
        }
        Ok(Self {
            lambda_rate,
            a,
            constants,
        })
    }

    /// Nucleon mass as an inverse length, M_N = 1/lambdabar_N (cm^-1).
    pub fn mass_ref(&self) -> f64 {
        1.0 / self.constants.lambdabar_n_cm
    }
}

/// Relativistic dispersion omega(k) = sqrt(k^2 + M^2), energies as
/// wavenumbers (cm^-1).
pub fn omega(k: f64, mass: f64) -> Result<f64> {
    if k < 0.0 || mass < 0.0 {
        return Err(Error::Domain(format!(
            "omega requires k >= 0 and M >= 0, got k = {k}, M = {mass}"
        )));
    }
    Ok(k.hypot(mass))
}

/// Wavelength (cm) to angular wavenumber k = 2 pi / lambda (cm^-1).
pub fn wavelength_to_wavenumber(lambda_cm: f64) -> Result<f64> {
    if !(lambda_cm > 0.0) {
        return Err(Error::Domain(format!(
            "wavelength must be > 0, got {lambda_cm}"
        )));
    }
    Ok(2.0 * std::f64::consts::PI / lambda_cm)
}

/// Angular wavenumber (cm^-1) back to wavelength (cm).
pub fn wavenumber_to_wavelength(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be > 0, got {k}")));
    }
    Ok(2.0 * std::f64::consts::PI / k)
}

/// Energy (J) to angular wavenumber k = E / (hbar c) (cm^-1).
pub fn energy_j_to_wavenumber(energy_j: f64) -> Result<f64> {
    if !(energy_j > 0.0) {
        return Err(Error::Domain(format!("energy must be > 0, got {energy_j}")));
    }
    Ok(energy_j / HBAR_C_J_CM)
}

/// Angular wavenumber (cm^-1) to energy (J).
pub fn wavenumber_to_energy_j(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be > 0, got {k}")));
    }
    Ok(k * HBAR_C_J_CM)
}

/// Energy (eV) to angular wavenumber (cm^-1).
pub fn energy_ev_to_wavenumber(energy_ev: f64) -> Result<f64> {
    if !(energy_ev > 0.0) {
        return Err(Error::Domain(format!("energy must be > 0, got {energy_ev}")));
    }
    Ok(energy_ev / HBAR_C_EV_CM)
}

/// Photon count in a pulse of total energy `energy_j` (J) at wavelength
/// `wavelength_cm` (cm): E / (h c / lambda).
pub fn photons_in_pulse(energy_j: f64, wavelength_cm: f64) -> Result<f64> {
    if !(energy_j > 0.0) || !(wavelength_cm > 0.0) {
        return Err(Error::Domain(format!(
            "photons_in_pulse requires positive inputs, got E = {energy_j}, lambda = {wavelength_cm}"
        )));
    }
    Ok(energy_j * wavelength_cm / HC_J_CM)
}

/// Energy (J) contained in a beam segment of the given length for a beam of
/// the given power: P * (length / c).
pub fn beam_segment_energy(power_w: f64, length_cm: f64) -> Result<f64> {
    if !(power_w > 0.0) || !(length_cm > 0.0) {
        return Err(Error::Domain(format!(
            "beam_segment_energy requires positive inputs, got P = {power_w}, L = {length_cm}"
        )));
    }
    Ok(power_w * length_cm / C_CM_PER_S)
}

/// Thermal wavelength lambda_Th = h c / (k_B T) (cm).
pub fn thermal_wavelength(temperature_k: f64) -> Result<f64> {
    if !(temperature_k > 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be > 0, got {temperature_k}"
        )));
    }
    Ok(2.0 * std::f64::consts::PI * HBAR_C_ERG_CM / (K_B_ERG_PER_K * temperature_k))
}
