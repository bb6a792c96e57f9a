//! Numerics for the phenomenology of a relativistic energy-density collapse
//! model applied to photons.
//!
//! The model modifies the quantum master equation by a Lindblad term built
//! from Gaussian-smeared energy-density operators. For free photons this
//! produces a slow secular transfer of photons out of occupied modes into a
//! broad halo of nearby momenta, with observable consequences for intense
//! laser pulses, beam coherence, and the cosmic microwave background.
//!
//! Crate layout:
//! * [`units`] — unit system (lengths in cm, wavenumbers in cm^-1, times in
//!   s, hbar = c = 1) and the collapse-parameter types,
//! * [`quadrature`] — adaptive Gauss-Kronrod and seeded Monte-Carlo
//!   integration used as independent oracles,
//! * [`energy_gain`] — mean energy-gain kernel and its asymptotic regimes,
//! * [`laser`] — photon loss and excitation spectra for coherent pulses,
//! * [`cosmology`] — blackbody-spectrum distortion over cosmological times,
//! * [`superposition`] — decay of macroscopic superpositions of pulses and
//!   the spacelike commutator kernel of the smeared energy density,
//! * [`fock`] — direct density-matrix integration of the master equation in
//!   a truncated Fock space, validating the closed-form rates.

pub mod cosmology;
pub mod energy_gain;
pub mod error;
pub mod fock;
pub mod laser;
pub mod quadrature;
pub mod superposition;
pub mod units;

pub use error::{Error, Result};
pub use quadrature::{GaussianWeight3D, IntegrationResult};
pub use units::{CollapseParams, PhysicalConstants};
