//! Collisional decoherence and dissipation of a test particle in an ideal
//! quantum gas.
//!
//! The crate provides the dynamic structure factors of Maxwell-Boltzmann,
//! Bose-Einstein and Fermi-Dirac gases, the Brownian-limit momentum diffusion
//! coefficient for several T-matrix models, and two 1D evolution engines: a
//! Lindblad integrator on a momentum grid and a Kramers solver in phase space.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below name the common double precision instances.

pub mod error;
pub mod evolution;
pub mod kinetic;
pub mod quadrature;
mod real;
pub mod scattering;

pub use error::{Error, Result};
pub use kinetic::{
    detailed_balance_residual, energy_transfer, mb_fugacity, s_be, s_fd, s_mb, s_mb_brownian, sigma,
    structure_factor, GasSpec, ParticleSpec, SfQuery, Statistics, Vec3,
};
pub use real::{rel_diff, Real};
pub use scattering::{
    d_pp_closed, d_pp_contact_closed, d_pp_gaussian_closed, d_pp_quadrature, thermal_wavelength,
    transport_coefficients, upsilon, zeta, DppOptions, ScatteringModel, TabulatedTMatrix, TransportCoefficients,
};

pub type GasSpecF64 = GasSpec<f64>;
pub type ParticleSpecF64 = ParticleSpec<f64>;
pub type SfQueryF64 = SfQuery<f64>;
pub type ScatteringModelF64 = ScatteringModel<f64>;
pub type TransportCoefficientsF64 = TransportCoefficients<f64>;
pub type DensityMatrixGridF64 = evolution::DensityMatrixGrid<f64>;
pub type WignerGridF64 = evolution::WignerGrid<f64>;
pub type EvolutionReportF64 = evolution::EvolutionReport<f64>;
