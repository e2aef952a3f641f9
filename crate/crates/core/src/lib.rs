//! Fluctuational electrodynamics of small spheres spinning near planar
//! interfaces.
//!
//! The library computes vacuum radiation spectra, frictional torques, and the
//! near-field electromagnetic local density of states (LDOS) for a nanosphere
//! rotating at GHz rates above a metallic or gyromagnetic half-space, together
//! with the laboratory observables derived from them (terminal rotation speed,
//! spin-down time, steady-state temperature).
//!
//! The computation is organised bottom-up:
//!
//! * [`scenario`] — experiment description, unit conversions, Bose factors.
//! * [`quadrature`] — adaptive integration and root finding.
//! * [`materials`] — permeability, permittivity, and polarizability models.
//! * [`reflection`] — Fresnel coefficients for local, non-local, and
//!   gyrotropic half-spaces.
//! * [`greens`] — interface Green's-function weights and the LDOS.
//! * [`fluctuation`] — radiation spectral density, radiated power, torques.
//! * [`observables`] — gas drag, terminal speed, spin-down time, steady-state
//!   temperature.
//! * [`cli`] — command-line front end shared by the `vfric` binary.

pub mod cli;
pub mod fluctuation;
pub mod greens;
pub mod materials;
pub mod reflection;
pub mod scenario;
pub mod quadrature;
