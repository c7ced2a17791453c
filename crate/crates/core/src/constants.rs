//! Physical constants (CODATA 2018, SI) and unit conversions.
//!
//! Everything inside the crate is SI. Electron-volts and nanometres only
//! appear at the command-line boundary.

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s), exact.
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Vacuum permeability (H/m).
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// One debye in C m (1e-21 / c).
pub const DEBYE: f64 = 1e-21 / C;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hbar: f64,
    pub eps0: f64,
    pub mu0: f64,
    pub debye: f64,
}

impl PhysicalConstants {
    pub const CODATA2018: PhysicalConstants = PhysicalConstants {
        c: C,
        hbar: HBAR,
        eps0: EPS0,
        mu0: MU0,
        debye: DEBYE,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA2018
    }
}

/// Photon energy in eV to angular frequency in rad/s.
pub fn ev_to_angular_frequency(energy_ev: f64) -> Result<f64> {
    if !(energy_ev >= 0.0) || !energy_ev.is_finite() {
        return Err(Error::InvalidInput(format!(
            "photon energy must be finite and non-negative, got {energy_ev}"
        )));
    }
    Ok(energy_ev * (ELEMENTARY_CHARGE / HBAR))
}

/// Angular frequency in rad/s to photon energy in eV.
pub fn angular_frequency_to_ev(omega: f64) -> f64 {
    omega * (HBAR / ELEMENTARY_CHARGE)
}

/// Vacuum wave number k0 = omega / c.
#[inline]
pub fn wave_number(omega: f64) -> f64 {
    omega / C
}
