//! Special functions for the multipole series: spherical Bessel/Hankel and
//! Riccati functions of complex argument, Legendre and associated Legendre
//! functions (no Condon-Shortley phase), and the cylindrical J0 used by the
//! planar Sommerfeld-type integral.

pub(crate) mod bessel;
mod cylindrical;
mod legendre;

pub use bessel::{
    riccati_eta, riccati_zeta, sph_bessel_j, sph_bessel_j_seq, sph_bessel_y, sph_bessel_y_seq,
    sph_hankel1, sph_hankel1_seq, MAX_ARGUMENT, MAX_ORDER,
};
pub use cylindrical::bessel_j0;
pub use legendre::{
    assoc_legendre, assoc_legendre_dtheta, legendre_p, legendre_p_derivs, LegendreSeries,
};

use crate::error::{Error, Result};

/// Multipole indices (l, m) with 0 <= m <= l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SphericalOrder {
    l: usize,
    m: usize,
}

impl SphericalOrder {
    pub fn new(l: usize, m: usize) -> Result<Self> {
        if m > l {
            return Err(Error::InvalidInput(format!(
                "associated Legendre order m = {m} exceeds degree l = {l}"
            )));
        }
        Ok(Self { l, m })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// (l - m)! / (l + m)!, accumulated as a product to stay finite.
    pub fn factorial_ratio(&self) -> f64 {
        ((self.l - self.m + 1)..=(self.l + self.m)).fold(1.0, |acc, k| acc / k as f64)
    }
}

/// (2n - 1)!! with the convention (-1)!! = 1.
pub fn double_factorial_odd(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * (2 * k - 1) as f64)
}
