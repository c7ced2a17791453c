//! Scattering Green function above a dielectric half-space, non-retarded.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::{wave_number, C};
use crate::dielectric::fresnel_rp_nonret;
use crate::error::{Error, Result};
use crate::green::{Basis, GreenTensor};
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun::bessel_j0;

/// In units of 1/z the exponential weight e^{-2t} is below 1e-17 past t = 40.
const QUADRATURE_CUTOFF: f64 = 40.0;

/// Two emitters at equal height z above the interface, in-plane separation x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarGeometry {
    z: f64,
    x: f64,
}

impl PlanarGeometry {
    pub fn new(z: f64, x: f64) -> Result<Self> {
        check_z(z)?;
        check_x(x)?;
        Ok(Self { z, x })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

fn check_z(z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidInput(format!(
            "height above the surface must be finite and > 0, got {z}"
        )));
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!(
            "in-plane separation must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidInput(format!(
            "angular frequency must be finite and > 0, got {omega}"
        )));
    }
    Ok(())
}

/// k_perp = sqrt(eps k0^2 - k_par^2) on the branch with Im >= 0.
fn k_perp(eps: Complex64, k0: f64, k_par: f64) -> Complex64 {
    let k = (eps * (k0 * k0) - k_par * k_par).sqrt();
    if k.im < 0.0 || (k.im == 0.0 && k.re < 0.0) {
        -k
    } else {
        k
    }
}

/// Plane-wave reflection at the interface from medium 1 into medium 2.
pub fn fresnel_coefficients(
    k_par: f64,
    omega: f64,
    eps1: Complex64,
    eps2: Complex64,
) -> Result<(Complex64, Complex64)> {
    check_omega(omega)?;
    if !(k_par >= 0.0) || !k_par.is_finite() {
        return Err(Error::InvalidInput(format!(
            "parallel wave number must be finite and >= 0, got {k_par}"
        )));
    }
    let k0 = wave_number(omega);
    let k1 = k_perp(eps1, k0, k_par);
    let k2 = k_perp(eps2, k0, k_par);
    let rs = (k1 - k2) / (k1 + k2);
    let rp = (eps2 * k1 - eps1 * k2) / (eps2 * k1 + eps1 * k2);
    Ok((rs, rp))
}

/// c^2 r_p / (32 pi omega^2 z^3), the xx entry of the coincidence tensor.
fn coincidence_scale(z: f64, omega: f64, rp: Complex64) -> Complex64 {
    rp * (C * C / (32.0 * PI * omega * omega * z * z * z))
}

/// Coincidence tensor (c^2/(32 pi omega^2 z^3)) r_p diag(1, 1, 2), z normal to the surface.
pub fn g1_planar_coincident_nonret(z: f64, omega: f64, eps: Complex64) -> Result<GreenTensor> {
    check_z(z)?;
    check_omega(omega)?;
    let base = coincidence_scale(z, omega, fresnel_rp_nonret(eps)?);
    Ok(GreenTensor::diagonal([base, base, base * 2.0], Basis::Cartesian))
}

/// (8 - u^2)/(u^2 + 4)^{5/2}, equal to 1/4 at u = 0.
fn zz_shape(u: f64) -> f64 {
    let s = u * u + 4.0;
    (8.0 - u * u) / (s * s * s.sqrt())
}

/// zz component of the two-point tensor for emitters at equal height:
/// -(1/(4 pi k0^2 z^3)) r_p ((x/z)^2 - 8)/((x/z)^2 + 4)^{5/2}.
pub fn g1_planar_zz_twopoint_nonret(x: f64, z: f64, omega: f64, eps: Complex64) -> Result<Complex64> {
    check_x(x)?;
    check_z(z)?;
    check_omega(omega)?;
    let base = coincidence_scale(z, omega, fresnel_rp_nonret(eps)?);
    // 8 * zz_shape(0) is exactly 2, so x = 0 reproduces the coincidence zz entry bit for bit
    Ok(base * (8.0 * zz_shape(x / z)))
}

/// The same component from (r_p c^2/(4 pi omega^2)) int_0^inf k^2 e^{-2kz} J0(kx) dk,
/// integrated adaptively on [0, 40/z].
pub fn g1_planar_zz_twopoint_quadrature(
    x: f64,
    z: f64,
    omega: f64,
    eps: Complex64,
) -> Result<Complex64> {
    check_x(x)?;
    check_z(z)?;
    check_omega(omega)?;
    let rp = fresnel_rp_nonret(eps)?;
    if rp == Complex64::new(0.0, 0.0) {
        return Ok(rp);
    }
    let u = x / z;
    // substitute t = k z: the integral becomes z^-3 int_0^40 t^2 e^{-2t} J0(u t) dt
    let opts = QuadOptions {
        epsabs: 1e-15,
        epsrel: 1e-12,
        max_intervals: 4000,
    };
    let r = integrate(
        |t: f64| t * t * (-2.0 * t).exp() * bessel_j0(u * t),
        0.0,
        QUADRATURE_CUTOFF,
        opts,
    )?;
    Ok(rp * (C * C / (4.0 * PI * omega * omega * z * z * z)) * r.value)
}

/// k0 max(x, 2z), the parameter the non-retarded forms assume small.
pub fn retardation_parameter(x: f64, z: f64, omega: f64) -> f64 {
    wave_number(omega) * x.max(2.0 * z)
}
