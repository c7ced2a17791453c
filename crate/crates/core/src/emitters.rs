//! Two-level emitters: Purcell-modified decay rates, environment-induced
//! frequency shifts and the orientation averages of the dipole weights.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::{HBAR, MU0};
use crate::error::{Error, Result};
use crate::green::{Basis, GreenTensor};
use crate::green_free::g0_im_coincident;
use crate::green_planar::g1_planar_coincident_nonret;
use crate::green_sphere::{g_sphere_coincident, g_sphere_coincident_nonret, MieSeriesControl};
use crate::quadrature::{integrate_with_breaks, QuadOptions};

/// Where an emitter sits. Local frames put z along the surface normal
/// (plane) or along e_r (sphere), with x, y tangential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    FreeSpace,
    AbovePlane { z: f64 },
    OutsideSphere { radius: f64, z: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emitter {
    omega_t: f64,
    dipole: [f64; 3],
    site: Site,
}

impl Emitter {
    /// Transition frequency in rad/s, dipole in C m (local frame).
    pub fn new(omega_t: f64, dipole: [f64; 3], site: Site) -> Result<Self> {
        if !(omega_t > 0.0) || !omega_t.is_finite() {
            return Err(Error::InvalidInput(format!(
                "transition frequency must be finite and > 0, got {omega_t}"
            )));
        }
        if !dipole.iter().all(|v| v.is_finite()) || norm_sq(dipole) == 0.0 {
            return Err(Error::InvalidInput(
                "dipole moment must be finite and non-zero".into(),
            ));
        }
        Ok(Self {
            omega_t,
            dipole,
            site,
        })
    }

    pub fn omega_t(&self) -> f64 {
        self.omega_t
    }

    pub fn dipole(&self) -> [f64; 3] {
        self.dipole
    }

    pub fn site(&self) -> Site {
        self.site
    }

    pub fn with_dipole(&self, dipole: [f64; 3]) -> Result<Self> {
        Self::new(self.omega_t, dipole, self.site)
    }
}

fn norm_sq(d: [f64; 3]) -> f64 {
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// Environment-induced change of the decay rate (1/s).
    pub gamma_env: f64,
    /// Free-space Einstein rate (1/s).
    pub gamma_free: f64,
}

impl RateResult {
    pub fn total(&self) -> f64 {
        self.gamma_env + self.gamma_free
    }
}

fn rate_unchecked(omega: f64, dipole: [f64; 3], im_g: &GreenTensor) -> Result<f64> {
    if !im_g.is_real() {
        return Err(Error::NonRealTensor);
    }
    let dgd = im_g.bilinear(dipole, dipole).re;
    Ok(2.0 * MU0 / HBAR * omega * omega * dgd)
}

/// (2 mu0/hbar) omega^2 d . Im G . d for the full local Im G (free space plus
/// scattering). A negative result signals an inconsistent input.
pub fn transition_rate(em: &Emitter, im_g: &GreenTensor) -> Result<f64> {
    let rate = rate_unchecked(em.omega_t, em.dipole, im_g)?;
    if rate < 0.0 {
        return Err(Error::NegativeTotalRate { total: rate });
    }
    Ok(rate)
}

/// Imaginary part of the scattering Green tensor at the emitter site, in the
/// emitter's local frame (x, y tangential, z normal).
pub fn scattering_im_at(
    site: Site,
    omega: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
    retarded: bool,
) -> Result<GreenTensor> {
    match site {
        Site::FreeSpace => Ok(GreenTensor::zeros(Basis::Cartesian)),
        Site::AbovePlane { z } => Ok(g1_planar_coincident_nonret(z, omega, eps)?.im()),
        Site::OutsideSphere { radius, z } => {
            let g = if retarded {
                g_sphere_coincident(radius + z, omega, radius, eps, ctl)?
            } else {
                g_sphere_coincident_nonret(radius + z, omega, radius, eps, ctl)?
            };
            Ok(spherical_to_local(&g).im())
        }
    }
}

/// (r, theta, phi) ordering to the local (x, y, z) = (theta, phi, r) frame.
fn spherical_to_local(g: &GreenTensor) -> GreenTensor {
    const MAP: [usize; 3] = [1, 2, 0];
    let mut out = GreenTensor::zeros(Basis::Cartesian);
    for i in 0..3 {
        for j in 0..3 {
            out.entries[i][j] = g.entries[MAP[i]][MAP[j]];
        }
    }
    out
}

/// Free-space rate and the change caused by the environment.
pub fn purcell_rates(em: &Emitter, scattering_im: &GreenTensor) -> Result<RateResult> {
    let gamma_free = rate_unchecked(em.omega_t, em.dipole, &g0_im_coincident(em.omega_t)?)?;
    let gamma_env = rate_unchecked(em.omega_t, em.dipole, scattering_im)?;
    let result = RateResult {
        gamma_env,
        gamma_free,
    };
    if result.total() < 0.0 {
        return Err(Error::NegativeTotalRate {
            total: result.total(),
        });
    }
    Ok(result)
}

/// Which level of the two-level system is shifted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// omega_kn = +omega_t: the integrand has no pole on the positive axis.
    Ground,
    /// omega_kn = -omega_t: principal value around omega = omega_t.
    Excited,
}

/// Frequency shift of one level from its single partner level.
pub fn frequency_shift<F>(em: &Emitter, im_g_of_omega: F, grid: &[f64], level: Level) -> Result<f64>
where
    F: Fn(f64) -> Result<GreenTensor>,
{
    let omega_kn = match level {
        Level::Ground => em.omega_t,
        Level::Excited => -em.omega_t,
    };
    frequency_shift_signed(em, im_g_of_omega, grid, omega_kn)
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        epsabs: 0.0,
        epsrel: 1e-12,
        max_intervals: 20_000,
    }
}

/// -(mu0/(hbar pi)) PV int omega^2 d.Im G(omega).d / (omega + omega_kn) d omega
/// over the grid span, with the grid nodes as quadrature breakpoints.
pub fn frequency_shift_signed<F>(em: &Emitter, im_g_of_omega: F, grid: &[f64], omega_kn: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<GreenTensor>,
{
    if grid.len() < 2 {
        return Err(Error::EmptyGrid);
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || !(grid[0] >= 0.0) || !grid[grid.len() - 1].is_finite() {
        return Err(Error::InvalidInput(
            "frequency grid must be non-negative, finite and strictly increasing".into(),
        ));
    }
    if !omega_kn.is_finite() || omega_kn == 0.0 {
        return Err(Error::InvalidInput("omega_kn must be finite and non-zero".into()));
    }
    let d = em.dipole;
    let (a, b) = (grid[0], grid[grid.len() - 1]);

    // nothing may be left outside the grid
    let probe = |w: f64| im_g_of_omega(w).map(|g| g.bilinear(d, d).re);
    let mut below = vec![];
    if a > 0.0 {
        below.push(a * (1.0 - 1e-6));
    }
    for w in below.into_iter().chain([b * (1.0 + 1e-6)]) {
        if let Ok(v) = probe(w) {
            if v != 0.0 {
                return Err(Error::GridCoverage(format!(
                    "d.Im G.d = {v:e} at omega = {w:e} rad/s outside [{a:e}, {b:e}]"
                )));
            }
        }
    }

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |w: f64| -> f64 {
        match im_g_of_omega(w) {
            Ok(t) if t.is_real() => w * w * t.bilinear(d, d).re,
            Ok(_) => {
                failure.borrow_mut().get_or_insert(Error::NonRealTensor);
                f64::NAN
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let pole = -omega_kn;
    let integral = if pole <= a || pole >= b {
        if pole == a || pole == b {
            return Err(Error::InvalidInput(
                "pole of the shift integrand sits on the grid boundary".into(),
            ));
        }
        run(|w| g(w) / (w - pole), grid, &failure)?
    } else {
        // int_{p-h}^{p+h} g/(w-p) = int_0^h [g(p+t) - g(p-t)]/t dt, h = distance to the near end
        let half = (pole - a).min(b - pole);
        let mut sym_breaks: Vec<f64> = grid
            .iter()
            .map(|w| (w - pole).abs())
            .filter(|t| *t > 0.0 && *t < half)
            .collect();
        sym_breaks.push(0.0);
        sym_breaks.push(half);
        sym_breaks.sort_by(f64::total_cmp);
        sym_breaks.dedup();
        let symmetric = run(
            |t| {
                if t == 0.0 {
                    0.0
                } else {
                    (g(pole + t) - g(pole - t)) / t
                }
            },
            &sym_breaks,
            &failure,
        )?;
        let (lo, hi) = (pole - half, pole + half);
        let mut rest = 0.0;
        if lo > a {
            let mut br: Vec<f64> = grid.iter().copied().filter(|w| *w < lo).collect();
            br.push(lo);
            rest += run(|w| g(w) / (w - pole), &br, &failure)?;
        }
        if hi < b {
            let mut br = vec![hi];
            br.extend(grid.iter().copied().filter(|w| *w > hi));
            rest += run(|w| g(w) / (w - pole), &br, &failure)?;
        }
        symmetric + rest
    };
    Ok(-MU0 / (HBAR * PI) * integral)
}

fn run(f: impl Fn(f64) -> f64, breaks: &[f64], failure: &RefCell<Option<Error>>) -> Result<f64> {
    let r = integrate_with_breaks(&f, breaks, quad_opts());
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    Ok(r?.value)
}

/// Azimuthal average of d . diag(1, 1, 2) . d.
pub fn rot_avg_planar_coincident(d: [f64; 3]) -> f64 {
    d[0] * d[0] + d[1] * d[1] + 2.0 * d[2] * d[2]
}

/// Weight of the cross term after independent azimuthal averages of both
/// dipoles: only the normal component survives, d_z^2.
pub fn rot_avg_planar_cross(d: [f64; 3]) -> f64 {
    d[2] * d[2]
}

/// Coincidence weight A_phi (d_x^2 + d_y^2) + A_r d_z^2 with z along e_r.
pub fn rot_avg_sphere(a_r: f64, a_phi: f64, d: [f64; 3]) -> f64 {
    a_phi * (d[0] * d[0] + d[1] * d[1]) + a_r * d[2] * d[2]
}

/// Cross weight A_rr' d_z^2 with z along e_r.
pub fn rot_avg_sphere_cross(a_rr: f64, d: [f64; 3]) -> f64 {
    a_rr * d[2] * d[2]
}
