//! Mie scattering Green function outside a dielectric sphere.
//!
//! Tensors are returned in the spherical basis (e_r, e_theta, e_phi) at the
//! evaluation point. Two-point quantities are restricted to the rr
//! component for two points at the same radius.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::{wave_number, C};
use crate::dielectric::POLE_BAND;
use crate::error::{Error, Result};
use crate::green::{Basis, GreenTensor};
use crate::specfun::bessel::{h_and_zeta, j_and_eta};
use crate::specfun::{double_factorial_odd, LegendreSeries, MAX_ORDER};

const I: Complex64 = Complex64::new(0.0, 1.0);
// consecutive small terms required before the series is declared converged
const QUIET_TERMS: usize = 3;

/// Sphere of radius R with both emitters at height z (r = R + z), separated
/// by the polar angle theta as seen from the centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGeometry {
    radius: f64,
    z: f64,
    theta: f64,
}

impl SphereGeometry {
    pub fn new(radius: f64, z: f64, theta: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sphere radius must be finite and > 0, got {radius}"
            )));
        }
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::InvalidInput(format!(
                "height above the sphere must be finite and > 0, got {z}"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidInput(format!(
                "separation angle must lie in [0, pi], got {theta}"
            )));
        }
        Ok(Self { radius, z, theta })
    }

    /// Geometry from the arc length s = theta (R + z) between the emitters.
    pub fn from_arc(radius: f64, z: f64, arc: f64) -> Result<Self> {
        if !(arc >= 0.0) || !arc.is_finite() {
            return Err(Error::InvalidInput(format!(
                "arc length must be finite and >= 0, got {arc}"
            )));
        }
        Self::new(radius, z, arc / (radius + z))
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Radius of the emitter shell.
    pub fn r(&self) -> f64 {
        self.radius + self.z
    }

    pub fn arc(&self) -> f64 {
        self.theta * self.r()
    }

    pub fn chord(&self) -> f64 {
        2.0 * self.r() * (0.5 * self.theta).sin()
    }
}

/// Truncation control for the multipole sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieSeriesControl {
    tol: f64,
    l_max_cap: usize,
    nonret_l_max_cap: usize,
}

impl MieSeriesControl {
    pub const DEFAULT_TOL: f64 = 1e-10;
    pub const DEFAULT_NONRET_CAP: usize = 1_000_000;

    /// `l_max_cap` bounds the retarded sums, which need the special-function
    /// envelope (<= 200). The non-retarded sums contain only powers of R/r
    /// and use the separate `nonret_l_max_cap`.
    pub fn new(tol: f64, l_max_cap: usize, nonret_l_max_cap: usize) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidInput(format!(
                "series tolerance must lie in (0, 1), got {tol}"
            )));
        }
        if !(1..=MAX_ORDER).contains(&l_max_cap) {
            return Err(Error::InvalidInput(format!(
                "l_max cap must lie in [1, {MAX_ORDER}], got {l_max_cap}"
            )));
        }
        if nonret_l_max_cap < 1 {
            return Err(Error::InvalidInput(
                "non-retarded l_max cap must be >= 1".into(),
            ));
        }
        Ok(Self {
            tol,
            l_max_cap,
            nonret_l_max_cap,
        })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn l_max_cap(&self) -> usize {
        self.l_max_cap
    }

    pub fn nonret_l_max_cap(&self) -> usize {
        self.nonret_l_max_cap
    }
}

impl Default for MieSeriesControl {
    fn default() -> Self {
        Self {
            tol: Self::DEFAULT_TOL,
            l_max_cap: MAX_ORDER,
            nonret_l_max_cap: Self::DEFAULT_NONRET_CAP,
        }
    }
}

/// Result of a truncated multipole sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum<T> {
    pub value: T,
    /// Highest order included.
    pub l_max: usize,
    /// Geometric estimate of the omitted remainder, relative to the summed envelope.
    pub tail: f64,
}

/// Tracks the stopping rule: QUIET_TERMS consecutive envelopes below tol
/// times the running envelope sum.
struct Truncation {
    tol: f64,
    env_sum: f64,
    last_env: f64,
    ratio: f64,
    quiet: usize,
}

impl Truncation {
    fn new(tol: f64) -> Self {
        Self {
            tol,
            env_sum: 0.0,
            last_env: 0.0,
            ratio: 1.0,
            quiet: 0,
        }
    }

    /// Feed one envelope; true once the series may stop.
    fn push(&mut self, env: f64) -> bool {
        if self.last_env > 0.0 {
            self.ratio = env / self.last_env;
        }
        self.last_env = env;
        self.env_sum += env;
        if env <= self.tol * self.env_sum {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= QUIET_TERMS
    }

    fn tail(&self) -> f64 {
        if self.env_sum == 0.0 {
            return 0.0;
        }
        let rest = if self.ratio < 1.0 {
            self.last_env * self.ratio / (1.0 - self.ratio)
        } else {
            f64::INFINITY
        };
        rest / self.env_sum
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!(
            "sphere radius must be finite and > 0, got {radius}"
        )));
    }
    Ok(())
}

fn check_radii(r: f64, radius: f64) -> Result<()> {
    check_radius(radius)?;
    if !(r > radius) || !r.is_finite() {
        return Err(Error::InvalidInput(format!(
            "evaluation radius {r} must exceed the sphere radius {radius}"
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

fn check_order(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidInput(
            "Mie coefficients start at l = 1".into(),
        ));
    }
    Ok(())
}

/// Numerators and h_l(k0 R)-scaled denominators of the Mie coefficients.
/// Returns (r_s h_l(k0R), r_p h_l(k0R), h_l(k0R)).
fn scaled_coefficients(l: usize, omega: f64, radius: f64, eps: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
    let k0 = wave_number(omega);
    let k = eps.sqrt() * k0;
    let x0 = Complex64::new(k0 * radius, 0.0);
    let x1 = k * radius;
    let (j0, eta0) = j_and_eta(l, x0)?;
    let (j1, eta1) = j_and_eta(l, x1)?;
    let (h0, zeta0) = h_and_zeta(l, x0)?;
    let zeta_over_h = zeta0 / h0;
    let ns = k * eta1 * j0 - k0 * eta0 * j1;
    let ds = k * eta1 - k0 * zeta_over_h * j1;
    let np = k * eta0 * j1 - k0 * eta1 * j0;
    let dp = k * zeta_over_h * j1 - k0 * eta1;
    Ok((-ns / ds, -np / dp, h0))
}

/// s-polarised Mie reflection coefficient.
pub fn mie_rs(l: usize, omega: f64, radius: f64, eps: Complex64) -> Result<Complex64> {
    check_order(l)?;
    check_omega(omega)?;
    check_radius(radius)?;
    let (a, _, h0) = scaled_coefficients(l, omega, radius, eps)?;
    Ok(a / h0)
}

/// p-polarised Mie reflection coefficient.
pub fn mie_rp(l: usize, omega: f64, radius: f64, eps: Complex64) -> Result<Complex64> {
    check_order(l)?;
    check_omega(omega)?;
    check_radius(radius)?;
    let (_, a, h0) = scaled_coefficients(l, omega, radius, eps)?;
    Ok(a / h0)
}

/// Small-sphere form i (l+1)/((2l+1)!!(2l-1)!!) (eps-1)/(l eps + l + 1) (k0 R)^{2l+1}.
pub fn mie_rp_nonret(l: usize, omega: f64, radius: f64, eps: Complex64) -> Result<Complex64> {
    check_order(l)?;
    check_omega(omega)?;
    let lf = l as f64;
    let x = wave_number(omega) * radius;
    // (2l+1)!! = double_factorial_odd(l + 1), (2l-1)!! = double_factorial_odd(l)
    let prefactor = (lf + 1.0) / (double_factorial_odd(l + 1) * double_factorial_odd(l));
    let alpha = (eps - 1.0) / (eps * lf + lf + 1.0);
    Ok(I * prefactor * alpha * x.powi(2 * l as i32 + 1))
}

/// sum_l w_l alpha_l q^{2l+1} P_l with alpha_l = (eps-1)/(l eps + l + 1).
/// The stopping rule looks at |w_l alpha_l q^{2l+1}| so zeros of P_l cannot
/// end the sum early.
fn nonret_series(
    q: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
    weight: impl Fn(f64) -> f64,
    legendre: impl Iterator<Item = f64>,
) -> Result<SeriesSum<Complex64>> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut trunc = Truncation::new(ctl.tol);
    let q2 = q * q;
    let mut qpow = q * q2;
    let num = eps - 1.0;
    // P_0 is never used
    for (l, p) in (1..=ctl.nonret_l_max_cap).zip(legendre.skip(1)) {
        let lf = l as f64;
        let denom = eps * lf + lf + 1.0;
        if denom.norm() < POLE_BAND * lf {
            return Err(Error::NearMultipolePole { l, eps });
        }
        let coef = num / denom * (weight(lf) * qpow);
        sum += coef * p;
        if trunc.push(coef.norm()) {
            return Ok(SeriesSum {
                value: sum,
                l_max: l,
                tail: trunc.tail(),
            });
        }
        qpow *= q2;
    }
    Err(Error::SeriesNotConverged {
        l_max: ctl.nonret_l_max_cap,
        tail: trunc.tail(),
    })
}

/// 2 sum_l l (l+1)^2 alpha_l q^{2l+1} P_l, shared by the coincidence rr entry
/// and the two-point rr component so that theta = 0 reproduces it exactly.
fn nonret_rr_sum(q: f64, eps: Complex64, ctl: &MieSeriesControl, x: f64) -> Result<SeriesSum<Complex64>> {
    let s = nonret_series(q, eps, ctl, |l| 2.0 * l * (l + 1.0) * (l + 1.0), LegendreSeries::new(x)?)?;
    Ok(s)
}

fn nonret_prefactor(r: f64, omega: f64) -> f64 {
    C * C / (8.0 * PI * omega * omega * r * r * r)
}

/// Non-retarded coincidence tensor
/// (c^2/(8 pi omega^2 r^3)) sum_l l(l+1) alpha_l (R/r)^{2l+1} [2(l+1) e_r e_r + l (e_t e_t + e_p e_p)].
pub fn g_sphere_coincident_nonret(
    r: f64,
    omega: f64,
    radius: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<GreenTensor> {
    Ok(g_sphere_coincident_nonret_series(r, omega, radius, eps, ctl)?.value)
}

/// As [`g_sphere_coincident_nonret`], reporting the truncation.
pub fn g_sphere_coincident_nonret_series(
    r: f64,
    omega: f64,
    radius: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<SeriesSum<GreenTensor>> {
    check_radii(r, radius)?;
    check_omega(omega)?;
    let q = radius / r;
    let pref = nonret_prefactor(r, omega);
    let rr = nonret_rr_sum(q, eps, ctl, 1.0)?;
    let tt = nonret_series(q, eps, ctl, |l| l * l * (l + 1.0), std::iter::repeat(1.0))?;
    Ok(SeriesSum {
        value: GreenTensor::diagonal([rr.value * pref, tt.value * pref, tt.value * pref], Basis::Spherical),
        l_max: rr.l_max.max(tt.l_max),
        tail: rr.tail.max(tt.tail),
    })
}

/// Non-retarded two-point rr component
/// (1/(4 pi k0^2 r^3)) sum_l l(l+1)^2 alpha_l (R/r)^{2l+1} P_l(cos theta).
pub fn g_sphere_rr_twopoint_nonret(
    geom: &SphereGeometry,
    omega: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<Complex64> {
    Ok(g_sphere_rr_twopoint_nonret_series(geom, omega, eps, ctl)?.value)
}

pub fn g_sphere_rr_twopoint_nonret_series(
    geom: &SphereGeometry,
    omega: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<SeriesSum<Complex64>> {
    check_omega(omega)?;
    let r = geom.r();
    let q = geom.radius() / r;
    let s = nonret_rr_sum(q, eps, ctl, geom.theta().cos())?;
    Ok(SeriesSum {
        value: s.value * nonret_prefactor(r, omega),
        ..s
    })
}

/// Per-order building blocks of the retarded sums at radius r:
/// (r_p h_l(x)^2, r_p zeta_l(x)^2, r_s h_l(x)^2) with x = k0 r.
/// Each is formed as (r h_l(k0R)) * f(x) * (f(x)/h_l(k0R)) so neither the
/// tiny coefficient nor the huge Hankel function is squared on its own.
fn retarded_blocks(
    l: usize,
    omega: f64,
    radius: f64,
    r: f64,
    eps: Complex64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let (rs_h0, rp_h0, h0) = scaled_coefficients(l, omega, radius, eps)?;
    let x = Complex64::new(wave_number(omega) * r, 0.0);
    let (h, zeta) = h_and_zeta(l, x)?;
    Ok((
        rp_h0 * h * (h / h0),
        rp_h0 * zeta * (zeta / h0),
        rs_h0 * h * (h / h0),
    ))
}

/// Retarded coincidence tensor
/// (i k0/8 pi) sum_l (2l+1) [r_s h^2 (e_t e_t + e_p e_p)
///   + r_p {2 l(l+1)/(k0 r)^2 h^2 e_r e_r + zeta^2 (e_t e_t + e_p e_p)}].
pub fn g_sphere_coincident(
    r: f64,
    omega: f64,
    radius: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<GreenTensor> {
    Ok(g_sphere_coincident_series(r, omega, radius, eps, ctl)?.value)
}

pub fn g_sphere_coincident_series(
    r: f64,
    omega: f64,
    radius: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<SeriesSum<GreenTensor>> {
    check_radii(r, radius)?;
    check_omega(omega)?;
    let k0 = wave_number(omega);
    let x2 = (k0 * r) * (k0 * r);
    let (mut rr, mut tt) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut trunc = Truncation::new(ctl.tol);
    for l in 1..=ctl.l_max_cap {
        let lf = l as f64;
        let (p_h2, p_z2, s_h2) = retarded_blocks(l, omega, radius, r, eps)?;
        let t_rr = p_h2 * ((2.0 * lf + 1.0) * 2.0 * lf * (lf + 1.0) / x2);
        let t_tt = (s_h2 + p_z2) * (2.0 * lf + 1.0);
        rr += t_rr;
        tt += t_tt;
        if trunc.push(t_rr.norm() + t_tt.norm()) {
            let pref = I * k0 / (8.0 * PI);
            return Ok(SeriesSum {
                value: GreenTensor::diagonal([rr * pref, tt * pref, tt * pref], Basis::Spherical),
                l_max: l,
                tail: trunc.tail(),
            });
        }
    }
    Err(Error::SeriesNotConverged {
        l_max: ctl.l_max_cap,
        tail: trunc.tail(),
    })
}

/// Retarded two-point rr component
/// (i/(4 pi k0 r^2)) sum_l (2l+1) l(l+1) r_p h_l(k0 r)^2 P_l(cos theta).
pub fn g_sphere_rr_twopoint_retarded(
    geom: &SphereGeometry,
    omega: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<Complex64> {
    Ok(g_sphere_rr_twopoint_retarded_series(geom, omega, eps, ctl)?.value)
}

pub fn g_sphere_rr_twopoint_retarded_series(
    geom: &SphereGeometry,
    omega: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<SeriesSum<Complex64>> {
    check_omega(omega)?;
    let (r, radius) = (geom.r(), geom.radius());
    let k0 = wave_number(omega);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut trunc = Truncation::new(ctl.tol);
    let legendre = LegendreSeries::new(geom.theta().cos())?;
    for (l, p) in (1..=ctl.l_max_cap).zip(legendre.skip(1)) {
        let lf = l as f64;
        let (p_h2, _, _) = retarded_blocks(l, omega, radius, r, eps)?;
        let coef = p_h2 * ((2.0 * lf + 1.0) * lf * (lf + 1.0));
        sum += coef * p;
        if trunc.push(coef.norm()) {
            return Ok(SeriesSum {
                value: sum * (I / (4.0 * PI * k0 * r * r)),
                l_max: l,
                tail: trunc.tail(),
            });
        }
    }
    Err(Error::SeriesNotConverged {
        l_max: ctl.l_max_cap,
        tail: trunc.tail(),
    })
}
