use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest multipole order supported by the spherical Bessel family.
pub const MAX_ORDER: usize = 200;
/// Largest |z| supported by the spherical Bessel family.
pub const MAX_ARGUMENT: f64 = 1e4;

const I: Complex64 = Complex64::new(0.0, 1.0);
// Below this |z| the sinc kernel is replaced by its Taylor series.
const SINC_SERIES_CUTOFF: f64 = 1e-4;
// Stored recurrence values are rescaled once they exceed this magnitude.
const RESCALE_THRESHOLD: f64 = 1e200;
// Results smaller than this cannot be represented to full relative accuracy.
const UNDERFLOW_FLOOR: f64 = 1e-290;

fn check_envelope(func: &'static str, l: usize, z: Complex64) -> Result<()> {
    if l > MAX_ORDER || !(z.norm() <= MAX_ARGUMENT) {
        return Err(Error::OutOfEnvelope { func, l, z });
    }
    Ok(())
}

fn finite(func: &'static str, l: usize, z: Complex64, v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::OutOfEnvelope { func, l, z })
    }
}

fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < SINC_SERIES_CUTOFF {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
    } else {
        z.sin() / z
    }
}

/// j_0(z) and j_1(z) in closed form. Only used where |z| >= 1 or for j_0.
fn j0_j1(z: Complex64) -> (Complex64, Complex64) {
    let (s, c) = (z.sin(), z.cos());
    (sinc(z), (s - z * c) / (z * z))
}

/// Spherical Bessel functions j_0..=j_{l_max} at complex z.
///
/// Orders above |z| come from Miller's downward recurrence normalised
/// against j_0 or j_1; when every requested order satisfies l <= |z| the
/// upward recurrence from the closed forms is used instead.
pub fn sph_bessel_j_seq(l_max: usize, z: Complex64) -> Result<Vec<Complex64>> {
    const FUNC: &str = "sph_bessel_j";
    check_envelope(FUNC, l_max, z)?;
    let mut out = vec![Complex64::new(0.0, 0.0); l_max + 1];
    if z == Complex64::new(0.0, 0.0) {
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    let az = z.norm();
    if l_max == 0 {
        out[0] = finite(FUNC, 0, z, sinc(z))?;
        return Ok(out);
    }

    if az >= l_max as f64 {
        let (j0, j1) = j0_j1(z);
        out[0] = j0;
        out[1] = j1;
        for n in 1..l_max {
            out[n + 1] = (2 * n + 1) as f64 / z * out[n] - out[n - 1];
        }
    } else {
        let m = l_max as f64;
        let start = (m + (160.0 * m).sqrt() + 16.0).ceil() as usize;
        let mut upper = Complex64::new(0.0, 0.0);
        let mut current = Complex64::new(1.0, 0.0);
        for n in (1..=start).rev() {
            let lower = (2 * n + 1) as f64 / z * current - upper;
            upper = current;
            current = lower;
            if n - 1 <= l_max {
                out[n - 1] = current;
            }
            if current.norm() > RESCALE_THRESHOLD {
                let s = 1.0 / RESCALE_THRESHOLD;
                current *= s;
                upper *= s;
                for v in out.iter_mut().skip(n - 1) {
                    *v *= s;
                }
            }
        }
        // `current` now holds the unnormalised j_0; index 1 is already stored.
        let (scale, reference) = if az < 1.0 {
            (sinc(z), out[0])
        } else {
            let (j0, j1) = j0_j1(z);
            if j0.norm() >= j1.norm() {
                (j0, out[0])
            } else {
                (j1, out[1])
            }
        };
        // divide through the norm: |reference|^2 may underflow
        let norm = reference.norm();
        let factor = scale / (reference / norm) / norm;
        for v in out.iter_mut() {
            *v *= factor;
        }
    }

    for (n, v) in out.iter().enumerate() {
        finite(FUNC, n, z, *v)?;
    }
    if out[l_max].norm() < UNDERFLOW_FLOOR {
        return Err(Error::OutOfEnvelope {
            func: FUNC,
            l: l_max,
            z,
        });
    }
    Ok(out)
}

/// Spherical Bessel functions of the second kind y_0..=y_{l_max}, upward recurrence.
pub fn sph_bessel_y_seq(l_max: usize, z: Complex64) -> Result<Vec<Complex64>> {
    const FUNC: &str = "sph_bessel_y";
    check_envelope(FUNC, l_max, z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole { func: FUNC });
    }
    let mut out = Vec::with_capacity(l_max + 1);
    let (s, c) = (z.sin(), z.cos());
    out.push(-c / z);
    if l_max >= 1 {
        out.push(-c / (z * z) - s / z);
    }
    for n in 1..l_max {
        let next = (2 * n + 1) as f64 / z * out[n] - out[n - 1];
        out.push(finite(FUNC, n + 1, z, next)?);
    }
    for (n, v) in out.iter().enumerate() {
        finite(FUNC, n, z, *v)?;
    }
    Ok(out)
}

/// Spherical Hankel functions of the first kind h_0..=h_{l_max}.
pub fn sph_hankel1_seq(l_max: usize, z: Complex64) -> Result<Vec<Complex64>> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole { func: "sph_hankel1" });
    }
    let j = sph_bessel_j_seq(l_max, z)?;
    let y = sph_bessel_y_seq(l_max, z)?;
    Ok(j.into_iter().zip(y).map(|(j, y)| j + I * y).collect())
}

pub fn sph_bessel_j(l: usize, z: Complex64) -> Result<Complex64> {
    Ok(sph_bessel_j_seq(l, z)?[l])
}

pub fn sph_bessel_y(l: usize, z: Complex64) -> Result<Complex64> {
    Ok(sph_bessel_y_seq(l, z)?[l])
}

pub fn sph_hankel1(l: usize, z: Complex64) -> Result<Complex64> {
    Ok(sph_hankel1_seq(l, z)?[l])
}

/// Riccati-type derivative from a sequence of f_0..=f_{max(l,1)}:
/// (1/z) d[z f_l(z)]/dz = f_{l-1} - l f_l / z, and f_0/z - f_1 at l = 0.
fn riccati_from_seq(seq: &[Complex64], l: usize, z: Complex64) -> Complex64 {
    if l == 0 {
        seq[0] / z - seq[1]
    } else {
        seq[l - 1] - l as f64 * seq[l] / z
    }
}

/// eta_l(z) = (1/z) d[z j_l(z)]/dz.
pub fn riccati_eta(l: usize, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole { func: "riccati_eta" });
    }
    let seq = sph_bessel_j_seq(l.max(1), z)?;
    Ok(riccati_from_seq(&seq, l, z))
}

/// zeta_l(z) = (1/z) d[z h_l^(1)(z)]/dz.
pub fn riccati_zeta(l: usize, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole { func: "riccati_zeta" });
    }
    let seq = sph_hankel1_seq(l.max(1), z)?;
    Ok(riccati_from_seq(&seq, l, z))
}

/// j_l, eta_l at one order, sharing the recurrence.
pub(crate) fn j_and_eta(l: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole { func: "riccati_eta" });
    }
    let seq = sph_bessel_j_seq(l.max(1), z)?;
    Ok((seq[l], riccati_from_seq(&seq, l, z)))
}

/// h_l^(1), zeta_l at one order, sharing the recurrence.
pub(crate) fn h_and_zeta(l: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    let seq = sph_hankel1_seq(l.max(1), z)?;
    Ok((seq[l], riccati_from_seq(&seq, l, z)))
}
