//! Superradiance fidelity sigma of two identical emitters, and parallel
//! parameter scans producing sigma curves.
//!
//! Every sigma is built from the scalar projections normal to the surface:
//! sigma = 1 + [Im G0(s) + Im G1(A, B)] / [Im G0(0) + Im G1(A, A)].
//! The ratio is evaluated relative to the free-space coincidence value, so a
//! transparent environment reproduces [`sigma_free`] bit for bit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::wave_number;
use crate::dielectric::fresnel_rp_nonret;
use crate::error::{Error, Result};
use crate::green_free::sinc;
use crate::green_planar::{g1_planar_coincident_nonret, g1_planar_zz_twopoint_nonret};
use crate::green_sphere::{
    g_sphere_coincident_nonret, g_sphere_rr_twopoint_nonret, MieSeriesControl, SphereGeometry,
};

/// Environment variable capping the number of scan threads.
pub const THREADS_ENV: &str = "SRFID_THREADS";

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidInput(format!(
            "angular frequency must be finite and > 0, got {omega}"
        )));
    }
    Ok(())
}

/// 1 + sinc(k0 x).
pub fn sigma_free(x: f64, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!(
            "separation must be finite and >= 0, got {x}"
        )));
    }
    Ok(1.0 + sinc(wave_number(omega) * x))
}

/// 1 + [sinc(k0 s) + g_cross/a] / [1 + g_self/a], a = k0/(6 pi).
fn assemble(k0: f64, s: f64, g_cross: f64, g_self: f64) -> Result<f64> {
    let a = k0 / (6.0 * PI);
    let den = 1.0 + g_self / a;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateModeDensity);
    }
    let sigma = 1.0 + (sinc(k0 * s) + g_cross / a) / den;
    if !sigma.is_finite() {
        return Err(Error::DegenerateModeDensity);
    }
    Ok(sigma)
}

/// Fidelity for two emitters at height z above a half-space, in-plane
/// separation x, from the non-retarded zz projections.
pub fn sigma_plane(x: f64, z: f64, omega: f64, eps: Complex64) -> Result<f64> {
    check_omega(omega)?;
    let cross = g1_planar_zz_twopoint_nonret(x, z, omega, eps)?.im;
    let own = g1_planar_coincident_nonret(z, omega, eps)?.get(2, 2).im;
    assemble(wave_number(omega), x, cross, own)
}

/// 1 + (sigma_fs - 1) 8 k0^3 z^3/(3 Im r_p), the form valid for z/x << 1
/// when the surface term dominates the free-space self term.
pub fn sigma_plane_small_lambda(x: f64, z: f64, omega: f64, eps: Complex64) -> Result<f64> {
    let sfs = sigma_free(x, omega)?;
    if !(z > 0.0) || !(z < x) {
        return Err(Error::InvalidInput(format!(
            "small-lambda form needs 0 < z < x, got z = {z}, x = {x}"
        )));
    }
    let im_rp = fresnel_rp_nonret(eps)?.im;
    if im_rp == 0.0 {
        return Err(Error::InvalidInput(
            "small-lambda form divides by Im r_p, which is zero here".into(),
        ));
    }
    let k0z = wave_number(omega) * z;
    Ok(1.0 + (sfs - 1.0) * 8.0 * k0z.powi(3) / (3.0 * im_rp))
}

/// Fidelity for two emitters outside a sphere, from the non-retarded rr
/// projections. The free-space term uses the chord between the emitters.
pub fn sigma_sphere(
    geom: &SphereGeometry,
    omega: f64,
    eps: Complex64,
    ctl: &MieSeriesControl,
) -> Result<f64> {
    check_omega(omega)?;
    let cross = g_sphere_rr_twopoint_nonret(geom, omega, eps, ctl)?.im;
    let own = g_sphere_coincident_nonret(geom.r(), omega, geom.radius(), eps, ctl)?
        .get(0, 0)
        .im;
    assemble(wave_number(omega), geom.chord(), cross, own)
}

/// Parameter grid of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    name: String,
    unit: String,
    min: f64,
    max: f64,
    count: usize,
    log: bool,
}

impl Sweep {
    pub fn new(
        name: impl Into<String>,
        unit: impl Into<String>,
        min: f64,
        max: f64,
        count: usize,
        log: bool,
    ) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyGrid);
        }
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidInput("sweep bounds must be finite".into()));
        }
        if count > 1 && !(max > min) {
            return Err(Error::InvalidInput(format!(
                "sweep needs max > min for more than one point, got {min}:{max}"
            )));
        }
        if log && !(min > 0.0) {
            return Err(Error::InvalidInput(
                "logarithmic sweep needs a positive lower bound".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            unit: unit.into(),
            min,
            max,
            count,
            log,
        })
    }

    /// A one-point grid.
    pub fn single(name: impl Into<String>, unit: impl Into<String>, value: f64) -> Result<Self> {
        Self::new(name, unit, value, value, 1, false)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_log(&self) -> bool {
        self.log
    }

    /// Grid values; the end points are exactly min and max.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.count - 1 {
                    return self.max;
                }
                let t = i as f64 / n;
                if self.log {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }
}

/// sigma sampled over a parameter grid. Points that failed are kept apart,
/// in grid order, with their errors.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    pub parameter: String,
    pub unit: String,
    pub samples: Vec<(f64, f64)>,
    pub failures: Vec<(f64, Error)>,
    pub metadata: Vec<(String, String)>,
}

impl FidelityCurve {
    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.push((key.into(), value.into()));
        self
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }
}

/// Thread cap from the environment, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
}

/// Evaluate `generator` at every grid point in parallel. The output keeps
/// grid order whatever the completion order; non-finite values count as
/// failures.
pub fn scan<F>(generator: F, sweep: &Sweep) -> Result<FidelityCurve>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let grid = sweep.values();
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let eval = || -> Vec<(f64, Result<f64>)> {
        grid.par_iter()
            .map(|&p| {
                let v = generator(p).and_then(|s| {
                    if s.is_finite() {
                        Ok(s)
                    } else {
                        Err(Error::DegenerateModeDensity)
                    }
                });
                (p, v)
            })
            .collect()
    };
    let results = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(eval),
            Err(_) => eval(),
        },
        None => eval(),
    };
    let mut curve = FidelityCurve {
        parameter: sweep.name.clone(),
        unit: sweep.unit.clone(),
        samples: Vec::with_capacity(results.len()),
        failures: Vec::new(),
        metadata: Vec::new(),
    };
    for (p, r) in results {
        match r {
            Ok(s) => curve.samples.push((p, s)),
            Err(e) => curve.failures.push((p, e)),
        }
    }
    Ok(curve)
}
