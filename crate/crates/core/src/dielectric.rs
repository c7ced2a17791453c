//! Relative permittivity from tabulated data or Lorentz-oscillator models.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::io::BufRead;
use std::path::Path;

use num_complex::Complex64;

use crate::constants::{angular_frequency_to_ev, ev_to_angular_frequency};
use crate::error::{Error, Result};

/// Distance from eps = -1 (and from the multipole poles) treated as singular.
pub const POLE_BAND: f64 = 1e-6;

/// Tabulated permittivity on a photon-energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DielectricTable {
    energies_ev: Vec<f64>,
    // the same grid in rad/s; queries compare against this
    omegas: Vec<f64>,
    eps: Vec<Complex64>,
    imag_axis: Option<Vec<(f64, f64)>>,
    name: String,
}

impl DielectricTable {
    /// Build from parallel arrays, enforcing the table invariants.
    pub fn new(energies_ev: Vec<f64>, eps: Vec<Complex64>) -> Result<Self> {
        if energies_ev.len() != eps.len() {
            return Err(Error::InvalidInput(
                "energy and permittivity columns differ in length".into(),
            ));
        }
        if energies_ev.is_empty() {
            return Err(Error::InvalidInput("dielectric table has no rows".into()));
        }
        for i in 0..energies_ev.len() {
            if !(energies_ev[i] >= 0.0) || !energies_ev[i].is_finite() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("photon energy {} must be finite and >= 0", energies_ev[i]),
                });
            }
            if i > 0 && energies_ev[i] <= energies_ev[i - 1] {
                return Err(Error::NonMonotonicGrid { line: i + 1 });
            }
            if eps[i].im < 0.0 {
                return Err(Error::NegativeLoss { line: i + 1 });
            }
        }
        let omegas = energies_ev
            .iter()
            .map(|&e| ev_to_angular_frequency(e))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            energies_ev,
            omegas,
            eps,
            imag_axis: None,
            name: "table".into(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.energies_ev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies_ev.is_empty()
    }

    pub fn energies_ev(&self) -> &[f64] {
        &self.energies_ev
    }

    pub fn values(&self) -> &[Complex64] {
        &self.eps
    }

    /// Tabulated angular frequencies (rad/s).
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Tabulated range in rad/s.
    pub fn omega_range(&self) -> (f64, f64) {
        (self.omegas[0], self.omegas[self.len() - 1])
    }

    /// Attach imaginary-axis samples (xi in rad/s, real eps(i xi)).
    pub fn with_imag_axis(mut self, samples: Vec<(f64, f64)>) -> Result<Self> {
        validate_imag_axis(&samples)?;
        self.imag_axis = Some(samples);
        Ok(self)
    }

    pub fn imag_axis(&self) -> Option<&[(f64, f64)]> {
        self.imag_axis.as_deref()
    }

    /// Linear interpolation in photon energy; no extrapolation.
    pub fn permittivity_at(&self, omega: f64) -> Result<Complex64> {
        let (lo, hi) = self.omega_range();
        if !(omega >= lo && omega <= hi) {
            return Err(Error::OutOfTableRange {
                value: angular_frequency_to_ev(omega),
                min: self.energies_ev[0],
                max: self.energies_ev[self.len() - 1],
                unit: "eV",
            });
        }
        // photon energy is proportional to omega, so interpolating on the
        // rad/s grid is the same straight line
        match self.omegas.binary_search_by(|v| v.total_cmp(&omega)) {
            Ok(i) => Ok(self.eps[i]),
            Err(i) => {
                let (w0, w1) = (self.omegas[i - 1], self.omegas[i]);
                let t = (omega - w0) / (w1 - w0);
                Ok(self.eps[i - 1] * (1.0 - t) + self.eps[i] * t)
            }
        }
    }

    /// eps(i xi) from attached samples, otherwise from the Kramers-Kronig
    /// integral 1 + (2/pi) int w Im eps(w) / (w^2 + xi^2) dw by trapezoid on
    /// the table grid.
    pub fn permittivity_imag_axis(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "imaginary frequency must be finite and >= 0, got {xi}"
            )));
        }
        if let Some(samples) = &self.imag_axis {
            let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
            if !(xi >= lo && xi <= hi) {
                return Err(Error::OutOfTableRange {
                    value: xi,
                    min: lo,
                    max: hi,
                    unit: "rad/s",
                });
            }
            let i = samples.partition_point(|s| s.0 < xi);
            if samples[i].0 == xi {
                return Ok(samples[i].1);
            }
            let ((x0, y0), (x1, y1)) = (samples[i - 1], samples[i]);
            let t = (xi - x0) / (x1 - x0);
            return Ok(y0 * (1.0 - t) + y1 * t);
        }
        let point = |i: usize| {
            let w = self.omegas[i];
            let denom = w * w + xi * xi;
            let f = if denom > 0.0 {
                w * self.eps[i].im / denom
            } else {
                0.0
            };
            (w, f)
        };
        let mut integral = 0.0;
        let mut prev = point(0);
        for i in 1..self.len() {
            let cur = point(i);
            integral += 0.5 * (cur.0 - prev.0) * (cur.1 + prev.1);
            prev = cur;
        }
        Ok(1.0 + 2.0 / PI * integral)
    }
}

fn validate_imag_axis(samples: &[(f64, f64)]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidInput(
            "imaginary-axis table has no rows".into(),
        ));
    }
    for (i, &(xi, v)) in samples.iter().enumerate() {
        let line = i + 1;
        if !(xi >= 0.0) || !xi.is_finite() || !v.is_finite() {
            return Err(Error::Parse {
                line,
                msg: "imaginary-axis row must hold finite xi >= 0 and eps".into(),
            });
        }
        if i > 0 && xi <= samples[i - 1].0 {
            return Err(Error::NonMonotonicGrid { line });
        }
        if v < 1.0 || (i > 0 && v > samples[i - 1].1) {
            return Err(Error::ImagAxisInvariant { line });
        }
    }
    Ok(())
}

/// Data rows of a comma-separated stream, with '#' comments and blank lines
/// skipped. Yields (1-based line number, fields).
fn csv_rows<R: BufRead>(source: R, columns: usize) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != columns {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {columns} columns, found {}", fields.len()),
            });
        }
        let values = fields
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("cannot parse '{f}' as a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line_no, values));
    }
    Ok(rows)
}

/// Parse `energy_eV,eps_re,eps_im` rows.
pub fn load_table<R: BufRead>(source: R) -> Result<DielectricTable> {
    let rows = csv_rows(source, 3)?;
    if rows.is_empty() {
        return Err(Error::InvalidInput("dielectric table has no rows".into()));
    }
    let mut energies = Vec::with_capacity(rows.len());
    let mut eps = Vec::with_capacity(rows.len());
    for (i, (line, v)) in rows.iter().enumerate() {
        if !(v[0] >= 0.0) || !v.iter().all(|x| x.is_finite()) {
            return Err(Error::Parse {
                line: *line,
                msg: "values must be finite with energy >= 0".into(),
            });
        }
        if i > 0 && v[0] <= energies[i - 1] {
            return Err(Error::NonMonotonicGrid { line: *line });
        }
        if v[2] < 0.0 {
            return Err(Error::NegativeLoss { line: *line });
        }
        energies.push(v[0]);
        eps.push(Complex64::new(v[1], v[2]));
    }
    DielectricTable::new(energies, eps)
}

/// Parse `xi_rad_s,eps` rows.
pub fn load_imag_axis<R: BufRead>(source: R) -> Result<Vec<(f64, f64)>> {
    let rows = csv_rows(source, 2)?;
    let samples: Vec<(f64, f64)> = rows.iter().map(|(_, v)| (v[0], v[1])).collect();
    if let Err(e) = validate_imag_axis(&samples) {
        // report the line number from the file rather than the row index
        return Err(match e {
            Error::NonMonotonicGrid { line } => Error::NonMonotonicGrid { line: rows[line - 1].0 },
            Error::ImagAxisInvariant { line } => Error::ImagAxisInvariant { line: rows[line - 1].0 },
            Error::Parse { line, msg } => Error::Parse { line: rows[line - 1].0, msg },
            other => other,
        });
    }
    Ok(samples)
}

/// Load a table from disk; the file name becomes the medium name.
pub fn load_table_file(path: &Path) -> std::io::Result<Result<DielectricTable>> {
    let file = std::fs::File::open(path)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".into());
    Ok(load_table(std::io::BufReader::new(file)).map(|t| t.with_name(name)))
}

/// One damped oscillator; all quantities in rad/s (strength in rad^2/s^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub strength: f64,
    pub resonance: f64,
    pub damping: f64,
}

/// eps(w) = eps_inf + sum_j f_j / (w_j^2 - w^2 - i g_j w).
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzModel {
    eps_inf: f64,
    oscillators: Vec<Oscillator>,
}

impl LorentzModel {
    pub fn new(eps_inf: f64, oscillators: Vec<Oscillator>) -> Result<Self> {
        if !(eps_inf >= 1.0) || !eps_inf.is_finite() {
            return Err(Error::InvalidInput(format!(
                "eps_inf must be finite and >= 1, got {eps_inf}"
            )));
        }
        for o in &oscillators {
            let ok = o.strength >= 0.0
                && o.strength.is_finite()
                && o.resonance > 0.0
                && o.resonance.is_finite()
                && o.damping > 0.0
                && o.damping.is_finite();
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "oscillator needs f >= 0, w > 0, g > 0; got {o:?}"
                )));
            }
        }
        Ok(Self {
            eps_inf,
            oscillators,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            eps_inf: 1.0,
            oscillators: Vec::new(),
        }
    }

    /// Model with every parameter given in eV (strength in eV^2).
    pub fn from_ev(eps_inf: f64, oscillators_ev: &[(f64, f64, f64)]) -> Result<Self> {
        let s = ev_to_angular_frequency(1.0)?;
        let oscillators = oscillators_ev
            .iter()
            .map(|&(f, w, g)| Oscillator {
                strength: f * s * s,
                resonance: w * s,
                damping: g * s,
            })
            .collect();
        Self::new(eps_inf, oscillators)
    }

    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }

    pub fn oscillators(&self) -> &[Oscillator] {
        &self.oscillators
    }

    pub fn permittivity_at(&self, omega: f64) -> Complex64 {
        self.oscillators
            .iter()
            .fold(Complex64::new(self.eps_inf, 0.0), |acc, o| {
                let denom = Complex64::new(o.resonance * o.resonance - omega * omega, -o.damping * omega);
                acc + o.strength / denom
            })
    }

    pub fn permittivity_imag_axis(&self, xi: f64) -> f64 {
        self.oscillators.iter().fold(self.eps_inf, |acc, o| {
            acc + o.strength / (o.resonance * o.resonance + xi * xi + o.damping * xi)
        })
    }

    /// eps(0) = eps_inf + sum f_j / w_j^2.
    pub fn static_permittivity(&self) -> f64 {
        self.permittivity_imag_axis(0.0)
    }
}

impl fmt::Display for LorentzModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = ev_to_angular_frequency(1.0).map_err(|_| fmt::Error)?;
        write!(f, "lorentz:{}:", self.eps_inf)?;
        for (i, o) in self.oscillators.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(
                f,
                "{},{},{}",
                o.strength / (s * s),
                o.resonance / s,
                o.damping / s
            )?;
        }
        Ok(())
    }
}

/// Parses the `Display` form `lorentz:<eps_inf>:<f,w,g;...>` (eV units);
/// the oscillator list may be empty.
impl FromStr for LorentzModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidInput(format!("model '{s}': {msg}"));
        let rest = s
            .strip_prefix("lorentz:")
            .ok_or_else(|| bad("expected lorentz:<eps_inf>:<f,w,g;...>"))?;
        let (inf, list) = rest.split_once(':').unwrap_or((rest, ""));
        let eps_inf: f64 = inf.trim().parse().map_err(|_| bad("eps_inf is not a number"))?;
        let mut oscillators = Vec::new();
        for item in list.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let v = item
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("oscillator fields must be numbers"))?;
            if v.len() != 3 {
                return Err(bad("each oscillator needs f,w,g"));
            }
            oscillators.push((v[0], v[1], v[2]));
        }
        LorentzModel::from_ev(eps_inf, &oscillators)
    }
}

/// Any source of eps(w).
#[derive(Debug, Clone, PartialEq)]
pub enum Medium {
    Table(DielectricTable),
    Lorentz(LorentzModel),
}

impl Medium {
    pub fn vacuum() -> Self {
        Medium::Lorentz(LorentzModel::vacuum())
    }

    pub fn permittivity_at(&self, omega: f64) -> Result<Complex64> {
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::InvalidInput(format!(
                "angular frequency must be finite and >= 0, got {omega}"
            )));
        }
        match self {
            Medium::Table(t) => t.permittivity_at(omega),
            Medium::Lorentz(m) => Ok(m.permittivity_at(omega)),
        }
    }

    pub fn permittivity_imag_axis(&self, xi: f64) -> Result<f64> {
        match self {
            Medium::Table(t) => t.permittivity_imag_axis(xi),
            Medium::Lorentz(m) => {
                if !(xi >= 0.0) || !xi.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "imaginary frequency must be finite and >= 0, got {xi}"
                    )));
                }
                Ok(m.permittivity_imag_axis(xi))
            }
        }
    }

    /// Identifier used in output metadata.
    pub fn id(&self) -> String {
        match self {
            Medium::Table(t) => t.name().to_string(),
            Medium::Lorentz(m) => m.to_string(),
        }
    }
}

/// Non-retarded p-polarised reflection (eps - 1)/(eps + 1).
pub fn fresnel_rp_nonret(eps: Complex64) -> Result<Complex64> {
    let denom = eps + 1.0;
    if denom.norm() < POLE_BAND {
        return Err(Error::SurfacePole { eps });
    }
    Ok((eps - 1.0) / denom)
}
