//! Command-line front end. Every command writes a small CSV document:
//!
//! ```text
//! # srfid fidelity plane omega=3.4753e15 z=0.0000000005 medium=argon_like.csv sweep=x:0:2e-8:5
//! param,sigma
//! 0,2
//! ...
//! ```
//!
//! Floats use the shortest representation that parses back to the same
//! value, so repeated runs are byte-identical.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::constants::{ev_to_angular_frequency, wave_number, DEBYE};
use crate::dielectric::{load_table_file, LorentzModel, Medium};
use crate::emitters::{frequency_shift, purcell_rates, scattering_im_at, Emitter, Level, Site};
use crate::error::Error;
use crate::fidelity::{scan, sigma_free, sigma_plane, sigma_sphere, Sweep};
use crate::green::{Basis, GreenTensor};
use crate::green_planar::g1_planar_coincident_nonret;
use crate::green_sphere::{MieSeriesControl, SphereGeometry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISSING_FILE: i32 = 3;
pub const EXIT_TABLE_RANGE: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;
pub const EXIT_INVALID: i32 = 6;
pub const EXIT_IO: i32 = 7;
pub const EXIT_DEGENERATE: i32 = 8;

/// Above this k0 * length the near-field forms are questionable.
const RETARDATION_WARNING: f64 = 0.1;

#[derive(Parser, Debug)]
#[command(name = "srfid", version, about = "Green-function superradiance fidelity calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Superradiance fidelity sigma of two emitters.
    #[command(subcommand)]
    Fidelity(FidelityCmd),
    /// Total spontaneous decay rate of one emitter.
    #[command(subcommand)]
    Rate(RateCmd),
    /// Environment-induced frequency shift of one level.
    #[command(subcommand)]
    Shift(ShiftCmd),
    /// Dielectric data utilities.
    #[command(subcommand)]
    Dielectric(DielectricCmd),
}

#[derive(Subcommand, Debug)]
enum FidelityCmd {
    Free(CommonArgs),
    Plane(CommonArgs),
    Sphere(CommonArgs),
}

#[derive(Subcommand, Debug)]
enum RateCmd {
    Free(RateArgs),
    Plane(RateArgs),
    Sphere(RateArgs),
}

#[derive(Subcommand, Debug)]
enum ShiftCmd {
    Plane(ShiftArgs),
    Sphere(ShiftArgs),
}

#[derive(Subcommand, Debug)]
enum DielectricCmd {
    /// Print eps(omega) at the table nodes or on a sweep.
    Inspect(CommonArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Angular frequency in rad/s.
    #[arg(long, conflicts_with = "ev")]
    omega: Option<f64>,
    /// Photon energy in eV.
    #[arg(long)]
    ev: Option<f64>,
    /// Emitter height above the surface (m).
    #[arg(long)]
    z: Option<f64>,
    /// In-plane separation (m).
    #[arg(long)]
    x: Option<f64>,
    /// Sphere radius (m).
    #[arg(long)]
    radius: Option<f64>,
    /// Polar separation angle (rad).
    #[arg(long, conflicts_with = "arc")]
    theta: Option<f64>,
    /// Arc length between the emitters (m).
    #[arg(long)]
    arc: Option<f64>,
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    sweep_x: Option<String>,
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    sweep_z: Option<String>,
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    sweep_radius: Option<String>,
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    sweep_theta: Option<String>,
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    sweep_arc: Option<String>,
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    sweep_omega: Option<String>,
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    sweep_ev: Option<String>,
    /// Dielectric table (energy_eV,eps_re,eps_im).
    #[arg(long, conflicts_with = "model")]
    eps: Option<PathBuf>,
    /// Analytic medium, lorentz:<eps_inf>:<f,w,g;...> in eV.
    #[arg(long)]
    model: Option<String>,
    /// Relative truncation tolerance of the multipole sums.
    #[arg(long)]
    tol: Option<f64>,
    /// Largest multipole order.
    #[arg(long)]
    lmax: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct RateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dipole moment dx,dy,dz in debye (z along the surface normal).
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,1")]
    dipole: String,
    /// Use the retarded multipole sums (sphere only).
    #[arg(long)]
    retarded: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum State {
    Ground,
    Excited,
}

#[derive(Args, Debug, Clone)]
struct ShiftArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,1")]
    dipole: String,
    #[arg(long, value_enum, default_value = "excited")]
    state: State,
}

/// A failure together with its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::OutOfTableRange { .. } => EXIT_TABLE_RANGE,
        Error::SeriesNotConverged { .. } | Error::QuadratureNotConverged { .. } => EXIT_NOT_CONVERGED,
        Error::DegenerateModeDensity => EXIT_DEGENERATE,
        _ => EXIT_INVALID,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Param {
    Omega,
    Ev,
    Z,
    X,
    Radius,
    Theta,
    Arc,
}

impl Param {
    const ALL: [Param; 7] = [
        Param::Omega,
        Param::Ev,
        Param::Z,
        Param::X,
        Param::Radius,
        Param::Theta,
        Param::Arc,
    ];

    fn name(self) -> &'static str {
        match self {
            Param::Omega => "omega",
            Param::Ev => "ev",
            Param::Z => "z",
            Param::X => "x",
            Param::Radius => "radius",
            Param::Theta => "theta",
            Param::Arc => "arc",
        }
    }

    fn unit(self) -> &'static str {
        match self {
            Param::Omega => "rad/s",
            Param::Ev => "eV",
            Param::Theta => "rad",
            _ => "m",
        }
    }

    fn fixed(self, a: &CommonArgs) -> Option<f64> {
        match self {
            Param::Omega => a.omega,
            Param::Ev => a.ev,
            Param::Z => a.z,
            Param::X => a.x,
            Param::Radius => a.radius,
            Param::Theta => a.theta,
            Param::Arc => a.arc,
        }
    }

    fn sweep(self, a: &CommonArgs) -> Option<&str> {
        match self {
            Param::Omega => a.sweep_omega.as_deref(),
            Param::Ev => a.sweep_ev.as_deref(),
            Param::Z => a.sweep_z.as_deref(),
            Param::X => a.sweep_x.as_deref(),
            Param::Radius => a.sweep_radius.as_deref(),
            Param::Theta => a.sweep_theta.as_deref(),
            Param::Arc => a.sweep_arc.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    FidelityFree,
    FidelityPlane,
    FidelitySphere,
    RateFree,
    RatePlane,
    RateSphere,
    ShiftPlane,
    ShiftSphere,
    Inspect,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::FidelityFree => "fidelity free",
            Kind::FidelityPlane => "fidelity plane",
            Kind::FidelitySphere => "fidelity sphere",
            Kind::RateFree => "rate free",
            Kind::RatePlane => "rate plane",
            Kind::RateSphere => "rate sphere",
            Kind::ShiftPlane => "shift plane",
            Kind::ShiftSphere => "shift sphere",
            Kind::Inspect => "dielectric inspect",
        }
    }

    fn column(self) -> &'static str {
        match self {
            Kind::FidelityFree | Kind::FidelityPlane | Kind::FidelitySphere => "sigma",
            Kind::RateFree | Kind::RatePlane | Kind::RateSphere => "rate_per_s",
            Kind::ShiftPlane | Kind::ShiftSphere => "shift_rad_s",
            Kind::Inspect => "eps_re,eps_im",
        }
    }

    /// Geometry parameters the command understands (frequency aside).
    fn geometry(self) -> &'static [Param] {
        match self {
            Kind::FidelityFree => &[Param::X],
            Kind::FidelityPlane => &[Param::Z, Param::X],
            Kind::FidelitySphere => &[Param::Radius, Param::Z, Param::Theta, Param::Arc],
            Kind::RateFree | Kind::Inspect => &[],
            Kind::RatePlane | Kind::ShiftPlane => &[Param::Z],
            Kind::RateSphere | Kind::ShiftSphere => &[Param::Radius, Param::Z],
        }
    }

    fn needs_medium(self) -> bool {
        !matches!(self, Kind::FidelityFree | Kind::RateFree)
    }

    fn is_sphere(self) -> bool {
        matches!(self, Kind::FidelitySphere | Kind::RateSphere | Kind::ShiftSphere)
    }
}

/// Values of all parameters at one grid point.
#[derive(Debug, Clone, Copy, Default)]
struct Point {
    omega: Option<f64>,
    z: Option<f64>,
    x: Option<f64>,
    radius: Option<f64>,
    theta: Option<f64>,
    arc: Option<f64>,
}

impl Point {
    fn set(&mut self, p: Param, v: f64) -> Result<(), Error> {
        match p {
            Param::Omega => self.omega = Some(v),
            Param::Ev => self.omega = Some(ev_to_angular_frequency(v)?),
            Param::Z => self.z = Some(v),
            Param::X => self.x = Some(v),
            Param::Radius => self.radius = Some(v),
            Param::Theta => self.theta = Some(v),
            Param::Arc => self.arc = Some(v),
        }
        Ok(())
    }
}

fn need(v: Option<f64>, name: &str) -> Result<f64, Error> {
    v.ok_or_else(|| Error::InvalidInput(format!("--{name} is required")))
}

struct Job {
    kind: Kind,
    base: Point,
    sweep: Sweep,
    sweep_param: Param,
    header: Vec<(String, String)>,
    medium: Option<Medium>,
    ctl: MieSeriesControl,
    dipole: [f64; 3],
    retarded: bool,
    level: Level,
    /// `dielectric inspect` without a frequency: list the table nodes.
    at_nodes: bool,
}

impl Job {
    fn point(&self, v: f64) -> Result<Point, Error> {
        let mut p = self.base;
        p.set(self.sweep_param, v)?;
        Ok(p)
    }

    fn eps(&self, omega: f64) -> Result<Complex64, Error> {
        match &self.medium {
            Some(m) => m.permittivity_at(omega),
            None => Ok(Complex64::new(1.0, 0.0)),
        }
    }

    fn sphere(&self, p: &Point) -> Result<SphereGeometry, Error> {
        let (radius, z) = (need(p.radius, "radius")?, need(p.z, "z")?);
        match (p.theta, p.arc) {
            (Some(t), None) => SphereGeometry::new(radius, z, t),
            (None, Some(s)) => SphereGeometry::from_arc(radius, z, s),
            (None, None) => SphereGeometry::new(radius, z, 0.0),
            _ => Err(Error::InvalidInput("give either --theta or --arc".into())),
        }
    }

    fn site(&self, p: &Point) -> Result<Site, Error> {
        match self.kind {
            Kind::RateFree => Ok(Site::FreeSpace),
            Kind::RatePlane | Kind::ShiftPlane => Ok(Site::AbovePlane { z: need(p.z, "z")? }),
            _ => Ok(Site::OutsideSphere {
                radius: need(p.radius, "radius")?,
                z: need(p.z, "z")?,
            }),
        }
    }

    fn evaluate(&self, v: f64) -> Result<f64, Error> {
        let p = self.point(v)?;
        let omega = need(p.omega, "omega")?;
        match self.kind {
            Kind::FidelityFree => sigma_free(need(p.x, "x")?, omega),
            Kind::FidelityPlane => sigma_plane(need(p.x, "x")?, need(p.z, "z")?, omega, self.eps(omega)?),
            Kind::FidelitySphere => sigma_sphere(&self.sphere(&p)?, omega, self.eps(omega)?, &self.ctl),
            Kind::RateFree | Kind::RatePlane | Kind::RateSphere => {
                let site = self.site(&p)?;
                let em = Emitter::new(omega, self.dipole, site)?;
                let g = scattering_im_at(site, omega, self.eps(omega)?, &self.ctl, self.retarded)?;
                Ok(purcell_rates(&em, &g)?.total())
            }
            Kind::ShiftPlane | Kind::ShiftSphere => self.shift(&p, omega),
            Kind::Inspect => unreachable!("inspect has its own writer"),
        }
    }

    fn shift(&self, p: &Point, omega: f64) -> Result<f64, Error> {
        let site = self.site(p)?;
        let em = Emitter::new(omega, self.dipole, site)?;
        let Some(Medium::Table(table)) = &self.medium else {
            return Err(Error::InvalidInput("shift needs a tabulated medium (--eps)".into()));
        };
        let grid: Vec<f64> = table.omegas().to_vec();
        let im_g = |w: f64| -> Result<GreenTensor, Error> {
            if w == 0.0 {
                return Ok(GreenTensor::zeros(Basis::Cartesian));
            }
            let eps = table.permittivity_at(w)?;
            match site {
                Site::AbovePlane { z } => Ok(g1_planar_coincident_nonret(z, w, eps)?.im()),
                _ => scattering_im_at(site, w, eps, &self.ctl, false),
            }
        };
        frequency_shift(&em, im_g, &grid, self.level)
    }
}

/// `min:max:count[:log]`.
fn parse_sweep(param: Param, spec: &str) -> Result<Sweep, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::usage(format!("--sweep-{}: expected MIN:MAX:COUNT[:log], got '{spec}'", param.name()));
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    let log = match parts.get(3).map(|s| s.trim()) {
        None | Some("lin") => false,
        Some("log") => true,
        Some(_) => return Err(bad()),
    };
    Sweep::new(param.name(), param.unit(), min, max, count, log).map_err(Failure::from)
}

fn parse_dipole(s: &str) -> Result<[f64; 3], Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage(format!("--dipole: expected dx,dy,dz in debye, got '{s}'")))?;
    if v.len() != 3 {
        return Err(Failure::usage(format!("--dipole: expected three components, got '{s}'")));
    }
    Ok([v[0] * DEBYE, v[1] * DEBYE, v[2] * DEBYE])
}

fn load_medium(a: &CommonArgs) -> Result<Option<Medium>, Failure> {
    if let Some(path) = &a.eps {
        return match load_table_file(path) {
            Err(e) => Err(Failure {
                code: EXIT_MISSING_FILE,
                message: format!("{}: {e}", path.display()),
            }),
            Ok(Err(e)) => Err(Failure {
                code: exit_code(&e),
                message: format!("{}: {e}", path.display()),
            }),
            Ok(Ok(t)) => Ok(Some(Medium::Table(t))),
        };
    }
    if let Some(spec) = &a.model {
        return Ok(Some(Medium::Lorentz(spec.parse::<LorentzModel>()?)));
    }
    Ok(None)
}

/// Shortest round-trip decimal; exponent form for very large or small magnitudes.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn build_job(kind: Kind, a: &CommonArgs) -> Result<Job, Failure> {
    let geometry = kind.geometry();
    let mut sweeps = Param::ALL.iter().filter_map(|p| p.sweep(a).map(|s| (*p, s)));
    let swept = sweeps.next();
    if sweeps.next().is_some() {
        return Err(Failure::usage("only one --sweep-* flag may be given"));
    }
    for p in Param::ALL {
        let is_freq = matches!(p, Param::Omega | Param::Ev);
        let used = p.fixed(a).is_some() || p.sweep(a).is_some();
        if used && !is_freq && !geometry.contains(&p) {
            return Err(Failure::usage(format!("--{} does not apply to '{}'", p.name(), kind.label())));
        }
    }
    if !kind.is_sphere() && (a.tol.is_some() || a.lmax.is_some()) {
        return Err(Failure::usage(format!("--tol/--lmax do not apply to '{}'", kind.label())));
    }
    if kind.needs_medium() && a.eps.is_none() && a.model.is_none() {
        return Err(Failure::usage(format!("'{}' needs --eps or --model", kind.label())));
    }
    if !kind.needs_medium() && (a.eps.is_some() || a.model.is_some()) {
        return Err(Failure::usage(format!("'{}' takes no medium", kind.label())));
    }
    let swept_freq = matches!(swept, Some((Param::Omega | Param::Ev, _)));
    if (a.omega.is_some() || a.ev.is_some()) && swept_freq {
        return Err(Failure::usage("frequency is both fixed and swept"));
    }
    if kind.is_sphere() && (a.theta.is_some() || a.sweep_theta.is_some()) && (a.arc.is_some() || a.sweep_arc.is_some()) {
        return Err(Failure::usage("give either theta or arc, not both"));
    }
    if kind != Kind::Inspect && a.omega.is_none() && a.ev.is_none() && !swept_freq {
        return Err(Failure::usage("--omega or --ev is required"));
    }

    let mut base = Point::default();
    for p in Param::ALL {
        if let Some(v) = p.fixed(a) {
            base.set(p, v)?;
        }
    }
    for p in geometry {
        let given = p.fixed(a).is_some() || p.sweep(a).is_some();
        let optional = matches!(p, Param::Theta | Param::Arc);
        if !given && !optional {
            return Err(Failure::usage(format!("--{} is required for '{}'", p.name(), kind.label())));
        }
    }

    let mut at_nodes = false;
    let (sweep_param, sweep) = match swept {
        Some((p, spec)) => (p, parse_sweep(p, spec)?),
        None => {
            // a single-point grid on the command's natural parameter
            let p = match kind {
                Kind::FidelityFree | Kind::FidelityPlane => Param::X,
                Kind::FidelitySphere if a.arc.is_some() => Param::Arc,
                Kind::FidelitySphere => Param::Theta,
                Kind::RatePlane | Kind::RateSphere | Kind::ShiftPlane | Kind::ShiftSphere => Param::Z,
                Kind::RateFree | Kind::Inspect if a.ev.is_some() => Param::Ev,
                Kind::RateFree | Kind::Inspect => Param::Omega,
            };
            let v = match (p, p.fixed(a)) {
                (_, Some(v)) => v,
                (Param::Theta, None) => 0.0,
                (Param::Omega, None) if kind == Kind::Inspect => {
                    at_nodes = true;
                    0.0
                }
                _ => return Err(Failure::usage(format!("--{} is required", p.name()))),
            };
            (p, Sweep::single(p.name(), p.unit(), v)?)
        }
    };

    let medium = load_medium(a)?;
    let ctl = MieSeriesControl::new(
        a.tol.unwrap_or(MieSeriesControl::DEFAULT_TOL),
        a.lmax.unwrap_or(200).min(200),
        a.lmax.unwrap_or(MieSeriesControl::DEFAULT_NONRET_CAP),
    )?;

    let mut header = vec![("param".to_string(), sweep_param.name().to_string())];
    header.push(("unit".into(), sweep_param.unit().into()));
    for p in Param::ALL {
        if p != sweep_param || swept.is_none() {
            if let Some(v) = p.fixed(a) {
                header.push((p.name().into(), format_float(v)));
            }
        }
    }
    if let Some(m) = &medium {
        header.push(("medium".into(), m.id()));
    }
    if kind.is_sphere() {
        header.push(("tol".into(), format_float(ctl.tol())));
        header.push(("lmax".into(), ctl.nonret_l_max_cap().to_string()));
    }
    if let Some((p, spec)) = swept {
        header.push(("sweep".into(), format!("{}:{}", p.name(), spec.trim())));
    }
    Ok(Job {
        kind,
        base,
        sweep,
        sweep_param,
        header,
        medium,
        ctl,
        dipole: [0.0, 0.0, DEBYE],
        retarded: false,
        level: Level::Excited,
        at_nodes,
    })
}

fn header_line(kind: Kind, header: &[(String, String)]) -> String {
    let mut s = format!("# srfid {}", kind.label());
    for (k, v) in header {
        let _ = write!(s, " {k}={v}");
    }
    s.push('\n');
    s
}

/// Worst near-field parameter over the grid, for the stderr warning.
fn retardation_scale(job: &Job) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for v in job.sweep.values() {
        let Ok(p) = job.point(v) else { continue };
        let Some(omega) = p.omega else { continue };
        let length = match job.kind {
            Kind::FidelityPlane => p.x.unwrap_or(0.0).max(2.0 * p.z.unwrap_or(0.0)),
            Kind::RatePlane | Kind::ShiftPlane => 2.0 * p.z.unwrap_or(0.0),
            Kind::FidelitySphere => match job.sphere(&p) {
                Ok(g) => g.chord().max(2.0 * g.z()),
                Err(_) => continue,
            },
            Kind::RateSphere | Kind::ShiftSphere if !job.retarded => 2.0 * p.z.unwrap_or(0.0),
            _ => continue,
        };
        let k = wave_number(omega) * length;
        worst = Some(worst.map_or(k, |w: f64| w.max(k)));
    }
    worst
}

fn run_job(job: &Job, stderr: &mut dyn std::io::Write) -> Result<(String, i32), Failure> {
    if let Some(k) = retardation_scale(job) {
        if k > RETARDATION_WARNING {
            let _ = writeln!(
                stderr,
                "warning: k0 * length reaches {} > {RETARDATION_WARNING}; near-field forms may be inaccurate",
                format_float(k)
            );
        }
    }
    let curve = scan(|v| job.evaluate(v), &job.sweep)?;
    let mut out = header_line(job.kind, &job.header);
    let _ = writeln!(out, "param,{}", job.kind.column());
    // merge successes and failures back into grid order
    let mut rows: Vec<(f64, Result<f64, &Error>)> = curve
        .samples
        .iter()
        .map(|(p, s)| (*p, Ok(*s)))
        .chain(curve.failures.iter().map(|(p, e)| (*p, Err(e))))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (p, r) in &rows {
        match r {
            Ok(s) => {
                let _ = writeln!(out, "{},{}", format_float(*p), format_float(*s));
            }
            Err(e) => {
                let _ = writeln!(out, "# failed {}={}: {e}", job.sweep_param.name(), format_float(*p));
                let _ = writeln!(stderr, "warning: {}={} failed: {e}", job.sweep_param.name(), format_float(*p));
            }
        }
    }
    let code = match curve.failures.first() {
        Some((_, e)) if curve.samples.is_empty() => exit_code(e),
        _ => EXIT_OK,
    };
    Ok((out, code))
}

fn run_inspect(job: &Job) -> Result<(String, i32), Failure> {
    let medium = job.medium.as_ref().ok_or_else(|| Failure::usage("inspect needs --eps or --model"))?;
    let mut points: Vec<(f64, f64)> = Vec::new(); // (parameter, omega)
    let mut param = job.sweep_param;
    if job.at_nodes {
        let Medium::Table(t) = medium else {
            return Err(Failure::usage("a model has no nodes; give --ev, --omega or a sweep"));
        };
        param = Param::Ev;
        points.extend(t.energies_ev().iter().copied().zip(t.omegas().iter().copied()));
    } else {
        for v in job.sweep.values() {
            let p = job.point(v)?;
            points.push((v, need(p.omega, "omega")?));
        }
    }
    let mut header = job.header.clone();
    header[0].1 = param.name().into();
    header[1].1 = param.unit().into();
    let mut out = header_line(job.kind, &header);
    let _ = writeln!(out, "param,{}", job.kind.column());
    let mut first_error = None;
    for (p, omega) in points {
        match medium.permittivity_at(omega) {
            Ok(e) => {
                let _ = writeln!(out, "{},{},{}", format_float(p), format_float(e.re), format_float(e.im));
            }
            Err(e) => {
                let _ = writeln!(out, "# failed {}={}: {e}", param.name(), format_float(p));
                first_error.get_or_insert(exit_code(&e));
            }
        }
    }
    Ok((out, first_error.unwrap_or(EXIT_OK)))
}

fn dispatch(cli: Cli, stderr: &mut dyn std::io::Write) -> Result<(String, Option<PathBuf>, i32), Failure> {
    let (kind, common, extra) = match cli.command {
        Command::Fidelity(c) => match c {
            FidelityCmd::Free(a) => (Kind::FidelityFree, a, None),
            FidelityCmd::Plane(a) => (Kind::FidelityPlane, a, None),
            FidelityCmd::Sphere(a) => (Kind::FidelitySphere, a, None),
        },
        Command::Rate(c) => {
            let (kind, a) = match c {
                RateCmd::Free(a) => (Kind::RateFree, a),
                RateCmd::Plane(a) => (Kind::RatePlane, a),
                RateCmd::Sphere(a) => (Kind::RateSphere, a),
            };
            if a.retarded && kind != Kind::RateSphere {
                return Err(Failure::usage("--retarded applies to 'rate sphere' only"));
            }
            (kind, a.common, Some((a.dipole, a.retarded, None)))
        }
        Command::Shift(c) => {
            let (kind, a) = match c {
                ShiftCmd::Plane(a) => (Kind::ShiftPlane, a),
                ShiftCmd::Sphere(a) => (Kind::ShiftSphere, a),
            };
            let level = match a.state {
                State::Ground => Level::Ground,
                State::Excited => Level::Excited,
            };
            (kind, a.common, Some((a.dipole, false, Some(level))))
        }
        Command::Dielectric(DielectricCmd::Inspect(a)) => (Kind::Inspect, a, None),
    };
    let mut job = build_job(kind, &common)?;
    if let Some((dipole, retarded, level)) = extra {
        job.dipole = parse_dipole(&dipole)?;
        job.retarded = retarded;
        let (key, value) = if let Some(level) = level {
            job.level = level;
            ("state", if level == Level::Ground { "ground" } else { "excited" })
        } else {
            ("retarded", if retarded { "true" } else { "false" })
        };
        job.header.push(("dipole_debye".into(), dipole.replace(' ', "")));
        job.header.push((key.into(), value.into()));
        if matches!(kind, Kind::ShiftPlane | Kind::ShiftSphere) && !matches!(job.medium, Some(Medium::Table(_))) {
            return Err(Failure::usage("shift needs a tabulated medium (--eps)"));
        }
    }
    let (out, code) = if kind == Kind::Inspect {
        run_inspect(&job)?
    } else {
        run_job(&job, stderr)?
    };
    Ok((out, common.output, code))
}

/// Parse `argv` (program name first), run, and return the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut stderr = std::io::stderr();
    match dispatch(cli, &mut stderr) {
        Ok((out, path, code)) => {
            let written = match &path {
                Some(p) => std::fs::write(p, out.as_bytes()),
                None => std::io::stdout().lock().write_all(out.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return EXIT_IO;
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
