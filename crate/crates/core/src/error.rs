use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{func}: order {l} at z = {z} is outside the supported envelope")]
    OutOfEnvelope {
        func: &'static str,
        l: usize,
        z: Complex64,
    },

    #[error("{func}: argument z = 0 is a pole")]
    Pole { func: &'static str },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: energies must be strictly increasing")]
    NonMonotonicGrid { line: usize },

    #[error("line {line}: negative imaginary permittivity violates passivity")]
    NegativeLoss { line: usize },

    #[error("line {line}: imaginary-axis permittivity must be real, >= 1 and decreasing")]
    ImagAxisInvariant { line: usize },

    #[error("frequency {value} {unit} outside tabulated range [{min}, {max}]")]
    OutOfTableRange {
        value: f64,
        min: f64,
        max: f64,
        unit: &'static str,
    },

    #[error("permittivity {eps} sits on the surface-mode pole eps = -1")]
    SurfacePole { eps: Complex64 },

    #[error("permittivity {eps} within 1e-6 of the multipole pole of order {l}")]
    NearMultipolePole { l: usize, eps: Complex64 },

    #[error("multipole series not converged at l_max = {l_max}; tail estimate {tail:e}")]
    SeriesNotConverged { l_max: usize, tail: f64 },

    #[error("quadrature not converged; achieved error estimate {estimate:e}")]
    QuadratureNotConverged { estimate: f64 },

    #[error("degenerate mode density: coincidence denominator vanishes")]
    DegenerateModeDensity,

    #[error("negative total decay rate {total:e} 1/s in a passive environment")]
    NegativeTotalRate { total: f64 },

    #[error("frequency grid does not cover the support of Im G ({0})")]
    GridCoverage(String),

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("tensor is not real-valued; pass the imaginary part")]
    NonRealTensor,
}
