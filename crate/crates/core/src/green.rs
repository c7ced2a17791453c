//! The 3x3 complex Green tensor value shared by every geometry.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Basis the tensor components refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// e_x, e_y, e_z.
    Cartesian,
    /// e_r, e_theta, e_phi at the evaluation point, in that index order.
    Spherical,
}

/// Scattering (or free-space) Green tensor in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenTensor {
    pub entries: [[Complex64; 3]; 3],
    pub basis: Basis,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl GreenTensor {
    pub fn zeros(basis: Basis) -> Self {
        Self {
            entries: [[ZERO; 3]; 3],
            basis,
        }
    }

    pub fn diagonal(d: [Complex64; 3], basis: Basis) -> Self {
        let mut t = Self::zeros(basis);
        for (i, v) in d.into_iter().enumerate() {
            t.entries[i][i] = v;
        }
        t
    }

    pub fn isotropic(v: Complex64, basis: Basis) -> Self {
        Self::diagonal([v; 3], basis)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i][j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..3).map(|i| self.entries[i][i]).sum()
    }

    /// Componentwise real part, as a tensor with zero imaginary parts.
    pub fn re(&self) -> Self {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    /// Componentwise imaginary part, as a tensor with zero imaginary parts.
    pub fn im(&self) -> Self {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for v in row.iter_mut() {
                *v = f(*v);
            }
        }
        out
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().flatten().all(|v| v.im == 0.0)
    }

    /// Real entries, or an error when any imaginary part is non-zero.
    pub fn real_entries(&self) -> Result<[[f64; 3]; 3]> {
        if !self.is_real() {
            return Err(Error::NonRealTensor);
        }
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.entries[i][j].re;
            }
        }
        Ok(out)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self
            .entries
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        (0..3).all(|i| (0..3).all(|j| (self.entries[i][j] - self.entries[j][i]).norm() <= tol * scale))
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// a . G . b for real vectors.
    pub fn bilinear(&self, a: [f64; 3], b: [f64; 3]) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                acc += self.entries[i][j] * (a[i] * b[j]);
            }
        }
        acc
    }
}

impl Add for GreenTensor {
    type Output = GreenTensor;

    /// Panics when the bases differ; mixing bases is a programming error.
    fn add(self, rhs: GreenTensor) -> GreenTensor {
        assert_eq!(self.basis, rhs.basis, "cannot add tensors in different bases");
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.entries[i][j] += rhs.entries[i][j];
            }
        }
        out
    }
}

impl Mul<f64> for GreenTensor {
    type Output = GreenTensor;

    fn mul(self, rhs: f64) -> GreenTensor {
        self.map(|v| v * rhs)
    }
}

impl Mul<Complex64> for GreenTensor {
    type Output = GreenTensor;

    fn mul(self, rhs: Complex64) -> GreenTensor {
        self.map(|v| v * rhs)
    }
}
