//! Direct unitary discrete Fourier transform.
//!
//! Evaluated as the O(d^2) sum; sizes here stay in the tens.

use std::f64::consts::PI;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Unitary (`1/sqrt(d)` on both directions) DFT of a fixed length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DftPlan {
    d: usize,
    direction: Direction,
}

/// `exp(sign * 2 pi i * jk / d)`, with `jk` reduced mod `d` first.
fn twiddle(jk: usize, d: usize, sign: f64) -> C64 {
    let angle = sign * 2.0 * PI * ((jk % d) as f64) / d as f64;
    Complex::new(angle.cos(), angle.sin())
}

impl DftPlan {
    pub fn new(d: usize, direction: Direction) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("DFT length must be positive".into()));
        }
        Ok(Self { d, direction })
    }

    pub fn len(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.d == 0
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn transform(&self, h: &CVector) -> Result<CVector> {
        let d = self.d;
        if h.len() != d {
            return Err(Error::Shape(format!("input has length {}, plan expects {d}", h.len())));
        }
        let sign = match self.direction {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        };
        let scale = 1.0 / (d as f64).sqrt();
        Ok(CVector::from_fn(d, |k, _| {
            let sum: C64 = (0..d).map(|j| h[j] * twiddle(j * k, d, sign)).sum();
            sum * scale
        }))
    }
}

/// Matrix whose columns `omega_k` have entries `exp(2 pi i jk/d)/sqrt(d)`.
///
/// Pairing with the conjugate-transpose functionals gives
/// `<h, omega_k> = forward DFT of h at k`, so `from_hilbert_vectors` of this
/// matrix has the unitary forward DFT as its analysis operator.
pub fn unitary_dft_matrix(d: usize) -> CMatrix {
    let scale = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| twiddle(j * k, d, 1.0) * scale)
}

/// Periodic spike train of ones at multiples of `spacing`.
pub fn dirac_comb(d: usize, spacing: usize) -> CVector {
    CVector::from_fn(d, |j, _| if spacing > 0 && j % spacing == 0 { c(1.0) } else { c(0.0) })
}
