//! Paired systems of vectors and functionals over a common ambient space.
//!
//! A [`PairedSystem`] stores the vectors `tau_j` as the columns of a `d x n`
//! matrix and the functionals `f_j` as the rows of an `n x d` matrix. The
//! pairing `f_j(x)` is the plain row-times-column product; any conjugation a
//! Hilbert-space inner product needs is already baked into the stored rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, is_real_matrix, max_abs, CMatrix, CVector, C64};

/// Scalar field of a system. Values are always stored as complex doubles;
/// a real system simply has zero imaginary parts everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn of(m: &CMatrix) -> Field {
        if is_real_matrix(m) {
            Field::Real
        } else {
            Field::Complex
        }
    }

    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSystem {
    field: Field,
    vectors: CMatrix,
    functionals: CMatrix,
}

/// Per-index diagonal magnitudes `|f_j(tau_j)|` and the `>= 1` verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub diagonals: Vec<f64>,
    pub passed: Vec<bool>,
    pub ok: bool,
    pub tolerance: f64,
}

impl PairedSystem {
    pub fn new(field: Field, vectors: CMatrix, functionals: CMatrix) -> Result<Self> {
        let (d, n) = vectors.shape();
        if d == 0 || n == 0 {
            return Err(Error::Shape(format!("empty system: d = {d}, n = {n}")));
        }
        if functionals.shape() != (n, d) {
            return Err(Error::Shape(format!(
                "functionals are {}x{}, expected {n}x{d} to match {d}x{n} vectors",
                functionals.nrows(),
                functionals.ncols()
            )));
        }
        if vectors.iter().chain(functionals.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("non-finite entry in system".into()));
        }
        if field == Field::Real && !(is_real_matrix(&vectors) && is_real_matrix(&functionals)) {
            return Err(Error::Shape("real system has entries with nonzero imaginary part".into()));
        }
        Ok(Self { field, vectors, functionals })
    }

    /// Builds a system from real row-major data: `vectors` is `d x n`, `functionals` is `n x d`.
    pub fn from_real(d: usize, n: usize, vectors: &[f64], functionals: &[f64]) -> Result<Self> {
        if vectors.len() != d * n || functionals.len() != n * d {
            return Err(Error::Shape(format!(
                "expected {} entries for each matrix, got {} and {}",
                d * n,
                vectors.len(),
                functionals.len()
            )));
        }
        let t = CMatrix::from_row_iterator(d, n, vectors.iter().map(|&v| c(v)));
        let f = CMatrix::from_row_iterator(n, d, functionals.iter().map(|&v| c(v)));
        Self::new(Field::Real, t, f)
    }

    /// Standard basis vectors paired with coordinate functionals.
    pub fn identity(d: usize) -> Self {
        Self::new(Field::Real, CMatrix::identity(d, d), CMatrix::identity(d, d))
            .expect("identity system is well formed")
    }

    /// Hilbert specialization: `f_j(h) = <h, tau_j>`, i.e. the functionals
    /// are the conjugate transpose of the (unit-norm) vectors.
    pub fn from_hilbert_vectors(vectors: CMatrix, tol_hypothesis: f64) -> Result<Self> {
        for (j, col) in vectors.column_iter().enumerate() {
            let norm = col.norm();
            if (norm - 1.0).abs() > tol_hypothesis {
                return Err(Error::Hypothesis {
                    index: j,
                    reason: format!("vector has norm {norm}, expected unit norm"),
                });
            }
        }
        let functionals = vectors.adjoint();
        Self::new(Field::of(&vectors), vectors, functionals)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Number of vector/functional pairs `n`.
    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn functionals(&self) -> &CMatrix {
        &self.functionals
    }

    pub fn validate_pairing(&self, tol_hypothesis: f64) -> ValidationReport {
        let diagonals: Vec<f64> = (0..self.len())
            .map(|j| {
                (0..self.dim())
                    .map(|i| self.functionals[(j, i)] * self.vectors[(i, j)])
                    .sum::<C64>()
                    .norm()
            })
            .collect();
        let passed: Vec<bool> = diagonals.iter().map(|&v| v >= 1.0 - tol_hypothesis).collect();
        let ok = passed.iter().all(|&p| p);
        ValidationReport { diagonals, passed, ok, tolerance: tol_hypothesis }
    }

    /// `theta_f x = (f_j(x))_j`.
    pub fn analysis(&self, x: &CVector) -> Result<CVector> {
        if x.len() != self.dim() {
            return Err(Error::Shape(format!(
                "signal has length {}, system dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(&self.functionals * x)
    }

    /// `theta_tau a = sum_j a_j tau_j`.
    pub fn synthesis(&self, a: &CVector) -> Result<CVector> {
        if a.len() != self.len() {
            return Err(Error::Shape(format!(
                "coefficient sequence has length {}, system has {} elements",
                a.len(),
                self.len()
            )));
        }
        Ok(&self.vectors * a)
    }

    /// The `d x d` matrix of `theta_tau theta_f`.
    pub fn frame_operator(&self) -> CMatrix {
        &self.vectors * &self.functionals
    }

    /// `|| x - theta_tau theta_f x ||_inf`.
    pub fn fixed_point_residual(&self, x: &CVector) -> Result<f64> {
        let back = self.synthesis(&self.analysis(x)?)?;
        Ok(max_abs(&(x - back)))
    }
}

/// The two systems `(f, tau)` and `(g, omega)` of the main inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSystem {
    first: PairedSystem,
    second: PairedSystem,
}

impl BiSystem {
    pub fn new(first: PairedSystem, second: PairedSystem) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::Shape(format!(
                "ambient dimensions differ: {} vs {}",
                first.dim(),
                second.dim()
            )));
        }
        Ok(Self { first, second })
    }

    pub fn first(&self) -> &PairedSystem {
        &self.first
    }

    pub fn second(&self) -> &PairedSystem {
        &self.second
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }

    pub fn field(&self) -> Field {
        self.first.field().join(self.second.field())
    }

    pub fn swapped(&self) -> BiSystem {
        BiSystem { first: self.second.clone(), second: self.first.clone() }
    }
}

/// A nonzero point of the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    coordinates: CVector,
}

impl Signal {
    /// Fails when no coordinate exceeds `eta` in magnitude.
    pub fn new(coordinates: CVector, eta: f64) -> Result<Self> {
        let s = Self { coordinates };
        s.ensure_nonzero(eta)?;
        Ok(s)
    }

    pub fn from_real(values: &[f64], eta: f64) -> Result<Self> {
        Self::new(CVector::from_iterator(values.len(), values.iter().map(|&v| c(v))), eta)
    }

    pub fn ensure_nonzero(&self, eta: f64) -> Result<()> {
        if self.coordinates.iter().all(|z| z.norm() <= eta) {
            return Err(Error::Degenerate(format!(
                "signal is zero at threshold {eta}"
            )));
        }
        Ok(())
    }

    pub fn coordinates(&self) -> &CVector {
        &self.coordinates
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }
}
