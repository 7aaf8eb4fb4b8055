//! Small dense linear-algebra helpers over complex matrices.
//!
//! Real inputs (all imaginary parts exactly zero) take a real SVD so that
//! real systems produce real bases.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn is_real_matrix(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn max_abs(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Singular values at or below `tol_rank * max(sigma_max, 1)` count as zero.
///
/// The unit floor matters for matrices like `I - TF` whose exact value is
/// zero: relative to a rounding-noise `sigma_max` nothing would be small.
fn cutoff(sigma_max: f64, tol_rank: f64) -> f64 {
    tol_rank * sigma_max.max(1.0)
}

struct Svd {
    sigma: Vec<f64>,
    u: Option<CMatrix>,
    v_t: Option<CMatrix>,
}

fn svd(m: &CMatrix, want_u: bool, want_v: bool) -> Svd {
    if is_real_matrix(m) {
        let real = m.map(|z| z.re);
        let svd = real.svd(want_u, want_v);
        Svd {
            sigma: svd.singular_values.iter().cloned().collect(),
            u: svd.u.map(|u| u.map(c)),
            v_t: svd.v_t.map(|v| v.map(c)),
        }
    } else {
        let svd = m.clone().svd(want_u, want_v);
        Svd {
            sigma: svd.singular_values.iter().cloned().collect(),
            u: svd.u,
            v_t: svd.v_t,
        }
    }
}

fn numerical_rank(sigma: &[f64], tol_rank: f64) -> usize {
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let tol = cutoff(sigma_max, tol_rank);
    sigma.iter().filter(|&&s| s > tol).count()
}

/// Orthonormal basis (as columns) of the numerical null space of `m`.
pub fn null_space(m: &CMatrix, tol_rank: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if rows == 0 {
        return CMatrix::identity(cols, cols);
    }
    // thin SVD only yields min(rows, cols) right vectors
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(&padded, false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let rank = numerical_rank(&svd.sigma, tol_rank);
    v_t.rows(rank, cols - rank).adjoint()
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_basis(m: &CMatrix, tol_rank: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = svd(m, true, false);
    let u = svd.u.expect("u requested");
    let rank = numerical_rank(&svd.sigma, tol_rank);
    u.columns(0, rank).into_owned()
}

/// Random `rows x cols` matrix with orthonormal columns (`cols <= rows`).
pub fn random_orthonormal<R: Rng>(rng: &mut R, rows: usize, cols: usize, complex: bool) -> CMatrix {
    assert!(cols <= rows);
    loop {
        let m = CMatrix::from_fn(rows, cols, |_, _| {
            let re = rng.gen_range(-1.0..1.0);
            let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
            Complex::new(re, im)
        });
        let q = range_basis(&m, 1e-8);
        if q.ncols() == cols {
            return q;
        }
    }
}

/// `true` when the columns of `m` are orthonormal within `tol` (max-entry norm).
pub fn has_orthonormal_columns(m: &CMatrix, tol: f64) -> bool {
    let gram = m.adjoint() * m;
    let k = gram.nrows();
    (0..k).all(|i| (0..k).all(|j| {
        let target = if i == j { 1.0 } else { 0.0 };
        (gram[(i, j)] - c(target)).norm() <= tol
    }))
}
