//! Signals satisfying `x = theta_tau theta_f x = theta_omega theta_g x`, and
//! seeded families of bi-systems with known admissible spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dft::unitary_dft_matrix;
use crate::error::{Error, Result};
use crate::linalg::{c, null_space, random_orthonormal, CMatrix, CVector, C64};
use crate::system::{BiSystem, Field, PairedSystem, Signal};
use crate::tolerances::{TOL_HYPOTHESIS, TOL_RANK};

/// Generator used for every seeded draw in the crate.
pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.3";

/// Orthonormal basis of the admissible signals of a bi-system.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleSpace {
    basis: CMatrix,
    field: Field,
}

impl AdmissibleSpace {
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Dimension of the space.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }
}

/// Orthonormal basis of `{x : x = theta_tau theta_f x}`.
pub fn fixed_subspace(p: &PairedSystem, tol_rank: f64) -> CMatrix {
    let d = p.dim();
    null_space(&(CMatrix::identity(d, d) - p.frame_operator()), tol_rank)
}

pub fn admissible_space(b: &BiSystem, tol_rank: f64) -> AdmissibleSpace {
    let d = b.dim();
    let mut stacked = CMatrix::zeros(2 * d, d);
    stacked
        .view_mut((0, 0), (d, d))
        .copy_from(&(CMatrix::identity(d, d) - b.first().frame_operator()));
    stacked
        .view_mut((d, 0), (d, d))
        .copy_from(&(CMatrix::identity(d, d) - b.second().frame_operator()));
    AdmissibleSpace { basis: null_space(&stacked, tol_rank), field: b.field() }
}

fn random_scalar<R: Rng>(rng: &mut R, complex: bool) -> C64 {
    let re = rng.gen_range(-1.0..=1.0);
    let im = if complex { rng.gen_range(-1.0..=1.0) } else { 0.0 };
    C64::new(re, im)
}

/// Seeded random element of the space, scaled so its coordinate vector in
/// the basis has sup-norm exactly 1.
pub fn sample_admissible(space: &AdmissibleSpace, seed: u64) -> Result<Signal> {
    let w = space.dim();
    if w == 0 {
        return Err(Error::NoAdmissibleSignal);
    }
    let complex = space.field == Field::Complex;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = loop {
        let v = CVector::from_fn(w, |_, _| random_scalar(&mut rng, complex));
        let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak > 0.0 {
            break v / c(peak);
        }
    };
    Signal::new(&space.basis * coeffs, 0.0)
}

/// Parameterized bi-system families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    /// Two copies of the standard basis.
    IdentityPair { d: usize },
    /// Standard basis against the unitary DFT basis.
    DftPair { d: usize },
    /// Standard basis against a rotation by `angle` degrees in each of the
    /// coordinate planes (0,1), (2,3), ...
    RotatedPair { d: usize, angle: f64 },
    /// First system reproduces exactly a random `split`-dimensional subspace
    /// `V`: an orthonormal basis of `V` together with two orthonormal bases
    /// of its complement, the second with negated functionals. The second
    /// system is the standard basis.
    SubspaceUnion { d: usize, split: usize },
    /// `base` with the functionals of both systems perturbed by rows of
    /// norm `magnitude` that vanish on a random subspace of the base's
    /// admissible space.
    Perturbed { base: Box<Family>, magnitude: f64 },
}

/// A family with its seed; the replayable unit of generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl FamilyDescriptor {
    pub fn generate(&self) -> Result<BiSystem> {
        generate(&self.family, self.seed)
    }
}

pub fn generate(family: &Family, seed: u64) -> Result<BiSystem> {
    match family {
        Family::IdentityPair { d } => {
            check_dim(*d)?;
            BiSystem::new(PairedSystem::identity(*d), PairedSystem::identity(*d))
        }
        Family::DftPair { d } => {
            check_dim(*d)?;
            let dft = PairedSystem::from_hilbert_vectors(unitary_dft_matrix(*d), TOL_HYPOTHESIS)?;
            BiSystem::new(PairedSystem::identity(*d), dft)
        }
        Family::RotatedPair { d, angle } => {
            check_dim(*d)?;
            if !angle.is_finite() {
                return Err(Error::Parameter(format!("angle must be finite, got {angle}")));
            }
            let rotated = PairedSystem::from_hilbert_vectors(block_rotation(*d, *angle), TOL_HYPOTHESIS)?;
            BiSystem::new(PairedSystem::identity(*d), rotated)
        }
        Family::SubspaceUnion { d, split } => {
            check_dim(*d)?;
            if *split == 0 || split > d {
                return Err(Error::Parameter(format!("split must lie in 1..={d}, got {split}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            BiSystem::new(subspace_union(&mut rng, *d, *split)?, PairedSystem::identity(*d))
        }
        Family::Perturbed { base, magnitude } => {
            if !magnitude.is_finite() || *magnitude < 0.0 {
                return Err(Error::Parameter(format!("magnitude must be finite and >= 0, got {magnitude}")));
            }
            let base = generate(base, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            perturb(&mut rng, &base, *magnitude)
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    Ok(())
}

fn block_rotation(d: usize, angle_degrees: f64) -> CMatrix {
    let (s, co) = angle_degrees.to_radians().sin_cos();
    let mut m = CMatrix::identity(d, d);
    for p in (0..d.saturating_sub(1)).step_by(2) {
        m[(p, p)] = c(co);
        m[(p + 1, p)] = c(s);
        m[(p, p + 1)] = c(-s);
        m[(p + 1, p + 1)] = c(co);
    }
    m
}

fn subspace_union(rng: &mut ChaCha8Rng, d: usize, split: usize) -> Result<PairedSystem> {
    let q = random_orthonormal(rng, d, d, false);
    let rest = d - split;
    let u = q.columns(0, split).into_owned();
    let w1 = q.columns(split, rest).into_owned();
    let w2 = if rest > 0 {
        &w1 * random_orthonormal(rng, rest, rest, false)
    } else {
        CMatrix::zeros(d, 0)
    };
    let n = split + 2 * rest;
    let mut vectors = CMatrix::zeros(d, n);
    vectors.columns_mut(0, split).copy_from(&u);
    vectors.columns_mut(split, rest).copy_from(&w1);
    vectors.columns_mut(split + rest, rest).copy_from(&w2);
    let mut functionals = vectors.adjoint();
    functionals.rows_mut(split + rest, rest).iter_mut().for_each(|z| *z = -*z);
    PairedSystem::new(Field::Real, vectors, functionals)
}

fn perturb(rng: &mut ChaCha8Rng, base: &BiSystem, magnitude: f64) -> Result<BiSystem> {
    let space = admissible_space(base, TOL_RANK);
    let w = space.dim();
    if w == 0 {
        return Err(Error::Parameter("base family has no admissible signals to preserve".into()));
    }
    let complex = base.field() == Field::Complex;
    let d = base.dim();
    let keep = w.div_ceil(2);
    let kept = space.basis() * random_orthonormal(rng, w, keep, complex);
    let complement = CMatrix::identity(d, d) - &kept * kept.adjoint();
    let first = perturb_functionals(rng, base.first(), &complement, magnitude, complex)?;
    let second = perturb_functionals(rng, base.second(), &complement, magnitude, complex)?;
    BiSystem::new(first, second)
}

/// Adds to each functional `f_j` a row `e_j` vanishing on the kept subspace,
/// with its sign chosen so `Re e_j(tau_j) >= 0` (a positive real diagonal
/// cannot shrink) and `||e_j|| = magnitude`.
fn perturb_functionals(
    rng: &mut ChaCha8Rng,
    p: &PairedSystem,
    complement: &CMatrix,
    magnitude: f64,
    complex: bool,
) -> Result<PairedSystem> {
    let d = p.dim();
    let mut functionals = p.functionals().clone();
    for j in 0..p.len() {
        let z = nalgebra::RowDVector::from_fn(d, |_, _| random_scalar(rng, complex));
        let mut e = z * complement;
        // push |f_j(tau_j)| outward, never toward zero
        let pairing = (p.functionals().row(j) * p.vectors().column(j))[(0, 0)];
        let drift = (pairing.conj() * (&e * p.vectors().column(j))[(0, 0)]).re;
        if drift < 0.0 {
            e = -e;
        }
        let norm = e.norm();
        if norm > 1e-12 {
            e *= c(magnitude / norm);
            let mut row = functionals.row_mut(j);
            row += e;
        }
    }
    PairedSystem::new(Field::of(p.vectors()).join(Field::of(&functionals)), p.vectors().clone(), functionals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{coherence_profile, sub_coherence};
    use crate::linalg::{has_orthonormal_columns, max_abs};

    fn residuals(b: &BiSystem, x: &CVector) -> (f64, f64) {
        (b.first().fixed_point_residual(x).unwrap(), b.second().fixed_point_residual(x).unwrap())
    }

    #[test]
    fn fixed_subspace_examples() {
        assert_eq!(fixed_subspace(&PairedSystem::identity(3), TOL_RANK).ncols(), 3);

        // orthonormal basis of the xy-plane in R^3
        let plane = PairedSystem::from_real(
            3,
            2,
            &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let basis = fixed_subspace(&plane, TOL_RANK);
        assert_eq!(basis.ncols(), 2);
        assert!(basis.row(2).iter().all(|z| z.norm() < 1e-12));

        // two copies of a basis: TF = 2I
        let doubled = PairedSystem::from_real(2, 4, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0], &[
            1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0,
        ])
        .unwrap();
        assert_eq!(fixed_subspace(&doubled, TOL_RANK).ncols(), 0);
    }

    #[test]
    fn admissible_space_examples() {
        let id = generate(&Family::IdentityPair { d: 3 }, 0).unwrap();
        assert_eq!(admissible_space(&id, TOL_RANK).dim(), 3);

        let rot = generate(&Family::RotatedPair { d: 2, angle: 45.0 }, 0).unwrap();
        assert_eq!(admissible_space(&rot, TOL_RANK).dim(), 2);

        let xy = PairedSystem::from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0], &[
            1.0, 0.0, 0.0, 0.0, 1.0, 0.0,
        ])
        .unwrap();
        let yz = PairedSystem::from_real(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0], &[
            0.0, 1.0, 0.0, 0.0, 0.0, 1.0,
        ])
        .unwrap();
        let space = admissible_space(&BiSystem::new(xy, yz).unwrap(), TOL_RANK);
        assert_eq!(space.dim(), 1);
        assert!((space.basis()[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_and_admissible() {
        let b = generate(&Family::DftPair { d: 5 }, 0).unwrap();
        let space = admissible_space(&b, TOL_RANK);
        let x = sample_admissible(&space, 42).unwrap();
        let y = sample_admissible(&space, 42).unwrap();
        assert_eq!(x, y);
        let (rf, rg) = residuals(&b, x.coordinates());
        assert!(rf <= 1e-9 && rg <= 1e-9);
        assert_ne!(x, sample_admissible(&space, 43).unwrap());
    }

    #[test]
    fn sampling_one_dimensional_space() {
        let space = AdmissibleSpace {
            basis: CMatrix::from_column_slice(3, 1, &[c(0.0), c(1.0), c(0.0)]),
            field: Field::Real,
        };
        let x = sample_admissible(&space, 7).unwrap();
        assert_eq!(x.coordinates()[0], c(0.0));
        assert_eq!(x.coordinates()[2], c(0.0));
        assert_eq!(x.coordinates()[1].norm(), 1.0);
    }

    #[test]
    fn sampling_trivial_space_fails() {
        let space = AdmissibleSpace { basis: CMatrix::zeros(3, 0), field: Field::Real };
        assert!(matches!(sample_admissible(&space, 0), Err(Error::NoAdmissibleSignal)));
    }

    #[test]
    fn dft_pair_family() {
        let b = generate(&Family::DftPair { d: 4 }, 0).unwrap();
        let p = coherence_profile(&b);
        assert!((p.cross_f_omega - 0.5).abs() < 1e-15 && (p.cross_g_tau - 0.5).abs() < 1e-15);
        assert!(p.sub_coherence_f == 0.0 && p.sub_coherence_g < 1e-15);
        assert_eq!(admissible_space(&b, TOL_RANK).dim(), 4);
    }

    #[test]
    fn subspace_union_family() {
        let b = generate(&Family::SubspaceUnion { d: 3, split: 2 }, 11).unwrap();
        assert_eq!(b.first().len(), 4);
        assert!(b.first().validate_pairing(TOL_HYPOTHESIS).ok);
        assert_eq!(fixed_subspace(b.first(), TOL_RANK).ncols(), 2);
        let space = admissible_space(&b, TOL_RANK);
        assert_eq!(space.dim(), 2);
        assert!(has_orthonormal_columns(space.basis(), 1e-12));

        let b = generate(&Family::SubspaceUnion { d: 6, split: 3 }, 5).unwrap();
        assert_eq!(b.first().len(), 9);
        assert_eq!(admissible_space(&b, TOL_RANK).dim(), 3);
    }

    #[test]
    fn perturbed_family_keeps_hypotheses() {
        let family = Family::Perturbed { base: Box::new(Family::IdentityPair { d: 3 }), magnitude: 0.05 };
        let b = generate(&family, 3).unwrap();
        assert!(b.first().validate_pairing(TOL_HYPOTHESIS).ok);
        assert!(b.second().validate_pairing(TOL_HYPOTHESIS).ok);
        let sub_f = sub_coherence(b.first());
        let sub_g = sub_coherence(b.second());
        assert!(sub_f > 0.0 && sub_f <= 0.05 + 1e-12, "sub_f = {sub_f}");
        assert!(sub_g > 0.0 && sub_g <= 0.05 + 1e-12, "sub_g = {sub_g}");
        // functionals are no longer the adjoint of the vectors
        assert!(max_abs(&CVector::from_iterator(9, (b.first().functionals() - b.first().vectors().adjoint()).iter().cloned())) > 1e-3);

        let space = admissible_space(&b, TOL_RANK);
        assert!(space.dim() >= 2);
        let x = sample_admissible(&space, 0).unwrap();
        let (rf, rg) = residuals(&b, x.coordinates());
        assert!(rf <= 1e-9 && rg <= 1e-9);
    }

    #[test]
    fn perturbed_complex_family() {
        let family = Family::Perturbed { base: Box::new(Family::DftPair { d: 4 }), magnitude: 0.1 };
        let b = generate(&family, 9).unwrap();
        assert_eq!(b.field(), Field::Complex);
        assert!(b.first().validate_pairing(TOL_HYPOTHESIS).ok);
        assert!(b.second().validate_pairing(TOL_HYPOTHESIS).ok);
        let space = admissible_space(&b, TOL_RANK);
        assert!(space.dim() >= 2);
    }

    #[test]
    fn generation_is_deterministic() {
        let family = Family::Perturbed { base: Box::new(Family::SubspaceUnion { d: 5, split: 3 }), magnitude: 0.08 };
        assert_eq!(generate(&family, 21).unwrap(), generate(&family, 21).unwrap());
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(generate(&Family::IdentityPair { d: 0 }, 0), Err(Error::Parameter(_))));
        assert!(matches!(generate(&Family::SubspaceUnion { d: 3, split: 4 }, 0), Err(Error::Parameter(_))));
        assert!(matches!(
            generate(&Family::RotatedPair { d: 2, angle: f64::NAN }, 0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            generate(&Family::Perturbed { base: Box::new(Family::IdentityPair { d: 2 }), magnitude: -1.0 }, 0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn descriptor_json_shape() {
        let desc = FamilyDescriptor { family: Family::DftPair { d: 4 }, seed: 42 };
        let json = serde_json::to_string(&desc).unwrap();
        assert_eq!(json, r#"{"family":"dft_pair","params":{"d":4},"seed":42}"#);
        let nested = FamilyDescriptor {
            family: Family::Perturbed { base: Box::new(Family::IdentityPair { d: 3 }), magnitude: 0.05 },
            seed: 1,
        };
        let back: FamilyDescriptor = serde_json::from_str(&serde_json::to_string(&nested).unwrap()).unwrap();
        assert_eq!(back, nested);
    }
}
