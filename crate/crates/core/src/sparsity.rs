//! Thresholded l0, l1 mass, supports, and 1-norm concentration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityProfile {
    pub l0: usize,
    pub l1: f64,
    pub support: Vec<usize>,
}

/// An index set together with the smallest `epsilon` for which the
/// associated sequence is epsilon-concentrated on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationWitness {
    pub set: Vec<usize>,
    pub epsilon: f64,
}

/// Number of entries with magnitude strictly above `eta`.
pub fn l0(a: &CVector, eta: f64) -> usize {
    a.iter().filter(|z| z.norm() > eta).count()
}

pub fn l1(a: &CVector) -> f64 {
    a.iter().map(|z| z.norm()).sum()
}

pub fn support(a: &CVector, eta: f64) -> Vec<usize> {
    a.iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > eta)
        .map(|(j, _)| j)
        .collect()
}

/// Copy of `a` with every entry of magnitude `<= eta` set to exactly zero.
pub fn thresholded(a: &CVector, eta: f64) -> CVector {
    a.map(|z| if z.norm() > eta { z } else { c(0.0) })
}

pub fn profile(a: &CVector, eta: f64) -> SparsityProfile {
    let support = support(a, eta);
    SparsityProfile { l0: support.len(), l1: l1(a), support }
}

fn membership(len: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; len];
    for &j in set {
        if j >= len {
            return Err(Error::Parameter(format!("index {j} out of range for length {len}")));
        }
        mask[j] = true;
    }
    Ok(mask)
}

/// `(sum over the complement of |a_j|) / (sum of |a_j|)`: the smallest
/// epsilon for which `a` is epsilon-concentrated on `set`.
pub fn concentration_epsilon(a: &CVector, set: &[usize]) -> Result<f64> {
    let mask = membership(a.len(), set)?;
    let total = l1(a);
    if total <= 0.0 {
        return Err(Error::Degenerate("sequence has zero l1 mass".into()));
    }
    let off: f64 = a
        .iter()
        .zip(&mask)
        .filter(|(_, &inside)| !inside)
        .map(|(z, _)| z.norm())
        .sum();
    Ok((off / total).clamp(0.0, 1.0))
}

/// The `size` largest-magnitude indices (lowest index wins ties), which
/// minimize the concentration defect among all sets of that size.
pub fn best_set(a: &CVector, size: usize) -> Result<ConcentrationWitness> {
    if size > a.len() {
        return Err(Error::Parameter(format!(
            "set size {size} exceeds sequence length {}",
            a.len()
        )));
    }
    let mut order: Vec<usize> = (0..a.len()).collect();
    // stable sort keeps ascending index order among equal magnitudes
    order.sort_by(|&i, &j| a[j].norm().total_cmp(&a[i].norm()));
    let mut set: Vec<usize> = order.into_iter().take(size).collect();
    set.sort_unstable();
    let epsilon = concentration_epsilon(a, &set)?;
    Ok(ConcentrationWitness { set, epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> CVector {
        CVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))
    }

    #[test]
    fn l0_examples() {
        assert_eq!(l0(&real(&[1.0, 0.0, 2e-13, -3.0]), 1e-9), 2);
        assert_eq!(l0(&real(&[0.0, 0.0, 0.0]), 1e-9), 0);
        assert_eq!(l0(&real(&[0.5, 0.5]), 0.0), 2);
    }

    #[test]
    fn epsilon_examples() {
        let a = real(&[4.0, 2.0, 1.0, 1.0]);
        assert_eq!(concentration_epsilon(&a, &[0]).unwrap(), 0.5);
        assert_eq!(concentration_epsilon(&a, &[0, 1, 2, 3]).unwrap(), 0.0);
        assert_eq!(concentration_epsilon(&a, &[]).unwrap(), 1.0);
    }

    #[test]
    fn epsilon_errors() {
        assert!(matches!(
            concentration_epsilon(&real(&[0.0, 0.0]), &[0]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(concentration_epsilon(&real(&[1.0]), &[3]), Err(Error::Parameter(_))));
    }

    #[test]
    fn best_set_examples() {
        let a = real(&[4.0, 2.0, 1.0, 1.0]);
        let w = best_set(&a, 1).unwrap();
        assert_eq!(w.set, vec![0]);
        assert_eq!(w.epsilon, 0.5);

        let w = best_set(&a, 4).unwrap();
        assert_eq!(w.set, vec![0, 1, 2, 3]);
        assert_eq!(w.epsilon, 0.0);

        let w = best_set(&real(&[1.0, 1.0]), 1).unwrap();
        assert_eq!(w.set, vec![0]);
        assert_eq!(w.epsilon, 0.5);

        // tie at the boundary: 1.0 at indices 2 and 3, lowest index wins
        assert_eq!(best_set(&a, 3).unwrap().set, vec![0, 1, 2]);
        assert!(best_set(&a, 5).is_err());
        assert!(matches!(best_set(&real(&[0.0]), 1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn profile_examples() {
        let p = profile(&real(&[1.0, 0.0, -3.0]), 0.0);
        assert_eq!((p.l0, p.l1, p.support), (2, 4.0, vec![0, 2]));

        let p = profile(&real(&[0.0, 0.0]), 1e-9);
        assert_eq!((p.l0, p.l1, p.support), (0, 0.0, vec![]));

        let p = profile(&real(&[2e-13, 1.0]), 1e-9);
        assert_eq!((p.l0, p.support), (1, vec![1]));
        assert!((p.l1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thresholding_zeroes_small_entries() {
        let t = thresholded(&real(&[1e-12, -2.0, 1e-9]), 1e-9);
        assert_eq!(t, real(&[0.0, -2.0, 0.0]));
    }
}
