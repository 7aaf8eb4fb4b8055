//! Coherence quantities entering the numerators and denominators of the bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::system::{BiSystem, PairedSystem};

/// The four maxima of a [`BiSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceProfile {
    /// `max_{j != r} |f_j(tau_r)|`
    pub sub_coherence_f: f64,
    /// `max_{k != s} |g_k(omega_s)|`
    pub sub_coherence_g: f64,
    /// `max_{j,k} |f_j(omega_k)|`
    pub cross_f_omega: f64,
    /// `max_{j,k} |g_k(tau_j)|`
    pub cross_g_tau: f64,
}

impl CoherenceProfile {
    /// Profile of the swapped bi-system.
    pub fn swapped(&self) -> CoherenceProfile {
        CoherenceProfile {
            sub_coherence_f: self.sub_coherence_g,
            sub_coherence_g: self.sub_coherence_f,
            cross_f_omega: self.cross_g_tau,
            cross_g_tau: self.cross_f_omega,
        }
    }
}

/// `n x n` matrix with entries `f_j(tau_r)`.
pub fn gram(p: &PairedSystem) -> CMatrix {
    p.functionals() * p.vectors()
}

/// Largest off-diagonal magnitude of the gram matrix; 0 for a singleton system.
pub fn sub_coherence(p: &PairedSystem) -> f64 {
    let g = gram(p);
    let n = g.nrows();
    let mut best = 0.0f64;
    for j in 0..n {
        for r in 0..n {
            if j != r {
                best = best.max(g[(j, r)].norm());
            }
        }
    }
    best
}

/// `max_{j,k} |f_j(omega_k)|` with `f` from `functionals_of` and `omega` from `vectors_of`.
pub fn cross_coherence(functionals_of: &PairedSystem, vectors_of: &PairedSystem) -> Result<f64> {
    if functionals_of.dim() != vectors_of.dim() {
        return Err(Error::Shape(format!(
            "ambient dimensions differ: {} vs {}",
            functionals_of.dim(),
            vectors_of.dim()
        )));
    }
    let pairings = functionals_of.functionals() * vectors_of.vectors();
    Ok(pairings.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

pub fn coherence_profile(b: &BiSystem) -> CoherenceProfile {
    CoherenceProfile {
        sub_coherence_f: sub_coherence(b.first()),
        sub_coherence_g: sub_coherence(b.second()),
        cross_f_omega: cross_coherence(b.first(), b.second()).expect("bi-system dimensions agree"),
        cross_g_tau: cross_coherence(b.second(), b.first()).expect("bi-system dimensions agree"),
    }
}
