//! Right-hand sides of the coherence uncertainty inequalities and the
//! certificates that check them on concrete signals.
//!
//! All four inequalities share the factor
//! `[1 - eps - (count - 1 + eps) * sub]^+`, divided by the product of the two
//! cross coherences. The sparsity version is the `eps = 0` case and is
//! evaluated through the same arithmetic.

use serde::{Deserialize, Serialize};

use crate::coherence::{coherence_profile, CoherenceProfile};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::sparsity::{concentration_epsilon, l0, l1, support, thresholded};
use crate::system::{BiSystem, Signal};
use crate::tolerances::Tolerances;
use crate::dft::{DftPlan, Direction};

/// `max(0, a)`.
pub fn clamp_plus(a: f64) -> f64 {
    a.max(0.0)
}

/// Value of a lower bound. A zero cross coherence makes the fraction
/// undefined; no admissible nonzero signal exists for such systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Finite(f64),
    Vacuous,
}

impl Bound {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Vacuous => None,
        }
    }
}

/// `1 - eps - (count - 1 + eps) * sub`, before clamping.
pub fn concentrated_factor(count: usize, eps: f64, sub: f64) -> f64 {
    1.0 - eps - (count as f64 - 1.0 + eps) * sub
}

/// Lower bound on `|M| |N|` for an eps-concentrated `theta_f x` and a
/// delta-concentrated `theta_g x`.
pub fn fskpb_rhs(o_m: usize, o_n: usize, eps: f64, delta: f64, profile: &CoherenceProfile) -> Bound {
    let nf = concentrated_factor(o_m, eps, profile.sub_coherence_f);
    let ng = concentrated_factor(o_n, delta, profile.sub_coherence_g);
    let denominator = profile.cross_f_omega * profile.cross_g_tau;
    if denominator <= 0.0 {
        return Bound::Vacuous;
    }
    Bound::Finite(clamp_plus(nf) * clamp_plus(ng) / denominator)
}

/// Lower bound on `||theta_f x||_0 ||theta_g x||_0`.
pub fn fkdb_rhs(s_f: usize, s_g: usize, profile: &CoherenceProfile) -> Bound {
    fskpb_rhs(s_f, s_g, 0.0, 0.0, profile)
}

/// `1 / mu^2` for two orthonormal bases with cross coherence `mu`.
pub fn eb_bound(mu: f64) -> Result<f64> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::Degenerate(format!("cross coherence {mu} must be positive")));
    }
    Ok(1.0 / (mu * mu))
}

/// The time-frequency lower bound `d`.
pub fn ds_bound(d: usize) -> f64 {
    d as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsProduct {
    pub time_sparsity: usize,
    pub frequency_sparsity: usize,
    pub product: usize,
}

/// `||h||_0`, `||h_hat||_0` and their product under the unitary DFT.
pub fn ds_product(h: &Signal, eta: f64) -> Result<DsProduct> {
    h.ensure_nonzero(eta)?;
    let plan = DftPlan::new(h.dim(), Direction::Forward)?;
    let spectrum = plan.transform(h.coordinates())?;
    let time_sparsity = l0(h.coordinates(), eta);
    let frequency_sparsity = l0(&spectrum, eta);
    Ok(DsProduct { time_sparsity, frequency_sparsity, product: time_sparsity * frequency_sparsity })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// sparsity product form
    Sparsity,
    /// concentration form over index sets `M`, `N`
    Concentration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub f: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    /// `s_f * s_g` or `|M| * |N|`
    pub lhs: usize,
    /// `None` when the bound is vacuous
    pub rhs: Option<f64>,
    pub vacuous: bool,
    pub count_f: usize,
    pub count_g: usize,
    pub numerator_f: f64,
    pub numerator_g: f64,
    pub coherences: CoherenceProfile,
    pub residuals: Residuals,
    pub set_m: Option<Vec<usize>>,
    pub set_n: Option<Vec<usize>>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub pairing_ok: bool,
    pub hypothesis_ok: bool,
    pub satisfied: bool,
    pub eta: f64,
    pub tol_fp: f64,
    pub tol_cert: f64,
}

impl BoundCertificate {
    /// `lhs - rhs`, or `None` for a vacuous bound.
    pub fn margin(&self) -> Option<f64> {
        self.rhs.map(|r| self.lhs as f64 - r)
    }
}

/// A bi-system with the signal-independent quantities computed once.
#[derive(Debug, Clone)]
pub struct PreparedBiSystem<'a> {
    system: &'a BiSystem,
    profile: CoherenceProfile,
    pairing_ok: bool,
    tolerances: Tolerances,
}

impl<'a> PreparedBiSystem<'a> {
    pub fn new(system: &'a BiSystem, tolerances: Tolerances) -> Self {
        let pairing_ok = system.first().validate_pairing(tolerances.hypothesis).ok
            && system.second().validate_pairing(tolerances.hypothesis).ok;
        Self { system, profile: coherence_profile(system), pairing_ok, tolerances }
    }

    pub fn profile(&self) -> &CoherenceProfile {
        &self.profile
    }

    pub fn system(&self) -> &BiSystem {
        self.system
    }

    pub fn analyze(&self, x: &Signal) -> Result<AnalyzedSignal<'_>> {
        let tol = &self.tolerances;
        x.ensure_nonzero(tol.eta)?;
        let first = self.system.first();
        let second = self.system.second();
        let coeff_f = first.analysis(x.coordinates())?;
        let coeff_g = second.analysis(x.coordinates())?;
        let residual_f = crate::linalg::max_abs(&(x.coordinates() - first.synthesis(&coeff_f)?));
        let residual_g = crate::linalg::max_abs(&(x.coordinates() - second.synthesis(&coeff_g)?));
        let hypothesis_ok =
            self.pairing_ok && residual_f <= tol.fixed_point && residual_g <= tol.fixed_point;
        Ok(AnalyzedSignal {
            prepared: self,
            coeff_f,
            coeff_g,
            residuals: Residuals { f: residual_f, g: residual_g },
            hypothesis_ok,
        })
    }
}

/// Both coefficient sequences of one signal plus its hypothesis status.
#[derive(Debug, Clone)]
pub struct AnalyzedSignal<'a> {
    prepared: &'a PreparedBiSystem<'a>,
    coeff_f: CVector,
    coeff_g: CVector,
    residuals: Residuals,
    hypothesis_ok: bool,
}

impl AnalyzedSignal<'_> {
    /// `theta_f x`
    pub fn coefficients_f(&self) -> &CVector {
        &self.coeff_f
    }

    /// `theta_g x`
    pub fn coefficients_g(&self) -> &CVector {
        &self.coeff_g
    }

    pub fn hypothesis_ok(&self) -> bool {
        self.hypothesis_ok
    }

    fn certificate(
        &self,
        kind: BoundKind,
        count_f: usize,
        count_g: usize,
        eps: f64,
        delta: f64,
    ) -> BoundCertificate {
        let p = &self.prepared.profile;
        let tol = &self.prepared.tolerances;
        let rhs = fskpb_rhs(count_f, count_g, eps, delta, p).finite();
        let lhs = count_f * count_g;
        let satisfied = self.hypothesis_ok && rhs.is_some_and(|r| lhs as f64 >= r - tol.cert);
        BoundCertificate {
            kind,
            lhs,
            rhs,
            vacuous: rhs.is_none(),
            count_f,
            count_g,
            numerator_f: concentrated_factor(count_f, eps, p.sub_coherence_f),
            numerator_g: concentrated_factor(count_g, delta, p.sub_coherence_g),
            coherences: *p,
            residuals: self.residuals,
            set_m: None,
            set_n: None,
            epsilon: None,
            delta: None,
            pairing_ok: self.prepared.pairing_ok,
            hypothesis_ok: self.hypothesis_ok,
            satisfied,
            eta: tol.eta,
            tol_fp: tol.fixed_point,
            tol_cert: tol.cert,
        }
    }

    /// Certificate for the sparsity-product inequality.
    pub fn sparsity_certificate(&self) -> BoundCertificate {
        let eta = self.prepared.tolerances.eta;
        self.certificate(BoundKind::Sparsity, l0(&self.coeff_f, eta), l0(&self.coeff_g, eta), 0.0, 0.0)
    }

    /// Certificate for the concentration inequality over `set_m` and `set_n`.
    ///
    /// Concentration defects are computed after zeroing coefficients at or
    /// below `eta`, the same convention the l0 counts use, so that the
    /// thresholded supports give `eps = delta = 0` exactly.
    pub fn concentration_certificate(&self, set_m: &[usize], set_n: &[usize]) -> Result<BoundCertificate> {
        let eta = self.prepared.tolerances.eta;
        let set_m = normalized_set(set_m);
        let set_n = normalized_set(set_n);
        let eps = concentration_epsilon(&thresholded(&self.coeff_f, eta), &set_m)?;
        let delta = concentration_epsilon(&thresholded(&self.coeff_g, eta), &set_n)?;
        let mut cert = self.certificate(BoundKind::Concentration, set_m.len(), set_n.len(), eps, delta);
        cert.set_m = Some(set_m);
        cert.set_n = Some(set_n);
        cert.epsilon = Some(eps);
        cert.delta = Some(delta);
        Ok(cert)
    }

    /// Thresholded supports of both coefficient sequences.
    pub fn supports(&self) -> (Vec<usize>, Vec<usize>) {
        let eta = self.prepared.tolerances.eta;
        (support(&self.coeff_f, eta), support(&self.coeff_g, eta))
    }

    /// Slack (right minus left) of the per-index estimate
    /// `(1 + sub_f)|f_j(x)| - ||theta_f x||_1 sub_f <= ||theta_g x||_1 cross_f_omega`
    /// for every `j`, and of its mirror image for every `k` of the second system.
    pub fn per_index_slacks(&self) -> (Vec<f64>, Vec<f64>) {
        let p = &self.prepared.profile;
        let mass_f = l1(&self.coeff_f);
        let mass_g = l1(&self.coeff_g);
        let side = |coeff: &CVector, own_mass: f64, other_mass: f64, sub: f64, cross: f64| {
            coeff
                .iter()
                .map(|z| other_mass * cross - ((1.0 + sub) * z.norm() - own_mass * sub))
                .collect::<Vec<f64>>()
        };
        (
            side(&self.coeff_f, mass_f, mass_g, p.sub_coherence_f, p.cross_f_omega),
            side(&self.coeff_g, mass_g, mass_f, p.sub_coherence_g, p.cross_g_tau),
        )
    }
}

fn normalized_set(set: &[usize]) -> Vec<usize> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Checks the sparsity-product inequality for `x`.
pub fn verify_fkdb(b: &BiSystem, x: &Signal, tolerances: Tolerances) -> Result<BoundCertificate> {
    let prepared = PreparedBiSystem::new(b, tolerances);
    Ok(prepared.analyze(x)?.sparsity_certificate())
}

/// Checks the concentration inequality for `x` over index sets `set_m`, `set_n`.
pub fn verify_fskpb(
    b: &BiSystem,
    x: &Signal,
    set_m: &[usize],
    set_n: &[usize],
    tolerances: Tolerances,
) -> Result<BoundCertificate> {
    let prepared = PreparedBiSystem::new(b, tolerances);
    prepared.analyze(x)?.concentration_certificate(set_m, set_n)
}
