//! Exhaustive support-pattern search for the smallest achievable sparsity
//! product, and seeded bulk verification of the certificates.
//!
//! Patterns `(S_f, S_g)` are visited by increasing `|S_f| |S_g|`, then by
//! increasing `max(|S_f|, |S_g|)` (balanced shapes first, so a Dirac comb
//! beats a spike of equal product), then by `|S_f|`, then lexicographically
//! in `S_f` and `S_g`. A pattern is feasible
//! when some nonzero admissible `x` has `theta_f x` vanishing off `S_f` and
//! `theta_g x` vanishing off `S_g`, which is a null-space question on the
//! complement rows of `F A` and `G A` (`A` an admissible basis). The first
//! feasible pattern is the minimum; its null vectors have exactly that
//! support, since any smaller support would have been visited earlier.

use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::{sample_admissible, AdmissibleSpace};
use crate::bounds::{fkdb_rhs, PreparedBiSystem};
use crate::error::{Error, Result};
use crate::formats::serialize_signal;
use crate::linalg::{c, null_space, CMatrix, CVector};
use crate::sparsity::{best_set, support};
use crate::system::{BiSystem, Signal};
use crate::tolerances::{Tolerances, SEARCH_GUARD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchOptions {
    pub eta: f64,
    pub tol_rank: f64,
    pub tol_cert: f64,
    pub guard: usize,
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        let t = Tolerances::default();
        Self { eta: t.eta, tol_rank: t.rank, tol_cert: t.cert, guard: SEARCH_GUARD, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    /// smallest achieved `||theta_f x||_0 ||theta_g x||_0`
    pub best_lhs: usize,
    pub support_f: Vec<usize>,
    pub support_g: Vec<usize>,
    #[serde(serialize_with = "serialize_signal")]
    pub witness: Signal,
    /// `None` when the bound is vacuous
    pub rhs_at_witness: Option<f64>,
    pub gap: Option<f64>,
    /// position of the witness pattern in the visiting order
    pub patterns_searched: u64,
    pub guard: usize,
    pub eta: f64,
    pub tol_rank: f64,
}

impl TightnessReport {
    pub fn consistent(&self, tol_cert: f64) -> bool {
        self.gap.is_some_and(|g| g >= -tol_cert)
    }
}

/// All `size`-subsets of `0..n` as bitmasks, in lexicographic order of
/// their sorted index lists.
fn combinations(n: usize, size: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | (1 << i)));
        // rightmost index that can still advance
        let Some(pos) = (0..size).rev().find(|&p| idx[p] < n - size + p) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..size {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn mask_to_indices(mask: u64, len: usize) -> Vec<usize> {
    (0..len).filter(|&i| mask & (1 << i) != 0).collect()
}

struct Search<'a> {
    system: &'a BiSystem,
    basis: &'a CMatrix,
    fa: CMatrix,
    ga: CMatrix,
    options: SearchOptions,
}

impl Search<'_> {
    fn feasible(&self, mask_f: u64, mask_g: u64) -> Option<CVector> {
        let n = self.fa.nrows();
        let m = self.ga.nrows();
        let w = self.basis.ncols();
        let off_f: Vec<usize> = (0..n).filter(|&j| mask_f & (1 << j) == 0).collect();
        let off_g: Vec<usize> = (0..m).filter(|&k| mask_g & (1 << k) == 0).collect();
        let mut constraints = CMatrix::zeros(off_f.len() + off_g.len(), w);
        for (r, &j) in off_f.iter().enumerate() {
            constraints.row_mut(r).copy_from(&self.fa.row(j));
        }
        for (r, &k) in off_g.iter().enumerate() {
            constraints.row_mut(off_f.len() + r).copy_from(&self.ga.row(k));
        }
        let kernel = null_space(&constraints, self.options.tol_rank);
        if kernel.ncols() == 0 {
            return None;
        }
        let mut x = self.basis * kernel.column(0);
        // fix the phase: largest coordinate (first on ties) real positive
        let mut peak = 0;
        for i in 1..x.len() {
            if x[i].norm() > x[peak].norm() {
                peak = i;
            }
        }
        let scale = x[peak].norm();
        if scale == 0.0 {
            return None;
        }
        x *= x[peak].conj() / c(scale);

        let eta = self.options.eta;
        let coeff_f = self.system.first().analysis(&x).ok()?;
        let coeff_g = self.system.second().analysis(&x).ok()?;
        let exact = support(&coeff_f, eta) == mask_to_indices(mask_f, n)
            && support(&coeff_g, eta) == mask_to_indices(mask_g, m);
        exact.then_some(x)
    }
}

/// Smallest sparsity product over the admissible space, with a witness.
pub fn min_sparsity_product(
    b: &BiSystem,
    space: &AdmissibleSpace,
    options: SearchOptions,
) -> Result<TightnessReport> {
    let n = b.first().len();
    let m = b.second().len();
    if n + m > options.guard {
        return Err(Error::GuardExceeded { requested: n + m, guard: options.guard });
    }
    if n > 64 || m > 64 {
        return Err(Error::GuardExceeded { requested: n + m, guard: 128 });
    }
    if space.dim() == 0 {
        return Err(Error::NoAdmissibleSignal);
    }
    let search = Search {
        system: b,
        basis: space.basis(),
        fa: b.first().functionals() * space.basis(),
        ga: b.second().functionals() * space.basis(),
        options,
    };
    let profile = crate::coherence::coherence_profile(b);
    let mut cache_f: Vec<Option<Vec<u64>>> = vec![None; n + 1];
    let mut cache_g: Vec<Option<Vec<u64>>> = vec![None; m + 1];
    let mut searched: u64 = 0;

    for product in 1..=n * m {
        let mut shapes: Vec<(usize, usize)> = (1..=n)
            .filter(|a| product % a == 0 && product / a <= m)
            .map(|a| (a, product / a))
            .collect();
        shapes.sort_by_key(|&(a, b)| (a.max(b), a));
        for (size_f, size_g) in shapes {
            let cf = cache_f[size_f].get_or_insert_with(|| combinations(n, size_f)).clone();
            let cg = cache_g[size_g].get_or_insert_with(|| combinations(m, size_g)).clone();
            let total = cf.len() * cg.len();
            let eval = |i: usize| {
                search.feasible(cf[i / cg.len()], cg[i % cg.len()]).map(|x| (i, x))
            };
            let found = if options.parallel {
                (0..total).into_par_iter().find_map_first(eval)
            } else {
                (0..total).find_map(eval)
            };
            if let Some((i, x)) = found {
                searched += i as u64 + 1;
                let rhs = fkdb_rhs(size_f, size_g, &profile).finite();
                return Ok(TightnessReport {
                    best_lhs: product,
                    support_f: mask_to_indices(cf[i / cg.len()], n),
                    support_g: mask_to_indices(cg[i % cg.len()], m),
                    witness: Signal::new(x, 0.0)?,
                    rhs_at_witness: rhs,
                    gap: rhs.map(|r| product as f64 - r),
                    patterns_searched: searched,
                    guard: options.guard,
                    eta: options.eta,
                    tol_rank: options.tol_rank,
                });
            }
            searched += total as u64;
        }
    }
    Err(Error::Degenerate(
        "no support pattern was numerically feasible; admissible space may be ill-conditioned".into(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub trials: usize,
    pub seed: u64,
    pub fkdb_satisfied: usize,
    pub hypothesis_failures: usize,
    pub bound_failures: usize,
    pub fskpb_checked: usize,
    pub fskpb_satisfied: usize,
    /// smallest `lhs - rhs` over all sparsity certificates with a finite bound
    pub min_margin: Option<f64>,
    pub failing_seeds: Vec<u64>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.failing_seeds.is_empty() && self.fskpb_checked == self.fskpb_satisfied
    }
}

/// Every `FSKPB_STRIDE`-th trial also checks the concentration form at every
/// pair of set sizes, with the best sets of those sizes.
pub const FSKPB_STRIDE: usize = 10;

struct TrialOutcome {
    seed: u64,
    hypothesis_ok: bool,
    satisfied: bool,
    margin: Option<f64>,
    fskpb_checked: usize,
    fskpb_satisfied: usize,
}

/// Samples `trials` admissible signals with seeds `seed, seed + 1, ...` and
/// checks the certificates on each.
pub fn exhaustive_verify(
    b: &BiSystem,
    space: &AdmissibleSpace,
    trials: usize,
    seed: u64,
    tolerances: Tolerances,
) -> Result<VerifySummary> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    if space.dim() == 0 {
        return Err(Error::NoAdmissibleSignal);
    }
    let prepared = PreparedBiSystem::new(b, tolerances);
    let n = b.first().len();
    let m = b.second().len();
    let outcomes: Vec<Result<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = seed.wrapping_add(i as u64);
            let x = sample_admissible(space, trial_seed)?;
            let analyzed = prepared.analyze(&x)?;
            let cert = analyzed.sparsity_certificate();
            let mut checked = 0;
            let mut satisfied = 0;
            if i % FSKPB_STRIDE == 0 {
                for size_m in 0..=n {
                    let set_m = best_set(analyzed.coefficients_f(), size_m)?.set;
                    for size_n in 0..=m {
                        let set_n = best_set(analyzed.coefficients_g(), size_n)?.set;
                        let conc = analyzed.concentration_certificate(&set_m, &set_n)?;
                        checked += 1;
                        satisfied += usize::from(conc.satisfied);
                    }
                }
            }
            Ok(TrialOutcome {
                seed: trial_seed,
                hypothesis_ok: cert.hypothesis_ok,
                satisfied: cert.satisfied,
                margin: cert.margin(),
                fskpb_checked: checked,
                fskpb_satisfied: satisfied,
            })
        })
        .collect();

    let mut summary = VerifySummary {
        trials,
        seed,
        fkdb_satisfied: 0,
        hypothesis_failures: 0,
        bound_failures: 0,
        fskpb_checked: 0,
        fskpb_satisfied: 0,
        min_margin: None,
        failing_seeds: Vec::new(),
    };
    for outcome in outcomes {
        let o = outcome?;
        if !o.hypothesis_ok {
            summary.hypothesis_failures += 1;
            summary.failing_seeds.push(o.seed);
        } else if !o.satisfied {
            summary.bound_failures += 1;
            summary.failing_seeds.push(o.seed);
        } else {
            summary.fkdb_satisfied += 1;
        }
        if let Some(margin) = o.margin {
            summary.min_margin = Some(summary.min_margin.map_or(margin, |mm: f64| mm.min(margin)));
        }
        summary.fskpb_checked += o.fskpb_checked;
        summary.fskpb_satisfied += o.fskpb_satisfied;
    }
    Ok(summary)
}
