//! Coherence-based sparsity uncertainty bounds for paired systems of vectors
//! and functionals.
//!
//! Given vectors `tau_j` with functionals `f_j` (`|f_j(tau_j)| >= 1`) and a
//! second such system `(omega_k, g_k)`, every nonzero `x` with
//! `x = sum_j f_j(x) tau_j = sum_k g_k(x) omega_k` satisfies
//!
//! ```text
//! ||theta_f x||_0 ||theta_g x||_0 >=
//!     [1 - (||theta_f x||_0 - 1) mu_f]^+ [1 - (||theta_g x||_0 - 1) mu_g]^+
//!     / (max |f_j(omega_k)| * max |g_k(tau_j)|)
//! ```
//!
//! with `mu_f = max_{j != r} |f_j(tau_r)|` and `mu_g` likewise, plus the
//! analogous statement for 1-norm concentration on index sets. This crate
//! evaluates both bounds, issues certificates for concrete signals,
//! constructs admissible signals, and searches support patterns
//! exhaustively to measure how tight the bounds are.

pub mod admissible;
pub mod bounds;
pub mod coherence;
pub mod dft;
pub mod error;
pub mod formats;
pub mod linalg;
pub mod oracle;
pub mod sparsity;
pub mod system;
pub mod tolerances;

pub use admissible::{
    admissible_space, fixed_subspace, generate, sample_admissible, AdmissibleSpace, Family,
    FamilyDescriptor,
};
pub use bounds::{
    clamp_plus, ds_bound, ds_product, eb_bound, fkdb_rhs, fskpb_rhs, verify_fkdb, verify_fskpb,
    Bound, BoundCertificate, BoundKind, PreparedBiSystem,
};
pub use coherence::{coherence_profile, cross_coherence, gram, sub_coherence, CoherenceProfile};
pub use error::{Error, Result};
pub use oracle::{exhaustive_verify, min_sparsity_product, SearchOptions, TightnessReport, VerifySummary};
pub use sparsity::{best_set, concentration_epsilon, ConcentrationWitness, SparsityProfile};
pub use system::{BiSystem, Field, PairedSystem, Signal, ValidationReport};
pub use tolerances::Tolerances;
