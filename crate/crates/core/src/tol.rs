//! Numeric tolerances used across the crate.
//!
//! Every threshold is fixed here rather than scattered as magic numbers so
//! that reports can state exactly which cutoffs produced a verdict.

/// Hermiticity: `|M[i][j] - conj(M[j][i])|` ≤ HERMITICITY · max(1, max |entry|).
pub const HERMITICITY: f64 = 1e-12;

/// Eigendecomposition reconstruction: ‖Σ λᵢ vᵢvᵢ† − M‖_max ≤ this, relative
/// to max(1, ‖M‖_max). Also bounds eigenvector orthonormality defects.
pub const EIG_RECONSTRUCTION: f64 = 1e-10;

/// Trace preservation of the partial trace.
pub const TRACE_PRESERVATION: f64 = 1e-12;

/// Default relative eigenvalue cutoff for numerical rank.
pub const RANK_EPSILON: f64 = 1e-10;

/// A Hermitian matrix counts as positive semi-definite when its least
/// eigenvalue is ≥ −PSD · max(1, λ_max).
pub const PSD: f64 = 1e-9;

/// Criterion violation threshold: a test value must undershoot zero by more
/// than this before a criterion reports Violated. Raw values are always
/// reported alongside the verdict so borderline cases stay auditable.
pub const CRITERION: f64 = 1e-9;

/// State-vector normalization check.
pub const NORMALIZATION: f64 = 1e-12;

/// Mixture weights must sum to 1 within this.
pub const WEIGHT_SUM: f64 = 1e-12;

/// Schmidt coefficients at or below this are treated as zero when counting
/// the Schmidt rank.
pub const SCHMIDT_CUTOFF: f64 = 1e-10;

/// Ensemble realization: ‖Σ pᵢ|ψᵢ⟩⟨ψᵢ| − ρ‖_max must stay below this.
pub const ENSEMBLE_REALIZATION: f64 = 1e-8;

/// Isometry check: ‖V†V − 1‖_max cutoff.
pub const ISOMETRY: f64 = 1e-10;

/// Local filter refuses marginals with eigenvalue ratio below this.
pub const FILTER_CONDITION: f64 = 1e-14;

/// Flat-spectrum check for filtered marginals.
pub const MARGINAL_FLATNESS: f64 = 1e-8;

/// Entanglement-of-formation descent stops once a full sweep improves the
/// objective by less than this.
pub const EF_CONVERGENCE: f64 = 1e-10;

/// Runtime-configurable tolerances threaded through the criterion pipeline.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Tolerances {
    /// Relative eigenvalue cutoff for numerical rank.
    pub rank_epsilon: f64,
    /// Positive semi-definiteness slack.
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_epsilon: RANK_EPSILON,
            psd: PSD,
        }
    }
}
