//! Local filtering: flatten one marginal's spectrum with a single-party
//! Kraus operation.

use serde::Serialize;

use crate::linalg::{hermitian_eig, ComplexMatrix, Side, C64};
use crate::states::BipartiteState;
use crate::tol::{self, Tolerances};
use crate::{Error, Result};

/// Result of a successful local filter.
#[derive(Debug, Clone, Serialize)]
pub struct FilterOutcome {
    pub filtered: BipartiteState,
    /// Tr[(K ⊗ 1) ρ (K ⊗ 1)†] ∈ (0, 1]: the probability the filter clicks.
    pub success_probability: f64,
    /// Max deviation of the filtered marginal's support eigenvalues from 1/R.
    pub marginal_flatness: f64,
    pub side: Side,
    pub marginal_rank: usize,
}

/// Apply the Kraus operator K = Σᵢ √(μ_min/μᵢ) |μᵢ⟩⟨μᵢ| built from the
/// eigenpairs of the chosen marginal, restricted to its range.
///
/// The coefficients are scaled by the smallest retained eigenvalue so that
/// K†K ≤ 1 with the success probability maximal; after normalization the
/// filtered marginal equals 1_R/R. Marginals with eigenvalue ratio below
/// [`tol::FILTER_CONDITION`] are rejected as [`Error::SingularScaling`]
/// rather than silently filtered.
pub fn local_filter(
    state: &BipartiteState,
    side: Side,
    tols: &Tolerances,
) -> Result<FilterOutcome> {
    let marginal = state.marginal(side);
    let eig = hermitian_eig(&marginal)?;
    let cutoff = tols.rank_epsilon * eig.max_eigenvalue().max(1e-300);

    let retained: Vec<(f64, &Vec<C64>)> = eig
        .eigenvalues
        .iter()
        .copied()
        .zip(&eig.eigenvectors)
        .filter(|(l, _)| *l > cutoff)
        .collect();
    let rank = retained.len();
    debug_assert!(
        rank >= 1,
        "a density matrix marginal cannot have empty support"
    );

    let mu_max = retained[0].0;
    let mu_min = retained[rank - 1].0;
    let ratio = mu_min / mu_max;
    if ratio < tol::FILTER_CONDITION {
        return Err(Error::SingularScaling { ratio });
    }

    let local_dim = marginal.dim();
    let mut kraus = ComplexMatrix::zeros(local_dim)?;
    for (mu, vector) in &retained {
        let coeff = (mu_min / mu).sqrt();
        for i in 0..local_dim {
            for k in 0..local_dim {
                kraus[(i, k)] += vector[i] * vector[k].conj() * coeff;
            }
        }
    }

    let (da, db) = state.dims();
    let full = match side {
        Side::A => kraus.tensor(&ComplexMatrix::identity(db)?),
        Side::B => ComplexMatrix::identity(da)?.tensor(&kraus),
    };
    let raw = full.matmul(state.rho()).matmul(&full.adjoint());
    let probability = raw.trace().re;
    debug_assert!(probability > 0.0);

    // Normalize and force exact Hermiticity against rounding drift.
    let dim = da * db;
    let filtered_rho = ComplexMatrix::from_fn(dim, |i, k| {
        (raw[(i, k)] + raw[(k, i)].conj()) * (0.5 / probability)
    })?;
    let filtered = BipartiteState::from_density_unchecked(da, db, filtered_rho);

    let flat_target = 1.0 / rank as f64;
    let filtered_marginal_eig = hermitian_eig(&filtered.marginal(side))?;
    let marginal_flatness = filtered_marginal_eig
        .eigenvalues
        .iter()
        .take(rank)
        .map(|l| (l - flat_target).abs())
        .fold(0.0, f64::max);

    Ok(FilterOutcome {
        filtered,
        success_probability: probability,
        marginal_flatness,
        side,
        marginal_rank: rank,
    })
}
