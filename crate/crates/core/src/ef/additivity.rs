//! Tensor-power explorer: upper-bound E_f(ρ^⊗n)/n for small n and look for
//! sub-additivity evidence.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::linalg::ComplexMatrix;
use crate::rng::fold_in;
use crate::states::BipartiteState;
use crate::tol;
use crate::{Error, Result};

use super::{default_k, ef_minimize, EfOptions};

/// Largest composite dimension the explorer will touch.
pub const DIMENSION_CAP: usize = 256;

/// ρ^⊗n with the parties regrouped so all A factors form one party.
///
/// E_f is defined across the A|B cut, so the n-fold tensor power is indexed
/// as (A₁…Aₙ)|(B₁…Bₙ): with ā = Σ aₜ·dAⁿ⁻¹⁻ᵗ and b̄ likewise, the entry at
/// ((ā,b̄),(ā′,b̄′)) is Πₜ ρ[(aₜ,bₜ),(aₜ′,bₜ′)]. Built directly from that
/// index map rather than by permuting an intermediate tensor product.
pub fn tensor_power_regrouped(state: &BipartiteState, n: usize) -> Result<BipartiteState> {
    assert!(n >= 1, "tensor power needs n >= 1");
    let (da, db) = state.dims();
    let big_da = da.pow(n as u32);
    let big_db = db.pow(n as u32);
    let dim = big_da
        .checked_mul(big_db)
        .filter(|&d| d <= DIMENSION_CAP)
        .ok_or_else(|| {
            Error::CapExceeded(format!(
                "({da}x{db})^{n} exceeds the {DIMENSION_CAP}-dimensional explorer cap; \
                 ensemble size grows as rank^(2n)"
            ))
        })?;

    let rho = state.rho();
    let digits = |mut value: usize, base: usize| -> Vec<usize> {
        let mut out = vec![0usize; n];
        for slot in (0..n).rev() {
            out[slot] = value % base;
            value /= base;
        }
        out
    };

    let big = ComplexMatrix::from_fn(dim, |row, col| {
        let (abar, bbar) = (row / big_db, row % big_db);
        let (abar2, bbar2) = (col / big_db, col % big_db);
        let a = digits(abar, da);
        let b = digits(bbar, db);
        let a2 = digits(abar2, da);
        let b2 = digits(bbar2, db);
        let mut product = num_complex::Complex64::new(1.0, 0.0);
        for t in 0..n {
            product *= rho[(a[t] * db + b[t], a2[t] * db + b2[t])];
        }
        product
    })?;
    Ok(BipartiteState::from_density_unchecked(big_da, big_db, big))
}

#[derive(Debug, Clone, Copy)]
pub struct AdditivityOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Ensemble-size cap; the full Uhlmann bound rank² grows exponentially
    /// in n, so capped rows are flagged in the output.
    pub k_cap: usize,
    /// Wall-clock budget, checked between levels so each completed row is
    /// still deterministic per seed.
    pub budget: Duration,
}

impl Default for AdditivityOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            max_iterations: 10_000,
            k_cap: 64,
            budget: Duration::from_secs(120),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityRow {
    pub n: usize,
    pub dim: usize,
    pub k: usize,
    pub k_capped: bool,
    /// Upper bound on E_f(ρ^⊗n) in bits.
    pub value: f64,
    pub per_copy: f64,
    pub converged: bool,
    /// per_copy < bound(1) − 1e-4: an upper-bound comparison only, never a
    /// proof of sub-additivity.
    pub subadditivity_evidence: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityTable {
    pub rows: Vec<AdditivityRow>,
    pub restarts: usize,
    pub seed: u64,
    pub k_cap: usize,
    pub budget_secs: f64,
    pub budget_exceeded: bool,
}

/// Upper-bound E_f(ρ^⊗n)/n for n = 1..=n_max.
///
/// Level n uses sub-seed fold_in(seed, n) and k = min(rank², k_cap) clamped
/// up to the rank. If the wall clock runs out, the completed rows are
/// returned with `budget_exceeded` set.
pub fn additivity_explore(
    state: &BipartiteState,
    n_max: usize,
    opts: &AdditivityOptions,
) -> Result<AdditivityTable> {
    assert!(n_max >= 1, "additivity exploration needs n_max >= 1");
    let (da, db) = state.dims();
    let mut check = 1usize;
    for _ in 0..n_max {
        check = check
            .checked_mul(da * db)
            .filter(|&d| d <= DIMENSION_CAP)
            .ok_or_else(|| {
                Error::CapExceeded(format!(
                    "({da}x{db})^{n_max} exceeds the {DIMENSION_CAP}-dimensional explorer cap; \
                     ensemble size grows as rank^(2n)"
                ))
            })?;
    }

    let start = Instant::now();
    let mut rows: Vec<AdditivityRow> = Vec::new();
    let mut budget_exceeded = false;

    for n in 1..=n_max {
        if n > 1 && start.elapsed() > opts.budget {
            budget_exceeded = true;
            break;
        }
        let power = tensor_power_regrouped(state, n)?;
        let rank = power.rank(tol::RANK_EPSILON);
        let uhlmann = default_k(&power, tol::RANK_EPSILON);
        let k = uhlmann.min(opts.k_cap).max(rank);
        let ef = ef_minimize(
            &power,
            k,
            &EfOptions {
                restarts: opts.restarts,
                seed: fold_in(opts.seed, n as u64),
                max_iterations: opts.max_iterations,
            },
        )?;
        rows.push(AdditivityRow {
            n,
            dim: power.dim(),
            k,
            k_capped: k < uhlmann,
            value: ef.value,
            per_copy: ef.value / n as f64,
            converged: ef.converged,
            subadditivity_evidence: false,
        });
    }

    let base = rows.first().map(|r| r.value).unwrap_or(0.0);
    for row in rows.iter_mut().skip(1) {
        row.subadditivity_evidence = row.per_copy < base - 1e-4;
    }

    Ok(AdditivityTable {
        rows,
        restarts: opts.restarts,
        seed: opts.seed,
        k_cap: opts.k_cap,
        budget_secs: opts.budget.as_secs_f64(),
        budget_exceeded,
    })
}
