//! Entanglement-of-formation estimation by ensemble minimization.
//!
//! Every rank-R decomposition ρ = Σ pⱼ|ψⱼ⟩⟨ψⱼ| into k pure states comes
//! from a k×R isometry V applied to the eigen-ensemble: the unnormalized
//! members are |ũⱼ⟩ = Σᵢ Vⱼᵢ √λᵢ |eᵢ⟩. Minimizing the ensemble-averaged
//! pure-state entanglement over V therefore searches all size-k ensembles.
//! The minimizer is a cyclic descent over two-row rotations of V (real and
//! imaginary Givens planes) with step halving from 0.1 rad, restarted from
//! the identity isometry plus seeded random isometries.
//!
//! Everything returned here is an *upper bound* on E_f: each candidate is a
//! verified ensemble, but local descent cannot certify global optimality.

mod additivity;
mod oracle;

pub use additivity::{
    additivity_explore, tensor_power_regrouped, AdditivityOptions, AdditivityRow, AdditivityTable,
};
pub use oracle::ef_oracle_2q;

use serde::Serialize;

use crate::linalg::{hermitian_eig, vec_norm, ComplexMatrix, C64};
use crate::rng::{fold_in, SplitMix64};
use crate::states::{entropy_bits, BipartiteState, PureState};
use crate::tol;
use crate::{Error, Result};

/// Weighted pure-state ensemble realizing a density matrix.
#[derive(Debug, Clone, Serialize)]
pub struct Ensemble {
    pub members: Vec<(f64, PureState)>,
}

impl Ensemble {
    /// Σ pᵢ E(ψᵢ) in bits.
    pub fn average_entanglement(&self) -> Result<f64> {
        let mut total = 0.0;
        for (p, psi) in &self.members {
            total += p * psi.entanglement()?;
        }
        Ok(total)
    }

    /// Σ pᵢ |ψᵢ⟩⟨ψᵢ|.
    pub fn realize(&self) -> ComplexMatrix {
        let dim = {
            let (da, db) = self.members[0].1.dims();
            da * db
        };
        let mut rho = ComplexMatrix::zeros(dim).expect("nonempty ensemble");
        for (p, psi) in &self.members {
            let amps = psi.amplitudes();
            for i in 0..dim {
                for k in 0..dim {
                    rho[(i, k)] += amps[i] * amps[k].conj() * *p;
                }
            }
        }
        rho
    }

    /// ‖Σ pᵢ|ψᵢ⟩⟨ψᵢ| − ρ‖_max.
    pub fn realization_error(&self, rho: &ComplexMatrix) -> f64 {
        self.realize().max_abs_diff(rho)
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(p, _)| p).sum()
    }
}

/// k×R matrix with orthonormal columns, stored by rows.
#[derive(Debug, Clone)]
pub struct Isometry {
    rows: Vec<Vec<C64>>,
}

impl Isometry {
    /// Top-R-rows identity: reproduces the eigen-ensemble.
    pub fn identity(k: usize, r: usize) -> Self {
        let rows = (0..k)
            .map(|j| {
                (0..r)
                    .map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// Gaussian draw with columns orthonormalized.
    pub fn random(k: usize, r: usize, rng: &mut SplitMix64) -> Self {
        assert!(
            k >= r,
            "an isometry needs at least as many rows ({k}) as columns ({r})"
        );
        let mut cols: Vec<Vec<C64>> = (0..r)
            .map(|_| (0..k).map(|_| rng.next_complex_gaussian()).collect())
            .collect();
        crate::linalg::matrix::gram_schmidt(&mut cols);
        Self::from_columns(&cols)
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        Self { rows }
    }

    fn from_columns(cols: &[Vec<C64>]) -> Self {
        let k = cols[0].len();
        let r = cols.len();
        let rows = (0..k)
            .map(|j| (0..r).map(|i| cols[i][j]).collect())
            .collect();
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<C64>] {
        &self.rows
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn r(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// ‖V†V − 1‖_max.
    pub fn isometry_defect(&self) -> f64 {
        let r = self.r();
        let mut worst = 0.0f64;
        for i in 0..r {
            for i2 in 0..r {
                let dot: C64 = self.rows.iter().map(|row| row[i].conj() * row[i2]).sum();
                let target = if i == i2 { 1.0 } else { 0.0 };
                worst = worst.max((dot - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Re-orthonormalize the columns in place (drift control after long
    /// rotation chains).
    fn reorthonormalize(&mut self) {
        let mut cols: Vec<Vec<C64>> = (0..self.r())
            .map(|i| self.rows.iter().map(|row| row[i]).collect())
            .collect();
        crate::linalg::matrix::gram_schmidt(&mut cols);
        *self = Self::from_columns(&cols);
    }
}

/// Retained eigenpairs of ρ, scaled for ensemble construction.
struct SpectralData {
    /// √λᵢ |eᵢ⟩ for each retained eigenvalue.
    scaled_vectors: Vec<Vec<C64>>,
    da: usize,
    db: usize,
}

impl SpectralData {
    fn new(state: &BipartiteState, rank_epsilon: f64) -> Self {
        let eig = hermitian_eig(state.rho()).expect("density matrix is Hermitian");
        let cutoff = rank_epsilon * eig.max_eigenvalue().max(1e-300);
        let scaled_vectors = eig
            .eigenvalues
            .iter()
            .zip(&eig.eigenvectors)
            .filter(|(l, _)| **l > cutoff)
            .map(|(l, v)| {
                let s = l.sqrt();
                v.iter().map(|z| z * s).collect()
            })
            .collect();
        let (da, db) = state.dims();
        Self {
            scaled_vectors,
            da,
            db,
        }
    }

    fn rank(&self) -> usize {
        self.scaled_vectors.len()
    }

    /// Weight and weighted entanglement of the member generated by one
    /// isometry row. Zero-weight members contribute nothing.
    fn member_contribution(&self, row: &[C64]) -> (f64, f64) {
        let dim = self.da * self.db;
        let mut u = vec![C64::new(0.0, 0.0); dim];
        for (coeff, svec) in row.iter().zip(&self.scaled_vectors) {
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            for (x, s) in u.iter_mut().zip(svec) {
                *x += coeff * s;
            }
        }
        let weight: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        if weight < 1e-15 {
            return (0.0, 0.0);
        }

        // Entropy of the smaller marginal of u/√weight.
        let (da, db) = (self.da, self.db);
        let marginal = if da <= db {
            ComplexMatrix::from_fn(da, |a, a2| {
                (0..db)
                    .map(|b| u[a * db + b] * u[a2 * db + b].conj())
                    .sum::<C64>()
                    * (1.0 / weight)
            })
        } else {
            ComplexMatrix::from_fn(db, |b, b2| {
                (0..da)
                    .map(|a| u[a * db + b] * u[a * db + b2].conj())
                    .sum::<C64>()
                    * (1.0 / weight)
            })
        }
        .expect("local dimension > 0");
        let eig = hermitian_eig(&marginal).expect("marginal is Hermitian");
        let probs: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
        (weight, weight * entropy_bits(&probs))
    }
}

/// Build the ensemble generated by an isometry over ρ's eigen-ensemble.
pub fn ensemble_from_isometry(state: &BipartiteState, isometry: &Isometry) -> Result<Ensemble> {
    let spectral = SpectralData::new(state, tol::RANK_EPSILON);
    let r = spectral.rank();
    if isometry.r() != r {
        return Err(Error::DimensionMismatch(format!(
            "isometry has {} columns but the state has rank {r}",
            isometry.r()
        )));
    }
    let defect = isometry.isometry_defect();
    if defect > tol::ISOMETRY {
        return Err(Error::NotIsometry { deviation: defect });
    }
    build_ensemble(&spectral, isometry)
}

fn build_ensemble(spectral: &SpectralData, isometry: &Isometry) -> Result<Ensemble> {
    let dim = spectral.da * spectral.db;
    let mut members = Vec::new();
    for row in isometry.rows() {
        let mut u = vec![C64::new(0.0, 0.0); dim];
        for (coeff, svec) in row.iter().zip(&spectral.scaled_vectors) {
            for (x, s) in u.iter_mut().zip(svec) {
                *x += coeff * s;
            }
        }
        let weight = vec_norm(&u).powi(2);
        if weight < 1e-15 {
            continue;
        }
        let inv = 1.0 / weight.sqrt();
        for x in u.iter_mut() {
            *x *= inv;
        }
        members.push((weight, PureState::new(spectral.da, spectral.db, u)?));
    }
    Ok(Ensemble { members })
}

/// Knobs for [`ef_minimize`].
#[derive(Debug, Clone, Copy)]
pub struct EfOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Cap on rotation trials per restart, checked at sweep boundaries.
    pub max_iterations: usize,
}

impl Default for EfOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            max_iterations: 10_000,
        }
    }
}

/// Minimization outcome. `value` is an upper bound on E_f realized by
/// `best_ensemble`; `converged` reflects local stationarity of the best
/// restart, not global optimality.
#[derive(Debug, Clone, Serialize)]
pub struct EfResult {
    pub value: f64,
    pub best_ensemble: Ensemble,
    pub k: usize,
    pub restarts: usize,
    pub converged: bool,
    pub per_restart_values: Vec<f64>,
}

/// Uhlmann's bound on the ensemble size needed for the exact minimum.
pub fn default_k(state: &BipartiteState, rank_epsilon: f64) -> usize {
    let r = state.rank(rank_epsilon);
    r * r
}

struct RestartOutcome {
    value: f64,
    isometry: Isometry,
    converged: bool,
}

/// Multi-restart descent over k-member ensembles.
///
/// Restart 0 starts from the identity isometry (the eigen-ensemble), so the
/// result never exceeds the eigen-ensemble's average entanglement; the
/// remaining restarts start from seeded random isometries with per-restart
/// sub-seeds, so parallel and sequential execution give identical results.
pub fn ef_minimize(state: &BipartiteState, k: usize, opts: &EfOptions) -> Result<EfResult> {
    let spectral = SpectralData::new(state, tol::RANK_EPSILON);
    let r = spectral.rank();
    if k < r {
        return Err(Error::KTooSmall { k, rank: r });
    }
    assert!(opts.restarts >= 1, "ef_minimize needs at least one restart");

    let outcomes: Vec<RestartOutcome> = crate::par::indexed_map(opts.restarts, |index| {
        let start = if index == 0 {
            Isometry::identity(k, r)
        } else {
            let mut rng = SplitMix64::new(fold_in(opts.seed, index as u64));
            Isometry::random(k, r, &mut rng)
        };
        descend(&spectral, start, opts.max_iterations)
    });

    let per_restart_values: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
    let best_index = per_restart_values
        .iter()
        .enumerate()
        .fold(0usize, |best, (i, v)| {
            if *v < per_restart_values[best] {
                i
            } else {
                best
            }
        });
    let best = &outcomes[best_index];

    let best_ensemble = build_ensemble(&spectral, &best.isometry)?;
    let value = best_ensemble.average_entanglement()?;

    Ok(EfResult {
        value,
        best_ensemble,
        k,
        restarts: opts.restarts,
        converged: best.converged,
        per_restart_values,
    })
}

#[derive(Clone, Copy)]
enum Plane {
    Real,
    Imaginary,
}

const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-4;

fn descend(
    spectral: &SpectralData,
    mut isometry: Isometry,
    max_iterations: usize,
) -> RestartOutcome {
    let k = isometry.k();
    let mut contributions: Vec<(f64, f64)> = isometry
        .rows()
        .iter()
        .map(|row| spectral.member_contribution(row))
        .collect();
    let mut objective: f64 = contributions.iter().map(|c| c.1).sum();

    let mut step = INITIAL_STEP;
    let mut iterations = 0usize;
    // The objective is bounded below by zero, so hitting it is convergence.
    let mut converged = objective < 1e-12;

    while !converged && iterations < max_iterations {
        let mut sweep_gain = 0.0;
        let (cos, sin) = (step.cos(), step.sin());
        for a in 0..k {
            for b in a + 1..k {
                // Two zero-weight rows stay zero under any rotation.
                if contributions[a].0 == 0.0 && contributions[b].0 == 0.0 {
                    continue;
                }
                for plane in [Plane::Real, Plane::Imaginary] {
                    for sign in [1.0, -1.0] {
                        iterations += 1;
                        let s = sin * sign;
                        // Keep applying an accepted rotation while it
                        // improves: a cheap line extension along the
                        // generator at the current step size.
                        for _repeat in 0..64 {
                            let (row_a, row_b) =
                                rotated_rows(&isometry.rows[a], &isometry.rows[b], cos, s, plane);
                            let ca = spectral.member_contribution(&row_a);
                            let cb = spectral.member_contribution(&row_b);
                            let delta = ca.1 + cb.1 - contributions[a].1 - contributions[b].1;
                            if delta >= -1e-15 {
                                break;
                            }
                            isometry.rows[a] = row_a;
                            isometry.rows[b] = row_b;
                            contributions[a] = ca;
                            contributions[b] = cb;
                            objective += delta;
                            sweep_gain -= delta;
                        }
                    }
                }
            }
        }

        if objective < 1e-12 {
            converged = true;
        } else if sweep_gain < tol::EF_CONVERGENCE {
            if step <= MIN_STEP {
                converged = true;
            } else {
                step *= 0.5;
            }
        }
    }

    isometry.reorthonormalize();
    let final_contribs: Vec<(f64, f64)> = isometry
        .rows()
        .iter()
        .map(|row| spectral.member_contribution(row))
        .collect();
    let value = final_contribs.iter().map(|c| c.1).sum();
    RestartOutcome {
        value,
        isometry,
        converged,
    }
}

fn rotated_rows(
    row_a: &[C64],
    row_b: &[C64],
    c: f64,
    s: f64,
    plane: Plane,
) -> (Vec<C64>, Vec<C64>) {
    match plane {
        Plane::Real => {
            let new_a = row_a
                .iter()
                .zip(row_b)
                .map(|(x, y)| x * c - y * s)
                .collect();
            let new_b = row_a
                .iter()
                .zip(row_b)
                .map(|(x, y)| x * s + y * c)
                .collect();
            (new_a, new_b)
        }
        Plane::Imaginary => {
            let is = C64::new(0.0, s);
            let new_a = row_a
                .iter()
                .zip(row_b)
                .map(|(x, y)| x * c + y * is)
                .collect();
            let new_b = row_a
                .iter()
                .zip(row_b)
                .map(|(x, y)| x * is + y * c)
                .collect();
            (new_a, new_b)
        }
    }
}
