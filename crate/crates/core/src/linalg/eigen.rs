//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Jacobi is a good fit here: matrices are small, always Hermitian, and the
//! quadratic convergence of the sweep delivers eigenvalues to near machine
//! precision with orthonormal eigenvectors by construction. Each rotation
//! first strips the phase of the targeted off-diagonal entry, reducing the
//! 2×2 block to the real symmetric case.

use serde::Serialize;

use super::matrix::ComplexMatrix;
use super::C64;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) with paired orthonormal eigenvectors.
#[derive(Debug, Clone, Serialize)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<C64>>,
}

impl EigenDecomposition {
    /// Σ λᵢ vᵢvᵢ†; used by tests to bound the reconstruction error.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.eigenvectors[0].len();
        ComplexMatrix::from_fn(dim, |i, k| {
            self.eigenvalues
                .iter()
                .zip(&self.eigenvectors)
                .map(|(l, v)| v[i] * v[k].conj() * l)
                .sum()
        })
        .expect("dim > 0")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenvalues above `epsilon * max(λ_max, 1e-300)`.
    pub fn rank_at(&self, epsilon: f64) -> usize {
        let cutoff = epsilon * self.max_eigenvalue().max(1e-300);
        self.eigenvalues.iter().filter(|&&l| l > cutoff).count()
    }
}

/// Diagonalize a Hermitian matrix.
///
/// The input must be Hermitian within [`crate::tol::HERMITICITY`]; it is
/// symmetrized once up front so the iteration works on an exactly Hermitian
/// copy. Returns eigenvalues in descending order; each eigenvector has its
/// largest-magnitude component rotated to the positive real axis so the
/// output is deterministic.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    m.check_hermitian()?;
    let n = m.dim();

    // Exactly Hermitian working copy.
    let mut h = ComplexMatrix::from_fn(n, |i, k| (m[(i, k)] + m[(k, i)].conj()) * 0.5)?;
    let mut vecs = ComplexMatrix::identity(n)?;

    let scale2 = h.frobenius_norm().powi(2).max(1.0);
    let stop = 1e-30 * scale2;
    let skip = stop / ((n * n) as f64);

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += h[(p, q)].norm_sqr();
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if h[(p, q)].norm_sqr() <= skip {
                    continue;
                }
                rotate(&mut h, &mut vecs, p, q);
            }
        }
    }

    // Sort by descending eigenvalue; stable so exact ties keep sweep order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        h[(b, b)]
            .re
            .partial_cmp(&h[(a, a)].re)
            .expect("finite eigenvalues")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| h[(i, i)].re).collect();
    let eigenvectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&col| {
            let mut v: Vec<C64> = (0..n).map(|row| vecs[(row, col)]).collect();
            fix_phase(&mut v);
            v
        })
        .collect();

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation zeroing h[(p,q)], accumulated into `vecs`.
fn rotate(h: &mut ComplexMatrix, vecs: &mut ComplexMatrix, p: usize, q: usize) {
    let n = h.dim();
    let apq = h[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;

    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Column update M <- M V with V = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on
    // the (p, q) plane, then row update M <- V† M.
    let phase_conj = phase.conj();
    for r in 0..n {
        let mp = h[(r, p)];
        let mq = h[(r, q)];
        h[(r, p)] = mp * c - mq * phase_conj * s;
        h[(r, q)] = mp * s + mq * phase_conj * c;
    }
    for r in 0..n {
        let mp = h[(p, r)];
        let mq = h[(q, r)];
        h[(p, r)] = mp * c - mq * phase * s;
        h[(q, r)] = mp * s + mq * phase * c;
    }
    // Enforce the exact post-rotation block.
    h[(p, q)] = C64::new(0.0, 0.0);
    h[(q, p)] = C64::new(0.0, 0.0);
    h[(p, p)] = C64::new(h[(p, p)].re, 0.0);
    h[(q, q)] = C64::new(h[(q, q)].re, 0.0);

    for r in 0..n {
        let vp = vecs[(r, p)];
        let vq = vecs[(r, q)];
        vecs[(r, p)] = vp * c - vq * phase_conj * s;
        vecs[(r, q)] = vp * s + vq * phase_conj * c;
    }
}

fn fix_phase(v: &mut [C64]) {
    let mut idx = 0;
    let mut best = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm_sqr();
        if a > best {
            best = a;
            idx = i;
        }
    }
    let pivot = v[idx];
    let mag = pivot.norm();
    if mag > 0.0 {
        let rot = pivot.conj() / mag;
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Count of eigenvalues above `epsilon * max(λ_max, 1e-300)`.
pub fn numerical_rank(m: &ComplexMatrix, epsilon: f64) -> Result<usize> {
    if epsilon <= 0.0 {
        return Err(Error::DimensionMismatch(format!(
            "rank epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(hermitian_eig(m)?.rank_at(epsilon))
}

/// Smallest eigenvalue of a Hermitian matrix. The matrix is positive
/// semi-definite iff this is ≥ −tolerance.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.min_eigenvalue())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::inner;
    use crate::rng::SplitMix64;
    use crate::tol;

    fn random_hermitian(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(dim, |_, _| rng.next_complex_gaussian()).unwrap();
        let h = &g + &g.adjoint();
        h.scale_re(0.5)
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eig(&ComplexMatrix::identity(2).unwrap()).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_matrix_is_left_alone() {
        let m = ComplexMatrix::diagonal(&[3.0, -1.0]).unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![3.0, -1.0]);
        assert_eq!(
            eig.eigenvectors[0],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
        );
        assert_eq!(
            eig.eigenvectors[1],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
        );
    }

    #[test]
    fn bell_state_partial_transpose_spectrum() {
        // PT of the |Φ+⟩ projector: central 2×2 block ((0,1/2),(1/2,0))
        // forces eigenvalues ±1/2 alongside the two untouched 1/2 entries.
        let half = 0.5;
        let mut rho = ComplexMatrix::zeros(4).unwrap();
        for (i, k) in [(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
            rho[(i, k)] = C64::new(half, 0.0);
        }
        let pt = rho.partial_transpose(2, 2).unwrap();
        let eig = hermitian_eig(&pt).unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (got, want) in eig.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        assert!((min_eigenvalue(&pt).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_orthonormality_over_100_seeds() {
        for seed in 0..100u64 {
            let mut rng = SplitMix64::new(seed);
            let dim = 2 + (seed % 8) as usize; // 2..=9
            let m = random_hermitian(dim, &mut rng);
            let eig = hermitian_eig(&m).unwrap();

            let scale = m.max_abs_entry().max(1.0);
            let err = eig.reconstruct().max_abs_diff(&m);
            assert!(
                err <= tol::EIG_RECONSTRUCTION * scale,
                "seed {seed}: reconstruction error {err:.3e}"
            );

            for i in 0..dim {
                for j in 0..dim {
                    let overlap = inner(&eig.eigenvectors[i], &eig.eigenvectors[j]);
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (overlap - C64::new(target, 0.0)).norm() <= tol::EIG_RECONSTRUCTION,
                        "seed {seed}: ⟨v{i}|v{j}⟩ = {overlap}"
                    );
                }
            }
        }
    }

    #[test]
    fn rank_of_projectors() {
        let quarter = ComplexMatrix::identity(4).unwrap().scale_re(0.25);
        assert_eq!(numerical_rank(&quarter, tol::RANK_EPSILON).unwrap(), 4);

        let mut rng = SplitMix64::new(8);
        let mut v: Vec<C64> = (0..6).map(|_| rng.next_complex_gaussian()).collect();
        let norm = crate::linalg::vec_norm(&v);
        for z in v.iter_mut() {
            *z /= norm;
        }
        let proj = crate::linalg::outer(&v, &v);
        assert_eq!(numerical_rank(&proj, tol::RANK_EPSILON).unwrap(), 1);
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let m = ComplexMatrix::from_entries(
            2,
            vec![
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            hermitian_eig(&m),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn pt_spectrum_invariant_under_local_basis_change() {
        let mut rng = SplitMix64::new(77);
        for &(da, db) in &[(2, 2), (2, 3), (3, 3)] {
            let dim = da * db;
            let g = ComplexMatrix::from_fn(dim, |_, _| rng.next_complex_gaussian()).unwrap();
            let rho = {
                let gg = g.matmul(&g.adjoint());
                let tr = gg.trace().re;
                gg.scale_re(1.0 / tr)
            };
            let base: Vec<f64> = hermitian_eig(&rho.partial_transpose(da, db).unwrap())
                .unwrap()
                .eigenvalues;

            let ua = ComplexMatrix::random_unitary(da, &mut rng).unwrap();
            let ub = ComplexMatrix::random_unitary(db, &mut rng).unwrap();
            let rotated = rho.conjugate_by(&ua.tensor(&ub));
            let spun: Vec<f64> = hermitian_eig(&rotated.partial_transpose(da, db).unwrap())
                .unwrap()
                .eigenvalues;

            for (a, b) in base.iter().zip(&spun) {
                assert!((a - b).abs() < 1e-10, "{da}x{db}: {a} vs {b}");
            }
        }
    }
}
