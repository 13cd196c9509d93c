//! Closed-form two-qubit entanglement of formation from the spin-flip
//! concurrence; used as the independent cross-check for the numerical
//! minimizer.

use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::states::BipartiteState;
use crate::{Error, Result};

/// E_f of a two-qubit state in bits.
///
/// C = max(0, λ₁ − λ₂ − λ₃ − λ₄) with λᵢ the descending square roots of the
/// eigenvalues of √ρ · ρ̃ · √ρ, where ρ̃ = (σy⊗σy) ρ* (σy⊗σy); then
/// E_f = h((1 + √(1−C²))/2) with h the binary entropy.
pub fn ef_oracle_2q(state: &BipartiteState) -> Result<f64> {
    let (da, db) = state.dims();
    if (da, db) != (2, 2) {
        return Err(Error::DimensionNotTwoByTwo { da, db });
    }

    let rho = state.rho();
    let conj = ComplexMatrix::from_fn(4, |i, k| rho[(i, k)].conj())?;
    let yy = sigma_y_tensor_sigma_y();
    let spin_flipped = yy.matmul(&conj).matmul(&yy);

    let sqrt_rho = matrix_sqrt(rho);
    let m = sqrt_rho.matmul(&spin_flipped).matmul(&sqrt_rho);
    let eig = hermitian_eig(&m)?;
    // Same relative floor as in matrix_sqrt: square roots of noise
    // eigenvalues (~√ε) would otherwise leak into the concurrence.
    let floor = crate::tol::RANK_EPSILON * eig.max_eigenvalue().max(1e-300);
    let lambdas: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|l| if *l > floor { l.sqrt() } else { 0.0 })
        .collect();

    let concurrence = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    let x = 0.5 * (1.0 + (1.0 - concurrence * concurrence).max(0.0).sqrt());
    Ok(binary_entropy(x))
}

fn sigma_y_tensor_sigma_y() -> ComplexMatrix {
    // σy ⊗ σy is real: antidiagonal (−1, 1, 1, −1).
    let mut m = ComplexMatrix::zeros(4).expect("dim 4");
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

fn matrix_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eig(m).expect("Hermitian input");
    // Noise eigenvalues of order ε·λ_max have square roots of order √ε that
    // would otherwise dominate the error; zero them out.
    let floor = crate::tol::RANK_EPSILON * eig.max_eigenvalue().max(1e-300);
    ComplexMatrix::from_fn(m.dim(), |i, k| {
        eig.eigenvalues
            .iter()
            .zip(&eig.eigenvectors)
            .map(|(l, v)| {
                let root = if *l > floor { l.sqrt() } else { 0.0 };
                v[i] * v[k].conj() * root
            })
            .sum()
    })
    .expect("dim > 0")
}

fn binary_entropy(x: f64) -> f64 {
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.log2();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).log2();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::PureState;

    #[test]
    fn bell_state_is_one_ebit() {
        let state = BipartiteState::from_pure(&PureState::bell_phi_plus());
        assert!((ef_oracle_2q(&state).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_is_zero() {
        let state = BipartiteState::from_pure(&PureState::basis(2, 2, 0, 1).unwrap());
        assert!(ef_oracle_2q(&state).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pure_states_match_entanglement_entropy() {
        // For pure states E_f equals the marginal entropy.
        let mut rng = crate::rng::SplitMix64::new(5150);
        for _ in 0..25 {
            let psi = PureState::random(2, 2, &mut rng).unwrap();
            let direct = psi.entanglement().unwrap();
            let via_concurrence = ef_oracle_2q(&BipartiteState::from_pure(&psi)).unwrap();
            assert!((direct - via_concurrence).abs() < 1e-10);
        }
    }

    #[test]
    fn separable_mixture_is_zero() {
        let state = BipartiteState::mix(&[
            (0.5, PureState::bell_phi_plus()),
            (0.5, PureState::bell_phi_minus()),
        ])
        .unwrap();
        assert!(ef_oracle_2q(&state).unwrap().abs() < 1e-10);
    }

    #[test]
    fn rejects_wrong_dimensions() {
        let state = BipartiteState::random(2, 3, 2, 1).unwrap();
        assert!(matches!(
            ef_oracle_2q(&state),
            Err(Error::DimensionNotTwoByTwo { .. })
        ));
    }
}
