//! Closed-form distillability test for two-qubit mixtures of a product
//! state with an arbitrary pure state.
//!
//! For ρ ∝ p|00⟩⟨00| + |ψ⟩⟨ψ| with ψ = a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩, the
//! determinant of the partial transpose splits along its top row into
//!
//!   det(PT(p|00⟩⟨00| + |ψ⟩⟨ψ|)) = p·det(C₁₁) + det(PT(|ψ⟩⟨ψ|))
//!
//! with C₁₁ the minor dropping row and column 0. The minor term evaluates to
//! −p·|d|²·|ad−bc|² ≤ 0 and the pure term to −|ad−bc|⁴, so the determinant
//! is negative exactly when ψ is entangled; in 2×2 that settles
//! distillability for every p ≥ 0. The direct partial-transpose eigenvalue
//! test runs alongside and is the verdict of record; the decomposition is
//! reported as the analytic cross-check.

use serde::Serialize;

use crate::linalg::{matvec, min_eigenvalue, ComplexMatrix, C64};
use crate::states::{BipartiteState, PureState};
use crate::tol::Tolerances;
use crate::{Error, Result};

use super::Verdict;

/// When the minor term is smaller than this the closed form degenerates
/// (d ≈ 0 or ψ ≈ product) and the verdict falls back to the eigenvalue test
/// alone.
const CLOSED_FORM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct MixtureTestReport {
    pub p: f64,
    /// ψ components (a, b, c, d) in the basis where the product state is |00⟩.
    pub amplitudes: [C64; 4],
    /// Local rotations applied to move the product component to |00⟩, when
    /// the general entry point was used.
    pub alignment: Option<(ComplexMatrix, ComplexMatrix)>,
    /// |ad − bc|.
    pub schmidt_product: f64,
    /// det PT(p|00⟩⟨00| + |ψ⟩⟨ψ|), unnormalized.
    pub det_pt: f64,
    /// p·det(C₁₁) computed from the minor.
    pub minor_term: f64,
    /// −p·|d|²·|ad−bc|², the closed form the minor term must equal.
    pub minor_term_closed_form: f64,
    /// det PT(|ψ⟩⟨ψ|) = −|ad−bc|⁴.
    pub pure_term: f64,
    /// |det_pt − (minor_term + pure_term)|.
    pub cramer_residual: f64,
    /// Least eigenvalue of PT(ρ) for the normalized mixture.
    pub min_eig_pt: f64,
    pub direct_verdict: Verdict,
    /// None when the closed form degenerated and the fallback applied.
    pub closed_form_verdict: Option<Verdict>,
    pub agreement: bool,
    /// The verdict of record (the direct eigenvalue test).
    pub verdict: Verdict,
}

fn require_two_by_two(psi: &PureState) -> Result<()> {
    let (da, db) = psi.dims();
    if (da, db) != (2, 2) {
        return Err(Error::DimensionNotTwoByTwo { da, db });
    }
    Ok(())
}

/// The normalized mixture (p|00⟩⟨00| + |ψ⟩⟨ψ|)/(1+p).
pub fn mixture_state(p: f64, psi: &PureState) -> Result<BipartiteState> {
    require_two_by_two(psi)?;
    if p < 0.0 {
        return Err(Error::WeightSumInvalid(format!(
            "mixture weight p must be >= 0, got {p}"
        )));
    }
    let mut rho = psi.projector();
    rho[(0, 0)] += C64::new(p, 0.0);
    Ok(BipartiteState::from_density_unchecked(
        2,
        2,
        rho.scale_re(1.0 / (1.0 + p)),
    ))
}

/// Run the mixture test with the product component already at |00⟩.
pub fn two_qubit_mixture_test(
    p: f64,
    psi: &PureState,
    tols: &Tolerances,
) -> Result<MixtureTestReport> {
    require_two_by_two(psi)?;
    if p < 0.0 {
        return Err(Error::WeightSumInvalid(format!(
            "mixture weight p must be >= 0, got {p}"
        )));
    }
    let amps = psi.amplitudes();
    let (a, b, c, d) = (amps[0], amps[1], amps[2], amps[3]);

    let mut rho_unnorm = psi.projector();
    rho_unnorm[(0, 0)] += C64::new(p, 0.0);
    let pt = rho_unnorm.partial_transpose(2, 2).expect("4 = 2*2");
    let det_pt = real_det(&pt);

    let minor = ComplexMatrix::from_fn(3, |i, k| pt[(i + 1, k + 1)]).expect("3 > 0");
    let minor_term = p * real_det(&minor);

    let pure_pt = psi.projector().partial_transpose(2, 2).expect("4 = 2*2");
    let pure_term = real_det(&pure_pt);

    let schmidt_product = (a * d - b * c).norm();
    let minor_term_closed_form = -p * d.norm_sqr() * schmidt_product * schmidt_product;
    let cramer_residual = (det_pt - (minor_term + pure_term)).abs();

    let state = mixture_state(p, psi)?;
    let min_eig_pt = min_eigenvalue(&state.partial_transpose()).expect("PT is Hermitian");
    let direct_verdict = if min_eig_pt < -tols.psd {
        Verdict::Distillable
    } else {
        Verdict::Separable
    };

    let closed_form_verdict = if minor_term_closed_form.abs() < CLOSED_FORM_FLOOR {
        None
    } else if det_pt < 0.0 {
        Some(Verdict::Distillable)
    } else {
        Some(Verdict::Separable)
    };
    let agreement = closed_form_verdict.is_none_or(|v| v == direct_verdict);

    Ok(MixtureTestReport {
        p,
        amplitudes: [a, b, c, d],
        alignment: None,
        schmidt_product,
        det_pt,
        minor_term,
        minor_term_closed_form,
        pure_term,
        cramer_residual,
        min_eig_pt,
        direct_verdict,
        closed_form_verdict,
        agreement,
        verdict: direct_verdict,
    })
}

/// Local rotations (U_A, U_B) sending an arbitrary two-qubit product state
/// to |00⟩; errors if the given state is not a product state.
pub fn align_product_to_00(product: &PureState) -> Result<(ComplexMatrix, ComplexMatrix)> {
    require_two_by_two(product)?;
    let schmidt = product.schmidt_decompose()?;
    if schmidt.schmidt_rank() != 1 {
        return Err(Error::DimensionMismatch(
            "alignment target is not a product state (Schmidt rank > 1)".into(),
        ));
    }
    let u = &schmidt.left[0];
    let v = &schmidt.right[0];
    Ok((rotation_to_zero(u), rotation_to_zero(v)))
}

/// Unitary whose first row is ⟨u|, so U|u⟩ = |0⟩.
fn rotation_to_zero(u: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_entries(2, vec![u[0].conj(), u[1].conj(), -u[1], u[0]]).expect("2 > 0")
}

/// Mixture test for an arbitrary product component: rotates it to |00⟩,
/// transforms ψ the same way, and records the rotations in the report.
pub fn two_qubit_mixture_test_general(
    p: f64,
    product: &PureState,
    psi: &PureState,
    tols: &Tolerances,
) -> Result<MixtureTestReport> {
    require_two_by_two(psi)?;
    let (ua, ub) = align_product_to_00(product)?;
    let full = ua.tensor(&ub);
    let aligned = PureState::new(2, 2, matvec(&full, psi.amplitudes()))?;
    let mut report = two_qubit_mixture_test(p, &aligned, tols)?;
    report.alignment = Some((ua, ub));
    Ok(report)
}

/// Determinant of a Hermitian matrix as a real number.
fn real_det(m: &ComplexMatrix) -> f64 {
    let det = m.determinant();
    debug_assert!(
        det.im.abs() <= 1e-10 * det.norm().max(1.0),
        "Hermitian determinant came out complex: {det}"
    );
    det.re
}

/// det(PT(|ψ⟩⟨ψ|)) for tests: −|ad−bc|⁴ from the Schmidt spectrum.
#[cfg(test)]
pub(crate) fn pure_pt_det(psi: &PureState) -> f64 {
    real_det(
        &crate::linalg::outer(psi.amplitudes(), psi.amplitudes())
            .partial_transpose(2, 2)
            .unwrap(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pure_entangled_state_alone_is_distillable() {
        let report =
            two_qubit_mixture_test(0.0, &PureState::bell_phi_plus(), &Tolerances::default())
                .unwrap();
        assert_eq!(report.verdict, Verdict::Distillable);
        assert!(report.det_pt < 0.0);
        // det PT(Φ+) = (1/2)³ · (−1/2) = −1/16.
        assert!((report.pure_term + 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn equal_mixture_with_bell_state() {
        // p = 1, ψ = Φ+: minor term −p|d|²|ad−bc|² = −1/8, pure term −1/16,
        // total −3/16 (worked by hand from the 4×4 partial transpose).
        let report =
            two_qubit_mixture_test(1.0, &PureState::bell_phi_plus(), &Tolerances::default())
                .unwrap();
        assert!(
            (report.minor_term + 0.125).abs() < 1e-12,
            "{}",
            report.minor_term
        );
        assert!((report.minor_term_closed_form + 0.125).abs() < 1e-12);
        assert!((report.pure_term + 0.0625).abs() < 1e-12);
        assert!((report.det_pt + 0.1875).abs() < 1e-12);
        assert!(report.cramer_residual < 1e-12);
        assert_eq!(report.verdict, Verdict::Distillable);
        assert!(report.agreement);
    }

    #[test]
    fn product_psi_gives_separable_mixture() {
        // ψ with ad = bc is a product state; both routes must say separable.
        let psi =
            PureState::product(&[c(0.6, 0.0), c(0.8, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let report = two_qubit_mixture_test(0.7, &psi, &Tolerances::default()).unwrap();
        assert!(report.schmidt_product < 1e-12);
        assert!(report.pure_term.abs() < 1e-12);
        assert!(report.minor_term.abs() < 1e-12);
        assert_eq!(report.verdict, Verdict::Separable);
        // Closed form degenerates here; fallback must have applied.
        assert!(report.closed_form_verdict.is_none());
    }

    #[test]
    fn cramer_identity_and_agreement_on_random_draws() {
        let mut rng = SplitMix64::new(2024);
        for trial in 0..200 {
            let psi = PureState::random(2, 2, &mut rng).unwrap();
            let p = 4.0 * rng.next_f64();
            let report = two_qubit_mixture_test(p, &psi, &Tolerances::default()).unwrap();

            let scale = report
                .det_pt
                .abs()
                .max(report.minor_term.abs())
                .max(report.pure_term.abs())
                .max(1e-30);
            assert!(
                report.cramer_residual <= 1e-10 * scale.max(1.0),
                "trial {trial}: residual {:.3e}",
                report.cramer_residual
            );
            assert!(
                (report.minor_term - report.minor_term_closed_form).abs()
                    <= 1e-10 * report.minor_term.abs().max(1.0),
                "trial {trial}"
            );
            assert!(report.agreement, "trial {trial}");
            // Random ψ is entangled with probability 1.
            assert_eq!(report.verdict, Verdict::Distillable, "trial {trial}");
            // PT determinant of an entangled pure state is strictly negative.
            assert!(pure_pt_det(&psi) < 0.0);
        }
    }

    #[test]
    fn zero_d_component_still_resolves() {
        // d = 0 with bc ≠ 0: minor term vanishes but ψ stays entangled; the
        // fallback eigenvalue test must still say distillable.
        let psi = PureState::normalized(
            2,
            2,
            vec![c(0.3, 0.0), c(0.7, 0.0), c(0.65, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let report = two_qubit_mixture_test(0.5, &psi, &Tolerances::default()).unwrap();
        assert!(report.minor_term_closed_form.abs() < CLOSED_FORM_FLOOR);
        assert!(report.closed_form_verdict.is_none());
        assert_eq!(report.verdict, Verdict::Distillable);
    }

    #[test]
    fn general_alignment_matches_prealigned_form() {
        let mut rng = SplitMix64::new(31337);
        for _ in 0..20 {
            let u: Vec<C64> = (0..2).map(|_| rng.next_complex_gaussian()).collect();
            let v: Vec<C64> = (0..2).map(|_| rng.next_complex_gaussian()).collect();
            let product = PureState::product(&u, &v).unwrap();
            let psi = PureState::random(2, 2, &mut rng).unwrap();
            let p = 2.0 * rng.next_f64();

            let general =
                two_qubit_mixture_test_general(p, &product, &psi, &Tolerances::default()).unwrap();
            // The PT spectrum is invariant under local rotations, so the
            // aligned mixture has the same least eigenvalue as the raw one.
            let mut rho = psi.projector();
            let prod_amps = product.amplitudes();
            for i in 0..4 {
                for k in 0..4 {
                    rho[(i, k)] += prod_amps[i] * prod_amps[k].conj() * p;
                }
            }
            let raw_state =
                BipartiteState::from_density_unchecked(2, 2, rho.scale_re(1.0 / (1.0 + p)));
            let raw_min = min_eigenvalue(&raw_state.partial_transpose()).unwrap();
            assert!((general.min_eig_pt - raw_min).abs() < 1e-10);
            assert!(general.alignment.is_some());
            assert_eq!(general.verdict, Verdict::Distillable);
        }
    }
}
