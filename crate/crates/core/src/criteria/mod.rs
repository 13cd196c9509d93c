//! Separability and distillability criteria, individually callable and
//! combined into one [`CriterionReport`] by [`analyze`].
//!
//! Verdict vocabulary: a criterion can certify distillability
//! ([`Verdict::Distillable`]), certify separability where the partial
//! transpose settles the question outright ([`Verdict::Separable`], local
//! dimensions 2×2 and 2×3 only), be consistent with separability without
//! proving it ([`Verdict::SeparableConsistent`]), flag entanglement without
//! a distillation route ([`Verdict::Violated`]), or say nothing
//! ([`Verdict::Inconclusive`]). The overall verdict never claims "bound
//! entangled": the tests here are necessary conditions only, so the honest
//! negative outcome is [`Overall::NotDistillableByTheseTests`].

mod filter;
mod two_qubit;

pub use filter::{local_filter, FilterOutcome};
pub use two_qubit::{
    align_product_to_00, mixture_state, two_qubit_mixture_test, two_qubit_mixture_test_general,
    MixtureTestReport,
};

use serde::Serialize;

use crate::linalg::{hermitian_eig, ComplexMatrix, Side, C64};
use crate::states::BipartiteState;
use crate::tol::{self, Tolerances};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Distillable,
    Separable,
    SeparableConsistent,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Overall {
    Distillable,
    Separable,
    NotDistillableByTheseTests,
}

/// Partial-transpose test result.
#[derive(Debug, Clone, Serialize)]
pub struct PptOutcome {
    pub is_ppt: bool,
    /// Smallest eigenvalue of PT(ρ), the raw witness.
    pub min_eigenvalue: f64,
    /// In 2×2 and 2×3 the partial transpose settles the question, so NPT is
    /// upgraded to Distillable and PPT to Separable.
    pub decisive: bool,
    pub verdict: Verdict,
}

/// NPT iff the least eigenvalue of PT(ρ) undershoots −psd_tol.
pub fn ppt_test(state: &BipartiteState, tols: &Tolerances) -> PptOutcome {
    let pt = state.partial_transpose();
    let eig = hermitian_eig(&pt).expect("PT of a Hermitian matrix is Hermitian");
    let min = eig.min_eigenvalue();
    let is_ppt = min >= -tols.psd * eig.max_eigenvalue().max(1.0);
    let decisive = state.dim() <= 6;
    let verdict = match (is_ppt, decisive) {
        (false, true) => Verdict::Distillable,
        (true, true) => Verdict::Separable,
        (false, false) => Verdict::Violated,
        (true, false) => Verdict::SeparableConsistent,
    };
    PptOutcome {
        is_ppt,
        min_eigenvalue: min,
        decisive,
        verdict,
    }
}

/// Reduction-criterion result for both operator orderings.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionOutcome {
    /// Least eigenvalue of ρ_A ⊗ 1 − ρ.
    pub min_eig_a: f64,
    /// Least eigenvalue of 1 ⊗ ρ_B − ρ.
    pub min_eig_b: f64,
    pub violated: bool,
    /// Eigenvector achieving the most negative value, when violated.
    pub witness_vector: Option<Vec<C64>>,
    pub witness_side: Option<Side>,
    pub verdict: Verdict,
}

/// Checks ρ_A ⊗ 1 − ρ ⪰ 0 and 1 ⊗ ρ_B − ρ ⪰ 0. A violation of either is
/// sufficient for distillability.
pub fn reduction_test(state: &BipartiteState, tols: &Tolerances) -> ReductionOutcome {
    let (da, db) = state.dims();
    let id_a = ComplexMatrix::identity(da).expect("da > 0");
    let id_b = ComplexMatrix::identity(db).expect("db > 0");

    let op_a = &state.marginal(Side::A).tensor(&id_b) - state.rho();
    let op_b = &id_a.tensor(&state.marginal(Side::B)) - state.rho();

    let eig_a = hermitian_eig(&op_a).expect("Hermitian by construction");
    let eig_b = hermitian_eig(&op_b).expect("Hermitian by construction");
    let min_a = eig_a.min_eigenvalue();
    let min_b = eig_b.min_eigenvalue();

    let threshold = -tols.psd;
    let violated = min_a < threshold || min_b < threshold;
    let (witness_vector, witness_side) = if violated {
        if min_a <= min_b {
            (
                Some(eig_a.eigenvectors.last().expect("nonempty").clone()),
                Some(Side::A),
            )
        } else {
            (
                Some(eig_b.eigenvectors.last().expect("nonempty").clone()),
                Some(Side::B),
            )
        }
    } else {
        (None, None)
    };

    ReductionOutcome {
        min_eig_a: min_a,
        min_eig_b: min_b,
        violated,
        witness_vector,
        witness_side,
        verdict: if violated {
            Verdict::Distillable
        } else {
            Verdict::SeparableConsistent
        },
    }
}

/// Constructive witness attached to a rank-criterion verdict: the filter
/// flattened one marginal and the reduction criterion then failed on the
/// filtered state.
#[derive(Debug, Clone, Serialize)]
pub struct RankWitness {
    pub filtered_side: Side,
    pub success_probability: f64,
    pub marginal_flatness: f64,
    /// Least eigenvalue of the filtered-side reduction operator.
    pub reduction_min_eig: f64,
    /// 1/R − 1/r: the violation can never be milder than this.
    pub proof_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankOutcome {
    pub rank: usize,
    pub rank_a: usize,
    pub rank_b: usize,
    pub verdict: Verdict,
    pub witness: Option<RankWitness>,
    /// Set on the rank == max-marginal-rank path: whether the filtered state
    /// came out proportional to the identity on its support.
    pub filtered_proportional_to_identity: Option<bool>,
    pub note: Option<String>,
}

/// Rank-versus-marginal-rank test.
///
/// If rank(ρ) < max(rank ρ_A, rank ρ_B) the state is distillable, and the
/// verdict ships with a constructive witness: filtering the larger-rank side
/// flattens that marginal, after which the reduction criterion is violated
/// by at least 1/R − 1/r. If rank(ρ) equals the max marginal rank, the same
/// chain still works unless the filtered state is proportional to the
/// identity on its support; that case stays Inconclusive.
pub fn rank_criterion(state: &BipartiteState, tols: &Tolerances) -> RankOutcome {
    let eps = tols.rank_epsilon;
    let rank = state.rank(eps);
    let rank_a = crate::linalg::numerical_rank(&state.marginal(Side::A), eps)
        .expect("marginal is Hermitian");
    let rank_b = crate::linalg::numerical_rank(&state.marginal(Side::B), eps)
        .expect("marginal is Hermitian");
    let rank_max = rank_a.max(rank_b);
    let side = if rank_a >= rank_b { Side::A } else { Side::B };

    let outcome = |verdict, witness, flat, note| RankOutcome {
        rank,
        rank_a,
        rank_b,
        verdict,
        witness,
        filtered_proportional_to_identity: flat,
        note,
    };

    if rank < rank_max {
        // Distillable outright; build the constructive witness.
        match witness_via_filter(state, side, rank, rank_max, tols) {
            Ok(witness) => outcome(Verdict::Distillable, Some(witness), None, None),
            Err(e) => outcome(
                Verdict::Distillable,
                None,
                None,
                Some(format!("witness construction failed: {e}")),
            ),
        }
    } else if rank == rank_max {
        match filter::local_filter(state, side, tols) {
            Ok(filtered) => {
                let spectrum =
                    hermitian_eig(filtered.filtered.rho()).expect("density matrix is Hermitian");
                let support: Vec<f64> = {
                    let cutoff = eps * spectrum.max_eigenvalue().max(1e-300);
                    spectrum
                        .eigenvalues
                        .iter()
                        .copied()
                        .filter(|&l| l > cutoff)
                        .collect()
                };
                let spread = support.first().copied().unwrap_or(0.0)
                    - support.last().copied().unwrap_or(0.0);
                let flat = spread <= tols.psd;
                if flat {
                    outcome(
                        Verdict::Inconclusive,
                        None,
                        Some(true),
                        Some(
                            "filtered state is proportional to the identity on its support; \
                             the filter-based witness cannot apply"
                                .into(),
                        ),
                    )
                } else {
                    let reduction = reduction_test(&filtered.filtered, tols);
                    if reduction.violated {
                        let min_eig = match side {
                            Side::A => reduction.min_eig_a,
                            Side::B => reduction.min_eig_b,
                        };
                        outcome(
                            Verdict::Distillable,
                            Some(RankWitness {
                                filtered_side: side,
                                success_probability: filtered.success_probability,
                                marginal_flatness: filtered.marginal_flatness,
                                reduction_min_eig: min_eig,
                                proof_bound: 1.0 / rank_max as f64 - 1.0 / rank as f64,
                            }),
                            Some(false),
                            None,
                        )
                    } else {
                        outcome(
                            Verdict::Inconclusive,
                            None,
                            Some(false),
                            Some(
                                "filtered spectrum is not flat but the reduction margin \
                                 is below threshold"
                                    .into(),
                            ),
                        )
                    }
                }
            }
            Err(e) => outcome(
                Verdict::Inconclusive,
                None,
                None,
                Some(format!("filter failed: {e}")),
            ),
        }
    } else {
        outcome(Verdict::Inconclusive, None, None, None)
    }
}

fn witness_via_filter(
    state: &BipartiteState,
    side: Side,
    rank: usize,
    rank_max: usize,
    tols: &Tolerances,
) -> Result<RankWitness> {
    let filtered = filter::local_filter(state, side, tols)?;
    let reduction = reduction_test(&filtered.filtered, tols);
    let reduction_min_eig = match side {
        Side::A => reduction.min_eig_a,
        Side::B => reduction.min_eig_b,
    };
    Ok(RankWitness {
        filtered_side: side,
        success_probability: filtered.success_probability,
        marginal_flatness: filtered.marginal_flatness,
        reduction_min_eig,
        proof_bound: 1.0 / rank_max as f64 - 1.0 / rank as f64,
    })
}

/// Rényi entropy S_α in bits from a spectrum, with the α → 1 and α → ∞
/// limits handled explicitly and S₀ counting the numerical rank.
///
/// Eigenvalues below the rank cutoff are dropped at every order, not just
/// α = 0: for α < 1 a noise eigenvalue of order ε contributes ε^α, which
/// would dwarf the noise itself and break monotonicity in α.
pub fn renyi_from_spectrum(eigenvalues: &[f64], alpha: f64, rank_epsilon: f64) -> Result<f64> {
    if alpha < 0.0 {
        return Err(Error::NegativeAlpha(alpha));
    }
    let max = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let cutoff = rank_epsilon * max.max(1e-300);
    let support = eigenvalues.iter().copied().filter(|&l| l > cutoff);
    if alpha == 0.0 {
        return Ok((support.count() as f64).log2());
    }
    if alpha == 1.0 {
        let h: f64 = support.map(|l| -l * l.log2()).sum();
        return Ok(h + 0.0);
    }
    if alpha.is_infinite() {
        return Ok(-max.log2() + 0.0);
    }
    let total: f64 = support.map(|l| l.powf(alpha)).sum();
    Ok(total.log2() / (1.0 - alpha) + 0.0)
}

/// S_α(ρ) in bits.
pub fn renyi_entropy(state: &BipartiteState, alpha: f64, tols: &Tolerances) -> Result<f64> {
    let eig = hermitian_eig(state.rho()).expect("density matrix is Hermitian");
    renyi_from_spectrum(&eig.eigenvalues, alpha, tols.rank_epsilon)
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyOutcome {
    /// "0", "1", "2", "inf", or the numeric order for heuristic values.
    pub alpha: String,
    pub s_rho: f64,
    pub s_a: f64,
    pub s_b: f64,
    pub satisfied: bool,
    /// True outside the proved orders {0, 1, 2, ∞}.
    pub heuristic: bool,
    pub verdict: Verdict,
}

fn alpha_label(alpha: f64) -> String {
    if alpha.is_infinite() {
        "inf".into()
    } else if alpha == alpha.trunc() {
        format!("{}", alpha as u64)
    } else {
        format!("{alpha}")
    }
}

/// Tests S_α(ρ) ≥ S_α(ρ_A) and S_α(ρ) ≥ S_α(ρ_B), a necessary condition
/// for a state to be separable or non-distillable at α = 0 and a necessary
/// separability condition at α ∈ {1, 2, ∞}. An α = 0 violation is the rank
/// inequality in entropy form and certifies distillability.
pub fn entropy_inequality_test(
    state: &BipartiteState,
    alpha: f64,
    tols: &Tolerances,
) -> Result<EntropyOutcome> {
    let spectrum = |m: &ComplexMatrix| {
        hermitian_eig(m)
            .expect("Hermitian by construction")
            .eigenvalues
    };
    let s_rho = renyi_from_spectrum(&spectrum(state.rho()), alpha, tols.rank_epsilon)?;
    let s_a = renyi_from_spectrum(
        &spectrum(&state.marginal(Side::A)),
        alpha,
        tols.rank_epsilon,
    )?;
    let s_b = renyi_from_spectrum(
        &spectrum(&state.marginal(Side::B)),
        alpha,
        tols.rank_epsilon,
    )?;

    let satisfied = s_rho >= s_a - tol::CRITERION && s_rho >= s_b - tol::CRITERION;
    let heuristic = !(alpha == 0.0 || alpha == 1.0 || alpha == 2.0 || alpha.is_infinite());
    let verdict = if satisfied {
        Verdict::SeparableConsistent
    } else if alpha == 0.0 {
        Verdict::Distillable
    } else {
        Verdict::Violated
    };
    Ok(EntropyOutcome {
        alpha: alpha_label(alpha),
        s_rho,
        s_a,
        s_b,
        satisfied,
        heuristic,
        verdict,
    })
}

/// R̃ = 1/Tr(ρ²), an effective-rank measure with 1 ≤ R̃ ≤ rank(ρ).
pub fn participation_ratio(state: &BipartiteState) -> f64 {
    let purity: f64 = state.rho().entries().iter().map(|z| z.norm_sqr()).sum();
    1.0 / purity
}

/// Support analysis: a rank-r state that is separable or non-distillable
/// must fit inside an r×r local subspace, so marginal ranks above r certify
/// distillability.
#[derive(Debug, Clone, Serialize)]
pub struct SupportOutcome {
    pub rank: usize,
    pub support_dims: (usize, usize),
    pub consistent: bool,
    pub description: String,
}

fn support_analysis(rank: usize, rank_a: usize, rank_b: usize) -> SupportOutcome {
    let consistent = rank >= rank_a.max(rank_b);
    let description = if consistent {
        format!("rank-{rank} state confined to a {rank_a}x{rank_b} support")
    } else {
        format!(
            "rank {rank} is below the {rank_a}x{rank_b} support dimensions; \
             the state is distillable"
        )
    };
    SupportOutcome {
        rank,
        support_dims: (rank_a, rank_b),
        consistent,
        description,
    }
}

/// Full pipeline output. Field order is the serialization order, so reports
/// are byte-stable for identical inputs.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub dims: (usize, usize),
    pub tolerances: Tolerances,
    pub ppt: PptOutcome,
    pub reduction: ReductionOutcome,
    pub rank: RankOutcome,
    pub entropies: Vec<EntropyOutcome>,
    pub participation_ratio: f64,
    pub support: SupportOutcome,
    pub notes: Vec<String>,
    pub overall: Overall,
}

impl CriterionReport {
    /// Name → verdict view over all criteria, in pipeline order.
    pub fn verdicts(&self) -> Vec<(String, Verdict)> {
        let mut v = vec![
            ("ppt".to_string(), self.ppt.verdict),
            ("reduction".to_string(), self.reduction.verdict),
            ("rank".to_string(), self.rank.verdict),
        ];
        for e in &self.entropies {
            v.push((format!("entropy_alpha_{}", e.alpha), e.verdict));
        }
        v
    }

    /// True when the state passes every necessary non-distillability
    /// condition without any separability proof applying: PPT, reduction
    /// satisfied, all entropy inequalities satisfied, support consistent,
    /// and no decisive PPT⇔separable upgrade.
    pub fn candidate_bound_entangled(&self) -> bool {
        self.overall == Overall::NotDistillableByTheseTests
            && self.ppt.is_ppt
            && !self.reduction.violated
            && self.entropies.iter().all(|e| e.satisfied)
            && self.support.consistent
    }
}

/// Run every criterion and aggregate.
pub fn analyze(state: &BipartiteState, tols: &Tolerances) -> CriterionReport {
    let ppt = ppt_test(state, tols);
    let reduction = reduction_test(state, tols);
    let rank = rank_criterion(state, tols);
    let entropies: Vec<EntropyOutcome> = [0.0, 1.0, 2.0, f64::INFINITY]
        .iter()
        .map(|&alpha| {
            entropy_inequality_test(state, alpha, tols).expect("fixed nonnegative orders")
        })
        .collect();
    let participation = participation_ratio(state);
    let support = support_analysis(rank.rank, rank.rank_a, rank.rank_b);

    let mut notes = Vec::new();
    if let Some(n) = &rank.note {
        notes.push(n.clone());
    }

    let distillable = ppt.verdict == Verdict::Distillable
        || reduction.violated
        || rank.verdict == Verdict::Distillable
        || entropies.iter().any(|e| e.verdict == Verdict::Distillable);

    let overall = if distillable {
        Overall::Distillable
    } else if ppt.decisive && ppt.is_ppt {
        Overall::Separable
    } else {
        Overall::NotDistillableByTheseTests
    };

    let (da, db) = state.dims();
    if overall == Overall::NotDistillableByTheseTests && ppt.is_ppt {
        notes.push(
            "PPT beyond the decisive 2x2/2x3 regime: neither separability nor \
             entanglement is certified by these tests"
                .into(),
        );
    }
    if overall == Overall::NotDistillableByTheseTests
        && ppt.is_ppt
        && rank.rank == rank.rank_a
        && rank.rank == rank.rank_b
        && rank.rank_a == da
        && rank.rank_b == db
    {
        notes.push(
            "irreducible PPT state with rank equal to both marginal ranks: \
             no implemented criterion resolves distillability for this family"
                .into(),
        );
    }

    CriterionReport {
        dims: state.dims(),
        tolerances: *tols,
        ppt,
        reduction,
        rank,
        entropies,
        participation_ratio: participation,
        support,
        notes,
        overall,
    }
}
