//! Bipartite pure and mixed states: construction, Schmidt analysis, and the
//! standard fixtures and random generators the criterion pipeline is fed
//! with.

use serde::Serialize;

use crate::linalg::{
    hermitian_eig, inner, min_eigenvalue, numerical_rank, outer, vec_norm, ComplexMatrix, Side, C64,
};
use crate::rng::SplitMix64;
use crate::tol::{self, Tolerances};
use crate::{Error, Result};

/// Normalized pure state on `dA`·`dB` dimensions, A-major amplitude order:
/// the coefficient of |i⟩_A ⊗ |j⟩_B is `amplitudes[i * dB + j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureState {
    da: usize,
    db: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wrap an already normalized amplitude vector.
    pub fn new(da: usize, db: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::DimensionZero);
        }
        if amplitudes.len() != da * db {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for a {da}x{db} state, got {}",
                da * db,
                amplitudes.len()
            )));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > tol::NORMALIZATION {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { da, db, amplitudes })
    }

    /// Normalize an arbitrary nonzero amplitude vector.
    pub fn normalized(da: usize, db: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm < 1e-300 {
            return Err(Error::NotNormalized { norm });
        }
        for z in amplitudes.iter_mut() {
            *z /= norm;
        }
        if da == 0 || db == 0 {
            return Err(Error::DimensionZero);
        }
        if amplitudes.len() != da * db {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for a {da}x{db} state, got {}",
                da * db,
                amplitudes.len()
            )));
        }
        Ok(Self { da, db, amplitudes })
    }

    /// Computational basis state |i⟩_A ⊗ |j⟩_B.
    pub fn basis(da: usize, db: usize, i: usize, j: usize) -> Result<Self> {
        if i >= da || j >= db {
            return Err(Error::DimensionMismatch(format!(
                "basis index ({i},{j}) out of range for {da}x{db}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); da * db];
        amplitudes[i * db + j] = C64::new(1.0, 0.0);
        Self::new(da, db, amplitudes)
    }

    /// |u⟩ ⊗ |v⟩ from local vectors (normalized here).
    pub fn product(u: &[C64], v: &[C64]) -> Result<Self> {
        let mut amplitudes = Vec::with_capacity(u.len() * v.len());
        for a in u {
            for b in v {
                amplitudes.push(a * b);
            }
        }
        Self::normalized(u.len(), v.len(), amplitudes)
    }

    /// (|00⟩ + |11⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(
            2,
            2,
            vec![
                C64::new(r, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(r, 0.0),
            ],
        )
        .expect("static fixture")
    }

    /// (|00⟩ − |11⟩)/√2.
    pub fn bell_phi_minus() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(
            2,
            2,
            vec![
                C64::new(r, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-r, 0.0),
            ],
        )
        .expect("static fixture")
    }

    /// Haar-like random pure state.
    pub fn random(da: usize, db: usize, rng: &mut SplitMix64) -> Result<Self> {
        let amplitudes: Vec<C64> = (0..da * db).map(|_| rng.next_complex_gaussian()).collect();
        Self::normalized(da, db, amplitudes)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.da, self.db)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> ComplexMatrix {
        outer(&self.amplitudes, &self.amplitudes)
    }

    /// Reduced density matrix of the party that is *kept*.
    pub fn marginal(&self, keep: Side) -> ComplexMatrix {
        let (da, db) = (self.da, self.db);
        match keep {
            Side::A => ComplexMatrix::from_fn(da, |a, a2| {
                (0..db)
                    .map(|b| self.amplitudes[a * db + b] * self.amplitudes[a2 * db + b].conj())
                    .sum()
            })
            .expect("da > 0"),
            Side::B => ComplexMatrix::from_fn(db, |b, b2| {
                (0..da)
                    .map(|a| self.amplitudes[a * db + b] * self.amplitudes[a * db + b2].conj())
                    .sum()
            })
            .expect("db > 0"),
        }
    }

    /// Schmidt decomposition via the A-side marginal.
    ///
    /// The marginal is diagonalized and the right vectors are back-solved
    /// from the amplitudes, then polished with modified Gram–Schmidt, which
    /// also covers degenerate coefficient groups. Within a degenerate group
    /// the order is fixed by comparing phase-normalized left vectors, so the
    /// output is deterministic.
    pub fn schmidt_decompose(&self) -> Result<SchmidtData> {
        let (da, db) = (self.da, self.db);
        let eig = hermitian_eig(&self.marginal(Side::A))?;

        // Pair (eigenvalue, phase-normalized left vector), drop numerical
        // zeros, and break ties deterministically. The cutoff is relative to
        // the top eigenvalue: the noise floor of a computed marginal sits
        // near machine epsilon times its norm, well above the square of the
        // coefficient cutoff.
        let floor = tol::RANK_EPSILON * eig.max_eigenvalue().max(1e-300);
        let mut pairs: Vec<(f64, Vec<C64>)> = eig
            .eigenvalues
            .iter()
            .zip(eig.eigenvectors)
            .filter(|(l, _)| **l > floor)
            .map(|(l, mut v)| {
                normalize_phase_first_nonzero(&mut v);
                (l.max(0.0), v)
            })
            .collect();
        pairs.sort_by(|x, y| {
            let close = (x.0 - y.0).abs() <= tol::SCHMIDT_CUTOFF;
            if close {
                lex_compare(&x.1, &y.1)
            } else {
                y.0.partial_cmp(&x.0).expect("finite eigenvalues")
            }
        });

        let coefficients: Vec<f64> = pairs.iter().map(|(l, _)| l.sqrt()).collect();
        let left: Vec<Vec<C64>> = pairs.iter().map(|(_, v)| v.clone()).collect();

        let mut right: Vec<Vec<C64>> = pairs
            .iter()
            .map(|(_, l_vec)| {
                let mut r: Vec<C64> = (0..db)
                    .map(|b| {
                        (0..da)
                            .map(|a| l_vec[a].conj() * self.amplitudes[a * db + b])
                            .sum()
                    })
                    .collect();
                let norm = vec_norm(&r);
                for z in r.iter_mut() {
                    *z /= norm;
                }
                r
            })
            .collect();
        crate::linalg::matrix::gram_schmidt(&mut right);

        Ok(SchmidtData {
            coefficients,
            left,
            right,
            da,
            db,
        })
    }

    /// Entropy of entanglement in bits: −Σ μᵢ log₂ μᵢ over the squared
    /// Schmidt coefficients. Zero exactly for product states.
    pub fn entanglement(&self) -> Result<f64> {
        let schmidt = self.schmidt_decompose()?;
        Ok(entropy_bits(
            &schmidt
                .coefficients
                .iter()
                .map(|c| c * c)
                .collect::<Vec<_>>(),
        ))
    }

    pub fn schmidt_rank(&self) -> Result<usize> {
        Ok(self.schmidt_decompose()?.schmidt_rank())
    }
}

/// Shannon entropy in bits of a nonnegative vector (zeros skipped).
pub(crate) fn entropy_bits(probabilities: &[f64]) -> f64 {
    let h: f64 = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h + 0.0 // normalize -0.0 away
}

fn normalize_phase_first_nonzero(v: &mut [C64]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12) {
        let rot = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

fn lex_compare(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.re.partial_cmp(&y.re).expect("finite") {
            std::cmp::Ordering::Equal => {}
            other => return other,
        }
        match x.im.partial_cmp(&y.im).expect("finite") {
            std::cmp::Ordering::Equal => {}
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Schmidt data of a pure state: nonincreasing coefficients √μᵢ with
/// orthonormal left (dA) and right (dB) factor vectors.
#[derive(Debug, Clone, Serialize)]
pub struct SchmidtData {
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
    da: usize,
    db: usize,
}

impl SchmidtData {
    pub fn schmidt_rank(&self) -> usize {
        self.coefficients
            .iter()
            .filter(|&&c| c > tol::SCHMIDT_CUTOFF)
            .count()
    }

    /// Σ cᵢ |lᵢ⟩⊗|rᵢ⟩ as an amplitude vector.
    pub fn reconstruct(&self) -> Vec<C64> {
        let mut amps = vec![C64::new(0.0, 0.0); self.da * self.db];
        for ((c, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for (a, la) in l.iter().enumerate() {
                for (b, rb) in r.iter().enumerate() {
                    amps[a * self.db + b] += la * rb * c;
                }
            }
        }
        amps
    }

    /// |⟨ψ|reconstruction⟩|² against the original amplitudes.
    pub fn reconstruction_fidelity(&self, original: &PureState) -> f64 {
        inner(original.amplitudes(), &self.reconstruct()).norm_sqr()
    }
}

/// Bipartite density matrix tagged with its local dimensions.
#[derive(Debug, Clone, Serialize)]
pub struct BipartiteState {
    da: usize,
    db: usize,
    rho: ComplexMatrix,
}

impl BipartiteState {
    /// Validating constructor: Hermitian, unit trace, positive semi-definite
    /// within the default tolerances.
    pub fn new(da: usize, db: usize, rho: ComplexMatrix) -> Result<Self> {
        Self::new_with_tol(da, db, rho, &Tolerances::default())
    }

    pub fn new_with_tol(
        da: usize,
        db: usize,
        rho: ComplexMatrix,
        tols: &Tolerances,
    ) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::DimensionZero);
        }
        if rho.dim() != da * db {
            return Err(Error::DimensionMismatch(format!(
                "density matrix dimension {} does not equal dA*dB = {}",
                rho.dim(),
                da * db
            )));
        }
        let state = Self { da, db, rho };
        state.validate(tols)?;
        Ok(state)
    }

    /// Skip validation for matrices that are density matrices by
    /// construction (mixtures of projectors, normalized G·G†).
    pub(crate) fn from_density_unchecked(da: usize, db: usize, rho: ComplexMatrix) -> Self {
        debug_assert_eq!(rho.dim(), da * db);
        Self { da, db, rho }
    }

    /// Check the density-matrix invariants, reporting the first failure.
    pub fn validate(&self, tols: &Tolerances) -> Result<()> {
        let asym = self.rho.max_asymmetry();
        if asym > tol::HERMITICITY * self.rho.max_abs_entry().max(1.0) {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |M[i][j] - conj(M[j][i])| = {asym:.3e}"
            )));
        }
        let trace = self.rho.trace();
        if (trace.re - 1.0).abs() > tol::TRACE_PRESERVATION
            || trace.im.abs() > tol::TRACE_PRESERVATION
        {
            return Err(Error::InvalidState(format!(
                "trace is {:+.12}{:+.12}i, expected 1",
                trace.re, trace.im
            )));
        }
        let eig = hermitian_eig(&self.rho)?;
        let min = eig.min_eigenvalue();
        if min < -tols.psd * eig.max_eigenvalue().max(1.0) {
            return Err(Error::InvalidState(format!(
                "not positive semi-definite: min eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let (da, db) = psi.dims();
        Self::from_density_unchecked(da, db, psi.projector())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.da, self.db)
    }

    pub fn dim(&self) -> usize {
        self.da * self.db
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Reduced density matrix of the party that is kept.
    pub fn marginal(&self, keep: Side) -> ComplexMatrix {
        let traced_out = match keep {
            Side::A => Side::B,
            Side::B => Side::A,
        };
        self.rho
            .partial_trace(self.da, self.db, traced_out)
            .expect("dimensions validated at construction")
    }

    pub fn partial_transpose(&self) -> ComplexMatrix {
        self.rho
            .partial_transpose(self.da, self.db)
            .expect("dimensions validated at construction")
    }

    pub fn rank(&self, epsilon: f64) -> usize {
        numerical_rank(&self.rho, epsilon).expect("density matrix is Hermitian")
    }

    /// ρ conjugated by Uᴀ ⊗ Uʙ.
    pub fn rotate_locally(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        if ua.dim() != self.da || ub.dim() != self.db {
            return Err(Error::DimensionMismatch(
                "local unitary dimensions do not match the state".into(),
            ));
        }
        Ok(Self::from_density_unchecked(
            self.da,
            self.db,
            self.rho.conjugate_by(&ua.tensor(ub)),
        ))
    }

    /// Convex mixture Σ pᵢ |ψᵢ⟩⟨ψᵢ|.
    pub fn mix(components: &[(f64, PureState)]) -> Result<Self> {
        let (first_weight_sum, count) = components
            .iter()
            .fold((0.0, 0usize), |(s, n), (w, _)| (s + w, n + 1));
        if count == 0 {
            return Err(Error::WeightSumInvalid("empty component list".into()));
        }
        if let Some((w, _)) = components.iter().find(|(w, _)| *w < -tol::WEIGHT_SUM) {
            return Err(Error::WeightSumInvalid(format!("negative weight {w}")));
        }
        if (first_weight_sum - 1.0).abs() > tol::WEIGHT_SUM {
            return Err(Error::WeightSumInvalid(format!(
                "weights sum to {first_weight_sum}, expected 1"
            )));
        }
        let (da, db) = components[0].1.dims();
        let dim = da * db;
        let mut rho = ComplexMatrix::zeros(dim)?;
        for (w, psi) in components {
            if psi.dims() != (da, db) {
                return Err(Error::DimensionMismatch(
                    "mixture components have differing local dimensions".into(),
                ));
            }
            let amps = psi.amplitudes();
            for i in 0..dim {
                for k in 0..dim {
                    rho[(i, k)] += amps[i] * amps[k].conj() * *w;
                }
            }
        }
        Ok(Self::from_density_unchecked(da, db, rho))
    }

    /// Random rank-`rank` state ρ = G·G†/Tr(G·G†) with independent standard
    /// complex Gaussian entries of G drawn row-major from the seeded
    /// generator. Deterministic per seed.
    pub fn random(da: usize, db: usize, rank: usize, seed: u64) -> Result<Self> {
        let dim = da
            .checked_mul(db)
            .filter(|&d| d > 0)
            .ok_or(Error::DimensionZero)?;
        if rank == 0 || rank > dim {
            return Err(Error::RankOutOfRange { rank, max: dim });
        }
        let mut rng = SplitMix64::new(seed);
        let g: Vec<Vec<C64>> = (0..dim)
            .map(|_| (0..rank).map(|_| rng.next_complex_gaussian()).collect())
            .collect();
        let mut rho = ComplexMatrix::zeros(dim)?;
        for i in 0..dim {
            for k in i..dim {
                let v: C64 = (0..rank).map(|r| g[i][r] * g[k][r].conj()).sum();
                rho[(i, k)] = v;
                rho[(k, i)] = v.conj();
            }
        }
        let trace = rho.trace().re;
        Ok(Self::from_density_unchecked(
            da,
            db,
            rho.scale_re(1.0 / trace),
        ))
    }

    /// Convex mixture of `terms` random product pure states with
    /// Dirichlet(1,…,1) weights; separable by construction.
    pub fn random_separable(da: usize, db: usize, terms: usize, seed: u64) -> Result<Self> {
        assert!(terms >= 1, "random_separable needs at least one term");
        let mut rng = SplitMix64::new(seed);
        let mut weights: Vec<f64> = (0..terms).map(|_| -(1.0 - rng.next_f64()).ln()).collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        let mut components = Vec::with_capacity(terms);
        for w in weights {
            let u: Vec<C64> = (0..da).map(|_| rng.next_complex_gaussian()).collect();
            let v: Vec<C64> = (0..db).map(|_| rng.next_complex_gaussian()).collect();
            components.push((w, PureState::product(&u, &v)?));
        }
        Self::mix(&components)
    }
}

/// The five tiles product vectors in 3×3 and the rank-4 state built from
/// them: ρ = (𝟙₉ − Σᵢ |φᵢ⟩⟨φᵢ|)/4.
///
/// The vectors form an orthogonal product family whose complement projector
/// has rank 4, marginal ranks 3 and 3, and a positive partial transpose.
/// All of that is re-verified at construction; a failure panics because it
/// would mean the fixture itself is transcribed wrongly.
pub fn tiles_fixture() -> BipartiteState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let third = 1.0 / 3.0;
    let vectors: [Vec<(usize, usize, f64)>; 5] = [
        vec![(0, 0, r), (0, 1, -r)],
        vec![(2, 1, r), (2, 2, -r)],
        vec![(0, 2, r), (1, 2, -r)],
        vec![(1, 0, r), (2, 0, -r)],
        vec![
            (0, 0, third),
            (0, 1, third),
            (0, 2, third),
            (1, 0, third),
            (1, 1, third),
            (1, 2, third),
            (2, 0, third),
            (2, 1, third),
            (2, 2, third),
        ],
    ];
    let states: Vec<PureState> = vectors
        .iter()
        .map(|entries| {
            let mut amps = vec![C64::new(0.0, 0.0); 9];
            for &(i, j, v) in entries {
                amps[i * 3 + j] = C64::new(v, 0.0);
            }
            PureState::new(3, 3, amps).expect("tiles vectors are unit norm")
        })
        .collect();

    for (i, a) in states.iter().enumerate() {
        for b in states.iter().skip(i + 1) {
            let overlap = inner(a.amplitudes(), b.amplitudes()).norm();
            assert!(
                overlap < 1e-14,
                "tiles vectors not orthogonal: overlap {overlap:.3e}"
            );
        }
    }

    let mut rho = ComplexMatrix::identity(9).expect("dim 9");
    for psi in &states {
        rho = &rho - &psi.projector();
    }
    let state = BipartiteState::from_density_unchecked(3, 3, rho.scale_re(0.25));

    let eps = tol::RANK_EPSILON;
    assert_eq!(state.rank(eps), 4, "tiles state must have rank 4");
    assert_eq!(
        numerical_rank(&state.marginal(Side::A), eps).expect("Hermitian"),
        3,
        "tiles marginal A must have rank 3"
    );
    assert_eq!(
        numerical_rank(&state.marginal(Side::B), eps).expect("Hermitian"),
        3,
        "tiles marginal B must have rank 3"
    );
    let pt_min = min_eigenvalue(&state.partial_transpose()).expect("Hermitian");
    assert!(
        pt_min >= -tol::PSD,
        "tiles state must be PPT, got min eigenvalue {pt_min:.3e}"
    );

    state
}
