use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::C64;
use crate::rng::SplitMix64;
use crate::{tol, Error, Result};

/// Which party of a bipartite system an operation acts on.
///
/// The composite index convention is A-major throughout the crate: the basis
/// state |i⟩_A ⊗ |j⟩_B sits at position `i * dB + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            for k in 0..self.dim {
                let z = self[(i, k)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionZero);
        }
        Ok(Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionZero);
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionZero);
        }
        let entries = (0..dim * dim).map(|n| f(n / dim, n % dim)).collect();
        Ok(Self { dim, entries })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, k| self[(k, i)].conj()).expect("dim > 0")
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|M[i][k] - conj(M[k][i])|` over all index pairs.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for k in i..self.dim {
                worst = worst.max((self[(i, k)] - self[(k, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_asymmetry() <= tol::HERMITICITY * self.max_abs_entry().max(1.0)
    }

    pub(crate) fn check_hermitian(&self) -> Result<()> {
        let asym = self.max_asymmetry();
        if asym > tol::HERMITICITY * self.max_abs_entry().max(1.0) {
            return Err(Error::NonHermitianInput {
                max_asymmetry: asym,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n).expect("dim > 0");
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[(i, k)] += a * other[(j, k)];
                }
            }
        }
        out
    }

    /// U M U† for a square `u` of the same dimension.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Kronecker product under the A-major index convention:
    /// entry `((i*dB+j),(k*dB+l)) = A[i][k] * B[j][l]` with dB = dim(B).
    pub fn tensor(&self, other: &Self) -> Self {
        let da = self.dim;
        let db = other.dim;
        let mut out = Self::zeros(da * db).expect("dims > 0");
        for i in 0..da {
            for k in 0..da {
                let a = self[(i, k)];
                for j in 0..db {
                    for l in 0..db {
                        out[(i * db + j, k * db + l)] = a * other[(j, l)];
                    }
                }
            }
        }
        out
    }

    /// Trace out one party of a (dA·dB)-dimensional matrix.
    ///
    /// `side` names the party that is traced *over*: `Side::B` returns the
    /// dA×dA marginal `(Tr_B M)[i][k] = Σ_j M[(i,j)][(k,j)]`, and symmetrically
    /// for `Side::A`.
    pub fn partial_trace(&self, da: usize, db: usize, side: Side) -> Result<Self> {
        self.check_bipartite(da, db)?;
        match side {
            Side::B => Self::from_fn(da, |i, k| {
                (0..db).map(|j| self[(i * db + j, k * db + j)]).sum()
            }),
            Side::A => Self::from_fn(db, |j, l| {
                (0..da).map(|i| self[(i * db + j, i * db + l)]).sum()
            }),
        }
    }

    /// Transpose the B-party indices only:
    /// `out[(i,j)][(k,l)] = M[(i,l)][(k,j)]`.
    ///
    /// Entries are moved, never recomputed, so applying the map twice
    /// restores the input bit-exactly.
    pub fn partial_transpose(&self, da: usize, db: usize) -> Result<Self> {
        self.check_bipartite(da, db)?;
        Self::from_fn(da * db, |row, col| {
            let (i, j) = (row / db, row % db);
            let (k, l) = (col / db, col % db);
            self[(i * db + l, k * db + j)]
        })
    }

    fn check_bipartite(&self, da: usize, db: usize) -> Result<()> {
        if da == 0 || db == 0 {
            return Err(Error::DimensionZero);
        }
        if da * db != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix has dimension {}, expected dA*dB = {}*{} = {}",
                self.dim,
                da,
                db,
                da * db
            )));
        }
        Ok(())
    }

    /// Determinant via LU with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let n = self.dim;
        let mut lu = self.entries.clone();
        let at = |m: &[C64], i: usize, j: usize| m[i * n + j];
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let (pivot_row, pivot_mag) =
                (col..n)
                    .map(|r| (r, at(&lu, r, col).norm()))
                    .fold(
                        (col, -1.0),
                        |best, cand| if cand.1 > best.1 { cand } else { best },
                    );
            if pivot_mag == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                det = -det;
            }
            let pivot = at(&lu, col, col);
            det *= pivot;
            for r in col + 1..n {
                let factor = at(&lu, r, col) / pivot;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let sub = factor * at(&lu, col, j);
                    lu[r * n + j] -= sub;
                }
            }
        }
        det
    }

    /// Haar-like random unitary: complex Gaussian matrix, Gram–Schmidt on
    /// columns, column phases fixed by the generator draw order.
    pub fn random_unitary(dim: usize, rng: &mut SplitMix64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionZero);
        }
        let mut cols: Vec<Vec<C64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.next_complex_gaussian()).collect())
            .collect();
        gram_schmidt(&mut cols);
        Self::from_fn(dim, |i, k| cols[k][i])
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass. Panics if the
/// input vectors are numerically dependent; callers only pass generic
/// Gaussian draws or near-orthonormal sets.
pub(crate) fn gram_schmidt(cols: &mut [Vec<C64>]) {
    let k = cols.len();
    for j in 0..k {
        for _pass in 0..2 {
            for prev in 0..j {
                let overlap = inner(&cols[prev], &cols[j]);
                let prev_col = cols[prev].clone();
                for (x, p) in cols[j].iter_mut().zip(&prev_col) {
                    *x -= overlap * p;
                }
            }
        }
        let norm = vec_norm(&cols[j]);
        assert!(norm > 1e-12, "gram_schmidt: dependent column set");
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
}

/// ⟨a|b⟩, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// M |v⟩.
pub fn matvec(m: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    let n = m.dim();
    assert_eq!(v.len(), n, "dimension mismatch in matvec");
    (0..n)
        .map(|i| (0..n).map(|k| m[(i, k)] * v[k]).sum())
        .collect()
}

/// |a⟩⟨b| for equal-length vectors.
pub fn outer(a: &[C64], b: &[C64]) -> ComplexMatrix {
    assert_eq!(a.len(), b.len(), "dimension mismatch in outer");
    ComplexMatrix::from_fn(a.len(), |i, k| a[i] * b[k].conj()).expect("nonempty vectors")
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, k): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + k]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, k): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + k]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_identities() {
        let i2 = ComplexMatrix::identity(2).unwrap();
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert_eq!(i2.tensor(&i2), i4);

        let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let p1 = ComplexMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let expected = ComplexMatrix::diagonal(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p0.tensor(&p1), expected);
    }

    #[test]
    fn tensor_applies_bit_flip_on_first_party() {
        // (X ⊗ I)|00⟩ = |10⟩ under the A-major index order.
        let x = ComplexMatrix::from_entries(
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let i2 = ComplexMatrix::identity(2).unwrap();
        let op = x.tensor(&i2);
        let ket00 = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = matvec(&op, &ket00);
        assert_eq!(out[2], c(1.0, 0.0));
        assert_eq!(vec_norm(&out), 1.0);
    }

    #[test]
    fn partial_trace_of_product_factors() {
        let mut rng = SplitMix64::new(5);
        let sigma = ComplexMatrix::from_fn(2, |_, _| rng.next_complex_gaussian()).unwrap();
        let sigma = &sigma + &sigma.adjoint(); // make it Hermitian
        let tau = ComplexMatrix::from_fn(3, |_, _| rng.next_complex_gaussian()).unwrap();
        let tau = &tau + &tau.adjoint();

        let prod = sigma.tensor(&tau);
        let back = prod.partial_trace(2, 3, Side::B).unwrap();
        let expected = sigma.scale(tau.trace());
        assert!(back.max_abs_diff(&expected) < 1e-12);

        // Trace preservation.
        let tr_full = prod.trace();
        let tr_a = prod.partial_trace(2, 3, Side::A).unwrap().trace();
        assert!((tr_full - tr_a).norm() < tol::TRACE_PRESERVATION * tr_full.norm().max(1.0));
    }

    #[test]
    fn partial_transpose_on_product_transposes_second_factor() {
        let mut rng = SplitMix64::new(17);
        let sigma = ComplexMatrix::from_fn(3, |_, _| rng.next_complex_gaussian()).unwrap();
        let tau = ComplexMatrix::from_fn(2, |_, _| rng.next_complex_gaussian()).unwrap();
        let pt = sigma.tensor(&tau).partial_transpose(3, 2).unwrap();
        let tau_t = ComplexMatrix::from_fn(2, |i, k| tau[(k, i)]).unwrap();
        assert_eq!(pt, sigma.tensor(&tau_t));
    }

    #[test]
    fn partial_transpose_is_involutive_bit_exact() {
        let mut rng = SplitMix64::new(23);
        for &(da, db) in &[(2, 2), (2, 3), (3, 3), (4, 3), (4, 4)] {
            let m = ComplexMatrix::from_fn(da * db, |_, _| rng.next_complex_gaussian()).unwrap();
            let twice = m
                .partial_transpose(da, db)
                .unwrap()
                .partial_transpose(da, db)
                .unwrap();
            assert_eq!(m, twice, "{da}x{db}");
        }
    }

    #[test]
    fn tensor_is_associative_bit_exact_on_dyadic_entries() {
        // Entries k/16 keep all products exact in f64, so associativity is
        // purely a statement about the index convention.
        let mut rng = SplitMix64::new(31);
        let mut dyadic = |dim: usize| {
            ComplexMatrix::from_fn(dim, |_, _| {
                let re = (rng.next_below(33) as f64 - 16.0) / 16.0;
                let im = (rng.next_below(33) as f64 - 16.0) / 16.0;
                c(re, im)
            })
            .unwrap()
        };
        let a = dyadic(2);
        let b = dyadic(3);
        let cm = dyadic(2);
        assert_eq!(a.tensor(&b).tensor(&cm), a.tensor(&b.tensor(&cm)));
    }

    #[test]
    fn determinant_matches_known_cases() {
        let m = ComplexMatrix::from_entries(
            2,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        assert!((m.determinant() - c(-2.0, 0.0)).norm() < 1e-14);

        let u = ComplexMatrix::random_unitary(4, &mut SplitMix64::new(3)).unwrap();
        assert!((u.determinant().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = SplitMix64::new(11);
        for dim in [2, 3, 5] {
            let u = ComplexMatrix::random_unitary(dim, &mut rng).unwrap();
            let gram = u.adjoint().matmul(&u);
            let id = ComplexMatrix::identity(dim).unwrap();
            assert!(gram.max_abs_diff(&id) < 1e-12);
        }
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(ComplexMatrix::zeros(0), Err(Error::DimensionZero)));
        let m = ComplexMatrix::identity(4).unwrap();
        assert!(m.partial_trace(3, 2, Side::B).is_err());
        assert!(m.partial_transpose(3, 3).is_err());
    }
}
