//! Dense complex matrices and Hermitian spectral calculus.
//!
//! Dimensions here are tiny (a qubit, occasionally up to ~16 levels), so every
//! routine works on a flat row-major `Vec<Complex64>` and favours clarity over
//! blocking or SIMD.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Eigenvalues below this are treated as exact zeros by entropy kernels
/// (`0 ln 0 = 0`) and by support checks.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Elementwise Hermiticity tolerance, relative to `max(1, max|A_ij|)`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_RELATIVE_OFF_DIAGONAL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be at least 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_dim(rhs);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_dim(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_dim(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.dim {
            list.entry(&&self.data[i * self.dim..(i + 1) * self.dim]);
        }
        list.finish()
    }
}

/// A finite-dimensional Hermitian operator (Hamiltonian, density matrix, effect...).
///
/// Construction validates Hermiticity and then stores the exactly Hermitian
/// part `(A + A†)/2`, so downstream code never sees residual asymmetry.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() == 0 {
            return Err(Error::InvalidParameter("operator dimension must be at least 1".into()));
        }
        let deviation = matrix.hermiticity_deviation();
        if !deviation.is_finite() || deviation > HERMITIAN_TOLERANCE * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(matrix))
    }

    fn symmetrized(matrix: ComplexMatrix) -> Self {
        let n = matrix.dim();
        let mut out = matrix;
        for i in 0..n {
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        Self(out)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidParameter("operator dimension must be at least 1".into()));
        }
        Ok(Self(ComplexMatrix::from_diagonal(diag)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn pauli_x() -> Self {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = ONE;
        m[(1, 0)] = ONE;
        Self(m)
    }

    pub fn pauli_y() -> Self {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(0.0, -1.0);
        m[(1, 0)] = Complex64::new(0.0, 1.0);
        Self(m)
    }

    /// `σ_z = diag(1, -1)`: index 0 is the excited level.
    pub fn pauli_z() -> Self {
        Self(ComplexMatrix::from_diagonal(&[1.0, -1.0]))
    }

    /// Qubit Hamiltonian `(ω/2) σ_z`.
    pub fn qubit_hamiltonian(omega: f64) -> Self {
        Self(ComplexMatrix::from_diagonal(&[0.5 * omega, -0.5 * omega]))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Largest off-diagonal magnitude.
    pub fn off_diagonal_max(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.0[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `U A U†` for a unitary (or any) `U` of matching dimension.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::symmetrized(&(u * &self.0) * &u.adjoint())
    }

    /// `B A B` for Hermitian `B`; Hermitian whenever `A` and `B` are.
    pub fn sandwich(&self, outer: &HermitianOperator) -> Self {
        Self::symmetrized(&(&outer.0 * &self.0) * &outer.0)
    }

    /// `max |[A, B]_ij|`.
    pub fn commutator_residual(&self, other: &Self) -> f64 {
        let ab = &self.0 * &other.0;
        let ba = &other.0 * &self.0;
        ab.max_abs_diff(&ba)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("HermitianOperator").field(&self.0).finish()
    }
}

/// Eigen-decomposition `A = V diag(λ) V†` with eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors stored as columns.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// `Σ_k w_k v_k v_k†`.
    pub fn compose(&self, weights: &[f64]) -> HermitianOperator {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        HermitianOperator::symmetrized(out)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.compose(&self.eigenvalues)
    }

    /// Diagonal entries `⟨v_k|A|v_k⟩` of another operator in this eigenbasis.
    pub fn diagonal_of(&self, a: &HermitianOperator) -> Vec<f64> {
        let n = self.dim();
        let v = &self.eigenvectors;
        (0..n)
            .map(|k| {
                let mut acc = ZERO;
                for i in 0..n {
                    let mut row = ZERO;
                    for j in 0..n {
                        row += a.get(i, j) * v[(j, k)];
                    }
                    acc += v[(i, k)].conj() * row;
                }
                acc.re
            })
            .collect()
    }

    /// `V† A V`.
    pub fn rotate_into(&self, a: &HermitianOperator) -> ComplexMatrix {
        &(&self.eigenvectors.adjoint() * a.matrix()) * &self.eigenvectors
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of `a_pq` and then applies the real
/// symmetric Jacobi rotation. Sweeps stop once the off-diagonal Frobenius mass
/// drops below `1e-14 · ‖A‖_F`. Output is ascending and deterministic; each
/// eigenvector is phased so that its largest component is real and positive.
pub fn eig_hermitian(a: &HermitianOperator) -> Spectrum {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_RELATIVE_OFF_DIAGONAL * m.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_mass(&m) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let pivot = (0..n)
            .max_by(|&i, &j| v[(i, k)].norm().total_cmp(&v[(j, k)].norm()).then(j.cmp(&i)))
            .unwrap_or(0);
        let z = v[(pivot, k)];
        let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { ONE };
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)] * phase;
        }
    }

    Spectrum {
        eigenvalues,
        eigenvectors: vectors,
    }
}

fn off_diagonal_mass(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let theta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let g00 = Complex64::new(c, 0.0);
    let g01 = Complex64::new(s, 0.0);
    let g10 = -phase.conj() * s;
    let g11 = phase.conj() * c;

    let n = m.dim();
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * g00 + akq * g10;
        m[(k, q)] = akp * g01 + akq * g11;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
        m[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g00 + vkq * g10;
        v[(k, q)] = vkp * g01 + vkq * g11;
    }
}

/// Finds one orthonormal basis that diagonalizes every operator in `ops`.
///
/// Diagonalizes a fixed incommensurate combination of the (normalized)
/// operators and then checks that each operator is diagonal in the result to
/// within `tolerance · max(1, ‖op‖_max)`; otherwise the operators are reported
/// as non-commuting.
pub fn common_eigenbasis(ops: &[&HermitianOperator], tolerance: f64) -> Result<Spectrum> {
    const WEIGHTS: [f64; 6] = [
        1.0,
        0.618_033_988_749_894_8,
        0.414_213_562_373_095_1,
        0.141_592_653_589_793_2,
        0.718_281_828_459_045,
        0.732_050_807_568_877_2,
    ];
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidParameter("no operators given".into()))?;
    let n = first.dim();
    let mut combo = ComplexMatrix::zeros(n);
    for (k, op) in ops.iter().enumerate() {
        if op.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: op.dim(),
            });
        }
        let norm = op.matrix().frobenius_norm();
        if norm > 0.0 {
            let w = WEIGHTS[k % WEIGHTS.len()] * (1.0 + k as f64 / WEIGHTS.len() as f64);
            combo = &combo + &op.matrix().scale(w / norm);
        }
    }
    let spectrum = eig_hermitian(&HermitianOperator::symmetrized(combo));
    for op in ops {
        let rotated = spectrum.rotate_into(op);
        let mut residual = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    residual = residual.max(rotated[(i, j)].norm());
                }
            }
        }
        if residual > tolerance * op.matrix().max_abs().max(1.0) {
            return Err(Error::NonCommuting { residual });
        }
    }
    Ok(spectrum)
}

/// `V diag(f(λ)) V†`.
///
/// With `support_cutoff = Some(c)`, eigenvalues below `c` are excluded from
/// the support and mapped to 0 without evaluating `f` (the `0 ln 0` rule).
/// Any non-finite `f(λ)` on an included eigenvalue is a domain error.
pub fn matrix_function<F>(
    a: &HermitianOperator,
    f: F,
    support_cutoff: Option<f64>,
) -> Result<HermitianOperator>
where
    F: Fn(f64) -> f64,
{
    let spectrum = eig_hermitian(a);
    let mut weights = Vec::with_capacity(spectrum.dim());
    for &lambda in &spectrum.eigenvalues {
        if support_cutoff.is_some_and(|c| lambda < c) {
            weights.push(0.0);
            continue;
        }
        let value = f(lambda);
        if !value.is_finite() {
            return Err(Error::Domain { eigenvalue: lambda });
        }
        weights.push(value);
    }
    Ok(spectrum.compose(&weights))
}

/// Real part of `tr{AB}`; the imaginary part must vanish to 1e-10.
pub fn trace_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    let scale = (a.matrix().frobenius_norm() * b.matrix().frobenius_norm()).max(1.0);
    if acc.im.abs() > 1e-10 * scale {
        return Err(Error::NotHermitian {
            deviation: acc.im.abs(),
        });
    }
    Ok(acc.re)
}
