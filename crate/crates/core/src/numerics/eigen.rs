//! Cyclic complex Jacobi eigendecomposition for small Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot element `a_pq` and then
//! applies the classical real Jacobi rotation that annihilates it. Sweeps run
//! until the off-diagonal Frobenius norm drops below `1e-12 * ||m||_F`.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::NumericsError;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

/// Relative Hermiticity tolerance accepted on input.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `V diag(values) V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diagonal(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

/// Diagonalizes a Hermitian matrix of dimension 2..=8.
///
/// The returned eigenvalues are sorted ascending. Every eigenvector is
/// rephased so that its largest-magnitude component (first one on ties) is
/// real and non-negative. Within a degenerate subspace only the span is
/// meaningful.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<HermitianEigen, NumericsError> {
    let n = m.dim();
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(NumericsError::DimensionOutOfRange { dim: n, min: MIN_DIM, max: MAX_DIM });
    }
    let norm = m.frobenius_norm();
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOLERANCE * norm.max(f64::MIN_POSITIVE) {
        return Err(NumericsError::NotHermitian { deviation, norm });
    }

    // work on the exactly Hermitian part
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let threshold = OFF_DIAGONAL_TOLERANCE * norm;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(NumericsError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));

    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let mut vec = v.column(k);
        fix_phase(&mut vec);
        for (row, z) in vec.into_iter().enumerate() {
            vectors[(row, col)] = z;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation in the (p, q) plane; updates `a <- U† a U`, `v <- v U`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude == 0.0 {
        return;
    }
    let phase = apq / magnitude;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * magnitude);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U[:,p] = c e_p - s conj(phase) e_q ; U[:,q] = s e_p + c conj(phase) e_q
    let n = a.dim();
    let pc = phase.conj();
    for i in 0..n {
        let (xp, xq) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = xp * c - xq * pc * s;
        a[(i, q)] = xp * s + xq * pc * c;
    }
    for j in 0..n {
        let (xp, xq) = (a[(p, j)], a[(q, j)]);
        a[(p, j)] = xp * c - xq * phase * s;
        a[(q, j)] = xp * s + xq * phase * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for i in 0..n {
        let (xp, xq) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = xp * c - xq * pc * s;
        v[(i, q)] = xp * s + xq * pc * c;
    }
}

fn fix_phase(vec: &mut [Complex64]) {
    let max = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = vec.iter().position(|z| z.norm() >= max * (1.0 - 1e-12)).unwrap_or(0);
    let rot = vec[pivot].conj() / vec[pivot].norm();
    for z in vec.iter_mut() {
        *z *= rot;
    }
    vec[pivot] = Complex64::new(vec[pivot].re, 0.0);
}
