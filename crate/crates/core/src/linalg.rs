//! Small dense linear-algebra helpers shared by the solvers.

use alloc::vec::Vec;
use nalgebra::{Complex, DMatrix, DVector};

type C = Complex<f64>;

/// SVD iteration cap. The unbounded variant can stall on degenerate input;
/// well-scaled desk-size matrices converge in a handful of sweeps.
const SVD_MAX_ITER: usize = 1000;

/// Minimum-norm least-squares solve of `A x = b` via SVD.
///
/// Singular values below `1e-13 * s_max` are truncated, which keeps Newton
/// steps finite on rank-deficient Jacobians (solution manifolds such as the
/// rotational continuum of the global system).
pub fn lstsq_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)?;
    let smax = svd.singular_values.max();
    let eps = if smax > 0.0 { 1e-13 * smax } else { 1e-300 };
    svd.solve(b, eps).ok()
}

/// Solves the complex system `M x = b` by LU with partial pivoting.
pub fn complex_solve(m: &DMatrix<C>, b: &DVector<C>) -> Option<DVector<C>> {
    m.clone().lu().solve(b)
}

/// Inverse of a complex matrix, if well conditioned enough for LU.
pub fn complex_inverse(m: &DMatrix<C>) -> Option<DMatrix<C>> {
    m.clone().try_inverse()
}

/// Realification `[[Re, -Im], [Im, Re]]` of a complex matrix.
///
/// Its singular values are those of the complex matrix, each doubled in
/// multiplicity, so condition numbers agree.
pub fn realify(m: &DMatrix<C>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let v = m[(i, j)];
            out[(i, j)] = v.re;
            out[(i, j + c)] = -v.im;
            out[(i + r, j)] = v.im;
            out[(i + r, j + c)] = v.re;
        }
    }
    out
}

/// (smallest, largest) singular value of a real matrix. Non-convergence of
/// the SVD reports `(0, ∞)`, which downstream verdicts read as singular.
pub fn singular_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let Some(svd) = m.clone().try_svd(false, false, f64::EPSILON, SVD_MAX_ITER) else {
        return (0.0, f64::INFINITY);
    };
    let sv = &svd.singular_values;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..sv.len() {
        lo = lo.min(sv[i]);
        hi = hi.max(sv[i]);
    }
    (lo, hi)
}

/// Bilinear dot of a real vector against a complex vector.
pub fn rcdot(a: &[f64], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| y * *x).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

pub fn cnorm(v: &[C]) -> f64 {
    libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum())
}

pub fn scale(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

pub fn normalize(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    if n < 1e-14 {
        None
    } else {
        Some(scale(v, 1.0 / n))
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
