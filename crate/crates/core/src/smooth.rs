//! Regularity calculus at a stationarity-system solution.
//!
//! At a solution `z₀ = ξ₀ + iη₀`, `∇Q(z₀) = β₀θ₀`, the solution set is a
//! smooth branch `z = h(θ)` near `θ₀` provided `β₀ ≠ 0`, `Q''(z₀)` is
//! invertible and the scalar `∇Q(z₀)·Q''(z₀)⁻¹∇Q(z₀)` is nonzero. The
//! branch derivative on the tangent space `{v : v·θ = 0}` is
//!
//! ```text
//!     h'(θ) = β Q''(z)⁻¹ (I − R(θ)),
//!     R(θ)x = (θ·Q''(z)⁻¹x) / (θ·Q''(z)⁻¹θ) · θ,
//! ```
//!
//! with the tangency identity `θ·h'(θ)v = 0` (differentiate `Q(h(θ)) = λ`).
//! σ(ω) is in turn locally smooth in the boundary direction ω when the only
//! real solution `(x, μ)` of `g'(θ₀)x = μη₀`, `g = Im h`, is trivial — a
//! real-linear statement tested by realifying onto the tangent basis.
//!
//! All complex dots here are bilinear (no conjugation), matching the `z·z`
//! convention of the stationarity systems.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::linalg;
use crate::poly::MultiPoly;
use crate::solve::StationarySolution;

type C = Complex<f64>;

/// Condition-number ceiling for "invertible" verdicts.
pub const HESSIAN_COND_LIMIT: f64 = 1e8;
/// Default baseline tolerance for the scalar nondegeneracy and β ≠ 0 tests.
pub const DEFAULT_REGULARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum SmoothError {
    SingularHessian { condition: f64 },
    /// `θ·Q''(z)⁻¹θ = 0`: the h′ formula itself is singular, a different
    /// failure from a singular Hessian.
    FormulaSingular,
    WrongDimension { expected: usize, got: usize },
}

impl fmt::Display for SmoothError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothError::SingularHessian { condition } => {
                write!(f, "Q'' is numerically singular (condition {condition:e})")
            }
            SmoothError::FormulaSingular => write!(f, "θ·Q''(z)⁻¹θ vanishes; h' formula singular"),
            SmoothError::WrongDimension { expected, got } => {
                write!(f, "expected dimension {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for SmoothError {}

/// The branch derivative `h'(θ)` as an action on tangent vectors `v ⊥ θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentMap {
    pub theta: Vec<f64>,
    matrix: DMatrix<C>,
}

impl TangentMap {
    /// Applies the map to a tangent vector (its θ-component is projected
    /// away first).
    pub fn apply(&self, v: &[f64]) -> Vec<C> {
        let d = self.theta.len();
        let vt = linalg::dot(v, &self.theta);
        let proj: Vec<f64> = (0..d).map(|i| v[i] - vt * self.theta[i]).collect();
        let x = DVector::from_iterator(d, proj.iter().map(|&r| C::new(r, 0.0)));
        let y = &self.matrix * x;
        y.iter().copied().collect()
    }

    /// The complex d×d matrix realizing the action on the tangent space.
    pub fn matrix(&self) -> &DMatrix<C> {
        &self.matrix
    }
}

/// Smoothness certificates at one solution point.
///
/// Booleans are verdicts at the recorded tolerances; `h_prime` and the
/// kernel fields are present only when the prerequisites (invertible
/// Hessian, nonsingular formula denominator) hold.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub hessian_invertible: bool,
    pub hessian_condition: f64,
    /// `∇Q(z₀)·Q''(z₀)⁻¹∇Q(z₀)` (bilinear).
    pub nondegeneracy: C,
    pub nondegenerate: bool,
    pub beta_nonzero: bool,
    pub h_prime: Option<TangentMap>,
    pub kernel_condition_ok: Option<bool>,
    pub kernel_min_singular: Option<f64>,
    pub tol: f64,
}

fn complex_z(sol: &StationarySolution) -> Vec<C> {
    sol.xi
        .iter()
        .zip(&sol.eta)
        .map(|(&r, &i)| C::new(r, i))
        .collect()
}

/// Deterministic orthonormal basis of the tangent space `{v : v·θ = 0}`.
pub fn tangent_basis(theta: &[f64]) -> Vec<Vec<f64>> {
    let d = theta.len();
    let mut skip = 0usize;
    for (i, &t) in theta.iter().enumerate() {
        if libm::fabs(t) > libm::fabs(theta[skip]) {
            skip = i;
        }
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for j in 0..d {
        if j == skip {
            continue;
        }
        let mut v = vec![0.0; d];
        v[j] = 1.0;
        let vt = linalg::dot(&v, theta);
        for i in 0..d {
            v[i] -= vt * theta[i];
        }
        for b in &basis {
            let c = linalg::dot(&v, b);
            for i in 0..d {
                v[i] -= c * b[i];
            }
        }
        if let Some(u) = linalg::normalize(&v) {
            basis.push(u);
        }
    }
    basis
}

fn hessian_at(q: &MultiPoly, z: &[C]) -> DMatrix<C> {
    let d = q.dim();
    let hess = q.hessian();
    DMatrix::from_fn(d, d, |i, j| hess[i][j].eval_complex(z))
}

fn gradient_at(q: &MultiPoly, z: &[C]) -> Vec<C> {
    q.gradient().iter().map(|g| g.eval_complex(z)).collect()
}

/// Builds `h'(θ) = βQ''⁻¹(I − R(θ))` at the solution.
pub fn h_prime(q: &MultiPoly, sol: &StationarySolution) -> Result<TangentMap, SmoothError> {
    if q.dim() != sol.xi.len() {
        return Err(SmoothError::WrongDimension {
            expected: q.dim(),
            got: sol.xi.len(),
        });
    }
    let z = complex_z(sol);
    let hess = hessian_at(q, &z);
    let (smin, smax) = linalg::singular_extremes(&linalg::realify(&hess));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < HESSIAN_COND_LIMIT) {
        return Err(SmoothError::SingularHessian { condition });
    }
    let a = linalg::complex_inverse(&hess).ok_or(SmoothError::SingularHessian { condition })?;
    let d = q.dim();
    let theta_c = DVector::from_iterator(d, sol.theta.iter().map(|&t| C::new(t, 0.0)));
    let a_theta = &a * &theta_c;
    // Bilinear θ·Aθ; A is symmetric so θᵀA = (Aθ)ᵀ.
    let r_den: C = sol
        .theta
        .iter()
        .zip(a_theta.iter())
        .map(|(&t, &w)| w * t)
        .sum();
    let scale = a_theta.iter().map(|w| w.norm()).fold(0.0f64, f64::max);
    if r_den.norm() <= 1e-12 * scale.max(1e-300) {
        return Err(SmoothError::FormulaSingular);
    }
    let beta = sol.beta;
    let mut matrix = a.clone();
    for i in 0..d {
        for j in 0..d {
            matrix[(i, j)] = beta * (a[(i, j)] - a_theta[i] * a_theta[j] / r_den);
        }
    }
    Ok(TangentMap {
        theta: sol.theta.clone(),
        matrix,
    })
}

/// Kernel test for local smoothness of σ(ω): the realified map
/// `(x, μ) ↦ g'(θ₀)x − μη₀` on `tangent ⊕ ℝ` must have trivial kernel.
/// Returns the verdict together with the smallest singular value.
pub fn kernel_condition_from_map(map: &TangentMap, eta: &[f64], tol: f64) -> (bool, f64) {
    let d = eta.len();
    let basis = tangent_basis(&map.theta);
    let mut k = DMatrix::zeros(d, basis.len() + 1);
    for (col, u) in basis.iter().enumerate() {
        let gu = map.apply(u);
        for row in 0..d {
            k[(row, col)] = gu[row].im;
        }
    }
    for row in 0..d {
        k[(row, basis.len())] = -eta[row];
    }
    let (smin, smax) = linalg::singular_extremes(&k);
    (smin > tol * smax.max(1.0), smin)
}

/// True when the only real solution of `g'(θ₀)x = μη₀` is trivial.
pub fn kernel_condition(q: &MultiPoly, sol: &StationarySolution) -> Result<bool, SmoothError> {
    let map = h_prime(q, sol)?;
    Ok(kernel_condition_from_map(&map, &sol.eta, DEFAULT_REGULARITY_TOL).0)
}

/// Assembles the full certificate: `Q''` conditioning, the nondegeneracy
/// scalar `∇Q·Q''⁻¹∇Q`, β ≠ 0, the branch derivative and the kernel test.
/// A singular Hessian is a verdict in the report, not an error.
pub fn regularity_check(q: &MultiPoly, sol: &StationarySolution, tol: f64) -> RegularityReport {
    let z = complex_z(sol);
    let hess = hessian_at(q, &z);
    let grad = gradient_at(q, &z);
    let grad_norm = linalg::cnorm(&grad);
    let (smin, smax) = linalg::singular_extremes(&linalg::realify(&hess));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let invertible = condition < HESSIAN_COND_LIMIT;
    let mut nondegeneracy = C::new(0.0, 0.0);
    let mut nondegenerate = false;
    if invertible {
        let rhs = DVector::from_iterator(q.dim(), grad.iter().copied());
        if let Some(w) = linalg::complex_solve(&hess, &rhs) {
            nondegeneracy = grad.iter().zip(w.iter()).map(|(g, w)| g * w).sum();
            // Scale-free: |s| against ‖∇Q‖²·‖Q''⁻¹‖.
            let scale = grad_norm * grad_norm / smin.max(1e-300);
            nondegenerate = nondegeneracy.norm() > tol * scale.max(1e-300);
        }
    }
    let beta_nonzero = sol.beta.norm() > tol * grad_norm.max(1.0);
    let h = h_prime(q, sol).ok();
    let (kernel_ok, kernel_smin) = match &h {
        Some(map) => {
            let (ok, smin) = kernel_condition_from_map(map, &sol.eta, tol);
            (Some(ok), Some(smin))
        }
        None => (None, None),
    };
    RegularityReport {
        hessian_invertible: invertible,
        hessian_condition: condition,
        nondegeneracy,
        nondegenerate,
        beta_nonzero,
        h_prime: h,
        kernel_condition_ok: kernel_ok,
        kernel_min_singular: kernel_smin,
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;
    use crate::solve::{solve_for_direction, SolveOptions};
    use crate::wedge::{closed_form_point, BranchCase, WedgeModel};
    use approx::assert_abs_diff_eq;

    fn manual_solution(
        q: &MultiPoly,
        lambda: f64,
        xi: Vec<f64>,
        eta: Vec<f64>,
        theta: Vec<f64>,
    ) -> StationarySolution {
        // β = θ·∇Q(z) for an exact solution.
        let z: Vec<C> = xi
            .iter()
            .zip(&eta)
            .map(|(&r, &i)| C::new(r, i))
            .collect();
        let grad = gradient_at(q, &z);
        let beta: C = theta
            .iter()
            .zip(&grad)
            .map(|(&t, g)| g * t)
            .sum();
        let val = q.eval_complex(&z);
        let mut res = (val - C::new(lambda, 0.0)).norm();
        let mut g2 = 0.0;
        for j in 0..q.dim() {
            g2 += (grad[j] - beta * theta[j]).norm_sqr();
        }
        res = res.max(libm::sqrt(g2));
        let sigma = linalg::norm(&eta);
        let omega: Vec<f64> = eta.iter().map(|v| v / sigma).collect();
        StationarySolution {
            xi,
            eta,
            beta,
            theta,
            sigma,
            omega,
            residual: res,
        }
    }

    #[test]
    fn laplacian_h_prime_is_multiplication_by_i() {
        let q = MultiPoly::laplacian_power(3, 1);
        let theta = vec![0.0, 0.0, 1.0];
        let sol = manual_solution(&q, -1.0, vec![0.0; 3], theta.clone(), theta.clone());
        assert!(sol.residual < 1e-14);
        let map = h_prime(&q, &sol).unwrap();
        for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.3, -0.7, 0.0]] {
            let hv = map.apply(&v);
            for (j, &vj) in v.iter().enumerate() {
                assert_abs_diff_eq!(hv[j].re, 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(hv[j].im, vj, epsilon = 1e-12);
            }
        }
        let report = regularity_check(&q, &sol, DEFAULT_REGULARITY_TOL);
        assert!(report.hessian_invertible);
        // ∇Q·Q''⁻¹∇Q = 2 z·z = −2.
        assert_abs_diff_eq!(report.nondegeneracy.re, -2.0, epsilon = 1e-12);
        assert!(report.nondegenerate && report.beta_nonzero);
        assert_eq!(report.kernel_condition_ok, Some(true));
        // g' = I on the tangent space and η₀ ⊥ image: smallest singular
        // value of the kernel map is 1.
        assert_abs_diff_eq!(report.kernel_min_singular.unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn tangency_identity_on_random_solutions() {
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let opts = SolveOptions {
            n_starts: 60,
            seed: 19,
            ..SolveOptions::per_direction()
        };
        let mut checked = 0;
        for k in 0..8 {
            let phi = 0.37 + k as f64 * 0.71;
            let theta = [libm::cos(phi), libm::sin(phi)];
            for sol in solve_for_direction(&q, -1.0, &theta, &opts).unwrap() {
                let Ok(map) = h_prime(&q, &sol) else { continue };
                let basis = tangent_basis(&sol.theta);
                for v in &basis {
                    let hv = map.apply(v);
                    let t_dot: C = sol
                        .theta
                        .iter()
                        .zip(&hv)
                        .map(|(&t, h)| h * t)
                        .sum();
                    let scale = hv.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
                    assert!(
                        t_dot.norm() <= 1e-10 * scale,
                        "tangency violated: {:e}",
                        t_dot.norm()
                    );
                }
                checked += 1;
            }
        }
        assert!(checked >= 8, "too few solutions exercised: {checked}");
    }

    #[test]
    fn wedge_case1_closed_form_derivative() {
        // For the smooth branch h(θ) = θ/(2λ₀) + i(λ₀θ + (ε/2)e_d) the
        // derivative is (1/(2λ₀) + iλ₀)v on the tangent space.
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let theta = vec![0.0, 1.0];
        let (xi, eta) = closed_form_point(&model, BranchCase::Case1, &theta).unwrap();
        let sol = manual_solution(&q, -1.0, xi, eta, theta);
        assert!(sol.residual < 1e-12);
        let map = h_prime(&q, &sol).unwrap();
        let v = [1.0, 0.0];
        let hv = map.apply(&v);
        assert_abs_diff_eq!(hv[0].re, 1.0 / (2.0 * model.lambda0), epsilon = 1e-10);
        assert_abs_diff_eq!(hv[0].im, model.lambda0, epsilon = 1e-10);
        assert_abs_diff_eq!(hv[1].norm(), 0.0, epsilon = 1e-10);

        let report = regularity_check(&q, &sol, DEFAULT_REGULARITY_TOL);
        assert!(report.hessian_invertible && report.nondegenerate);
        assert_eq!(report.kernel_condition_ok, Some(true));
    }

    #[test]
    fn h_prime_matches_finite_differences_of_the_branch() {
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let phi = 1.1;
        let theta = vec![libm::cos(phi), libm::sin(phi)];
        let (xi, eta) = closed_form_point(&model, BranchCase::Case2, &theta).unwrap();
        let sol = manual_solution(&q, -1.0, xi, eta, theta.clone());
        let map = h_prime(&q, &sol).unwrap();
        let basis = tangent_basis(&theta);
        let delta = 1e-4;
        for v in &basis {
            let hv = map.apply(v);
            let solve_at = |t: f64| {
                let dir: Vec<f64> = (0..2).map(|i| theta[i] + t * v[i]).collect();
                let dir = linalg::normalize(&dir).unwrap();
                crate::solve::refine_at_theta(&q, -1.0, &dir, &sol, 1e-9)
                    .expect("continuation step converges")
            };
            let plus = solve_at(delta);
            let minus = solve_at(-delta);
            for j in 0..2 {
                let fd_re = (plus.xi[j] - minus.xi[j]) / (2.0 * delta);
                let fd_im = (plus.eta[j] - minus.eta[j]) / (2.0 * delta);
                assert_abs_diff_eq!(hv[j].re, fd_re, epsilon = 1e-4);
                assert_abs_diff_eq!(hv[j].im, fd_im, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn singular_hessian_is_reported_not_thrown() {
        // Q = ξ₁⁴ + ξ₂⁴ at z = (0, e^{iπ/4}): ∂²Q = diag(0, ·) is singular.
        let q = MultiPoly::new(2, [(vec![4, 0], 1.0), (vec![0, 4], 1.0)]).unwrap();
        let r = libm::sqrt(0.5);
        let sol = manual_solution(&q, -1.0, vec![0.0, r], vec![0.0, r], vec![0.0, 1.0]);
        assert!(sol.residual < 1e-12);
        let report = regularity_check(&q, &sol, DEFAULT_REGULARITY_TOL);
        assert!(!report.hessian_invertible);
        assert!(report.h_prime.is_none());
        assert!(matches!(
            h_prime(&q, &sol),
            Err(SmoothError::SingularHessian { .. })
        ));
    }

    #[test]
    fn rank_deficient_kernel_map_fails() {
        // g'(u) ∥ η₀ for the single tangent direction: kernel is nontrivial.
        let theta = vec![1.0, 0.0];
        let eta = vec![0.0, 1.0];
        let mut matrix = DMatrix::zeros(2, 2);
        // Tangent basis is e₂; send it to i·η₀ so Im(g'u) = η₀.
        matrix[(1, 1)] = C::new(0.0, 1.0);
        let map = TangentMap { theta, matrix };
        let (ok, smin) = kernel_condition_from_map(&map, &eta, DEFAULT_REGULARITY_TOL);
        assert!(!ok);
        assert!(smin < 1e-12);
    }
}
