//! Multistart damped-Newton solvers for the stationarity systems.
//!
//! Four square real systems share one Newton engine:
//!
//! * per-direction: `Q(ξ+iη) = λ`, `∇Q(ξ+iη) = βθ` with `θ` fixed —
//!   2d+2 equations in (ξ, η, Re β, Im β);
//! * global: the same with `θ = ω = η/|η|` unknown and `|ω|² = 1` appended —
//!   2d+3 equations in (ξ, σ, ω, β);
//! * ray-constrained: `ω` pinned to a given direction and `θ` freed —
//!   2d+3 equations in (ξ, σ, θ, β), used to polish assembled profiles;
//! * critical points: `∇Q(z) = 0` — 2d equations in (ξ, η).
//!
//! Newton steps are minimum-norm least-squares solves, so rank-deficient
//! Jacobians (the rotational solution continuum of `|ξ|²`-like symbols, or
//! the double roots at critical points) degrade gracefully. Completeness of
//! the multistart search is heuristic; certified-complete homotopy tracking
//! is out of scope.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::grid::DirectionGrid;
use crate::linalg;
use crate::poly::{check_ellipticity, ComplexPoint, MultiPoly, RotInvModel};
use crate::rng::Draw;

type C = Complex<f64>;

const NEWTON_TOL: f64 = 1e-12;
const MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 40;
/// Solutions with |η| at or below this floor are purely real and carry no
/// decay information; they are dropped.
const SIGMA_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// The leading form vanishes somewhere on the sampled sphere.
    NotElliptic { min_leading_form: f64 },
    /// `G − λ` has a multiple root; the reduction needs simple roots.
    ExceptionalEigenvalue { detail: String },
    /// Zero or non-finite direction vector.
    BadDirection,
    WrongDimension { expected: usize, got: usize },
    /// More deduplicated critical values than the algebraic bound allows;
    /// indicates a numerical failure rather than a property of `Q`.
    CountBoundExceeded { found: usize, bound: usize },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::NotElliptic { min_leading_form } => write!(
                f,
                "polynomial is not elliptic (min sampled |leading form| = {min_leading_form:e})"
            ),
            SolveError::ExceptionalEigenvalue { detail } => {
                write!(f, "exceptional eigenvalue: {detail}")
            }
            SolveError::BadDirection => write!(f, "direction vector is zero or non-finite"),
            SolveError::WrongDimension { expected, got } => {
                write!(f, "expected dimension {expected}, got {got}")
            }
            SolveError::CountBoundExceeded { found, bound } => {
                write!(f, "found {found} critical values, algebraic bound is {bound}")
            }
        }
    }
}

impl core::error::Error for SolveError {}

/// One solution of a stationarity system.
///
/// Invariants (checked by [`StationarySolution`] construction at the stated
/// tolerances): `|Q(ξ+iη) − λ| ≤ residual`, `|∇Q(ξ+iη) − βθ| ≤ residual`,
/// `|θ| = 1`, first nonzero component of `θ` positive (the representative of
/// the `(β, θ) ~ (−β, −θ)` pair), `σ = |η| > 0` and `ω = η/σ`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StationarySolution {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub beta: C,
    pub theta: Vec<f64>,
    pub sigma: f64,
    pub omega: Vec<f64>,
    pub residual: f64,
}

impl StationarySolution {
    /// Max-norm distance in solution space (ξ, η, β), used for dedup.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for (a, b) in self.xi.iter().zip(&other.xi) {
            d = d.max(libm::fabs(a - b));
        }
        for (a, b) in self.eta.iter().zip(&other.eta) {
            d = d.max(libm::fabs(a - b));
        }
        d = d.max(libm::fabs(self.beta.re - other.beta.re));
        d = d.max(libm::fabs(self.beta.im - other.beta.im));
        d
    }

    pub fn point(&self) -> ComplexPoint {
        ComplexPoint {
            re: self.xi.clone(),
            im: self.eta.clone(),
        }
    }
}

/// Options shared by the multistart solvers, exposed as CLI flags.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub residual_tol: f64,
    pub dedup_tol: f64,
    pub box_scale: f64,
}

impl SolveOptions {
    /// Default budget for one direction (d = 2): 500 starts.
    pub fn per_direction() -> Self {
        Self {
            n_starts: 500,
            seed: 1,
            residual_tol: 1e-9,
            dedup_tol: 1e-6,
            box_scale: 1.0,
        }
    }

    /// Default budget for the global system: 2000 starts.
    pub fn global() -> Self {
        Self {
            n_starts: 2000,
            ..Self::per_direction()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, n: usize) -> Self {
        self.n_starts = n;
        self
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self::per_direction()
    }
}

/// Critical values of `Q : ℂ^d → ℂ`, bounded in number by `(q−1)^d`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalValueSet {
    pub values: Vec<C>,
    pub points: Vec<ComplexPoint>,
    pub count_bound: usize,
    /// Heuristic: a new value was still being discovered late in the start
    /// budget, so the multistart search may not have exhausted the set.
    pub possibly_incomplete: bool,
}

impl CriticalValueSet {
    /// Distance from `lambda` to the nearest critical value.
    pub fn distance_to(&self, lambda: f64) -> f64 {
        self.values
            .iter()
            .map(|v| (v - C::new(lambda, 0.0)).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Per-direction solution cloud produced by [`sweep_directions`].
#[derive(Debug, Clone)]
pub struct DirectionCloud {
    pub grid: DirectionGrid,
    pub solutions: Vec<Vec<StationarySolution>>,
}

/// Precompiled value/gradient/Hessian tables for one symbol.
pub(crate) struct Jet {
    pub dim: usize,
    pub degree: u32,
    pub max_coeff: f64,
    q: MultiPoly,
    grad: Vec<MultiPoly>,
    hess: Vec<Vec<MultiPoly>>,
}

impl Jet {
    pub fn new(q: &MultiPoly) -> Self {
        Self {
            dim: q.dim(),
            degree: q.degree(),
            max_coeff: q.max_coeff_magnitude(),
            grad: q.gradient(),
            hess: q.hessian(),
            q: q.clone(),
        }
    }

    pub fn value(&self, z: &[C]) -> C {
        self.q.eval_complex(z)
    }

    pub fn gradient(&self, z: &[C]) -> Vec<C> {
        self.grad.iter().map(|g| g.eval_complex(z)).collect()
    }

    pub fn hessian(&self, z: &[C]) -> DMatrix<C> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.hess[i][j].eval_complex(z))
    }
}

/// Start box half-width: `box_scale · 2 · (1+|λ|)^{1/q} · max(1, max|c_α|)`.
/// Heuristic — nothing localizes solutions a priori; ellipticity only keeps
/// them bounded. Iterates beyond 25× this radius count as divergent.
fn start_radius(jet: &Jet, lambda: f64, box_scale: f64) -> f64 {
    let q = jet.degree.max(1) as f64;
    let m = jet.max_coeff.max(1.0);
    box_scale * 2.0 * libm::pow(1.0 + libm::fabs(lambda), 1.0 / q) * m
}

trait NewtonProblem {
    fn n(&self) -> usize;
    fn residual(&self, u: &[f64], out: &mut DVector<f64>);
    fn jacobian(&self, u: &[f64], out: &mut DMatrix<f64>);
}

/// Damped Newton with step halving: at most `MAX_ITER` iterations and
/// `MAX_HALVINGS` halvings per step; converged when ‖F‖₂ < `NEWTON_TOL`;
/// divergent when the iterate leaves the `r_div` box.
fn newton<P: NewtonProblem>(p: &P, u0: &[f64], r_div: f64) -> Option<(Vec<f64>, f64)> {
    let n = p.n();
    let mut u = DVector::from_row_slice(u0);
    let mut f = DVector::zeros(n);
    let mut jac = DMatrix::zeros(n, n);
    p.residual(u.as_slice(), &mut f);
    let mut nf = f.norm();
    for _ in 0..MAX_ITER {
        if !nf.is_finite() {
            return None;
        }
        if nf < NEWTON_TOL {
            return Some((u.as_slice().to_vec(), nf));
        }
        if u.amax() > r_div {
            return None;
        }
        p.jacobian(u.as_slice(), &mut jac);
        let step = linalg::lstsq_solve(&jac, &(-&f))?;
        let mut t = 1.0f64;
        let mut accepted = false;
        let mut f_try = DVector::zeros(n);
        for _ in 0..MAX_HALVINGS {
            let u_try = &u + &step * t;
            p.residual(u_try.as_slice(), &mut f_try);
            let nf_try = f_try.norm();
            if nf_try.is_finite() && nf_try <= (1.0 - 1e-4 * t) * nf {
                u = u_try;
                nf = nf_try;
                core::mem::swap(&mut f, &mut f_try);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return if nf < NEWTON_TOL {
                Some((u.as_slice().to_vec(), nf))
            } else {
                None
            };
        }
    }
    if nf < NEWTON_TOL {
        Some((u.as_slice().to_vec(), nf))
    } else {
        None
    }
}

/// `Q(ξ+iη) = λ`, `∇Q(ξ+iη) = βθ`; u = [ξ, η, Re β, Im β].
struct DirectionProblem<'a> {
    jet: &'a Jet,
    lambda: f64,
    theta: &'a [f64],
}

fn z_from(xi: &[f64], eta: &[f64]) -> Vec<C> {
    xi.iter().zip(eta).map(|(&r, &i)| C::new(r, i)).collect()
}

impl NewtonProblem for DirectionProblem<'_> {
    fn n(&self) -> usize {
        2 * self.jet.dim + 2
    }

    fn residual(&self, u: &[f64], out: &mut DVector<f64>) {
        let d = self.jet.dim;
        let z = z_from(&u[0..d], &u[d..2 * d]);
        let (br, bi) = (u[2 * d], u[2 * d + 1]);
        let val = self.jet.value(&z);
        let grad = self.jet.gradient(&z);
        out[0] = val.re - self.lambda;
        out[1] = val.im;
        for j in 0..d {
            out[2 + 2 * j] = grad[j].re - br * self.theta[j];
            out[3 + 2 * j] = grad[j].im - bi * self.theta[j];
        }
    }

    fn jacobian(&self, u: &[f64], out: &mut DMatrix<f64>) {
        let d = self.jet.dim;
        let z = z_from(&u[0..d], &u[d..2 * d]);
        let grad = self.jet.gradient(&z);
        let hess = self.jet.hessian(&z);
        out.fill(0.0);
        for k in 0..d {
            out[(0, k)] = grad[k].re;
            out[(0, d + k)] = -grad[k].im;
            out[(1, k)] = grad[k].im;
            out[(1, d + k)] = grad[k].re;
        }
        for j in 0..d {
            for k in 0..d {
                let h = hess[(j, k)];
                out[(2 + 2 * j, k)] = h.re;
                out[(2 + 2 * j, d + k)] = -h.im;
                out[(3 + 2 * j, k)] = h.im;
                out[(3 + 2 * j, d + k)] = h.re;
            }
            out[(2 + 2 * j, 2 * d)] = -self.theta[j];
            out[(3 + 2 * j, 2 * d + 1)] = -self.theta[j];
        }
    }
}

/// `Q(ξ+iσω) = λ`, `∇Q = βω`, `|ω|² = 1`; u = [ξ, σ, ω, Re β, Im β].
struct GlobalProblem<'a> {
    jet: &'a Jet,
    lambda: f64,
}

impl NewtonProblem for GlobalProblem<'_> {
    fn n(&self) -> usize {
        2 * self.jet.dim + 3
    }

    fn residual(&self, u: &[f64], out: &mut DVector<f64>) {
        let d = self.jet.dim;
        let (xi, sigma, omega) = (&u[0..d], u[d], &u[d + 1..2 * d + 1]);
        let (br, bi) = (u[2 * d + 1], u[2 * d + 2]);
        let eta: Vec<f64> = omega.iter().map(|w| sigma * w).collect();
        let z = z_from(xi, &eta);
        let val = self.jet.value(&z);
        let grad = self.jet.gradient(&z);
        out[0] = val.re - self.lambda;
        out[1] = val.im;
        for j in 0..d {
            out[2 + 2 * j] = grad[j].re - br * omega[j];
            out[3 + 2 * j] = grad[j].im - bi * omega[j];
        }
        out[2 * d + 2] = linalg::dot(omega, omega) - 1.0;
    }

    fn jacobian(&self, u: &[f64], out: &mut DMatrix<f64>) {
        let d = self.jet.dim;
        let (xi, sigma, omega) = (&u[0..d], u[d], &u[d + 1..2 * d + 1]);
        let (br, bi) = (u[2 * d + 1], u[2 * d + 2]);
        let eta: Vec<f64> = omega.iter().map(|w| sigma * w).collect();
        let z = z_from(xi, &eta);
        let grad = self.jet.gradient(&z);
        let hess = self.jet.hessian(&z);
        out.fill(0.0);
        let gw: C = linalg::rcdot(omega, &grad);
        for k in 0..d {
            out[(0, k)] = grad[k].re;
            out[(0, d + 1 + k)] = -sigma * grad[k].im;
            out[(1, k)] = grad[k].im;
            out[(1, d + 1 + k)] = sigma * grad[k].re;
        }
        out[(0, d)] = -gw.im;
        out[(1, d)] = gw.re;
        for j in 0..d {
            let hw: C = (0..d).map(|k| hess[(j, k)] * omega[k]).sum();
            out[(2 + 2 * j, d)] = -hw.im;
            out[(3 + 2 * j, d)] = hw.re;
            for k in 0..d {
                let h = hess[(j, k)];
                out[(2 + 2 * j, k)] = h.re;
                out[(3 + 2 * j, k)] = h.im;
                out[(2 + 2 * j, d + 1 + k)] = -sigma * h.im;
                out[(3 + 2 * j, d + 1 + k)] = sigma * h.re;
            }
            out[(2 + 2 * j, d + 1 + j)] -= br;
            out[(3 + 2 * j, d + 1 + j)] -= bi;
            out[(2 + 2 * j, 2 * d + 1)] = -omega[j];
            out[(3 + 2 * j, 2 * d + 2)] = -omega[j];
        }
        for k in 0..d {
            out[(2 * d + 2, d + 1 + k)] = 2.0 * omega[k];
        }
    }
}

/// `Q(ξ+iσa) = λ`, `∇Q = βτ`, `|τ|² = 1` with the ray `a` fixed;
/// u = [ξ, σ, τ, Re β, Im β]. Used to polish a profile entry so that its
/// boundary direction is exactly a grid direction.
struct RayProblem<'a> {
    jet: &'a Jet,
    lambda: f64,
    ray: &'a [f64],
}

impl NewtonProblem for RayProblem<'_> {
    fn n(&self) -> usize {
        2 * self.jet.dim + 3
    }

    fn residual(&self, u: &[f64], out: &mut DVector<f64>) {
        let d = self.jet.dim;
        let (xi, sigma, tau) = (&u[0..d], u[d], &u[d + 1..2 * d + 1]);
        let (br, bi) = (u[2 * d + 1], u[2 * d + 2]);
        let eta: Vec<f64> = self.ray.iter().map(|w| sigma * w).collect();
        let z = z_from(xi, &eta);
        let val = self.jet.value(&z);
        let grad = self.jet.gradient(&z);
        out[0] = val.re - self.lambda;
        out[1] = val.im;
        for j in 0..d {
            out[2 + 2 * j] = grad[j].re - br * tau[j];
            out[3 + 2 * j] = grad[j].im - bi * tau[j];
        }
        out[2 * d + 2] = linalg::dot(tau, tau) - 1.0;
    }

    fn jacobian(&self, u: &[f64], out: &mut DMatrix<f64>) {
        let d = self.jet.dim;
        let (xi, sigma, tau) = (&u[0..d], u[d], &u[d + 1..2 * d + 1]);
        let (br, bi) = (u[2 * d + 1], u[2 * d + 2]);
        let eta: Vec<f64> = self.ray.iter().map(|w| sigma * w).collect();
        let z = z_from(xi, &eta);
        let grad = self.jet.gradient(&z);
        let hess = self.jet.hessian(&z);
        out.fill(0.0);
        let ga: C = linalg::rcdot(self.ray, &grad);
        for k in 0..d {
            out[(0, k)] = grad[k].re;
            out[(1, k)] = grad[k].im;
        }
        out[(0, d)] = -ga.im;
        out[(1, d)] = ga.re;
        for j in 0..d {
            let ha: C = (0..d).map(|k| hess[(j, k)] * self.ray[k]).sum();
            out[(2 + 2 * j, d)] = -ha.im;
            out[(3 + 2 * j, d)] = ha.re;
            for k in 0..d {
                let h = hess[(j, k)];
                out[(2 + 2 * j, k)] = h.re;
                out[(3 + 2 * j, k)] = h.im;
            }
            out[(2 + 2 * j, d + 1 + j)] = -br;
            out[(3 + 2 * j, d + 1 + j)] = -bi;
            out[(2 + 2 * j, 2 * d + 1)] = -tau[j];
            out[(3 + 2 * j, 2 * d + 2)] = -tau[j];
        }
        for k in 0..d {
            out[(2 * d + 2, d + 1 + k)] = 2.0 * tau[k];
        }
    }
}

/// `∇Q(ξ+iη) = 0`; u = [ξ, η].
struct CriticalProblem<'a> {
    jet: &'a Jet,
}

impl NewtonProblem for CriticalProblem<'_> {
    fn n(&self) -> usize {
        2 * self.jet.dim
    }

    fn residual(&self, u: &[f64], out: &mut DVector<f64>) {
        let d = self.jet.dim;
        let z = z_from(&u[0..d], &u[d..2 * d]);
        let grad = self.jet.gradient(&z);
        for j in 0..d {
            out[2 * j] = grad[j].re;
            out[2 * j + 1] = grad[j].im;
        }
    }

    fn jacobian(&self, u: &[f64], out: &mut DMatrix<f64>) {
        let d = self.jet.dim;
        let z = z_from(&u[0..d], &u[d..2 * d]);
        let hess = self.jet.hessian(&z);
        for j in 0..d {
            for k in 0..d {
                let h = hess[(j, k)];
                out[(2 * j, k)] = h.re;
                out[(2 * j, d + k)] = -h.im;
                out[(2 * j + 1, k)] = h.im;
                out[(2 * j + 1, d + k)] = h.re;
            }
        }
    }
}

fn ensure_elliptic(q: &MultiPoly) -> Result<(), SolveError> {
    let cert = check_ellipticity(q, 0);
    if cert.is_elliptic {
        Ok(())
    } else {
        Err(SolveError::NotElliptic {
            min_leading_form: cert.min_leading_form,
        })
    }
}

fn normalize_direction(theta: &[f64]) -> Result<Vec<f64>, SolveError> {
    if !theta.iter().all(|v| v.is_finite()) {
        return Err(SolveError::BadDirection);
    }
    linalg::normalize(theta).ok_or(SolveError::BadDirection)
}

/// Flips `(β, θ)` to the canonical representative: first nonzero θ component
/// positive.
fn canonicalize(beta: &mut C, theta: &mut [f64]) {
    for v in theta.iter() {
        if libm::fabs(*v) > 1e-12 {
            if *v < 0.0 {
                for w in theta.iter_mut() {
                    *w = -*w;
                }
                *beta = -*beta;
            }
            return;
        }
    }
}

/// Re-evaluates the two residuals through the polynomial tables and packages
/// the solution; drops purely real solutions (σ below floor).
fn pack_solution(
    jet: &Jet,
    lambda: f64,
    xi: &[f64],
    eta: &[f64],
    beta: C,
    theta: &[f64],
    residual_tol: f64,
) -> Option<StationarySolution> {
    let sigma = linalg::norm(eta);
    if sigma <= SIGMA_FLOOR {
        return None;
    }
    let z = z_from(xi, eta);
    let val = jet.value(&z);
    let grad = jet.gradient(&z);
    let mut grad_res = 0.0f64;
    for j in 0..jet.dim {
        grad_res += (grad[j] - beta * theta[j]).norm_sqr();
    }
    let res = libm::fabs((val - C::new(lambda, 0.0)).norm()).max(libm::sqrt(grad_res));
    if !res.is_finite() || res > residual_tol {
        return None;
    }
    let omega: Vec<f64> = eta.iter().map(|v| v / sigma).collect();
    let mut beta = beta;
    let mut theta = theta.to_vec();
    canonicalize(&mut beta, &mut theta);
    Some(StationarySolution {
        xi: xi.to_vec(),
        eta: eta.to_vec(),
        beta,
        theta,
        sigma,
        omega,
        residual: res,
    })
}

fn conjugate_partner(jet: &Jet, lambda: f64, s: &StationarySolution, tol: f64) -> Option<StationarySolution> {
    let eta: Vec<f64> = s.eta.iter().map(|v| -v).collect();
    pack_solution(jet, lambda, &s.xi, &eta, s.beta.conj(), &s.theta, tol)
}

fn cmp_solutions(a: &StationarySolution, b: &StationarySolution) -> core::cmp::Ordering {
    a.sigma
        .total_cmp(&b.sigma)
        .then_with(|| {
            for (x, y) in a.eta.iter().zip(&b.eta) {
                let c = x.total_cmp(y);
                if c != core::cmp::Ordering::Equal {
                    return c;
                }
            }
            core::cmp::Ordering::Equal
        })
        .then_with(|| {
            for (x, y) in a.xi.iter().zip(&b.xi) {
                let c = x.total_cmp(y);
                if c != core::cmp::Ordering::Equal {
                    return c;
                }
            }
            core::cmp::Ordering::Equal
        })
        .then(a.beta.re.total_cmp(&b.beta.re))
        .then(a.beta.im.total_cmp(&b.beta.im))
}

/// Conjugate-closes, dedups (keeping the lower residual of merged pairs) and
/// canonically sorts a batch of solutions.
fn finalize(
    jet: &Jet,
    lambda: f64,
    mut found: Vec<StationarySolution>,
    opts: &SolveOptions,
) -> Vec<StationarySolution> {
    let partners: Vec<StationarySolution> = found
        .iter()
        .filter_map(|s| conjugate_partner(jet, lambda, s, opts.residual_tol))
        .collect();
    found.extend(partners);
    found.sort_by(|a, b| a.residual.total_cmp(&b.residual).then(cmp_solutions(a, b)));
    let mut kept: Vec<StationarySolution> = Vec::new();
    for s in found {
        if kept.iter().all(|k| k.distance(&s) > opts.dedup_tol) {
            kept.push(s);
        }
    }
    kept.sort_by(cmp_solutions);
    kept
}

fn direction_starts(
    jet: &Jet,
    lambda: f64,
    opts: &SolveOptions,
    draw: &mut Draw,
) -> Vec<Vec<f64>> {
    let d = jet.dim;
    let r = start_radius(jet, lambda, opts.box_scale);
    (0..opts.n_starts)
        .map(|_| {
            let mut u = vec![0.0; 2 * d + 2];
            for v in u.iter_mut().take(2 * d) {
                *v = draw.symmetric(r);
            }
            let z = z_from(&u[0..d], &u[d..2 * d]);
            let gn = linalg::cnorm(&jet.gradient(&z));
            let (br, bi) = draw.disk(gn.max(1e-12));
            u[2 * d] = br;
            u[2 * d + 1] = bi;
            u
        })
        .collect()
}

fn solve_direction_inner(
    jet: &Jet,
    lambda: f64,
    theta: &[f64],
    opts: &SolveOptions,
    seeds: &[StationarySolution],
    draw: &mut Draw,
) -> Vec<StationarySolution> {
    let d = jet.dim;
    let problem = DirectionProblem { jet, lambda, theta };
    let r_div = 25.0 * start_radius(jet, lambda, opts.box_scale);
    let mut found = Vec::new();
    let run = |u0: &[f64], found: &mut Vec<StationarySolution>| {
        if let Some((u, _)) = newton(&problem, u0, r_div) {
            if let Some(s) = pack_solution(
                jet,
                lambda,
                &u[0..d],
                &u[d..2 * d],
                C::new(u[2 * d], u[2 * d + 1]),
                theta,
                opts.residual_tol,
            ) {
                found.push(s);
            }
        }
    };
    for s in seeds {
        let mut u0: Vec<f64> = s.xi.clone();
        u0.extend_from_slice(&s.eta);
        u0.push(s.beta.re);
        u0.push(s.beta.im);
        run(&u0, &mut found);
        // The conjugate seed tracks the mirrored branch.
        let mut u1: Vec<f64> = s.xi.clone();
        u1.extend(s.eta.iter().map(|v| -v));
        u1.push(s.beta.re);
        u1.push(-s.beta.im);
        run(&u1, &mut found);
    }
    for u0 in direction_starts(jet, lambda, opts, draw) {
        run(&u0, &mut found);
    }
    finalize(jet, lambda, found, opts)
}

/// Solves `Q(ξ+iη) = λ`, `∇Q(ξ+iη) = βθ` for a fixed unit `θ`.
///
/// Returns every deduplicated solution with σ = |η| > 0 and residual within
/// `opts.residual_tol`; conjugate partners `(ξ, −η, β̄)` are both reported.
/// No convergence is not an error — the list is empty.
pub fn solve_for_direction(
    q: &MultiPoly,
    lambda: f64,
    theta: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<StationarySolution>, SolveError> {
    if theta.len() != q.dim() {
        return Err(SolveError::WrongDimension {
            expected: q.dim(),
            got: theta.len(),
        });
    }
    ensure_elliptic(q)?;
    let mut theta = normalize_direction(theta)?;
    let mut sign = C::new(1.0, 0.0);
    canonicalize(&mut sign, &mut theta);
    let jet = Jet::new(q);
    let mut draw = Draw::derived(opts.seed, 0);
    Ok(solve_direction_inner(
        &jet, lambda, &theta, opts, &[], &mut draw,
    ))
}

/// Solves the global system `Q(ξ+iσω) = λ`, `∇Q(ξ+iσω) = βω`, `|ω| = 1`.
///
/// The returned σ values contain every candidate global decay rate found by
/// the multistart search; σ > 0 is enforced by post-filtering.
pub fn solve_global_system(
    q: &MultiPoly,
    lambda: f64,
    opts: &SolveOptions,
) -> Result<Vec<StationarySolution>, SolveError> {
    ensure_elliptic(q)?;
    let jet = Jet::new(q);
    let d = jet.dim;
    let problem = GlobalProblem { jet: &jet, lambda };
    let r = start_radius(&jet, lambda, opts.box_scale);
    let r_div = 25.0 * r;
    let mut draw = Draw::new(opts.seed);
    let mut found = Vec::new();
    for _ in 0..opts.n_starts {
        let mut u0 = vec![0.0; 2 * d + 3];
        for v in u0.iter_mut().take(d) {
            *v = draw.symmetric(r);
        }
        u0[d] = draw.unit() * r;
        let omega = draw.unit_vector(d);
        u0[d + 1..2 * d + 1].copy_from_slice(&omega);
        let eta: Vec<f64> = omega.iter().map(|w| u0[d] * w).collect();
        let z = z_from(&u0[0..d], &eta);
        let gn = linalg::cnorm(&jet.gradient(&z));
        let (br, bi) = draw.disk(gn.max(1e-12));
        u0[2 * d + 1] = br;
        u0[2 * d + 2] = bi;
        let Some((u, _)) = newton(&problem, &u0, r_div) else {
            continue;
        };
        let mut sigma = u[d];
        let mut omega = u[d + 1..2 * d + 1].to_vec();
        let mut beta = C::new(u[2 * d + 1], u[2 * d + 2]);
        if sigma < 0.0 {
            sigma = -sigma;
            for w in omega.iter_mut() {
                *w = -*w;
            }
            beta = -beta;
        }
        let Some(omega_n) = linalg::normalize(&omega) else {
            continue;
        };
        let eta: Vec<f64> = omega_n.iter().map(|w| sigma * w).collect();
        if let Some(s) = pack_solution(&jet, lambda, &u[0..d], &eta, beta, &omega_n, opts.residual_tol)
        {
            found.push(s);
        }
    }
    Ok(finalize(&jet, lambda, found, opts))
}

/// Solves the rotation-invariant reduction: all complex roots `w` of
/// `G(w) = λ`, then `√w = α + iσ` on the `σ ≥ 0` branch; pairs with σ > 0
/// are returned sorted by (σ, α). At most `q/2` pairs.
///
/// Requires the roots of `G − λ` to be simple (pairwise distance and
/// `|G'(root)|` above 1e−8); otherwise `λ` is one of the at most `q/2 − 1`
/// exceptional eigenvalues and [`SolveError::ExceptionalEigenvalue`] is
/// returned.
pub fn solve_rotation_invariant(
    g: &RotInvModel,
    lambda: f64,
) -> Result<Vec<(f64, f64)>, SolveError> {
    let mut coeffs = g.g_coeffs.clone();
    if coeffs.is_empty() {
        coeffs.push(0.0);
    }
    coeffs[0] -= lambda;
    let roots = real_poly_complex_roots(&coeffs);
    for (i, wi) in roots.iter().enumerate() {
        for wj in roots.iter().skip(i + 1) {
            if (wi - wj).norm() <= 1e-8 {
                return Err(SolveError::ExceptionalEigenvalue {
                    detail: format!("G − λ has roots closer than 1e-8 near w = {wi}"),
                });
            }
        }
        let gp = g.eval_g_prime(*wi);
        if gp.norm() <= 1e-8 {
            return Err(SolveError::ExceptionalEigenvalue {
                detail: format!("|G'(w)| ≤ 1e-8 at the root w = {wi}"),
            });
        }
    }
    let mut pairs: Vec<(f64, f64)> = roots
        .iter()
        .filter_map(|w| {
            let mut s = w.sqrt();
            if s.im < 0.0 {
                s = -s;
            }
            (s.im > SIGMA_FLOOR).then_some((s.im, s.re))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs.dedup_by(|a, b| libm::fabs(a.0 - b.0) < 1e-12 && libm::fabs(a.1 - b.1) < 1e-12);
    Ok(pairs)
}

/// d = 1 decay rates: positive imaginary parts of the roots of `Q(z) = λ`,
/// deduplicated. Conjugate pairing makes the rate sets at ±∞ agree, so one
/// list is returned. Only real roots ⇒ empty list.
pub fn solve_1d(q: &MultiPoly, lambda: f64) -> Result<Vec<f64>, SolveError> {
    if q.dim() != 1 {
        return Err(SolveError::WrongDimension {
            expected: 1,
            got: q.dim(),
        });
    }
    let mut coeffs = vec![0.0; q.degree() as usize + 1];
    for (alpha, c) in q.terms() {
        coeffs[alpha[0] as usize] += c;
    }
    coeffs[0] -= lambda;
    let roots = real_poly_complex_roots(&coeffs);
    let mut sigmas: Vec<f64> = roots
        .iter()
        .filter(|z| z.im > SIGMA_FLOOR)
        .map(|z| z.im)
        .collect();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup_by(|a, b| libm::fabs(*a - *b) < 1e-8);
    Ok(sigmas)
}

/// Multistart search for the critical values of `Q : ℂ^d → ℂ`.
///
/// Deduplicates the values `Q(z)` at converged zeros of `∇Q`; the count is
/// checked against the algebraic bound `(q−1)^d`. Completeness is heuristic:
/// `possibly_incomplete` is set when a new value was first seen in the last
/// quarter of the start budget.
pub fn find_critical_values(
    q: &MultiPoly,
    opts: &SolveOptions,
) -> Result<CriticalValueSet, SolveError> {
    ensure_elliptic(q)?;
    let jet = Jet::new(q);
    let d = jet.dim;
    let problem = CriticalProblem { jet: &jet };
    // Critical points defy coefficient-balance boxes (self-cancellation can
    // push them far out); start wider than the λ-system box.
    let r = opts.box_scale * 4.0 * (1.0 + jet.max_coeff);
    let r_div = 25.0 * r;
    let bound = libm::pow((jet.degree.max(1) - 1).max(1) as f64, d as f64) as usize;
    let mut draw = Draw::new(opts.seed);
    let mut values: Vec<C> = Vec::new();
    let mut points: Vec<(Vec<C>, f64)> = Vec::new();
    let mut last_new = 0usize;
    for start in 0..opts.n_starts {
        let u0: Vec<f64> = (0..2 * d).map(|_| draw.symmetric(r)).collect();
        let Some((u, _)) = newton(&problem, &u0, r_div) else {
            continue;
        };
        let z = z_from(&u[0..d], &u[d..2 * d]);
        let grad_norm = linalg::cnorm(&jet.gradient(&z));
        if grad_norm > opts.residual_tol {
            continue;
        }
        let v = jet.value(&z);
        if !v.re.is_finite() || !v.im.is_finite() {
            continue;
        }
        match values
            .iter()
            .position(|w| (w - v).norm() <= opts.dedup_tol)
        {
            Some(i) => {
                if grad_norm < points[i].1 {
                    points[i] = (z, grad_norm);
                    values[i] = v;
                }
            }
            None => {
                values.push(v);
                points.push((z, grad_norm));
                last_new = start;
            }
        }
    }
    if values.len() > bound {
        return Err(SolveError::CountBoundExceeded {
            found: values.len(),
            bound,
        });
    }
    let possibly_incomplete = !values.is_empty() && last_new * 4 > opts.n_starts * 3;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .re
            .total_cmp(&values[j].re)
            .then(values[i].im.total_cmp(&values[j].im))
    });
    let points = order
        .iter()
        .map(|&i| ComplexPoint {
            re: points[i].0.iter().map(|c| c.re).collect(),
            im: points[i].0.iter().map(|c| c.im).collect(),
        })
        .collect();
    let values = order.iter().map(|&i| values[i]).collect();
    Ok(CriticalValueSet {
        values,
        points,
        count_bound: bound,
        possibly_incomplete,
    })
}

/// Per-direction continuation sweep over a grid.
///
/// Each direction is solved from `opts.n_starts` fresh random starts plus
/// Newton refinements seeded by every solution already found at neighboring
/// grid points; a second pass re-seeds from both neighbors so branches
/// survive crossings in either sweep order. Starts are drawn from streams
/// derived per direction, so the output is independent of execution order.
pub fn sweep_directions(
    q: &MultiPoly,
    lambda: f64,
    grid: &DirectionGrid,
    opts: &SolveOptions,
) -> Result<DirectionCloud, SolveError> {
    if grid.dim() != q.dim() {
        return Err(SolveError::WrongDimension {
            expected: q.dim(),
            got: grid.dim(),
        });
    }
    ensure_elliptic(q)?;
    let jet = Jet::new(q);
    let n = grid.len();
    let mut cloud: Vec<Vec<StationarySolution>> = vec![Vec::new(); n];
    for i in 0..n {
        let mut theta = normalize_direction(grid.point(i))?;
        let mut sign = C::new(1.0, 0.0);
        canonicalize(&mut sign, &mut theta);
        let mut seeds: Vec<StationarySolution> = Vec::new();
        for &j in grid.neighbors(i) {
            if j < i {
                seeds.extend(cloud[j].iter().cloned());
            }
        }
        let mut draw = Draw::derived(opts.seed, i as u64);
        cloud[i] = solve_direction_inner(&jet, lambda, &theta, opts, &seeds, &mut draw);
    }
    // Second pass: seed from all neighbors now that every direction is
    // populated, merging anything new.
    for i in 0..n {
        let mut theta = normalize_direction(grid.point(i))?;
        let mut sign = C::new(1.0, 0.0);
        canonicalize(&mut sign, &mut theta);
        let mut seeds: Vec<StationarySolution> = Vec::new();
        for &j in grid.neighbors(i) {
            seeds.extend(cloud[j].iter().cloned());
        }
        if seeds.is_empty() {
            continue;
        }
        let refine_opts = SolveOptions {
            n_starts: 0,
            ..opts.clone()
        };
        let mut draw = Draw::derived(opts.seed, (n + i) as u64);
        let extra = solve_direction_inner(&jet, lambda, &theta, &refine_opts, &seeds, &mut draw);
        let mut merged = cloud[i].clone();
        merged.extend(extra);
        cloud[i] = finalize(&jet, lambda, merged, opts);
    }
    Ok(DirectionCloud {
        grid: grid.clone(),
        solutions: cloud,
    })
}

/// Newton-refines a known solution at a nearby direction `θ`.
pub fn refine_at_theta(
    q: &MultiPoly,
    lambda: f64,
    theta: &[f64],
    seed: &StationarySolution,
    residual_tol: f64,
) -> Option<StationarySolution> {
    let jet = Jet::new(q);
    refine_at_theta_inner(&jet, lambda, theta, seed, residual_tol)
}

pub(crate) fn refine_at_theta_inner(
    jet: &Jet,
    lambda: f64,
    theta: &[f64],
    seed: &StationarySolution,
    residual_tol: f64,
) -> Option<StationarySolution> {
    let mut theta = normalize_direction(theta).ok()?;
    let mut sign = C::new(1.0, 0.0);
    canonicalize(&mut sign, &mut theta);
    let d = jet.dim;
    let problem = DirectionProblem {
        jet,
        lambda,
        theta: &theta,
    };
    let mut u0: Vec<f64> = seed.xi.clone();
    u0.extend_from_slice(&seed.eta);
    u0.push(seed.beta.re);
    u0.push(seed.beta.im);
    let r_div = 25.0 * start_radius(jet, lambda, 1.0);
    let (u, _) = newton(&problem, &u0, r_div)?;
    pack_solution(
        jet,
        lambda,
        &u[0..d],
        &u[d..2 * d],
        C::new(u[2 * d], u[2 * d + 1]),
        &theta,
        residual_tol,
    )
}

/// Polishes a solution onto the exact ray `ω = a` (θ freed), so the profile
/// value σ(a) is residual-accurate at the stated grid direction.
pub(crate) fn polish_on_ray(
    jet: &Jet,
    lambda: f64,
    ray: &[f64],
    seed: &StationarySolution,
    residual_tol: f64,
) -> Option<StationarySolution> {
    let d = jet.dim;
    let problem = RayProblem {
        jet,
        lambda,
        ray,
    };
    let mut u0: Vec<f64> = seed.xi.clone();
    u0.push(linalg::dot(&seed.eta, ray).max(SIGMA_FLOOR));
    u0.extend_from_slice(&seed.theta);
    u0.push(seed.beta.re);
    u0.push(seed.beta.im);
    let r_div = 25.0 * start_radius(jet, lambda, 1.0);
    let (u, _) = newton(&problem, &u0, r_div)?;
    let sigma = u[d];
    if sigma <= SIGMA_FLOOR {
        return None;
    }
    let tau = linalg::normalize(&u[d + 1..2 * d + 1])?;
    let eta: Vec<f64> = ray.iter().map(|w| sigma * w).collect();
    pack_solution(
        jet,
        lambda,
        &u[0..d],
        &eta,
        C::new(u[2 * d + 1], u[2 * d + 2]),
        &tau,
        residual_tol,
    )
}

/// All complex roots of a real-coefficient univariate polynomial
/// (ascending coefficients), by the Aberth–Ehrlich simultaneous iteration
/// from deterministic circle guesses, with a short Newton polish.
/// Deterministic ordering by (re, im).
///
/// (A companion-matrix eigenvalue route would do the same job, but the
/// available Schur decomposition iterates unboundedly and stalls on exactly
/// these matrices.)
pub fn real_poly_complex_roots(coeffs: &[f64]) -> Vec<C> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.len() > 1 && libm::fabs(*c.last().unwrap()) == 0.0 {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let eval = |z: C| -> (C, C) {
        let mut p = C::new(0.0, 0.0);
        let mut dp = C::new(0.0, 0.0);
        for &ck in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + ck;
        }
        (p, dp)
    };
    // Cauchy bound on root moduli; guesses on that circle with an irrational
    // angular offset so no guess sits on a symmetry axis.
    let lead = libm::fabs(c[n]);
    let bound = 1.0 + c[..n].iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max) / lead;
    let radius = 0.5 + 0.7 * bound;
    let mut z: Vec<C> = (0..n)
        .map(|k| {
            let phi = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.437;
            C::new(radius * libm::cos(phi), radius * libm::sin(phi))
        })
        .collect();
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            let w = if dp.norm() > 1e-300 {
                p / dp
            } else {
                // Derivative vanished underfoot; nudge off the bad spot.
                let bump = 1e-8 * (1.0 + z[k].norm());
                z[k] += C::new(bump, 0.0);
                continue;
            };
            let mut s = C::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > 1e-300 {
                        s += C::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = C::new(1.0, 0.0) - w * s;
            let corr = if denom.norm() > 1e-300 { w / denom } else { w };
            z[k] -= corr;
            moved = moved.max(corr.norm() / (1.0 + z[k].norm()));
        }
        if moved < 1e-14 {
            break;
        }
    }
    let mut roots: Vec<C> = z
        .into_iter()
        .map(|z0| {
            let mut z = z0;
            for _ in 0..3 {
                let (p, dp) = eval(z);
                if dp.norm() > 1e-300 {
                    let step = p / dp;
                    if step.norm() < 1.0 {
                        z -= step;
                    }
                }
            }
            // Real-coefficient polynomial: snap residual imaginary dust on
            // near-real roots.
            if libm::fabs(z.im) < 1e-14 * (1.0 + libm::fabs(z.re)) {
                z.im = 0.0;
            }
            z
        })
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wedge::WedgeModel;
    use approx::assert_abs_diff_eq;

    fn quick_opts(n: usize, seed: u64) -> SolveOptions {
        SolveOptions {
            n_starts: n,
            seed,
            ..SolveOptions::per_direction()
        }
    }

    #[test]
    fn laplacian_direction_solutions() {
        let q = MultiPoly::laplacian_power(2, 1);
        let sols = solve_for_direction(&q, -1.0, &[0.0, 1.0], &quick_opts(80, 3)).unwrap();
        // z = ±iθ, β = ±2i, σ = 1.
        assert_eq!(sols.len(), 2);
        for s in &sols {
            assert_abs_diff_eq!(s.sigma, 1.0, epsilon = 1e-10);
            assert!(linalg::norm(&s.xi) < 1e-10);
            assert_abs_diff_eq!(s.beta.re, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(libm::fabs(s.beta.im), 2.0, epsilon = 1e-9);
            assert!(s.residual <= 1e-9);
        }
        let etas: Vec<f64> = sols.iter().map(|s| s.eta[1]).collect();
        assert!(etas.iter().any(|&v| v > 0.0) && etas.iter().any(|&v| v < 0.0));
    }

    #[test]
    fn quartic_direction_sigma_is_rotinv_value() {
        let q = MultiPoly::laplacian_power(2, 2);
        let sols = solve_for_direction(&q, -1.0, &[0.6, -0.8], &quick_opts(120, 11)).unwrap();
        assert!(!sols.is_empty());
        let target = libm::sqrt(0.5);
        for s in &sols {
            assert_abs_diff_eq!(s.sigma, target, epsilon = 1e-10);
        }
    }

    #[test]
    fn wedge_pole_direction_matches_closed_form() {
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let sols =
            solve_for_direction(&q, -1.0, &[0.0, 1.0], &quick_opts(200, 5)).unwrap();
        let expect_hi = model.lambda0 + model.eps / 2.0;
        let expect_lo = model.lambda0 - model.eps / 2.0;
        let has = |target: f64| sols.iter().any(|s| libm::fabs(s.sigma - target) < 1e-8);
        assert!(has(expect_hi), "missing σ = λ0 + ε/2");
        assert!(has(expect_lo), "missing σ = λ0 - ε/2");
    }

    #[test]
    fn non_elliptic_is_rejected() {
        let hyp = MultiPoly::new(2, [(vec![2, 0], 1.0), (vec![0, 2], -1.0)]).unwrap();
        assert!(matches!(
            solve_for_direction(&hyp, -1.0, &[1.0, 0.0], &quick_opts(10, 1)),
            Err(SolveError::NotElliptic { .. })
        ));
    }

    #[test]
    fn global_system_laplacian() {
        let q = MultiPoly::laplacian_power(2, 1);
        let sols = solve_global_system(&q, -1.0, &quick_opts(200, 7)).unwrap();
        assert!(!sols.is_empty());
        for s in &sols {
            assert_abs_diff_eq!(s.sigma, 1.0, epsilon = 1e-10);
            assert!(linalg::norm(&s.xi) < 1e-9);
        }
    }

    #[test]
    fn global_system_wedge_includes_critical_family() {
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let sols = solve_global_system(&q, -1.0, &SolveOptions::global().with_seed(2)).unwrap();
        let has = |target: f64| sols.iter().any(|s| libm::fabs(s.sigma - target) < 1e-7);
        assert!(has(model.lambda0 + model.eps / 2.0));
        assert!(has(model.lambda0 - model.eps / 2.0));
        assert!(has(1.0 / model.eps), "missing the ω_d = 0 family σ = 1/ε");
    }

    #[test]
    fn rotation_invariant_reduction() {
        // G(w) = w, λ = −1 → σ = 1, α = 0.
        let g = RotInvModel {
            g_coeffs: vec![0.0, 1.0],
            residual: 0.0,
        };
        let pairs = solve_rotation_invariant(&g, -1.0).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_abs_diff_eq!(pairs[0].0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pairs[0].1, 0.0, epsilon = 1e-12);

        // G(w) = w², λ = −1 → w = ±i, σ = 2^{-1/2}, α = ±2^{-1/2}.
        let g = RotInvModel {
            g_coeffs: vec![0.0, 0.0, 1.0],
            residual: 0.0,
        };
        let pairs = solve_rotation_invariant(&g, -1.0).unwrap();
        assert_eq!(pairs.len(), 2);
        let r = libm::sqrt(0.5);
        for (sigma, alpha) in &pairs {
            assert_abs_diff_eq!(*sigma, r, epsilon = 1e-12);
            assert_abs_diff_eq!(libm::fabs(*alpha), r, epsilon = 1e-12);
        }
        assert!(pairs[0].1 < 0.0 && pairs[1].1 > 0.0);

        // Double root at λ = 0 is exceptional.
        assert!(matches!(
            solve_rotation_invariant(&g, 0.0),
            Err(SolveError::ExceptionalEigenvalue { .. })
        ));
    }

    #[test]
    fn one_dimensional_rates() {
        let q = MultiPoly::new(1, [(vec![2], 1.0)]).unwrap();
        assert_eq!(solve_1d(&q, -4.0).unwrap(), vec![2.0]);
        assert!(solve_1d(&q, 1.0).unwrap().is_empty());

        let q4 = MultiPoly::new(1, [(vec![4], 1.0)]).unwrap();
        let sigmas = solve_1d(&q4, -1.0).unwrap();
        assert_eq!(sigmas.len(), 1);
        assert_abs_diff_eq!(sigmas[0], libm::sqrt(0.5), epsilon = 1e-12);
    }

    #[test]
    fn critical_values_simple_cases() {
        let q = MultiPoly::laplacian_power(2, 1);
        let set = find_critical_values(&q, &quick_opts(200, 9)).unwrap();
        assert_eq!(set.count_bound, 1);
        assert_eq!(set.values.len(), 1);
        assert!(set.values[0].norm() < 1e-9);

        let q4 = MultiPoly::new(1, [(vec![4], 1.0)]).unwrap();
        let set = find_critical_values(&q4, &quick_opts(200, 9)).unwrap();
        assert_eq!(set.count_bound, 3);
        assert_eq!(set.values.len(), 1);
        assert!(set.values[0].norm() < 1e-6);
    }

    #[test]
    fn wedge_critical_values_contain_lambda() {
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let set = find_critical_values(&q, &SolveOptions::global().with_seed(13)).unwrap();
        assert!(set.values.len() <= set.count_bound);
        assert!(
            set.distance_to(-1.0) < 1e-6,
            "λ = −1 is a critical value of the wedge operator"
        );
    }

    #[test]
    fn sweep_single_direction_equals_direct_solve() {
        let q = MultiPoly::laplacian_power(2, 1);
        let grid = DirectionGrid::circle(1);
        let opts = quick_opts(60, 21);
        let cloud = sweep_directions(&q, -1.0, &grid, &opts).unwrap();
        let direct = solve_for_direction(&q, -1.0, grid.point(0), &opts).unwrap();
        assert_eq!(cloud.solutions[0].len(), direct.len());
        for (a, b) in cloud.solutions[0].iter().zip(&direct) {
            assert!(a.distance(b) < 1e-12);
        }
    }

    #[test]
    fn sweep_circle_constant_sigma() {
        let q = MultiPoly::laplacian_power(2, 1);
        let grid = DirectionGrid::circle(24);
        let cloud = sweep_directions(&q, -1.0, &grid, &quick_opts(40, 17)).unwrap();
        for sols in &cloud.solutions {
            assert!(!sols.is_empty());
            for s in sols {
                assert_abs_diff_eq!(s.sigma, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn determinism_bit_identical() {
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let a = solve_for_direction(&q, -1.0, &[0.0, 1.0], &quick_opts(80, 42)).unwrap();
        let b = solve_for_direction(&q, -1.0, &[0.0, 1.0], &quick_opts(80, 42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn univariate_roots_quartic() {
        // z⁴ + 1: roots e^{iπ/4}·{1, i, −1, −i}.
        let roots = real_poly_complex_roots(&[1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(roots.len(), 4);
        for z in &roots {
            assert_abs_diff_eq!(z.norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(libm::fabs(z.re), libm::sqrt(0.5), epsilon = 1e-12);
        }
    }
}
