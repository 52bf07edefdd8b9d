//! Sparse multivariate real polynomials and their complex-argument calculus.
//!
//! A symbol `Q` is stored as a map from multi-indices `α ∈ ℕ^d` to real
//! coefficients. Complex evaluation is the *polynomial* analytic
//! continuation: each `ξ_j` is replaced by `z_j = ξ_j + iη_j`, so `|ξ|²`
//! continues to `z·z = Σ z_j²` and never to a modulus. Everything downstream
//! (stationarity systems, factorization identities, `Q''` certificates)
//! depends on this reading.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::grid::DirectionGrid;
use crate::linalg;
use crate::rng::Draw;

type C = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum PolyError {
    DimensionMismatch { expected: usize, got: usize },
    BadMultiIndex { len: usize, dim: usize },
    NonFinite,
    EmptyPolynomial,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: polynomial has d={expected}, point has d={got}")
            }
            PolyError::BadMultiIndex { len, dim } => {
                write!(f, "multi-index of length {len} for a polynomial in {dim} variables")
            }
            PolyError::NonFinite => write!(f, "non-finite coefficient or coordinate"),
            PolyError::EmptyPolynomial => write!(f, "empty polynomial (no terms)"),
        }
    }
}

impl core::error::Error for PolyError {}

/// Point `z = ξ + iη ∈ ℂ^d`, split into its real and imaginary vectors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexPoint {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexPoint {
    pub fn new(re: Vec<f64>, im: Vec<f64>) -> Result<Self, PolyError> {
        if re.len() != im.len() {
            return Err(PolyError::DimensionMismatch {
                expected: re.len(),
                got: im.len(),
            });
        }
        if !re.iter().chain(&im).all(|v| v.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(Self { re, im })
    }

    pub fn real(x: Vec<f64>) -> Self {
        let im = vec![0.0; x.len()];
        Self { re: x, im }
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn to_complex(&self) -> Vec<C> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| C::new(r, i))
            .collect()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.iter().map(|v| -v).collect(),
        }
    }
}

/// Real-coefficient polynomial in `d` variables, sparse term map.
///
/// Invariants: no stored zero coefficients; the degree is cached.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
    degree: u32,
}

impl MultiPoly {
    /// Builds a polynomial from (multi-index, coefficient) pairs.
    /// Duplicate multi-indices are summed; zero coefficients are dropped.
    pub fn new(
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self, PolyError> {
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.len() != dim {
                return Err(PolyError::BadMultiIndex {
                    len: alpha.len(),
                    dim,
                });
            }
            if !c.is_finite() {
                return Err(PolyError::NonFinite);
            }
            *map.entry(alpha).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        let degree = map.keys().map(|a| a.iter().sum()).max().unwrap_or(0);
        Ok(Self {
            dim,
            terms: map,
            degree,
        })
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, [(vec![0; dim], c)]).expect("constant term is well formed")
    }

    /// `|ξ|^{2k} = (ξ·ξ)^k` in `dim` variables.
    pub fn laplacian_power(dim: usize, k: u32) -> Self {
        let mut terms = Vec::new();
        for beta in compositions(k, dim) {
            let coeff = multinomial(k, &beta);
            let alpha: Vec<u32> = beta.iter().map(|b| 2 * b).collect();
            terms.push((alpha, coeff));
        }
        Self::new(dim, terms).expect("expansion is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total degree `q` (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.terms.iter().map(|(a, c)| (a, *c))
    }

    pub fn coeff(&self, alpha: &[u32]) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(libm::fabs(*c)))
    }

    /// Exact evaluation of the analytic continuation at `z ∈ ℂ^d`.
    pub fn eval_complex(&self, z: &[C]) -> C {
        debug_assert_eq!(z.len(), self.dim);
        let pows = power_table(z, self.degree);
        let mut acc = C::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut t = C::new(*c, 0.0);
            for (j, &a) in alpha.iter().enumerate() {
                if a > 0 {
                    t *= pows[j][a as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_real(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut acc = 0.0;
        for (alpha, c) in &self.terms {
            let mut t = *c;
            for (j, &a) in alpha.iter().enumerate() {
                for _ in 0..a {
                    t *= x[j];
                }
            }
            acc += t;
        }
        acc
    }

    /// Dimension-checked evaluation at a [`ComplexPoint`].
    pub fn eval(&self, z: &ComplexPoint) -> Result<C, PolyError> {
        if z.dim() != self.dim {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim,
                got: z.dim(),
            });
        }
        Ok(self.eval_complex(&z.to_complex()))
    }

    /// Partial derivative `∂P/∂ξ_j`.
    pub fn partial(&self, j: usize) -> Self {
        assert!(j < self.dim);
        let terms = self.terms.iter().filter_map(|(alpha, c)| {
            if alpha[j] == 0 {
                None
            } else {
                let mut a = alpha.clone();
                a[j] -= 1;
                Some((a, c * alpha[j] as f64))
            }
        });
        Self::new(self.dim, terms).expect("derivative terms are well formed")
    }

    /// Gradient as a vector of polynomials, component `j` is `∂P/∂ξ_j`.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|j| self.partial(j)).collect()
    }

    /// Hessian as a symmetric `d×d` matrix of polynomials.
    pub fn hessian(&self) -> Vec<Vec<Self>> {
        let grad = self.gradient();
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| grad[i].partial(j)).collect())
            .collect()
    }

    /// Leading homogeneous part `Q_q` (terms of total degree `q`).
    pub fn leading_form(&self) -> Self {
        let q = self.degree;
        let terms = self
            .terms
            .iter()
            .filter(|(a, _)| a.iter().sum::<u32>() == q)
            .map(|(a, c)| (a.clone(), *c));
        Self::new(self.dim, terms).expect("leading form is well formed")
    }
}

/// Numeric ellipticity certificate: the leading form sampled on S^{d−1}.
///
/// A real polynomial of degree `q` is elliptic iff its leading homogeneous
/// form never vanishes on the unit sphere; the certificate records the
/// smallest sampled `|Q_q(ω)|` and where it occurred.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EllipticityCertificate {
    pub is_elliptic: bool,
    pub min_leading_form: f64,
    pub sample_count: usize,
    pub worst_direction: Vec<f64>,
}

pub const ELLIPTICITY_TOL: f64 = 1e-9;

/// Default sphere-sample budget: 10⁴ structured directions for d ≤ 3,
/// 10⁵ random directions for d = 4 and above.
pub fn default_ellipticity_samples(dim: usize) -> usize {
    if dim <= 3 {
        10_000
    } else {
        100_000
    }
}

/// Samples `|Q_q|` over `n_samples` unit directions; elliptic iff the
/// minimum exceeds [`ELLIPTICITY_TOL`]. `n_samples = 0` picks the default
/// budget for the dimension. The verdict is carried in the certificate, not
/// an error.
pub fn check_ellipticity(p: &MultiPoly, n_samples: usize) -> EllipticityCertificate {
    let dim = p.dim();
    let n = if n_samples == 0 {
        default_ellipticity_samples(dim)
    } else {
        n_samples
    };
    let lead = p.leading_form();
    let mut min_v = f64::INFINITY;
    let mut worst = vec![0.0; dim];
    let mut count = 0usize;
    let mut visit = |omega: &[f64]| {
        let v = libm::fabs(lead.eval_real(omega));
        if v < min_v {
            min_v = v;
            worst = omega.to_vec();
        }
    };
    match dim {
        1 => {
            visit(&[1.0]);
            visit(&[-1.0]);
            count = 2;
        }
        2 => {
            let g = DirectionGrid::circle(n);
            for i in 0..g.len() {
                visit(g.point(i));
            }
            count = n;
        }
        3 => {
            let g = DirectionGrid::fibonacci_sphere(n);
            for i in 0..g.len() {
                visit(g.point(i));
            }
            count = n;
        }
        _ => {
            // Fixed internal seed: the certificate must not depend on caller state.
            let mut draw = Draw::new(0x5ca1ab1e);
            for _ in 0..n {
                let omega = draw.unit_vector(dim);
                visit(&omega);
                count += 1;
            }
        }
    }
    if p.is_zero() || p.degree() == 0 {
        min_v = 0.0;
    }
    EllipticityCertificate {
        is_elliptic: min_v > ELLIPTICITY_TOL,
        min_leading_form: min_v,
        sample_count: count,
        worst_direction: worst,
    }
}

/// Univariate model `G` with `Q(ξ) = G(ξ·ξ)` for rotation-invariant `Q`.
///
/// `g_coeffs[k]` is the coefficient of `w^k`; `degree(G) = q/2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RotInvModel {
    pub g_coeffs: Vec<f64>,
    pub residual: f64,
}

impl RotInvModel {
    pub fn degree(&self) -> usize {
        self.g_coeffs.len().saturating_sub(1)
    }

    pub fn eval_g(&self, w: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for &c in self.g_coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    pub fn g_prime(&self) -> Vec<f64> {
        self.g_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect()
    }

    pub fn eval_g_prime(&self, w: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for &c in self.g_prime().iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    /// Reconstructs `Q(ξ) = G(ξ·ξ)` in `dim` variables.
    pub fn to_poly(&self, dim: usize) -> MultiPoly {
        let mut acc = MultiPoly::constant(dim, 0.0);
        for (k, &c) in self.g_coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let pk = MultiPoly::laplacian_power(dim, k as u32);
            let scaled = MultiPoly::new(dim, pk.terms().map(|(a, v)| (a.clone(), v * c)))
                .expect("scaling keeps terms well formed");
            acc = add(&acc, &scaled);
        }
        acc
    }
}

pub const ROTINV_TOL: f64 = 1e-12;

/// Exact coefficient matching of `Q` against span{(ξ·ξ)^k, k ≤ q/2}.
///
/// Returns the model when the least-squares fit leaves every monomial
/// coefficient matched to within [`ROTINV_TOL`]; odd degree or any misfit
/// returns `None` rather than an approximate model.
pub fn detect_rotation_invariance(p: &MultiPoly) -> Option<RotInvModel> {
    let q = p.degree();
    if q % 2 != 0 {
        return None;
    }
    let m = (q / 2) as usize;
    let dim = p.dim();
    // Rows: union of Q's monomials and every monomial of each (ξ·ξ)^k.
    let mut rows: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let expansions: Vec<MultiPoly> = (0..=m)
        .map(|k| MultiPoly::laplacian_power(dim, k as u32))
        .collect();
    for (alpha, _) in p.terms() {
        let next = rows.len();
        rows.entry(alpha.clone()).or_insert(next);
    }
    for e in &expansions {
        for (alpha, _) in e.terms() {
            let next = rows.len();
            rows.entry(alpha.clone()).or_insert(next);
        }
    }
    let nrows = rows.len();
    let mut a = DMatrix::zeros(nrows, m + 1);
    let mut b = DVector::zeros(nrows);
    for (alpha, &row) in &rows {
        b[row] = p.coeff(alpha);
        for (k, e) in expansions.iter().enumerate() {
            a[(row, k)] = e.coeff(alpha);
        }
    }
    let g = linalg::lstsq_solve(&a, &b)?;
    let fit = &a * &g;
    let mut residual = 0.0f64;
    for i in 0..nrows {
        residual = residual.max(libm::fabs(fit[i] - b[i]));
    }
    if residual > ROTINV_TOL {
        return None;
    }
    let mut g_coeffs: Vec<f64> = g.iter().copied().collect();
    // Snap least-squares dust so structurally-zero coefficients stay zero.
    let gmax = g_coeffs.iter().fold(0.0f64, |m, c| m.max(libm::fabs(*c)));
    for c in g_coeffs.iter_mut() {
        if libm::fabs(*c) <= 1e-13 * gmax {
            *c = 0.0;
        }
    }
    while g_coeffs.len() > 1 && libm::fabs(*g_coeffs.last().unwrap()) <= ROTINV_TOL {
        g_coeffs.pop();
    }
    Some(RotInvModel { g_coeffs, residual })
}

fn add(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    assert_eq!(a.dim(), b.dim());
    MultiPoly::new(
        a.dim(),
        a.terms()
            .map(|(al, c)| (al.clone(), c))
            .chain(b.terms().map(|(al, c)| (al.clone(), c))),
    )
    .expect("sum of well-formed polynomials")
}

fn power_table(z: &[C], max_deg: u32) -> Vec<Vec<C>> {
    z.iter()
        .map(|&zj| {
            let mut row = Vec::with_capacity(max_deg as usize + 1);
            row.push(C::new(1.0, 0.0));
            for k in 1..=max_deg as usize {
                let prev = row[k - 1];
                row.push(prev * zj);
            }
            row
        })
        .collect()
}

/// Weak compositions of `k` into `d` parts.
fn compositions(k: u32, d: usize) -> Vec<Vec<u32>> {
    if d == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in compositions(k - first, d - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn multinomial(k: u32, beta: &[u32]) -> f64 {
    let fact = |n: u32| (1..=n).map(|i| i as f64).product::<f64>().max(1.0);
    let mut denom = 1.0;
    for &b in beta {
        denom *= fact(b);
    }
    fact(k) / denom
}

/// Human-readable rendering used by error messages and the CLI.
pub fn format_poly(p: &MultiPoly) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    let mut first = true;
    for (alpha, c) in p.terms() {
        if !first {
            let _ = write!(s, " + ");
        }
        first = false;
        let _ = write!(s, "{c}");
        for (j, &a) in alpha.iter().enumerate() {
            if a > 0 {
                let _ = write!(s, "*x{}^{}", j + 1, a);
            }
        }
    }
    if first {
        let _ = write!(s, "0");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wedge::WedgeModel;
    use approx::assert_abs_diff_eq;

    fn ci(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn eval_zero_point_and_imaginary_direction() {
        let q = MultiPoly::laplacian_power(3, 1);
        let zero = ComplexPoint::real(vec![0.0; 3]);
        assert_eq!(q.eval(&zero).unwrap(), ci(0.0, 0.0));

        // z = iω with |ω| = 1: (iω)·(iω) = −1 under the ξ·ξ extension.
        let omega = [0.6, 0.8, 0.0];
        let z = ComplexPoint::new(vec![0.0; 3], omega.to_vec()).unwrap();
        let v = q.eval(&z).unwrap();
        assert_abs_diff_eq!(v.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn eval_wedge_operator_on_imaginary_axis() {
        // Q = |ξ|⁴ + 2εξ_d + ε²ξ_d² at z = iσ e_d gives σ⁴ − ε²σ² + 2iεσ.
        let eps = 0.3;
        let q = WedgeModel::new(2, eps).unwrap().operator();
        for &sigma in &[0.25, 0.7, 1.3] {
            let z = ComplexPoint::new(vec![0.0, 0.0], vec![0.0, sigma]).unwrap();
            let v = q.eval(&z).unwrap();
            let expect = ci(
                sigma * sigma * sigma * sigma - eps * eps * sigma * sigma,
                2.0 * eps * sigma,
            );
            assert_abs_diff_eq!(v.re, expect.re, epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, expect.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_basics() {
        let q = MultiPoly::laplacian_power(3, 1);
        let grad = q.gradient();
        for (j, g) in grad.iter().enumerate() {
            let mut alpha = vec![0u32; 3];
            alpha[j] = 1;
            assert_eq!(g.coeff(&alpha), 2.0);
            assert_eq!(g.terms().count(), 1);
        }
        let c = MultiPoly::constant(2, 5.0);
        assert!(c.gradient().iter().all(|g| g.is_zero()));
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let q = WedgeModel::new(3, 0.27).unwrap().operator();
        let grad = q.gradient();
        let hess = q.hessian();
        let mut draw = Draw::new(7);
        let h = 1e-5;
        for _ in 0..10 {
            let x: Vec<f64> = (0..3).map(|_| draw.symmetric(1.5)).collect();
            for j in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fd = (q.eval_real(&xp) - q.eval_real(&xm)) / (2.0 * h);
                let g = grad[j].eval_real(&x);
                let scale = 1.0 + libm::fabs(g);
                assert!((fd - g).abs() / scale < 1e-6, "gradient fd mismatch");
                for k in 0..3 {
                    let fdh = (grad[k].eval_real(&xp) - grad[k].eval_real(&xm)) / (2.0 * h);
                    let hv = hess[k][j].eval_real(&x);
                    let scale = 1.0 + libm::fabs(hv);
                    assert!((fdh - hv).abs() / scale < 1e-6, "hessian fd mismatch");
                }
            }
        }
    }

    #[test]
    fn hessian_symmetry_and_simple_cases() {
        let q = MultiPoly::laplacian_power(2, 1);
        let h = q.hessian();
        assert_eq!(h[0][0].coeff(&[0, 0]), 2.0);
        assert_eq!(h[1][1].coeff(&[0, 0]), 2.0);
        assert!(h[0][1].is_zero());

        let xy = MultiPoly::new(2, [(vec![1, 1], 1.0)]).unwrap();
        let h = xy.hessian();
        assert!(h[0][0].is_zero());
        assert_eq!(h[0][1].coeff(&[0, 0]), 1.0);
        assert_eq!(h[1][0].coeff(&[0, 0]), 1.0);
    }

    #[test]
    fn wedge_hessian_on_imaginary_axis() {
        // H = −4σ²I + (2ε² − 8σ²) e_d e_dᵀ at z = iσ e_d.
        let eps = 0.31;
        let sigma = 0.65;
        let q = WedgeModel::new(2, eps).unwrap().operator();
        let hess = q.hessian();
        let z = [ci(0.0, 0.0), ci(0.0, sigma)];
        let h00 = hess[0][0].eval_complex(&z);
        let h11 = hess[1][1].eval_complex(&z);
        let h01 = hess[0][1].eval_complex(&z);
        assert_abs_diff_eq!(h00.re, -4.0 * sigma * sigma, epsilon = 1e-12);
        assert_abs_diff_eq!(h00.im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            h11.re,
            -12.0 * sigma * sigma + 2.0 * eps * eps,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(h01.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ellipticity_verdicts() {
        let q = add(
            &MultiPoly::laplacian_power(2, 2),
            &MultiPoly::new(2, [(vec![1, 0], 0.5)]).unwrap(),
        );
        let cert = check_ellipticity(&q, 2000);
        assert!(cert.is_elliptic);
        assert_abs_diff_eq!(cert.min_leading_form, 1.0, epsilon = 1e-12);

        let hyp = MultiPoly::new(2, [(vec![2, 0], 1.0), (vec![0, 2], -1.0)]).unwrap();
        let cert = check_ellipticity(&hyp, 2000);
        assert!(!cert.is_elliptic);

        let wedge = WedgeModel::new(2, 0.2373).unwrap().operator();
        let cert = check_ellipticity(&wedge, 2000);
        assert!(cert.is_elliptic);
        assert_abs_diff_eq!(cert.min_leading_form, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_invariance_detection() {
        let q = MultiPoly::laplacian_power(3, 1);
        let model = detect_rotation_invariance(&q).unwrap();
        assert_eq!(model.g_coeffs.len(), 2);
        assert_abs_diff_eq!(model.g_coeffs[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.g_coeffs[1], 1.0, epsilon = 1e-12);

        // |ξ|⁴ + 3|ξ|² → G(w) = w² + 3w.
        let q = add(
            &MultiPoly::laplacian_power(2, 2),
            &MultiPoly::new(
                2,
                MultiPoly::laplacian_power(2, 1)
                    .terms()
                    .map(|(a, c)| (a.clone(), 3.0 * c))
                    .collect::<Vec<_>>(),
            )
            .unwrap(),
        );
        let model = detect_rotation_invariance(&q).unwrap();
        assert_eq!(model.g_coeffs.len(), 3);
        assert_abs_diff_eq!(model.g_coeffs[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.g_coeffs[2], 1.0, epsilon = 1e-12);

        // The odd ξ_d term breaks invariance.
        let wedge = WedgeModel::new(2, 0.2).unwrap().operator();
        assert!(detect_rotation_invariance(&wedge).is_none());
    }

    #[test]
    fn rotation_invariance_round_trip() {
        let mut draw = Draw::new(41);
        for _ in 0..25 {
            let deg = 1 + (draw.unit() * 4.0) as usize;
            let mut coeffs: Vec<f64> = (0..=deg).map(|_| draw.symmetric(3.0)).collect();
            if libm::fabs(coeffs[deg]) < 0.1 {
                coeffs[deg] = 1.0;
            }
            let model = RotInvModel {
                g_coeffs: coeffs.clone(),
                residual: 0.0,
            };
            let q = model.to_poly(3);
            let detected = detect_rotation_invariance(&q).expect("round trip detects the model");
            assert_eq!(detected.g_coeffs.len(), coeffs.len());
            for (a, b) in detected.g_coeffs.iter().zip(&coeffs) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn conjugation_symmetry_property() {
        let mut draw = Draw::new(99);
        for _ in 0..100 {
            let dim = 1 + (draw.unit() * 3.0) as usize;
            let nterms = 1 + (draw.unit() * 6.0) as usize;
            let terms: Vec<(Vec<u32>, f64)> = (0..nterms)
                .map(|_| {
                    let alpha: Vec<u32> = (0..dim).map(|_| (draw.unit() * 4.0) as u32).collect();
                    (alpha, draw.symmetric(2.0))
                })
                .collect();
            let p = MultiPoly::new(dim, terms).unwrap();
            let re: Vec<f64> = (0..dim).map(|_| draw.symmetric(2.0)).collect();
            let im: Vec<f64> = (0..dim).map(|_| draw.symmetric(2.0)).collect();
            let z = ComplexPoint::new(re, im).unwrap();
            let v = p.eval(&z).unwrap();
            let vc = p.eval(&z.conj()).unwrap();
            assert_abs_diff_eq!(v.re, vc.re, epsilon = 1e-12 * (1.0 + v.norm()));
            assert_abs_diff_eq!(v.im, -vc.im, epsilon = 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn euler_identity_on_leading_form() {
        let q = WedgeModel::new(3, 0.3).unwrap().operator();
        let lead = q.leading_form();
        let grad = lead.gradient();
        let deg = lead.degree() as f64;
        let mut draw = Draw::new(5);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| draw.symmetric(1.5)).collect();
            let lhs: f64 = (0..3).map(|j| x[j] * grad[j].eval_real(&x)).sum();
            let rhs = deg * lead.eval_real(&x);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10 * (1.0 + libm::fabs(rhs)));
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let q = MultiPoly::laplacian_power(2, 1);
        let z = ComplexPoint::real(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            q.eval(&z),
            Err(PolyError::DimensionMismatch { expected: 2, got: 3 })
        ));
    }
}
