//! Closed-form reference for the quartic example `Q(ξ) = |ξ|⁴ + 2εξ_d + ε²ξ_d²`
//! at λ = −1, the oracle the solver and geometry modules are validated
//! against.
//!
//! With `2λ₀² = (ε/2)² + √(1 + (ε/2)⁴)`, λ₀ > 0, the per-direction system has
//! (away from ω_d = 0) exactly the rates
//!
//! ```text
//!     σ(ω) = ±(ε/2)ω_d + √(λ₀² − ε²(1−ω_d²)/4)
//! ```
//!
//! which combine into four continuous candidate boundaries: the two smooth
//! spheres of radius λ₀ centered at ±(ε/2)e_d (cases 1 and 2), their inner
//! envelope with a wedge at ω_d = 0 (case 3, the lens), and the outer
//! envelope (case 4), which bounds no convex set and must be rejected. At
//! ω_d = 0 an extra family σ = 1/ε (d = 2; any σ ≥ 1/ε for d ≥ 3) comes from
//! critical points of `Q` with value λ = −1.
//!
//! The lens has support function `σ_s(ω) = λ₀ − (ε/2)|ω_d|` outside the
//! wedge region `|ω_d| ≤ ε/(2λ₀) = sin ψ` and
//! `σ_s(ω) = (1−ω_d²)^{1/2}√(λ₀² − ε²/4)` inside it, while the reference
//! conical rate stays at `λ₀ − (ε/2)|ω_d|` throughout — strictly above σ_s
//! inside the wedge. π − 2ψ is the wedge apex angle.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex;

use crate::grid::DirectionGrid;
use crate::geom::DecayProfile;
use crate::poly::MultiPoly;
use crate::rng::Draw;

type C = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum WedgeError {
    EpsOutOfRange { eps: f64 },
    RatioOutOfRange { ratio: f64 },
    DimTooSmall { dim: usize },
    NegativeDiscriminant { omega_d: f64 },
}

impl fmt::Display for WedgeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WedgeError::EpsOutOfRange { eps } => write!(f, "eps = {eps} outside (0, 1/2)"),
            WedgeError::RatioOutOfRange { ratio } => {
                write!(f, "ratio 2λ0/ε = {ratio} not attainable for eps in (0, 1/2)")
            }
            WedgeError::DimTooSmall { dim } => write!(f, "dimension {dim} < 2"),
            WedgeError::NegativeDiscriminant { omega_d } => {
                write!(f, "negative discriminant at ω_d = {omega_d}")
            }
        }
    }
}

impl core::error::Error for WedgeError {}

/// The four continuous candidate boundaries σ(ω).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BranchCase {
    /// `+(ε/2)ω_d + √·` — sphere centered at +(ε/2)e_d.
    Case1,
    /// `−(ε/2)ω_d + √·` — sphere centered at −(ε/2)e_d.
    Case2,
    /// `−(ε/2)|ω_d| + √·` — the lens (inner envelope), wedge at ω_d = 0.
    Case3,
    /// `+(ε/2)|ω_d| + √·` — outer envelope, not a convex boundary.
    Case4,
}

impl BranchCase {
    pub const ALL: [BranchCase; 4] = [
        BranchCase::Case1,
        BranchCase::Case2,
        BranchCase::Case3,
        BranchCase::Case4,
    ];

    pub fn index(self) -> usize {
        match self {
            BranchCase::Case1 => 1,
            BranchCase::Case2 => 2,
            BranchCase::Case3 => 3,
            BranchCase::Case4 => 4,
        }
    }
}

/// Reference σ_loc/σ_s formulas for the three eigenfunction families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RefCase {
    /// Smooth family with σ_loc = σ_s = λ₀ − (ε/2)ω_d.
    A,
    /// Smooth family with σ_loc = σ_s = λ₀ + (ε/2)ω_d.
    B,
    /// Lens family: σ_loc = λ₀ − (ε/2)|ω_d| (strictly above σ_s in the wedge).
    C,
}

/// Parameters of the example: ε ∈ (0, 1/2), λ₀ the positive root of
/// `2λ₀² = (ε/2)² + √(1 + (ε/2)⁴)`, dimension ≥ 2.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WedgeModel {
    pub eps: f64,
    pub lambda0: f64,
    pub dim: usize,
}

/// λ₀ in closed form (explicit radical).
pub fn lambda0(eps: f64) -> f64 {
    let t = eps / 2.0;
    libm::sqrt((t * t + libm::sqrt(1.0 + t * t * t * t)) / 2.0)
}

impl WedgeModel {
    pub fn new(dim: usize, eps: f64) -> Result<Self, WedgeError> {
        if dim < 2 {
            return Err(WedgeError::DimTooSmall { dim });
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(WedgeError::EpsOutOfRange { eps });
        }
        Ok(Self {
            eps,
            lambda0: lambda0(eps),
            dim,
        })
    }

    /// Builds the model from the ratio `r = 2λ₀/ε`, solving
    /// `ε⁴ = 16/((2r² − 1)² − 1)` in closed form. `r = 6` gives
    /// `ε = (1/315)^{1/4}`.
    pub fn from_ratio(dim: usize, ratio: f64) -> Result<Self, WedgeError> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(WedgeError::RatioOutOfRange { ratio });
        }
        let s = 2.0 * ratio * ratio - 1.0;
        let denom = s * s - 1.0;
        if denom <= 0.0 {
            return Err(WedgeError::RatioOutOfRange { ratio });
        }
        let eps = libm::pow(16.0 / denom, 0.25);
        if !(eps > 0.0 && eps < 0.5) {
            return Err(WedgeError::RatioOutOfRange { ratio });
        }
        Self::new(dim, eps)
    }

    /// The operator symbol `|ξ|⁴ + 2εξ_d + ε²ξ_d²`.
    pub fn operator(&self) -> MultiPoly {
        let d = self.dim;
        let mut terms: Vec<(Vec<u32>, f64)> = MultiPoly::laplacian_power(d, 2)
            .terms()
            .map(|(a, c)| (a.clone(), c))
            .collect();
        let mut lin = vec![0u32; d];
        lin[d - 1] = 1;
        terms.push((lin, 2.0 * self.eps));
        let mut quad = vec![0u32; d];
        quad[d - 1] = 2;
        terms.push((quad, self.eps * self.eps));
        MultiPoly::new(d, terms).expect("wedge operator is well formed")
    }

    /// Residual of the defining equation `2λ₀² − (ε/2)² − √(1+(ε/2)⁴)`.
    pub fn lambda0_residual(&self) -> f64 {
        let t = self.eps / 2.0;
        2.0 * self.lambda0 * self.lambda0 - t * t - libm::sqrt(1.0 + t * t * t * t)
    }

    /// `sin ψ = ε/(2λ₀)`, the wedge half-angle of the lens; `π − 2ψ` is the
    /// apex angle.
    pub fn sin_psi(&self) -> f64 {
        self.eps / (2.0 * self.lambda0)
    }

    /// Candidate boundary value σ(ω) for one of the four cases.
    pub fn branch_sigma(&self, case: BranchCase, omega_d: f64) -> Result<f64, WedgeError> {
        if !(-1.0..=1.0).contains(&omega_d) {
            return Err(WedgeError::NegativeDiscriminant { omega_d });
        }
        let disc =
            self.lambda0 * self.lambda0 - self.eps * self.eps * (1.0 - omega_d * omega_d) / 4.0;
        if disc < 0.0 {
            // Cannot happen for ε < 1/2 (λ₀ > ε/2), kept as a guard.
            return Err(WedgeError::NegativeDiscriminant { omega_d });
        }
        let root = libm::sqrt(disc);
        let tilt = self.eps * omega_d / 2.0;
        let fold = self.eps * libm::fabs(omega_d) / 2.0;
        Ok(match case {
            BranchCase::Case1 => tilt + root,
            BranchCase::Case2 => -tilt + root,
            BranchCase::Case3 => -fold + root,
            BranchCase::Case4 => fold + root,
        })
    }

    /// Support function of the lens (case 3): `λ₀ − (ε/2)|ω_d|` outside the
    /// wedge region, `(1−ω_d²)^{1/2}√(λ₀²−ε²/4)` inside it; the two pieces
    /// agree at the breakpoint `|ω_d| = ε/(2λ₀)`.
    pub fn sigma_s_case_c(&self, omega_d: f64) -> f64 {
        let t = libm::fabs(omega_d);
        if t > self.sin_psi() {
            self.lambda0 - self.eps * t / 2.0
        } else {
            libm::sqrt(1.0 - omega_d * omega_d)
                * libm::sqrt(self.lambda0 * self.lambda0 - self.eps * self.eps / 4.0)
        }
    }

    /// Reference conical decay rate σ_loc for the three families.
    pub fn sigma_loc_reference(&self, case: RefCase, omega_d: f64) -> f64 {
        match case {
            RefCase::A => self.lambda0 - self.eps * omega_d / 2.0,
            RefCase::B => self.lambda0 + self.eps * omega_d / 2.0,
            RefCase::C => self.lambda0 - self.eps * libm::fabs(omega_d) / 2.0,
        }
    }

    /// Max residual of `Q(ξ) + 1 = (ξ·ξ + i(1+εξ_d))(ξ·ξ − i(1+εξ_d))` over
    /// `n_samples` random complex points with |z_j| ≤ 3, evaluated with the
    /// polynomial extension.
    pub fn factorization_residual(&self, n_samples: usize, seed: u64) -> f64 {
        let q = self.operator();
        let d = self.dim;
        let mut draw = Draw::new(seed);
        let mut worst = 0.0f64;
        for _ in 0..n_samples {
            let z: Vec<C> = (0..d)
                .map(|_| C::new(draw.symmetric(3.0 / 1.5), draw.symmetric(3.0 / 1.5)))
                .collect();
            let zz: C = z.iter().map(|v| v * v).sum();
            let fac = C::new(0.0, 1.0) * (C::new(1.0, 0.0) + self.eps * z[d - 1]);
            let rhs = (zz + fac) * (zz - fac);
            let lhs = q.eval_complex(&z) + 1.0;
            worst = worst.max((lhs - rhs).norm());
        }
        worst
    }

    /// Empirical minimum of `Q` over random real points; the crude lower
    /// bound is `Q(ξ) ≥ −2ε^{4/3}`.
    pub fn empirical_min(&self, n_samples: usize, seed: u64) -> f64 {
        let q = self.operator();
        let mut draw = Draw::new(seed);
        let mut min_v = f64::INFINITY;
        let mut x = vec![0.0; self.dim];
        for _ in 0..n_samples {
            for v in x.iter_mut() {
                *v = draw.symmetric(2.0);
            }
            min_v = min_v.min(q.eval_real(&x));
        }
        min_v
    }

    pub fn crude_lower_bound(&self) -> f64 {
        -2.0 * libm::pow(self.eps, 4.0 / 3.0)
    }

    /// Samples a branch case into a profile on `grid` (d = 2; ω_d is the
    /// second coordinate).
    pub fn closed_profile(&self, case: BranchCase, grid: &DirectionGrid) -> DecayProfile {
        assert_eq!(grid.dim(), 2, "closed-form profiles are d = 2");
        let sigmas: Vec<f64> = (0..grid.len())
            .map(|i| {
                self.branch_sigma(case, grid.point(i)[1])
                    .expect("discriminant is positive for eps < 1/2")
            })
            .collect();
        DecayProfile::new(
            grid.clone(),
            sigmas,
            alloc::format!("case{}", case.index()),
        )
        .expect("closed-form profile is positive and finite")
    }
}

/// Closed-form stationary-solution data for the smooth branches:
/// `(ξ, η)` with `ξ = ±θ/(2λ₀)`, `η = ±λ₀θ ± (ε/2)e_d`.
///
/// Case 1 solves the factor `ξ·ξ − i(1+εξ_d)` branch: `ξ = θ/(2λ₀)`,
/// `η = λ₀θ + (ε/2)e_d`; case 2 the conjugate factor: `ξ = −θ/(2λ₀)`,
/// `η = λ₀θ − (ε/2)e_d`. Used as an independent oracle in tests.
pub fn closed_form_point(
    model: &WedgeModel,
    case: BranchCase,
    theta: &[f64],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let d = model.dim;
    let l0 = model.lambda0;
    let (xi_sign, shift) = match case {
        BranchCase::Case1 => (1.0, model.eps / 2.0),
        BranchCase::Case2 => (-1.0, -model.eps / 2.0),
        _ => return None,
    };
    let xi: Vec<f64> = theta.iter().map(|t| xi_sign * t / (2.0 * l0)).collect();
    let mut eta: Vec<f64> = theta.iter().map(|t| l0 * t).collect();
    eta[d - 1] += shift;
    Some((xi, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lambda0_limits_and_residual() {
        // ε → 0 degenerates to 2λ₀² = 1.
        assert_abs_diff_eq!(lambda0(1e-12), libm::sqrt(0.5), epsilon = 1e-9);
        for &eps in &[0.05, 0.1, 0.2373, 0.45] {
            let m = WedgeModel::new(2, eps).unwrap();
            assert!(libm::fabs(m.lambda0_residual()) < 1e-12);
        }
    }

    #[test]
    fn ratio_six_gives_known_eps() {
        let m = WedgeModel::from_ratio(2, 6.0).unwrap();
        assert_abs_diff_eq!(m.eps, libm::pow(1.0 / 315.0, 0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(2.0 * m.lambda0 / m.eps, 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.sin_psi(), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn eps_range_is_enforced() {
        assert!(WedgeModel::new(2, 0.0).is_err());
        assert!(WedgeModel::new(2, 0.5).is_err());
        assert!(WedgeModel::new(1, 0.2).is_err());
    }

    #[test]
    fn branch_values_at_poles_and_equator() {
        let m = WedgeModel::from_ratio(2, 6.0).unwrap();
        let l0 = m.lambda0;
        let e2 = m.eps / 2.0;
        assert_abs_diff_eq!(
            m.branch_sigma(BranchCase::Case1, 1.0).unwrap(),
            l0 + e2,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            m.branch_sigma(BranchCase::Case3, 0.0).unwrap(),
            libm::sqrt(l0 * l0 - e2 * e2),
            epsilon = 1e-14
        );
        // Cases 3 and 4 agree at the equator; at the poles they reproduce the
        // case-2/case-1 values respectively.
        assert_abs_diff_eq!(
            m.branch_sigma(BranchCase::Case4, 0.0).unwrap(),
            m.branch_sigma(BranchCase::Case3, 0.0).unwrap(),
            epsilon = 1e-14
        );
        for &w in &[1.0, -1.0] {
            assert_abs_diff_eq!(
                m.branch_sigma(BranchCase::Case3, w).unwrap(),
                m.branch_sigma(BranchCase::Case2, libm::fabs(w)).unwrap(),
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                m.branch_sigma(BranchCase::Case4, w).unwrap(),
                m.branch_sigma(BranchCase::Case1, libm::fabs(w)).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn support_pieces_agree_at_breakpoint() {
        let m = WedgeModel::from_ratio(2, 6.0).unwrap();
        let b = m.sin_psi();
        let outside = m.lambda0 - m.eps * b / 2.0;
        let inside = libm::sqrt(1.0 - b * b)
            * libm::sqrt(m.lambda0 * m.lambda0 - m.eps * m.eps / 4.0);
        assert_abs_diff_eq!(outside, inside, epsilon = 1e-12);
        assert_abs_diff_eq!(m.sigma_s_case_c(1.0), m.lambda0 - m.eps / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            m.sigma_s_case_c(0.0),
            libm::sqrt(m.lambda0 * m.lambda0 - m.eps * m.eps / 4.0),
            epsilon = 1e-14
        );
    }

    #[test]
    fn sigma_loc_reference_values() {
        let m = WedgeModel::from_ratio(2, 6.0).unwrap();
        assert_abs_diff_eq!(
            m.sigma_loc_reference(RefCase::A, -1.0),
            m.lambda0 + m.eps / 2.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(m.sigma_loc_reference(RefCase::B, 0.0), m.lambda0, epsilon = 1e-14);
        // Strict gap over the support function at the wedge.
        let gap = m.sigma_loc_reference(RefCase::C, 0.0) - m.sigma_s_case_c(0.0);
        assert!(gap > 0.0);
    }

    #[test]
    fn factorization_residual_small() {
        let m = WedgeModel::from_ratio(2, 6.0).unwrap();
        assert!(m.factorization_residual(200, 3) < 1e-12);
        let m3 = WedgeModel::new(3, 0.3).unwrap();
        assert!(m3.factorization_residual(200, 4) < 1e-12);
    }

    #[test]
    fn closed_form_points_solve_the_system() {
        let m = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = m.operator();
        let grad = q.gradient();
        for case in [BranchCase::Case1, BranchCase::Case2] {
            for theta in [[0.0, 1.0], [0.6, 0.8], [1.0, 0.0], [-0.28, 0.96]] {
                let (xi, eta) = closed_form_point(&m, case, &theta).unwrap();
                let z: Vec<C> = xi
                    .iter()
                    .zip(&eta)
                    .map(|(&r, &i)| C::new(r, i))
                    .collect();
                let val = q.eval_complex(&z);
                assert_abs_diff_eq!(val.re, -1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(val.im, 0.0, epsilon = 1e-12);
                // Gradient parallel to θ: t-component ratios agree.
                let g: Vec<C> = grad.iter().map(|p| p.eval_complex(&z)).collect();
                let cross = g[0] * theta[1] - g[1] * theta[0];
                assert!(cross.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn extra_family_stays_above_branches() {
        // min over cases of σ(0) = √(λ₀²−ε²/4) < 1/ε throughout (0, 1/2).
        for i in 1..50 {
            let eps = 0.01 * i as f64;
            let m = WedgeModel::new(2, eps).unwrap();
            let min_sigma = m.branch_sigma(BranchCase::Case3, 0.0).unwrap();
            assert!(min_sigma < 1.0 / eps);
        }
    }
}
