//! Candidate directional exponential decay rates of L² eigenfunctions of
//! elliptic operators `Q(p) + V`.
//!
//! For a real elliptic polynomial symbol `Q` of degree `q` on ℝ^d and a real
//! eigenvalue `λ`, the decay rate `σ(ω)` of an eigenfunction in direction `ω`
//! is constrained algebraically: the boundary points `η = σω` of the convex
//! decay set `E = {η : e^{η·x}φ ∈ L²}` must come from solutions of the
//! stationarity system
//!
//! ```text
//!     Q(ξ + iη) = λ,        ∇Q(ξ + iη) = βθ
//! ```
//!
//! with `ξ ∈ ℝ^d`, `β ∈ ℂ` and `θ` a unit normal of a supporting hyperplane,
//! where `Q` is extended to complex arguments as a polynomial (so `|ξ|²`
//! extends to `ξ·ξ = Σ ξ_j²`, never to a modulus).
//!
//! This crate computes those candidates at desk scale:
//!
//! * [`poly`] — sparse multivariate polynomials, complex evaluation,
//!   differentiation, ellipticity certificates, rotation-invariance detection;
//! * [`solve`] — multistart damped-Newton solvers for the per-direction,
//!   global, rotation-invariant-reduced, one-dimensional, and critical-point
//!   systems, plus direction sweeps for continuation;
//! * [`grid`] — direction grids on S^{d−1} (uniform circle, Fibonacci sphere);
//! * [`geom`] — sampled decay profiles `σ(ω)`, support functions, and the
//!   convexity / Lipschitz / ball-containment / singular-point predicates a
//!   genuine decay boundary must satisfy;
//! * [`branch`] — linking per-direction solution clouds into continuous
//!   candidate profiles and filtering them by admissibility;
//! * [`wedge`] — the closed-form quartic example `|ξ|⁴ + 2εξ_d + ε²ξ_d²`
//!   (λ = −1) used as an oracle, whose admissible boundary develops a wedge;
//! * [`smooth`] — regularity certificates: `Q''` conditioning, the
//!   nondegeneracy scalar, the branch derivative `h'(θ)`, and the kernel
//!   condition for local smoothness of `σ(ω)`.
//!
//! The crate is `no_std` (with `alloc`); all operations are pure and
//! deterministic for a fixed seed. IO, file formats and the command-line
//! front end live in the companion `eigendecay` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod branch;
pub mod geom;
pub mod grid;
mod linalg;
pub mod poly;
mod rng;
pub mod smooth;
pub mod solve;
pub mod wedge;

pub use branch::{assemble, filter_admissible, global_rate_candidates, AssemblyOptions, BranchSet};
pub use geom::{AdmissibilityReport, DecayProfile, SigmaLocClass, SingularPoint};
pub use grid::DirectionGrid;
pub use poly::{
    check_ellipticity, detect_rotation_invariance, ComplexPoint, EllipticityCertificate,
    MultiPoly, PolyError, RotInvModel,
};
pub use smooth::{h_prime, kernel_condition, regularity_check, RegularityReport, TangentMap};
pub use solve::{
    find_critical_values, solve_1d, solve_for_direction, solve_global_system,
    solve_rotation_invariant, sweep_directions, CriticalValueSet, DirectionCloud, SolveError,
    SolveOptions, StationarySolution,
};
pub use wedge::{BranchCase, RefCase, WedgeModel};
