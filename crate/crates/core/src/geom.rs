//! Sampled decay profiles σ(ω) and the predicates a genuine decay boundary
//! must satisfy.
//!
//! The decay set `E = {η : e^{η·x}φ ∈ L²}` of a function with global rate
//! σ_g ∈ (0, ∞) is convex, contains the ball of radius σ_g, has boundary
//! `{σ(ω)ω}`, and `1/σ(ω)` is Lipschitz with constant `1/σ_g`. A sampled
//! candidate profile is admissible only if the discrete versions of those
//! facts hold. Boundary points with more than one supporting hyperplane are
//! singular (wedges); only directions supported at some regular point carry
//! the certificate `σ_loc = σ_s`.
//!
//! Geometric predicates carry mesh tolerances, documented per predicate;
//! each is stated on the sampled polygon/point set, not the continuum.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::DirectionGrid;
use crate::linalg;

/// Default threshold on the background-corrected normal jump below which a
/// vertex is indistinguishable from discretization (radians).
pub const DEFAULT_SINGULAR_THRESHOLD: f64 = 0.02;

/// Slack on the discrete Lipschitz ratio: the inequality is exact on samples
/// of a true profile, solver noise only enters at the residual level.
const LIPSCHITZ_SLACK: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum GeomError {
    UnsupportedDimension { dim: usize, what: &'static str },
    LengthMismatch { points: usize, sigmas: usize },
    NonPositiveSigma { index: usize, value: f64 },
    NotFinite,
    TooFewPoints { len: usize },
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::UnsupportedDimension { dim, what } => {
                write!(f, "{what} is not supported in dimension {dim}")
            }
            GeomError::LengthMismatch { points, sigmas } => {
                write!(f, "grid has {points} directions but {sigmas} sigma values")
            }
            GeomError::NonPositiveSigma { index, value } => {
                write!(f, "sigma[{index}] = {value} is not positive")
            }
            GeomError::NotFinite => write!(f, "predicate requires a finite profile"),
            GeomError::TooFewPoints { len } => write!(f, "profile has only {len} points"),
        }
    }
}

impl core::error::Error for GeomError {}

/// Sampled candidate boundary σ(ω) over a direction grid.
///
/// σ values are positive and may be `f64::INFINITY` (no finite candidate in
/// that direction). Boundary points are `η_i = σ_i ω_i`. For d = 2 the grid
/// must be in increasing-angle order ([`DirectionGrid::circle`] is).
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    grid: DirectionGrid,
    sigmas: Vec<f64>,
    label: String,
}

impl DecayProfile {
    pub fn new(grid: DirectionGrid, sigmas: Vec<f64>, label: String) -> Result<Self, GeomError> {
        if grid.len() != sigmas.len() {
            return Err(GeomError::LengthMismatch {
                points: grid.len(),
                sigmas: sigmas.len(),
            });
        }
        for (i, &s) in sigmas.iter().enumerate() {
            if s.is_nan() || s <= 0.0 {
                return Err(GeomError::NonPositiveSigma { index: i, value: s });
            }
        }
        Ok(Self {
            grid,
            sigmas,
            label,
        })
    }

    /// Samples a closed-form σ(ω) onto a grid.
    pub fn from_fn(
        grid: DirectionGrid,
        f: impl Fn(&[f64]) -> f64,
        label: &str,
    ) -> Result<Self, GeomError> {
        let sigmas: Vec<f64> = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::new(grid, sigmas, String::from(label))
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: String) {
        self.label = label;
    }

    pub fn finite_everywhere(&self) -> bool {
        self.sigmas.iter().all(|s| s.is_finite())
    }

    /// `σ_g` of the sampled profile: the smallest finite σ.
    pub fn sigma_g(&self) -> f64 {
        self.sigmas
            .iter()
            .copied()
            .filter(|s| s.is_finite())
            .fold(f64::INFINITY, f64::min)
    }

    /// Boundary point `η_i = σ_i ω_i` (finite entries only make sense).
    pub fn boundary_point(&self, i: usize) -> Vec<f64> {
        linalg::scale(self.grid.point(i), self.sigmas[i])
    }

    /// Sampled support function `σ_s(θ) = max_i η_i·θ`.
    ///
    /// An infinite σ in a direction with positive component along `θ` makes
    /// the result infinite; infinite entries facing away are ignored.
    pub fn support(&self, theta: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let d = linalg::dot(self.grid.point(i), theta);
            if self.sigmas[i].is_finite() {
                best = best.max(self.sigmas[i] * d);
            } else if d > 0.0 {
                return f64::INFINITY;
            }
        }
        best
    }

    /// Largest chordal gap between neighboring boundary points; the length
    /// scale of every mesh tolerance below.
    pub fn mesh_gap(&self) -> f64 {
        let mut gap = 0.0f64;
        for i in 0..self.len() {
            if !self.sigmas[i].is_finite() {
                continue;
            }
            let pi = self.boundary_point(i);
            for &j in self.grid.neighbors(i) {
                if self.sigmas[j].is_finite() {
                    gap = gap.max(linalg::norm(&linalg::sub(&pi, &self.boundary_point(j))));
                }
            }
        }
        gap
    }

    /// Largest angular step between neighboring grid directions.
    fn mesh_angle(&self) -> f64 {
        let g = self.grid.max_neighbor_gap();
        2.0 * libm::asin((g / 2.0).min(1.0))
    }
}

/// One locally non-convex vertex: the signed turn (sine and radians) at it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvexityViolation {
    pub index: usize,
    pub sin_turn: f64,
    pub turn: f64,
}

/// Discrete convexity of the sampled boundary.
///
/// d = 2: all consecutive boundary-point triples must turn the same way;
/// the test thresholds the *normalized* turn (sine of the turning angle) at
/// `10 × (mesh angle)²` — an absolute cross-product tolerance would mask
/// genuine wedges at fine grids. d = 3: every boundary point must support
/// the hull along its neighbor-estimated outward normal, within
/// `10 × (mesh gap)²`.
pub fn check_convexity(p: &DecayProfile) -> Result<(bool, Vec<ConvexityViolation>), GeomError> {
    if !p.finite_everywhere() {
        return Err(GeomError::NotFinite);
    }
    match p.dim() {
        2 => check_convexity_2d(p),
        3 => check_convexity_3d(p),
        d => Err(GeomError::UnsupportedDimension {
            dim: d,
            what: "convexity check",
        }),
    }
}

fn check_convexity_2d(p: &DecayProfile) -> Result<(bool, Vec<ConvexityViolation>), GeomError> {
    let n = p.len();
    if n < 4 {
        return Err(GeomError::TooFewPoints { len: n });
    }
    let pts: Vec<Vec<f64>> = (0..n).map(|i| p.boundary_point(i)).collect();
    let mut area = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        area += pts[i][0] * pts[j][1] - pts[j][0] * pts[i][1];
    }
    let orient = if area >= 0.0 { 1.0 } else { -1.0 };
    let ma = p.mesh_angle();
    let tol = 10.0 * ma * ma;
    let mut violations = Vec::new();
    for i in 0..n {
        let a = &pts[(i + n - 1) % n];
        let b = &pts[i];
        let c = &pts[(i + 1) % n];
        let e1 = linalg::sub(b, a);
        let e2 = linalg::sub(c, b);
        let cross = orient * (e1[0] * e2[1] - e1[1] * e2[0]);
        let dotv = linalg::dot(&e1, &e2);
        let norm = (linalg::norm(&e1) * linalg::norm(&e2)).max(1e-300);
        let sin_turn = cross / norm;
        if sin_turn < -tol {
            violations.push(ConvexityViolation {
                index: i,
                sin_turn,
                turn: libm::atan2(cross, dotv),
            });
        }
    }
    violations.sort_by(|a, b| a.sin_turn.total_cmp(&b.sin_turn));
    Ok((violations.is_empty(), violations))
}

fn check_convexity_3d(p: &DecayProfile) -> Result<(bool, Vec<ConvexityViolation>), GeomError> {
    let n = p.len();
    let pts: Vec<Vec<f64>> = (0..n).map(|i| p.boundary_point(i)).collect();
    // Tolerance from the *grid* angular gap, not the boundary-point gaps: a
    // genuine non-convex jump inflates the latter and would mask itself.
    let smax = p
        .sigmas()
        .iter()
        .copied()
        .filter(|s| s.is_finite())
        .fold(0.0f64, f64::max);
    let gap = smax * p.grid().max_neighbor_gap();
    let tol = 10.0 * gap * gap;
    let mut violations = Vec::new();
    for i in 0..n {
        let normal = match outward_normal_3d(p, &pts, i) {
            Some(nv) => nv,
            None => continue,
        };
        let own = linalg::dot(&pts[i], &normal);
        let mut best_other = f64::NEG_INFINITY;
        for (j, q) in pts.iter().enumerate() {
            if j != i {
                best_other = best_other.max(linalg::dot(q, &normal));
            }
        }
        let deficit = best_other - own;
        if deficit > tol {
            violations.push(ConvexityViolation {
                index: i,
                sin_turn: -deficit,
                turn: -deficit,
            });
        }
    }
    violations.sort_by(|a, b| a.sin_turn.total_cmp(&b.sin_turn));
    Ok((violations.is_empty(), violations))
}

/// Least-squares plane normal through the neighbors of vertex `i`, oriented
/// outward (positive along ω_i).
fn outward_normal_3d(p: &DecayProfile, pts: &[Vec<f64>], i: usize) -> Option<Vec<f64>> {
    let nb = p.grid().neighbors(i);
    if nb.len() < 3 {
        return None;
    }
    let mut centroid = vec![0.0; 3];
    for &j in nb {
        for k in 0..3 {
            centroid[k] += pts[j][k];
        }
    }
    for v in centroid.iter_mut() {
        *v /= nb.len() as f64;
    }
    let mut m = nalgebra::DMatrix::zeros(nb.len(), 3);
    for (r, &j) in nb.iter().enumerate() {
        for k in 0..3 {
            m[(r, k)] = pts[j][k] - centroid[k];
        }
    }
    let svd = m.try_svd(false, true, f64::EPSILON, 1000)?;
    let vt = svd.v_t?;
    let normal: Vec<f64> = (0..3).map(|k| vt[(2, k)]).collect();
    let normal = linalg::normalize(&normal)?;
    if linalg::dot(&normal, p.grid().point(i)) < 0.0 {
        Some(normal.iter().map(|v| -v).collect())
    } else {
        Some(normal)
    }
}

/// Discrete Lipschitz test: `|1/σ_i − 1/σ_j| ≤ |ω_i − ω_j| / σ_g` over all
/// neighbor pairs, with `1/∞ = 0`. Returns the verdict and the worst ratio
/// `|Δ(1/σ)|·σ_g/|Δω|` (≤ 1 for a genuine profile; `LIPSCHITZ_SLACK` covers
/// solver noise).
pub fn check_lipschitz(p: &DecayProfile) -> (bool, f64) {
    let sg = p.sigma_g();
    if !sg.is_finite() || sg <= 0.0 {
        return (false, f64::INFINITY);
    }
    let inv = |s: f64| if s.is_finite() { 1.0 / s } else { 0.0 };
    let mut worst = 0.0f64;
    for i in 0..p.len() {
        for &j in p.grid().neighbors(i) {
            if j <= i {
                continue;
            }
            let dom = linalg::norm(&linalg::sub(p.grid().point(i), p.grid().point(j)));
            if dom < 1e-14 {
                continue;
            }
            let ratio = libm::fabs(inv(p.sigmas()[i]) - inv(p.sigmas()[j])) * sg / dom;
            worst = worst.max(ratio);
        }
    }
    (worst <= 1.0 + LIPSCHITZ_SLACK, worst)
}

/// Ball containment `B_{σ_g}(0) ⊆ conv(boundary points)`.
///
/// d = 2: distance from the origin to every boundary edge must be at least
/// `σ_g − 10·gap²` and the origin must lie inside the polygon. d = 3: the
/// sampled support function must stay above the same bound over all grid
/// directions.
pub fn check_ball_containment(p: &DecayProfile) -> Result<bool, GeomError> {
    if !p.finite_everywhere() {
        return Err(GeomError::NotFinite);
    }
    let sg = p.sigma_g();
    let gap = p.mesh_gap();
    let tol = 10.0 * gap * gap;
    match p.dim() {
        2 => {
            let n = p.len();
            if n < 4 {
                return Err(GeomError::TooFewPoints { len: n });
            }
            let pts: Vec<Vec<f64>> = (0..n).map(|i| p.boundary_point(i)).collect();
            let mut area = 0.0;
            for i in 0..n {
                let j = (i + 1) % n;
                area += pts[i][0] * pts[j][1] - pts[j][0] * pts[i][1];
            }
            let orient = if area >= 0.0 { 1.0 } else { -1.0 };
            for i in 0..n {
                let j = (i + 1) % n;
                let cross = orient * (pts[i][0] * pts[j][1] - pts[j][0] * pts[i][1]);
                if cross <= 0.0 {
                    return Ok(false); // origin not strictly inside
                }
                let elen = linalg::norm(&linalg::sub(&pts[j], &pts[i]));
                if elen < 1e-300 {
                    continue;
                }
                if cross / elen < sg - tol {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        3 => {
            for i in 0..p.len() {
                if p.support(p.grid().point(i)) < sg - tol {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        d => Err(GeomError::UnsupportedDimension {
            dim: d,
            what: "ball containment",
        }),
    }
}

/// A detected singular boundary point: outward normals of the adjacent hull
/// edges jump by `jump` radians (the wedge apex angle is π − jump, the wedge
/// half-angle ψ = jump/2).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingularPoint {
    pub index: usize,
    pub jump: f64,
}

/// Locates singular points of a convex d = 2 profile.
///
/// The raw normal jump between adjacent edges carries an O(mesh) smooth-
/// turning bias, so the detector thresholds and reports the background-
/// corrected excess `Δ_i − (Δ_{i−1} + Δ_{i+1})/2`, which cancels the smooth
/// turning to O(mesh²). Cyclically-adjacent detections (a corner landing
/// between grid points) are clustered into one report with their excesses
/// summed. Any wedge angle below `angle_threshold` is indistinguishable
/// from discretization and goes unreported.
pub fn find_singular_points(
    p: &DecayProfile,
    angle_threshold: f64,
) -> Result<Vec<SingularPoint>, GeomError> {
    if p.dim() != 2 {
        return Err(GeomError::UnsupportedDimension {
            dim: p.dim(),
            what: "singular-point detection",
        });
    }
    if !p.finite_everywhere() {
        return Err(GeomError::NotFinite);
    }
    let n = p.len();
    if n < 5 {
        return Err(GeomError::TooFewPoints { len: n });
    }
    let pts: Vec<Vec<f64>> = (0..n).map(|i| p.boundary_point(i)).collect();
    let mut turns = vec![0.0f64; n];
    for i in 0..n {
        let a = &pts[(i + n - 1) % n];
        let b = &pts[i];
        let c = &pts[(i + 1) % n];
        let e1 = linalg::sub(b, a);
        let e2 = linalg::sub(c, b);
        let cross = e1[0] * e2[1] - e1[1] * e2[0];
        let dotv = linalg::dot(&e1, &e2);
        turns[i] = libm::atan2(cross, dotv);
    }
    // Orientation-normalize so smooth turning is positive.
    let total: f64 = turns.iter().sum();
    let orient = if total >= 0.0 { 1.0 } else { -1.0 };
    let excess: Vec<f64> = (0..n)
        .map(|i| {
            let prev = turns[(i + n - 1) % n];
            let next = turns[(i + 1) % n];
            orient * (turns[i] - 0.5 * (prev + next))
        })
        .collect();
    let flagged: Vec<bool> = excess.iter().map(|&e| e > angle_threshold).collect();
    let mut points = Vec::new();
    let mut visited = vec![false; n];
    for i in 0..n {
        if !flagged[i] || visited[i] {
            continue;
        }
        // Walk the cyclic cluster of consecutive flagged vertices.
        let mut lo = i;
        while flagged[(lo + n - 1) % n] && (lo + n - 1) % n != i {
            lo = (lo + n - 1) % n;
        }
        let mut members = Vec::new();
        let mut k = lo;
        loop {
            members.push(k);
            visited[k] = true;
            let next = (k + 1) % n;
            if !flagged[next] || next == lo {
                break;
            }
            k = next;
        }
        let jump: f64 = members.iter().map(|&m| excess[m]).sum();
        let &peak = members
            .iter()
            .max_by(|&&a, &&b| excess[a].total_cmp(&excess[b]))
            .expect("cluster is nonempty");
        points.push(SingularPoint { index: peak, jump });
    }
    points.sort_by_key(|s| s.index);
    Ok(points)
}

/// Verdict of [`classify_sigma_loc`] for one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SigmaLocClass {
    /// Some regular boundary point supports this direction: σ_loc = σ_s.
    EqualsSigmaS,
    /// Every supporting boundary point is singular; no certificate.
    Unknown,
}

/// Classifies each grid direction: `EqualsSigmaS` when its supporting
/// hyperplane touches the sampled boundary at some regular point, `Unknown`
/// when every maximizer of `η·θ` (within mesh tolerance) is a singular
/// point — i.e. θ lies in the normal cone of a wedge.
///
/// d ≥ 3 has no singular-point detector here, so everything is `Unknown`.
pub fn classify_sigma_loc(p: &DecayProfile) -> Vec<SigmaLocClass> {
    if p.dim() != 2 || !p.finite_everywhere() {
        return vec![SigmaLocClass::Unknown; p.len()];
    }
    let singular: Vec<usize> = match find_singular_points(p, DEFAULT_SINGULAR_THRESHOLD) {
        Ok(s) => s.into_iter().map(|sp| sp.index).collect(),
        Err(_) => return vec![SigmaLocClass::Unknown; p.len()],
    };
    let n = p.len();
    let pts: Vec<Vec<f64>> = (0..n).map(|i| p.boundary_point(i)).collect();
    // Attainment slack at sagitta level; 10·gap² would mistake smooth
    // vertices near a wedge's normal cone for supporting points.
    let gap = p.mesh_gap();
    let tol = gap * gap;
    (0..n)
        .map(|k| {
            let theta = p.grid().point(k);
            let mut best = f64::NEG_INFINITY;
            for q in &pts {
                best = best.max(linalg::dot(q, theta));
            }
            let all_singular = (0..n)
                .filter(|&i| linalg::dot(&pts[i], theta) >= best - tol)
                .all(|i| singular.contains(&i));
            if all_singular {
                SigmaLocClass::Unknown
            } else {
                SigmaLocClass::EqualsSigmaS
            }
        })
        .collect()
}

/// Indices of the convex hull of a 2-d point set, counterclockwise
/// (Andrew's monotone chain).
pub fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    if n < 3 {
        return (0..n).collect();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    let cross = |o: usize, a: usize, b: usize| -> f64 {
        (points[a][0] - points[o][0]) * (points[b][1] - points[o][1])
            - (points[a][1] - points[o][1]) * (points[b][0] - points[o][0])
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * n);
    for &idx in &order {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], idx) <= 0.0 {
            hull.pop();
        }
        hull.push(idx);
    }
    let lower_len = hull.len() + 1;
    for &idx in order.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], idx) <= 0.0
        {
            hull.pop();
        }
        hull.push(idx);
    }
    hull.pop();
    hull
}

/// Support function of the convex hull of the profile's boundary points
/// (d = 2). Equals [`DecayProfile::support`] up to mesh tolerance for any
/// profile; the comparison is the discrete sublinearity check.
pub fn hull_support(p: &DecayProfile, theta: &[f64]) -> Result<f64, GeomError> {
    if p.dim() != 2 {
        return Err(GeomError::UnsupportedDimension {
            dim: p.dim(),
            what: "hull support",
        });
    }
    if !p.finite_everywhere() {
        return Err(GeomError::NotFinite);
    }
    let pts: Vec<Vec<f64>> = (0..p.len()).map(|i| p.boundary_point(i)).collect();
    let hull = convex_hull_2d(&pts);
    Ok(hull
        .iter()
        .map(|&i| linalg::dot(&pts[i], theta))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Verdicts of the admissibility predicates on one profile.
///
/// Skipped checks are `None`: everything needs finiteness, containment and
/// singular detection need convexity first, singular detection is d = 2
/// only. `admissible` requires convexity ∧ Lipschitz ∧ ball containment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdmissibilityReport {
    pub label: String,
    pub finite_everywhere: bool,
    pub sigma_g: f64,
    pub convex: Option<bool>,
    pub worst_convexity: Option<ConvexityViolation>,
    pub lipschitz_ok: Option<bool>,
    pub worst_lipschitz_ratio: Option<f64>,
    pub ball_contained: Option<bool>,
    pub singular_points: Option<Vec<SingularPoint>>,
    pub admissible: bool,
}

/// Runs the admissibility predicates in dependency order.
pub fn admissibility_report(p: &DecayProfile) -> AdmissibilityReport {
    let finite = p.finite_everywhere();
    let sigma_g = p.sigma_g();
    let mut report = AdmissibilityReport {
        label: String::from(p.label()),
        finite_everywhere: finite,
        sigma_g,
        convex: None,
        worst_convexity: None,
        lipschitz_ok: None,
        worst_lipschitz_ratio: None,
        ball_contained: None,
        singular_points: None,
        admissible: false,
    };
    if !finite {
        return report;
    }
    let (lip_ok, lip_worst) = check_lipschitz(p);
    report.lipschitz_ok = Some(lip_ok);
    report.worst_lipschitz_ratio = Some(lip_worst);
    let Ok((convex, violations)) = check_convexity(p) else {
        return report;
    };
    report.convex = Some(convex);
    report.worst_convexity = violations.first().cloned();
    if !convex {
        return report;
    }
    let ball = check_ball_containment(p).unwrap_or(false);
    report.ball_contained = Some(ball);
    if p.dim() == 2 {
        report.singular_points = find_singular_points(p, DEFAULT_SINGULAR_THRESHOLD).ok();
    }
    report.admissible = convex && lip_ok && ball;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wedge::{BranchCase, WedgeModel};
    use approx::assert_abs_diff_eq;

    fn circle_profile(n: usize, f: impl Fn(f64) -> f64, label: &str) -> DecayProfile {
        let grid = DirectionGrid::circle(n);
        DecayProfile::from_fn(grid, |w| f(w[1]), label).unwrap()
    }

    fn model() -> WedgeModel {
        WedgeModel::from_ratio(2, 6.0).unwrap()
    }

    #[test]
    fn support_of_unit_circle() {
        let p = circle_profile(720, |_| 1.0, "circle");
        for theta in [[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]] {
            assert_abs_diff_eq!(p.support(&theta), 1.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn support_of_lens_matches_piecewise_formula() {
        let m = model();
        let p = m.closed_profile(BranchCase::Case3, &DirectionGrid::circle(2880));
        // Pole direction: λ0 − ε/2; equatorial: √(λ0² − ε²/4).
        assert_abs_diff_eq!(
            p.support(&[0.0, 1.0]),
            m.lambda0 - m.eps / 2.0,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            p.support(&[1.0, 0.0]),
            libm::sqrt(m.lambda0 * m.lambda0 - m.eps * m.eps / 4.0),
            epsilon = 1e-6
        );
    }

    #[test]
    fn infinite_entries_signal_infinity() {
        let grid = DirectionGrid::circle(8);
        let mut sig = vec![1.0; 8];
        sig[0] = f64::INFINITY;
        let p = DecayProfile::new(grid, sig, String::from("inf")).unwrap();
        assert!(p.support(&[1.0, 0.0]).is_infinite());
        assert!(p.support(&[-1.0, 0.0]).is_finite());
        assert!(!p.finite_everywhere());
    }

    #[test]
    fn convexity_verdicts() {
        let p = circle_profile(360, |_| 2.5, "circle");
        let (ok, v) = check_convexity(&p).unwrap();
        assert!(ok && v.is_empty());

        let m = model();
        for n in [180, 360, 720, 1440] {
            let grid = DirectionGrid::circle(n);
            let lens = m.closed_profile(BranchCase::Case3, &grid);
            let (ok, _) = check_convexity(&lens).unwrap();
            assert!(ok, "lens must be convex at n = {n}");
            let outer = m.closed_profile(BranchCase::Case4, &grid);
            let (ok, v) = check_convexity(&outer).unwrap();
            assert!(!ok, "outer envelope must fail at n = {n}");
            // Violations sit at the ω_d = 0 crossings.
            for viol in &v {
                let w = grid.point(viol.index)[1];
                assert!(libm::fabs(w) < 0.1, "violation away from the fold: ω_d = {w}");
            }
        }
    }

    #[test]
    fn lipschitz_verdicts() {
        let p = circle_profile(360, |_| 1.7, "circle");
        let (ok, worst) = check_lipschitz(&p);
        assert!(ok);
        assert_abs_diff_eq!(worst, 0.0, epsilon = 1e-12);

        let m = model();
        let case1 = m.closed_profile(BranchCase::Case1, &DirectionGrid::circle(720));
        let (ok, worst) = check_lipschitz(&case1);
        assert!(ok, "smooth branch fails Lipschitz with ratio {worst}");

        let jump = circle_profile(360, |w| if w > 0.5 { 3.0 } else { 1.0 }, "jump");
        let (ok, worst) = check_lipschitz(&jump);
        assert!(!ok && worst > 10.0);
    }

    #[test]
    fn ball_containment_verdicts() {
        let p = circle_profile(360, |_| 1.0, "circle");
        assert!(check_ball_containment(&p).unwrap());

        let m = model();
        let lens = m.closed_profile(BranchCase::Case3, &DirectionGrid::circle(720));
        assert!(check_ball_containment(&lens).unwrap());
    }

    #[test]
    fn singular_points_on_the_lens() {
        let m = model();
        let grid = DirectionGrid::circle(1440);
        let lens = m.closed_profile(BranchCase::Case3, &grid);
        let pts = find_singular_points(&lens, DEFAULT_SINGULAR_THRESHOLD).unwrap();
        assert_eq!(pts.len(), 2, "exactly two wedge vertices");
        for sp in &pts {
            let w = grid.point(sp.index)[1];
            assert!(libm::fabs(w) < 1e-9, "wedge away from ω_d = 0");
            let half = sp.jump / 2.0;
            assert!(
                libm::fabs(libm::sin(half) - m.sin_psi()) <= 1e-3,
                "sin ψ = {} vs ε/(2λ0) = {}",
                libm::sin(half),
                m.sin_psi()
            );
        }

        let smooth = m.closed_profile(BranchCase::Case1, &grid);
        assert!(find_singular_points(&smooth, DEFAULT_SINGULAR_THRESHOLD)
            .unwrap()
            .is_empty());
        let circle = circle_profile(1440, |_| 1.0, "circle");
        assert!(find_singular_points(&circle, DEFAULT_SINGULAR_THRESHOLD)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn classify_lens_directions() {
        let m = model();
        let grid = DirectionGrid::circle(1440);
        let lens = m.closed_profile(BranchCase::Case3, &grid);
        let classes = classify_sigma_loc(&lens);
        let band = 0.02; // exclusion band around the cone boundary
        for i in 0..grid.len() {
            let w = grid.point(i)[1];
            if libm::fabs(w) > m.sin_psi() + band {
                assert_eq!(
                    classes[i],
                    SigmaLocClass::EqualsSigmaS,
                    "outside wedge cone at ω_d = {w}"
                );
            } else if libm::fabs(w) < m.sin_psi() - band {
                assert_eq!(
                    classes[i],
                    SigmaLocClass::Unknown,
                    "inside wedge cone at ω_d = {w}"
                );
            }
        }

        let smooth = m.closed_profile(BranchCase::Case2, &grid);
        assert!(classify_sigma_loc(&smooth)
            .iter()
            .all(|c| *c == SigmaLocClass::EqualsSigmaS));
    }

    #[test]
    fn hull_support_equals_profile_support() {
        let m = model();
        let lens = m.closed_profile(BranchCase::Case3, &DirectionGrid::circle(720));
        let gap = lens.mesh_gap();
        for k in 0..64 {
            let phi = 2.0 * core::f64::consts::PI * k as f64 / 64.0 + 0.003;
            let theta = [libm::cos(phi), libm::sin(phi)];
            let a = lens.support(&theta);
            let b = hull_support(&lens, &theta).unwrap();
            assert!((a - b).abs() <= 10.0 * gap * gap);
        }
    }

    #[test]
    fn admissibility_assembly_order() {
        let m = model();
        let lens = m.closed_profile(BranchCase::Case3, &DirectionGrid::circle(720));
        let rep = admissibility_report(&lens);
        assert!(rep.admissible);
        assert_eq!(rep.singular_points.as_ref().map(Vec::len), Some(2));
        assert_abs_diff_eq!(rep.sigma_g, m.lambda0 - m.eps / 2.0, epsilon = 1e-12);

        let outer = m.closed_profile(BranchCase::Case4, &DirectionGrid::circle(720));
        let rep = admissibility_report(&outer);
        assert!(!rep.admissible);
        assert_eq!(rep.convex, Some(false));
        assert_eq!(rep.ball_contained, None, "containment skipped without convexity");

        let grid = DirectionGrid::circle(360);
        let mut sig = vec![1.0; 360];
        sig[7] = f64::INFINITY;
        let p = DecayProfile::new(grid, sig, String::from("inf")).unwrap();
        let rep = admissibility_report(&p);
        assert!(!rep.finite_everywhere && !rep.admissible);
        assert_eq!(rep.convex, None);
    }

    #[test]
    fn sphere_profiles_in_3d() {
        let grid = DirectionGrid::fibonacci_sphere(600);
        let sphere = DecayProfile::from_fn(grid.clone(), |_| 1.0, "sphere").unwrap();
        let (ok, _) = check_convexity(&sphere).unwrap();
        assert!(ok);
        assert!(check_ball_containment(&sphere).unwrap());
        assert!(classify_sigma_loc(&sphere)
            .iter()
            .all(|c| *c == SigmaLocClass::Unknown));

        // A dented sphere is not convex.
        let dented = DecayProfile::from_fn(
            grid,
            |w| if w[2] > 0.9 { 0.6 } else { 1.0 },
            "dented",
        )
        .unwrap();
        let (ok, v) = check_convexity(&dented).unwrap();
        assert!(!ok && !v.is_empty());
    }

    #[test]
    fn refinement_improves_support_accuracy() {
        // Support-function error is O(mesh²) on a smooth profile.
        let m = model();
        let exact = |theta: &[f64]| m.lambda0 - m.eps * theta[1] / 2.0;
        let probe: Vec<[f64; 2]> = (0..997)
            .map(|k| {
                let phi = 2.0 * core::f64::consts::PI * k as f64 / 997.0 + 0.0137;
                [libm::cos(phi), libm::sin(phi)]
            })
            .collect();
        let err = |n: usize| -> f64 {
            let p = m.closed_profile(BranchCase::Case2, &DirectionGrid::circle(n));
            probe
                .iter()
                .map(|t| libm::fabs(p.support(t) - exact(t)))
                .fold(0.0, f64::max)
        };
        let e1 = err(180);
        let e2 = err(360);
        let e4 = err(720);
        let order12 = libm::log2(e1 / e2);
        let order24 = libm::log2(e2 / e4);
        assert!(order12 >= 1.8, "observed order {order12}");
        assert!(order24 >= 1.8, "observed order {order24}");
    }
}
