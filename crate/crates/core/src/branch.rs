//! Linking per-direction solution clouds into continuous candidate profiles
//! σ(ω) and filtering them by admissibility.
//!
//! Solutions are re-indexed by their own boundary direction ω (the sweep
//! parameter θ is a supporting normal, not ω, so a solution found at θ may
//! sit in a different grid cell). Per cell, state-space clustering collapses
//! near-duplicate finds of one branch while keeping genuinely different
//! branches apart; chains are then grown by greedy nearest-σ linking with
//! full enumeration wherever two σ values come within the link gap (branch
//! crossings), bounded by a branch budget. Every entry of every emitted
//! chain is Newton-polished onto the exact grid ray, so profile values are
//! residual-accurate at their stated directions and every grid direction
//! carries a provenance solution.
//!
//! Directions with no solution at all become σ = ∞ markers; chains crossing
//! them are kept but flagged non-finite and excluded from admissibility.
//! Unlinkable fragments shorter than the minimum arc are discarded and
//! logged — isolated spurious Newton finds must not spawn profiles.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::geom::{admissibility_report, AdmissibilityReport, DecayProfile};
use crate::poly::MultiPoly;
use crate::solve::{polish_on_ray, DirectionCloud, Jet, SolveError, StationarySolution};

/// Tunables of [`assemble`]; `Default` gives the documented desk-scale
/// values.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssemblyOptions {
    /// Maximum σ gap linking adjacent grid cells; `None` derives
    /// 5× the median per-cell nearest-neighbor σ step (floor 1e−7).
    pub delta_link: Option<f64>,
    /// Cap on distinct emitted profiles; exceeding it truncates with a
    /// warning.
    pub branch_budget: usize,
    /// Fragments covering less than this fraction of the grid are discarded.
    pub min_arc_fraction: f64,
    /// Residual acceptance for polished entries.
    pub residual_tol: f64,
    /// Skip the per-ray Newton polish (profiles then carry cell-sample σ).
    pub polish: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            delta_link: None,
            branch_budget: 16,
            min_arc_fraction: 0.05,
            residual_tol: 1e-9,
            polish: true,
        }
    }
}

/// Assembled candidate profiles with their provenance and admissibility
/// verdicts.
#[derive(Debug, Clone)]
pub struct BranchSet {
    /// Solution pool: cloud solutions followed by polished per-ray solutions.
    pub solutions: Vec<StationarySolution>,
    pub profiles: Vec<DecayProfile>,
    /// Per profile, per grid index: index into `solutions` backing that
    /// entry (`None` at σ = ∞ markers).
    pub provenance: Vec<Vec<Option<usize>>>,
    /// Profiles passing convexity ∧ Lipschitz ∧ ball containment.
    pub admissible: Vec<(usize, AdmissibilityReport)>,
    /// Profiles checked and failed (or non-finite).
    pub rejected: Vec<(usize, AdmissibilityReport)>,
    pub warnings: Vec<String>,
}

impl BranchSet {
    pub fn admissible_profiles(&self) -> impl Iterator<Item = &DecayProfile> {
        self.admissible.iter().map(|(i, _)| &self.profiles[*i])
    }
}

/// One per-cell cluster of state-close solutions; `rep` indexes the pool.
#[derive(Debug, Clone)]
struct Cluster {
    rep: usize,
    sigma: f64,
    members: Vec<usize>,
}

const DFS_NODE_CAP: usize = 500_000;
/// Closed cyclic profiles only make sense on grids at least this large;
/// below it everything is treated as a fragment.
const MIN_CLOSED_GRID: usize = 8;

/// Links a sweep cloud into candidate profiles over the cloud's own grid.
pub fn assemble(
    q: &MultiPoly,
    lambda: f64,
    cloud: &DirectionCloud,
    opts: &AssemblyOptions,
) -> Result<BranchSet, SolveError> {
    if q.dim() != cloud.grid.dim() {
        return Err(SolveError::WrongDimension {
            expected: q.dim(),
            got: cloud.grid.dim(),
        });
    }
    let grid = &cloud.grid;
    let n = grid.len();
    let mut warnings: Vec<String> = Vec::new();

    // Global twin-dedup: antipodal sweep directions pose the identical
    // canonicalized system, so every solution enters the cloud twice as a
    // near-identical copy; such twins poison the nearest-neighbor scale
    // estimates below. Keep the lower-residual twin.
    let mut pool: Vec<StationarySolution> = Vec::new();
    {
        let mut raw: Vec<&StationarySolution> = cloud.solutions.iter().flatten().collect();
        raw.sort_by(|a, b| {
            a.sigma
                .total_cmp(&b.sigma)
                .then(a.residual.total_cmp(&b.residual))
        });
        for s in raw {
            let twin = pool
                .iter()
                .rev()
                .take_while(|k| libm::fabs(k.sigma - s.sigma) <= 1e-9)
                .any(|k| k.distance(s) <= 1e-9);
            if !twin {
                pool.push(s.clone());
            }
        }
    }

    // Per-cell raw bins, keyed by each solution's own ω. Each solution pads
    // into the two neighboring cells as well, covering holes left by the
    // θ→ω distortion.
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, s) in pool.iter().enumerate() {
        let k = grid.nearest_index(&s.omega);
        bins[k].push(idx);
        for &nb in grid.neighbors(k) {
            bins[nb].push(idx);
        }
    }
    for b in bins.iter_mut() {
        b.sort_unstable();
        b.dedup();
    }

    // State step scale: same-branch movement between adjacent cells.
    // Aggregated per cell before taking the global median — a solution
    // family that recurs at every sweep direction (critical points solve
    // the system for every θ) floods a few cells with near-duplicates and
    // would otherwise drag the median to zero.
    let mut state_steps: Vec<f64> = Vec::new();
    for i in 0..n {
        let mut cell_steps: Vec<f64> = Vec::new();
        for &a in &bins[i] {
            let mut best = f64::INFINITY;
            for &nb in grid.neighbors(i) {
                for &b in &bins[nb] {
                    if b != a {
                        best = best.min(pool[a].distance(&pool[b]));
                    }
                }
            }
            if best.is_finite() {
                cell_steps.push(best);
            }
        }
        if let Some(m) = median(&mut cell_steps) {
            state_steps.push(m);
        }
    }
    let state_tol = 4.0 * median(&mut state_steps).unwrap_or(1e-3).max(1e-8);

    // Per-cell clusters: connected under state proximity, represented by the
    // lowest-residual member.
    let mut cells: Vec<Vec<Cluster>> = Vec::with_capacity(n);
    for bin in &bins {
        let mut entries: Vec<usize> = bin.clone();
        entries.sort_by(|&a, &b| {
            pool[a]
                .residual
                .total_cmp(&pool[b].residual)
                .then(a.cmp(&b))
        });
        let mut clusters: Vec<Cluster> = Vec::new();
        for e in entries {
            match clusters
                .iter_mut()
                .find(|c| pool[c.rep].distance(&pool[e]) <= state_tol)
            {
                Some(c) => c.members.push(e),
                None => clusters.push(Cluster {
                    rep: e,
                    sigma: pool[e].sigma,
                    members: vec![e],
                }),
            }
        }
        clusters.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
        cells.push(clusters);
    }

    // Link gap: 5× the median (over cells) nearest σ step between adjacent
    // cells, cell-aggregated for the same flooding reason as above.
    let delta_link = opts.delta_link.unwrap_or_else(|| {
        let mut gaps: Vec<f64> = Vec::new();
        for i in 0..n {
            let next = (i + 1) % n;
            let mut cell_gaps: Vec<f64> = Vec::new();
            for c in &cells[i] {
                let mut best = f64::INFINITY;
                for c2 in &cells[next] {
                    best = best.min(libm::fabs(c.sigma - c2.sigma));
                }
                if best.is_finite() {
                    cell_gaps.push(best);
                }
            }
            if let Some(m) = median(&mut cell_gaps) {
                gaps.push(m);
            }
        }
        (5.0 * median(&mut gaps).unwrap_or(2e-4)).max(1e-7)
    });

    #[cfg(test)]
    {
        extern crate std;
        let total: usize = cells.iter().map(Vec::len).sum();
        std::eprintln!(
            "DEBUG assemble: state_tol={state_tol:e} delta_link={delta_link:e} clusters={total}"
        );
        let gaps: Vec<(usize, f64, usize)> = (0..n)
            .filter_map(|c| {
                let cell = &cells[c];
                let mut g = f64::INFINITY;
                for i in 0..cell.len() {
                    for j in i + 1..cell.len() {
                        g = g.min(libm::fabs(cell[i].sigma - cell[j].sigma));
                    }
                }
                (g <= delta_link).then_some((c, g, cell.len()))
            })
            .collect();
        std::eprintln!("DEBUG ambiguous cells: {gaps:?}");
    }

    let mut chains: Vec<Vec<Option<(usize, usize)>>> = Vec::new(); // (cell, cluster)
    let mut truncated = false;

    if grid.dim() == 2 && n >= MIN_CLOSED_GRID {
        enumerate_closed_chains_2d(&cells, n, delta_link, opts.branch_budget, &mut chains, &mut truncated);
    }
    if truncated {
        warnings.push(format!(
            "branch budget {} exceeded; profile enumeration truncated",
            opts.branch_budget
        ));
    }

    // Fragments from clusters not used by any closed chain.
    let mut used: Vec<Vec<bool>> = cells.iter().map(|c| vec![false; c.len()]).collect();
    for chain in &chains {
        for entry in chain.iter().flatten() {
            used[entry.0][entry.1] = true;
        }
    }
    let min_fragment = 2.max(libm::ceil(opts.min_arc_fraction * n as f64) as usize);
    let mut discarded = 0usize;
    for i in 0..n {
        for c in 0..cells[i].len() {
            if used[i][c] {
                continue;
            }
            let frag = greedy_fragment(&cells, &used, n, i, c, delta_link);
            let len = frag.iter().filter(|e| e.is_some()).count();
            for entry in frag.iter().flatten() {
                used[entry.0][entry.1] = true;
            }
            if len >= min_fragment && n >= MIN_CLOSED_GRID {
                chains.push(frag);
            } else {
                discarded += 1;
            }
        }
    }
    if discarded > 0 {
        warnings.push(format!(
            "discarded {discarded} fragment(s) below the minimum arc of {min_fragment} directions"
        ));
    }

    // Polish each chain entry onto its exact grid ray and build profiles.
    let jet = Jet::new(q);
    let mut polish_failures = 0usize;
    let mut built: Vec<(Vec<f64>, Vec<Option<usize>>)> = Vec::new();
    for chain in &chains {
        let mut sigmas = vec![f64::INFINITY; n];
        let mut prov: Vec<Option<usize>> = vec![None; n];
        for (k, entry) in chain.iter().enumerate() {
            let Some(&(ci, cc)) = entry.as_ref() else {
                continue;
            };
            let cluster = &cells[ci][cc];
            let seed = &pool[cluster.rep];
            let polished = if opts.polish {
                polish_on_ray(&jet, lambda, grid.point(k), seed, opts.residual_tol)
            } else {
                None
            };
            match polished {
                Some(sol) => {
                    sigmas[k] = sol.sigma;
                    prov[k] = Some(pool.len());
                    pool.push(sol);
                }
                None => {
                    if opts.polish {
                        polish_failures += 1;
                    }
                    sigmas[k] = cluster.sigma;
                    prov[k] = Some(cluster.rep);
                }
            }
        }
        built.push((sigmas, prov));
    }
    if polish_failures > 0 {
        warnings.push(format!(
            "{polish_failures} profile entr(ies) kept cell-sample σ after ray polish failed"
        ));
    }

    // Dedup profiles pointwise (tight: polished values of one branch agree
    // to residual level) and order deterministically by their σ vectors.
    let mut keep: Vec<(Vec<f64>, Vec<Option<usize>>)> = Vec::new();
    for (sig, prov) in built {
        let dup = keep.iter().any(|(s, _)| {
            s.iter().zip(&sig).all(|(a, b)| {
                (a.is_infinite() && b.is_infinite()) || libm::fabs(a - b) <= 1e-7
            })
        });
        if !dup {
            keep.push((sig, prov));
        }
    }
    keep.sort_by(|a, b| {
        let ma = a.0.iter().copied().fold(f64::INFINITY, f64::min);
        let mb = b.0.iter().copied().fold(f64::INFINITY, f64::min);
        ma.total_cmp(&mb).then_with(|| {
            for (x, y) in a.0.iter().zip(&b.0) {
                let c = x.total_cmp(y);
                if c != core::cmp::Ordering::Equal {
                    return c;
                }
            }
            core::cmp::Ordering::Equal
        })
    });

    let mut profiles = Vec::new();
    let mut provenance = Vec::new();
    for (idx, (sig, prov)) in keep.into_iter().enumerate() {
        match DecayProfile::new(grid.clone(), sig, format!("branch-{idx}")) {
            Ok(p) => {
                profiles.push(p);
                provenance.push(prov);
            }
            Err(e) => warnings.push(format!("dropped malformed profile: {e}")),
        }
    }

    Ok(BranchSet {
        solutions: pool,
        profiles,
        provenance,
        admissible: Vec::new(),
        rejected: Vec::new(),
        warnings,
    })
}

/// DFS over the cyclic cell graph from the first nonempty cell; emits every
/// closed chain distinct in its cluster sequence, respecting the budget.
///
/// Greedy nearest-σ linking everywhere except at *switch cells* — the local
/// minima of the in-cell σ gap within the link tolerance, i.e. the tightest
/// cell of each branch crossing — where every consistent continuation is
/// enumerated. Branching at every cell of a crossing region would emit a
/// combinatorial pile of chains differing only in switch placement; the
/// gap minimum is where the crossing actually happens.
fn enumerate_closed_chains_2d(
    cells: &[Vec<Cluster>],
    n: usize,
    delta_link: f64,
    budget: usize,
    chains: &mut Vec<Vec<Option<(usize, usize)>>>,
    truncated: &mut bool,
) {
    let Some(start_cell) = (0..n).find(|&i| !cells[i].is_empty()) else {
        return;
    };
    let gaps: Vec<f64> = cells
        .iter()
        .map(|cell| {
            let mut g = f64::INFINITY;
            for i in 0..cell.len() {
                for j in i + 1..cell.len() {
                    g = g.min(libm::fabs(cell[i].sigma - cell[j].sigma));
                }
            }
            g
        })
        .collect();
    let switch_cell: Vec<bool> = (0..n)
        .map(|c| {
            gaps[c] <= delta_link
                && gaps[c] <= gaps[(c + n - 1) % n]
                && gaps[c] < gaps[(c + 1) % n]
        })
        .collect();
    let mut nodes = 0usize;
    for sc in 0..cells[start_cell].len() {
        let mut path: Vec<Option<(usize, usize)>> = Vec::with_capacity(n);
        path.push(Some((start_cell, sc)));
        dfs(
            cells,
            &switch_cell,
            n,
            start_cell,
            delta_link,
            budget,
            &mut path,
            cells[start_cell][sc].sigma,
            &mut nodes,
            chains,
            truncated,
        );
        if *truncated {
            return;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        cells: &[Vec<Cluster>],
        switch_cell: &[bool],
        n: usize,
        start_cell: usize,
        delta_link: f64,
        budget: usize,
        path: &mut Vec<Option<(usize, usize)>>,
        anchor: f64,
        nodes: &mut usize,
        chains: &mut Vec<Vec<Option<(usize, usize)>>>,
        truncated: &mut bool,
    ) {
        *nodes += 1;
        if *nodes > DFS_NODE_CAP || chains.len() >= budget {
            *truncated = true;
            return;
        }
        if path.len() == n {
            // Wrap closure back to the start cluster.
            let Some((sc, scc)) = path[0] else { return };
            if libm::fabs(anchor - cells[sc][scc].sigma) <= delta_link {
                // Rotate so entry k corresponds to grid index k.
                let mut rotated: Vec<Option<(usize, usize)>> = vec![None; n];
                for (off, e) in path.iter().enumerate() {
                    rotated[(start_cell + off) % n] = *e;
                }
                if !chains.iter().any(|c| c == &rotated) {
                    chains.push(rotated);
                }
            }
            return;
        }
        let next_cell = (start_cell + path.len()) % n;
        let mut links: Vec<usize> = (0..cells[next_cell].len())
            .filter(|&c| libm::fabs(cells[next_cell][c].sigma - anchor) <= delta_link)
            .collect();
        if links.is_empty() {
            if cells[next_cell].is_empty() {
                // No solution in this direction at all: ∞ marker, keep going.
                path.push(None);
                dfs(
                    cells, switch_cell, n, start_cell, delta_link, budget, path, anchor, nodes,
                    chains, truncated,
                );
                path.pop();
            }
            // Unlinkable against existing candidates: the chain dies here
            // (fragments are collected separately).
            return;
        }
        links.sort_by(|&a, &b| {
            libm::fabs(cells[next_cell][a].sigma - anchor)
                .total_cmp(&libm::fabs(cells[next_cell][b].sigma - anchor))
                .then(a.cmp(&b))
        });
        if !switch_cell[next_cell] {
            links.truncate(1);
        }
        for c in links {
            path.push(Some((next_cell, c)));
            let sigma = cells[next_cell][c].sigma;
            dfs(
                cells, switch_cell, n, start_cell, delta_link, budget, path, sigma, nodes,
                chains, truncated,
            );
            path.pop();
            if *truncated {
                return;
            }
        }
    }
}

/// Greedy bidirectional nearest-σ walk used for leftover fragments.
fn greedy_fragment(
    cells: &[Vec<Cluster>],
    used: &[Vec<bool>],
    n: usize,
    i0: usize,
    c0: usize,
    delta_link: f64,
) -> Vec<Option<(usize, usize)>> {
    let mut frag: Vec<Option<(usize, usize)>> = vec![None; n];
    frag[i0] = Some((i0, c0));
    let walk = |dir: i64, frag: &mut Vec<Option<(usize, usize)>>| {
        let mut pos = i0 as i64;
        let mut anchor = cells[i0][c0].sigma;
        for _ in 1..n {
            pos = (pos + dir).rem_euclid(n as i64);
            let cell = pos as usize;
            if frag[cell].is_some() {
                break;
            }
            let best = (0..cells[cell].len())
                .filter(|&c| !used[cell][c])
                .min_by(|&a, &b| {
                    libm::fabs(cells[cell][a].sigma - anchor)
                        .total_cmp(&libm::fabs(cells[cell][b].sigma - anchor))
                        .then(a.cmp(&b))
                });
            match best {
                Some(c) if libm::fabs(cells[cell][c].sigma - anchor) <= delta_link => {
                    frag[cell] = Some((cell, c));
                    anchor = cells[cell][c].sigma;
                }
                _ => break,
            }
        }
    };
    walk(1, &mut frag);
    walk(-1, &mut frag);
    frag
}

fn median(values: &mut Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values[values.len() / 2])
}

/// Attaches admissibility verdicts: `admissible` gets exactly the finite
/// profiles passing convexity ∧ Lipschitz ∧ ball containment, everything
/// else (including non-finite flagged branches) lands in `rejected` with its
/// report.
pub fn filter_admissible(mut set: BranchSet) -> BranchSet {
    set.admissible.clear();
    set.rejected.clear();
    for (i, p) in set.profiles.iter().enumerate() {
        let report = admissibility_report(p);
        if report.admissible {
            set.admissible.push((i, report));
        } else {
            set.rejected.push((i, report));
        }
    }
    set
}

/// Candidate global rates: σ values of the global-system solutions that
/// agree (within `tol`) with the minimum σ of some admissible profile.
/// Returns the sorted candidates and a diagnostic when the intersection is
/// empty despite both sides being nonempty.
pub fn global_rate_candidates(
    set: &BranchSet,
    global_solutions: &[StationarySolution],
    tol: f64,
) -> (Vec<f64>, Option<String>) {
    let mins: Vec<f64> = set
        .admissible
        .iter()
        .map(|(i, _)| set.profiles[*i].sigma_g())
        .collect();
    let mut candidates: Vec<f64> = Vec::new();
    for s in global_solutions {
        if mins.iter().any(|m| libm::fabs(m - s.sigma) <= tol) {
            candidates.push(s.sigma);
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| libm::fabs(*a - *b) <= tol);
    let diagnostic = if candidates.is_empty() && !mins.is_empty() && !global_solutions.is_empty() {
        Some(String::from(
            "no global-system rate matches the minimum of any admissible profile; \
             solver budgets or tolerances are likely inconsistent",
        ))
    } else {
        None
    };
    (candidates, diagnostic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DirectionGrid;
    use crate::poly::{detect_rotation_invariance, MultiPoly};
    use crate::solve::{
        solve_global_system, solve_rotation_invariant, sweep_directions, SolveOptions,
    };
    use crate::wedge::{BranchCase, WedgeModel};

    fn opts(n: usize, seed: u64) -> SolveOptions {
        SolveOptions {
            n_starts: n,
            seed,
            ..SolveOptions::per_direction()
        }
    }

    #[test]
    fn debug_tmp_wedge() {
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let grid = DirectionGrid::circle(180);
        let cloud = sweep_directions(&q, -1.0, &grid, &opts(48, 33)).unwrap();
        let set = assemble(&q, -1.0, &cloud, &AssemblyOptions::default()).unwrap();
        std::eprintln!("DEBUG profiles: {}", set.profiles.len());
        std::eprintln!("DEBUG warnings: {:?}", set.warnings);
    }

    #[test]
    fn rotation_invariant_cloud_gives_constant_profiles() {
        // G(w) = w² + 3w, λ = −1: two real negative roots, two constant σ's.
        let g = crate::poly::RotInvModel {
            g_coeffs: alloc::vec![0.0, 3.0, 1.0],
            residual: 0.0,
        };
        let q = g.to_poly(2);
        let grid = DirectionGrid::circle(90);
        let cloud = sweep_directions(&q, -1.0, &grid, &opts(40, 9)).unwrap();
        let set = assemble(&q, -1.0, &cloud, &AssemblyOptions::default()).unwrap();
        let expected = solve_rotation_invariant(&detect_rotation_invariance(&q).unwrap(), -1.0)
            .unwrap();
        assert_eq!(set.profiles.len(), expected.len());
        for (p, (sigma, _)) in set.profiles.iter().zip(&expected) {
            for &s in p.sigmas() {
                assert!((s - sigma).abs() < 1e-8, "profile not constant at {sigma}");
            }
        }
        let set = filter_admissible(set);
        assert_eq!(set.admissible.len(), expected.len());
    }

    #[test]
    fn wedge_cloud_reproduces_the_four_cases() {
        let model = WedgeModel::from_ratio(2, 6.0).unwrap();
        let q = model.operator();
        let grid = DirectionGrid::circle(180);
        let cloud = sweep_directions(&q, -1.0, &grid, &opts(48, 33)).unwrap();
        let set = assemble(&q, -1.0, &cloud, &AssemblyOptions::default()).unwrap();
        assert!(
            set.profiles.len() >= 4,
            "expected at least the four §-example cases, got {}",
            set.profiles.len()
        );

        // Each closed-form case must be matched by some assembled finite
        // profile away from the fold.
        for case in BranchCase::ALL {
            let matched = set.profiles.iter().any(|p| {
                p.finite_everywhere()
                    && (0..p.len()).all(|i| {
                        let w = p.grid().point(i)[1];
                        if libm::fabs(w) <= 0.02 {
                            return true;
                        }
                        let want = model.branch_sigma(case, w).unwrap();
                        libm::fabs(p.sigmas()[i] - want) <= 1e-8
                    })
            });
            assert!(matched, "no assembled profile matches case {}", case.index());
        }

        // Convexity filter keeps 1–3 and rejects the outer envelope.
        let set = filter_admissible(set);
        let admissible_match = |case: BranchCase| {
            set.admissible.iter().any(|(i, _)| {
                let p = &set.profiles[*i];
                (0..p.len()).all(|k| {
                    let w = p.grid().point(k)[1];
                    libm::fabs(w) <= 0.02
                        || libm::fabs(p.sigmas()[k] - model.branch_sigma(case, w).unwrap()) <= 1e-8
                })
            })
        };
        assert!(admissible_match(BranchCase::Case1));
        assert!(admissible_match(BranchCase::Case2));
        assert!(admissible_match(BranchCase::Case3));
        assert!(!admissible_match(BranchCase::Case4), "case 4 must be rejected");

        // Provenance: every finite entry is backed by a residual-accurate
        // solution on the stated ray.
        for (pi, prov) in set.provenance.iter().enumerate() {
            let p = &set.profiles[pi];
            for k in 0..p.len() {
                if p.sigmas()[k].is_finite() {
                    let sol = &set.solutions[prov[k].expect("finite entry has provenance")];
                    assert!(sol.residual <= 1e-9);
                    assert!((sol.sigma - p.sigmas()[k]).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_direction_cloud_yields_no_profiles() {
        let q = MultiPoly::laplacian_power(2, 1);
        let grid = DirectionGrid::circle(1);
        let cloud = sweep_directions(&q, -1.0, &grid, &opts(40, 5)).unwrap();
        let set = assemble(&q, -1.0, &cloud, &AssemblyOptions::default()).unwrap();
        assert!(set.profiles.is_empty());
        assert!(set.warnings.iter().any(|w| w.contains("discarded")));
    }

    #[test]
    fn jump_profile_is_rejected_by_lipschitz() {
        let grid = DirectionGrid::circle(180);
        let profile = DecayProfile::from_fn(
            grid,
            |w| if w[1] > 0.6 { 3.0 } else { 1.2 },
            "jump",
        )
        .unwrap();
        let set = BranchSet {
            solutions: Vec::new(),
            profiles: alloc::vec![profile],
            provenance: alloc::vec![alloc::vec![None; 180]],
            admissible: Vec::new(),
            rejected: Vec::new(),
            warnings: Vec::new(),
        };
        let set = filter_admissible(set);
        assert!(set.admissible.is_empty());
        assert_eq!(set.rejected.len(), 1);
        assert_eq!(set.rejected[0].1.lipschitz_ok, Some(false));
    }

    #[test]
    fn global_candidates_for_the_laplacian() {
        let q = MultiPoly::laplacian_power(2, 1);
        let grid = DirectionGrid::circle(90);
        let cloud = sweep_directions(&q, -1.0, &grid, &opts(40, 2)).unwrap();
        let set = filter_admissible(assemble(&q, -1.0, &cloud, &AssemblyOptions::default()).unwrap());
        let global = solve_global_system(&q, -1.0, &opts(200, 3)).unwrap();
        let (candidates, diag) = global_rate_candidates(&set, &global, 1e-6);
        assert!(diag.is_none());
        assert_eq!(candidates.len(), 1);
        assert!((candidates[0] - 1.0).abs() < 1e-9);
    }
}
