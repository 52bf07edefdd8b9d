//! Command implementations behind the CLI: each returns the process exit
//! code. Exit contract: 0 success, 1 unreadable/invalid input, 2 non-elliptic
//! symbol, 3 solver budget exhausted with empty output, 4 not rotation
//! invariant.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use eigendecay_core::geom::admissibility_report;
use eigendecay_core::smooth::DEFAULT_REGULARITY_TOL;
use eigendecay_core::{
    assemble, check_ellipticity, detect_rotation_invariance, filter_admissible,
    find_critical_values, global_rate_candidates, regularity_check, solve_1d,
    solve_for_direction, solve_global_system, solve_rotation_invariant, sweep_directions,
    AssemblyOptions, DirectionGrid, MultiPoly, SolveError, SolveOptions, WedgeModel,
};

use crate::formats::{self, write_json};
use crate::svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_ELLIPTIC: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_NOT_ROTINV: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitFlags {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            json: true,
            csv: true,
            svg: true,
        }
    }
}

impl EmitFlags {
    pub fn parse(spec: &str) -> Result<Self> {
        let mut flags = Self {
            json: false,
            csv: false,
            svg: false,
        };
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part {
                "json" => flags.json = true,
                "csv" => flags.csv = true,
                "svg" => flags.svg = true,
                other => bail!("unknown emit kind {other:?} (expected json, csv, svg)"),
            }
        }
        Ok(flags)
    }
}

/// Full pipeline configuration (the `analyze` subcommand).
#[derive(Debug, Clone)]
pub struct AnalyzeConfig {
    pub poly: MultiPoly,
    pub lambda: f64,
    pub grid: usize,
    pub opts: SolveOptions,
    pub out: PathBuf,
    pub emit: EmitFlags,
}

impl AnalyzeConfig {
    pub fn new(poly: MultiPoly, lambda: f64, out: PathBuf) -> Self {
        Self {
            poly,
            lambda,
            grid: 720,
            opts: SolveOptions::per_direction(),
            out,
            emit: EmitFlags::default(),
        }
    }

    /// Budget for the global system and critical-value search: 4× the
    /// per-direction starts (the documented 500 → 2000 default).
    fn global_opts(&self) -> SolveOptions {
        SolveOptions {
            n_starts: self.opts.n_starts.saturating_mul(4),
            ..self.opts.clone()
        }
    }
}

/// Load polynomial → certify → solve → assemble → filter → certify
/// smoothness → emit reports and plots.
pub fn cmd_analyze(cfg: &AnalyzeConfig) -> Result<i32> {
    if !cfg.lambda.is_finite() {
        bail!("lambda must be finite");
    }
    let dim = cfg.poly.dim();
    if dim < 2 || dim > 3 {
        bail!("analyze works on d = 2 or 3 (use the 1d subcommand for d = 1)");
    }
    if dim == 2 && cfg.grid < 90 {
        bail!("grid must be at least 90 directions for d = 2");
    }
    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create output directory {}", cfg.out.display()))?;

    let mut warnings: Vec<String> = Vec::new();

    // Certification stage.
    let cert = check_ellipticity(&cfg.poly, 0);
    let rotinv = detect_rotation_invariance(&cfg.poly);
    let rotinv_doc = rotinv.as_ref().map(|model| {
        let rates = solve_rotation_invariant(model, cfg.lambda).map_err(|e| e.to_string());
        if let Err(e) = &rates {
            warnings.push(format!("rotation-invariant reduction unavailable: {e}"));
        }
        formats::rotinv_doc(model, rates)
    });

    if !cert.is_elliptic {
        let doc = formats::CertificateDoc {
            polynomial: formats::poly_to_file(&cfg.poly),
            rendered: formats::render(&cfg.poly),
            lambda: cfg.lambda,
            ellipticity: cert,
            rotation_invariance: rotinv_doc,
            critical_values: None,
            warnings,
        };
        write_json(&cfg.out.join("certificate.json"), &doc)?;
        eprintln!("input symbol is not elliptic; wrote certificate.json");
        return Ok(EXIT_NOT_ELLIPTIC);
    }

    let global_opts = cfg.global_opts();
    let criticals = match find_critical_values(&cfg.poly, &global_opts) {
        Ok(set) => Some(set),
        Err(e) => {
            warnings.push(format!("critical-value search failed: {e}"));
            None
        }
    };

    // Solve stage.
    let grid = match dim {
        2 => DirectionGrid::circle(cfg.grid),
        _ => DirectionGrid::fibonacci_sphere(cfg.grid.max(100)),
    };
    let cloud = sweep_directions(&cfg.poly, cfg.lambda, &grid, &cfg.opts)?;
    let total_solutions: usize = cloud.solutions.iter().map(Vec::len).sum();

    let global_sols = solve_global_system(&cfg.poly, cfg.lambda, &global_opts)?;

    // Assemble and filter.
    let assembly_opts = AssemblyOptions {
        residual_tol: cfg.opts.residual_tol,
        ..AssemblyOptions::default()
    };
    let set = assemble(&cfg.poly, cfg.lambda, &cloud, &assembly_opts)?;
    let set = filter_admissible(set);
    warnings.extend(set.warnings.iter().cloned());
    let (candidates, diagnostic) = global_rate_candidates(&set, &global_sols, cfg.opts.dedup_tol);
    if let Some(d) = &diagnostic {
        warnings.push(d.clone());
    }

    // Smoothness certificates for admissible profiles.
    let mut regularity = formats::RegularityDoc {
        profiles: Vec::new(),
    };
    for (pi, _) in &set.admissible {
        let profile = &set.profiles[*pi];
        let mut entries = Vec::new();
        for k in 0..profile.len() {
            if let Some(si) = set.provenance[*pi][k] {
                let rep = regularity_check(&cfg.poly, &set.solutions[si], DEFAULT_REGULARITY_TOL);
                entries.push(formats::regularity_rec(k, grid.point(k), &rep));
            }
        }
        regularity.profiles.push(formats::ProfileRegularity {
            label: profile.label().to_string(),
            entries,
        });
    }

    // Emit stage: fixed file order, deterministic bytes.
    let cert_doc = formats::CertificateDoc {
        polynomial: formats::poly_to_file(&cfg.poly),
        rendered: formats::render(&cfg.poly),
        lambda: cfg.lambda,
        ellipticity: cert,
        rotation_invariance: rotinv_doc,
        critical_values: criticals
            .as_ref()
            .map(|c| formats::critical_doc(c, cfg.lambda, cfg.opts.dedup_tol)),
        warnings: warnings.clone(),
    };
    write_json(&cfg.out.join("certificate.json"), &cert_doc)?;

    if cfg.emit.json {
        let solutions_doc = formats::SolutionsDoc {
            grid_size: grid.len(),
            dim,
            per_direction: (0..grid.len())
                .map(|i| formats::DirectionSolutions {
                    index: i,
                    direction: grid.point(i).to_vec(),
                    solutions: cloud.solutions[i].clone(),
                })
                .collect(),
        };
        write_json(&cfg.out.join("solutions.json"), &solutions_doc)?;

        let branches_doc = formats::BranchesDoc {
            profiles: set.profiles.iter().map(formats::profile_doc).collect(),
            global_sigmas: {
                let mut s: Vec<f64> = global_sols.iter().map(|g| g.sigma).collect();
                s.sort_by(f64::total_cmp);
                s.dedup_by(|a, b| (*a - *b).abs() <= cfg.opts.dedup_tol);
                s
            },
            global_rate_candidates: candidates.clone(),
            consistency_diagnostic: diagnostic,
            warnings: set.warnings.clone(),
        };
        write_json(&cfg.out.join("branches.json"), &branches_doc)?;

        let admissibility_doc = formats::AdmissibilityDoc {
            admissible: set
                .admissible
                .iter()
                .map(|(i, r)| (set.profiles[*i].label().to_string(), r.clone()))
                .collect(),
            rejected: set
                .rejected
                .iter()
                .map(|(i, r)| (set.profiles[*i].label().to_string(), r.clone()))
                .collect(),
        };
        write_json(&cfg.out.join("admissibility.json"), &admissibility_doc)?;
        write_json(&cfg.out.join("regularity.json"), &regularity)?;
    }

    if cfg.emit.csv {
        for p in &set.profiles {
            formats::write_profile_csv(&cfg.out.join(format!("profile_{}.csv", p.label())), p)?;
        }
    }

    if cfg.emit.svg && dim == 2 && !set.profiles.is_empty() {
        let finite: Vec<&eigendecay_core::DecayProfile> = set
            .profiles
            .iter()
            .filter(|p| p.finite_everywhere())
            .collect();
        if !finite.is_empty() {
            let doc = svg::profiles_svg(&finite, 1.0, "assembled decay profiles (unit 1)");
            fs::write(cfg.out.join("branches.svg"), doc)?;
        }
    }

    println!(
        "elliptic symbol, degree {}, d = {}; {} sweep solutions over {} directions",
        cfg.poly.degree(),
        dim,
        total_solutions,
        grid.len()
    );
    println!(
        "{} profiles assembled, {} admissible; global rate candidates: {:?}",
        set.profiles.len(),
        set.admissible.len(),
        candidates
    );
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    if total_solutions == 0 {
        eprintln!("no stationarity solutions found anywhere; outputs are empty");
        return Ok(EXIT_EMPTY);
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone)]
pub struct RotinvConfig {
    pub poly: MultiPoly,
    pub lambda: f64,
    pub out: Option<PathBuf>,
}

pub fn cmd_rotinv(cfg: &RotinvConfig) -> Result<i32> {
    let Some(model) = detect_rotation_invariance(&cfg.poly) else {
        eprintln!("not rotation invariant");
        return Ok(EXIT_NOT_ROTINV);
    };
    println!(
        "rotation invariant: G has degree {} (fit residual {:e})",
        model.degree(),
        model.residual
    );
    match solve_rotation_invariant(&model, cfg.lambda) {
        Ok(pairs) => {
            for (sigma, alpha) in &pairs {
                println!("sigma = {sigma}  (alpha = {alpha})");
            }
            if pairs.is_empty() {
                println!("no positive decay rates at lambda = {}", cfg.lambda);
            }
            if let Some(out) = &cfg.out {
                fs::create_dir_all(out)?;
                write_json(
                    &out.join("rotinv.json"),
                    &formats::rotinv_doc(&model, Ok(pairs)),
                )?;
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_INPUT)
        }
    }
}

#[derive(Debug, Clone)]
pub struct OneDConfig {
    pub poly: MultiPoly,
    pub lambda: f64,
    pub out: Option<PathBuf>,
}

pub fn cmd_1d(cfg: &OneDConfig) -> Result<i32> {
    match solve_1d(&cfg.poly, cfg.lambda) {
        Ok(sigmas) => {
            for s in &sigmas {
                println!("sigma = {s}");
            }
            if sigmas.is_empty() {
                println!("no decay rates: Q - lambda has only real roots");
            }
            if let Some(out) = &cfg.out {
                fs::create_dir_all(out)?;
                #[derive(serde::Serialize)]
                struct OneDDoc {
                    lambda: f64,
                    sigmas: Vec<f64>,
                }
                write_json(
                    &out.join("rates_1d.json"),
                    &OneDDoc {
                        lambda: cfg.lambda,
                        sigmas,
                    },
                )?;
            }
            Ok(EXIT_OK)
        }
        Err(e @ SolveError::WrongDimension { .. }) => {
            eprintln!("error: {e}");
            Ok(EXIT_INPUT)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone)]
pub struct SmoothnessConfig {
    pub poly: MultiPoly,
    pub lambda: f64,
    pub theta: Vec<f64>,
    pub opts: SolveOptions,
    pub out: Option<PathBuf>,
}

/// Solves the per-direction system at θ and prints a certificate table for
/// every solution found.
pub fn cmd_smoothness(cfg: &SmoothnessConfig) -> Result<i32> {
    let sols = solve_for_direction(&cfg.poly, cfg.lambda, &cfg.theta, &cfg.opts)?;
    if sols.is_empty() {
        println!("no stationarity solutions at this direction");
        return Ok(EXIT_OK);
    }
    println!(
        "{:>4}  {:>12}  {:>12}  {:>10}  {:>6}  {:>6}  {:>6}",
        "#", "sigma", "cond(Q'')", "|nondeg|", "inv", "beta", "kernel"
    );
    let mut recs = Vec::new();
    for (k, sol) in sols.iter().enumerate() {
        let rep = regularity_check(&cfg.poly, sol, DEFAULT_REGULARITY_TOL);
        println!(
            "{:>4}  {:>12.6e}  {:>12.4e}  {:>10.3e}  {:>6}  {:>6}  {:>6}",
            k,
            sol.sigma,
            rep.hessian_condition,
            rep.nondegeneracy.norm(),
            yes_no(rep.hessian_invertible && rep.nondegenerate),
            yes_no(rep.beta_nonzero),
            rep.kernel_condition_ok.map_or("-", yes_no),
        );
        recs.push(formats::regularity_rec(k, &sol.theta, &rep));
    }
    if let Some(out) = &cfg.out {
        fs::create_dir_all(out)?;
        #[derive(serde::Serialize)]
        struct SmoothnessDoc {
            lambda: f64,
            theta: Vec<f64>,
            entries: Vec<formats::RegularityRec>,
        }
        write_json(
            &out.join("regularity.json"),
            &SmoothnessDoc {
                lambda: cfg.lambda,
                theta: cfg.theta.clone(),
                entries: recs,
            },
        )?;
    }
    Ok(EXIT_OK)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Debug, Clone)]
pub struct ExampleConfig {
    pub model: WedgeModel,
    pub samples: usize,
    pub out: PathBuf,
    pub emit: EmitFlags,
}

/// Emits the reference figure (SVG + CSV companion) for the wedge example.
pub fn cmd_example(cfg: &ExampleConfig) -> Result<i32> {
    fs::create_dir_all(&cfg.out)?;
    if cfg.emit.csv || cfg.emit.json {
        formats::write_figure_csv(&cfg.out.join("figure.csv"), &cfg.model, cfg.samples)?;
    }
    if cfg.emit.svg {
        let doc = svg::figure_svg(&cfg.model, cfg.samples);
        fs::write(cfg.out.join("figure.svg"), doc)?;
    }
    println!(
        "eps = {}, lambda0 = {}, sin(psi) = {}; wrote figure to {}",
        cfg.model.eps,
        cfg.model.lambda0,
        cfg.model.sin_psi(),
        cfg.out.display()
    );
    Ok(EXIT_OK)
}

/// Quick admissibility verdict for a closed-form profile; used by tests and
/// kept here so the report path is exercised end to end.
pub fn report_for(profile: &eigendecay_core::DecayProfile) -> eigendecay_core::AdmissibilityReport {
    admissibility_report(profile)
}
