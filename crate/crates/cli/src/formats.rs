//! File formats: polynomial JSON input, report JSON documents, profile CSV.
//!
//! All writers are byte-deterministic: struct field order fixes JSON key
//! order, floats print with the shortest round-trip representation, CSV uses
//! '.' decimals and '\n' line endings. Infinite σ entries serialize as
//! `null` in JSON and `inf` in CSV.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use eigendecay_core::poly::format_poly;
use eigendecay_core::smooth::RegularityReport;
use eigendecay_core::{
    AdmissibilityReport, CriticalValueSet, DecayProfile, EllipticityCertificate, MultiPoly,
    RotInvModel, StationarySolution, WedgeModel,
};

/// Polynomial input document: `{"dim": d, "terms": [{"alpha": [...],
/// "coeff": c}, ...]}`. Duplicate multi-indices are summed.
#[derive(Debug, Serialize, Deserialize)]
pub struct PolyFile {
    pub dim: usize,
    pub terms: Vec<PolyTerm>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PolyTerm {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

pub fn load_poly(path: &Path) -> Result<MultiPoly> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read polynomial file {}", path.display()))?;
    let doc: PolyFile = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse polynomial JSON {}", path.display()))?;
    MultiPoly::new(doc.dim, doc.terms.into_iter().map(|t| (t.alpha, t.coeff)))
        .map_err(|e| anyhow::anyhow!("invalid polynomial: {e}"))
}

pub fn poly_to_file(p: &MultiPoly) -> PolyFile {
    PolyFile {
        dim: p.dim(),
        terms: p
            .terms()
            .map(|(alpha, coeff)| PolyTerm {
                alpha: alpha.clone(),
                coeff,
            })
            .collect(),
    }
}

/// Builds a polynomial from a builtin spec: `"laplacian_power k"` for
/// `|ξ|^{2k}` or `"section4 eps"` for the quartic wedge example.
pub fn build_builtin(spec: &str, dim: usize) -> Result<MultiPoly> {
    let mut it = spec.split_whitespace();
    let name = it.next().unwrap_or("");
    let arg = it.next();
    if it.next().is_some() {
        bail!("builtin spec has too many arguments: {spec:?}");
    }
    match name {
        "laplacian_power" => {
            let k: u32 = arg
                .context("laplacian_power needs an exponent, e.g. \"laplacian_power 2\"")?
                .parse()
                .context("laplacian_power exponent must be a positive integer")?;
            if k == 0 {
                bail!("laplacian_power exponent must be at least 1");
            }
            Ok(MultiPoly::laplacian_power(dim, k))
        }
        "section4" => {
            let eps: f64 = arg
                .context("section4 needs eps, e.g. \"section4 0.2373\"")?
                .parse()
                .context("section4 eps must be a real number")?;
            let model =
                WedgeModel::new(dim.max(2), eps).map_err(|e| anyhow::anyhow!("section4: {e}"))?;
            if dim < 2 {
                bail!("section4 needs dimension at least 2");
            }
            Ok(model.operator())
        }
        other => bail!("unknown builtin {other:?} (expected laplacian_power or section4)"),
    }
}

#[derive(Debug, Serialize)]
pub struct CertificateDoc {
    pub polynomial: PolyFile,
    pub rendered: String,
    pub lambda: f64,
    pub ellipticity: EllipticityCertificate,
    pub rotation_invariance: Option<RotInvDoc>,
    pub critical_values: Option<CriticalDoc>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RotInvDoc {
    pub g_coeffs: Vec<f64>,
    pub residual: f64,
    /// (σ, α) pairs of the univariate reduction, when λ is not exceptional.
    pub rates: Option<Vec<(f64, f64)>>,
    pub exceptional: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CriticalDoc {
    pub values: Vec<Complex<f64>>,
    pub count_bound: usize,
    pub possibly_incomplete: bool,
    /// Diagnostic for spurious solutions: λ within dedup tolerance of a
    /// critical value of Q.
    pub lambda_is_critical: bool,
    pub lambda_distance: f64,
}

pub fn critical_doc(set: &CriticalValueSet, lambda: f64, dedup_tol: f64) -> CriticalDoc {
    let dist = set.distance_to(lambda);
    CriticalDoc {
        values: set.values.clone(),
        count_bound: set.count_bound,
        possibly_incomplete: set.possibly_incomplete,
        lambda_is_critical: dist <= dedup_tol,
        lambda_distance: dist,
    }
}

pub fn rotinv_doc(model: &RotInvModel, rates: Result<Vec<(f64, f64)>, String>) -> RotInvDoc {
    let (rates, exceptional) = match rates {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e)),
    };
    RotInvDoc {
        g_coeffs: model.g_coeffs.clone(),
        residual: model.residual,
        rates,
        exceptional,
    }
}

#[derive(Debug, Serialize)]
pub struct SolutionsDoc {
    pub grid_size: usize,
    pub dim: usize,
    pub per_direction: Vec<DirectionSolutions>,
}

#[derive(Debug, Serialize)]
pub struct DirectionSolutions {
    pub index: usize,
    pub direction: Vec<f64>,
    pub solutions: Vec<StationarySolution>,
}

#[derive(Debug, Serialize)]
pub struct BranchesDoc {
    pub profiles: Vec<ProfileDoc>,
    pub global_sigmas: Vec<f64>,
    pub global_rate_candidates: Vec<f64>,
    pub consistency_diagnostic: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ProfileDoc {
    pub label: String,
    pub finite: bool,
    pub min_sigma: Option<f64>,
    /// σ per grid direction; `null` marks σ = ∞.
    pub sigmas: Vec<Option<f64>>,
}

pub fn profile_doc(p: &DecayProfile) -> ProfileDoc {
    ProfileDoc {
        label: p.label().to_string(),
        finite: p.finite_everywhere(),
        min_sigma: p.finite_everywhere().then(|| p.sigma_g()),
        sigmas: p
            .sigmas()
            .iter()
            .map(|&s| s.is_finite().then_some(s))
            .collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct AdmissibilityDoc {
    pub admissible: Vec<(String, AdmissibilityReport)>,
    pub rejected: Vec<(String, AdmissibilityReport)>,
}

/// JSON mirror of [`RegularityReport`] (the in-memory report holds the h'
/// matrix, serialized here as complex entries).
#[derive(Debug, Serialize)]
pub struct RegularityRec {
    pub index: usize,
    pub direction: Vec<f64>,
    pub hessian_invertible: bool,
    pub hessian_condition: f64,
    pub nondegeneracy: Complex<f64>,
    pub nondegenerate: bool,
    pub beta_nonzero: bool,
    pub h_prime: Option<Vec<Vec<Complex<f64>>>>,
    pub kernel_condition_ok: Option<bool>,
    pub kernel_min_singular: Option<f64>,
}

pub fn regularity_rec(index: usize, direction: &[f64], rep: &RegularityReport) -> RegularityRec {
    let h_prime = rep.h_prime.as_ref().map(|m| {
        let mat = m.matrix();
        (0..mat.nrows())
            .map(|i| (0..mat.ncols()).map(|j| mat[(i, j)]).collect())
            .collect()
    });
    RegularityRec {
        index,
        direction: direction.to_vec(),
        hessian_invertible: rep.hessian_invertible,
        hessian_condition: rep.hessian_condition,
        nondegeneracy: rep.nondegeneracy,
        nondegenerate: rep.nondegenerate,
        beta_nonzero: rep.beta_nonzero,
        h_prime,
        kernel_condition_ok: rep.kernel_condition_ok,
        kernel_min_singular: rep.kernel_min_singular,
    }
}

#[derive(Debug, Serialize)]
pub struct RegularityDoc {
    pub profiles: Vec<ProfileRegularity>,
}

#[derive(Debug, Serialize)]
pub struct ProfileRegularity {
    pub label: String,
    pub entries: Vec<RegularityRec>,
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_infinite() && v > 0.0 {
        "inf".to_string()
    } else {
        "nan".to_string()
    }
}

/// Profile CSV: `angle_rad,sigma` for d = 2, `x,y,z,sigma` point cloud for
/// d = 3.
pub fn write_profile_csv(path: &Path, p: &DecayProfile) -> Result<()> {
    let mut out = fs::File::create(path)?;
    if p.dim() == 2 {
        out.write_all(b"angle_rad,sigma\n")?;
        for i in 0..p.len() {
            writeln!(
                out,
                "{},{}",
                fmt_f64(p.grid().angle(i)),
                fmt_f64(p.sigmas()[i])
            )?;
        }
    } else {
        out.write_all(b"x,y,z,sigma\n")?;
        for i in 0..p.len() {
            let w = p.grid().point(i);
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(w[0]),
                fmt_f64(w[1]),
                fmt_f64(w[2]),
                fmt_f64(p.sigmas()[i])
            )?;
        }
    }
    Ok(())
}

/// Reference-figure CSV: `angle_rad, sigma_case1..4, sigma_s_c, sigma_loc_c`.
pub fn write_figure_csv(path: &Path, model: &WedgeModel, n: usize) -> Result<()> {
    use eigendecay_core::BranchCase;
    let mut out = fs::File::create(path)?;
    out.write_all(b"angle_rad,sigma_case1,sigma_case2,sigma_case3,sigma_case4,sigma_s_c,sigma_loc_c\n")?;
    for i in 0..n {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let wd = phi.sin();
        let mut row = vec![fmt_f64(phi)];
        for case in BranchCase::ALL {
            row.push(fmt_f64(model.branch_sigma(case, wd).expect("valid ω_d")));
        }
        row.push(fmt_f64(model.sigma_s_case_c(wd)));
        row.push(fmt_f64(
            model.sigma_loc_reference(eigendecay_core::RefCase::C, wd),
        ));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Renders a polynomial for log lines.
pub fn render(p: &MultiPoly) -> String {
    format_poly(p)
}
