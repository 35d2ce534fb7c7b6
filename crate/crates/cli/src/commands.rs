use std::fmt::Write as _;

use num_complex::Complex64;
use qindex_core::fixtures;
use qindex_core::index3d::{
    fourier_coefficients, lattice_index_with, resolve_prefactor_convention, Convention, ExponentLattice, FourierGrid,
};
use qindex_core::integrator::integrate;
use qindex_core::nzdata::{compile_integrand, parse_gluing, select_quad, singularity_rays, Peripheral};
use qindex_core::qseries::{i_delta_hat, tet_index_series};
use qindex_core::report::complex_json;
use qindex_core::{BalancedIntegrand, GluingData, QContext};
use serde_json::json;

use crate::{ConventionArg, Failure, Report};

/// Probe nome of `--convention auto`.
const PROBE_Q: f64 = 0.1;

/// A builtin fixture by name, or else a gluing file.
pub fn load_gluing(source: &str) -> Result<GluingData, Failure> {
    if let Some(g) = fixtures::gluing(source) {
        return Ok(g);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| Failure::input(format!("{source} is neither a fixture ({}) nor a readable file: {e}", fixtures::NAMES.join(", "))))?;
    Ok(parse_gluing(&text)?)
}

pub fn compiled(g: &GluingData) -> Result<BalancedIntegrand, Failure> {
    Ok(compile_integrand(g, &select_quad(g)?)?)
}

pub fn tetindex(m: i64, e: i64, order: i64, hat: bool) -> Result<Report, Failure> {
    if order < 0 {
        return Err(Failure::usage("order must be non-negative"));
    }
    let s = if hat { i_delta_hat(m, e, order) } else { tet_index_series(m, e, order) };
    let name = if hat { "I^Delta" } else { "I_Delta" };
    Ok(Report {
        json: json!({"function": name, "m": m, "e": e, "order": order, "series": s}),
        table: format!("{s}\n"),
        passed: true,
    })
}

pub fn index3d(source: &str, key: (i64, i64), order: i64, conv: ConventionArg, cap: i64) -> Result<Report, Failure> {
    let g = load_gluing(source)?;
    let (convention, probe) = match conv {
        ConventionArg::OncePerPoint => (Convention::OncePerPoint, None),
        ConventionArg::PerTetrahedron => (Convention::PerTetrahedron, None),
        ConventionArg::Derived => (Convention::Derived, None),
        ConventionArg::Auto => {
            let r = resolve_prefactor_convention(&g, PROBE_Q)?;
            (r.convention, Some(r))
        }
    };
    let entry = lattice_index_with(&g, key, order, convention, cap)?;
    let lat = ExponentLattice::of(&compiled(&g)?);
    let (lm, le) = lat.label(key);
    let mut out = entry.to_json();
    out["source"] = json!(source);
    out["order"] = json!(order);
    out["label"] = json!([lm.to_string(), le.to_string()]);
    out["points"] = json!(entry.points);
    if let Some(p) = probe {
        out["probe"] = json!({"q": PROBE_Q, "mismatches": p.mismatches});
    }
    Ok(Report {
        table: format!("{source} K=({}, {}) label=({lm}, {le}) [{}]: {}\n", key.0, key.1, convention.tag(), entry.series),
        json: out,
        passed: true,
    })
}

fn integrand_for(source: &str, hand: bool) -> Result<BalancedIntegrand, Failure> {
    if hand {
        return fixtures::hand_integrand(source, true).ok_or_else(|| Failure::input(format!("no hand-derived integrand for {source}")));
    }
    compiled(&load_gluing(source)?)
}

pub fn integral(source: &str, q: Complex64, s: Complex64, t: Complex64, tol: f64, hand: bool) -> Result<Report, Failure> {
    let bi = integrand_for(source, hand)?;
    let ctx = QContext::new(q)?;
    let r = integrate(&bi, &ctx, &Peripheral::from_st(&ctx, s, t), tol)?;
    let mut out = r.to_json();
    out["source"] = json!(source);
    out["integrand"] = json!(if hand { "hand-derived" } else { "compiled" });
    out["q"] = complex_json(q);
    out["s"] = complex_json(s);
    out["t"] = complex_json(t);
    out["tol"] = json!(tol);
    Ok(Report {
        table: format!("{source} q={q} s={s} t={t}: {:.15e} ± {:.1e} (grid {})\n", r.value, r.est_err, r.grid_used),
        json: out,
        passed: true,
    })
}

pub fn fourier(source: &str, q: f64, mmax: i64, emax: i64, grid: usize, tol: f64) -> Result<Report, Failure> {
    if mmax < 0 || emax < 0 {
        return Err(Failure::usage("--mmax and --emax must be non-negative"));
    }
    let g = load_gluing(source)?;
    let ctx = QContext::real(q)?;
    let keys: Vec<(i64, i64)> = (-mmax..=mmax).flat_map(|m| (-emax..=emax).map(move |e| (m, e))).collect();
    let spec = FourierGrid { size: grid, tol };
    let vals = fourier_coefficients(&g, &ctx, &keys, &spec)?;
    let mut table = String::new();
    let entries: Vec<serde_json::Value> = keys
        .iter()
        .zip(&vals)
        .map(|(k, v)| {
            let _ = writeln!(table, "{:>3} {:>3}  {:+.12e} {:+.12e}", k.0, k.1, v.re, v.im);
            json!({"m": k.0, "e": k.1, "value": complex_json(*v)})
        })
        .collect();
    Ok(Report {
        json: json!({"source": source, "q": q, "grid": grid, "tol": tol, "provenance": "fourier", "entries": entries}),
        table,
        passed: true,
    })
}

pub fn rays(source: &str) -> Result<Report, Failure> {
    let g = load_gluing(source)?;
    let rays = singularity_rays(&compiled(&g)?);
    let mut table = String::new();
    for r in &rays {
        match r.eps_t() {
            Some((a, b, eps, t)) => writeln!(table, "r={a} s={b} eps={eps} t={t}"),
            None => writeln!(table, "r={} s={} c={}", r.r, r.s, r.c),
        }
        .expect("write to string");
    }
    let tuples: Vec<serde_json::Value> = rays.iter().map(|r| json!({"ray": r, "rset": r.eps_t()})).collect();
    Ok(Report { json: json!({"source": source, "rays": tuples}), table, passed: true })
}
