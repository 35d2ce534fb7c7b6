use std::fmt::Write as _;

use num_complex::Complex64;
use qindex_core::fixtures;
use qindex_core::index3d::{lattice_index, verify_lattice_vs_fourier, FourierGrid};
use qindex_core::integrator::{verify_pentagon_suite, verify_vanishing};
use qindex_core::nzdata::{singularity_rays, QRay};
use qindex_core::qseries::{verify_pentagon_series, verify_psi0_j, verify_symmetries, SeriesReport};
use qindex_core::report::NumReport;
use qindex_core::specialfn::{verify_dopsum, verify_inversion, verify_psi0_symmetries, verify_psi0_triality, verify_triple_product};
use qindex_core::{Error, QContext};
use serde_json::json;

use crate::commands::compiled;
use crate::{Failure, Report, Suite, VerifyArgs};

fn default_nomes() -> Vec<Complex64> {
    vec![Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.05)]
}

/// One line of a suite's outcome.
struct Line {
    json: serde_json::Value,
    passed: bool,
    text: String,
}

fn series_line(r: SeriesReport) -> Line {
    let text = format!("{} to O(q^{}) over {} cases{}", r.suite, r.order, r.cases, r.first_failure.as_deref().map(|f| format!(": {f}")).unwrap_or_default());
    Line { passed: r.passed, json: serde_json::to_value(&r).expect("report serializes"), text }
}

fn num_line(r: NumReport, q: Option<Complex64>) -> Line {
    let at = q.map(|q| format!(" at q={q}")).unwrap_or_default();
    let text = format!("{}{at}: max error {:.3e} (tolerance {:.0e}, {} samples)", r.suite, r.max_error, r.tolerance, r.samples);
    let mut json = serde_json::to_value(&r).expect("report serializes");
    if let Some(q) = q {
        json["q"] = qindex_core::report::complex_json(q);
    }
    Line { passed: r.passed, json, text }
}

fn assemble(suite: &str, lines: Vec<Line>) -> Report {
    let passed = lines.iter().all(|l| l.passed);
    let mut table = String::new();
    for l in &lines {
        writeln!(table, "{} {}", if l.passed { "PASS" } else { "FAIL" }, l.text).expect("write to string");
    }
    writeln!(table, "{} {suite}", if passed { "PASS" } else { "FAIL" }).expect("write to string");
    let reports: Vec<serde_json::Value> = lines.into_iter().map(|l| l.json).collect();
    Report { json: json!({"suite": suite, "status": if passed { "PASS" } else { "FAIL" }, "reports": reports}), table, passed }
}

fn contexts(q: Option<Complex64>) -> Result<Vec<QContext>, Failure> {
    let nomes = q.map(|q| vec![q]).unwrap_or_else(default_nomes);
    nomes.into_iter().map(|q| QContext::new(q).map_err(Failure::from)).collect()
}

pub fn verify(a: &VerifyArgs) -> Result<Report, Failure> {
    let mut lines = Vec::new();
    let name = match a.suite {
        Suite::PentagonSeries => {
            lines.push(series_line(verify_pentagon_series(a.order.unwrap_or(10), a.bound.unwrap_or(2))));
            "pentagon-series"
        }
        Suite::Symmetries => {
            lines.extend(verify_symmetries(a.order.unwrap_or(20), a.bound.unwrap_or(5)).into_iter().map(series_line));
            "symmetries"
        }
        Suite::Dopsum => {
            let n = a.samples.unwrap_or(100);
            for ctx in contexts(a.q)? {
                for alt in [false, true] {
                    lines.push(num_line(verify_dopsum(&ctx, n, a.seed, alt), Some(ctx.q)));
                }
                lines.push(num_line(verify_triple_product(&ctx, n, a.seed), Some(ctx.q)));
            }
            "dopsum"
        }
        Suite::Psi0 => {
            let n = a.samples.unwrap_or(50);
            for ctx in contexts(Some(a.q.unwrap_or(Complex64::new(0.1, 0.0))))? {
                lines.push(num_line(verify_psi0_triality(&ctx, n, a.seed), Some(ctx.q)));
                lines.push(num_line(verify_psi0_symmetries(&ctx, n, a.seed), Some(ctx.q)));
            }
            lines.push(series_line(verify_psi0_j(a.order.unwrap_or(8), a.bound.unwrap_or(2))));
            "psi0"
        }
        Suite::Inversion => {
            let n = a.samples.unwrap_or(100);
            for ctx in contexts(a.q)? {
                lines.push(num_line(verify_inversion(&ctx, n, a.seed), Some(ctx.q)));
            }
            "inversion"
        }
        Suite::PentagonIntegral => {
            let ctx = QContext::new(a.q.unwrap_or(Complex64::new(0.1, 0.0)))?;
            lines.push(num_line(verify_pentagon_suite(&ctx, a.samples.unwrap_or(20), a.seed, 1e-10)?, Some(ctx.q)));
            "pentagon-integral"
        }
        Suite::Thm2 => {
            let q = a.q.unwrap_or(Complex64::new(0.1, 0.0));
            if q.im != 0.0 {
                return Err(Failure::usage("thm2 needs a real nome"));
            }
            let grid = FourierGrid { size: a.grid, ..FourierGrid::default() };
            for source in &a.fixtures {
                let g = crate::commands::load_gluing(source)?;
                let r = verify_lattice_vs_fourier(&g, q.re, a.bound.unwrap_or(2), a.order.unwrap_or(40), &grid, 1e-6)?;
                let mut l = num_line(r, Some(q));
                l.text = format!("{source}: {}", l.text);
                l.json["source"] = json!(source);
                lines.push(l);
            }
            "thm2"
        }
    };
    Ok(assemble(name, lines))
}

const EXAMPLES: [(&str, &str); 4] = [
    ("unknot", "state integral of the two-tetrahedron unknot vanishes at 10 random unit (s, t), q = 0.2"),
    ("fig8", "lattice sum against Fourier coefficients of the 4_1 state integral, |K| <= 1, q = 0.1"),
    ("m003", "lattice sum against Fourier coefficients of the m003 state integral, |K| <= 1, q = 0.1"),
    ("cPcbbbdei", "non-1-efficient triangulation: the index is refused and the singularity rays are listed"),
];

pub fn list_examples() -> Report {
    let mut table = String::new();
    for (n, d) in EXAMPLES {
        writeln!(table, "{n:<10} {d}").expect("write to string");
    }
    let json = json!(EXAMPLES.iter().map(|(n, d)| json!({"name": n, "description": d})).collect::<Vec<_>>());
    Report { json, table, passed: true }
}

pub fn run_example(name: &str) -> Result<Report, Failure> {
    let lines = match name {
        "unknot" => {
            let g = fixtures::gluing("unknot").expect("builtin fixture");
            let ctx = QContext::real(0.2)?;
            let r = verify_vanishing(&compiled(&g)?, &ctx, 10, 7, 1e-8)?;
            vec![num_line(r, Some(ctx.q))]
        }
        "fig8" | "m003" => {
            let g = fixtures::gluing(name).expect("builtin fixture");
            let r = verify_lattice_vs_fourier(&g, 0.1, 1, 40, &FourierGrid::default(), 1e-6)?;
            vec![num_line(r, Some(Complex64::new(0.1, 0.0)))]
        }
        "cPcbbbdei" => {
            let g = fixtures::gluing(name).expect("builtin fixture");
            let refused = match lattice_index(&g, (0, 0), 24) {
                Err(e @ Error::NoStrictAngles { .. }) => Line { passed: true, json: json!({"diagnostic": e.to_string()}), text: format!("index refused: {e}") },
                other => Line { passed: false, json: json!({"unexpected": format!("{other:?}")}), text: format!("index not refused: {other:?}") },
            };
            let rays = singularity_rays(&compiled(&g)?);
            let missing: Vec<_> = fixtures::CPCBBBDEI_RAYS.iter().filter(|&&(r, s, e, t)| !rays.contains(&QRay::int(r, s, e, t))).collect();
            let ray_line = Line {
                passed: missing.is_empty(),
                json: json!({"rays": rays, "missing": missing}),
                text: format!("{} singularity rays, {} of the expected six missing", rays.len(), missing.len()),
            };
            vec![refused, ray_line]
        }
        _ => {
            let known: Vec<&str> = EXAMPLES.iter().map(|e| e.0).collect();
            return Err(Failure::usage(format!("unknown example {name}; known: {}", known.join(", "))));
        }
    };
    Ok(assemble(name, lines))
}
