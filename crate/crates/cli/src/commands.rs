use std::path::Path;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use subspace_lab::arith::algebraic::parse_algebraic_real;
use subspace_lab::bounds::comparison_table;
use subspace_lab::config::{parse_form_system, parse_rational, parse_vector_file};
use subspace_lab::filtration::exceptional_subspace;
use subspace_lab::gap::{class_count_bound, parse_partition_parameter, small_solution_classes, window_subspace, Grid};
use subspace_lab::report::REPORT_BITS;
use subspace_lab::roth::{audit_gap_principle, classify_solution, roth_bounds, scan_roth};
use subspace_lab::systems::{enumerate_solutions, FormSystem};
use subspace_lab::{Error, Rational, Result};

use crate::output::Report;
use crate::{RothCommand, SubspaceCommand};

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Internal(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<FormSystem> {
    parse_form_system(&read(path)?)
}

fn positive_integer(text: &str, what: &str) -> Result<BigInt> {
    let r = parse_rational(text)?;
    if !r.is_integer() || !r.is_positive() {
        return Err(Error::InvalidInput(format!("{what} must be a positive integer")));
    }
    Ok(r.to_integer())
}

pub fn roth(command: RothCommand) -> Result<Report> {
    match command {
        RothCommand::Scan { xi, delta, max_height } => {
            let x = parse_algebraic_real(&xi)?;
            let d = parse_rational(&delta)?;
            let b = positive_integer(&max_height, "max-height")?;
            let solutions = scan_roth(&x, &d, &b)?;
            let violations = audit_gap_principle(&solutions, &d)?;
            let mut rows = Vec::with_capacity(solutions.len());
            for s in &solutions {
                let mut v = to_json(s)?;
                v["size_class"] = to_json(&classify_solution(s, &x)?)?;
                rows.push(v);
            }
            let status = if violations.is_empty() { 0 } else { 2 };
            let json = json!({
                "xi": xi,
                "delta": d.to_string(),
                "max_height": b.to_string(),
                "gap_audit": if violations.is_empty() { "pass" } else { "fail" },
                "violations": to_json(&violations)?,
                "solutions": rows,
            });
            Ok(Report::new(json, "solutions").with_status(status))
        }
        RothCommand::Bounds { xi, delta } => {
            let x = parse_algebraic_real(&xi)?;
            let d = parse_rational(&delta)?;
            let b = roth_bounds(x.degree() as u32, &d, &x.height()?, REPORT_BITS)?;
            let rows = vec![to_json(&b.large_bound)?, to_json(&b.small_bound)?];
            let json = json!({
                "xi": xi,
                "delta": d.to_string(),
                "m": b.m.to_string(),
                "omega": b.omega.to_string(),
                "c_log": b.c_log.map(|c| c.to_string()),
                "bounds": rows,
            });
            Ok(Report::new(json, "bounds"))
        }
    }
}

pub fn subspace(command: SubspaceCommand) -> Result<Report> {
    match command {
        SubspaceCommand::Scan { system, max_height } => {
            let sys = load_system(&system)?;
            let b = positive_integer(&max_height, "max-height")?;
            let e = enumerate_solutions(&sys, &b)?;
            let status = if e.boundary.is_empty() { 0 } else { 3 };
            Ok(Report::new(to_json(&e)?, "solutions").with_status(status))
        }
        SubspaceCommand::Cluster { system, max_height, window_q } => {
            let sys = load_system(&system)?;
            let b = positive_integer(&max_height, "max-height")?;
            let q = parse_rational(&window_q)?;
            let e = enumerate_solutions(&sys, &b)?;
            let window = window_subspace(&sys, &e.solutions, &q)?;
            let small = small_solution_classes(&sys, &e.solutions, &q)?;
            let mut clusters = vec![json!({
                "kind": "window",
                "label": format!("[{q}, {})", window.upper),
                "members": window.members.len(),
                "dim": window.subspace.dim(),
                "certified_tuples": window.certified_tuples,
                "basis": to_json(&window.subspace)?["basis"],
            })];
            for c in &small.classes {
                clusters.push(json!({
                    "kind": "class",
                    "label": c.class.to_string(),
                    "members": c.members.len(),
                    "dim": c.subspace.dim(),
                    "certified_tuples": c.certified_tuples,
                    "basis": to_json(&c.subspace)?["basis"],
                }));
            }
            let status = if e.boundary.is_empty() { 0 } else { 3 };
            let json = json!({
                "n": sys.n,
                "delta": sys.delta.to_string(),
                "max_height": b.to_string(),
                "window_q": q.to_string(),
                "solutions": e.solutions.len(),
                "boundary": to_json(&e.boundary)?,
                "window": to_json(&window)?,
                "small_classes": to_json(&small)?,
                "clusters": clusters,
            });
            Ok(Report::new(json, "clusters").with_status(status))
        }
        SubspaceCommand::U0 { system } => {
            let sys = load_system(&system)?;
            let r = exceptional_subspace(&sys)?;
            let mut json = to_json(&r)?;
            json["n"] = json!(sys.n);
            json["delta"] = json!(sys.delta.to_string());
            let status = if r.diagnostics.is_empty() { 0 } else { 2 };
            Ok(Report::new(json, "candidates").with_status(status))
        }
        SubspaceCommand::Bounds { system, n, delta, r, d, h } => {
            let (n, delta, r, d, h) = match system {
                Some(p) => {
                    let sys = load_system(&p)?;
                    (sys.n as u32, sys.delta, Rational::from(BigInt::from(sys.meta.r)), Rational::from(BigInt::from(sys.meta.d)), sys.meta.h)
                }
                None => {
                    let n = n.ok_or_else(|| Error::InvalidInput("--n is required".into()))?;
                    let delta = parse_rational(delta.as_deref().unwrap_or_default())?;
                    let r = match r {
                        Some(r) => parse_rational(&r)?,
                        None => Rational::from(BigInt::from(n)),
                    };
                    (n, delta, r, parse_rational(&d)?, parse_rational(&h)?)
                }
            };
            let table = comparison_table(n, &delta, &r, &d, &h, REPORT_BITS)?;
            let json = json!({
                "n": n,
                "delta": delta.to_string(),
                "R": r.to_string(),
                "D": d.to_string(),
                "H": h.to_string(),
                "bounds": to_json(&table)?,
            });
            Ok(Report::new(json, "bounds"))
        }
        SubspaceCommand::Partition { vectors, m } => {
            let param = parse_partition_parameter(&m)?;
            let ys = parse_vector_file(&read(&vectors)?)?;
            let n = ys.first().map(Vec::len).ok_or_else(|| Error::InvalidInput("no vectors".into()))?;
            let grid = Grid::new(n, &param)?;
            let classes = ys.par_iter().map(|y| grid.assign(y)).collect::<Result<Vec<_>>>()?;
            let rows: Vec<Value> = ys
                .iter()
                .zip(&classes)
                .enumerate()
                .map(|(i, (y, c))| {
                    let v: Vec<String> = y.iter().map(|z| format!("{}:{}", z.re, z.im)).collect();
                    json!({ "index": i, "vector": v.join(" "), "class": c.to_string() })
                })
                .collect();
            let json = json!({
                "n": n,
                "M": param.to_string(),
                "grid": to_json(&grid)?,
                "counts": to_json(&class_count_bound(n, &param, 1)?)?,
                "assignments": rows,
            });
            Ok(Report::new(json, "assignments"))
        }
    }
}
