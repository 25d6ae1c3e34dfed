use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use super::report::{Cell, Report, Table};
use super::{Command, GateInput, GeodesicTarget, RunConfig};
use crate::engine::{action, analytic_bounds, conj_min_time, gate_time, orthogonalizer, AnalyticBound, SpeedLimitResult};
use crate::error::Result;
use crate::geom::{
    check_ad_invariance_with, gate_geodesic_check, gate_geodesic_sweep, survey_geodesic_vectors, GeodesicReport,
    InvarianceReport, TableCell,
};
use crate::matcore::{log_branches, principal_log};
use crate::phfun::{evaluate, ConstraintLevel, PHFunctionSpec, RandersData, StateVector};

/// Absolute error allowed in the bound suite.
const BOUND_TOL: f64 = 1e-9;

fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn shifts_text(shifts: &[i64]) -> String {
    let parts: Vec<String> = shifts.iter().map(|s| s.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

/// Executes a parsed command. The flag is false when the command ran but a
/// check it performs did not pass.
pub fn run(config: &RunConfig) -> Result<(Report, bool)> {
    let tol = &config.tolerances;
    match &config.command {
        Command::Time {
            gate,
            constraint,
            kappa,
            n_max,
        } => {
            let r = gate_time(constraint, *kappa, &gate.gate, *n_max)?;
            Ok((timing_report("time", gate, constraint, &r, json!({ "n_max": n_max })), true))
        }
        Command::Branches { gate, n_max, constraint } => branches(gate, *n_max, constraint.as_ref()),
        Command::Conjmin {
            gate,
            constraint,
            kappa,
            restarts,
        } => {
            let r = conj_min_time(constraint, *kappa, &gate.gate, *restarts, config.seed)?;
            let principal = gate_time(constraint, *kappa, &gate.gate, 0)?;
            let mut report = timing_report(
                "conjmin",
                gate,
                constraint,
                &r,
                json!({ "restarts": restarts, "seed": config.seed, "unconjugated_time": principal.time }),
            );
            report.tables[0].push(vec!["unconjugated_time".into(), principal.time.into()]);
            report.tables[0].push(vec!["restarts".into(), (*restarts).into()]);
            report.tables[0].push(vec!["seed".into(), config.seed.into()]);
            Ok((report, true))
        }
        Command::Action { trajectory, constraint } => {
            let s = action(constraint, trajectory)?;
            let json = json!({
                "command": "action",
                "constraint": constraint.to_json(),
                "label": constraint.label(),
                "samples": trajectory.samples().len(),
                "duration": trajectory.duration(),
                "action": s,
            });
            let table = Table::fields(vec![
                ("constraint", constraint.label().into()),
                ("samples", trajectory.samples().len().into()),
                ("duration", trajectory.duration().into()),
                ("action", s.into()),
            ]);
            Ok((Report { json, tables: vec![table] }, true))
        }
        Command::Invariance {
            constraint,
            dim,
            samples,
        } => {
            let r = check_ad_invariance_with(constraint, *dim, *samples, config.seed, tol.invariance)?;
            Ok((invariance_report("invariance", constraint, *dim, &r), true))
        }
        Command::Classify {
            constraint,
            dim,
            samples,
        } => {
            let r = check_ad_invariance_with(constraint, *dim, *samples, config.seed, tol.invariance)?;
            let mut report = invariance_report("classify", constraint, *dim, &r);
            let yes_no = if r.ad_invariant { "yes" } else { "no" };
            report.tables[0].title = Some(format!("Ad-invariant: {yes_no} ({})", r.cell.verdict()));
            Ok((report, true))
        }
        Command::Geodesic { constraint, target } => match target {
            GeodesicTarget::Gate { gate, sweep: None } => {
                let r = gate_geodesic_check(constraint, &gate.gate, tol.fd_step, tol.geodesic)?;
                Ok((geodesic_report(gate, constraint, &r), true))
            }
            GeodesicTarget::Gate {
                gate,
                sweep: Some(n_max),
            } => {
                let rows = gate_geodesic_sweep(constraint, &gate.gate, *n_max, tol.fd_step, tol.geodesic)?;
                let mut table = Table::new(&["shifts", "normalized_max", "uncertainty", "passes"]);
                let mut entries = Vec::new();
                for (shifts, r) in &rows {
                    table.push(vec![
                        shifts_text(shifts).into(),
                        r.normalized_max.into(),
                        r.normalized_uncertainty.into(),
                        r.passes.into(),
                    ]);
                    entries.push(json!({ "shifts": shifts, "report": value(r) }));
                }
                let json = json!({
                    "command": "geodesic",
                    "gate": gate.spec,
                    "constraint": constraint.to_json(),
                    "label": constraint.label(),
                    "n_max": n_max,
                    "step": tol.fd_step,
                    "threshold": tol.geodesic,
                    "branches": entries,
                });
                Ok((Report { json, tables: vec![table] }, true))
            }
            GeodesicTarget::Survey { dim, samples } => {
                let s = survey_geodesic_vectors(constraint, *dim, *samples, config.seed, tol.fd_step, tol.geodesic)?;
                let mut json = value(&s);
                json["command"] = json!("geodesic");
                json["constraint"] = constraint.to_json();
                json["label"] = json!(constraint.label());
                json["dim"] = json!(dim);
                let first = s.first_failure.map_or(Cell::from("none"), Cell::from);
                let table = Table::fields(vec![
                    ("constraint", constraint.label().into()),
                    ("dim", (*dim).into()),
                    ("samples", s.samples.into()),
                    ("passed", s.passed.into()),
                    ("first_failure", first),
                    ("max_normalized", s.max_normalized.into()),
                    ("threshold", s.threshold.into()),
                    ("seed", s.seed.into()),
                ]);
                Ok((Report { json, tables: vec![table] }, true))
            }
        },
        Command::Reproduce => reproduce(config),
    }
}

fn timing_report(command: &str, gate: &GateInput, f: &PHFunctionSpec, r: &SpeedLimitResult, extra: Value) -> Report {
    let mut json = json!({
        "command": command,
        "gate": gate.spec,
        "constraint": f.to_json(),
        "label": f.label(),
        "result": value(r),
    });
    if let (Some(obj), Value::Object(more)) = (json.as_object_mut(), extra) {
        obj.extend(more);
    }
    let table = Table::fields(vec![
        ("constraint", f.label().into()),
        ("gate", gate.spec.clone().into()),
        ("kappa", r.kappa.into()),
        ("time", r.time.into()),
        ("f_value", r.f_value.into()),
        ("branch_shifts", shifts_text(&r.branch.shifts).into()),
        ("branches_considered", r.diagnostics.branches_considered.into()),
        ("converged", r.diagnostics.converged.into()),
    ]);
    Report { json, tables: vec![table] }
}

fn branches(gate: &GateInput, n_max: u32, f: Option<&PHFunctionSpec>) -> Result<(Report, bool)> {
    let principal = principal_log(&gate.gate).ok();
    let list = log_branches(&gate.gate, n_max)?;
    let mut headers = vec!["index", "shifts", "norm", "principal"];
    if f.is_some() {
        headers.push("f_value");
    }
    let mut table = Table::new(&headers);
    let mut entries = Vec::new();
    for (k, b) in list.iter().enumerate() {
        let is_principal = principal
            .as_ref()
            .is_some_and(|p| p.value.matrix().max_abs_diff(b.value.matrix()) < 1e-12);
        let mut row = vec![k.into(), shifts_text(&b.shifts).into(), b.value.norm().into(), is_principal.into()];
        let mut entry = json!({
            "shifts": b.shifts,
            "angles": b.angles,
            "norm": b.value.norm(),
            "principal": is_principal,
            "value": value(&b.value),
        });
        if let Some(f) = f {
            let v = evaluate(f, &b.value)?;
            row.push(v.into());
            entry["f_value"] = json!(v);
        }
        table.push(row);
        entries.push(entry);
    }
    let mut json = json!({
        "command": "branches",
        "gate": gate.spec,
        "n_max": n_max,
        "branches": entries,
    });
    if let Some(f) = f {
        json["constraint"] = f.to_json();
        json["label"] = json!(f.label());
    }
    Ok((Report { json, tables: vec![table] }, true))
}

fn invariance_report(command: &str, f: &PHFunctionSpec, dim: usize, r: &InvarianceReport) -> Report {
    let mut json = value(r);
    json["command"] = json!(command);
    json["constraint"] = f.to_json();
    json["label"] = json!(f.label());
    json["dim"] = json!(dim);
    let table = Table::fields(vec![
        ("constraint", f.label().into()),
        ("dim", dim.into()),
        ("ad_invariant", r.ad_invariant.into()),
        ("is_norm", r.is_norm.into()),
        ("max_deviation", r.max_deviation.into()),
        ("threshold", r.threshold.into()),
        ("samples", r.samples.into()),
        ("seed", r.seed.into()),
        ("table_cell", r.table_cell.clone().into()),
    ]);
    Report { json, tables: vec![table] }
}

fn geodesic_report(gate: &GateInput, f: &PHFunctionSpec, r: &GeodesicReport) -> Report {
    let mut json = value(r);
    json["command"] = json!("geodesic");
    json["gate"] = json!(gate.spec);
    json["constraint"] = f.to_json();
    json["label"] = json!(f.label());
    let summary = Table::fields(vec![
        ("constraint", f.label().into()),
        ("gate", gate.spec.clone().into()),
        ("f_value", r.f_value.into()),
        ("normalized_max", r.normalized_max.into()),
        ("normalized_uncertainty", r.normalized_uncertainty.into()),
        ("threshold", r.threshold.into()),
        ("passes", r.passes.into()),
    ]);
    let mut residuals = Table::new(&["basis_index", "residual"]);
    for (k, x) in r.residuals.iter().enumerate() {
        residuals.push(vec![k.into(), (*x).into()]);
    }
    Report {
        json,
        tables: vec![summary, residuals],
    }
}

/// Catalog classified by `reproduce`, with the expected table cell at N = 2.
fn catalog() -> Result<Vec<(PHFunctionSpec, TableCell)>> {
    let ket0 = StateVector::basis(2, 0)?;
    let skewed = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
    Ok(vec![
        (PHFunctionSpec::schatten(1.0)?, TableCell::NormInvariant),
        (PHFunctionSpec::schatten(2.0)?, TableCell::NormInvariant),
        (PHFunctionSpec::operator_norm(), TableCell::NormInvariant),
        (PHFunctionSpec::OpShifted, TableCell::NormInvariant),
        (
            PHFunctionSpec::max(PHFunctionSpec::schatten(2.0)?, PHFunctionSpec::OpShifted)?,
            TableCell::NormInvariant,
        ),
        (PHFunctionSpec::ml(1.0, ket0.clone())?, TableCell::PhNotInvariant),
        (PHFunctionSpec::ml(2.0, ket0.clone())?, TableCell::PhNotInvariant),
        (PHFunctionSpec::mt(ket0), TableCell::PhNotInvariant),
        (
            PHFunctionSpec::randers(RandersData::new(skewed, DVector::zeros(3))?),
            TableCell::NormNotInvariant,
        ),
        (
            PHFunctionSpec::randers(RandersData::with_identity_metric(2, DVector::from_vec(vec![0.3, 0.0, 0.1]))?),
            TableCell::PhNotInvariant,
        ),
    ])
}

fn reproduce(config: &RunConfig) -> Result<(Report, bool)> {
    let one = ConstraintLevel::new(1.0)?;
    let mut bounds_table = Table::new(&["bound", "N", "expected", "computed", "abs_error", "status"])
        .titled("Orthogonalizer times against closed forms (kappa = 1)");
    let mut bound_rows = Vec::new();
    let mut all_pass = true;
    let bounds = [
        AnalyticBound::Ml { p: 1.0 },
        AnalyticBound::Ml { p: 2.0 },
        AnalyticBound::Ml { p: 3.0 },
        AnalyticBound::Mt,
        AnalyticBound::Opnorm,
    ];
    for bound in bounds {
        for n in 2..=4 {
            let ket0 = StateVector::basis(n, 0)?;
            let f = match bound {
                AnalyticBound::Ml { p } => PHFunctionSpec::ml(p, ket0)?,
                AnalyticBound::Mt => PHFunctionSpec::mt(ket0),
                AnalyticBound::Opnorm => PHFunctionSpec::OpShifted,
            };
            let expected = analytic_bounds(bound, 1.0)?;
            let computed = gate_time(&f, one, &orthogonalizer(PI, n)?, 2)?.time;
            let error = (computed - expected).abs();
            let pass = error < BOUND_TOL;
            all_pass &= pass;
            bounds_table.push(vec![
                bound.label().into(),
                n.into(),
                expected.into(),
                computed.into(),
                error.into(),
                if pass { "PASS" } else { "FAIL" }.into(),
            ]);
            bound_rows.push(json!({
                "bound": bound.label(),
                "dim": n,
                "expected": expected,
                "computed": computed,
                "abs_error": error,
                "pass": pass,
            }));
        }
    }

    let mut class_table = Table::new(&["constraint", "ad_invariant", "is_norm", "max_deviation", "cell", "status"])
        .titled(&format!("Classification at N = 2 (seed {})", config.seed));
    let mut class_rows = Vec::new();
    for (f, expected) in catalog()? {
        let r = check_ad_invariance_with(&f, 2, 200, config.seed, config.tolerances.invariance)?;
        let pass = r.cell == expected;
        all_pass &= pass;
        class_table.push(vec![
            f.label().into(),
            r.ad_invariant.into(),
            r.is_norm.into(),
            r.max_deviation.into(),
            format!("{} / {}", r.cell.row(), r.cell.column()).into(),
            if pass { "PASS" } else { "FAIL" }.into(),
        ]);
        class_rows.push(json!({
            "constraint": f.label(),
            "report": value(&r),
            "expected_cell": value(&expected),
            "pass": pass,
        }));
    }

    let json = json!({
        "command": "reproduce",
        "seed": config.seed,
        "bound_tolerance": BOUND_TOL,
        "bounds": bound_rows,
        "classification": class_rows,
        "all_pass": all_pass,
    });
    Ok((
        Report {
            json,
            tables: vec![bounds_table, class_table],
        },
        all_pass,
    ))
}
