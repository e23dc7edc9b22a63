use std::io::Write;

use fejer_core::apnum::ApFloat;
use fejer_core::conjecture::{conjecture_power_formula, explore_knot_family, ConjectureError};
use fejer_core::exact_identities::{inverse_power_sum, verify_identity_2, IdentityError};
use fejer_core::hermite_fejer::{FundamentalBasis, HermiteFejerError};
use fejer_core::knots::{KnotError, KnotFamily};
use fejer_core::ratpoly::{format_rational, ExactRational};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    Cli, Command, ConjectureArgs, ConstructionName, KnotsArgs, OutputMode, PowerSumArgs, VerifyEq1Args,
    VerifyIdentityArgs,
};
use crate::CliError;

/// Runs the parsed command; `Ok(true)` when every check passed.
pub(crate) fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<bool, CliError> {
    let mut sink = Sink { out, mode: cli.output };
    let prec = cli.precision_bits;
    match &cli.command {
        Command::Knots(a) => knots(a, prec, &mut sink),
        Command::VerifyEq1(a) => verify_eq1(a, prec, &mut sink),
        Command::VerifyIdentity(a) => verify_identity(a, &mut sink),
        Command::PowerSum(a) => power_sum(a, prec, &mut sink),
        Command::Conjecture(a) => conjecture(a, prec, &mut sink),
    }
}

struct Sink<'a> {
    out: &'a mut dyn Write,
    mode: OutputMode,
}

impl Sink<'_> {
    fn emit(&mut self, record: &Value, text: impl FnOnce() -> String) -> Result<(), CliError> {
        match self.mode {
            OutputMode::Json => writeln!(self.out, "{record}")?,
            OutputMode::Text => writeln!(self.out, "{}", text())?,
        }
        Ok(())
    }
}

/// Maps items in parallel and hands results to `emit` in input order,
/// flushing after each block so long sweeps stream.
fn ordered_sweep<T, R, F, E>(items: &[T], sink: &mut Sink, work: F, mut emit: E) -> Result<(), CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
    E: FnMut(&mut Sink, R) -> Result<(), CliError>,
{
    let block = 2 * rayon::current_num_threads().max(1);
    for chunk in items.chunks(block) {
        let results: Vec<R> = chunk.par_iter().map(&work).collect();
        for r in results {
            emit(sink, r)?;
        }
        sink.out.flush()?;
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("records serialize to JSON")
}

fn knot_error(e: KnotError) -> CliError {
    match e {
        KnotError::ConvergenceFailure { .. } | KnotError::GapTooSmall { .. } => {
            CliError::Failure(e.to_string())
        }
        _ => CliError::Usage(e.to_string()),
    }
}

fn identity_error(e: IdentityError) -> CliError {
    CliError::Usage(e.to_string())
}

fn basis_error(e: HermiteFejerError) -> CliError {
    match e {
        HermiteFejerError::Knots(k) => knot_error(k),
        other => CliError::Usage(other.to_string()),
    }
}

fn knots(a: &KnotsArgs, prec: u32, sink: &mut Sink) -> Result<bool, CliError> {
    let set = a.family.family().generate(a.n, prec).map_err(knot_error)?;
    let record = to_value(&set);
    sink.emit(&record, || {
        let pts: Vec<String> = set.points().iter().map(ToString::to_string).collect();
        format!("{} n={}\n{}", set.family(), set.n(), pts.join("\n"))
    })?;
    Ok(true)
}

fn verify_eq1(a: &VerifyEq1Args, prec: u32, sink: &mut Sink) -> Result<bool, CliError> {
    let family = a.family.family();
    let ns: Vec<usize> = match (a.n, a.n_max) {
        (Some(n), _) => vec![n],
        (None, Some(max)) => (a.n_min.unwrap_or(2)..=max).collect(),
        (None, None) => unreachable!("clap requires --n or --n-max"),
    };
    if ns.is_empty() {
        return Err(CliError::Usage("empty range of n".into()));
    }
    let ps: Vec<usize> = match (a.p, a.p_max) {
        (Some(p), _) => vec![p],
        (None, Some(max)) => (1..=max).collect(),
        (None, None) => unreachable!("clap requires --p or --p-max"),
    };
    if ps.contains(&0) || ps.is_empty() {
        return Err(basis_error(HermiteFejerError::ZeroOrder));
    }
    let closed_form = a.construction == ConstructionName::ClosedForm;
    if closed_form && family != KnotFamily::Chebyshev1 {
        return Err(CliError::Usage("--construction closed-form requires --family chebyshev1".into()));
    }
    // Validate every n up front so configuration errors surface before output.
    for &n in &ns {
        if n == 0 {
            return Err(knot_error(KnotError::InvalidCount { n, min: 1 }));
        }
    }
    let build = |n: &usize| -> Result<FundamentalBasis, CliError> {
        if closed_form {
            FundamentalBasis::chebyshev_closed_form(*n, prec).map_err(basis_error)
        } else {
            Ok(FundamentalBasis::general(&family.generate(*n, prec).map_err(knot_error)?))
        }
    };
    let family_label = family.to_string();
    let mut all_pass = true;
    ordered_sweep(
        &ns,
        sink,
        |n| {
            let basis = build(n)?;
            let mut rows = Vec::new();
            for p in &ps {
                for y0 in &a.y0 {
                    let ds =
                        basis.derivative_sum(*p, &ApFloat::from_rational(y0, prec)).map_err(basis_error)?;
                    rows.push((y0.clone(), ds));
                }
            }
            Ok::<_, CliError>((*n, rows))
        },
        |sink, result| {
            let (n, rows) = result?;
            for (y0, ds) in rows {
                let pass = ds.passes();
                all_pass &= pass;
                let mut record = json!({
                    "family": family_label,
                    "n": n,
                    "p": ds.p,
                    "y0": format_rational(&y0),
                    "residual": ds.residual,
                    "tolerance": ds.tolerance,
                    "pass": pass,
                    "precision_bits": prec,
                });
                if a.terms {
                    record["terms"] = to_value(&ds.terms);
                }
                sink.emit(&record, || {
                    format!(
                        "{family_label} n={n} p={} y0={} residual={:.6} tolerance={:.6} {}",
                        ds.p,
                        format_rational(&y0),
                        ds.residual,
                        ds.tolerance,
                        if pass { "PASS" } else { "FAIL" }
                    )
                })?;
            }
            Ok(())
        },
    )?;
    Ok(all_pass)
}

fn odd_n(n: usize) -> Result<usize, CliError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(identity_error(IdentityError::NotOdd(n)));
    }
    Ok(n)
}

fn verify_identity(a: &VerifyIdentityArgs, sink: &mut Sink) -> Result<bool, CliError> {
    let ns: Vec<usize> = match (a.n, a.n_max) {
        (Some(n), _) => vec![odd_n(n)?],
        (None, Some(max)) if max >= 3 => (3..=max).step_by(2).collect(),
        (None, Some(max)) => return Err(CliError::Usage(format!("--n-max must be at least 3, got {max}"))),
        (None, None) => unreachable!("clap requires --n or --n-max"),
    };
    let mut all_hold = true;
    ordered_sweep(
        &ns,
        sink,
        |n| verify_identity_2(*n).map_err(identity_error),
        |sink, report| {
            let report = report?;
            all_hold &= report.holds;
            let mut record = json!({
                "n": report.n,
                "lhs": format_rational(&report.lhs),
                "rhs": format_rational(&report.rhs),
                "holds": report.holds,
            });
            if a.witness {
                record["witness"] = to_value(&report.witness);
            }
            sink.emit(&record, || {
                format!(
                    "n={} lhs={} rhs={} {}",
                    report.n,
                    format_rational(&report.lhs),
                    format_rational(&report.rhs),
                    if report.holds { "HOLDS" } else { "FAILS" }
                )
            })
        },
    )?;
    Ok(all_hold)
}

fn power_sum(a: &PowerSumArgs, prec: u32, sink: &mut Sink) -> Result<bool, CliError> {
    let n = odd_n(a.n)?;
    let ms: Vec<usize> = match (a.m, a.m_max) {
        (Some(m), _) => vec![m],
        (None, Some(max)) => (1..=max).collect(),
        (None, None) => unreachable!("clap requires --m or --m-max"),
    };
    for m in ms {
        let value: ExactRational = inverse_power_sum(n, m).map_err(identity_error)?;
        let numeric = ApFloat::from_rational(&value, prec);
        let record = json!({
            "n": n,
            "m": m,
            "value": format_rational(&value),
            "numeric": numeric,
            "precision_bits": prec,
        });
        sink.emit(&record, || format!("n={n} m={m} value={} ≈ {numeric:.30}", format_rational(&value)))?;
    }
    Ok(true)
}

fn conjecture_error(e: ConjectureError) -> CliError {
    match e {
        ConjectureError::Knots(k) | ConjectureError::Basis(HermiteFejerError::Knots(k)) => knot_error(k),
        other => CliError::Usage(other.to_string()),
    }
}

fn conjecture(a: &ConjectureArgs, prec: u32, sink: &mut Sink) -> Result<bool, CliError> {
    if let Some(m) = a.m {
        let report = conjecture_power_formula(m, &a.train, &a.holdout).map_err(conjecture_error)?;
        let ok = report.confirmed && report.fresh_confirmed;
        sink.emit(&to_value(&report), || {
            format!(
                "m={} PS(m,n) = {}  holdout {} fresh {:?} {}",
                report.m,
                report.formula_text,
                if report.confirmed { "confirmed" } else { "rejected" },
                report.fresh_n,
                if report.fresh_confirmed { "confirmed" } else { "rejected" }
            )
        })?;
        return Ok(ok);
    }
    let family = a.family_args().expect("clap requires --m or --family").family();
    let p = a.p.expect("clap requires --p with --family");
    let found =
        explore_knot_family(&family, p, &a.y0, &a.n, prec, a.max_denominator).map_err(conjecture_error)?;
    let label = family.to_string();
    for entry in found {
        let mut record = to_value(&entry);
        record["family"] = json!(label);
        record["p"] = json!(p);
        record["y0"] = json!(format_rational(&a.y0));
        let show = |c: &Option<ExactRational>| c.as_ref().map_or("none".to_string(), format_rational);
        sink.emit(&record, || {
            format!(
                "{label} n={} nearest[{}]={} remainder={}",
                entry.n,
                entry.nearest_index,
                show(&entry.nearest.candidate),
                show(&entry.remainder.candidate)
            )
        })?;
    }
    Ok(true)
}
