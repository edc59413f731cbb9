//! The subcommands. Each returns `Ok(true)` when everything it checked passed.

use std::io::Write;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use trace_kit::class_numbers::{ClassKind, ClassNumberCache};
use trace_kit::cusp_terms::{eisenstein_trace, eisenstein_trace_ell};
use trace_kit::dirichlet::parse_label;
use trace_kit::hecke_operator::{build_tn_checked, verify_abc_battery, AbcReport};
use trace_kit::local_counts::Sigma;
use trace_kit::par;
use trace_kit::period_oracle::PeriodOracle;
use trace_kit::suite::{run_suite, Scale};
use trace_kit::trace_formulas::{
    trace_atkin_lehner, trace_atkin_lehner_full, trace_hecke_cusp, trace_hecke_full, TraceQuery,
};
use trace_kit::{CycloNum, DirichletChar};

use crate::output::{
    approx_json, approx_text, cyclo_json, rational_approx, rational_json, write_csv, write_json,
    write_table, Format,
};
use crate::{usage, ClassnumArgs, Kind, Space, TraceArgs, VerifyCommand};

fn character(level: u64, label: Option<&str>) -> Result<DirichletChar> {
    if level == 0 {
        return Err(usage("--level must be positive"));
    }
    let Some(label) = label else {
        return Ok(DirichletChar::trivial(level));
    };
    let chi = parse_label(label)?;
    if chi.modulus() != level {
        return Err(usage(format!(
            "character {label} has modulus {}, not the level {level}",
            chi.modulus()
        )));
    }
    Ok(chi)
}

fn query(chi: &DirichletChar, weight: u32, ell: Option<u64>, n: u64) -> TraceQuery {
    TraceQuery {
        chi: chi.clone(),
        weight,
        n,
        ell,
    }
}

fn parity_ok(chi: &DirichletChar, k: u32) -> bool {
    chi.parity() == if k % 2 == 0 { 1 } else { -1 }
}

struct TraceRecord {
    n: u64,
    value: CycloNum,
    breakdown: Vec<(&'static str, CycloNum)>,
}

fn trace_record(q: &TraceQuery, space: Space) -> Result<TraceRecord> {
    q.validate()?;
    let (chi, k, n) = (&q.chi, q.weight, q.n);
    let rat = CycloNum::from_rational;
    let (value, breakdown) = match (space, q.ell) {
        (Space::Cusp, None) => {
            let r = trace_hecke_cusp(q)?;
            let parts = vec![
                ("elliptic", r.elliptic),
                ("scalar", r.scalar),
                ("cusp", r.cusp),
                ("correction", r.correction),
            ];
            (r.value, parts)
        }
        (Space::Cusp, Some(ell)) => (rat(trace_atkin_lehner(q.level(), ell, k, n)?), vec![]),
        (Space::Full, None) => {
            let full = trace_hecke_full(q)?;
            let cusp = trace_hecke_cusp(q)?.value;
            (
                full,
                vec![("cusp", cusp), ("eisenstein", eisenstein_trace(chi, k, n))],
            )
        }
        (Space::Full, Some(ell)) => {
            let level = q.level();
            let full = trace_atkin_lehner_full(level, ell, k, n)?;
            let cusp = trace_atkin_lehner(level, ell, k, n)?;
            let eis = eisenstein_trace_ell(level, ell, k, n)?;
            (
                rat(full),
                vec![("cusp", rat(cusp)), ("eisenstein", rat(eis))],
            )
        }
    };
    Ok(TraceRecord {
        n,
        value,
        breakdown,
    })
}

pub fn trace(args: &TraceArgs, out: &mut impl Write) -> Result<bool> {
    let chi = character(args.level, args.character.as_deref())?;
    let ns = args.n.positive("n")?;
    let label = chi.label();
    let warning = (!parity_ok(&chi, args.weight)).then(|| {
        format!(
            "χ(−1) ≠ (−1)^k for χ = {label}, k = {}: the space is zero",
            args.weight
        )
    });
    let queries: Vec<TraceQuery> = ns
        .iter()
        .map(|&n| query(&chi, args.weight, args.ell, n))
        .collect();
    let records = par::map_ordered(&queries, |q| trace_record(q, args.space))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    let space = args.space.name();
    match args.format {
        Format::Json => {
            let items: Vec<Value> = records
                .iter()
                .map(|r| {
                    let breakdown: Map<String, Value> = r
                        .breakdown
                        .iter()
                        .map(|(k, v)| (k.to_string(), cyclo_json(v)))
                        .collect();
                    json!({
                        "level": args.level,
                        "weight": args.weight,
                        "char": label,
                        "ell": args.ell,
                        "space": space,
                        "n": r.n,
                        "value": cyclo_json(&r.value),
                        "approx": approx_json(&r.value),
                        "breakdown": breakdown,
                        "warning": warning,
                    })
                })
                .collect();
            write_json(out, &Value::Array(items))?;
        }
        Format::Csv => {
            let ell = args.ell.map(|l| l.to_string()).unwrap_or_default();
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        args.level.to_string(),
                        args.weight.to_string(),
                        label.clone(),
                        ell.clone(),
                        space.to_string(),
                        r.n.to_string(),
                        r.value.to_string(),
                        approx_text(&r.value),
                        warning.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            let header = [
                "level", "weight", "char", "ell", "space", "n", "value", "approx", "warning",
            ];
            write_csv(out, &header, &rows)?;
        }
        Format::Table => {
            let ell = args.ell.map(|l| format!(" ell={l}")).unwrap_or_default();
            writeln!(
                out,
                "# level={} weight={} char={label}{ell} space={space}",
                args.level, args.weight
            )?;
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| vec![r.n.to_string(), r.value.to_string(), approx_text(&r.value)])
                .collect();
            write_table(out, &["n", "value", "approx"], &rows)?;
        }
    }
    Ok(true)
}

pub fn classnum(args: &ClassnumArgs, out: &mut impl Write) -> Result<bool> {
    let kind = match args.kind {
        Kind::H => ClassKind::parse("H"),
        Kind::H0 => ClassKind::parse("h0"),
    }
    .expect("both kinds parse");
    let cache = ClassNumberCache::global();
    if let Some(path) = &args.cache_file {
        if path.exists() {
            cache.load_csv(path)?;
        }
    }
    let ds: Vec<i64> = (args.d.start..=args.d.end).collect();
    let values = par::map_ordered(&ds, |&d| cache.get(kind, d));
    if let Some(path) = &args.cache_file {
        cache.save_csv(path)?;
    }
    let tag = kind.tag();
    match args.format {
        Format::Json => {
            let items: Vec<Value> = ds
                .iter()
                .zip(&values)
                .map(|(d, v)| {
                    json!({
                        "kind": tag,
                        "d": d,
                        "value": rational_json(v),
                        "approx": rational_approx(v),
                    })
                })
                .collect();
            write_json(out, &Value::Array(items))?;
        }
        Format::Csv | Format::Table => {
            let rows: Vec<Vec<String>> = ds
                .iter()
                .zip(&values)
                .map(|(d, v)| {
                    vec![
                        tag.to_string(),
                        d.to_string(),
                        v.to_string(),
                        rational_approx(v).to_string(),
                    ]
                })
                .collect();
            let header = ["kind", "d", "value", "approx"];
            if args.format == Format::Csv {
                write_csv(out, &header, &rows)?;
            } else {
                write_table(out, &header, &rows)?;
            }
        }
    }
    Ok(true)
}

pub fn verify(cmd: &VerifyCommand, out: &mut impl Write) -> Result<bool> {
    match cmd {
        VerifyCommand::Heckeop {
            n,
            dump_operator,
            format,
        } => {
            if dump_operator.is_some() && !n.is_single() {
                return Err(usage("--dump-operator needs a single n"));
            }
            let ns = n.positive("n")?;
            if let Some(path) = dump_operator {
                dump(ns[0], path)?;
            }
            let reports = verify_abc_battery(&ns)
                .into_iter()
                .collect::<trace_kit::Result<Vec<_>>>()?;
            heckeop_report(&reports, *format, out)
        }
        VerifyCommand::Oracle {
            level,
            weight,
            character: label,
            ell,
            n,
            format,
        } => {
            let chi = character(*level, label.as_deref())?;
            let ns = n.positive("n")?;
            oracle_report(&chi, *weight, *ell, &ns, *format, out)
        }
        VerifyCommand::Suite { quick } => {
            let scale = if *quick { Scale::Quick } else { Scale::Full };
            let outcomes = run_suite(scale);
            for o in &outcomes {
                writeln!(out, "{o}")?;
            }
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            writeln!(
                out,
                "suite: {} passed, {failed} failed",
                outcomes.len() - failed
            )?;
            Ok(failed == 0)
        }
    }
}

fn dump(n: u64, path: &std::path::Path) -> Result<()> {
    let t = build_tn_checked(n)?;
    let terms: Vec<Value> = t
        .entries_sorted()
        .iter()
        .map(|(m, c)| {
            let q = rational_json(c);
            json!({
                "a": m.a, "b": m.b, "c": m.c, "d": m.d,
                "num": q[0], "den": q[1],
            })
        })
        .collect();
    let mut file =
        std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_json(&mut file, &Value::Array(terms))
}

fn heckeop_report(reports: &[AbcReport], format: Format, out: &mut impl Write) -> Result<bool> {
    let witness = |r: &AbcReport| -> Option<String> {
        if let Some(w) = &r.a.witness {
            return Some(format!("A: {w}"));
        }
        if let Some(w) = r.b_s.witness.as_ref().or(r.b_u.witness.as_ref()) {
            return Some(format!("B: {w}"));
        }
        r.c_witness().map(|e| {
            format!(
                "C: class of {} has coefficient sum {}, expected {}",
                e.representative, e.coefficient_sum, e.epsilon
            )
        })
    };
    let status = |ok: bool| if ok { "PASS" } else { "FAIL" };
    match format {
        Format::Json => {
            let items: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "a": r.a_pass(),
                        "b": r.b_pass(),
                        "c": r.c_pass(),
                        "classes": r.c_ledger.len(),
                        "pass": r.all_pass(),
                        "witness": witness(r),
                    })
                })
                .collect();
            write_json(out, &Value::Array(items))?;
        }
        Format::Csv | Format::Table => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        status(r.a_pass()).into(),
                        status(r.b_pass()).into(),
                        status(r.c_pass()).into(),
                        r.c_ledger.len().to_string(),
                        witness(r).unwrap_or_default(),
                    ]
                })
                .collect();
            let header = ["n", "A", "B", "C", "classes", "witness"];
            if format == Format::Csv {
                write_csv(out, &header, &rows)?;
            } else {
                write_table(out, &header, &rows)?;
            }
        }
    }
    Ok(reports.iter().all(AbcReport::all_pass))
}

struct OracleRow {
    n: u64,
    closed: CycloNum,
    period: CycloNum,
    eisenstein: CycloNum,
    coboundary: CycloNum,
}

impl OracleRow {
    fn pass(&self) -> bool {
        self.closed == self.period && self.eisenstein == self.coboundary
    }
}

fn oracle_report(
    chi: &DirichletChar,
    weight: u32,
    ell: Option<u64>,
    ns: &[u64],
    format: Format,
    out: &mut impl Write,
) -> Result<bool> {
    for &n in ns {
        query(chi, weight, ell, n).validate()?;
    }
    let oracle = PeriodOracle::new(chi, weight)?;
    let rat = CycloNum::from_rational;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let level = chi.modulus();
        let row = match ell {
            None => {
                let sigma = Sigma::Hecke { n };
                OracleRow {
                    n,
                    closed: trace_hecke_full(&query(chi, weight, None, n))?,
                    period: oracle.trace_on_w(sigma)?,
                    eisenstein: eisenstein_trace(chi, weight, n),
                    coboundary: oracle.trace_coboundary(sigma)?,
                }
            }
            Some(l) => {
                let sigma = Sigma::AtkinLehner { n, ell: l };
                OracleRow {
                    n,
                    closed: rat(trace_atkin_lehner_full(level, l, weight, n)?),
                    period: oracle.trace_on_w(sigma)?,
                    eisenstein: rat(eisenstein_trace_ell(level, l, weight, n)?),
                    coboundary: oracle.trace_coboundary(sigma)?,
                }
            }
        };
        rows.push(row);
    }
    let status = |ok: bool| if ok { "PASS" } else { "FAIL" };
    match format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "level": chi.modulus(),
                        "weight": weight,
                        "char": chi.label(),
                        "ell": ell,
                        "n": r.n,
                        "closed_form": cyclo_json(&r.closed),
                        "oracle": cyclo_json(&r.period),
                        "eisenstein": cyclo_json(&r.eisenstein),
                        "coboundary": cyclo_json(&r.coboundary),
                        "pass": r.pass(),
                    })
                })
                .collect();
            write_json(out, &Value::Array(items))?;
        }
        Format::Csv | Format::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.closed.to_string(),
                        r.period.to_string(),
                        r.eisenstein.to_string(),
                        r.coboundary.to_string(),
                        status(r.pass()).into(),
                    ]
                })
                .collect();
            let header = [
                "n",
                "closed_form",
                "oracle",
                "eisenstein",
                "coboundary",
                "status",
            ];
            if format == Format::Csv {
                write_csv(out, &header, &cells)?;
            } else {
                write_table(out, &header, &cells)?;
            }
        }
    }
    Ok(rows.iter().all(OracleRow::pass))
}
