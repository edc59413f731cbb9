//! Canonical serialization of exact values and the three output formats.

use std::io::Write;
use std::str::FromStr;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::{json, Number, Value};
use trace_kit::{CycloNum, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// An arbitrary-size integer as a JSON number token.
fn int_json(x: &impl std::fmt::Display) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integers are valid JSON numbers"))
}

/// `[num, den]` in lowest terms with a positive denominator.
pub fn rational_json(q: &Rational) -> Value {
    json!([int_json(q.numer()), int_json(q.denom())])
}

/// `{"order": m, "coeffs": [[num, den], ...]}` in the power basis of ℚ(ζ_m).
pub fn cyclo_json(x: &CycloNum) -> Value {
    let coeffs: Vec<Value> = x.coeffs().iter().map(rational_json).collect();
    json!({ "order": x.order(), "coeffs": coeffs })
}

/// Rounds to 15 significant digits.
fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn float_json(x: f64) -> Value {
    Number::from_f64(round15(x)).map_or(Value::Null, Value::Number)
}

/// A number for real values, `[re, im]` otherwise.
pub fn approx_json(x: &CycloNum) -> Value {
    let (re, im) = x.approx_complex();
    if x.to_rational().is_some() {
        float_json(re)
    } else {
        json!([float_json(re), float_json(im)])
    }
}

/// Display form of the approximation used by the table and CSV formats.
pub fn approx_text(x: &CycloNum) -> String {
    let (re, im) = x.approx_complex();
    let re = round15(re);
    if x.to_rational().is_some() {
        return format!("{re}");
    }
    let im = round15(im);
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

pub fn rational_approx(q: &Rational) -> f64 {
    let x = CycloNum::from_rational(q.clone());
    round15(x.approx_complex().0)
}

/// Writes `rows` under `header` as a left-aligned table.
pub fn write_table(out: &mut impl Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

pub fn write_csv(out: &mut impl Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(out: &mut impl Write, value: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
