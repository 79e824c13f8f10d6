//! Number formatting, angle parsing and output sinks.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::Value;

/// Formats like C's `%.12g`; non-finite values become `inf`, `-inf`, `nan`.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    const SIG: i32 = 12;
    let sci = format!("{:.*e}", (SIG - 1) as usize, v);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG).contains(&exp) {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// JSON number, or the string form for non-finite values.
pub fn num_json(v: f64) -> Value {
    if v.is_finite() {
        serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
    } else {
        Value::String(fmt_num(v))
    }
}

/// Parses an angle in radians. Accepts plain numbers and multiples or
/// fractions of pi such as `pi`, `pi/5`, `2pi/5`, `3*pi/10`, `-pi/2`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let cleaned: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let (num, den) = match cleaned.split_once('/') {
        Some((n, d)) => {
            let den: f64 = d
                .parse()
                .map_err(|_| format!("invalid angle denominator in '{s}'"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in angle '{s}'"));
            }
            (n.to_string(), den)
        }
        None => (cleaned.clone(), 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse::<f64>()
                .map_err(|_| format!("invalid angle '{s}'"))?,
        };
        c * PI
    } else {
        num.parse::<f64>()
            .map_err(|_| format!("invalid angle '{s}'"))?
    };
    let out = value / den;
    if !out.is_finite() {
        return Err(format!("angle '{s}' is not finite"));
    }
    Ok(out)
}

/// Opens `path` for writing, or standard output when absent.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_csv<W: Write + ?Sized>(
    out: &mut W,
    header: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

pub fn write_json<W: Write + ?Sized>(out: &mut W, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()
}
