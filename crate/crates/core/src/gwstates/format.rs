//! Plain-text GW spec files.
//!
//! ```text
//! n d p
//! re,im re,im ...      # d coefficients for party 0
//! ...                  # one line per party, n lines in total
//! anc: re,im ...       # optional ancilla for the PCS purification
//! ```
//!
//! Blank lines and `#` comments are ignored. Coefficients whose squared norm
//! is off by more than [`PARSE_NORM_TOL`] are rejected; smaller deviations are
//! rescaled away.

use crate::error::{Error, Result};
use crate::linalg::C64;

use super::GWSpec;

pub const PARSE_NORM_TOL: f64 = 1e-9;

fn parse_complex(tok: &str, line: usize) -> Result<C64> {
    let err = || Error::Parse { line, msg: format!("expected `re,im`, got {tok:?}") };
    let (re, im) = tok.split_once(',').ok_or_else(err)?;
    Ok(C64::new(re.trim().parse().map_err(|_| err())?, im.trim().parse().map_err(|_| err())?))
}

fn parse_row(body: &str, d: usize, line: usize) -> Result<Vec<C64>> {
    let row = body.split_whitespace().map(|t| parse_complex(t, line)).collect::<Result<Vec<_>>>()?;
    if row.len() != d {
        return Err(Error::Parse { line, msg: format!("expected {d} coefficients, found {}", row.len()) });
    }
    Ok(row)
}

fn rescale(row: Vec<C64>, what: &str, line: usize) -> Result<Vec<C64>> {
    let norm: f64 = row.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > PARSE_NORM_TOL {
        return Err(Error::Parse { line, msg: format!("{what} squared norm {norm} is not 1") });
    }
    let s = norm.sqrt();
    Ok(row.into_iter().map(|z| z / s).collect())
}

pub fn parse_spec(text: &str) -> Result<GWSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty spec".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::Parse { line: hline, msg: "header must be `n d p`".into() });
    }
    let bad = |what: &str| Error::Parse { line: hline, msg: format!("bad {what} in header") };
    let n: usize = fields[0].parse().map_err(|_| bad("n"))?;
    let d: usize = fields[1].parse().map_err(|_| bad("d"))?;
    let p: f64 = fields[2].parse().map_err(|_| bad("p"))?;

    let mut a = Vec::with_capacity(n);
    let mut last_line = hline;
    for _ in 0..n {
        let (ln, body) =
            lines.next().ok_or(Error::Parse { line: last_line, msg: format!("expected {n} coefficient lines") })?;
        if body.starts_with("anc:") {
            return Err(Error::Parse { line: ln, msg: format!("expected {n} coefficient lines before `anc:`") });
        }
        a.push(parse_row(body, d, ln)?);
        last_line = ln;
    }
    let norm: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > PARSE_NORM_TOL {
        return Err(Error::Parse { line: last_line, msg: format!("coefficients have squared norm {norm}, expected 1") });
    }
    let mut spec = GWSpec::normalized(a, p).map_err(|e| Error::Parse { line: hline, msg: e.to_string() })?;

    if let Some((ln, body)) = lines.next() {
        let rest = body
            .strip_prefix("anc:")
            .ok_or(Error::Parse { line: ln, msg: "unexpected line; only an `anc:` line may follow".into() })?;
        let anc = rescale(parse_row(rest, d, ln)?, "ancilla", ln)?;
        spec = spec.with_ancilla(anc).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse { line: ln, msg: "trailing content".into() });
    }
    Ok(spec)
}

pub fn write_spec(spec: &GWSpec) -> String {
    let fmt_row = |row: &[C64]| row.iter().map(|z| format!("{},{}", z.re, z.im)).collect::<Vec<_>>().join(" ");
    let mut out = format!("{} {} {}\n", spec.n(), spec.d(), spec.p());
    for row in spec.coefficients() {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    if let Some(anc) = spec.ancilla() {
        out.push_str("anc: ");
        out.push_str(&fmt_row(anc));
        out.push('\n');
    }
    out
}
