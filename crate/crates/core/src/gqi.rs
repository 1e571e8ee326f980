//! The GQI v1 text format.
//!
//! ```text
//! GQI 1 <s> <t> <P> <L>
//! <s+1 point indices of line 0>
//! ...
//! <s+1 point indices of line L-1>
//! ```
//!
//! Indices are space separated. The writer emits each line's points in
//! ascending order and the lines in lexicographic order.

use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;

use crate::geometry::{GeometryError, Quadrangle};

#[derive(Debug, Error)]
pub enum GqiError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> GqiError {
    GqiError::Parse { line, msg: msg.into() }
}

pub fn header(gq: &Quadrangle) -> String {
    format!("GQI 1 {} {} {} {}", gq.s(), gq.t(), gq.num_points(), gq.num_lines())
}

pub fn write<W: Write>(gq: &Quadrangle, mut out: W) -> io::Result<()> {
    let mut lines: Vec<&[usize]> = gq.lines().iter().map(Vec::as_slice).collect();
    lines.sort();
    writeln!(out, "{}", header(gq))?;
    let mut buf = String::new();
    for line in lines {
        buf.clear();
        for (i, p) in line.iter().enumerate() {
            if i > 0 {
                buf.push(' ');
            }
            buf.push_str(&p.to_string());
        }
        writeln!(out, "{buf}")?;
    }
    out.flush()
}

pub fn to_string(gq: &Quadrangle) -> String {
    let mut v = Vec::new();
    write(gq, &mut v).expect("writing to memory");
    String::from_utf8(v).expect("ascii output")
}

pub fn save(gq: &Quadrangle, path: &Path) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    write(gq, io::BufWriter::new(file))
}

pub fn read<R: BufRead>(input: R, label: &str) -> Result<Quadrangle, GqiError> {
    let mut rows = input.lines().enumerate();
    let (_, head) = rows.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let head = head?;
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "GQI" {
        return Err(parse_err(1, format!("expected `GQI 1 <s> <t> <P> <L>`, got `{head}`")));
    }
    if fields[1] != "1" {
        return Err(parse_err(1, format!("unsupported version {}", fields[1])));
    }
    let num = |i: usize, name: &str| -> Result<usize, GqiError> {
        fields[i]
            .parse()
            .map_err(|_| parse_err(1, format!("{name} is not a non-negative integer: `{}`", fields[i])))
    };
    let (s, t, p, l) = (num(2, "s")?, num(3, "t")?, num(4, "P")?, num(5, "L")?);

    let mut lines = Vec::with_capacity(l);
    for (i, row) in rows {
        let row = row?;
        let lineno = i + 1;
        if row.trim().is_empty() {
            continue;
        }
        if lines.len() == l {
            return Err(parse_err(lineno, format!("more than the {l} lines declared")));
        }
        let pts = row
            .split_whitespace()
            .map(|tok| {
                let v: usize = tok
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad point index `{tok}`")))?;
                if v >= p {
                    return Err(parse_err(lineno, format!("point {v} out of range (P = {p})")));
                }
                Ok(v)
            })
            .collect::<Result<Vec<usize>, _>>()?;
        if pts.len() != s + 1 {
            return Err(parse_err(
                lineno,
                format!("expected {} points, got {}", s + 1, pts.len()),
            ));
        }
        lines.push(pts);
    }
    if lines.len() != l {
        return Err(parse_err(
            lines.len() + 2,
            format!("expected {l} lines, found {}", lines.len()),
        ));
    }
    Ok(Quadrangle::from_lines_with_points(s, t, p, lines, label)?)
}

pub fn from_str(text: &str, label: &str) -> Result<Quadrangle, GqiError> {
    read(text.as_bytes(), label)
}

pub fn load(path: &Path) -> Result<Quadrangle, GqiError> {
    let file = std::fs::File::open(path)?;
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("gqi").to_string();
    read(io::BufReader::new(file), &label)
}
