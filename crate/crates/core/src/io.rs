//! Text formats.
//!
//! `PSET v1`: a header line `d n`, then `n` lines of `d` space-separated
//! coordinates with 17 significant digits.
//!
//! `LAYERS v1`: a header line `L n`, then one line per layer holding the
//! 1-based layer index, the layer size and the ascending 0-based point
//! indices.
//!
//! `SWEEP v1`: CSV with header
//! `kind,dim,size_param,seed,n,mu,layers,max_layer,wall_seconds,note`.
//! Refused specs have `layers = -1`, empty measurement fields and the
//! refusal reason in `note`.

use std::io::{BufRead, Write};

use crate::analysis::{SweepRecord, SweepRow};
use crate::constructions::{ConstructionKind, ConstructionSpec};
use crate::geom::PointSet;
use crate::peeling::Layering;
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn io_err(e: std::io::Error) -> Error {
    parse_err(0, format!("i/o error: {e}"))
}

/// Writes `x` in `PSET v1`.
pub fn write_pset<W: Write>(mut w: W, x: &PointSet) -> std::io::Result<()> {
    writeln!(w, "{} {}", x.dim(), x.len())?;
    let mut line = String::new();
    for p in x.iter() {
        line.clear();
        for (k, c) in p.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{c:.16e}"));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

pub fn pset_to_string(x: &PointSet) -> String {
    let mut buf = Vec::new();
    write_pset(&mut buf, x).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Lines with their 1-based numbers, skipping blank trailing lines.
fn numbered_lines<R: BufRead>(r: R) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        out.push((i + 1, line.map_err(io_err)?));
    }
    while out.last().is_some_and(|(_, l)| l.trim().is_empty()) {
        out.pop();
    }
    Ok(out)
}

fn header(lines: &[(usize, String)], what: &str) -> Result<(usize, usize)> {
    let (no, text) = lines.first().ok_or_else(|| parse_err(1, "missing header line"))?;
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(*no, format!("header must be `{what}`")));
    }
    let a = fields[0]
        .parse()
        .map_err(|_| parse_err(*no, format!("bad integer `{}`", fields[0])))?;
    let b = fields[1]
        .parse()
        .map_err(|_| parse_err(*no, format!("bad integer `{}`", fields[1])))?;
    Ok((a, b))
}

/// Reads `PSET v1`. Errors carry the 1-based line number.
pub fn read_pset<R: BufRead>(r: R) -> Result<PointSet> {
    let lines = numbered_lines(r)?;
    let (d, n) = header(&lines, "d n")?;
    if d == 0 {
        return Err(parse_err(1, "dimension must be at least 1"));
    }
    let body = &lines[1..];
    if body.len() != n {
        let line = lines.len().min(n + 1) + 1;
        return Err(parse_err(
            line,
            format!("expected {n} point lines, found {}", body.len()),
        ));
    }
    let mut x = PointSet::with_capacity(d, n).map_err(|e| parse_err(1, e.to_string()))?;
    let mut p = Vec::with_capacity(d);
    for (no, text) in body {
        p.clear();
        for tok in text.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(*no, format!("bad coordinate `{tok}`")))?;
            if !v.is_finite() {
                return Err(parse_err(*no, format!("non-finite coordinate `{tok}`")));
            }
            p.push(v);
        }
        if p.len() != d {
            return Err(parse_err(*no, format!("expected {d} coordinates, found {}", p.len())));
        }
        x.push(&p).map_err(|e| parse_err(*no, e.to_string()))?;
    }
    Ok(x)
}

pub fn parse_pset(s: &str) -> Result<PointSet> {
    read_pset(s.as_bytes())
}

/// Writes `LAYERS v1`.
pub fn write_layers<W: Write>(mut w: W, l: &Layering) -> std::io::Result<()> {
    writeln!(w, "{} {}", l.layer_number(), l.len())?;
    for (k, layer) in l.layers().iter().enumerate() {
        let mut line = format!("{} {}", k + 1, layer.len());
        for i in layer {
            line.push_str(&format!(" {i}"));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

pub fn layers_to_string(l: &Layering) -> String {
    let mut buf = Vec::new();
    write_layers(&mut buf, l).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads `LAYERS v1` and checks that the layers partition the points.
pub fn read_layers<R: BufRead>(r: R) -> Result<Layering> {
    let lines = numbered_lines(r)?;
    let (big_l, n) = header(&lines, "L n")?;
    let body = &lines[1..];
    if body.len() != big_l {
        return Err(parse_err(
            lines.len() + 1,
            format!("expected {big_l} layer lines, found {}", body.len()),
        ));
    }
    let mut layers = Vec::with_capacity(big_l);
    for (k, (no, text)) in body.iter().enumerate() {
        let nums: Vec<usize> = text
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(*no, format!("bad integer `{t}`"))))
            .collect::<Result<_>>()?;
        if nums.len() < 2 || nums[0] != k + 1 {
            return Err(parse_err(*no, format!("layer line must start with `{} <count>`", k + 1)));
        }
        if nums.len() != nums[1] + 2 {
            return Err(parse_err(
                *no,
                format!("layer declares {} indices, found {}", nums[1], nums.len() - 2),
            ));
        }
        layers.push(nums[2..].to_vec());
    }
    Layering::from_layers(n, layers).map_err(|e| parse_err(1, e.to_string()))
}

pub fn parse_layers(s: &str) -> Result<Layering> {
    read_layers(s.as_bytes())
}

pub const SWEEP_HEADER: [&str; 10] = [
    "kind",
    "dim",
    "size_param",
    "seed",
    "n",
    "mu",
    "layers",
    "max_layer",
    "wall_seconds",
    "note",
];

/// Writes `SWEEP v1` rows in the given order.
pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| parse_err(0, format!("csv: {e}"));
    out.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for row in rows {
        let s = row.spec();
        let mut rec = vec![
            s.kind.to_string(),
            s.dim.to_string(),
            s.size_param.to_string(),
            s.seed.to_string(),
        ];
        match row {
            SweepRow::Done(r) => rec.extend([
                r.n.to_string(),
                r.mu.to_string(),
                r.layers.to_string(),
                r.max_layer.to_string(),
                r.wall_seconds.to_string(),
                String::new(),
            ]),
            SweepRow::Refused { note, .. } => rec.extend([
                String::new(),
                String::new(),
                "-1".to_string(),
                String::new(),
                String::new(),
                note.clone(),
            ]),
        }
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush().map_err(io_err)
}

/// Reads `SWEEP v1`.
pub fn read_sweep<R: std::io::Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(r);
    let head = rdr
        .headers()
        .map_err(|e| parse_err(1, format!("csv: {e}")))?
        .clone();
    if head.iter().collect::<Vec<_>>() != SWEEP_HEADER {
        return Err(parse_err(1, "header does not match SWEEP v1"));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, format!("csv: {e}")))?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        fn num<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
            s.parse()
                .map_err(|_| parse_err(line, format!("bad {name} `{s}`")))
        }
        let kind: ConstructionKind =
            field(0).parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        let spec = ConstructionSpec::new(
            kind,
            num(field(1), "dim", line)?,
            num(field(2), "size_param", line)?,
            num(field(3), "seed", line)?,
        );
        let layers: i64 = num(field(6), "layers", line)?;
        if layers < 0 {
            rows.push(SweepRow::Refused {
                spec,
                note: field(9).to_string(),
            });
        } else {
            rows.push(SweepRow::Done(SweepRecord {
                spec,
                n: num(field(4), "n", line)?,
                mu: num(field(5), "mu", line)?,
                layers: layers as usize,
                max_layer: num(field(7), "max_layer", line)?,
                wall_seconds: num(field(8), "wall_seconds", line)?,
            }));
        }
    }
    Ok(rows)
}

/// Two-column `log_n log_L` table (natural logarithms) of the measured rows.
pub fn write_log_pairs<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "log_n log_L")?;
    for r in rows.iter().filter_map(SweepRow::record) {
        writeln!(w, "{} {}", (r.n as f64).ln(), (r.layers as f64).ln())?;
    }
    w.flush()
}
