use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::CliError;

pub type C2 = [f64; 2];

pub fn pair(z: Complex64) -> C2 {
    [z.re, z.im]
}

pub fn pairs(zs: &[Complex64]) -> Vec<C2> {
    zs.iter().copied().map(pair).collect()
}

/// Pretty JSON with every float in `{:.16e}` form (17 significant digits).
struct FixedDigits {
    inner: PrettyFormatter<'static>,
}

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{:.16e}", value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let fmt = FixedDigits {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Io(format!("json: {e}")))?;
    buf.push(b'\n');
    Ok(buf)
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

/// `dir/stem<suffix>` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
}

/// Line plot of `Re μᵢ` and `Im μᵢ` against the path parameter.
pub fn sheets_svg(tracks: &[Vec<Complex64>]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 260.0;
    const PAD: f64 = 40.0;
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{}">"#,
        2.0 * H
    );
    for (panel, label) in ["Re mu", "Im mu"].iter().enumerate() {
        let part = |z: &Complex64| if panel == 0 { z.re } else { z.im };
        let values: Vec<f64> = tracks.iter().flatten().map(part).filter(|v| v.is_finite()).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (lo.min(0.0) - 1.0, lo.max(0.0) + 1.0) };
        let top = panel as f64 * H;
        let _ = writeln!(
            svg,
            r##"<rect x="{PAD}" y="{}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
            top + PAD / 2.0,
            W - 2.0 * PAD,
            H - PAD
        );
        let _ = writeln!(
            svg,
            r#"<text x="4" y="{}" font-family="sans-serif" font-size="12">{label}</text>"#,
            top + PAD / 2.0 + 12.0
        );
        for (i, track) in tracks.iter().enumerate() {
            let m = track.len().max(2) - 1;
            let pts: Vec<String> = track
                .iter()
                .enumerate()
                .filter(|(_, z)| part(z).is_finite())
                .map(|(k, z)| {
                    let x = PAD + (W - 2.0 * PAD) * k as f64 / m as f64;
                    let y = top + PAD / 2.0 + (H - PAD) * (1.0 - (part(z) - lo) / (hi - lo));
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                colors[i % colors.len()],
                pts.join(" ")
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// ASCII OBJ with one vertex per retained node and two triangles per
/// complete grid cell. A constant surface collapses to one vertex.
pub fn obj_mesh(nu: usize, nv: usize, xyz: &[Option<[f64; 3]>]) -> String {
    let mut out = String::from("# surface sample\n");
    let present: Vec<[f64; 3]> = xyz.iter().flatten().copied().collect();
    if let Some(first) = present.first() {
        if present.iter().all(|p| p == first) {
            let _ = writeln!(out, "v {} {} {}", float(first[0]), float(first[1]), float(first[2]));
            return out;
        }
    }
    let mut ids = vec![0usize; xyz.len()];
    let mut next = 1;
    for (k, p) in xyz.iter().enumerate() {
        if let Some(p) = p {
            let _ = writeln!(out, "v {} {} {}", float(p[0]), float(p[1]), float(p[2]));
            ids[k] = next;
            next += 1;
        }
    }
    for j in 0..nv.saturating_sub(1) {
        for i in 0..nu.saturating_sub(1) {
            let a = j * nu + i;
            let (b, c, d) = (a + 1, a + nu + 1, a + nu);
            if [a, b, c, d].iter().all(|&k| xyz[k].is_some()) {
                let _ = writeln!(out, "f {} {} {}", ids[a], ids[b], ids[c]);
                let _ = writeln!(out, "f {} {} {}", ids[a], ids[c], ids[d]);
            }
        }
    }
    out
}
