//! SVG and CSV output for traced curves and zero markers.

use std::fmt::Write as _;
use std::str::FromStr;

use rug::{Complex, Float};

use super::trace::{CurveKind, XRayCurve};
use crate::error::{Error, Result};
use crate::numerics::decimal;
use crate::zeros::{Rect, ZeroRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(Format::Svg),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Domain(format!("unknown plot format {s:?}"))),
        }
    }
}

/// Plot box and drawing parameters.
#[derive(Clone, Debug)]
pub struct Canvas {
    pub region: Rect,
    /// Width of the SVG in pixels; the height keeps the aspect ratio.
    pub width_px: f64,
    pub thick: f64,
    pub thin: f64,
    pub marker_radius: f64,
}

impl Canvas {
    pub fn new(region: Rect) -> Self {
        Canvas {
            region,
            width_px: 600.0,
            thick: 1.6,
            thin: 0.6,
            marker_radius: 2.0,
        }
    }

    fn height_px(&self) -> f64 {
        self.width_px * self.region.height() / self.region.width()
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let [s1, _, _, t2] = self.region.0;
        let k = self.width_px / self.region.width();
        ((x - s1) * k, (t2 - y) * k)
    }
}

/// Zeros in the box, with the conjugates of the stored upper ones.
fn markers(zeros: &[ZeroRecord], region: &Rect) -> Vec<(i64, f64, f64)> {
    let mut out = Vec::new();
    for z in zeros {
        let (x, y) = (z.beta(), z.gamma());
        if region.contains(x, y) {
            out.push((z.n, x, y));
        }
        if z.n > 0 && region.contains(x, -y) {
            out.push((-z.n, x, -y));
        }
    }
    out
}

fn svg(curves: &[XRayCurve], zeros: &[ZeroRecord], canvas: &Canvas) -> String {
    let (w, h) = (canvas.width_px, canvas.height_px());
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let _ = writeln!(
        s,
        "<style>.real{{fill:none;stroke:#000;stroke-width:{}}} .imaginary{{fill:none;stroke:#000;stroke-width:{}}} .zero{{fill:#c00}} .axis{{stroke:#999;stroke-width:0.5}}</style>",
        canvas.thick, canvas.thin
    );
    let [s1, s2, t1, t2] = canvas.region.0;
    if s1 < 0.0 && s2 > 0.0 {
        let (x, _) = canvas.map(0.0, 0.0);
        let _ = writeln!(s, r#"<line class="axis" x1="{x:.3}" y1="0" x2="{x:.3}" y2="{h:.3}"/>"#);
    }
    if t1 < 0.0 && t2 > 0.0 {
        let (_, y) = canvas.map(0.0, 0.0);
        let _ = writeln!(s, r#"<line class="axis" x1="0" y1="{y:.3}" x2="{w:.3}" y2="{y:.3}"/>"#);
    }
    for c in curves {
        let tag = if c.closed { "polygon" } else { "polyline" };
        let _ = write!(s, r#"<{tag} class="{}" points=""#, c.kind.name());
        for (k, p) in c.points.iter().enumerate() {
            let (x, y) = canvas.map(p.real().to_f64(), p.imag().to_f64());
            let sep = if k == 0 { "" } else { " " };
            let _ = write!(s, "{sep}{x:.3},{y:.3}");
        }
        let _ = writeln!(s, r#""/>"#);
    }
    for (n, x, y) in markers(zeros, &canvas.region) {
        let (px, py) = canvas.map(x, y);
        let _ = writeln!(
            s,
            r#"<circle class="zero" data-n="{n}" cx="{px:.3}" cy="{py:.3}" r="{}"/>"#,
            canvas.marker_radius
        );
    }
    s.push_str("</svg>\n");
    s
}

fn csv(curves: &[XRayCurve], zeros: &[ZeroRecord], canvas: &Canvas) -> String {
    let mut s = String::from("kind,idx,re,im\n");
    for (idx, c) in curves.iter().enumerate() {
        for p in &c.points {
            let bits = p.prec().0;
            let _ = writeln!(s, "{},{idx},{},{}", c.kind.name(), decimal(p.real(), bits), decimal(p.imag(), bits));
        }
    }
    for (n, x, y) in markers(zeros, &canvas.region) {
        let _ = writeln!(s, "zero,{n},{x},{y}");
    }
    s
}

/// The curves and the zero markers inside the canvas box as SVG or CSV.
pub fn render(curves: &[XRayCurve], zeros: Option<&[ZeroRecord]>, format: Format, canvas: &Canvas) -> String {
    let zeros = zeros.unwrap_or(&[]);
    match format {
        Format::Svg => svg(curves, zeros, canvas),
        Format::Csv => csv(curves, zeros, canvas),
    }
}

/// Curves back from the CSV written by [`render`]; zero rows, the header and
/// `#` comment lines are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<XRayCurve>> {
    let mut curves: Vec<XRayCurve> = Vec::new();
    let mut last_idx = None;
    for (line_no, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.starts_with("kind,") || line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Table {
            line: line_no + 1,
            msg: msg.to_string(),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad("expected four fields"));
        }
        let kind = match f[0] {
            "real" => CurveKind::Real,
            "imaginary" => CurveKind::Imaginary,
            "zero" => continue,
            _ => return Err(bad("unknown kind")),
        };
        let idx: usize = f[1].parse().map_err(|_| bad("bad index"))?;
        let num = |s: &str| -> Result<Float> {
            Float::parse(s)
                .map(|p| Float::with_val(128, p))
                .map_err(|_| bad("bad number"))
        };
        let p = Complex::with_val(128, (num(f[2])?, num(f[3])?));
        if last_idx != Some(idx) {
            curves.push(XRayCurve {
                kind,
                points: Vec::new(),
                refined: false,
                closed: false,
            });
            last_idx = Some(idx);
        }
        curves.last_mut().expect("pushed above").points.push(p);
    }
    Ok(curves)
}
