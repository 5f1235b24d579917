//! CSV tables and SVG figures. Output depends only on the input data.

use std::fmt::Write as _;
use std::io;

use crate::nsa::{CollisionRecord, NsaSpectrum};
use crate::tracer::{CurveBranch, PairSpectrum};

fn csv_writer<W: io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn finish<W: io::Write>(mut w: csv::Writer<W>) -> io::Result<()> {
    w.flush()
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub const TRACE_COLUMNS: [&str; 6] = ["branch_id", "alpha", "beta", "dbeta_dalpha", "rect_p", "rect_q"];
pub const NSA_COLUMNS: [&str; 3] = ["re", "im", "from_line"];
pub const COLLISION_COLUMNS: [&str; 5] = ["gamma_star", "lambda_re", "lambda_im", "type", "dbeta_dalpha"];

/// One row per curve point; the rectangle columns are empty on mesh lines.
pub fn write_trace_csv<W: io::Write>(branches: &[CurveBranch], w: W) -> io::Result<()> {
    let mut w = csv_writer(w);
    w.write_record(TRACE_COLUMNS).map_err(to_io)?;
    for b in branches {
        for p in &b.points {
            let (rp, rq) = p.rect.map_or((String::new(), String::new()), |r| (r.p.to_string(), r.q.to_string()));
            w.write_record([
                b.id.to_string(),
                p.alpha.to_string(),
                p.beta.to_string(),
                p.dbeta_dalpha.to_string(),
                rp,
                rq,
            ])
            .map_err(to_io)?;
        }
    }
    finish(w)
}

pub fn write_nsa_csv<W: io::Write>(s: &NsaSpectrum, w: W) -> io::Result<()> {
    let mut w = csv_writer(w);
    w.write_record(NSA_COLUMNS).map_err(to_io)?;
    for (l, line) in s.eigenvalues.iter().zip(&s.from_line) {
        w.write_record([l.re.to_string(), l.im.to_string(), line.to_string()])
            .map_err(to_io)?;
    }
    finish(w)
}

pub fn write_collisions_csv<W: io::Write>(records: &[CollisionRecord], w: W) -> io::Result<()> {
    let mut w = csv_writer(w);
    w.write_record(COLLISION_COLUMNS).map_err(to_io)?;
    for r in records {
        w.write_record([
            r.gamma_star.to_string(),
            r.lambda_star.re.to_string(),
            r.lambda_star.im.to_string(),
            r.kind.label().to_string(),
            r.dbeta_dalpha.to_string(),
        ])
        .map_err(to_io)?;
    }
    finish(w)
}

/// Plot window in spectral coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
}

impl Window {
    /// One unit beyond the outermost mesh points in each direction.
    pub fn around(s: &PairSpectrum) -> Self {
        let span = |v: Vec<f64>, extra: &[f64]| {
            let all: Vec<f64> = v.into_iter().chain(extra.iter().copied()).collect();
            let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo.is_finite() {
                (lo - 1.0, hi + 1.0)
            } else {
                (-1.0, 1.0)
            }
        };
        Self {
            alpha: span(s.mesh.x_values(), &s.vertical_lines),
            beta: span(s.mesh.y_values(), &s.horizontal_lines),
        }
    }

    fn is_valid(&self) -> bool {
        [self.alpha.0, self.alpha.1, self.beta.0, self.beta.1].iter().all(|v| v.is_finite())
            && self.alpha.0 < self.alpha.1
            && self.beta.0 < self.beta.1
    }
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;

const STYLE: &str = "\
.frame{fill:white;stroke:black;stroke-width:1}
.cell-even{fill:#e8eef8;stroke:none}
.mesh-x{stroke:#555;stroke-width:0.8;stroke-dasharray:2,3}
.mesh-y{stroke:#555;stroke-width:0.8;stroke-dasharray:6,3,1,3}
.gamma-a,.gamma-b{stroke:#1f4e9c;stroke-width:1.6}
.branch polyline{fill:none;stroke:#1f4e9c;stroke-width:1.4}
.corner{fill:#c0392b;stroke:none}
";

struct Frame {
    w: Window,
}

impl Frame {
    fn x(&self, a: f64) -> f64 {
        MARGIN + (a - self.w.alpha.0) / (self.w.alpha.1 - self.w.alpha.0) * SIZE
    }

    fn y(&self, b: f64) -> f64 {
        MARGIN + (self.w.beta.1 - b) / (self.w.beta.1 - self.w.beta.0) * SIZE
    }

    fn inside_x(&self, a: f64) -> bool {
        a >= self.w.alpha.0 && a <= self.w.alpha.1
    }

    fn inside_y(&self, b: f64) -> bool {
        b >= self.w.beta.0 && b <= self.w.beta.1
    }
}

/// Standalone SVG of a pair spectrum: shaded even cells, dotted mesh
/// lines, straight-line components, curve branches clipped to the window
/// and corner points.
pub fn render_svg(s: &PairSpectrum, window: Window) -> io::Result<String> {
    if !window.is_valid() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "plot window must be finite and non-empty"));
    }
    let f = Frame { w: window };
    let total = SIZE + 2.0 * MARGIN;
    let (x0, x1, y0, y1) = (f.x(window.alpha.0), f.x(window.alpha.1), f.y(window.beta.1), f.y(window.beta.0));
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total:.6}" height="{total:.6}" viewBox="0 0 {total:.6} {total:.6}">"#
    );
    let _ = writeln!(out, "<style>\n{STYLE}</style>");
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="plot"><rect x="{x0:.6}" y="{y0:.6}" width="{:.6}" height="{:.6}"/></clipPath></defs>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(
        out,
        r#"<rect class="frame" x="{x0:.6}" y="{y0:.6}" width="{:.6}" height="{:.6}"/>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(out, r#"<g clip-path="url(#plot)">"#);

    let mut xs = vec![window.alpha.0];
    xs.extend(s.mesh.x_values().into_iter().filter(|&a| f.inside_x(a)));
    xs.push(window.alpha.1);
    let mut ys = vec![window.beta.0];
    ys.extend(s.mesh.y_values().into_iter().filter(|&b| f.inside_y(b)));
    ys.push(window.beta.1);
    let mx = s.mesh.x_values();
    let my = s.mesh.y_values();
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            let (ca, cb) = (0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
            let p = 1 + mx.iter().filter(|&&x| x < ca).count();
            let q = 1 + my.iter().filter(|&&y| y < cb).count();
            if (p + q) % 2 == 0 {
                let _ = writeln!(
                    out,
                    r#"<rect class="cell-even" x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}"/>"#,
                    f.x(xs[i]),
                    f.y(ys[j + 1]),
                    f.x(xs[i + 1]) - f.x(xs[i]),
                    f.y(ys[j]) - f.y(ys[j + 1])
                );
            }
        }
    }
    for a in mx.iter().filter(|&&a| f.inside_x(a)) {
        let _ = writeln!(out, r#"<line class="mesh-x" x1="{0:.6}" y1="{y0:.6}" x2="{0:.6}" y2="{y1:.6}"/>"#, f.x(*a));
    }
    for b in my.iter().filter(|&&b| f.inside_y(b)) {
        let _ = writeln!(out, r#"<line class="mesh-y" x1="{x0:.6}" y1="{0:.6}" x2="{x1:.6}" y2="{0:.6}"/>"#, f.y(*b));
    }
    for a in s.vertical_lines.iter().filter(|&&a| f.inside_x(a)) {
        let _ = writeln!(out, r#"<line class="gamma-a" x1="{0:.6}" y1="{y0:.6}" x2="{0:.6}" y2="{y1:.6}"/>"#, f.x(*a));
    }
    for b in s.horizontal_lines.iter().filter(|&&b| f.inside_y(b)) {
        let _ = writeln!(out, r#"<line class="gamma-b" x1="{x0:.6}" y1="{0:.6}" x2="{x1:.6}" y2="{0:.6}"/>"#, f.y(*b));
    }
    // points far outside the window are dropped, splitting the polyline;
    // one point past the edge is kept so curves reach the frame
    let height = window.beta.1 - window.beta.0;
    let (lo, hi) = (window.beta.0 - height, window.beta.1 + height);
    for b in &s.branches {
        let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for p in &b.points {
            if f.inside_x(p.alpha) && p.beta >= lo && p.beta <= hi {
                runs.last_mut().expect("non-empty").push((f.x(p.alpha), f.y(p.beta)));
            } else if !runs.last().expect("non-empty").is_empty() {
                runs.push(Vec::new());
            }
        }
        let runs: Vec<_> = runs.into_iter().filter(|r| r.len() >= 2).collect();
        let _ = writeln!(out, r#"<g class="branch" data-id="{}">"#, b.id);
        for r in runs {
            let pts: Vec<String> = r.iter().map(|(x, y)| format!("{x:.6},{y:.6}")).collect();
            let _ = writeln!(out, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(out, "</g>");
    }
    for c in s.corner_points.iter().filter(|c| f.inside_x(c.alpha) && f.inside_y(c.beta)) {
        let _ = writeln!(out, r#"<circle class="corner" cx="{:.6}" cy="{:.6}" r="2.500000"/>"#, f.x(c.alpha), f.y(c.beta));
    }
    let _ = writeln!(out, "</g>\n</svg>");
    Ok(out)
}
