//! Lifted-graph plots: the graph of F over the fundamental square, the
//! F(R) x F(R) box, and marked points with their images.

use std::fmt::Write;

use thurston::quadmap::{EpsteinParams, LiftedMap};
use thurston::Combinatorics;

pub const SAMPLES: usize = 2048;

#[derive(Debug, Clone)]
pub struct Palette {
    pub first: String,
    pub second: String,
    pub shared: String,
    pub other: String,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            first: "blue".into(),
            second: "red".into(),
            shared: "purple".into(),
            other: "gray".into(),
        }
    }
}

impl std::str::FromStr for Palette {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b, c, d] if parts.iter().all(|p| !p.is_empty()) => Ok(Palette {
                first: a.to_string(),
                second: b.to_string(),
                shared: c.to_string(),
                other: d.to_string(),
            }),
            _ => Err("palette needs four comma-separated colors".into()),
        }
    }
}

/// Marked points to draw on top of the graph.
pub struct Marked<'a> {
    pub c: &'a Combinatorics,
    pub t: &'a [f64],
}

const LO: f64 = -0.75;
const HI: f64 = 0.75;
const SIZE: f64 = 600.0;

fn px(x: f64) -> f64 {
    (x - LO) / (HI - LO) * SIZE
}

fn py(y: f64) -> f64 {
    SIZE - px(y)
}

fn orbit(c: &Combinatorics, j: usize) -> Vec<usize> {
    let mut out = vec![j];
    out.extend(c.forward_orbit(j));
    out
}

pub fn render(p: EpsteinParams, marked: Option<Marked<'_>>, palette: &Palette) -> String {
    let f = LiftedMap::<f64>::new(p);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<title>mu = {} kappa = {}</title>"#, p.mu, p.kappa);
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);

    let (a, b) = f.image();
    let (lo, hi) = (a.min(b), a.max(b));
    let _ = writeln!(
        s,
        r#"<rect class="image-box" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="lightgray"/>"#,
        px(lo),
        py(hi),
        px(hi) - px(lo),
        py(lo) - py(hi)
    );
    let _ = writeln!(
        s,
        r#"<rect class="fundamental-square" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black"/>"#,
        px(-0.5),
        py(0.5),
        px(0.5) - px(-0.5),
        py(-0.5) - py(0.5)
    );
    let _ = writeln!(
        s,
        r#"<line class="diagonal" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-dasharray="4 3"/>"#,
        px(LO),
        py(LO),
        px(HI),
        py(HI)
    );

    // one period sampled, repeated to fill [LO, HI]
    let samples: Vec<(f64, f64)> = (0..SAMPLES)
        .map(|k| {
            let t = -0.5 + k as f64 / SAMPLES as f64;
            (t, f.eval(t))
        })
        .collect();
    let mut pts = Vec::new();
    for shift in [-1.0, 0.0, 1.0] {
        for &(t, y) in &samples {
            let x = t + shift;
            if (LO..=HI).contains(&x) {
                pts.push((x, y));
            }
        }
    }
    pts.sort_by(|u, v| u.0.total_cmp(&v.0));
    let path: Vec<String> = pts
        .iter()
        .map(|(x, y)| format!("{:.3},{:.3}", px(*x), py(*y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline class="graph" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        path.join(" ")
    );

    if let Some(m) = marked {
        if let Some((jm, jp)) = m.c.critical_indices() {
            let (o1, o2) = (orbit(m.c, jm), orbit(m.c, jp));
            for (j, &t) in m.t.iter().enumerate() {
                let color = match (o1.contains(&j), o2.contains(&j)) {
                    (true, true) => &palette.shared,
                    (true, false) => &palette.first,
                    (false, true) => &palette.second,
                    (false, false) => &palette.other,
                };
                let y = f.eval(t);
                let target = m.t[m.c.image(j)];
                let _ = writeln!(
                    s,
                    r#"<line class="arrow" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="0.8"/>"#,
                    px(t),
                    py(y),
                    px(target),
                    py(target)
                );
                let _ = writeln!(
                    s,
                    r#"<rect class="image" x="{:.3}" y="{:.3}" width="8" height="8" fill="none" stroke="{color}"/>"#,
                    px(target) - 4.0,
                    py(target) - 4.0
                );
                let _ = writeln!(
                    s,
                    r#"<circle class="marked" data-index="{j}" cx="{:.3}" cy="{:.3}" r="4" fill="{color}"/>"#,
                    px(t),
                    py(y)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
