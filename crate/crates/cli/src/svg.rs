//! SVG rendering of charts: a dot per class at `(t-s, s)`, vertical
//! segments for `h0`, slope 1 for `h1`, slope 1/3 for `h2`.

use std::fmt::Write;

use crate::chart::ChartReport;

const CELL: f64 = 40.0;
const MARGIN: f64 = 40.0;
const DOT: f64 = 3.5;
const SPREAD: f64 = 8.0;

fn dot_offset(k: usize, n: usize) -> f64 {
    (k as f64 - (n as f64 - 1.0) / 2.0) * SPREAD
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render(chart: &ChartReport) -> String {
    let lo = chart.cells.iter().map(|c| c.stem).min().unwrap_or(0).min(0);
    let hi = chart.max_stem.max(lo);
    let top = chart.s_max;
    let width = MARGIN * 2.0 + CELL * (hi - lo) as f64;
    let height = MARGIN * 2.0 + CELL * top as f64;
    let pos = |stem: i32, s: usize, k: usize, n: usize| -> (f64, f64) {
        (MARGIN + CELL * (stem - lo) as f64 + dot_offset(k, n), height - MARGIN - CELL * s as f64)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&chart.name));
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(out, r##"<g stroke="#dddddd" stroke-width="0.5">"##);
    for n in lo..=hi {
        let x = MARGIN + CELL * (n - lo) as f64;
        let _ = writeln!(out, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}"/>"#, MARGIN, height - MARGIN);
    }
    for s in 0..=top {
        let y = height - MARGIN - CELL * s as f64;
        let _ = writeln!(out, r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}"/>"#, MARGIN, width - MARGIN);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="10" text-anchor="middle">"#);
    for n in lo..=hi {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{n}</text>"#, MARGIN + CELL * (n - lo) as f64, height - MARGIN + 16.0);
    }
    for s in 0..=top {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{s}</text>"#, MARGIN - 16.0, height - MARGIN - CELL * s as f64 + 3.0);
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r##"<g stroke="#000000" stroke-width="1.2">"##);
    for c in &chart.cells {
        let n = c.classes.len();
        for (k, class) in c.classes.iter().enumerate() {
            let (x1, y1) = pos(c.stem, c.s, k, n);
            for (i, targets) in class.targets.iter().enumerate() {
                let tstem = c.stem + (1 << i) - 1;
                let Some(tc) = chart.cells.iter().find(|d| d.stem == tstem && d.s == c.s + 1) else {
                    continue;
                };
                for &j in targets {
                    let (x2, y2) = pos(tstem, c.s + 1, j, tc.classes.len());
                    let _ = writeln!(out, r#"<line class="h{i}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}"/>"#);
                }
            }
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g fill="#000000">"##);
    for c in &chart.cells {
        let n = c.classes.len();
        for (k, class) in c.classes.iter().enumerate() {
            let (x, y) = pos(c.stem, c.s, k, n);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="{DOT}"><title>{}</title></circle>"#,
                escape(&class.name)
            );
        }
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}
