//! Chart reports for E₂ and E∞ pages.

use serde::{Deserialize, Serialize};
use stringbord_core::adams::{apply_h, class_name, format_vector, Aliases, Page};
use stringbord_core::ext::ExtChart;
use stringbord_core::f2::F2Vector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub name: String,
    /// Values of `h0`, `h1`, `h2` on the class, `"0"` when zero.
    pub h: [String; 3],
    /// Positions of the `h_i` products in the target cell's class list.
    pub targets: [Vec<usize>; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub stem: i32,
    pub s: usize,
    pub classes: Vec<ClassRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartReport {
    pub name: String,
    pub algebra: u8,
    pub s_max: usize,
    pub t_max: i32,
    pub max_stem: i32,
    pub cells: Vec<CellRecord>,
}

/// The E₂ chart in stems `0..=max_stem` (negative stems are kept if present).
pub fn e2_report(chart: &ExtChart, aliases: &Aliases, max_stem: i32) -> ChartReport {
    let mut cells = Vec::new();
    for (s, t) in chart.bidegrees() {
        let stem = t - s as i32;
        if stem > max_stem {
            continue;
        }
        let dim = chart.dim(s, t);
        let classes = (0..dim)
            .map(|k| {
                let v = F2Vector::unit(dim, k);
                let w = [0, 1, 2].map(|i| apply_h(chart, i, s, t, &v));
                ClassRecord {
                    name: class_name(aliases, s, t, k),
                    h: [0, 1, 2].map(|i| format_vector(aliases, s + 1, t + (1 << i), &w[i])),
                    targets: [0, 1, 2].map(|i| w[i].iter_ones().collect()),
                }
            })
            .collect();
        cells.push(CellRecord { stem, s, classes });
    }
    sort_cells(&mut cells);
    ChartReport {
        name: chart.name.clone(),
        algebra: chart.algebra,
        s_max: chart.s_max,
        t_max: chart.t_max,
        max_stem,
        cells,
    }
}

/// The surviving classes of a page, named by representatives, with the
/// `h_i` products computed on representatives and read in the page.
pub fn page_report(chart: &ExtChart, aliases: &Aliases, page: &Page, max_stem: i32) -> ChartReport {
    let mut cells = Vec::new();
    for &(s, t) in page.bidegrees() {
        let stem = t - s as i32;
        if stem > max_stem || page.dim((s, t)) == 0 {
            continue;
        }
        let classes = page
            .reps((s, t))
            .iter()
            .map(|v| {
                let coords = [0, 1, 2].map(|i| {
                    let w = apply_h(chart, i, s, t, v);
                    page.coords((s + 1, t + (1 << i)), &w).filter(|c| !c.is_zero())
                });
                ClassRecord {
                    name: format_vector(aliases, s, t, v),
                    h: [0, 1, 2].map(|i| match &coords[i] {
                        Some(c) => {
                            let tt = t + (1 << i);
                            let mut acc = F2Vector::zeros(chart.dim(s + 1, tt));
                            for (j, r) in page.reps((s + 1, tt)).iter().enumerate() {
                                if c.get(j) {
                                    acc.add_assign(r);
                                }
                            }
                            format_vector(aliases, s + 1, tt, &acc)
                        }
                        None => "0".to_string(),
                    }),
                    targets: [0, 1, 2].map(|i| coords[i].as_ref().map(|c| c.iter_ones().collect()).unwrap_or_default()),
                }
            })
            .collect();
        cells.push(CellRecord { stem, s, classes });
    }
    sort_cells(&mut cells);
    ChartReport {
        name: format!("{} E{}", chart.name, if page.r > chart.s_max { "inf".to_string() } else { page.r.to_string() }),
        algebra: chart.algebra,
        s_max: chart.s_max,
        t_max: chart.t_max,
        max_stem,
        cells,
    }
}

fn sort_cells(cells: &mut [CellRecord]) {
    cells.sort_by_key(|c| (c.stem, c.s));
}

impl ChartReport {
    pub fn dim(&self, stem: i32, s: usize) -> usize {
        self.cells.iter().find(|c| c.stem == stem && c.s == s).map_or(0, |c| c.classes.len())
    }

    /// Dimension grid: rows are filtrations (top first), columns stems.
    pub fn grid(&self) -> String {
        let lo = self.cells.iter().map(|c| c.stem).min().unwrap_or(0).min(0);
        let hi = self.max_stem;
        let mut out = String::from("   s |");
        for n in lo..=hi {
            out.push_str(&format!("{n:>3}"));
        }
        out.push('\n');
        for s in (0..=self.s_max).rev() {
            out.push_str(&format!("{s:>4} |"));
            for n in lo..=hi {
                let d = self.dim(n, s);
                if d == 0 {
                    out.push_str("  .");
                } else {
                    out.push_str(&format!("{d:>3}"));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Per-bidegree listing with product values.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&format!("(t-s={}, s={}) dim {}\n", c.stem, c.s, c.classes.len()));
            for k in &c.classes {
                out.push_str(&format!("    {}", k.name));
                for (i, v) in k.h.iter().enumerate() {
                    if v != "0" {
                        out.push_str(&format!("  h{i}: {v}"));
                    }
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn render_text(&self) -> String {
        format!(
            "chart {} over A({}), s <= {}, t <= {}\n{}\n{}",
            self.name,
            self.algebra,
            self.s_max,
            self.t_max,
            self.grid(),
            self.listing()
        )
    }
}
