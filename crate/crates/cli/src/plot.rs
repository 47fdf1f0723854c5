//! Minimal SVG line charts. Output depends only on the data, so plots can be
//! diffed in tests.

use std::fmt::Write;

use chrono::NaiveDate;

const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
];
const WIDTH: f64 = 800.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub values: Vec<f64>,
}

fn bounds(series: &[Series]) -> (f64, f64) {
    let (lo, hi) = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Draws every series of `panel` in one box whose top edge is at `top`.
fn draw_panel(
    out: &mut String,
    top: f64,
    height: f64,
    title: &str,
    dates: &[NaiveDate],
    panel: &[Series],
) {
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let (lo, hi) = bounds(panel);
    let n = dates.len().max(2);
    let x = |i: usize| MARGIN_L + plot_w * i as f64 / (n - 1) as f64;
    let y = |v: f64| top + height * (1.0 - (v - lo) / (hi - lo));
    writeln!(
        out,
        r#"<rect x="{MARGIN_L:.1}" y="{top:.1}" width="{plot_w:.1}" height="{height:.1}" fill="none" stroke="gray"/>"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
        MARGIN_L,
        top - 4.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="4" y="{:.1}" font-size="10">{hi:.2}</text>"#,
        top + 10.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="4" y="{:.1}" font-size="10">{lo:.2}</text>"#,
        top + height
    )
    .unwrap();
    for (k, s) in panel.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for (i, &v) in s.values.iter().enumerate() {
            if !v.is_finite() {
                pen_down = false;
                continue;
            }
            let cmd = if pen_down { 'L' } else { 'M' };
            write!(d, "{cmd}{:.2},{:.2} ", x(i), y(v)).unwrap();
            pen_down = true;
        }
        writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
            d.trim_end()
        )
        .unwrap();
        if panel.len() > 1 {
            writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" fill="{color}">{}</text>"#,
                WIDTH - MARGIN_R - 120.0,
                top + 12.0 * (k + 1) as f64,
                escape(s.name)
            )
            .unwrap();
        }
    }
    if let (Some(first), Some(last)) = (dates.first(), dates.last()) {
        let base = top + height + 12.0;
        writeln!(
            out,
            r#"<text x="{MARGIN_L:.1}" y="{base:.1}" font-size="10">{first}</text>"#
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.1}" y="{base:.1}" font-size="10" text-anchor="end">{last}</text>"#,
            WIDTH - MARGIN_R
        )
        .unwrap();
    }
}

/// One stacked panel per entry of `panels`, sharing the date axis.
pub fn stacked_chart(title: &str, dates: &[NaiveDate], panels: &[(String, Vec<Series>)]) -> String {
    const PANEL_H: f64 = 90.0;
    const GAP: f64 = 36.0;
    let height = 40.0 + panels.len() as f64 * (PANEL_H + GAP);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{MARGIN_L:.1}" y="18" font-size="14">{}</text>"#,
        escape(title)
    )
    .unwrap();
    for (i, (name, series)) in panels.iter().enumerate() {
        draw_panel(
            &mut out,
            40.0 + i as f64 * (PANEL_H + GAP),
            PANEL_H,
            name,
            dates,
            series,
        );
    }
    out.push_str("</svg>\n");
    out
}
