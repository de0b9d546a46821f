//! Histogram export as CSV and as a standalone SVG bar chart.

use std::fmt::Write as _;

use shoaltrack_core::locomotion::Histogram;

pub const SVG_WIDTH: u32 = 800;
pub const SVG_HEIGHT: u32 = 400;

/// `bin_left,bin_right,count,weight`, one row per bin. The weight column is
/// left empty when the histogram holds no samples.
pub fn write_histogram_csv(h: &Histogram) -> String {
    let weights = h.normalized();
    let mut out = String::from("bin_left,bin_right,count,weight\n");
    for (i, &count) in h.counts.iter().enumerate() {
        let (a, b) = h.bin_range(i);
        let w = weights.as_ref().map(|w| w[i].to_string()).unwrap_or_default();
        let _ = writeln!(out, "{a},{b},{count},{w}");
    }
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Bar chart of the bin weights on a fixed 800x400 canvas.
pub fn histogram_svg(h: &Histogram, title: &str, x_label: &str) -> String {
    let (w, hgt) = (SVG_WIDTH as f64, SVG_HEIGHT as f64);
    let (left, right, top, bottom) = (60.0, 20.0, 40.0, 50.0);
    let plot_w = w - left - right;
    let plot_h = hgt - top - bottom;
    let weights = h.normalized().unwrap_or_else(|| vec![0.0; h.bins()]);
    let peak = weights.iter().copied().fold(0.0, f64::max);
    let scale = if peak > 0.0 { plot_h / peak } else { 0.0 };
    let bar_w = plot_w / h.bins().max(1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{hgt}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    for (i, &v) in weights.iter().enumerate() {
        let bh = v * scale;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4477aa" stroke="white"><title>{}</title></rect>"##,
            left + i as f64 * bar_w,
            top + plot_h - bh,
            bar_w,
            bh,
            h.counts[i]
        );
    }
    let axis_y = top + plot_h;
    let _ = writeln!(s, r#"<line x1="{left}" y1="{axis_y}" x2="{:.2}" y2="{axis_y}" stroke="black"/>"#, left + plot_w);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{axis_y}" stroke="black"/>"#);
    let label_every = h.bins().div_ceil(10).max(1);
    for (i, edge) in h.bin_edges.iter().enumerate() {
        if i % label_every != 0 && i != h.bins() {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            left + i as f64 * bar_w,
            axis_y + 16.0,
            (edge * 100.0).round() / 100.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        hgt - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">weight (peak {:.4})</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        peak
    );
    s.push_str("</svg>\n");
    s
}
