//! Self-contained SVG bar charts, plus a plain-text .dat companion for
//! external plotting tools. No drawing dependencies: the charts are fixed
//! 800x480 documents with one labeled bar per bucket.

pub const CHART_WIDTH: u32 = 800;
pub const CHART_HEIGHT: u32 = 480;

const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// Render counts as an SVG bar chart with the count printed above each bar.
pub fn bar_chart(title: &str, labels: &[&str], counts: &[u64]) -> String {
    assert_eq!(labels.len(), counts.len());
    let plot_width = CHART_WIDTH as f64 - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_height = CHART_HEIGHT as f64 - MARGIN_TOP - MARGIN_BOTTOM;
    let baseline = MARGIN_TOP + plot_height;
    let max_count = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let slot = plot_width / counts.len().max(1) as f64;
    let bar_width = slot * 0.7;

    let mut svg = format!(
        r#"<svg version="1.1" width="{CHART_WIDTH}" height="{CHART_HEIGHT}" xmlns="http://www.w3.org/2000/svg">"#
    );
    svg.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    svg.push_str(&format!(
        r#"<text x="{}" y="24" text-anchor="middle" font-family="monospace" font-size="16">{}</text>"#,
        CHART_WIDTH / 2,
        xml_escape(title)
    ));
    // axes
    svg.push_str(&format!(
        r#"<path d="M{MARGIN_LEFT} {MARGIN_TOP} L{MARGIN_LEFT} {baseline} L{} {baseline}" stroke="black" fill="none"/>"#,
        MARGIN_LEFT + plot_width
    ));

    for (i, (&count, &label)) in counts.iter().zip(labels).enumerate() {
        let height = plot_height * count as f64 / max_count;
        let x = MARGIN_LEFT + slot * i as f64 + (slot - bar_width) / 2.0;
        let y = baseline - height;
        let center = x + bar_width / 2.0;
        svg.push_str(&format!(
            r#"<rect x="{x:.1}" y="{y:.1}" width="{bar_width:.1}" height="{height:.1}" fill="steelblue"/>"#
        ));
        svg.push_str(&format!(
            r#"<text x="{center:.1}" y="{:.1}" text-anchor="middle" font-family="monospace" font-size="13">{count}</text>"#,
            y - 6.0
        ));
        svg.push_str(&format!(
            r#"<text x="{center:.1}" y="{:.1}" text-anchor="middle" font-family="monospace" font-size="12">{}</text>"#,
            baseline + 18.0,
            xml_escape(label)
        ));
    }
    svg.push_str("</svg>");
    svg
}

/// `label count` lines, one per bucket.
pub fn dat_companion(labels: &[&str], counts: &[u64]) -> String {
    labels
        .iter()
        .zip(counts)
        .map(|(label, count)| format!("{label} {count}\n"))
        .collect()
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
