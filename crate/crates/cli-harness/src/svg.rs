//! Minimal static SVG renderings: bar charts for histograms, line charts for
//! ratio curves. Plain shapes and axis labels only.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT
            - MARGIN_B
            - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn open_svg(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/><text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        title
    )
    .unwrap();
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    )
    .unwrap();
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = frame.x_min + f * (frame.x_max - frame.x_min);
        let yv = frame.y_min + f * (frame.y_max - frame.y_min);
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{:.4}</text>"#,
            frame.x(xv),
            y0 + 18.0,
            xv
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{:.4}</text>"#,
            x0 - 6.0,
            frame.y(yv) + 4.0,
            yv
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        x_label
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        y_label
    )
    .unwrap();
}

/// Bar chart over integer bins.
pub fn bar_chart(title: &str, x_label: &str, y_label: &str, bars: &[(u64, u64)]) -> String {
    let mut out = String::new();
    open_svg(&mut out, title);
    if bars.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let x_min = bars.first().unwrap().0 as f64 - 1.0;
    let x_max = bars.last().unwrap().0 as f64 + 1.0;
    let y_max = bars.iter().map(|&(_, c)| c).max().unwrap() as f64 * 1.05;
    let frame = Frame {
        x_min,
        x_max,
        y_min: 0.0,
        y_max,
    };
    let bar_w = ((WIDTH - MARGIN_L - MARGIN_R) / (x_max - x_min)).max(1.0);
    for &(bin, count) in bars {
        let x = frame.x(bin as f64) - bar_w / 2.0;
        let y = frame.y(count as f64);
        let h = HEIGHT - MARGIN_B - y;
        writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{h:.2}" fill="steelblue"/>"#
        )
        .unwrap();
    }
    axes(&mut out, &frame, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

pub struct LineSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
    pub color: &'static str,
}

pub const SERIES_COLORS: [&str; 6] = [
    "steelblue",
    "firebrick",
    "seagreen",
    "darkorange",
    "purple",
    "black",
];

/// Line chart; a horizontal guide is drawn at y = 1 when it is in range.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[LineSeries]) -> String {
    let mut out = String::new();
    open_svg(&mut out, title);
    let points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .collect();
    if points.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut y_min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let mut y_max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 * (y_max - y_min).max(1e-9);
    y_min -= pad;
    y_max += pad;
    let frame = Frame {
        x_min,
        x_max,
        y_min,
        y_max,
    };
    if y_min < 1.0 && 1.0 < y_max {
        writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="2,4"/>"#,
            frame.x(x_min),
            frame.y(1.0),
            frame.x(x_max),
            frame.y(1.0)
        )
        .unwrap();
    }
    for (i, s) in series.iter().enumerate() {
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.x(x), frame.y(y)))
            .collect();
        let dash = if s.dashed {
            r#" stroke-dasharray="6,4""#
        } else {
            ""
        };
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.8"{dash}/>"#,
            path.join(" "),
            s.color
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{}">{}</text>"#,
            WIDTH - MARGIN_R - 180.0,
            MARGIN_T + 16.0 * (i as f64 + 1.0),
            s.color,
            s.label
        )
        .unwrap();
    }
    axes(&mut out, &frame, x_label, y_label);
    out.push_str("</svg>\n");
    out
}
