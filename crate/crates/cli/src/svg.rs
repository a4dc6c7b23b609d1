//! Minimal hand-assembled SVG plots.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            x_range,
            y_range,
            body: String::new(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        MARGIN + (x - lo) / (hi - lo) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        let y = y.clamp(lo, hi);
        HEIGHT - MARGIN - (y - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN)
    }

    /// A line in data coordinates, clipped to the plot area by the y clamp.
    pub fn line(&mut self, (x1, y1): (f64, f64), (x2, y2): (f64, f64), class: &str) {
        let _ = writeln!(
            self.body,
            r#"<line class="{class}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            self.px(x1),
            self.py(y1),
            self.px(x2),
            self.py(y2)
        );
    }

    /// Horizontal guide across the whole x range.
    pub fn level(&mut self, y: f64, class: &str) {
        if y >= self.y_range.0 && y <= self.y_range.1 {
            self.line((self.x_range.0, y), (self.x_range.1, y), class);
        }
    }

    pub fn stem(&mut self, x: f64, y: f64) {
        self.line((x, self.y_range.0), (x, y), "stem");
        self.marker(x, y, "value");
    }

    pub fn marker(&mut self, x: f64, y: f64, class: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="2.5"/>"#,
            self.px(x),
            self.py(y)
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], class: &str) {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline class="{class}" points="{}"/>"#,
            coords.join(" ")
        );
    }

    pub fn bar(&mut self, x_lo: f64, x_hi: f64, y: f64) {
        let (left, right) = (self.px(x_lo), self.px(x_hi));
        let (top, bottom) = (self.py(y), self.py(self.y_range.0));
        let _ = writeln!(
            self.body,
            r#"<rect class="bar" x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}"/>"#,
            (right - left).max(0.0),
            (bottom - top).max(0.0)
        );
    }

    fn axes(&self, x_ticks: &[(f64, String)], y_ticks: &[(f64, String)]) -> String {
        let mut out = String::new();
        let (x0, y0) = (self.px(self.x_range.0), self.py(self.y_range.0));
        let (x1, y1) = (self.px(self.x_range.1), self.py(self.y_range.1));
        let _ = writeln!(out, r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#);
        let _ = writeln!(out, r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#);
        for (x, label) in x_ticks {
            let px = self.px(*x);
            let _ = writeln!(
                out,
                r#"<text class="tick" x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                escape(label)
            );
        }
        for (y, label) in y_ticks {
            let py = self.py(*y);
            let _ = writeln!(
                out,
                r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 6.0,
                py + 4.0,
                escape(label)
            );
        }
        out
    }

    pub fn render(&self, x_ticks: &[(f64, String)], y_ticks: &[(f64, String)]) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        out.push_str(
            "<style>\
             .axis{stroke:#000;stroke-width:1}\
             .stem{stroke:#1f77b4;stroke-width:1}\
             .value{fill:#1f77b4}\
             .limit{fill:none;stroke:#d62728;stroke-width:1.5}\
             .guide{stroke:#999;stroke-width:0.5;stroke-dasharray:4 3}\
             .slope{stroke:#2ca02c;stroke-width:0.5;stroke-dasharray:2 2}\
             .series{fill:none;stroke:#1f77b4;stroke-width:1.5}\
             .segment{stroke:#ff7f0e;stroke-width:1.5}\
             .bar{fill:#1f77b4;fill-opacity:0.7}\
             text{font-family:sans-serif;font-size:12px}\
             </style>\n",
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        out.push_str(&self.axes(x_ticks, y_ticks));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `count + 1` evenly spaced ticks.
pub fn linear_ticks(range: (f64, f64), count: usize) -> Vec<(f64, String)> {
    (0..=count)
        .map(|i| {
            let v = range.0 + (range.1 - range.0) * i as f64 / count as f64;
            (v, format!("{}", (v * 1000.0).round() / 1000.0))
        })
        .collect()
}
