//! Minimal static line plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !(lo < hi) {
        let c = if lo.is_finite() { lo } else { 0.0 };
        (c - 1.0, c + 1.0)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> String {
        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let finite = |x: f64, y: f64| tx(x).is_finite() && y.is_finite();
        let points = || {
            self.series
                .iter()
                .flat_map(|s| s.x.iter().zip(&s.y))
                .filter(|(&x, &y)| finite(x, y))
        };
        let (x0, x1) = range(points().map(|(&x, _)| tx(x)));
        let (y0, y1) = range(points().map(|(_, &y)| y));
        let px = |x: f64| MARGIN + (tx(x) - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        let text = |out: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
            let _ = writeln!(
                out,
                "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"{anchor}\">{}</text>",
                escape(s)
            );
        };
        text(&mut out, WIDTH / 2.0, MARGIN / 2.0, "middle", &self.title);
        text(&mut out, WIDTH / 2.0, HEIGHT - 12.0, "middle", &self.x_label);
        text(&mut out, 12.0, HEIGHT / 2.0, "start", &self.y_label);
        let xf = |v: f64| if self.log_x { format!("1e{v:.0}") } else { format!("{v:.3}") };
        text(&mut out, MARGIN, HEIGHT - MARGIN + 16.0, "middle", &xf(x0));
        text(&mut out, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "middle", &xf(x1));
        text(&mut out, MARGIN - 4.0, HEIGHT - MARGIN, "end", &format!("{y0:.3}"));
        text(&mut out, MARGIN - 4.0, MARGIN + 4.0, "end", &format!("{y1:.3}"));

        for (k, s) in self.series.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            let pts: Vec<String> = s
                .x
                .iter()
                .zip(&s.y)
                .filter(|(&x, &y)| finite(x, y))
                .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.2\" points=\"{}\"><title>{}</title></polyline>",
                pts.join(" "),
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
