//! Static SVG line and log–log plots.

use std::fmt::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    LogLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub kind: PlotKind,
    pub series: Vec<Series>,
    /// Horizontal reference line `y = value`.
    pub reference: Option<(String, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 70.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5 - lo.abs() * 0.1, hi + 0.5 + hi.abs() * 0.1)
    }
}

impl Plot {
    fn transform(&self, (x, y): (f64, f64)) -> Option<(f64, f64)> {
        match self.kind {
            PlotKind::Line => Some((x, y)),
            PlotKind::LogLog if x > 0.0 && y > 0.0 => Some((x.log10(), y.log10())),
            PlotKind::LogLog => None,
        }
    }

    pub fn render(&self) -> Result<String> {
        let pts: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| s.points.iter().filter_map(|&p| self.transform(p)).filter(|p| p.0.is_finite() && p.1.is_finite()).collect())
            .collect();
        let all: Vec<(f64, f64)> = pts.iter().flatten().copied().collect();
        if all.is_empty() {
            return Err(Error::EmptyTable);
        }
        let reference = self.reference.as_ref().and_then(|(name, y)| self.transform((1.0, *y)).map(|p| (name, p.1)));
        let fold = |f: fn(&(f64, f64)) -> f64| all.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let (x0, x1) = nice_range(fold(|p| p.0).0, fold(|p| p.0).1);
        let (mut y0, mut y1) = fold(|p| p.1);
        if let Some((_, y)) = reference {
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let (y0, y1) = nice_range(y0, y1);
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        let tick = |v: f64| match self.kind {
            PlotKind::Line => format!("{v:.4}"),
            PlotKind::LogLog => format!("1e{v:.1}"),
        };

        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="30" text-anchor="middle" font-size="16">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(svg, r#"<path d="M{left:.1},{top:.1} L{left:.1},{bottom:.1} L{right:.1},{bottom:.1}" stroke="black" fill="none"/>"#);
        for i in 0..=4 {
            let fx = x0 + (x1 - x0) * i as f64 / 4.0;
            let fy = y0 + (y1 - y0) * i as f64 / 4.0;
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(fx), bottom + 18.0, tick(fx));
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 6.0, sy(fy) + 4.0, tick(fy));
        }
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 20.0, escape(&self.x_label));
        let _ = writeln!(svg, r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#, HEIGHT / 2.0, HEIGHT / 2.0, escape(&self.y_label));
        if let Some((name, y)) = reference {
            let _ = writeln!(svg, r#"<line x1="{left:.1}" y1="{:.3}" x2="{right:.1}" y2="{:.3}" stroke="gray" stroke-dasharray="6,4"/>"#, sy(y), sy(y));
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.3}" text-anchor="end" fill="gray">{}</text>"#, right, sy(y) - 6.0, escape(name));
        }
        for (i, (series, points)) in self.series.iter().zip(&pts).enumerate() {
            let color = COLORS[i % COLORS.len()];
            let mut d = String::new();
            for (j, &(x, y)) in points.iter().enumerate() {
                let _ = write!(d, "{}{:.3},{:.3} ", if j == 0 { "M" } else { "L" }, sx(x), sy(y));
            }
            let _ = writeln!(svg, r#"<path d="{}" stroke="{color}" stroke-width="1.5" fill="none"/>"#, d.trim_end());
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#, left + 10.0, top + 16.0 * (i as f64 + 1.0), escape(&series.name));
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        let svg = self.render()?;
        std::fs::write(path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(kind: PlotKind, points: Vec<(f64, f64)>) -> Plot {
        Plot {
            title: "A_n".into(),
            x_label: "n".into(),
            y_label: "A_n".into(),
            kind,
            series: vec![Series { name: "A_n".into(), points }],
            reference: Some(("s|log s|".into(), 0.35)),
        }
    }

    #[test]
    fn renders_line_with_reference() {
        let svg = plot(PlotKind::Line, vec![(1.0, 0.9), (2.0, 0.7), (3.0, 0.5)]).render().unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("stroke-dasharray") && svg.contains("s|log s|"));
        assert_eq!(svg, plot(PlotKind::Line, vec![(1.0, 0.9), (2.0, 0.7), (3.0, 0.5)]).render().unwrap());
    }

    #[test]
    fn loglog_drops_non_positive() {
        let svg = plot(PlotKind::LogLog, vec![(0.0, 1.0), (1e-3, 1e-2), (1e-1, 1.0)]).render().unwrap();
        assert!(svg.contains("1e-"));
        assert_eq!(plot(PlotKind::LogLog, vec![(0.0, 1.0)]).render(), Err(Error::EmptyTable));
        assert_eq!(plot(PlotKind::Line, vec![]).render(), Err(Error::EmptyTable));
    }
}
