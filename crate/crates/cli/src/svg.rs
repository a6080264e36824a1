use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const PAD: f64 = 50.0;

/// Single-series line chart with labelled axis extents.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (x0, x1) = extent(finite.iter().map(|p| p.0));
    let (y0, y1) = extent(finite.iter().map(|p| p.1));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
    let sy = |y: f64| HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * PAD);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="black" points="{},{} {},{} {},{}"/>"#,
        PAD,
        PAD,
        PAD,
        HEIGHT - PAD,
        WIDTH - PAD,
        HEIGHT - PAD
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}">{x0}</text>"#, PAD, HEIGHT - PAD + 15.0);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">{x1}</text>"#,
        WIDTH - PAD,
        HEIGHT - PAD + 15.0
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{y0}</text>"#, PAD - 4.0, HEIGHT - PAD);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{y1}</text>"#, PAD - 4.0, PAD + 4.0);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    let coords: Vec<String> = finite
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
    out.push_str("</svg>\n");
    out
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_contains_series() {
        let svg = line_chart("t", "x", "y", &[(0.0, 1.0), (1.0, 2.0), (2.0, f64::NAN)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("50.00,350.00 590.00,50.00"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn flat_series_gets_a_range() {
        assert_eq!(extent([3.0, 3.0].into_iter()), (2.5, 3.5));
        assert_eq!(extent(std::iter::empty()), (0.0, 1.0));
    }
}
