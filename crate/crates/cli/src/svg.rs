//! Deterministic barcode rendering.

use std::fmt::Write as _;

use topo_regress::PersistenceDiagram;

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 40.0;
const ROW: f64 = 14.0;
const BAR: f64 = 8.0;

/// One horizontal bar per feature spanning `[death, birth]`, longest first,
/// above a labelled level axis.
pub fn render(diagram: &PersistenceDiagram<f64>) -> String {
    let features = diagram.features();
    let (lo, hi) = features.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
        (lo.min(f.death), hi.max(f.birth))
    });
    let (lo, hi) = if features.is_empty() {
        (0.0, 1.0)
    } else if hi - lo > 0.0 {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    };
    let span = WIDTH - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + (v - lo) / (hi - lo) * span;
    let axis_y = MARGIN + ROW * features.len() as f64 + ROW;
    let height = axis_y + MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, f) in features.iter().enumerate() {
        let y = MARGIN + ROW * i as f64;
        let x = sx(f.death);
        let w = (sx(f.birth) - x).max(1.0);
        let _ = writeln!(
            out,
            r#"<rect x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{BAR}" fill="steelblue"><title>[{:.6}, {:.6}]</title></rect>"#,
            f.death, f.birth
        );
    }
    let _ = writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{axis_y:.3}" x2="{:.3}" y2="{axis_y:.3}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    for (v, anchor) in [(lo, "start"), (hi, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" text-anchor="{anchor}">{v:.4}</text>"#,
            sx(v),
            axis_y + 14.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_diagram_draws_only_the_axis() {
        let s = render(&PersistenceDiagram::empty());
        assert_eq!(s.matches("<rect").count(), 1);
        assert!(s.contains("<line"));
    }

    #[test]
    fn one_rect_per_feature_and_deterministic() {
        let d = PersistenceDiagram::from_pairs(&[(0.1, 0.9), (0.3, 0.4)]);
        let s = render(&d);
        assert_eq!(s.matches("<rect").count(), 3);
        assert_eq!(s, render(&d));
    }

    #[test]
    fn bar_spans_death_to_birth() {
        let d = PersistenceDiagram::from_pairs(&[(0.0, 1.0)]);
        let s = render(&d);
        let expected = format!(r#"x="{MARGIN:.3}" y="{MARGIN:.3}" width="{:.3}""#, WIDTH - 2.0 * MARGIN);
        assert!(s.contains(&expected), "{s}");
    }
}
