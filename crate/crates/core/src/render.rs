//! SVG rendering of a rectangulation: the bounding box, one line per
//! segment and a labeled dot per point. Larger y is drawn higher.

use std::fmt::Write;

use crate::model::Rectangulation;

#[derive(Clone, Copy, Debug)]
pub struct RenderOptions {
    /// Pixels per coordinate unit.
    pub scale: u32,
    pub labels: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { scale: 40, labels: true }
    }
}

const MARGIN: i64 = 20;

pub fn render_svg(rect: &Rectangulation, opts: &RenderOptions) -> String {
    let config = rect.config();
    let scale = opts.scale.max(1) as i64;
    let (w, h) = (config.width(), config.height());
    let px = |x: i64| MARGIN + x * scale;
    let py = |y: i64| MARGIN + (h - y) * scale;
    let (width, height) = (w * scale + 2 * MARGIN, h * scale + 2 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        r#"  <rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        px(0),
        py(h),
        w * scale,
        h * scale
    );
    for s in rect.segments() {
        let ((x1, y1), (x2, y2)) = (s.endpoint(crate::End::Low), s.endpoint(crate::End::High));
        let _ = writeln!(
            out,
            r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="2" data-owner="{}"/>"#,
            px(x1),
            py(y1),
            px(x2),
            py(y2),
            s.owner + 1
        );
    }
    for i in 0..config.len() {
        let (x, y) = config.point(i);
        let _ = writeln!(out, r#"  <circle cx="{}" cy="{}" r="4" fill="black"/>"#, px(x), py(y));
        if opts.labels {
            let _ = writeln!(
                out,
                r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
                px(x) + 5,
                py(y) - 5,
                i + 1
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{realize_perm, Orientation, SegmentSpec};

    #[test]
    fn single_horizontal_line_spans_box() {
        let r = realize_perm(&[1], &[SegmentSpec::spanning(Orientation::Horizontal)]).unwrap();
        let svg = render_svg(&r, &RenderOptions { scale: 10, labels: false });
        // box is [0,2]^2, y=1 maps to 20 + (2-1)*10
        assert!(svg.contains(r#"<line x1="20" y1="30" x2="40" y2="30""#), "{svg}");
        assert!(!svg.contains("<text"));
    }

    #[test]
    fn pinwheel_is_deterministic() {
        let opts = RenderOptions::default();
        let a = render_svg(&fixtures::pinwheel(), &opts);
        assert_eq!(a, render_svg(&fixtures::pinwheel(), &opts));
        assert_eq!(a.matches("<line").count(), 4);
        assert_eq!(a.matches("<text").count(), 4);
    }
}
