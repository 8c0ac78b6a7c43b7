//! Minimal deterministic SVG output: fixed precision, no timestamps, and
//! element order equal to call order.

use std::fmt::Write;

use crate::domain::geom::Point;
use crate::domain::{Obstacle, PlanarDomain};

/// Default cap on the number of field dots drawn.
pub const MAX_DOTS: usize = 4000;

pub struct Svg {
    bbox: [f64; 4],
    scale: f64,
    body: String,
}

impl Svg {
    /// A canvas showing `bbox` (`[x0, y0, x1, y1]`), `width` pixels wide.
    pub fn new(bbox: [f64; 4], width: f64) -> Self {
        let w = (bbox[2] - bbox[0]).max(f64::MIN_POSITIVE);
        Svg {
            bbox,
            scale: width / w,
            body: String::new(),
        }
    }

    /// A canvas around `points` with a 5% margin.
    pub fn around(points: &[Point], width: f64) -> Self {
        let mut b = [
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ];
        for p in points {
            b = [
                b[0].min(p[0]),
                b[1].min(p[1]),
                b[2].max(p[0]),
                b[3].max(p[1]),
            ];
        }
        if !b[0].is_finite() {
            b = [0.0, 0.0, 1.0, 1.0];
        }
        let pad = 0.05 * (b[2] - b[0]).max(b[3] - b[1]).max(1e-9);
        Self::new([b[0] - pad, b[1] - pad, b[2] + pad, b[3] + pad], width)
    }

    fn xy(&self, p: Point) -> (f64, f64) {
        (
            (p[0] - self.bbox[0]) * self.scale,
            (self.bbox[3] - p[1]) * self.scale,
        )
    }

    fn points_attr(&self, pts: &[Point]) -> String {
        let mut s = String::new();
        for (k, &p) in pts.iter().enumerate() {
            let (x, y) = self.xy(p);
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.2},{y:.2}");
        }
        s
    }

    /// The bounding box outline and every obstacle.
    pub fn domain(&mut self, domain: &PlanarDomain) {
        let [x0, y0, x1, y1] = domain.bbox;
        let outline = self.points_attr(&[[x0, y0], [x1, y0], [x1, y1], [x0, y1]]);
        let _ = writeln!(
            self.body,
            r##"<polygon points="{outline}" fill="#fafafa" stroke="#333" stroke-width="1"/>"##
        );
        for o in &domain.obstacles {
            match o {
                Obstacle::Polygon(v) => {
                    let pts = self.points_attr(v);
                    let _ = writeln!(
                        self.body,
                        r##"<polygon points="{pts}" fill="#222" stroke="#222" stroke-width="1"/>"##
                    );
                }
                Obstacle::Segment(s) => {
                    let pts = self.points_attr(s);
                    let _ = writeln!(
                        self.body,
                        r##"<polyline points="{pts}" fill="none" stroke="#222" stroke-width="3"/>"##
                    );
                }
            }
        }
    }

    pub fn polyline(&mut self, pts: &[Point], color: &str, width: f64) {
        let pts = self.points_attr(pts);
        let _ = writeln!(
            self.body,
            r#"<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width:.2}"/>"#
        );
    }

    pub fn marker(&mut self, p: Point, color: &str, radius: f64) {
        let (x, y) = self.xy(p);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{radius:.2}" fill="{color}"/>"#
        );
    }

    pub fn label(&mut self, p: Point, text: &str) {
        let (x, y) = self.xy(p);
        let text = text
            .replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;");
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="12">{text}</text>"#
        );
    }

    /// Colored dots for `values` at `pts`, every k-th point so that at most
    /// `max_dots` are drawn. Non-finite values are skipped.
    pub fn field_dots(&mut self, pts: &[Point], values: &[f64], max_dots: usize) {
        let finite = values.iter().copied().filter(|v| v.is_finite());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        let stride = pts.len().div_ceil(max_dots.max(1)).max(1);
        let radius = (1.5f64)
            .max(0.35 * self.scale * ((self.bbox[2] - self.bbox[0]) / (max_dots as f64).sqrt()));
        for k in (0..pts.len().min(values.len())).step_by(stride) {
            if !values[k].is_finite() {
                continue;
            }
            let t = if hi > lo {
                (values[k] - lo) / (hi - lo)
            } else {
                0.5
            };
            self.marker(pts[k], &ramp(t), radius);
        }
    }

    pub fn finish(self) -> String {
        let w = (self.bbox[2] - self.bbox[0]) * self.scale;
        let h = (self.bbox[3] - self.bbox[1]) * self.scale;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n{}</svg>\n",
            self.body
        )
    }
}

/// Blue → yellow color ramp for `t ∈ [0, 1]`.
pub fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + t * (b - a)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(48.0, 253.0),
        lerp(18.0, 231.0),
        lerp(130.0, 37.0)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::slit_plane;

    #[test]
    fn output_is_deterministic_and_flipped() {
        let draw = || {
            let d = slit_plane(1.0, [-3.0, -3.0, 3.0, 3.0]).unwrap();
            let mut s = Svg::new(d.bbox, 600.0);
            s.domain(&d);
            s.polyline(&[[-1.0, 0.0], [0.0, 1.0], [1.0, 0.0]], "red", 2.0);
            s.field_dots(&[[0.0, 2.0], [1.0, 2.0]], &[0.0, f64::INFINITY], 10);
            s.label([0.0, 0.0], "a<b");
            s.finish()
        };
        let a = draw();
        assert_eq!(a, draw());
        assert!(a.starts_with("<svg"));
        // (0, 1) sits 2 units below the top edge: y = 200 px
        assert!(a.contains("300.00,200.00"));
        assert_eq!(a.matches("<circle").count(), 1);
        assert!(a.contains("a&lt;b"));
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#301282");
        assert_eq!(ramp(1.0), "#fde725");
        assert_eq!(ramp(7.0), ramp(1.0));
    }

    #[test]
    fn dots_are_subsampled() {
        let pts: Vec<Point> = (0..10_000).map(|i| [i as f64, 0.0]).collect();
        let vals: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        let mut s = Svg::around(&pts, 400.0);
        s.field_dots(&pts, &vals, MAX_DOTS);
        assert!(s.finish().matches("<circle").count() <= MAX_DOTS);
    }
}
