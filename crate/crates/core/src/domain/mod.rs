//! Open planar domains `Ω ⊂ ℝ²`: a bounding box with closed obstacles
//! removed. Sampling, the grid length metric and trial functions live in
//! the submodules.

pub mod geom;
pub mod grid;
pub mod trial;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use geom::Point;

pub use grid::{clearance_cover, euclidean_length_metric, sample_grid, GridSample, Stencil};
pub use trial::{
    build_trial_family, verify_dgamma_equals_rho_ell, DGammaReport, DGammaRow, TrialFamily,
    TrialFunction, TrialKind,
};

/// A closed set removed from the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstacle {
    Polygon(Vec<Point>),
    /// Possibly a zero-area slit.
    Segment([Point; 2]),
}

impl Obstacle {
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Obstacle::Polygon(poly) => geom::in_polygon(p, poly),
            Obstacle::Segment([a, b]) => geom::on_segment(p, *a, *b),
        }
    }

    pub fn distance(&self, p: Point) -> f64 {
        match self {
            Obstacle::Polygon(poly) => geom::polygon_distance(p, poly),
            Obstacle::Segment([a, b]) => geom::point_segment_distance(p, *a, *b),
        }
    }

    pub fn hits_segment(&self, p: Point, q: Point) -> bool {
        match self {
            Obstacle::Polygon(poly) => geom::segment_hits_polygon(p, q, poly),
            Obstacle::Segment([a, b]) => geom::segments_intersect(p, q, *a, *b),
        }
    }

    fn vertices(&self) -> &[Point] {
        match self {
            Obstacle::Polygon(poly) => poly,
            Obstacle::Segment(s) => s,
        }
    }
}

/// The open box `(x0, x1) × (y0, y1)` minus closed obstacles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarDomain {
    pub bbox: [f64; 4],
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

impl PlanarDomain {
    pub fn new(bbox: [f64; 4], obstacles: Vec<Obstacle>) -> Result<Self> {
        let [x0, y0, x1, y1] = bbox;
        if !bbox.iter().all(|v| v.is_finite()) || x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidDomain(format!("degenerate bbox {bbox:?}")));
        }
        for (i, o) in obstacles.iter().enumerate() {
            if o.vertices().iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDomain(format!(
                    "obstacle {i} has a non-finite vertex"
                )));
            }
            if let Obstacle::Polygon(p) = o {
                if p.len() < 3 {
                    return Err(Error::InvalidDomain(format!(
                        "polygon obstacle {i} has fewer than 3 vertices"
                    )));
                }
            }
        }
        Ok(Self { bbox, obstacles })
    }

    /// Validates a deserialized domain.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.bbox, self.obstacles)
    }

    pub fn contains(&self, p: Point) -> bool {
        let [x0, y0, x1, y1] = self.bbox;
        p[0] > x0
            && p[0] < x1
            && p[1] > y0
            && p[1] < y1
            && !self.obstacles.iter().any(|o| o.contains(p))
    }

    /// Euclidean distance to the complement of the domain; 0 outside.
    pub fn clearance(&self, p: Point) -> f64 {
        if !self.contains(p) {
            return 0.0;
        }
        let [x0, y0, x1, y1] = self.bbox;
        let walls = (p[0] - x0).min(x1 - p[0]).min(p[1] - y0).min(y1 - p[1]);
        self.obstacles
            .iter()
            .map(|o| o.distance(p))
            .fold(walls, f64::min)
    }

    /// The closed segment `[p, q]` stays inside. The box is convex, so only
    /// the endpoints and the obstacles need checking.
    pub fn segment_inside(&self, p: Point, q: Point) -> bool {
        self.contains(p) && self.contains(q) && !self.obstacles.iter().any(|o| o.hits_segment(p, q))
    }
}

/// `ℝ² ∖ ({0} × [−a, a])` clipped to `bbox`.
pub fn slit_plane(a: f64, bbox: [f64; 4]) -> Result<PlanarDomain> {
    if !(a > 0.0) {
        return Err(Error::InvalidDomain(format!(
            "slit half-length {a} must be positive"
        )));
    }
    PlanarDomain::new(bbox, vec![Obstacle::Segment([[0.0, -a], [0.0, a]])])
}

/// `ℝ² ∖ {0}` clipped to `bbox`, the puncture thickened to a square of side
/// `h/2` so a grid of spacing `h` sees it.
pub fn punctured_plane(bbox: [f64; 4], h: f64) -> Result<PlanarDomain> {
    if !(h > 0.0) {
        return Err(Error::InvalidDomain(format!(
            "spacing {h} must be positive"
        )));
    }
    let s = h / 4.0;
    PlanarDomain::new(
        bbox,
        vec![Obstacle::Polygon(vec![[-s, -s], [s, -s], [s, s], [-s, s]])],
    )
}

pub fn convex_box(bbox: [f64; 4]) -> Result<PlanarDomain> {
    PlanarDomain::new(bbox, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOX: [f64; 4] = [-3.0, -3.0, 3.0, 3.0];

    #[test]
    fn slit_membership_and_clearance() {
        let d = slit_plane(1.0, BOX).unwrap();
        assert_eq!(
            d.obstacles,
            vec![Obstacle::Segment([[0.0, -1.0], [0.0, 1.0]])]
        );
        assert!(!d.contains([0.0, 0.5]));
        assert!(!d.contains([0.0, 1.0]));
        assert!(d.contains([0.0, 1.0 + 1e-9]));
        assert!(d.contains([0.3, 0.0]));
        assert_eq!(d.clearance([0.3, 0.0]), 0.3);
        assert_eq!(d.clearance([-3.0, -3.0]), 0.0);
        assert!(!d.segment_inside([-0.1, 0.0], [0.1, 0.0]));
        assert!(d.segment_inside([-0.1, 1.1], [0.1, 1.1]));
    }

    #[test]
    fn named_domains() {
        let p = punctured_plane(BOX, 0.02).unwrap();
        assert!(!p.contains([0.0, 0.0]));
        assert!(!p.contains([0.005, 0.005]));
        assert!(p.contains([0.02, 0.0]));
        assert!(convex_box(BOX).unwrap().obstacles.is_empty());
        assert!(convex_box([0.0, 0.0, 0.0, 1.0]).is_err());
        assert!(slit_plane(0.0, BOX).is_err());
    }

    #[test]
    fn domain_json() {
        let json = r#"{"bbox":[-3,-3,3,3],"obstacles":[{"segment":[[0,-1],[0,1]]},{"polygon":[[1,1],[2,1],[2,2]]}]}"#;
        let d: PlanarDomain = serde_json::from_str(json).unwrap();
        let d = d.validated().unwrap();
        assert_eq!(d.obstacles.len(), 2);
        assert!(!d.contains([1.5, 1.2]));
        let back: PlanarDomain = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
