//! The three planar showcases: a slit plane (not a length space), a
//! punctured plane (a length space without geodesics) and a convex box
//! (geodesic). Each run compares the chord metric of a grid sample against
//! the stencil length metric, runs the sheaf check with a clearance cover,
//! brackets the intrinsic distance with trial functions and bisects a path
//! between the reference points `(−1, 0)` and `(1, 0)`.

use rand::seq::index;
use serde::Serialize;

use crate::domain::geom::Point;
use crate::domain::{
    clearance_cover, convex_box, punctured_plane, sample_grid, slit_plane,
    verify_dgamma_equals_rho_ell, GridSample, PlanarDomain, Stencil,
};
use crate::error::{Error, Result};
use crate::gen;
use crate::length::{
    bisect_geodesic, default_length_tol, length_verdict, LengthVerdict, Tolerance,
};
use crate::sheaf::{
    chain_graph, local_lipschitz_constant, sheaf_check_with, ScalarField, SheafVerdict,
};
use crate::space::{path_length, Metric};
use crate::svg::{Svg, MAX_DOTS};

/// The reference pair every demo measures.
pub const REFERENCE: [Point; 2] = [[-1.0, 0.0], [1.0, 0.0]];
pub const DEMO_BBOX: [f64; 4] = [-3.0, -3.0, 3.0, 3.0];
/// Slit half-length.
pub const SLIT_A: f64 = 1.0;
/// Relative slack deciding that a path is strictly longer than the chord.
const STRICT_REL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoName {
    Slit,
    Punctured,
    Convex,
}

impl DemoName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "slit" => Ok(DemoName::Slit),
            "punctured" => Ok(DemoName::Punctured),
            "convex" => Ok(DemoName::Convex),
            _ => Err(Error::InvalidArgument(format!(
                "unknown demo {s:?}; expected slit, punctured or convex"
            ))),
        }
    }

    pub fn domain(self, h: f64) -> Result<PlanarDomain> {
        match self {
            DemoName::Slit => slit_plane(SLIT_A, DEMO_BBOX),
            DemoName::Punctured => punctured_plane(DEMO_BBOX, h),
            DemoName::Convex => convex_box(DEMO_BBOX),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoConfig {
    pub h: f64,
    pub stencil: Stencil,
    pub seed: u64,
    /// Random sources (besides the reference pair) for the all-targets
    /// length and sheaf comparisons.
    pub sources: usize,
    /// Random pairs (besides the reference pair) for the trial bracket.
    pub pairs: usize,
    /// Bisection slack.
    pub eps: f64,
    /// Requested bisection depth; lowered to the deepest level the sample
    /// resolves.
    pub depth: u32,
    /// Clearance cover radius cap; `None` means `1.5 h`.
    pub r0: Option<f64>,
    /// Tolerance on `upper ≤ lower · (1 + tol)` in the trial bracket.
    pub dgamma_tol: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            h: 0.02,
            stencil: Stencil::Sixteen,
            seed: 0,
            sources: 8,
            pairs: 20,
            eps: 0.1,
            depth: 8,
            r0: None,
            dgamma_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSummary {
    /// Source of the capped chain field.
    pub source: usize,
    pub pair: [usize; 2],
    /// Largest Lipschitz ratio inside any cover set.
    pub local_constant: f64,
    /// Largest ratio over lattice-near pairs: a lower bound for the global
    /// Lipschitz constant.
    pub global_constant: f64,
    pub global_pair: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionSummary {
    pub requested_depth: u32,
    pub depth: u32,
    pub eps: f64,
    pub samples: usize,
    /// Length in the stencil length metric.
    pub length: f64,
    /// Length of the straight-segment polyline through the samples.
    pub chord_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgammaSummary {
    pub pairs: usize,
    pub max_ratio: f64,
    pub attained_by_profile: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub demo: DemoName,
    pub h: f64,
    pub stencil: u32,
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub x: usize,
    pub y: usize,
    /// Chord distance of the reference pair.
    pub d: f64,
    /// Stencil length distance of the reference pair.
    pub d_ell: f64,
    pub length_space: bool,
    pub sheaf: bool,
    pub dgamma_check: &'static str,
    pub geodesic: &'static str,
    /// Euclidean length of the shortest stencil path.
    pub path_length: f64,
    pub length: LengthVerdict,
    pub sheaf_check: SheafVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSummary>,
    pub dgamma: DgammaSummary,
    /// The summary, or `{"error": …}` when no level could be built.
    #[serde(serialize_with = "summary_or_error")]
    pub bisection: Result<BisectionSummary, String>,
}

fn summary_or_error<S: serde::Serializer>(
    r: &Result<BisectionSummary, String>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Ok(summary) => summary.serialize(s),
        Err(e) => serde_json::json!({ "error": e }).serialize(s),
    }
}

/// A finished run: the report plus what the figure needs.
pub struct DemoRun {
    pub report: DemoReport,
    pub sample: GridSample,
    /// `ρ_ℓ^grid(x, ·)`, `∞` as `f64::INFINITY`.
    pub field: Vec<f64>,
    pub route: Vec<Point>,
    pub bisection: Option<Vec<Point>>,
}

fn chord_length(pts: &[Point]) -> f64 {
    pts.windows(2)
        .map(|w| (w[0][0] - w[1][0]).hypot(w[0][1] - w[1][1]))
        .sum()
}

pub fn run_demo(name: DemoName, cfg: &DemoConfig) -> Result<DemoRun> {
    if !(cfg.h > 0.0 && cfg.eps > 0.0 && cfg.dgamma_tol >= 0.0) {
        return Err(Error::InvalidArgument(
            "h and eps must be positive, tol nonnegative".into(),
        ));
    }
    let domain = name.domain(cfg.h)?;
    let sample = sample_grid(&domain, cfg.h, cfg.stencil)?;
    let missing = |p: Point| {
        Error::InvalidArgument(format!(
            "reference point {p:?} is not a grid node at h = {}",
            cfg.h
        ))
    };
    let x = sample
        .node_at(REFERENCE[0])
        .ok_or_else(|| missing(REFERENCE[0]))?;
    let y = sample
        .node_at(REFERENCE[1])
        .ok_or_else(|| missing(REFERENCE[1]))?;
    let chord = sample.chord();
    let n = sample.len();

    let mut rng = gen::rng(cfg.seed);
    let mut sources = vec![x, y];
    sources.extend(
        index::sample(&mut rng, n, cfg.sources.min(n))
            .into_iter()
            .filter(|&s| s != x && s != y),
    );

    // Stencil paths may overshoot straight lines by the worst-direction
    // ratio; chaining through the lattice costs one step per endpoint.
    let tol = Tolerance {
        abs: default_length_tol(cfg.h),
        rel: cfg.stencil.worst_direction_ratio() - 1.0,
    };
    let length = length_verdict(chord, sample.graph(), &sources, cfg.h, tol)?;

    let r0 = cfg.r0.unwrap_or(1.5 * cfg.h);
    let cover = clearance_cover(&sample, r0)?;
    let chains = chain_graph(chord, &cover);
    let sheaf = sheaf_check_with(chord, &chains, &sources, tol)?;
    let witness = match (&sheaf.witness_field, sheaf.witness_pair) {
        (Some(field), Some(pair)) => Some(summarize_witness(&sample, &cover, field, pair)),
        _ => None,
    };

    let sp = sample.graph().shortest_paths(x);
    let d_ell = sp.dist[y].finite().ok_or(Error::Unreachable(y))?;
    let route: Vec<Point> = sp
        .route(y)
        .expect("finite")
        .into_iter()
        .map(|i| sample.point(i))
        .collect();
    let route_len = chord_length(&route);
    let field: Vec<f64> = sp.dist.iter().map(|d| d.to_f64()).collect();

    let mut pairs = vec![(x, y)];
    let (a, b) = (
        index::sample(&mut rng, n, cfg.pairs.min(n)),
        index::sample(&mut rng, n, cfg.pairs.min(n)),
    );
    pairs.extend(
        a.into_iter()
            .zip(b)
            .filter(|&(p, q)| sp_reachable(&sample, p, q)),
    );
    let dg = verify_dgamma_equals_rho_ell(&sample, &pairs, cfg.dgamma_tol)?;

    let metric = sample.length_metric();
    let (bisection, bis_pts) = match bisect_adaptive(&metric, x, y, cfg.eps, cfg.depth) {
        Ok((path, depth)) => {
            let pts: Vec<Point> = path.samples().iter().map(|&i| sample.point(i)).collect();
            let summary = BisectionSummary {
                requested_depth: cfg.depth,
                depth,
                eps: cfg.eps,
                samples: path.len(),
                length: path_length(&metric, &path).to_f64(),
                chord_length: chord_length(&pts),
            };
            (Ok(summary), Some(pts))
        }
        Err(e) => (Err(e.to_string()), None),
    };

    let d = chord.dist(x, y).to_f64();
    let length_space = length.verdict.passed();
    let geodesic = if !length_space {
        "not a length space"
    } else if route_len > d * (1.0 + STRICT_REL_EPS) {
        "length, not geodesic"
    } else {
        "geodesic"
    };
    let report = DemoReport {
        demo: name,
        h: cfg.h,
        stencil: cfg.stencil.neighbors(),
        seed: cfg.seed,
        nodes: n,
        edges: sample.graph().edge_count(),
        x,
        y,
        d,
        d_ell,
        length_space,
        sheaf: sheaf.holds,
        dgamma_check: "pass",
        geodesic,
        path_length: route_len,
        length,
        sheaf_check: sheaf,
        witness,
        dgamma: DgammaSummary {
            pairs: dg.rows.len(),
            max_ratio: dg.max_ratio,
            attained_by_profile: dg.attained_by_profile,
            tol: dg.tol,
        },
        bisection,
    };
    Ok(DemoRun {
        report,
        sample,
        field,
        route,
        bisection: bis_pts,
    })
}

fn sp_reachable(sample: &GridSample, p: usize, q: usize) -> bool {
    // demo domains are connected at every sensible spacing; guard anyway
    let comps = sample.graph().components();
    comps[p] == comps[q]
}

/// Runs [`bisect_geodesic`] at `depth`; if some level has no midpoint within
/// its slack, reruns at the deepest level that succeeded (levels above the
/// failing one are identical either way).
pub fn bisect_adaptive<M: Metric + ?Sized>(
    space: &M,
    x: usize,
    y: usize,
    eps: f64,
    depth: u32,
) -> Result<(crate::space::Path, u32)> {
    match bisect_geodesic(space, x, y, eps, depth) {
        Ok(p) => Ok((p, depth)),
        Err(Error::MidpointNotFound { level, .. }) if level >= 1 => {
            bisect_geodesic(space, x, y, eps, level).map(|p| (p, level))
        }
        Err(e) => Err(e),
    }
}

fn summarize_witness(
    sample: &GridSample,
    cover: &crate::sheaf::Cover,
    field: &ScalarField,
    pair: [usize; 2],
) -> WitnessSummary {
    let local_constant = local_lipschitz_constant(sample.chord(), field, cover);
    let reach = 3.0 * sample.spacing();
    let (gx, gy, global_constant) = sample
        .steepest_local_pair(field, reach)
        .unwrap_or((pair[0], pair[1], 0.0));
    WitnessSummary {
        source: pair[0],
        pair,
        local_constant,
        global_constant,
        global_pair: [gx, gy],
    }
}

/// Domain, the distance field from `x`, the shortest stencil path (red) and
/// the bisection path (blue).
pub fn render_svg(run: &DemoRun) -> String {
    let sample = &run.sample;
    let mut svg = Svg::new(sample.domain().bbox, 600.0);
    svg.domain(sample.domain());
    let pts: Vec<Point> = (0..sample.len()).map(|i| sample.point(i)).collect();
    svg.field_dots(&pts, &run.field, MAX_DOTS);
    svg.polyline(&run.route, "#d62728", 2.5);
    if let Some(b) = &run.bisection {
        svg.polyline(b, "#1f77b4", 1.5);
        for &p in b {
            svg.marker(p, "#1f77b4", 2.5);
        }
    }
    for p in REFERENCE {
        svg.marker(p, "#000", 4.0);
    }
    let r = &run.report;
    svg.label(
        [
            sample.domain().bbox[0] + 0.1,
            sample.domain().bbox[3] - 0.25,
        ],
        &format!(
            "{:?}: d = {:.4}, d_ell = {:.4}, {}",
            r.demo, r.d, r.d_ell, r.geodesic
        )
        .to_lowercase(),
    );
    svg.finish()
}
