//! Browser bindings for the planar examples.
//!
//! Three operations back the page in `www/`:
//! - [`demo`]: the full report and figure for one example,
//! - [`distance_field`]: grid length distance from a clicked point, with the
//!   shortest stencil route to a second one,
//! - [`bisect`]: a near-geodesic between two clicked points by repeated
//!   approximate midpoints.
//!
//! Each returns a JSON string `{"svg": …, …}`; failures become JS errors.
//! The `*_json` functions are the plain-Rust versions, usable natively.

use lenspace::demo::{bisect_adaptive, render_svg, run_demo, DemoConfig, DemoName, DEMO_BBOX};
use lenspace::domain::{euclidean_length_metric, sample_grid, GridSample, Stencil};
use lenspace::svg::{Svg, MAX_DOTS};
use lenspace::Metric;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Browser grids stay below this many nodes so clicks answer promptly.
pub const MAX_NODES: usize = 40_000;

fn grid(name: &str, h: f64, stencil: u32) -> Result<GridSample, String> {
    let name = DemoName::parse(name).map_err(|e| e.to_string())?;
    let stencil = Stencil::from_neighbors(stencil).map_err(|e| e.to_string())?;
    let domain = name.domain(h).map_err(|e| e.to_string())?;
    let [x0, y0, x1, y1] = domain.bbox;
    let lattice = ((x1 - x0) / h) * ((y1 - y0) / h);
    if !(lattice <= MAX_NODES as f64) {
        return Err(format!(
            "about {lattice:.0} nodes at h = {h}; use a coarser grid"
        ));
    }
    sample_grid(&domain, h, stencil).map_err(|e| e.to_string())
}

fn base_figure(sample: &GridSample) -> Svg {
    let mut svg = Svg::new(sample.domain().bbox, 600.0);
    svg.domain(sample.domain());
    svg
}

pub fn demo_json(name: &str, h: f64, stencil: u32, seed: u64) -> Result<String, String> {
    grid(name, h, stencil)?;
    let cfg = DemoConfig {
        h,
        stencil: Stencil::from_neighbors(stencil).map_err(|e| e.to_string())?,
        seed,
        ..DemoConfig::default()
    };
    let run = run_demo(DemoName::parse(name).map_err(|e| e.to_string())?, &cfg)
        .map_err(|e| e.to_string())?;
    Ok(json!({ "svg": render_svg(&run), "report": run.report }).to_string())
}

pub fn distance_field_json(
    name: &str,
    h: f64,
    stencil: u32,
    from: [f64; 2],
    to: [f64; 2],
) -> Result<String, String> {
    let sample = grid(name, h, stencil)?;
    let (x, y) = (sample.nearest_node(from), sample.nearest_node(to));
    let sp = euclidean_length_metric(&sample, x).map_err(|e| e.to_string())?;
    let pts: Vec<[f64; 2]> = (0..sample.len()).map(|i| sample.point(i)).collect();
    let values: Vec<f64> = sp.dist.iter().map(|d| d.to_f64()).collect();
    let mut svg = base_figure(&sample);
    svg.field_dots(&pts, &values, MAX_DOTS);
    if let Some(route) = sp.route(y) {
        let line: Vec<[f64; 2]> = route.into_iter().map(|i| pts[i]).collect();
        svg.polyline(&line, "#d62728", 2.5);
    }
    svg.marker(pts[x], "#000", 4.0);
    svg.marker(pts[y], "#000", 4.0);
    Ok(json!({
        "svg": svg.finish(),
        "x": pts[x],
        "y": pts[y],
        "d": sample.chord().dist(x, y),
        "d_ell": sp.dist[y],
    })
    .to_string())
}

pub fn bisect_json(
    name: &str,
    h: f64,
    stencil: u32,
    from: [f64; 2],
    to: [f64; 2],
    eps: f64,
    depth: u32,
) -> Result<String, String> {
    let sample = grid(name, h, stencil)?;
    let (x, y) = (sample.nearest_node(from), sample.nearest_node(to));
    let metric = sample.length_metric();
    let (path, reached) = bisect_adaptive(&metric, x, y, eps, depth).map_err(|e| e.to_string())?;
    let pts: Vec<[f64; 2]> = path.samples().iter().map(|&i| sample.point(i)).collect();
    let length: f64 = path
        .samples()
        .windows(2)
        .map(|w| metric.dist(w[0], w[1]).to_f64())
        .sum();
    let mut svg = base_figure(&sample);
    svg.polyline(&pts, "#1f77b4", 2.0);
    for &p in &pts {
        svg.marker(p, "#1f77b4", 3.0);
    }
    Ok(json!({
        "svg": svg.finish(),
        "depth": reached,
        "samples": pts.len(),
        "length": length,
        "d_ell": metric.dist(x, y),
        "d": sample.chord().dist(x, y),
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// `[x0, y0, x1, y1]` of every example, for mapping clicks to the plane.
#[wasm_bindgen]
pub fn bbox() -> Vec<f64> {
    DEMO_BBOX.to_vec()
}

#[wasm_bindgen]
pub fn demo(name: &str, h: f64, stencil: u32, seed: u64) -> Result<String, JsError> {
    js(demo_json(name, h, stencil, seed))
}

#[wasm_bindgen]
pub fn distance_field(
    name: &str,
    h: f64,
    stencil: u32,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
) -> Result<String, JsError> {
    js(distance_field_json(name, h, stencil, [x0, y0], [x1, y1]))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn bisect(
    name: &str,
    h: f64,
    stencil: u32,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    eps: f64,
    depth: u32,
) -> Result<String, JsError> {
    js(bisect_json(
        name,
        h,
        stencil,
        [x0, y0],
        [x1, y1],
        eps,
        depth,
    ))
}
