//! Command implementations. Each returns whether its verdict passed; input
//! problems surface as [`CliError`].

use std::fs;
use std::path::Path as FsPath;

use lenspace::demo::{render_svg, run_demo, DemoConfig, DemoName};
use lenspace::domain::{euclidean_length_metric, sample_grid, GridSample, PlanarDomain};
use lenspace::error::Error;
use lenspace::gen;
use lenspace::io::{read_input, read_space, CoverSpec, Input, PathDoc};
use lenspace::length::{
    bisect_geodesic, default_length_tol, induced_length_metric, is_length_space, length_verdict,
    Tolerance,
};
use lenspace::sheaf::{
    lipschitz_constant, local_lipschitz_constant, sheaf_check_from, Cover, SheafVerdict,
};
use lenspace::svg::{Svg, MAX_DOTS};
use lenspace::{ExtReal, FiniteMetricSpace, Metric};

use rand::seq::index;
use serde_json::{json, Map, Value};

use crate::{Cli, Command, Format, RunConfig};

pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

pub struct CliError {
    pub message: String,
    pub kind: &'static str,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            kind: "usage",
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            message: e.to_string(),
            kind: "input",
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            message: e.to_string(),
            kind: "io",
        }
    }
}

type CmdResult = Result<Outcome, CliError>;

fn read(path: &FsPath) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError {
        message: format!("{}: {e}", path.display()),
        kind: "io",
    })
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(cfg: &RunConfig, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    emit(cfg, &text)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Writes `rows` as CSV under `header`.
fn emit_csv(
    cfg: &RunConfig,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<(), CliError> {
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    emit(cfg, &text)
}

/// Flattens a JSON object one level into `key,value` rows.
fn flat_rows(value: &Value) -> Vec<String> {
    let mut rows = Vec::new();
    if let Value::Object(map) = value {
        for (k, v) in map {
            match v {
                Value::Object(inner) => {
                    for (k2, v2) in inner {
                        rows.push(format!("{k}.{k2},{}", csv_cell(v2)));
                    }
                }
                other => rows.push(format!("{k},{}", csv_cell(other))),
            }
        }
    }
    rows
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "inf".into(),
        other => {
            let s = other.to_string();
            if s.contains(',') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s
            }
        }
    }
}

fn ext_cell(d: ExtReal) -> String {
    match d {
        ExtReal::Finite(v) => v.to_string(),
        ExtReal::Infinite => "inf".into(),
    }
}

fn require_h(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.h {
        Some(h) if h > 0.0 && h.is_finite() => Ok(h),
        Some(h) => Err(CliError::usage(format!("--h must be positive, got {h}"))),
        None => Err(CliError::usage("--h is required")),
    }
}

fn no_svg_format(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    if cfg.format == Format::Svg {
        return Err(CliError::usage(format!(
            "--format svg is not available for {what}"
        )));
    }
    Ok(())
}

/// Sources for sampled verdicts on grids: the given nodes plus `extra`
/// seeded random ones.
fn grid_sources(sample: &GridSample, fixed: &[usize], extra: usize, seed: u64) -> Vec<usize> {
    let mut out = fixed.to_vec();
    let mut rng = gen::rng(seed);
    let n = sample.len();
    out.extend(
        index::sample(&mut rng, n, extra.min(n))
            .into_iter()
            .filter(|s| !fixed.contains(s)),
    );
    out
}

fn grid_tolerance(cfg: &RunConfig, h: f64) -> Tolerance {
    Tolerance {
        abs: cfg.tol.unwrap_or(default_length_tol(h)),
        rel: cfg.stencil.worst_direction_ratio() - 1.0,
    }
}

fn check_node(sample: &GridSample, id: usize) -> Result<(), CliError> {
    if id >= sample.len() {
        return Err(Error::UnknownPoint(id).into());
    }
    Ok(())
}

/// Parses a cover spec; a clearance cover without `r0` defaults to `1.5h`.
fn cover_spec(text: &str, h: Option<f64>) -> Result<CoverSpec, CliError> {
    let mut value: Value = serde_json::from_str(text).map_err(Error::from)?;
    if let Some(obj) = value.as_object_mut() {
        if obj.get("kind").and_then(Value::as_str) == Some("clearance") && !obj.contains_key("r0") {
            let h = h.ok_or_else(|| CliError::usage("a clearance cover without r0 needs --h"))?;
            obj.insert("r0".into(), json!(1.5 * h));
        }
    }
    Ok(CoverSpec::parse(&value.to_string())?)
}

pub fn run(cli: &Cli) -> CmdResult {
    let cfg = &cli.opts;
    match &cli.command {
        Command::Validate { space } => validate(cfg, space),
        Command::Length {
            input,
            source,
            target,
            sources,
        } => match read_input(&read(input)?)? {
            Input::Space(space) => length_space(cfg, &space, *source, *target),
            Input::Domain(domain) => length_domain(cfg, &domain, *source, *target, *sources),
        },
        Command::Sheaf {
            input,
            cover,
            witness,
            sources,
        } => {
            let spec_text = if cover.trim_start().starts_with(['{', '[']) {
                cover.clone()
            } else {
                read(FsPath::new(cover))?
            };
            let spec = cover_spec(&spec_text, cfg.h)?;
            match read_input(&read(input)?)? {
                Input::Space(space) => {
                    let cover = spec.resolve(&space)?;
                    let verdict = sheaf_check_from(
                        &space,
                        &cover,
                        &(0..space.len()).collect::<Vec<_>>(),
                        Tolerance::absolute(cfg.tol.unwrap_or(0.0)),
                    )?;
                    sheaf_report(cfg, &space, &cover, verdict, witness.as_deref(), Map::new())
                }
                Input::Domain(domain) => {
                    let h = require_h(cfg)?;
                    let sample = sample_grid(&domain, h, cfg.stencil)?;
                    let cover = spec.resolve_on_grid(&sample)?;
                    let src = grid_sources(&sample, &[], *sources, cfg.seed);
                    let verdict =
                        sheaf_check_from(sample.chord(), &cover, &src, grid_tolerance(cfg, h))?;
                    let mut extra = Map::new();
                    extra.insert("nodes".into(), json!(sample.len()));
                    sheaf_report(
                        cfg,
                        sample.chord(),
                        &cover,
                        verdict,
                        witness.as_deref(),
                        extra,
                    )
                }
            }
        }
        Command::Geodesic { space, x, y } => geodesic(cfg, &read_space(&read(space)?)?, *x, *y),
        Command::Demo { name } => demo(
            cfg,
            DemoName::parse(name).map_err(|e| CliError::usage(e.to_string()))?,
        ),
    }
}

fn validate(cfg: &RunConfig, path: &FsPath) -> CmdResult {
    no_svg_format(cfg, "validate")?;
    let space = read_space(&read(path)?)?;
    let report = lenspace::space::validate_wide_metric(&space);
    let value = to_value(&report);
    match cfg.format {
        Format::Csv => emit_csv(cfg, "key,value", flat_rows(&value))?,
        _ => emit_json(cfg, &value)?,
    }
    Ok(Outcome::from_bool(report.passed()))
}

fn length_space(
    cfg: &RunConfig,
    space: &FiniteMetricSpace,
    source: usize,
    target: Option<usize>,
) -> CmdResult {
    no_svg_format(cfg, "length on a finite space")?;
    let h = require_h(cfg)?;
    let tol = cfg.tol.unwrap_or(default_length_tol(h));
    let res = induced_length_metric(space, h, source)?;
    if let Some(t) = target {
        space.check_id(t)?;
    }
    let verdict = is_length_space(space, h, tol)?;
    let d = space.row(source);
    match cfg.format {
        Format::Csv => {
            let ids: Vec<usize> = target.map_or_else(|| (0..space.len()).collect(), |t| vec![t]);
            emit_csv(
                cfg,
                "target,d,d_ell",
                ids.into_iter()
                    .map(|y| format!("{y},{},{}", ext_cell(d[y]), ext_cell(res.dl[y]))),
            )?;
        }
        _ => {
            let mut value = to_value(&verdict);
            let obj = value.as_object_mut().expect("verdict is an object");
            obj.insert("source".into(), json!(source));
            match target {
                Some(t) => {
                    obj.insert("target".into(), json!(t));
                    obj.insert("d".into(), to_value(&d[t]));
                    obj.insert("d_ell".into(), to_value(&res.dl[t]));
                }
                None => {
                    obj.insert("d_ell".into(), to_value(&res.dl));
                }
            }
            emit_json(cfg, &value)?;
        }
    }
    Ok(Outcome::from_bool(verdict.verdict.passed()))
}

fn length_domain(
    cfg: &RunConfig,
    domain: &PlanarDomain,
    source: usize,
    target: Option<usize>,
    extra: usize,
) -> CmdResult {
    let h = require_h(cfg)?;
    let sample = sample_grid(domain, h, cfg.stencil)?;
    check_node(&sample, source)?;
    if let Some(t) = target {
        check_node(&sample, t)?;
    }
    let sp = euclidean_length_metric(&sample, source)?;
    let fixed: Vec<usize> = std::iter::once(source).chain(target).collect();
    let sources = grid_sources(&sample, &fixed, extra, cfg.seed);
    let verdict = length_verdict(
        sample.chord(),
        sample.graph(),
        &sources,
        h,
        grid_tolerance(cfg, h),
    )?;
    let figure = || {
        let mut svg = Svg::new(domain.bbox, 600.0);
        svg.domain(domain);
        let pts: Vec<[f64; 2]> = (0..sample.len()).map(|i| sample.point(i)).collect();
        let vals: Vec<f64> = sp.dist.iter().map(|d| d.to_f64()).collect();
        svg.field_dots(&pts, &vals, MAX_DOTS);
        if let Some(route) = target.and_then(|t| sp.route(t)) {
            let line: Vec<[f64; 2]> = route.into_iter().map(|i| sample.point(i)).collect();
            svg.polyline(&line, "#d62728", 2.5);
        }
        svg.marker(sample.point(source), "#000", 4.0);
        svg.finish()
    };
    if let Some(path) = &cfg.svg {
        fs::write(path, figure())?;
    }
    match cfg.format {
        Format::Svg => emit(cfg, &figure())?,
        Format::Csv => {
            let ids: Vec<usize> = target.map_or_else(|| (0..sample.len()).collect(), |t| vec![t]);
            let chord = sample.chord();
            emit_csv(
                cfg,
                "target,x,y,d,d_ell",
                ids.into_iter().map(|y| {
                    let p = sample.point(y);
                    format!(
                        "{y},{},{},{},{}",
                        p[0],
                        p[1],
                        ext_cell(chord.dist(source, y)),
                        ext_cell(sp.dist[y])
                    )
                }),
            )?;
        }
        Format::Json => {
            let mut value = to_value(&verdict);
            let obj = value.as_object_mut().expect("verdict is an object");
            obj.insert("nodes".into(), json!(sample.len()));
            obj.insert("source".into(), json!(source));
            obj.insert("source_point".into(), json!(sample.point(source)));
            if let Some(t) = target {
                obj.insert("target".into(), json!(t));
                obj.insert("target_point".into(), json!(sample.point(t)));
                obj.insert("d".into(), to_value(&sample.chord().dist(source, t)));
                obj.insert("d_ell".into(), to_value(&sp.dist[t]));
            }
            emit_json(cfg, &value)?;
        }
    }
    Ok(Outcome::from_bool(verdict.verdict.passed()))
}

fn sheaf_report<M: Metric + ?Sized>(
    cfg: &RunConfig,
    space: &M,
    cover: &Cover,
    verdict: SheafVerdict,
    witness_path: Option<&FsPath>,
    extra: Map<String, Value>,
) -> CmdResult {
    no_svg_format(cfg, "sheaf")?;
    let mut value = to_value(&verdict);
    let obj = value.as_object_mut().expect("verdict is an object");
    obj.extend(extra);
    if let (Some(field), Some([x, y])) = (&verdict.witness_field, verdict.witness_pair) {
        // self-check: locally 1-Lipschitz, globally violated on the pair
        obj.insert(
            "witness_local_constant".into(),
            json!(local_lipschitz_constant(space, field, cover)),
        );
        obj.insert(
            "witness_pair_ratio".into(),
            to_value(&lipschitz_constant(space, field, &[x, y])),
        );
        if let Some(path) = witness_path {
            fs::write(
                path,
                serde_json::to_string_pretty(field.values()).expect("fields serialize") + "\n",
            )?;
            obj.insert("witness_file".into(), json!(path.display().to_string()));
        }
    }
    match cfg.format {
        Format::Csv => emit_csv(cfg, "key,value", flat_rows(&value))?,
        _ => emit_json(cfg, &value)?,
    }
    Ok(Outcome::from_bool(verdict.holds))
}

fn geodesic(cfg: &RunConfig, space: &FiniteMetricSpace, x: usize, y: usize) -> CmdResult {
    let path = match bisect_geodesic(space, x, y, cfg.eps, cfg.depth) {
        Ok(path) => path,
        Err(Error::MidpointNotFound { a, b, level, slack }) => {
            // no ε-midpoint at the requested slack: a negative verdict
            let value = json!({
                "status": "no_midpoint",
                "x": x,
                "y": y,
                "pair": [a, b],
                "level": level,
                "slack": slack,
            });
            emit_json(cfg, &value)?;
            return Ok(Outcome::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    let doc = PathDoc::new(space, &path);
    let planar: Option<Vec<[f64; 2]>> = (0..space.len()).map(|i| space.coords(i)).collect();
    let figure = |pts: &[[f64; 2]]| {
        let mut svg = Svg::around(pts, 600.0);
        for &p in pts {
            svg.marker(p, "#999", 2.0);
        }
        let line: Vec<[f64; 2]> = path.samples().iter().map(|&i| pts[i]).collect();
        svg.polyline(&line, "#1f77b4", 2.0);
        svg.marker(pts[x], "#000", 4.0);
        svg.marker(pts[y], "#000", 4.0);
        svg.finish()
    };
    if let Some(out) = &cfg.svg {
        let pts = planar
            .as_deref()
            .ok_or_else(|| CliError::usage("--svg needs a space with 2-D coordinates"))?;
        fs::write(out, figure(pts))?;
    }
    match cfg.format {
        Format::Svg => {
            let pts = planar.as_deref().ok_or_else(|| {
                CliError::usage("--format svg needs a space with 2-D coordinates")
            })?;
            emit(cfg, &figure(pts))?;
        }
        Format::Csv => emit_csv(
            cfg,
            "param,id",
            doc.params
                .iter()
                .zip(&doc.ids)
                .map(|(t, i)| format!("{t},{i}")),
        )?,
        Format::Json => emit_json(cfg, &to_value(&doc))?,
    }
    Ok(Outcome::Pass)
}

fn demo(cfg: &RunConfig, name: DemoName) -> CmdResult {
    let config = DemoConfig {
        h: cfg.h.unwrap_or(DemoConfig::default().h),
        stencil: cfg.stencil,
        seed: cfg.seed,
        eps: cfg.eps,
        depth: cfg.depth,
        ..DemoConfig::default()
    };
    if !(config.h > 0.0) {
        return Err(CliError::usage("--h must be positive"));
    }
    let run = run_demo(name, &config)?;
    if let Some(path) = &cfg.svg {
        fs::write(path, render_svg(&run))?;
    }
    let value = to_value(&run.report);
    match cfg.format {
        Format::Svg => emit(cfg, &render_svg(&run))?,
        Format::Csv => emit_csv(cfg, "key,value", flat_rows(&value))?,
        Format::Json => emit_json(cfg, &value)?,
    }
    Ok(Outcome::Pass)
}
