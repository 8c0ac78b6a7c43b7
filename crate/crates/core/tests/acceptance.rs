//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::Instant;

use rand::Rng;

use lenspace::demo::{run_demo, DemoConfig, DemoName};
use lenspace::domain::{
    convex_box, sample_grid, slit_plane, verify_dgamma_equals_rho_ell, Stencil, TrialKind,
};
use lenspace::gen::{self, random_geometric_graph, subdivide};
use lenspace::length::{
    bisect_geodesic, check_ball_intersection, check_ball_intersection_among, is_length_space,
    StepGraph,
};
use lenspace::sheaf::{chain_metric, dual_distance, sheaf_check, Cover, LIP_EPS};
use lenspace::space::path_length;
use lenspace::{FiniteMetricSpace, GraphMetric, Metric};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("slit plane is not a length space", slit_plane_demo),
        (
            "punctured plane is length, not geodesic",
            punctured_plane_demo,
        ),
        (
            "trial bracket closes on convex box and slit",
            dgamma_bracket,
        ),
        (
            "sheaf check agrees with length check",
            sheaf_length_agreement,
        ),
        ("sheaf implies approximate midpoints", midpoints),
        ("bisection builds near-geodesics", bisection),
        ("dual formula is exact", dual_formula),
        ("infinite distances are consistent", infinity_consistency),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {}: {tag} - {name}: {detail} [{secs:.2} s]",
            k + 1
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}

fn slit_plane_demo() -> Outcome {
    let start = Instant::now();
    let run = run_demo(
        DemoName::Slit,
        &DemoConfig {
            h: 0.02,
            stencil: Stencil::Sixteen,
            ..DemoConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let r = &run.report;
    let oracle = 2.0 * 2f64.sqrt();
    let gap = r.length.max_gap.to_f64();
    let Some(w) = &r.witness else {
        return Err("sheaf check produced no witness".into());
    };
    let detail = format!(
        "d = {}, d_ell = {:.4} (oracle {oracle:.4}), length gap = {gap:.4}, sheaf holds = {}, \
         witness local = {:.6}, global >= {:.2}, run {secs:.1} s",
        r.d, r.d_ell, r.sheaf, w.local_constant, w.global_constant
    );
    check(
        r.d == 2.0
            && r.d_ell >= oracle
            && r.d_ell <= oracle * 1.03
            && !r.length_space
            && gap >= 0.8
            && !r.sheaf
            && w.local_constant <= 1.0 + LIP_EPS
            && w.global_constant >= 10.0
            && secs <= 60.0,
        detail,
    )
}

fn punctured_plane_demo() -> Outcome {
    let run = run_demo(
        DemoName::Punctured,
        &DemoConfig {
            h: 0.02,
            ..DemoConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let r = &run.report;
    let b = r
        .bisection
        .as_ref()
        .map_err(|e| format!("bisection failed: {e}"))?;
    let detail = format!(
        "d_ell = {:.5}, stencil path {:.5}, bisection path {:.5} (chord polyline {:.5}, depth {}), verdict {:?}",
        r.d_ell, r.path_length, b.length, b.chord_length, b.depth, r.geodesic
    );
    check(
        r.d_ell <= 2.05
            && r.path_length > 2.0
            && b.length > 2.0
            && b.chord_length > 2.0
            && r.geodesic == "length, not geodesic",
        detail,
    )
}

fn dgamma_bracket() -> Outcome {
    let h = 0.05;
    let mut lines = Vec::new();
    let mut ok = true;
    for (label, domain) in [
        ("convex", convex_box([-3.0, -3.0, 3.0, 3.0]).unwrap()),
        ("slit", slit_plane(1.0, [-3.0, -3.0, 3.0, 3.0]).unwrap()),
    ] {
        let g = sample_grid(&domain, h, Stencil::Sixteen).map_err(|e| e.to_string())?;
        let mut rng = gen::rng(3);
        let mut pairs = vec![(
            g.node_at([-1.0, 0.0]).unwrap(),
            g.node_at([1.0, 0.0]).unwrap(),
        )];
        while pairs.len() < 100 {
            pairs.push((rng.gen_range(0..g.len()), rng.gen_range(0..g.len())));
        }
        let report =
            verify_dgamma_equals_rho_ell(&g, &pairs, 0.05).map_err(|e| format!("{label}: {e}"))?;
        let bracketed = report
            .rows
            .iter()
            .all(|r| r.lower <= r.upper && r.upper <= r.lower * 1.05 + 1e-12);
        let attained = report.rows.iter().all(|r| {
            r.attained_by
                == TrialKind::DistanceProfile {
                    anchor: r.x,
                    sign: 1.0,
                }
                && r.lower == r.upper
        });
        ok &= report.rows.len() >= 100 && bracketed && attained;
        let reference = &report.rows[0];
        lines.push(format!(
            "{label}: {} pairs, max upper/lower {:.6}, profile attains {}/{}; (-1,0)-(1,0) lower {:.4} chord {}",
            report.rows.len(),
            report.max_ratio,
            report.attained_by_profile,
            report.rows.len(),
            reference.lower,
            reference.chord
        ));
    }
    check(ok, lines.join("; "))
}

/// Seeded connected geometric graph metrics. About half carry long edges
/// (longer than twice the joining radius), which break the length property.
fn geometric_instances() -> Vec<(FiniteMetricSpace, f64)> {
    (0..50u64)
        .map(|seed| {
            let mut rng = gen::rng(1000 + seed);
            let n = rng.gen_range(20..=60);
            let radius = (2.5 * (n as f64).ln() / (std::f64::consts::PI * n as f64)).sqrt();
            let long = if seed % 2 == 0 {
                rng.gen_range(1..=3)
            } else {
                0
            };
            let g = random_geometric_graph(&mut rng, n, radius, long);
            (
                FiniteMetricSpace::from_metric(&GraphMetric::new(g.graph)),
                radius,
            )
        })
        .collect()
}

/// Numerical zero for exact graph metrics.
const EXACT_TOL: f64 = 1e-9;

fn sheaf_length_agreement() -> Outcome {
    let start = Instant::now();
    let mut agree = 0;
    let mut passes = 0;
    let instances = geometric_instances();
    for (space, h) in &instances {
        let length = is_length_space(space, *h, EXACT_TOL).map_err(|e| e.to_string())?;
        let cover = Cover::balls(space, *h).map_err(|e| e.to_string())?;
        let sheaf = sheaf_check(space, &cover, EXACT_TOL).map_err(|e| e.to_string())?;
        if length.verdict.passed() == sheaf.holds {
            agree += 1;
        }
        passes += usize::from(sheaf.holds);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        agree == instances.len() && secs <= 10.0,
        format!(
            "{agree}/{} agree ({passes} pass, {} fail), {secs:.2} s",
            instances.len(),
            instances.len() - passes
        ),
    )
}

fn midpoints() -> Outcome {
    let mut holding = 0;
    let mut clean = 0;
    for (space, h) in geometric_instances() {
        let cover = Cover::balls(&space, h).map_err(|e| e.to_string())?;
        if sheaf_check(&space, &cover, EXACT_TOL)
            .map_err(|e| e.to_string())?
            .holds
        {
            holding += 1;
            // a finite space has no exact midpoints; the scale of the space is the slack
            clean += usize::from(check_ball_intersection(&space, h).passed());
        }
    }
    let h = 0.25;
    let domain = slit_plane(1.0, [-3.0, -3.0, 3.0, 3.0]).unwrap();
    let g = sample_grid(&domain, h, Stencil::Sixteen).map_err(|e| e.to_string())?;
    let report = check_ball_intersection(g.chord(), 0.6 * h);
    let crossing = report
        .failures
        .iter()
        .filter(|[a, b]| !domain.segment_inside(g.point(*a), g.point(*b)))
        .count();
    check(
        holding > 0 && clean == holding && !report.failures.is_empty() && crossing == report.failures.len(),
        format!(
            "{clean}/{holding} sheaf-holding graphs without failures; slit sample ({} nodes, eps = {}): {} failing pairs, {crossing} cross the slit",
            g.len(),
            0.6 * h,
            report.failures.len()
        ),
    )
}

fn bisection() -> Outcome {
    let (eps, depth) = (0.1, 3);
    let mut graphs = 0;
    let mut runs = 0;
    let mut good = 0;
    let mut seed = 0u64;
    while graphs < 20 && seed < 200 {
        let mut rng = gen::rng(5000 + seed);
        seed += 1;
        let n = rng.gen_range(10..=16);
        let long = rng.gen_range(0..=2);
        let g = random_geometric_graph(&mut rng, n, 0.45, long);
        let (fine, _) = subdivide(&g.graph, &g.coords, 1.0 / 512.0);
        let metric = GraphMetric::new(fine);
        let base: Vec<usize> = (0..n).collect();
        if !check_ball_intersection_among(&metric, &base, eps)
            .map_err(|e| e.to_string())?
            .passed()
        {
            continue;
        }
        graphs += 1;
        for x in 0..n {
            let row = metric.row(x);
            for y in x + 1..n {
                let delta = row[y].to_f64();
                if delta < 0.8 {
                    continue;
                }
                runs += 1;
                let Ok(path) = bisect_geodesic(&metric, x, y, eps, depth) else {
                    continue;
                };
                let s = path.samples();
                let ends = s[0] == x && *s.last().unwrap() == y && s.len() == (1 << depth) + 1;
                let steps = (0..=depth).all(|lvl| {
                    let stride = 1 << (depth - lvl);
                    let bound = delta * (1.0 + eps) / 2f64.powi(lvl as i32);
                    s.iter()
                        .step_by(stride)
                        .collect::<Vec<_>>()
                        .windows(2)
                        .all(|w| metric.dist(*w[0], *w[1]).to_f64() <= bound * (1.0 + 1e-12))
                });
                let len = path_length(&metric, &path).to_f64();
                // geodesic pieces sum in a different order than Dijkstra: allow rounding
                if ends && steps && len >= delta * (1.0 - 1e-12) && len <= (1.0 + eps) * delta {
                    good += 1;
                }
            }
        }
    }
    check(
        graphs == 20 && runs > 0 && good == runs,
        format!("{graphs} graphs pass the midpoint check; {good}/{runs} bisections within bounds"),
    )
}

fn dual_formula() -> Outcome {
    let mut pairs = 0;
    let mut exact = 0;
    for seed in 0..100u64 {
        let mut rng = gen::rng(9000 + seed);
        let space = match seed % 3 {
            0 => gen::random_euclidean_space(&mut rng, 30, 2),
            1 => gen::random_euclidean_space(&mut rng, 30, 3),
            _ => gen::random_graph_space(&mut rng, 30),
        };
        for x in 0..space.len() {
            for y in 0..space.len() {
                pairs += 1;
                if dual_distance(&space, x, y).map_err(|e| e.to_string())? == space.dist(x, y) {
                    exact += 1;
                }
            }
        }
    }
    check(
        exact == pairs,
        format!("{exact}/{pairs} pairs exact over 100 spaces"),
    )
}

fn infinity_consistency() -> Outcome {
    let mut pairs = 0;
    let mut consistent = 0;
    let mut infinite = 0;
    for seed in 0..20u64 {
        let mut rng = gen::rng(7000 + seed);
        let (n1, n2) = (rng.gen_range(5..=15), rng.gen_range(5..=15));
        let (space, h) = gen::two_component_space(&mut rng, n1, n2);
        let steps = StepGraph::new(&space, h).map_err(|e| e.to_string())?;
        let cover = Cover::balls(&space, h).map_err(|e| e.to_string())?;
        for x in 0..space.len() {
            let d = space.row(x);
            let dl = steps.length_metric(x).map_err(|e| e.to_string())?.dl;
            let chain = chain_metric(&space, &cover, x).map_err(|e| e.to_string())?;
            for y in 0..space.len() {
                pairs += 1;
                let inf = [
                    d[y].is_infinite(),
                    dl[y].is_infinite(),
                    chain[y].is_infinite(),
                ];
                infinite += usize::from(inf[0]);
                consistent += usize::from(inf[0] == inf[1] && inf[1] == inf[2]);
            }
        }
    }
    check(
        consistent == pairs && infinite > 0,
        format!("{consistent}/{pairs} pairs consistent ({infinite} at infinite distance)"),
    )
}
