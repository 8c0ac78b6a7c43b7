//! Grid samples of planar domains: the stencil metric against the chord
//! metric, obstacle monotonicity and the slit certificate.

use lenspace::domain::{
    convex_box, euclidean_length_metric, sample_grid, slit_plane, Obstacle, PlanarDomain, Stencil,
};
use lenspace::length::{is_length_space, length_verdict, StepGraph, Tolerance};
use lenspace::{FiniteMetricSpace, Metric};

#[test]
fn convex_overestimate_is_bounded_by_the_stencil_ratio() {
    let h = 0.1;
    for stencil in [Stencil::Eight, Stencil::Sixteen] {
        let g = sample_grid(&convex_box([-1.0, -1.0, 1.0, 1.0]).unwrap(), h, stencil).unwrap();
        let kappa = stencil.worst_direction_ratio();
        let mut worst: f64 = 1.0;
        for x in (0..g.len()).step_by(7) {
            let rho = euclidean_length_metric(&g, x).unwrap().dist;
            for y in 0..g.len() {
                if y == x {
                    continue;
                }
                let d = g.chord().dist(x, y).to_f64();
                let ratio = rho[y].to_f64() / d;
                assert!(ratio >= 1.0 - 1e-12);
                assert!(
                    ratio <= kappa + 3.0 * h / d,
                    "{stencil:?}: {ratio} at d = {d}"
                );
                worst = worst.max(ratio);
            }
        }
        // the worst direction is actually reached on a lattice this size
        assert!(worst > 1.0 + 0.5 * (kappa - 1.0), "{stencil:?}: {worst}");
    }
}

#[test]
fn removing_an_obstacle_never_lengthens() {
    let h = 0.1;
    let bbox = [-2.0, -2.0, 2.0, 2.0];
    let wall = Obstacle::Polygon(vec![[-0.5, -1.2], [0.5, -1.2], [0.5, 0.9], [-0.5, 0.9]]);
    let slit = Obstacle::Segment([[1.0, -1.0], [1.0, 1.5]]);
    let full = sample_grid(
        &PlanarDomain::new(bbox, vec![wall.clone(), slit]).unwrap(),
        h,
        Stencil::Sixteen,
    )
    .unwrap();
    let less = sample_grid(
        &PlanarDomain::new(bbox, vec![wall]).unwrap(),
        h,
        Stencil::Sixteen,
    )
    .unwrap();
    let x = full.node_at([-1.5, 0.0]).unwrap();
    let xl = less.node_at([-1.5, 0.0]).unwrap();
    let a = euclidean_length_metric(&full, x).unwrap().dist;
    let b = euclidean_length_metric(&less, xl).unwrap().dist;
    for y in 0..full.len() {
        let yl = less
            .node_at(full.point(y))
            .expect("nodes of the smaller domain survive");
        assert!(b[yl] <= a[y], "{:?}", full.point(y));
    }
}

#[test]
fn slit_certificate() {
    // Chord distances chained at 1.5 spacings cannot cross the slit, so the
    // chord metric is not a length space; the stencil metric itself is.
    let h = 0.1;
    let g = sample_grid(
        &slit_plane(1.0, [-2.0, -2.0, 2.0, 2.0]).unwrap(),
        h,
        Stencil::Sixteen,
    )
    .unwrap();
    let chord = g.chord();
    let sources = [
        g.node_at([-1.0, 0.0]).unwrap(),
        g.node_at([-0.1, 0.5]).unwrap(),
    ];
    let steps = StepGraph::new(chord, 1.5 * h).unwrap();
    let chord_verdict = length_verdict(
        chord,
        steps.graph(),
        &sources,
        1.5 * h,
        Tolerance::absolute(2.0 * h),
    )
    .unwrap();
    assert!(!chord_verdict.verdict.passed());
    assert!(chord_verdict.max_gap.to_f64() > 0.8);

    let rho = FiniteMetricSpace::from_metric(&g.length_metric());
    let rho_verdict = is_length_space(&rho, 5f64.sqrt() * h * (1.0 + 1e-9), 1e-9).unwrap();
    assert!(rho_verdict.verdict.passed(), "{rho_verdict:?}");
}

#[test]
fn stencil_grids_are_deterministic() {
    let d = slit_plane(1.0, [-3.0, -3.0, 3.0, 3.0]).unwrap();
    let a = sample_grid(&d, 0.2, Stencil::Sixteen).unwrap();
    let b = sample_grid(&d, 0.2, Stencil::Sixteen).unwrap();
    assert_eq!(a.len(), b.len());
    assert!(a.graph().edges().eq(b.graph().edges()));
    // row-major: y outer, x inner
    let (p, q) = (a.point(0), a.point(1));
    assert!(p[1] == q[1] && p[0] < q[0]);
    assert!(a.point(a.len() - 1)[1] > p[1]);
}
