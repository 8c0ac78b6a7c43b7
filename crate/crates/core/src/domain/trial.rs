//! Finite surrogates for the gradient-bounded class: fields on a grid sample
//! whose difference across every stencil edge is at most the edge length.
//!
//! The edge-wise bound is equivalent to being 1-Lipschitz for the stencil
//! length metric, so the best lower bound a family can give for a pair is
//! `max f(y) − f(x)`, and every graph path from `x` to `y` bounds it above.
//! The distance profile `ρ_ℓ(x, ·)` attains the path infimum, closing the
//! bracket.

use serde::Serialize;

use super::geom::Point;
use super::grid::{euclidean_length_metric, GridSample};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::sheaf::ScalarField;

/// Relative slack on the edge-wise gradient bound.
pub const GRADIENT_EPS: f64 = 1e-9;

/// How a trial field was built. `sign` is `+1` or `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrialKind {
    /// `sign · ρ_ℓ(anchor, ·)`.
    DistanceProfile { anchor: usize, sign: f64 },
    /// `sign · z[axis]`.
    Projection { axis: usize, sign: f64 },
    /// `sign · (radius − |z − center|)₊`.
    Cone {
        center: Point,
        radius: f64,
        sign: f64,
    },
    /// `(radius − |z − center|)₊` on the open half-plane `{z : side · z₀ > 0}`,
    /// zero elsewhere. Only admissible when a wall on `z₀ = 0` separates the
    /// two halves wherever the cone is positive.
    HalfplaneCone {
        center: Point,
        radius: f64,
        side: f64,
    },
}

impl TrialKind {
    fn name(&self) -> &'static str {
        match self {
            TrialKind::DistanceProfile { .. } => "distance_profile",
            TrialKind::Projection { .. } => "projection",
            TrialKind::Cone { .. } => "cone",
            TrialKind::HalfplaneCone { .. } => "halfplane_cone",
        }
    }

    fn evaluate(&self, sample: &GridSample) -> Result<ScalarField> {
        let n = sample.len();
        let values: Vec<f64> = match *self {
            TrialKind::DistanceProfile { anchor, sign } => {
                let dist = euclidean_length_metric(sample, anchor)?.dist;
                // Unreachable components get a constant above every finite
                // value; no stencil edge joins components, so the bound holds.
                let far = dist.iter().filter_map(|d| d.finite()).fold(0.0, f64::max) + 1.0;
                dist.into_iter()
                    .map(|d| sign * d.finite().unwrap_or(far))
                    .collect()
            }
            TrialKind::Projection { axis, sign } => {
                if axis > 1 {
                    return Err(Error::InvalidArgument(format!(
                        "projection axis {axis} out of range"
                    )));
                }
                (0..n).map(|i| sign * sample.point(i)[axis]).collect()
            }
            TrialKind::Cone {
                center,
                radius,
                sign,
            } => (0..n)
                .map(|i| sign * cone(sample.point(i), center, radius))
                .collect(),
            TrialKind::HalfplaneCone {
                center,
                radius,
                side,
            } => {
                if side == 0.0 {
                    return Err(Error::InvalidArgument(
                        "half-plane side must be nonzero".into(),
                    ));
                }
                (0..n)
                    .map(|i| {
                        let p = sample.point(i);
                        if side * p[0] > 0.0 {
                            cone(p, center, radius)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        ScalarField::new(values)
    }
}

fn cone(p: Point, c: Point, r: f64) -> f64 {
    (r - (p[0] - c[0]).hypot(p[1] - c[1])).max(0.0)
}

#[derive(Debug, Clone)]
pub struct TrialFunction {
    pub kind: TrialKind,
    pub field: ScalarField,
}

/// Trial fields on one grid sample, each validated edge-wise on insertion.
#[derive(Debug, Clone, Default)]
pub struct TrialFamily {
    members: Vec<TrialFunction>,
}

impl TrialFamily {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds `kind` on `sample` and adds it, rejecting it if some stencil
    /// edge `(u, v)` has `|f(u) − f(v)| > |u − v| · (1 + 10⁻⁹)`.
    pub fn push(&mut self, sample: &GridSample, kind: TrialKind) -> Result<()> {
        let field = kind.evaluate(sample)?;
        check_gradient(sample, &field, kind.name())?;
        self.members.push(TrialFunction { kind, field });
        Ok(())
    }

    pub fn members(&self) -> &[TrialFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `max f(y) − f(x)` over members (and `0`, for the zero field), with
    /// the first member attaining it.
    pub fn lower_bound(&self, x: usize, y: usize) -> (f64, Option<TrialKind>) {
        let mut best = (0.0, None);
        for m in &self.members {
            let v = m.field[y] - m.field[x];
            if best.1.is_none() && v >= best.0 || v > best.0 {
                best = (v, Some(m.kind));
            }
        }
        best
    }
}

fn check_gradient(sample: &GridSample, field: &ScalarField, kind: &str) -> Result<()> {
    for (u, v, w) in sample.graph().edges() {
        if (field[u] - field[v]).abs() > w * (1.0 + GRADIENT_EPS) {
            return Err(Error::GradientBound {
                kind: kind.to_string(),
                u,
                v,
            });
        }
    }
    Ok(())
}

/// Radius of the clipped cones placed at each anchor.
pub const CONE_RADIUS: f64 = 1.0;

/// `±ρ_ℓ(p, ·)` and `±(1 − |· − p|)₊` for every anchor `p`, then `±` both
/// coordinate projections.
pub fn build_trial_family(sample: &GridSample, anchors: &[usize]) -> Result<TrialFamily> {
    let mut family = TrialFamily::new();
    for &p in anchors {
        if p >= sample.len() {
            return Err(Error::UnknownPoint(p));
        }
        let center = sample.point(p);
        for sign in [1.0, -1.0] {
            family.push(sample, TrialKind::DistanceProfile { anchor: p, sign })?;
        }
        for sign in [1.0, -1.0] {
            family.push(
                sample,
                TrialKind::Cone {
                    center,
                    radius: CONE_RADIUS,
                    sign,
                },
            )?;
        }
    }
    for axis in 0..2 {
        for sign in [1.0, -1.0] {
            family.push(sample, TrialKind::Projection { axis, sign })?;
        }
    }
    Ok(family)
}

/// One bracketed pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DGammaRow {
    pub x: usize,
    pub y: usize,
    /// Straight-line distance, blind to obstacles.
    pub chord: f64,
    /// Best trial-family lower bound for the intrinsic distance.
    pub lower: f64,
    /// Stencil path infimum `ρ_ℓ^grid(x, y)`.
    pub upper: f64,
    /// Euclidean length of the computed shortest path.
    pub path_length: f64,
    pub attained_by: TrialKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DGammaReport {
    pub rows: Vec<DGammaRow>,
    pub tol: f64,
    /// Largest `upper / lower` over pairs with `lower > 0`.
    pub max_ratio: f64,
    /// Pairs whose lower bound is attained by `+ρ_ℓ(x, ·)`.
    pub attained_by_profile: usize,
    /// Number of `f(y) − f(x) ≤ L(γ)` spot checks performed.
    pub path_checks: usize,
}

/// Brackets the intrinsic distance of each pair between the trial-family
/// supremum (family anchored at `x`) and the stencil path infimum, requiring
/// `lower ≤ upper ≤ lower · (1 + tol)`. Also checks the upper-bound
/// mechanism: every member satisfies `f(y) − f(x) ≤ L(γ) · (1 + 10⁻⁹)` on
/// the computed path `γ`.
pub fn verify_dgamma_equals_rho_ell(
    sample: &GridSample,
    pairs: &[(usize, usize)],
    tol: f64,
) -> Result<DGammaReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol = {tol} must be nonnegative"
        )));
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&k| pairs[k].0);
    let mut rows: Vec<Option<DGammaRow>> = vec![None; pairs.len()];
    let mut path_checks = 0;
    let mut k = 0;
    while k < order.len() {
        let x = pairs[order[k]].0;
        let family = build_trial_family(sample, &[x])?;
        let sp = euclidean_length_metric(sample, x)?;
        while k < order.len() && pairs[order[k]].0 == x {
            let y = pairs[order[k]].1;
            if y >= sample.len() {
                return Err(Error::UnknownPoint(y));
            }
            let upper = match sp.dist[y] {
                ExtReal::Finite(u) => u,
                ExtReal::Infinite => return Err(Error::Unreachable(y)),
            };
            let route = sp.route(y).expect("finite distance has a route");
            let path_length: f64 = route
                .windows(2)
                .map(|w| {
                    let (p, q) = (sample.point(w[0]), sample.point(w[1]));
                    (p[0] - q[0]).hypot(p[1] - q[1])
                })
                .sum();
            for m in family.members() {
                path_checks += 1;
                let rise = m.field[y] - m.field[x];
                if rise > path_length * (1.0 + GRADIENT_EPS) {
                    return Err(Error::BracketMismatch {
                        x,
                        y,
                        lower: rise,
                        upper: path_length,
                    });
                }
            }
            let (lower, attained) = family.lower_bound(x, y);
            if lower > upper * (1.0 + GRADIENT_EPS)
                || upper > lower * (1.0 + tol) + GRADIENT_EPS * upper
            {
                return Err(Error::BracketMismatch { x, y, lower, upper });
            }
            let (p, q) = (sample.point(x), sample.point(y));
            rows[order[k]] = Some(DGammaRow {
                x,
                y,
                chord: (p[0] - q[0]).hypot(p[1] - q[1]),
                lower,
                upper,
                path_length,
                attained_by: attained.expect("family is nonempty"),
            });
            k += 1;
        }
    }
    let rows: Vec<DGammaRow> = rows
        .into_iter()
        .map(|r| r.expect("every pair visited"))
        .collect();
    let max_ratio = rows
        .iter()
        .filter(|r| r.lower > 0.0)
        .map(|r| r.upper / r.lower)
        .fold(1.0, f64::max);
    let attained_by_profile = rows
        .iter()
        .filter(|r| {
            r.attained_by
                == TrialKind::DistanceProfile {
                    anchor: r.x,
                    sign: 1.0,
                }
        })
        .count();
    Ok(DGammaReport {
        rows,
        tol,
        max_ratio,
        attained_by_profile,
        path_checks,
    })
}
