//! JSON documents read and written by the command line and the browser demo.
//!
//! * space: `{"coords": [[x, y], …], "metric": "euclidean"}` or
//!   `{"matrix": [[…], …]}` with `null` for `∞`; optional `"labels"`.
//! * domain: `{"bbox": [x0, y0, x1, y1], "obstacles": [{"polygon": …} | {"segment": …}]}`.
//! * cover: a list of id lists, `{"kind": "balls", "r": …}` or
//!   `{"kind": "clearance", "r0": …}` (the latter only against a domain).
//! * path: `{"ids": […], "params": […], "length": …}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{clearance_cover, GridSample, PlanarDomain};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::sheaf::{Cover, CoverKind};
use crate::space::{path_length, FiniteMetricSpace, Metric, Path};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ExtReal>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl SpaceDoc {
    pub fn build(self) -> Result<FiniteMetricSpace> {
        let space = match (self.coords, self.matrix) {
            (Some(coords), None) => match self.metric.as_deref() {
                None | Some("euclidean") => FiniteMetricSpace::euclidean(coords)?,
                Some(other) => {
                    return Err(Error::InvalidSpace(format!("unknown metric {other:?}")))
                }
            },
            (None, Some(matrix)) => {
                if self.metric.is_some() {
                    return Err(Error::InvalidSpace(
                        "\"metric\" applies only to \"coords\"".into(),
                    ));
                }
                FiniteMetricSpace::from_matrix(matrix)?
            }
            _ => {
                return Err(Error::InvalidSpace(
                    "exactly one of \"coords\" or \"matrix\" is required".into(),
                ))
            }
        };
        match self.labels {
            Some(labels) => space.with_labels(labels),
            None => Ok(space),
        }
    }

    /// Coordinates when the space has them, else the dense matrix.
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        let labels: Vec<String> = space
            .points()
            .iter()
            .filter_map(|p| p.label.clone())
            .collect();
        let labels = (labels.len() == space.len() && !labels.is_empty()).then_some(labels);
        if space.is_euclidean() {
            let coords = space
                .points()
                .iter()
                .map(|p| p.coords.clone().unwrap_or_default())
                .collect();
            SpaceDoc {
                coords: Some(coords),
                metric: Some("euclidean".into()),
                matrix: None,
                labels,
            }
        } else {
            SpaceDoc {
                coords: None,
                metric: None,
                matrix: Some((0..space.len()).map(|i| space.row(i)).collect()),
                labels,
            }
        }
    }
}

pub fn read_space(json: &str) -> Result<FiniteMetricSpace> {
    serde_json::from_str::<SpaceDoc>(json)?.build()
}

pub fn read_domain(json: &str) -> Result<PlanarDomain> {
    serde_json::from_str::<PlanarDomain>(json)?.validated()
}

/// A parsed input that is either a finite space or a planar domain.
#[derive(Debug, Clone)]
pub enum Input {
    Space(FiniteMetricSpace),
    Domain(PlanarDomain),
}

/// Domains are recognized by their `"bbox"` key.
pub fn read_input(json: &str) -> Result<Input> {
    let value: Value = serde_json::from_str(json)?;
    if value.get("bbox").is_some() {
        Ok(Input::Domain(
            serde_json::from_value::<PlanarDomain>(value)?.validated()?,
        ))
    } else {
        Ok(Input::Space(
            serde_json::from_value::<SpaceDoc>(value)?.build()?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoverSpec {
    Sets(Vec<Vec<usize>>),
    Kind(CoverKind),
}

impl CoverSpec {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn resolve<M: Metric + ?Sized>(&self, space: &M) -> Result<Cover> {
        match self {
            CoverSpec::Sets(sets) => Cover::new(space.len(), sets.clone(), CoverKind::Explicit),
            CoverSpec::Kind(CoverKind::Balls { r }) => Cover::balls(space, *r),
            CoverSpec::Kind(CoverKind::Clearance { .. }) => Err(Error::InvalidCover(
                "a clearance cover needs a domain, not a finite space".into(),
            )),
            CoverSpec::Kind(CoverKind::Explicit) => Err(Error::InvalidCover(
                "an explicit cover needs its sets".into(),
            )),
        }
    }

    pub fn resolve_on_grid(&self, sample: &GridSample) -> Result<Cover> {
        match self {
            CoverSpec::Kind(CoverKind::Clearance { r0 }) => clearance_cover(sample, *r0),
            other => other.resolve(sample.chord()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDoc {
    pub ids: Vec<usize>,
    pub params: Vec<f64>,
    pub length: ExtReal,
}

impl PathDoc {
    pub fn new<M: Metric + ?Sized>(space: &M, path: &Path) -> Self {
        PathDoc {
            ids: path.samples().to_vec(),
            params: path.params().to_vec(),
            length: path_length(space, path),
        }
    }

    /// Rebuilds and revalidates the path; the stored length is recomputed.
    pub fn to_path<M: Metric + ?Sized>(&self, space: &M) -> Result<Path> {
        Path::new(space, self.ids.clone(), self.params.clone())
    }
}
