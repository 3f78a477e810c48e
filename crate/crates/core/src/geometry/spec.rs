//! JSON form of [`ConvexBody`].
//!
//! ```json
//! {"type": "ball", "center": [0, 0], "radius": 1}
//! {"type": "ellipsoid", "center": [0, 0], "semiaxes": [2, 1], "axes": [[1, 0], [0, 1]]}
//! {"type": "hpolytope", "halfspaces": [{"normal": [1, 0], "offset": 1}, ...]}
//! {"type": "vpolytope", "vertices": [[0, 0], [1, 0], [0, 1]]}
//! ```
//!
//! `axes` is row-major with the principal axes as columns and defaults to
//! the identity.

use serde::{Deserialize, Serialize};

use super::{ConvexBody, Halfspace};
use crate::error::{Error, Result};
use crate::matrix_group::{matrix_from_rows, rows, OrthogonalMatrix};
use crate::Vector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        semiaxes: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axes: Option<Vec<Vec<f64>>>,
    },
    Hpolytope {
        halfspaces: Vec<Halfspace>,
    },
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            Self::Ball { center, radius } => ConvexBody::ball(Vector::from_row_slice(center), *radius),
            Self::Ellipsoid {
                center,
                semiaxes,
                axes,
            } => {
                let n = center.len();
                let axes = match axes {
                    Some(r) => OrthogonalMatrix::new(matrix_from_rows(r)?)?,
                    None => OrthogonalMatrix::identity(n),
                };
                ConvexBody::ellipsoid(Vector::from_row_slice(center), axes, Vector::from_row_slice(semiaxes))
            }
            Self::Hpolytope { halfspaces } => {
                let n = halfspaces
                    .first()
                    .map(|h| h.normal.len())
                    .ok_or_else(|| Error::InvalidBody("halfspace list is empty".into()))?;
                ConvexBody::hpolytope(n, halfspaces.clone())
            }
            Self::Vpolytope { vertices } => {
                ConvexBody::vpolytope(vertices.iter().map(|v| Vector::from_row_slice(v)).collect())
            }
        }
    }

    pub fn from_json(s: &str) -> Result<ConvexBody> {
        serde_json::from_str::<BodySpec>(s)?.build()
    }
}

impl From<&ConvexBody> for BodySpec {
    fn from(body: &ConvexBody) -> Self {
        let vec = |v: &Vector| v.iter().copied().collect::<Vec<f64>>();
        match body {
            ConvexBody::Ball(b) => Self::Ball {
                center: vec(b.center()),
                radius: b.radius(),
            },
            ConvexBody::Ellipsoid(e) => Self::Ellipsoid {
                center: vec(e.center()),
                semiaxes: vec(e.semiaxes()),
                axes: Some(rows(e.axes().as_matrix())),
            },
            ConvexBody::HPolytope(h) => Self::Hpolytope {
                halfspaces: h.halfspaces().to_vec(),
            },
            ConvexBody::VPolytope(v) => Self::Vpolytope {
                vertices: v.vertices().iter().map(vec).collect(),
            },
        }
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(body: ConvexBody) -> Self {
        Self::from(&body)
    }
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;

    fn try_from(spec: BodySpec) -> Result<Self> {
        spec.build()
    }
}

impl Serialize for ConvexBody {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BodySpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexBody {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        BodySpec::deserialize(d)?.build().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let ball = BodySpec::from_json(r#"{"type": "ball", "center": [0, 0], "radius": 1}"#).unwrap();
        assert_eq!(ball.kind(), "ball");
        let e = BodySpec::from_json(r#"{"type": "ellipsoid", "center": [0, 0], "semiaxes": [2, 1]}"#).unwrap();
        assert_eq!(e.exact_volume().unwrap(), 2.0 * std::f64::consts::PI);
        let h = BodySpec::from_json(
            r#"{"type": "hpolytope", "halfspaces": [
                {"normal": [1, 0], "offset": 1}, {"normal": [-1, 0], "offset": 0},
                {"normal": [0, 1], "offset": 1}, {"normal": [0, -1], "offset": 0}]}"#,
        )
        .unwrap();
        assert_eq!(h.vertices().unwrap().len(), 4);
        let v = BodySpec::from_json(r#"{"type": "vpolytope", "vertices": [[0, 0], [1, 0], [0, 1]]}"#).unwrap();
        assert!((v.exact_volume().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        for bad in [
            r#"{"type": "ball", "center": [0], "radius": -1}"#,
            r#"{"type": "ellipsoid", "center": [0, 0], "semiaxes": [1]}"#,
            r#"{"type": "hpolytope", "halfspaces": [{"normal": [1, 0], "offset": 1}]}"#,
            r#"{"type": "vpolytope", "vertices": []}"#,
            r#"{"type": "cone"}"#,
            r#"{"type": "ball", "center": [0], "radius": 1, "extra": 2}"#,
        ] {
            assert!(BodySpec::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trip_through_json() {
        let rot = OrthogonalMatrix::rotation2(0.3);
        let e = ConvexBody::ellipsoid(Vector::from_vec(vec![1.0, 2.0]), rot, Vector::from_vec(vec![2.0, 0.5])).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: ConvexBody = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
