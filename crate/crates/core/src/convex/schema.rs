//! JSON interchange for set descriptions.

use serde::{Deserialize, Serialize};

use super::cone::ConeRep;
use super::set::ConvexSetDescription;
use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SetJson {
    Polyhedron {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        rays: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    PolyhedralCone {
        generators: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Soc { dim: usize },
    Rsoc { dim: usize },
    Translate { base: Box<SetJson>, offset: Vec<f64> },
}

fn vectors(raw: Vec<Vec<f64>>) -> Result<Vec<Vector>> {
    raw.into_iter().map(Vector::new).collect()
}

fn infer_dim(explicit: Option<usize>, lists: &[&Vec<Vec<f64>>]) -> Result<usize> {
    explicit
        .or_else(|| lists.iter().find_map(|l| l.first().map(Vec::len)))
        .ok_or_else(|| Error::InvalidInput("cannot infer dimension: give \"dim\"".into()))
}

impl TryFrom<SetJson> for ConvexSetDescription {
    type Error = Error;

    fn try_from(j: SetJson) -> Result<Self> {
        match j {
            SetJson::Polyhedron { points, rays, dim } => {
                let d = infer_dim(dim, &[&points, &rays])?;
                ConvexSetDescription::polyhedron_in(d, vectors(points)?, vectors(rays)?)
            }
            SetJson::PolyhedralCone { generators, dim } => {
                let d = infer_dim(dim, &[&generators])?;
                Ok(ConvexSetDescription::cone(ConeRep::finitely_generated(d, vectors(generators)?)?))
            }
            SetJson::Soc { dim } => ConvexSetDescription::soc(dim),
            SetJson::Rsoc { dim } => ConvexSetDescription::rsoc(dim),
            SetJson::Translate { base, offset } => {
                ConvexSetDescription::translate((*base).try_into()?, Vector::new(offset)?)
            }
        }
    }
}

impl From<&ConvexSetDescription> for SetJson {
    fn from(x: &ConvexSetDescription) -> Self {
        let raw = |vs: &[Vector]| vs.iter().map(|v| v.as_slice().to_vec()).collect::<Vec<_>>();
        match x {
            ConvexSetDescription::Polyhedron { dim, points, rays } => SetJson::Polyhedron {
                points: raw(points),
                rays: raw(rays),
                dim: Some(*dim),
            },
            ConvexSetDescription::PolyhedralCone { rep } => SetJson::PolyhedralCone {
                generators: raw(rep.generators()),
                dim: Some(rep.ambient_dim()),
            },
            ConvexSetDescription::SecondOrderCone { dim } => SetJson::Soc { dim: *dim },
            ConvexSetDescription::RotatedSecondOrderCone { dim } => SetJson::Rsoc { dim: *dim },
            ConvexSetDescription::Translate { base, offset } => SetJson::Translate {
                base: Box::new(SetJson::from(&**base)),
                offset: offset.as_slice().to_vec(),
            },
        }
    }
}

impl Serialize for ConvexSetDescription {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexSetDescription {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SetJson::deserialize(d)?;
        ConvexSetDescription::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Parses a set description from JSON text.
pub fn parse_set(text: &str) -> Result<ConvexSetDescription> {
    let j: SetJson = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
    j.try_into()
}

pub fn set_to_json(x: &ConvexSetDescription) -> String {
    serde_json::to_string(x).expect("set descriptions serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_all_kinds() {
        let p = parse_set(r#"{"type":"polyhedron","points":[[0,0]],"rays":[[1,0],[1,1]]}"#).unwrap();
        assert_eq!(p.ambient_dim(), 2);
        let c = parse_set(r#"{"type":"polyhedral_cone","generators":[[1,0,0]]}"#).unwrap();
        assert_eq!(c.ambient_dim(), 3);
        let s = parse_set(r#"{"type":"translate","base":{"type":"soc","dim":3},"offset":[5,5,5]}"#).unwrap();
        assert!(s.contains(&[5.0, 5.0, 6.0], 1e-9));
        let r = parse_set(r#"{"type":"rsoc","dim":3}"#).unwrap();
        assert!(r.contains(&[1.0, 1.0, 1.0], 1e-9));
        let z = parse_set(r#"{"type":"polyhedral_cone","generators":[],"dim":2}"#).unwrap();
        assert_eq!(z.ambient_dim(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_set(r#"{"type":"soc","dim":1}"#).is_err());
        assert!(parse_set(r#"{"type":"polyhedral_cone","generators":[]}"#).is_err());
        assert!(parse_set(r#"{"type":"polyhedron","points":[[0,0]],"rays":[[0,0]]}"#).is_err());
        assert!(parse_set(r#"{"type":"polyhedron","points":[[0,0]],"rays":[[1,0,0]]}"#).is_err());
        assert!(parse_set(r#"{"type":"cube"}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let text = r#"{"type":"translate","base":{"type":"polyhedron","points":[[0.0,1.0]],"rays":[[1.0,0.0]]},"offset":[2.0,3.0]}"#;
        let x = parse_set(text).unwrap();
        let back = parse_set(&set_to_json(&x)).unwrap();
        assert_eq!(x, back);
    }
}
