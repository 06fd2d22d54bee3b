use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tuple::NonNegTuple;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedCurve {
    /// `t ↦ (t, …, t)`.
    Diagonal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ray {
    /// `t ↦ base + t · direction`.
    Affine { base: NonNegTuple, direction: Vec<f64> },
    Curve(NamedCurve),
}

impl Ray {
    fn at(&self, arity: usize, t: f64) -> Vec<f64> {
        match self {
            Ray::Affine { base, direction } => base
                .values()
                .iter()
                .zip(direction)
                .map(|(b, d)| (b + t * d).max(0.0) + 0.0)
                .collect(),
            Ray::Curve(NamedCurve::Diagonal) => vec![t; arity],
        }
    }
}

/// A sampled stand-in for an image `Im d_Δ(x, ·)`: finitely many isolated
/// points plus curves sampled at `t = 2^{-j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredImage {
    arity: usize,
    isolated: Vec<NonNegTuple>,
    rays: Vec<Ray>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RayFile {
    Affine { base: Vec<f64>, direction: Vec<f64> },
    Curve { curve: NamedCurve },
}

/// JSON form `{"isolated": [[...]], "rays": [{"base": [...], "direction": [...]} | {"curve": "diagonal"}]}`.
/// `arity` is only needed when nothing else fixes it.
#[derive(Serialize, Deserialize)]
struct ImageFile {
    #[serde(default)]
    isolated: Vec<Vec<f64>>,
    #[serde(default)]
    rays: Vec<RayFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arity: Option<usize>,
}

impl StructuredImage {
    pub fn new(arity: usize, isolated: Vec<NonNegTuple>, rays: Vec<Ray>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidTuple("arity must be at least 1".into()));
        }
        if isolated.is_empty() && rays.is_empty() {
            return Err(Error::Empty("an image needs at least one point or curve".into()));
        }
        let mismatch = |n: usize| Error::Dimension { expected: arity.to_string(), found: n };
        if let Some(a) = isolated.iter().find(|a| a.arity() != arity) {
            return Err(mismatch(a.arity()));
        }
        for ray in &rays {
            if let Ray::Affine { base, direction } = ray {
                if base.arity() != arity {
                    return Err(mismatch(base.arity()));
                }
                if direction.len() != arity {
                    return Err(mismatch(direction.len()));
                }
                if direction.iter().any(|d| !d.is_finite()) {
                    return Err(Error::InvalidParams("ray directions must be finite".into()));
                }
                // t ∈ (0, 1] and both endpoints nonnegative keep the whole segment in the cone
                let end: Vec<f64> = base.values().iter().zip(direction).map(|(b, d)| b + d).collect();
                if end.iter().any(|&v| v < 0.0) {
                    return Err(Error::InvalidParams("ray leaves the cone [0, ∞)^n".into()));
                }
            }
        }
        Ok(Self { arity, isolated, rays })
    }

    /// `{0_n} ∪ {(t, …, t)}`.
    pub fn diagonal(arity: usize) -> Self {
        Self::new(arity, vec![NonNegTuple::zeros(arity)], vec![Ray::Curve(NamedCurve::Diagonal)])
            .expect("diagonal image is well formed")
    }

    /// `{0_n}` together with, for each `i`, the ray that is `t` at `i` and `base` elsewhere.
    pub fn axis_rays(arity: usize, base: f64) -> Self {
        let rays = (0..arity)
            .map(|i| {
                let mut b = vec![base; arity];
                b[i] = 0.0;
                let mut d = vec![0.0; arity];
                d[i] = 1.0;
                Ray::Affine { base: NonNegTuple::from_raw(b), direction: d }
            })
            .collect();
        Self::new(arity, vec![NonNegTuple::zeros(arity)], rays).expect("axis-ray image is well formed")
    }

    /// `{0_n} ∪ {base + t · e_k}`, with `k` 1-based.
    pub fn single_ray(base: Vec<f64>, k: usize) -> Result<Self> {
        let arity = base.len();
        if !(1..=arity).contains(&k) {
            return Err(Error::InvalidParams(format!("coordinate {k} outside 1..={arity}")));
        }
        let mut direction = vec![0.0; arity];
        direction[k - 1] = 1.0;
        let ray = Ray::Affine { base: NonNegTuple::new(base)?, direction };
        Self::new(arity, vec![NonNegTuple::zeros(arity)], vec![ray])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn isolated(&self) -> &[NonNegTuple] {
        &self.isolated
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    /// Isolated points, then each curve at `t = 2^{-j}`, `j = 0..=ray_levels`.
    pub fn samples(&self, ray_levels: u32) -> Vec<NonNegTuple> {
        let mut out = self.isolated.clone();
        for ray in &self.rays {
            for j in 0..=ray_levels {
                let t = 0.5f64.powi(j as i32);
                out.push(NonNegTuple::from_raw(ray.at(self.arity, t)));
            }
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ImageFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("image file: {e}")))?;
        let arity = file
            .arity
            .or_else(|| file.isolated.first().map(Vec::len))
            .or_else(|| {
                file.rays.iter().find_map(|r| match r {
                    RayFile::Affine { base, .. } => Some(base.len()),
                    RayFile::Curve { .. } => None,
                })
            })
            .ok_or_else(|| Error::InvalidParams("image file does not determine its arity".into()))?;
        let isolated = file.isolated.into_iter().map(NonNegTuple::new).collect::<Result<_>>()?;
        let rays = file
            .rays
            .into_iter()
            .map(|r| match r {
                RayFile::Affine { base, direction } => Ok(Ray::Affine { base: NonNegTuple::new(base)?, direction }),
                RayFile::Curve { curve } => Ok(Ray::Curve(curve)),
            })
            .collect::<Result<_>>()?;
        Self::new(arity, isolated, rays)
    }

    pub fn to_json(&self) -> String {
        let file = ImageFile {
            isolated: self.isolated.iter().map(|a| a.values().to_vec()).collect(),
            rays: self
                .rays
                .iter()
                .map(|r| match r {
                    Ray::Affine { base, direction } => {
                        RayFile::Affine { base: base.values().to_vec(), direction: direction.clone() }
                    }
                    Ray::Curve(c) => RayFile::Curve { curve: *c },
                })
                .collect(),
            arity: Some(self.arity),
        };
        serde_json::to_string(&file).expect("image serialises")
    }
}

impl Serialize for StructuredImage {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: serde_json::Value = serde_json::from_str(&self.to_json()).map_err(serde::ser::Error::custom)?;
        v.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{"isolated": [[0, 0]], "rays": [{"base": [1, 0], "direction": [0, 1]}, {"curve": "diagonal"}]}"#;
        let img = StructuredImage::from_json(text).unwrap();
        assert_eq!(img.arity(), 2);
        assert_eq!(img.rays().len(), 2);
        assert_eq!(StructuredImage::from_json(&img.to_json()).unwrap(), img);
        assert_eq!(StructuredImage::from_json(r#"{"rays":[{"curve":"diagonal"}],"arity":3}"#).unwrap().arity(), 3);
    }

    #[test]
    fn bad_images() {
        assert!(StructuredImage::from_json(r#"{"rays":[{"curve":"diagonal"}]}"#).is_err());
        assert!(StructuredImage::from_json(r#"{"isolated":[[0,0],[1]]}"#).is_err());
        assert!(StructuredImage::from_json(r#"{"rays":[{"base":[0],"direction":[-1]}]}"#).is_err());
        assert!(StructuredImage::from_json(r#"{"isolated":[]}"#).is_err());
    }

    #[test]
    fn samples_follow_geometric_grid() {
        let img = StructuredImage::single_ray(vec![1.0, 0.0], 2).unwrap();
        let s = img.samples(3);
        assert_eq!(s.len(), 5);
        assert_eq!(s[0].values(), &[0.0, 0.0]);
        assert_eq!(s[1].values(), &[1.0, 1.0]);
        assert_eq!(s[4].values(), &[1.0, 0.125]);
        let axes = StructuredImage::axis_rays(2, 1.0).samples(1);
        assert_eq!(axes[1].values(), &[1.0, 1.0]);
        assert_eq!(axes[2].values(), &[0.5, 1.0]);
        assert_eq!(axes[4].values(), &[1.0, 0.5]);
    }
}
