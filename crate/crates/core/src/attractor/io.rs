//! Versioned JSON documents for point clouds:
//! `{version, space, m?, offset?, points, meta}`.
//!
//! Windowed clouds store every point on the common index range
//! `offset .. offset + len`, so each point is a plain array. Values are
//! written with the shortest representation that round-trips, hence
//! reading a document back reproduces every bit.

use serde::{Deserialize, Serialize};

use super::cloud::{CloudMeta, PointCloud};
use crate::error::{Error, Result};
use crate::lattice::LatticeWindow;
use crate::scalar::Real;
use crate::state::LatticeState;
use crate::truncation::TruncatedState;

pub const CLOUD_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudSpace {
    Window,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudDocument {
    pub version: u32,
    pub space: CloudSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<i64>,
    pub points: Vec<Vec<f64>>,
    pub meta: CloudMeta,
}

/// States that can be written to and read from a [`CloudDocument`].
pub trait CloudCodec: LatticeState + Sized {
    fn encode(cloud: &PointCloud<Self>) -> CloudDocument;
    fn decode(doc: &CloudDocument) -> Result<PointCloud<Self>>;
}

fn check_version(doc: &CloudDocument) -> Result<()> {
    if doc.version != CLOUD_FORMAT_VERSION {
        return Err(Error::Serialization(format!(
            "unsupported cloud format version {}",
            doc.version
        )));
    }
    Ok(())
}

impl<T: Real> CloudCodec for LatticeWindow<T> {
    fn encode(cloud: &PointCloud<Self>) -> CloudDocument {
        let lo = cloud.points().iter().filter(|p| !p.is_empty()).map(|p| p.offset()).min();
        let hi = cloud.points().iter().filter(|p| !p.is_empty()).map(|p| p.end()).max();
        let (lo, hi) = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (0, 0),
        };
        let points = cloud
            .points()
            .iter()
            .map(|p| (lo..hi).map(|i| p.get(i).as_f64()).collect())
            .collect();
        CloudDocument {
            version: CLOUD_FORMAT_VERSION,
            space: CloudSpace::Window,
            m: None,
            offset: Some(lo),
            points,
            meta: cloud.meta.clone(),
        }
    }

    fn decode(doc: &CloudDocument) -> Result<PointCloud<Self>> {
        check_version(doc)?;
        if doc.space != CloudSpace::Window {
            return Err(Error::SpaceMismatch("expected a window cloud".into()));
        }
        let offset = doc.offset.unwrap_or(0);
        let points = doc
            .points
            .iter()
            .map(|v| LatticeWindow::new(offset, v.iter().map(|&x| T::lit(x)).collect()))
            .collect::<Result<Vec<_>>>()?;
        PointCloud::new(points, doc.meta.clone())
    }
}

impl<T: Real> CloudCodec for TruncatedState<T> {
    fn encode(cloud: &PointCloud<Self>) -> CloudDocument {
        CloudDocument {
            version: CLOUD_FORMAT_VERSION,
            space: CloudSpace::Truncated,
            m: cloud.points().first().map(|p| p.m()),
            offset: None,
            points: cloud
                .points()
                .iter()
                .map(|p| p.values().iter().map(|v| v.as_f64()).collect())
                .collect(),
            meta: cloud.meta.clone(),
        }
    }

    fn decode(doc: &CloudDocument) -> Result<PointCloud<Self>> {
        check_version(doc)?;
        if doc.space != CloudSpace::Truncated {
            return Err(Error::SpaceMismatch("expected a truncated cloud".into()));
        }
        let m = doc
            .m
            .ok_or_else(|| Error::Serialization("truncated cloud without m".into()))?;
        let points = doc
            .points
            .iter()
            .map(|v| TruncatedState::new(m, v.iter().map(|&x| T::lit(x)).collect()))
            .collect::<Result<Vec<_>>>()?;
        PointCloud::new(points, doc.meta.clone())
    }
}

pub fn cloud_to_json<S: CloudCodec>(cloud: &PointCloud<S>) -> Result<String> {
    serde_json::to_string_pretty(&S::encode(cloud)).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn cloud_from_json<S: CloudCodec>(text: &str) -> Result<PointCloud<S>> {
    let doc: CloudDocument = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    S::decode(&doc)
}
