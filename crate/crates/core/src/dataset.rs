//! Dataset manifests and their join with cached features.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::evaluation::Sample;
use crate::features::FeatureCache;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("manifest line {line}: empty content_id")]
    EmptyContentId { line: u64 },
    #[error("manifest line {line}: dmos is not finite")]
    NonFiniteDmos { line: u64 },
    #[error("manifest has no rows")]
    Empty,
    #[error("features missing for {} pair(s): {}", .0.len(), list_pairs(.0))]
    MissingFeatures(Vec<(String, String)>),
    #[error("cached features for ({reference}, {dist}) have fingerprint {found}, expected {expected}")]
    Fingerprint { reference: String, dist: String, found: String, expected: String },
}

fn list_pairs(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(r, d)| format!("({r}, {d})")).collect::<Vec<_>>().join(", ")
}

/// One row of a manifest with header `content_id,ref,dist,fps,tag,dmos`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ManifestRow {
    pub content_id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub dist: String,
    pub fps: String,
    pub tag: String,
    pub dmos: f64,
}

pub fn parse_manifest<R: std::io::Read>(input: R) -> Result<Vec<ManifestRow>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut rows = Vec::new();
    for result in reader.deserialize::<ManifestRow>() {
        let row = result.map_err(|e| DatasetError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rows.len() as u64 + 2;
        if row.content_id.is_empty() {
            return Err(DatasetError::EmptyContentId { line });
        }
        if !row.dmos.is_finite() {
            return Err(DatasetError::NonFiniteDmos { line });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(rows)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRow>, DatasetError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
    parse_manifest(std::io::BufReader::new(file))
}

/// Attaches cached features to every manifest row. All absent pairs are
/// reported together.
pub fn join_features(rows: &[ManifestRow], cache: &FeatureCache, fingerprint: &str) -> Result<Vec<Sample>, DatasetError> {
    let mut missing = Vec::new();
    let mut samples = Vec::with_capacity(rows.len());
    for row in rows {
        match cache.get(&row.reference, &row.dist) {
            None => missing.push((row.reference.clone(), row.dist.clone())),
            Some(rec) if rec.fingerprint != fingerprint => {
                return Err(DatasetError::Fingerprint {
                    reference: row.reference.clone(),
                    dist: row.dist.clone(),
                    found: rec.fingerprint.clone(),
                    expected: fingerprint.to_string(),
                })
            }
            Some(rec) => samples.push(Sample { content_id: row.content_id.clone(), features: rec.features.clone(), dmos: row.dmos }),
        }
    }
    if !missing.is_empty() {
        return Err(DatasetError::MissingFeatures(missing));
    }
    Ok(samples)
}
