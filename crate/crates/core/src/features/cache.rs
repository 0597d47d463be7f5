//! Line-delimited JSON feature cache, one record per (reference, distorted)
//! pair. Floats round-trip bit-exactly.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FeatureError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub fingerprint: String,
    pub content_id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub dist: String,
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureCache {
    pub records: Vec<FeatureRecord>,
}

impl FeatureCache {
    pub fn parse(text: &str) -> Result<Self, FeatureError> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str(line).map_err(|e| FeatureError::Cache { line: i + 1, message: e.to_string() })?;
            records.push(record);
        }
        Ok(FeatureCache { records })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FeatureError> {
        let path = path.as_ref();
        let io = |source| FeatureError::Io { path: path.to_path_buf(), source };
        let reader = BufReader::new(File::open(path).map_err(io)?);
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str(&line).map_err(|e| FeatureError::Cache { line: i + 1, message: e.to_string() })?;
            records.push(record);
        }
        Ok(FeatureCache { records })
    }

    pub fn to_lines(&self) -> String {
        self.records.iter().map(|r| record_line(r) + "\n").collect()
    }

    /// Appends one record to the file, creating it if needed.
    pub fn append(path: impl AsRef<Path>, record: &FeatureRecord) -> Result<(), FeatureError> {
        let path = path.as_ref();
        let io = |source| FeatureError::Io { path: path.to_path_buf(), source };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        writeln!(f, "{}", record_line(record)).map_err(io)
    }

    /// Latest record for a pair, if any.
    pub fn get(&self, reference: &str, dist: &str) -> Option<&FeatureRecord> {
        self.records.iter().rev().find(|r| r.reference == reference && r.dist == dist)
    }
}

fn record_line(record: &FeatureRecord) -> String {
    serde_json::to_string(record).expect("feature records always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(values: Vec<f64>) -> FeatureRecord {
        FeatureRecord {
            fingerprint: "abc".into(),
            content_id: "bouncyball".into(),
            reference: "ref.y4m".into(),
            dist: "dist_crf30.y4m".into(),
            features: values,
        }
    }

    #[test]
    fn append_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/features.jsonl");
        FeatureCache::append(&path, &record(vec![0.1, 1e-300, 12345.678])).unwrap();
        FeatureCache::append(&path, &record(vec![2.0])).unwrap();
        let cache = FeatureCache::load(&path).unwrap();
        assert_eq!(cache.records.len(), 2);
        assert_eq!(cache.get("ref.y4m", "dist_crf30.y4m").unwrap().features, vec![2.0]);
        assert!(cache.get("ref.y4m", "other").is_none());
    }

    #[test]
    fn corrupt_line_is_located() {
        let text = format!("{}\nnot json\n", serde_json::to_string(&record(vec![1.0])).unwrap());
        match FeatureCache::parse(&text) {
            Err(FeatureError::Cache { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn floats_round_trip_bit_exactly(values in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 16)) {
            let cache = FeatureCache { records: vec![record(values.clone())] };
            let back = FeatureCache::parse(&cache.to_lines()).unwrap();
            let bits: Vec<u64> = back.records[0].features.iter().map(|x| x.to_bits()).collect();
            prop_assert_eq!(bits, values.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        }
    }
}
