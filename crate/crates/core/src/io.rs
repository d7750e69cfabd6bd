//! Text and JSON formats.
//!
//! A rectangulation serializes to a compact JSON array with one record per
//! point in x order:
//!
//! ```text
//! [{"owner":1,"orientation":"H","low":"wall:left","high":"seg:2"}, ...]
//! ```
//!
//! That exact string is the canonical key. Point sets are read either as
//! whitespace-separated one-based ranks, as `{"perm":[...]}`, or as
//! `{"points":[[x,y],...]}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::RectangulationSet;
use crate::model::{realize, ConfigError, Orientation, PointConfig, RealizeError, Rectangulation, SegmentSpec};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("bad record: {0}")]
    Record(String),
    #[error("not a rectangulation: {0}")]
    Realize(#[from] RealizeError),
}

#[derive(Serialize, Deserialize)]
struct SegmentRecord {
    owner: usize,
    orientation: Orientation,
    low: String,
    high: String,
}

pub fn serialize_rectangulation(rect: &Rectangulation) -> String {
    let records: Vec<SegmentRecord> = rect
        .segments()
        .iter()
        .map(|s| SegmentRecord {
            owner: s.owner + 1,
            orientation: s.orientation,
            low: s.low.to_string(),
            high: s.high.to_string(),
        })
        .collect();
    serde_json::to_string(&records).expect("records serialize")
}

/// Parses the serialized form and re-validates it against `config`.
pub fn parse_rectangulation(config: &Arc<PointConfig>, text: &str) -> Result<Rectangulation, FormatError> {
    let records: Vec<SegmentRecord> = serde_json::from_str(text)?;
    let mut specs = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if r.owner != i + 1 {
            return Err(FormatError::Record(format!("record {} has owner {}, expected {}", i + 1, r.owner, i + 1)));
        }
        let low = r.low.parse().map_err(FormatError::Record)?;
        let high = r.high.parse().map_err(FormatError::Record)?;
        specs.push(SegmentSpec::new(r.orientation, low, high));
    }
    Ok(realize(config, &specs)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointSetJson {
    Perm { perm: Vec<usize> },
    Points { points: Vec<[f64; 2]> },
}

/// Reads a point set from any of the accepted text forms.
pub fn parse_point_set(text: &str) -> Result<PointConfig, FormatError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        return match serde_json::from_str::<PointSetJson>(trimmed)? {
            PointSetJson::Perm { perm } => Ok(PointConfig::from_perm(&perm)?),
            PointSetJson::Points { points } => {
                let pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
                Ok(PointConfig::from_points(&pts)?)
            }
        };
    }
    let perm = parse_perm(trimmed)?;
    Ok(PointConfig::from_perm(&perm)?)
}

/// Parses whitespace- or comma-separated one-based ranks.
pub fn parse_perm(text: &str) -> Result<Vec<usize>, FormatError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| FormatError::Config(ConfigError::MalformedPermutation(format!("`{t}` is not a rank"))))
        })
        .collect()
}

pub fn format_perm(perm: &[usize]) -> String {
    perm.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

/// One canonical key per line in key order, then a summary line
/// `{"summary":{"perm":[...],"count":N}}`. Members failing `keep` are left out.
pub fn dump_jsonl(rset: &RectangulationSet, keep: impl Fn(&Rectangulation) -> bool) -> String {
    let mut out = String::new();
    let mut count = 0usize;
    for (rect, key) in rset.members().iter().zip(rset.keys()) {
        if keep(rect) {
            out.push_str(key.as_str());
            out.push('\n');
            count += 1;
        }
    }
    let summary = serde_json::json!({ "summary": { "perm": rset.config().perm(), "count": count } });
    out.push_str(&summary.to_string());
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn serialized_form() {
        let r = fixtures::diagonal_t();
        assert_eq!(
            serialize_rectangulation(&r),
            r#"[{"owner":1,"orientation":"H","low":"wall:left","high":"wall:right"},{"owner":2,"orientation":"V","low":"seg:1","high":"wall:top"}]"#
        );
    }

    #[test]
    fn parse_round_trip() {
        let r = fixtures::pinwheel();
        let back = parse_rectangulation(r.shared_config(), &serialize_rectangulation(&r)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn parse_rejects_invalid() {
        let config = Arc::new(fixtures::diagonal(2));
        let crossing = r#"[{"owner":1,"orientation":"H","low":"wall:left","high":"wall:right"},{"owner":2,"orientation":"V","low":"wall:bottom","high":"wall:top"}]"#;
        assert!(matches!(parse_rectangulation(&config, crossing), Err(FormatError::Realize(_))));
        assert!(matches!(parse_rectangulation(&config, "[{"), Err(FormatError::Json(_))));
    }

    #[test]
    fn jsonl_dump() {
        let set = crate::enumerate_backtracking(&fixtures::diagonal(2)).unwrap();
        let all = dump_jsonl(&set, |_| true);
        assert_eq!(all.lines().count(), 7);
        assert!(all.ends_with("{\"summary\":{\"count\":6,\"perm\":[1,2]}}\n"), "{all}");
        let none = dump_jsonl(&set, |_| false);
        assert_eq!(none.lines().count(), 1);
    }

    #[test]
    fn point_set_forms() {
        assert_eq!(parse_point_set("2 4 1 3").unwrap().perm(), &[2, 4, 1, 3]);
        assert_eq!(parse_point_set("2,4,1,3\n").unwrap().perm(), &[2, 4, 1, 3]);
        assert_eq!(parse_point_set(r#"{"perm":[1,2]}"#).unwrap().perm(), &[1, 2]);
        assert_eq!(parse_point_set(r#"{"points":[[0.5,3],[2,-1]]}"#).unwrap().perm(), &[2, 1]);
        assert!(parse_point_set(r#"{"points":[[0,3],[2,3]]}"#).is_err());
        assert!(parse_point_set("1 1").is_err());
        assert!(parse_point_set("a b").is_err());
    }
}
