//! Resumable search state: the depth-d frontier, which units are done, and
//! the canonical results found in them.

use super::{EnumError, Row, SearchSpec};
use crate::arith;
use crate::configspec::ConfigSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub spec_hash: String,
    pub placement_order: Vec<usize>,
    /// Partial matrices (rows in placement order) at the frontier depth.
    pub frontier: Vec<Vec<Row>>,
    pub completed: Vec<bool>,
    /// Canonical rows of every result found in completed units.
    pub results: Vec<Vec<Row>>,
    pub leaves: u64,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self, EnumError> {
        let text = std::fs::read_to_string(path).map_err(|e| EnumError::CheckpointRead(e.to_string()))?;
        let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| EnumError::CheckpointRead(e.to_string()))?;
        if cp.completed.len() != cp.frontier.len() {
            return Err(EnumError::CheckpointRead("frontier and completion flags differ in length".into()));
        }
        Ok(cp)
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(self).expect("serializable"))?;
        std::fs::rename(&tmp, path)
    }
}

/// Hash of everything that determines the traversal and its results.
pub fn search_hash(spec: &ConfigSpec, search: &SearchSpec, placement_order: &[usize]) -> String {
    let caps: Vec<String> = search.caps.per_component.iter().map(arith::format_rational).collect();
    let doc = serde_json::json!({
        "format": 1,
        "config": spec.to_json_value(),
        "caps": caps,
        "at_most_one_negative_a": search.at_most_one_negative_a,
        "row_symmetry_breaking": search.row_symmetry_breaking,
        "column_symmetry_breaking": search.column_symmetry_breaking,
        "frontier_depth": search.frontier_depth,
        "aut_cap": search.aut_cap.to_string(),
        "placement_order": placement_order,
    });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}
