//! Group-definition files: JSON descriptions of a solvable Lie algebra
//! (structure constants as decimal strings, declared nilradical, optional
//! complement hint) and the bundled example groups.

use crate::algebra::{LieAlgebra, Subspace};
use crate::error::{Error, Result};
use crate::realization::Realization;
use serde::{Deserialize, Serialize};

/// Seed used when a definition carries none.
pub const DEFAULT_SEED: u64 = 7;

/// A group definition as stored on disk. Structure-constant values are
/// decimal strings so files round-trip without silent precision loss.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDefinition {
    pub name: String,
    pub dim: usize,
    /// Entries [i, j, k, value] with 0-based indices and i < j; the j > i
    /// half follows by antisymmetry.
    pub structure_constants: Vec<(usize, usize, usize, String)>,
    /// Basis of the nilradical as coefficient vectors.
    pub nilradical: Vec<Vec<f64>>,
    /// Optional basis of the complement 𝔠 (must lie in the generalized
    /// 0-eigenspace of the general-position element).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl GroupDefinition {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("group definition does not parse: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_algebra(&self) -> Result<LieAlgebra> {
        let mut entries = Vec::with_capacity(self.structure_constants.len());
        for (i, j, k, value) in &self.structure_constants {
            let v: f64 = value.trim().parse().map_err(|_| {
                Error::Input(format!(
                    "structure constant ({i},{j},{k}) has non-decimal value '{value}'"
                ))
            })?;
            entries.push((*i, *j, *k, v));
        }
        LieAlgebra::from_entries(self.dim, &entries, None)
    }

    pub fn nilradical_subspace(&self) -> Result<Subspace> {
        Subspace::new(self.dim, self.nilradical.clone())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Builds the realization, honoring the complement hint when present.
    /// `seed_override` takes precedence over the file's seed.
    pub fn realize(&self, seed_override: Option<u64>) -> Result<Realization> {
        let algebra = self.to_algebra()?;
        let nilradical = self.nilradical_subspace()?;
        let seed = seed_override.unwrap_or_else(|| self.seed());
        match &self.complement {
            Some(basis) => {
                let hint = Subspace::new(self.dim, basis.clone())?;
                Realization::with_complement_hint(algebra, nilradical, seed, hint)
            }
            None => Realization::new(algebra, nilradical, seed),
        }
    }
}

/// Names of the bundled group definitions.
pub const BUNDLED: [&str; 5] = ["heisenberg", "axb", "m2", "r1", "axb_x_heis"];

/// Returns the JSON text of a bundled group definition.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "heisenberg" => Some(include_str!("../groups/heisenberg.json")),
        "axb" => Some(include_str!("../groups/axb.json")),
        "m2" => Some(include_str!("../groups/m2.json")),
        "r1" => Some(include_str!("../groups/r1.json")),
        "axb_x_heis" => Some(include_str!("../groups/axb_x_heis.json")),
        _ => None,
    }
}

/// Loads a group definition from a bundled name or a file path.
pub fn load(name_or_path: &str) -> Result<GroupDefinition> {
    if let Some(text) = bundled(name_or_path) {
        return GroupDefinition::from_json(text);
    }
    let path = std::path::Path::new(name_or_path);
    if path.exists() {
        GroupDefinition::from_path(path)
    } else {
        Err(Error::Input(format!(
            "'{name_or_path}' is neither a bundled group ({}) nor a readable file",
            BUNDLED.join(", ")
        )))
    }
}
