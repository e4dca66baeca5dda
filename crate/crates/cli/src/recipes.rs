//! Bundled recipes: sweep configs at desk-scale ensemble sizes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub name: String,
    /// Subcommand the recipe is written for.
    pub command: String,
    pub description: String,
    pub runtime: String,
    pub config: Value,
}

const SOURCES: [&str; 10] = [
    include_str!("../recipes/chain10-kl-vs-t.json"),
    include_str!("../recipes/chain8-kl-vs-t.json"),
    include_str!("../recipes/chain10-phase.json"),
    include_str!("../recipes/chain8-phase.json"),
    include_str!("../recipes/surface7-phase.json"),
    include_str!("../recipes/chain7-phase.json"),
    include_str!("../recipes/collapse-grid.json"),
    include_str!("../recipes/pattern-3x3.json"),
    include_str!("../recipes/walsh-a.json"),
    include_str!("../recipes/walsh-b.json"),
];

pub fn all() -> Vec<Recipe> {
    SOURCES.iter().map(|s| serde_json::from_str(s).expect("bundled recipe is valid JSON")).collect()
}

pub fn find(name: &str) -> Result<Recipe> {
    let recipes = all();
    let names: Vec<String> = recipes.iter().map(|r| r.name.clone()).collect();
    recipes
        .into_iter()
        .find(|r| r.name == name)
        .ok_or_else(|| CliError::Config(format!("unknown recipe `{name}`; available: {}", names.join(", "))))
}
