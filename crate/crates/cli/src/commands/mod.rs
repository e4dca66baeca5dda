pub mod analyze;
pub mod collapse;
pub mod merge;
pub mod pattern_study;
pub mod phase_diagram;
pub mod list_recipes;
pub mod rerun;
pub mod single_transmon;
pub mod spectrum;
pub mod walsh;
