pub mod annotations;
pub mod bench;
pub mod binding_types;
pub mod bta;
pub mod engine;
pub mod fixtures;
pub mod lix;
pub mod logen;
pub mod term;
