//! IO, service and command-line layer over `walkrag-core`.

pub mod artifacts;
pub mod config;
pub mod corpus;
pub mod data;
pub mod engine;
pub mod eval;
pub mod index_file;
pub mod llm;
pub mod osm;
pub mod payload;
pub mod prompt;
pub mod service;
pub mod session;
