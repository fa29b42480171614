//! JSON documents, the `influence` command line and the acceptance suite
//! on top of `influence-core`.

pub mod acceptance;
pub mod cli;
pub mod documents;
