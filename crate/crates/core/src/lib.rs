//! Hierarchical ensembles of abstractive summarizers.

pub mod cli;
pub mod combine;
pub mod decode;
pub mod fields;
pub mod harness;
pub mod hesm;
pub mod mbr;
pub mod model;
pub mod oracle;
pub mod rouge;
pub mod text;
pub mod zoo;
