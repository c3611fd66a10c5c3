//! File formats, seeded generators and the command-line front end for
//! `menger-core`.

pub mod cli;
pub mod formats;
pub mod gen;
