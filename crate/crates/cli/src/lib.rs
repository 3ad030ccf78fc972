//! Command-line front end for `horoshade-core`: the family document format,
//! geodesic JSON, SVG rendering and the subcommands.

pub mod args;
mod commands;
pub mod doc;
pub mod geojson;
pub mod svg;

pub use commands::run;
