//! File formats, rendering and command-line workflows around `daest-core`.

pub mod archive;
pub mod config;
pub mod mapfmt;
pub mod raster;
pub mod render;
pub mod report;
