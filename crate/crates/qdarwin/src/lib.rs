//! File formats, run manifests and the `qdarwin` command-line driver built
//! on [`qdarwin_core`].

pub mod angle;
pub mod cli;
pub mod formats;
pub mod manifest;

pub use qdarwin_core as core;
