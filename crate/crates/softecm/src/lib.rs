//! File formats, threaded sweeps and the command-line front end for
//! evidential c-means clustering.
//!
//! The clustering itself lives in [`softecm_core`], re-exported as [`core`].

pub use softecm_core as core;

pub mod cli;
pub mod error;
pub mod io;
pub mod manifest;
pub mod output;
pub mod sweep;

pub use error::{Error, Result};
