//! File formats, the sidecar encoder client and the command-line front end
//! for [`sgdst_core`].

pub mod checkpoint;
pub mod cli;
pub mod io;
pub mod repl;
pub mod sidecar;
pub mod synth;

use std::path::PathBuf;

pub use sgdst_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Model {
        path: PathBuf,
        #[source]
        source: sgdst_core::Error,
    },
    #[error(transparent)]
    Core(#[from] sgdst_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
