//! Schema-guided dialogue state tracking.
//!
//! The crate is `no_std` (with `alloc`) and contains every algorithmic piece of
//! the tracker: schema handling and slot routing, text preprocessing with
//! offsets, the baseline encoder, the span-extraction ("MRC") head, the
//! wide-and-deep candidate ranker, the synonym lexicon, turn-level state
//! assembly and the evaluation metrics. File IO, the sidecar encoder client and
//! the command-line tool live in the `sgdst` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod augment;
pub mod corpus;
pub mod encoder;
mod error;
pub mod features;
pub mod math;
pub mod metrics;
pub mod mrc;
pub mod numerals;
pub mod optim;
pub mod schema;
pub mod text;
pub mod tracker;
pub mod wd;

pub use error::{Error, Result};

/// Reserved candidate meaning "the user has no preference".
pub const DONTCARE: &str = "dontcare";
/// Reserved candidate meaning "not specified yet"; never stored in a state.
pub const UNKNOWN: &str = "unknown";
/// Intent name used when no intent is active.
pub const NO_INTENT: &str = "NONE";
