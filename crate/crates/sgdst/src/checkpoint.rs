//! Checkpoint container shared by every head, and the model-bundle manifest.
//!
//! A checkpoint is a JSON document
//!
//! ```text
//! { format_version, kind, dim, h, seed, train, encoder, mrc | wd, loss }
//! ```
//!
//! where `kind` is the section tag (`mrc`, `wd`, `intent`, `reqslot`) and `h`
//! the hidden width. Floats are written in shortest round-trip form, so a
//! reload is bit-exact.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgdst_core::encoder::EncoderConfig;
use sgdst_core::mrc::{self, MrcParams};
use sgdst_core::optim::TrainConfig;
use sgdst_core::tracker::ModelBundle;
use sgdst_core::wd::WdParams;

use crate::{io, Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HeadKind {
    Mrc,
    Wd,
    Intent,
    Reqslot,
}

impl HeadKind {
    pub fn name(self) -> &'static str {
        match self {
            HeadKind::Mrc => "mrc",
            HeadKind::Wd => "wd",
            HeadKind::Intent => "intent",
            HeadKind::Reqslot => "reqslot",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub kind: HeadKind,
    pub dim: usize,
    pub h: usize,
    pub seed: u64,
    pub train: TrainConfig,
    pub encoder: EncoderConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mrc: Option<MrcParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wd: Option<WdParams>,
    /// Mean training loss per epoch.
    #[serde(default)]
    pub loss: Vec<f64>,
}

fn bad(path: &Path, msg: String) -> Error {
    Error::Model { path: path.into(), source: sgdst_core::Error::Compatibility(msg) }
}

impl Checkpoint {
    pub fn mrc(params: MrcParams, train: TrainConfig, encoder: EncoderConfig, loss: Vec<f64>) -> Self {
        Checkpoint {
            format_version: FORMAT_VERSION,
            kind: HeadKind::Mrc,
            dim: params.dim,
            h: params.hidden,
            seed: train.seed,
            train,
            encoder,
            mrc: Some(params),
            wd: None,
            loss,
        }
    }

    pub fn wd(kind: HeadKind, params: WdParams, train: TrainConfig, encoder: EncoderConfig, loss: Vec<f64>) -> Self {
        Checkpoint {
            format_version: FORMAT_VERSION,
            kind,
            dim: params.dim,
            h: params.deep,
            seed: train.seed,
            train,
            encoder,
            mrc: None,
            wd: Some(params),
            loss,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let ck: Checkpoint = io::read_json(path)?;
        ck.check(path)?;
        Ok(ck)
    }

    fn check(&self, path: &Path) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(bad(path, format!("checkpoint format {} is not {FORMAT_VERSION}", self.format_version)));
        }
        if self.dim != self.encoder.dim {
            return Err(bad(path, format!("checkpoint dim {} differs from its encoder dim {}", self.dim, self.encoder.dim)));
        }
        let (dim, h) = match (self.kind, &self.mrc, &self.wd) {
            (HeadKind::Mrc, Some(p), None) => {
                p.validate().map_err(|source| Error::Model { path: path.into(), source })?;
                (p.dim, p.hidden)
            }
            (HeadKind::Wd | HeadKind::Intent | HeadKind::Reqslot, None, Some(p)) => {
                p.validate().map_err(|source| Error::Model { path: path.into(), source })?;
                (p.dim, p.deep)
            }
            _ => return Err(bad(path, format!("`{}` checkpoint holds the wrong parameter section", self.kind.name()))),
        };
        if (dim, h) != (self.dim, self.h) {
            return Err(bad(path, format!("header says dim {} h {} but parameters have {dim} and {h}", self.dim, self.h)));
        }
        Ok(())
    }

    fn expect(self, path: &Path, kind: HeadKind) -> Result<Self> {
        if self.kind != kind {
            return Err(bad(path, format!("expected a `{}` checkpoint, found `{}`", kind.name(), self.kind.name())));
        }
        Ok(self)
    }
}

/// Paths of the four head checkpoints and the lexicon, relative to the
/// manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub mrc: PathBuf,
    pub wd: PathBuf,
    pub intent: PathBuf,
    pub reqslot: PathBuf,
    pub lexicon: PathBuf,
    #[serde(default = "default_max_span_len")]
    pub max_span_len: usize,
    #[serde(default = "default_span_threshold")]
    pub span_threshold: f64,
}

fn default_max_span_len() -> usize {
    mrc::DEFAULT_MAX_SPAN_LEN
}

fn default_span_threshold() -> f64 {
    mrc::DEFAULT_THRESHOLD
}

pub fn load_bundle(manifest_path: &Path) -> Result<ModelBundle> {
    let m: Manifest = io::read_json(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let load = |p: &Path, kind| {
        let full = base.join(p);
        Checkpoint::load(&full)?.expect(&full, kind)
    };
    let mrc = load(&m.mrc, HeadKind::Mrc)?;
    let wd = load(&m.wd, HeadKind::Wd)?;
    let intent = load(&m.intent, HeadKind::Intent)?;
    let reqslot = load(&m.reqslot, HeadKind::Reqslot)?;
    for ck in [&wd, &intent, &reqslot] {
        if ck.encoder != mrc.encoder {
            return Err(bad(manifest_path, format!("`{}` head was trained with a different encoder", ck.kind.name())));
        }
    }
    let bundle = ModelBundle {
        encoder: mrc.encoder.clone(),
        mrc: mrc.mrc.expect("checked"),
        wd: wd.wd.expect("checked"),
        intent: intent.wd.expect("checked"),
        reqslot: reqslot.wd.expect("checked"),
        lexicon: io::load_lexicon(&base.join(&m.lexicon))?,
        max_span_len: m.max_span_len,
        span_threshold: m.span_threshold,
    };
    bundle.validate().map_err(|source| Error::Model { path: manifest_path.into(), source })?;
    Ok(bundle)
}
