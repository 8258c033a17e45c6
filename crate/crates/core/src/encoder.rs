//! Text encoders: `[CLS] context [SEP] pair [SEP]` to a summary vector plus
//! one row per context token.
//!
//! The built-in [`BaselineEncoder`] is non-contextual and parameter-free. Each
//! token vector is
//!
//! ```text
//! unit( hash_embedding(token) + 0.1 * position(pos) + 0.25 * segment(seg) )
//! ```
//!
//! * `hash_embedding`: seed a SplitMix64 stream with
//!   `fnv1a64(lowercase(token)) ^ mix64(config.seed)` and draw `dim` values,
//!   each `2 * (next_u64 >> 11) * 2^-53 - 1`.
//! * `position`: sinusoidal, `sin(pos / 10000^(2k/dim))` at index `2k` and the
//!   matching `cos` at `2k + 1`.
//! * `segment`: the same draw with stream seed `mix64(config.seed ^ (SEGMENT_SALT + seg))`.
//!
//! Packed positions follow the `[CLS] S [SEP] D [SEP]` layout: context token
//! `i` sits at `i + 1`, pair token `j` at `n + 2 + j`. The summary vector is
//! the mean of all context and pair token vectors. `mix64` is the SplitMix64
//! output function applied to its argument. This description is the contract
//! external encoders reproduce for parity checks.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::bail;
use crate::math;
use crate::Result;

pub const DEFAULT_DIM: usize = 64;
pub const MIN_DIM: usize = 8;
pub const SEGMENT_SALT: u64 = 0x5345_474D_454E_5400;
const POSITION_SCALE: f64 = 0.1;
const SEGMENT_SCALE: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    Baseline,
    /// Address of an external encoder speaking the line protocol, either
    /// `tcp:host:port` or `cmd:<program and args>`.
    Sidecar(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub dim: usize,
    pub seed: u64,
    pub backend: Backend,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig { dim: DEFAULT_DIM, seed: 0, backend: Backend::Baseline }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < MIN_DIM {
            bail!(Validation, "encoder dim {} below minimum {MIN_DIM}", self.dim);
        }
        Ok(())
    }
}

/// Summary vector and per-context-token representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderOutput {
    pub cls: Vec<f64>,
    /// Row-major `n x dim`.
    pub token_reps: Vec<f64>,
    pub dim: usize,
}

impl EncoderOutput {
    pub fn len(&self) -> usize {
        self.token_reps.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.token_reps.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.token_reps[i * self.dim..(i + 1) * self.dim]
    }

    pub fn validate(&self, expected_rows: usize) -> Result<()> {
        if self.cls.len() != self.dim || self.token_reps.len() != expected_rows * self.dim {
            bail!(
                Encoder,
                "encoder returned {} values for {expected_rows} rows of dim {}",
                self.token_reps.len(),
                self.dim
            );
        }
        if !self.cls.iter().chain(&self.token_reps).all(|v| v.is_finite()) {
            bail!(Encoder, "encoder returned non-finite values");
        }
        Ok(())
    }
}

pub trait Encoder {
    fn dim(&self) -> usize;

    /// Encodes a context and its paired question/candidate text. Returns one
    /// row per context token.
    fn encode(&self, context: &[String], pair: &[String]) -> Result<EncoderOutput>;
}

impl<E: Encoder + ?Sized> Encoder for &E {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn encode(&self, context: &[String], pair: &[String]) -> Result<EncoderOutput> {
        (**self).encode(context, pair)
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        SplitMix64(state)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(self.0)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        let unit = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * unit - 1.0
    }
}

fn draw(state: u64, dim: usize) -> Vec<f64> {
    let mut rng = SplitMix64::new(state);
    (0..dim).map(|_| rng.next_symmetric()).collect()
}

pub fn hash_embedding(token: &str, seed: u64, dim: usize) -> Vec<f64> {
    draw(fnv1a64(token.to_lowercase().as_bytes()) ^ mix64(seed), dim)
}

pub fn sinusoidal_position(position: usize, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|i| {
            let k = (i / 2) as f64;
            let angle = position as f64 / libm::pow(10000.0, 2.0 * k / dim as f64);
            if i % 2 == 0 {
                libm::sin(angle)
            } else {
                libm::cos(angle)
            }
        })
        .collect()
}

pub fn segment_vector(segment: u8, seed: u64, dim: usize) -> Vec<f64> {
    draw(mix64(seed ^ SEGMENT_SALT.wrapping_add(u64::from(segment))), dim)
}

/// Unit-norm vector of one token at a packed position and segment.
pub fn baseline_token_vector(token: &str, position: usize, segment: u8, config: &EncoderConfig) -> Vec<f64> {
    let dim = config.dim;
    let mut v = hash_embedding(token, config.seed, dim);
    let pos = sinusoidal_position(position, dim);
    let seg = segment_vector(segment, config.seed, dim);
    for i in 0..dim {
        v[i] += POSITION_SCALE * pos[i] + SEGMENT_SCALE * seg[i];
    }
    let n = math::norm(&v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineEncoder {
    config: EncoderConfig,
}

impl BaselineEncoder {
    pub fn new(config: EncoderConfig) -> Result<Self> {
        config.validate()?;
        Ok(BaselineEncoder { config })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }
}

impl Encoder for BaselineEncoder {
    fn dim(&self) -> usize {
        self.config.dim
    }

    fn encode(&self, context: &[String], pair: &[String]) -> Result<EncoderOutput> {
        if context.is_empty() {
            bail!(Usage, "encode requires at least one context token");
        }
        let dim = self.config.dim;
        let n = context.len();
        let mut token_reps = Vec::with_capacity(n * dim);
        let mut sum = alloc::vec![0.0; dim];
        for (i, tok) in context.iter().enumerate() {
            let v = baseline_token_vector(tok, i + 1, 0, &self.config);
            sum.iter_mut().zip(&v).for_each(|(s, x)| *s += x);
            token_reps.extend_from_slice(&v);
        }
        for (j, tok) in pair.iter().enumerate() {
            let v = baseline_token_vector(tok, n + 2 + j, 1, &self.config);
            sum.iter_mut().zip(&v).for_each(|(s, x)| *s += x);
        }
        let count = (n + pair.len()) as f64;
        let cls = sum.into_iter().map(|s| s / count).collect();
        Ok(EncoderOutput { cls, token_reps, dim })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(ToString::to_string).collect()
    }

    fn encoder() -> BaselineEncoder {
        BaselineEncoder::new(EncoderConfig::default()).unwrap()
    }

    #[test]
    fn known_hash_values() {
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        // first SplitMix64 output for state 0
        assert_eq!(SplitMix64::new(0).next_u64(), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn encode_is_deterministic() {
        let e = encoder();
        let a = e.encode(&toks("find me a table"), &toks("city")).unwrap();
        let b = e.encode(&toks("find me a table"), &toks("city")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shape_contract() {
        let out = encoder().encode(&toks("a b c d e"), &toks("x y")).unwrap();
        assert_eq!(out.len(), 5);
        assert_eq!(out.token_reps.len(), 5 * 64);
        assert_eq!(out.cls.len(), 64);
        out.validate(5).unwrap();
    }

    #[test]
    fn pair_order_changes_cls() {
        let e = encoder();
        let a = e.encode(&toks("hello there"), &toks("city of the venue")).unwrap();
        let b = e.encode(&toks("hello there"), &toks("venue the of city")).unwrap();
        assert_ne!(a.cls, b.cls);
        assert_eq!(a.token_reps, b.token_reps);
    }

    #[test]
    fn cls_is_mean_of_token_vectors() {
        let cfg = EncoderConfig::default();
        let e = BaselineEncoder::new(cfg.clone()).unwrap();
        let ctx = toks("one two three");
        let pair = toks("four five");
        let out = e.encode(&ctx, &pair).unwrap();
        let mut all: Vec<Vec<f64>> = ctx
            .iter()
            .enumerate()
            .map(|(i, t)| baseline_token_vector(t, i + 1, 0, &cfg))
            .collect();
        all.extend(pair.iter().enumerate().map(|(j, t)| baseline_token_vector(t, 5 + j, 1, &cfg)));
        for k in 0..cfg.dim {
            let mean = all.iter().map(|v| v[k]).sum::<f64>() / all.len() as f64;
            assert!((mean - out.cls[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn token_vectors_are_unit_norm() {
        let cfg = EncoderConfig { dim: 64, seed: 7, backend: Backend::Baseline };
        for (i, t) in ["city", "time", "Broadway", "!"].iter().enumerate() {
            let v = baseline_token_vector(t, i, (i % 2) as u8, &cfg);
            assert!((math::norm(&v) - 1.0).abs() < 1e-9);
            assert_eq!(v, baseline_token_vector(t, i, (i % 2) as u8, &cfg));
        }
    }

    #[test]
    fn empty_context_rejected() {
        assert!(encoder().encode(&[], &toks("x")).is_err());
        assert!(BaselineEncoder::new(EncoderConfig { dim: 4, ..Default::default() }).is_err());
    }

    #[test]
    fn seed_changes_vectors() {
        let a = baseline_token_vector("city", 1, 0, &EncoderConfig { seed: 1, ..Default::default() });
        let b = baseline_token_vector("city", 1, 0, &EncoderConfig { seed: 2, ..Default::default() });
        assert_ne!(a, b);
    }
}
