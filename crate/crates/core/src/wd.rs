//! Wide-and-deep candidate scorer.
//!
//! ```text
//! h = tanh(W_dnn . cls + b_dnn)
//! p = sigmoid( w_lr . (h ++ wide) + b_lr )
//! ```
//!
//! trained with binary cross-entropy. The same shape with the wide input held
//! at zero ("deep-only") serves the intent and requested-slot classifiers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::augment::SynonymLexicon;
use crate::corpus::{self, ClassifierExample, Dialogue, HistoryMode, Turn, WdExample};
use crate::encoder::Encoder;
use crate::error::bail;
use crate::features::{self, FeatureInput, WideFeatureVector, LAYOUT_VERSION, NUM_FEATURES};
use crate::math::{self, dot};
use crate::optim::{self, streams, Adam, TrainConfig};
use crate::schema::{candidate_values, classify_slot, Schema, SlotDef};
use crate::text;
use crate::{Error, Result};

pub const DEFAULT_DEEP: usize = 64;
pub const DEFAULT_NEGATIVES: usize = 3;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
const INIT_SCALE: f64 = 0.1;

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdParams {
    pub dim: usize,
    pub deep: usize,
    pub layout_version: u32,
    /// `false` for deep-only heads; their wide input is always zero.
    #[serde(default = "default_true")]
    pub use_wide: bool,
    /// Row-major `deep x dim`.
    pub w_dnn: Vec<f64>,
    pub b_dnn: Vec<f64>,
    /// `deep + NUM_FEATURES`.
    pub w_lr: Vec<f64>,
    pub b_lr: f64,
}

impl WdParams {
    pub fn zeros(dim: usize, deep: usize) -> Self {
        WdParams {
            dim,
            deep,
            layout_version: LAYOUT_VERSION,
            use_wide: true,
            w_dnn: vec![0.0; deep * dim],
            b_dnn: vec![0.0; deep],
            w_lr: vec![0.0; deep + NUM_FEATURES],
            b_lr: 0.0,
        }
    }

    pub fn init(dim: usize, deep: usize, config: &TrainConfig) -> Self {
        let mut p = WdParams::zeros(dim, deep);
        let flat = optim::init_uniform(p.num_params(), INIT_SCALE, &mut config.stream(streams::INIT));
        p.unflatten(&flat);
        p
    }

    pub fn num_params(&self) -> usize {
        self.deep * self.dim + self.deep + self.deep + NUM_FEATURES + 1
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        out.extend_from_slice(&self.w_dnn);
        out.extend_from_slice(&self.b_dnn);
        out.extend_from_slice(&self.w_lr);
        out.push(self.b_lr);
        out
    }

    pub fn unflatten(&mut self, flat: &[f64]) {
        let (a, rest) = flat.split_at(self.deep * self.dim);
        let (b, rest) = rest.split_at(self.deep);
        let (c, rest) = rest.split_at(self.deep + NUM_FEATURES);
        self.w_dnn.copy_from_slice(a);
        self.b_dnn.copy_from_slice(b);
        self.w_lr.copy_from_slice(c);
        self.b_lr = rest[0];
    }

    pub fn validate(&self) -> Result<()> {
        if self.layout_version != LAYOUT_VERSION {
            bail!(
                Compatibility,
                "parameters use feature layout {} but this build extracts layout {LAYOUT_VERSION}",
                self.layout_version
            );
        }
        if self.w_dnn.len() != self.deep * self.dim
            || self.b_dnn.len() != self.deep
            || self.w_lr.len() != self.deep + NUM_FEATURES
        {
            bail!(Validation, "ranker parameter shapes inconsistent with dim {} and deep {}", self.dim, self.deep);
        }
        if !self.flatten().iter().all(|v| v.is_finite()) {
            bail!(Validation, "ranker parameters contain non-finite values");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WdForward {
    pub p: f64,
    pub logit: f64,
    /// `h ++ wide`, the logistic-regression input.
    pub input: Vec<f64>,
}

pub fn forward(cls: &[f64], wide: &WideFeatureVector, params: &WdParams) -> Result<WdForward> {
    if cls.len() != params.dim {
        bail!(Compatibility, "summary vector has dim {} but ranker expects {}", cls.len(), params.dim);
    }
    if wide.layout_version != params.layout_version {
        bail!(
            Compatibility,
            "feature layout {} does not match ranker layout {}",
            wide.layout_version,
            params.layout_version
        );
    }
    wide.validate()?;
    let mut input: Vec<f64> = math::affine(&params.w_dnn, &params.b_dnn, cls).into_iter().map(math::tanh).collect();
    if params.use_wide {
        input.extend(wide.as_f64());
    } else {
        input.extend(core::iter::repeat_n(0.0, NUM_FEATURES));
    }
    let logit = dot(&params.w_lr, &input) + params.b_lr;
    Ok(WdForward { p: math::sigmoid(logit), logit, input })
}

pub fn loss(fwd: &WdForward, label: bool) -> f64 {
    math::bce_with_logit(fwd.logit, label)
}

/// Cross-entropy and its gradient with respect to every parameter.
pub fn loss_and_gradients(fwd: &WdForward, label: bool, cls: &[f64], params: &WdParams) -> (f64, WdParams) {
    let mut g = WdParams::zeros(params.dim, params.deep);
    g.layout_version = params.layout_version;
    g.use_wide = params.use_wide;
    let dlogit = fwd.p - f64::from(u8::from(label));
    for (gw, x) in g.w_lr.iter_mut().zip(&fwd.input) {
        *gw = dlogit * x;
    }
    g.b_lr = dlogit;
    for j in 0..params.deep {
        let h = fwd.input[j];
        let dh = dlogit * params.w_lr[j] * (1.0 - h * h);
        g.b_dnn[j] = dh;
        let row = &mut g.w_dnn[j * params.dim..(j + 1) * params.dim];
        for (gw, c) in row.iter_mut().zip(cls) {
            *gw = dh * c;
        }
    }
    (loss(fwd, label), g)
}

/// One scored candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub candidate: String,
    pub probability: f64,
}

/// Stable descending sort; equal probabilities keep candidate-list order.
pub fn sort_scores(scores: &mut [CandidateScore]) {
    scores.sort_by(|a, b| b.probability.total_cmp(&a.probability));
}

/// Everything needed to rank the candidates of one categorical slot.
#[derive(Debug, Clone, Copy)]
pub struct RankInput<'a> {
    pub turns: &'a [Turn],
    /// First turn of the visible history.
    pub from: usize,
    pub turn_idx: usize,
    pub service: &'a str,
    pub slot: &'a SlotDef,
    pub lexicon: &'a SynonymLexicon,
    pub requested_slots: &'a BTreeSet<String>,
}

pub fn rank_candidates(input: &RankInput<'_>, encoder: &dyn Encoder, params: &WdParams) -> Result<Vec<CandidateScore>> {
    if classify_slot(input.slot).is_extractive() {
        bail!(Usage, "slot `{}` is extractive and cannot be ranked", input.slot.name);
    }
    let candidates = candidate_values(input.slot)?;
    let history = corpus::history_between(input.turns, input.from, input.turn_idx, HistoryMode::Wd)?;
    let context = text::tokens(&history.text);
    let visible = &input.turns[input.from..=input.turn_idx];
    let mut scores = Vec::with_capacity(candidates.len());
    for cand in &candidates {
        let out = encoder.encode(&context, &text::tokens(&corpus::pair_text(&input.slot.description, cand)))?;
        out.validate(context.len())?;
        let wide = features::extract_wide_features(&FeatureInput {
            turns: visible,
            turn_idx: input.turn_idx - input.from,
            service: input.service,
            slot: input.slot,
            candidate: cand,
            num_candidates: candidates.len(),
            lexicon: input.lexicon,
            requested_slots: input.requested_slots,
        })?;
        let fwd = forward(&out.cls, &wide, params)?;
        scores.push(CandidateScore { candidate: cand.clone(), probability: fwd.p });
    }
    sort_scores(&mut scores);
    Ok(scores)
}

/// Deep-only probability that `description` holds in the classifier-mode
/// history ending at `turn_idx`.
pub fn classify(
    turns: &[Turn],
    from: usize,
    turn_idx: usize,
    description: &str,
    encoder: &dyn Encoder,
    params: &WdParams,
) -> Result<f64> {
    let history = corpus::history_between(turns, from, turn_idx, HistoryMode::Classifier)?;
    let context = text::tokens(&history.text);
    let out = encoder.encode(&context, &text::tokens(description))?;
    out.validate(context.len())?;
    Ok(forward(&out.cls, &WideFeatureVector::zeros(), params)?.p)
}

/// One featurized training example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdItem {
    /// Groups the candidates of one decision; classifier items are singletons.
    pub instance: usize,
    pub cls: Vec<f64>,
    pub wide: WideFeatureVector,
    pub label: bool,
}

/// Encodes ranking examples and extracts their wide features. Requested
/// slots come from the gold annotation of the turn.
pub fn featurize(
    examples: &[WdExample],
    dialogues: &[Dialogue],
    schema: &Schema,
    lexicon: &SynonymLexicon,
    encoder: &dyn Encoder,
) -> Result<Vec<WdItem>> {
    let by_id: BTreeMap<&str, &Dialogue> = dialogues.iter().map(|d| (d.dialogue_id.as_str(), d)).collect();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for ex in examples {
        *counts.entry(ex.instance).or_default() += 1;
    }
    let mut out = Vec::with_capacity(examples.len());
    for ex in examples {
        let Some(dialogue) = by_id.get(ex.dialogue_id.as_str()) else {
            bail!(Data, "example refers to unknown dialogue `{}`", ex.dialogue_id);
        };
        let Some(slot) = schema.service(&ex.service).and_then(|s| s.slot(&ex.slot)) else {
            bail!(Data, "example refers to unknown slot `{}` of `{}`", ex.slot, ex.service);
        };
        let requested: BTreeSet<String> = dialogue.turns[ex.turn_index]
            .frame(&ex.service)
            .and_then(|f| f.state.as_ref())
            .map(|s| s.requested_slots.iter().cloned().collect())
            .unwrap_or_default();
        let wide = features::extract_wide_features(&FeatureInput {
            turns: &dialogue.turns[..=ex.turn_index],
            turn_idx: ex.turn_index,
            service: &ex.service,
            slot,
            candidate: &ex.candidate,
            num_candidates: counts[&ex.instance],
            lexicon,
            requested_slots: &requested,
        })?;
        let reps = encoder.encode(&ex.context.tokens, &text::tokens(&ex.pair_text))?;
        reps.validate(ex.context.len())?;
        out.push(WdItem { instance: ex.instance, cls: reps.cls, wide, label: ex.label });
    }
    Ok(out)
}

/// Encodes classifier examples with an all-zero wide input.
pub fn featurize_classifier(examples: &[ClassifierExample], encoder: &dyn Encoder) -> Result<Vec<WdItem>> {
    examples
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            let reps = encoder.encode(&ex.context.tokens, &text::tokens(&ex.pair_text))?;
            reps.validate(ex.context.len())?;
            Ok(WdItem { instance: i, cls: reps.cls, wide: WideFeatureVector::zeros(), label: ex.label })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdTrainOptions {
    pub deep: usize,
    pub use_wide: bool,
    /// Negatives sampled per instance and epoch; `None` keeps every item.
    pub negatives: Option<usize>,
}

impl Default for WdTrainOptions {
    fn default() -> Self {
        WdTrainOptions { deep: DEFAULT_DEEP, use_wide: true, negatives: Some(DEFAULT_NEGATIVES) }
    }
}

impl WdTrainOptions {
    /// Settings of the intent and requested-slot classifiers.
    pub fn deep_only() -> Self {
        WdTrainOptions { deep: DEFAULT_DEEP, use_wide: false, negatives: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epoch_loss: Vec<f64>,
}

/// Items used in one epoch: all positives of each instance plus up to
/// `negatives` sampled negatives.
fn epoch_items(groups: &BTreeMap<usize, Vec<usize>>, items: &[WdItem], negatives: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<usize> {
    let mut out = Vec::new();
    for members in groups.values() {
        let mut neg: Vec<usize> = Vec::new();
        for &m in members {
            if items[m].label {
                out.push(m);
            } else {
                neg.push(m);
            }
        }
        neg.shuffle(rng);
        neg.truncate(negatives);
        neg.sort_unstable();
        out.extend(neg);
    }
    out
}

/// Mini-batch Adam with candidate-level negative sampling. Deterministic
/// given the seed.
pub fn train(
    items: &[WdItem],
    dim: usize,
    options: &WdTrainOptions,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<(WdParams, TrainLog)> {
    if items.is_empty() {
        bail!(Usage, "ranker training needs at least one example");
    }
    let mut params = WdParams::init(dim, options.deep, config);
    params.use_wide = options.use_wide;
    let mut flat = params.flatten();
    let mut adam = Adam::new(flat.len(), config);
    let mut shuffle = config.stream(streams::SHUFFLE);
    let mut sampling = config.stream(streams::SAMPLING);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, item) in items.iter().enumerate() {
        groups.entry(item.instance).or_default().push(i);
    }
    let batch = config.batch_size.max(1);
    let mut log = TrainLog::default();

    for epoch in 0..config.epochs {
        let selected = match options.negatives {
            Some(k) => epoch_items(&groups, items, k, &mut sampling),
            None => (0..items.len()).collect(),
        };
        let order = optim::epoch_order(selected.len(), &mut shuffle);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            let mut grad = vec![0.0; flat.len()];
            for &o in chunk {
                let idx = selected[o];
                let item = &items[idx];
                let fwd = forward(&item.cls, &item.wide, &params)?;
                let (l, g) = loss_and_gradients(&fwd, item.label, &item.cls, &params);
                if !l.is_finite() {
                    return Err(Error::Training(alloc::format!(
                        "non-finite loss at epoch {epoch}, example {idx} (logit {})",
                        fwd.logit
                    )));
                }
                epoch_loss += l;
                grad.iter_mut().zip(&g.flatten()).for_each(|(a, b)| *a += b);
            }
            let scale = 1.0 / chunk.len() as f64;
            grad.iter_mut().for_each(|v| *v *= scale);
            adam.update(&mut flat, &grad);
            params.unflatten(&flat);
        }
        let mean = epoch_loss / selected.len().max(1) as f64;
        log.epoch_loss.push(mean);
        on_epoch(epoch, mean);
    }
    Ok((params, log))
}

/// Fraction of instances whose highest-scoring item is a positive. Ties go
/// to the earlier item.
pub fn candidate_accuracy(items: &[WdItem], params: &WdParams) -> Result<f64> {
    let mut best: BTreeMap<usize, (f64, bool)> = BTreeMap::new();
    for item in items {
        let p = forward(&item.cls, &item.wide, params)?.p;
        let entry = best.entry(item.instance).or_insert((f64::NEG_INFINITY, false));
        if p > entry.0 {
            *entry = (p, item.label);
        }
    }
    let correct = best.values().filter(|(_, l)| *l).count();
    Ok(correct as f64 / best.len().max(1) as f64)
}

/// Fraction of items classified correctly at `threshold`.
pub fn binary_accuracy(items: &[WdItem], params: &WdParams, threshold: f64) -> Result<f64> {
    let mut correct = 0usize;
    for item in items {
        let p = forward(&item.cls, &item.wide, params)?.p;
        correct += usize::from((p >= threshold) == item.label);
    }
    Ok(correct as f64 / items.len().max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{BaselineEncoder, EncoderConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(d: usize, deep: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, WideFeatureVector, WdParams) {
        let cls: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut wide = WideFeatureVector::zeros();
        wide.values.iter_mut().for_each(|v| *v = u8::from(rng.gen_bool(0.3)));
        let mut p = WdParams::zeros(d, deep);
        let flat: Vec<f64> = (0..p.num_params()).map(|_| rng.gen_range(-0.5..0.5)).collect();
        p.unflatten(&flat);
        (cls, wide, p)
    }

    #[test]
    fn zero_params_give_half() {
        let p = WdParams::zeros(8, 4);
        let fwd = forward(&[0.3; 8], &WideFeatureVector::zeros(), &p).unwrap();
        assert_eq!(fwd.p, 0.5);
        assert!((loss(&fwd, true) - core::f64::consts::LN_2).abs() < 1e-12);
        assert!((loss(&fwd, false) - core::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn matches_straight_line_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (cls, wide, p) = random_instance(8, 5, &mut rng);
        let mut z = p.b_lr;
        for j in 0..5 {
            let mut a = p.b_dnn[j];
            for k in 0..8 {
                a += p.w_dnn[j * 8 + k] * cls[k];
            }
            z += p.w_lr[j] * libm::tanh(a);
        }
        for k in 0..NUM_FEATURES {
            z += p.w_lr[5 + k] * f64::from(wide.values[k]);
        }
        let expect = 1.0 / (1.0 + libm::exp(-z));
        assert!((forward(&cls, &wide, &p).unwrap().p - expect).abs() < 1e-12);
    }

    #[test]
    fn deep_only_ignores_wide_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (cls, wide, mut p) = random_instance(8, 4, &mut rng);
        p.use_wide = false;
        let a = forward(&cls, &wide, &p).unwrap().p;
        let b = forward(&cls, &WideFeatureVector::zeros(), &p).unwrap().p;
        assert_eq!(a, b);
    }

    #[test]
    fn layout_mismatch_is_compatibility_error() {
        let mut p = WdParams::zeros(8, 2);
        p.layout_version = 99;
        let err = forward(&[0.0; 8], &WideFeatureVector::zeros(), &p).unwrap_err();
        assert!(matches!(err, Error::Compatibility(_)));
        assert!(matches!(p.validate(), Err(Error::Compatibility(_))));
        let err = forward(&[0.0; 4], &WideFeatureVector::zeros(), &WdParams::zeros(8, 2)).unwrap_err();
        assert!(matches!(err, Error::Compatibility(_)));
    }

    #[test]
    fn confident_positive_has_small_loss() {
        let mut p = WdParams::zeros(8, 2);
        p.b_lr = 40.0;
        let fwd = forward(&[0.0; 8], &WideFeatureVector::zeros(), &p).unwrap();
        assert!(loss(&fwd, true) < 1e-15);
        assert!(loss(&fwd, false).is_finite());
    }

    #[test]
    fn stable_sort_keeps_candidate_order() {
        let mut s = vec![
            CandidateScore { candidate: "a".into(), probability: 0.5 },
            CandidateScore { candidate: "b".into(), probability: 0.7 },
            CandidateScore { candidate: "c".into(), probability: 0.5 },
        ];
        sort_scores(&mut s);
        let names: Vec<&str> = s.iter().map(|c| c.candidate.as_str()).collect();
        assert_eq!(names, ["b", "a", "c"]);
    }

    #[test]
    fn boolean_slot_ranks_four_candidates_with_marker_params() {
        use crate::corpus::tests::turn;
        use crate::corpus::Speaker;
        let slot = SlotDef::new("free_entry", "Whether entry is free", &["True", "False"]);
        let turns = vec![turn(Speaker::User, "I want somewhere free", vec![])];
        let encoder = BaselineEncoder::new(EncoderConfig { dim: 16, ..Default::default() }).unwrap();
        let mut params = WdParams::zeros(16, 4);
        params.w_lr[4 + features::feature_index("cand_false").unwrap()] = 5.0;
        let lex = SynonymLexicon::new();
        let requested = BTreeSet::new();
        let input = RankInput {
            turns: &turns,
            from: 0,
            turn_idx: 0,
            service: "Svc",
            slot: &slot,
            lexicon: &lex,
            requested_slots: &requested,
        };
        let a = rank_candidates(&input, &encoder, &params).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a[0].candidate, "False");
        assert_eq!(a[1].candidate, "True");
        assert_eq!(a, rank_candidates(&input, &encoder, &params).unwrap());

        let span = SlotDef::new("city", "City", &[]);
        let input = RankInput { slot: &span, ..input };
        assert!(matches!(rank_candidates(&input, &encoder, &params), Err(Error::Usage(_))));
    }

    #[test]
    fn negative_sampling_keeps_positive_and_three_negatives() {
        let mk = |instance, label| WdItem { instance, cls: vec![0.0; 8], wide: WideFeatureVector::zeros(), label };
        let items: Vec<WdItem> = (0..6).map(|i| mk(0, i == 4)).chain((0..2).map(|i| mk(1, i == 0))).collect();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, it) in items.iter().enumerate() {
            groups.entry(it.instance).or_default().push(i);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sel = epoch_items(&groups, &items, 3, &mut rng);
        assert_eq!(sel.len(), 4 + 2);
        assert!(sel.contains(&4) && sel.contains(&6) && sel.contains(&7));
    }
}
