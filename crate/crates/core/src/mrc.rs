//! Span-extraction head with an answerability gate.
//!
//! Given token representations `r_1..r_n` and the summary vector `r_cls`:
//!
//! ```text
//! v_start = softmax_i( w_start . r_i + b_start )
//! v_end   = softmax_i( W_end . (r_i ++ r_k) + b_end )
//! p_ans   = sigmoid( w_ans . tanh(W_g (r_k ++ r_cls) + b_g) + b_ans )
//! ```
//!
//! where `k` is the gold start token during training and the argmax of
//! `v_start` at inference (and for unanswerable training examples). The loss
//! is binary cross-entropy on `p_ans` plus, for answerable examples, the
//! negative log-likelihood of the gold start and end tokens.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::MrcExample;
use crate::encoder::{Encoder, EncoderOutput};
use crate::error::bail;
use crate::math::{self, dot};
use crate::optim::{self, streams, Adam, TrainConfig};
use crate::text::{self, TokenizedContext};
use crate::{Error, Result};

pub const DEFAULT_HIDDEN: usize = 32;
pub const DEFAULT_MAX_SPAN_LEN: usize = 16;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
const INIT_SCALE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrcParams {
    pub dim: usize,
    pub hidden: usize,
    pub w_start: Vec<f64>,
    pub b_start: f64,
    /// `1 x 2d`: first half scores the candidate token, second half the start token.
    pub w_end: Vec<f64>,
    pub b_end: f64,
    /// Row-major `hidden x 2d`.
    pub w_g: Vec<f64>,
    pub b_g: Vec<f64>,
    pub w_ans: Vec<f64>,
    pub b_ans: f64,
}

impl MrcParams {
    pub fn zeros(dim: usize, hidden: usize) -> Self {
        MrcParams {
            dim,
            hidden,
            w_start: vec![0.0; dim],
            b_start: 0.0,
            w_end: vec![0.0; 2 * dim],
            b_end: 0.0,
            w_g: vec![0.0; hidden * 2 * dim],
            b_g: vec![0.0; hidden],
            w_ans: vec![0.0; hidden],
            b_ans: 0.0,
        }
    }

    /// Small uniform weights, zero biases.
    pub fn init(dim: usize, hidden: usize, config: &TrainConfig) -> Self {
        let mut rng = config.stream(streams::INIT);
        let mut p = Self::zeros(dim, hidden);
        p.w_start = optim::init_uniform(dim, INIT_SCALE, &mut rng);
        p.w_end = optim::init_uniform(2 * dim, INIT_SCALE, &mut rng);
        p.w_g = optim::init_uniform(hidden * 2 * dim, INIT_SCALE, &mut rng);
        p.w_ans = optim::init_uniform(hidden, INIT_SCALE, &mut rng);
        p
    }

    pub fn num_params(&self) -> usize {
        self.dim + 1 + 2 * self.dim + 1 + self.hidden * 2 * self.dim + 2 * self.hidden + 1
    }

    /// All parameters in declaration order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        out.extend_from_slice(&self.w_start);
        out.push(self.b_start);
        out.extend_from_slice(&self.w_end);
        out.push(self.b_end);
        out.extend_from_slice(&self.w_g);
        out.extend_from_slice(&self.b_g);
        out.extend_from_slice(&self.w_ans);
        out.push(self.b_ans);
        out
    }

    pub fn unflatten(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params());
        let (d, h) = (self.dim, self.hidden);
        let mut at = 0;
        let mut take = |n: usize| {
            let s = &flat[at..at + n];
            at += n;
            s
        };
        self.w_start.copy_from_slice(take(d));
        self.b_start = take(1)[0];
        self.w_end.copy_from_slice(take(2 * d));
        self.b_end = take(1)[0];
        self.w_g.copy_from_slice(take(h * 2 * d));
        self.b_g.copy_from_slice(take(h));
        self.w_ans.copy_from_slice(take(h));
        self.b_ans = take(1)[0];
    }

    pub fn validate(&self) -> Result<()> {
        let (d, h) = (self.dim, self.hidden);
        let shapes_ok = self.w_start.len() == d
            && self.w_end.len() == 2 * d
            && self.w_g.len() == h * 2 * d
            && self.b_g.len() == h
            && self.w_ans.len() == h;
        if !shapes_ok {
            bail!(Compatibility, "span head parameter shapes inconsistent with dim {d}, hidden {h}");
        }
        if !self.flatten().iter().all(|v| v.is_finite()) {
            bail!(Validation, "span head parameters contain non-finite values");
        }
        Ok(())
    }
}

/// Output of [`forward`] with the intermediates needed for backprop.
#[derive(Debug, Clone, PartialEq)]
pub struct MrcForward {
    pub v_start: Vec<f64>,
    pub v_end: Vec<f64>,
    pub p_has_answer: f64,
    pub start_logits: Vec<f64>,
    pub end_logits: Vec<f64>,
    pub answer_logit: f64,
    /// Token whose representation fed the end scorer and the gate.
    pub start_pos: usize,
    /// `r_k ++ r_cls`.
    gate_input: Vec<f64>,
    /// `tanh(W_g x + b_g)`.
    gate_hidden: Vec<f64>,
}

impl MrcForward {
    /// Forward output for logits computed elsewhere, for decoding only.
    pub fn from_logits(start_logits: Vec<f64>, end_logits: Vec<f64>, answer_logit: f64) -> Self {
        MrcForward {
            v_start: math::softmax(&start_logits),
            v_end: math::softmax(&end_logits),
            p_has_answer: math::sigmoid(answer_logit),
            start_pos: math::argmax(&start_logits),
            start_logits,
            end_logits,
            answer_logit,
            gate_input: Vec::new(),
            gate_hidden: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrcGold {
    pub has_answer: bool,
    pub start: usize,
    pub end: usize,
}

impl MrcGold {
    pub fn answer(start: usize, end: usize) -> Self {
        MrcGold { has_answer: true, start, end }
    }

    pub fn no_answer() -> Self {
        MrcGold { has_answer: false, start: 0, end: 0 }
    }

    /// Teacher-forced start token for [`forward`].
    pub fn forced_start(&self) -> Option<usize> {
        self.has_answer.then_some(self.start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpanPrediction {
    pub start: usize,
    pub end: usize,
    /// `log v_start[start] + log v_end[end]`.
    pub score: f64,
}

fn check_shapes(reps: &EncoderOutput, params: &MrcParams) -> Result<usize> {
    if reps.dim != params.dim || reps.cls.len() != params.dim {
        bail!(
            Compatibility,
            "encoder dim {} does not match span head dim {}",
            reps.dim,
            params.dim
        );
    }
    let n = reps.len();
    if n == 0 {
        bail!(Usage, "span head needs at least one context token");
    }
    Ok(n)
}

pub fn forward(reps: &EncoderOutput, params: &MrcParams, gold_start: Option<usize>) -> Result<MrcForward> {
    let n = check_shapes(reps, params)?;
    let d = params.dim;
    let start_logits: Vec<f64> = (0..n).map(|i| dot(&params.w_start, reps.row(i)) + params.b_start).collect();
    let start_pos = match gold_start {
        Some(k) if k >= n => bail!(Usage, "gold start {k} out of range for {n} tokens"),
        Some(k) => k,
        None => math::argmax(&start_logits),
    };
    let r_k = reps.row(start_pos);
    let start_term = dot(&params.w_end[d..], r_k);
    let end_logits: Vec<f64> = (0..n)
        .map(|i| dot(&params.w_end[..d], reps.row(i)) + start_term + params.b_end)
        .collect();

    let mut gate_input = Vec::with_capacity(2 * d);
    gate_input.extend_from_slice(r_k);
    gate_input.extend_from_slice(&reps.cls);
    let gate_hidden: Vec<f64> = math::affine(&params.w_g, &params.b_g, &gate_input)
        .into_iter()
        .map(math::tanh)
        .collect();
    let answer_logit = dot(&params.w_ans, &gate_hidden) + params.b_ans;

    Ok(MrcForward {
        v_start: math::softmax(&start_logits),
        v_end: math::softmax(&end_logits),
        p_has_answer: math::sigmoid(answer_logit),
        start_logits,
        end_logits,
        answer_logit,
        start_pos,
        gate_input,
        gate_hidden,
    })
}

/// Joint loss: answerability cross-entropy plus span negative log-likelihood
/// for answerable golds.
pub fn loss(fwd: &MrcForward, gold: &MrcGold) -> f64 {
    let mut total = math::bce_with_logit(fwd.answer_logit, gold.has_answer);
    if gold.has_answer {
        total -= fwd.start_logits[gold.start] - math::log_sum_exp(&fwd.start_logits);
        total -= fwd.end_logits[gold.end] - math::log_sum_exp(&fwd.end_logits);
    }
    total
}

/// Analytic gradient of [`loss`] with respect to every parameter, for a
/// forward pass run with the gold start (when answerable).
pub fn gradients(fwd: &MrcForward, gold: &MrcGold, reps: &EncoderOutput, params: &MrcParams) -> MrcParams {
    let (d, h) = (params.dim, params.hidden);
    let mut g = MrcParams::zeros(d, h);

    let dlogit = fwd.p_has_answer - if gold.has_answer { 1.0 } else { 0.0 };
    g.b_ans = dlogit;
    for r in 0..h {
        g.w_ans[r] = dlogit * fwd.gate_hidden[r];
        let da = dlogit * params.w_ans[r] * (1.0 - fwd.gate_hidden[r] * fwd.gate_hidden[r]);
        g.b_g[r] = da;
        for (c, x) in fwd.gate_input.iter().enumerate() {
            g.w_g[r * 2 * d + c] = da * x;
        }
    }

    if gold.has_answer {
        let n = fwd.v_start.len();
        let r_k = reps.row(fwd.start_pos);
        let mut end_sum = 0.0;
        for i in 0..n {
            let ds = fwd.v_start[i] - if i == gold.start { 1.0 } else { 0.0 };
            let de = fwd.v_end[i] - if i == gold.end { 1.0 } else { 0.0 };
            g.b_start += ds;
            g.b_end += de;
            end_sum += de;
            let r_i = reps.row(i);
            for c in 0..d {
                g.w_start[c] += ds * r_i[c];
                g.w_end[c] += de * r_i[c];
            }
        }
        for c in 0..d {
            g.w_end[d + c] = end_sum * r_k[c];
        }
    }
    g
}

/// Best span by `log v_start[i] + log v_end[j]` over `i <= j < i + max_span_len`,
/// or `None` when the gate probability is below `threshold`. Ties go to the
/// smaller start, then the smaller end.
pub fn decode_span(fwd: &MrcForward, max_span_len: usize, threshold: f64) -> Option<SpanPrediction> {
    if fwd.p_has_answer < threshold || max_span_len == 0 {
        return None;
    }
    let ls = math::log_softmax(&fwd.start_logits);
    let le = math::log_softmax(&fwd.end_logits);
    let n = ls.len();
    let mut best: Option<SpanPrediction> = None;
    for i in 0..n {
        for j in i..n.min(i + max_span_len) {
            let score = ls[i] + le[j];
            if best.is_none_or(|b| score > b.score) {
                best = Some(SpanPrediction { start: i, end: j, score });
            }
        }
    }
    best
}

/// Encoded training pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMrc {
    pub reps: EncoderOutput,
    pub gold: MrcGold,
}

pub fn encode_examples(examples: &[MrcExample], encoder: &dyn Encoder) -> Result<Vec<EncodedMrc>> {
    examples
        .iter()
        .map(|ex| {
            let reps = encoder.encode(&ex.context.tokens, &text::tokens(&ex.question))?;
            let gold = match ex.answer {
                Some((s, e)) if ex.has_answer => MrcGold::answer(s, e),
                _ => MrcGold::no_answer(),
            };
            Ok(EncodedMrc { reps, gold })
        })
        .collect()
}

/// Per-epoch mean loss.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epoch_loss: Vec<f64>,
}

/// Mini-batch Adam over pre-encoded examples. Deterministic given the seed;
/// batch gradients are summed in example order.
pub fn train_encoded(
    data: &[EncodedMrc],
    dim: usize,
    hidden: usize,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<(MrcParams, TrainLog)> {
    if data.is_empty() {
        bail!(Usage, "span head training needs at least one example");
    }
    let mut params = MrcParams::init(dim, hidden, config);
    let mut flat = params.flatten();
    let mut adam = Adam::new(flat.len(), config);
    let mut shuffle = config.stream(streams::SHUFFLE);
    let mut log = TrainLog::default();
    let batch = config.batch_size.max(1);

    for epoch in 0..config.epochs {
        let order = optim::epoch_order(data.len(), &mut shuffle);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            let mut grad = vec![0.0; flat.len()];
            for &idx in chunk {
                let item = &data[idx];
                let fwd = forward(&item.reps, &params, item.gold.forced_start())?;
                let l = loss(&fwd, &item.gold);
                if !l.is_finite() {
                    return Err(Error::Training(alloc::format!(
                        "non-finite loss at epoch {epoch}, example {idx} (gate logit {}, start pos {})",
                        fwd.answer_logit,
                        fwd.start_pos
                    )));
                }
                epoch_loss += l;
                let g = gradients(&fwd, &item.gold, &item.reps, &params).flatten();
                grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
            }
            let scale = 1.0 / chunk.len() as f64;
            grad.iter_mut().for_each(|v| *v *= scale);
            adam.update(&mut flat, &grad);
            params.unflatten(&flat);
        }
        let mean = epoch_loss / data.len() as f64;
        log.epoch_loss.push(mean);
        on_epoch(epoch, mean);
    }
    Ok((params, log))
}

/// Encodes the examples and trains the head.
pub fn train(
    examples: &[MrcExample],
    encoder: &dyn Encoder,
    hidden: usize,
    config: &TrainConfig,
    on_epoch: impl FnMut(usize, f64),
) -> Result<(MrcParams, TrainLog)> {
    let data = encode_examples(examples, encoder)?;
    train_encoded(&data, encoder.dim(), hidden, config, on_epoch)
}

/// Decoded answer: token span, its source text and the gate probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanAnswer {
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub score: f64,
    pub p_has_answer: f64,
}

/// Inference over a tokenized context with a slot description as question.
pub fn answer(
    encoder: &dyn Encoder,
    params: &MrcParams,
    context: &TokenizedContext,
    question: &str,
    max_span_len: usize,
    threshold: f64,
) -> Result<Option<SpanAnswer>> {
    let reps = encoder.encode(&context.tokens, &text::tokens(question))?;
    let fwd = forward(&reps, params, None)?;
    Ok(decode_span(&fwd, max_span_len, threshold).map(|s| SpanAnswer {
        start: s.start,
        end: s.end,
        text: context.span_text(s.start, s.end).into(),
        score: s.score,
        p_has_answer: fwd.p_has_answer,
    }))
}

/// Fraction of examples whose gate decision and (when answerable) exact span
/// both match.
pub fn exact_accuracy(data: &[EncodedMrc], params: &MrcParams, max_span_len: usize, threshold: f64) -> Result<f64> {
    let mut correct = 0usize;
    for item in data {
        let fwd = forward(&item.reps, params, None)?;
        let pred = decode_span(&fwd, max_span_len, threshold);
        let ok = match (pred, item.gold.has_answer) {
            (None, false) => true,
            (Some(p), true) => p.start == item.gold.start && p.end == item.gold.end,
            _ => false,
        };
        correct += usize::from(ok);
    }
    Ok(correct as f64 / data.len().max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_reps(n: usize, d: usize, rng: &mut ChaCha8Rng) -> EncoderOutput {
        EncoderOutput {
            cls: (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            token_reps: (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            dim: d,
        }
    }

    fn random_params(d: usize, h: usize, rng: &mut ChaCha8Rng) -> MrcParams {
        let mut p = MrcParams::zeros(d, h);
        let flat: Vec<f64> = (0..p.num_params()).map(|_| rng.gen_range(-0.5..0.5)).collect();
        p.unflatten(&flat);
        p
    }

    #[test]
    fn zero_params_give_uniform_and_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let reps = random_reps(5, 8, &mut rng);
        let fwd = forward(&reps, &MrcParams::zeros(8, 4), None).unwrap();
        assert!(fwd.v_start.iter().all(|p| (p - 0.2).abs() < 1e-15));
        assert_eq!(fwd.p_has_answer, 0.5);
    }

    #[test]
    fn single_token_is_certain() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let reps = random_reps(1, 8, &mut rng);
        let fwd = forward(&reps, &random_params(8, 4, &mut rng), None).unwrap();
        assert_eq!(fwd.v_start, [1.0]);
        assert_eq!(fwd.v_end, [1.0]);
    }

    #[test]
    fn gold_start_out_of_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let reps = random_reps(3, 8, &mut rng);
        assert!(matches!(forward(&reps, &MrcParams::zeros(8, 4), Some(3)), Err(Error::Usage(_))));
        assert!(matches!(forward(&reps, &MrcParams::zeros(16, 4), None), Err(Error::Compatibility(_))));
    }

    #[test]
    fn uniform_answerable_loss_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let reps = random_reps(4, 8, &mut rng);
        let fwd = forward(&reps, &MrcParams::zeros(8, 4), Some(1)).unwrap();
        let l = loss(&fwd, &MrcGold::answer(1, 2));
        let expected = core::f64::consts::LN_2 + 2.0 * libm::log(4.0);
        assert!((l - expected).abs() < 1e-12, "{l} vs {expected}");
        let l = loss(&fwd, &MrcGold::no_answer());
        assert!((l - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn span_gradients_vanish_without_answer() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let reps = random_reps(6, 8, &mut rng);
        let params = random_params(8, 4, &mut rng);
        let gold = MrcGold::no_answer();
        let fwd = forward(&reps, &params, None).unwrap();
        let g = gradients(&fwd, &gold, &reps, &params);
        assert!(g.w_start.iter().chain(&g.w_end).all(|v| *v == 0.0));
        assert_eq!(g.b_start, 0.0);
        assert_eq!(g.b_end, 0.0);
    }

    #[test]
    fn decode_hand_example() {
        let ln = |p: &[f64]| p.iter().map(|v| libm::log(*v)).collect::<Vec<_>>();
        let fwd = MrcForward {
            v_start: vec![0.7, 0.2, 0.1],
            v_end: vec![0.1, 0.8, 0.1],
            p_has_answer: 0.9,
            start_logits: ln(&[0.7, 0.2, 0.1]),
            end_logits: ln(&[0.1, 0.8, 0.1]),
            answer_logit: 0.0,
            start_pos: 0,
            gate_input: vec![],
            gate_hidden: vec![],
        };
        let s = decode_span(&fwd, 16, 0.5).unwrap();
        assert_eq!((s.start, s.end), (0, 1));
        let gated = MrcForward { p_has_answer: 0.3, ..fwd };
        assert!(decode_span(&gated, 16, 0.5).is_none());
    }

    #[test]
    fn overfits_one_example() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let item = EncodedMrc { reps: random_reps(6, 8, &mut rng), gold: MrcGold::answer(2, 4) };
        // short second-moment memory keeps steps from shrinking with the gradient
        let cfg = TrainConfig { epochs: 3000, batch_size: 1, learning_rate: 5e-2, beta2: 0.99, ..Default::default() };
        let (params, log) = train_encoded(core::slice::from_ref(&item), 8, 4, &cfg, |_, _| {}).unwrap();
        // monotone after a short warmup
        for w in log.epoch_loss[20..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "loss went up: {w:?}");
        }
        let fwd = forward(&item.reps, &params, item.gold.forced_start()).unwrap();
        let g = gradients(&fwd, &item.gold, &item.reps, &params).flatten();
        let norm = math::norm(&g);
        assert!(norm < 1e-6, "gradient norm {norm}, loss {}", log.epoch_loss.last().unwrap());
    }

    #[test]
    fn same_seed_same_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data: Vec<EncodedMrc> = (0..10)
            .map(|i| EncodedMrc { reps: random_reps(5, 8, &mut rng), gold: MrcGold::answer(i % 5, i % 5) })
            .collect();
        let cfg = TrainConfig { epochs: 5, seed: 3, ..Default::default() };
        let a = train_encoded(&data, 8, 4, &cfg, |_, _| {}).unwrap();
        let b = train_encoded(&data, 8, 4, &cfg, |_, _| {}).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flatten_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_params(8, 3, &mut rng);
        let mut q = MrcParams::zeros(8, 3);
        q.unflatten(&p.flatten());
        assert_eq!(p, q);
    }
}
