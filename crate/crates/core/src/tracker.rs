//! Turn-level state assembly.
//!
//! At each user turn the tracker rebuilds the whole frame state from the
//! dialogue history: intent and requested slots from the deep-only
//! classifiers, extractive slots from the span head and categorical slots from
//! the candidate ranker. The only value carried between turns is the last
//! tracked intent of each service (and the turn where it last switched),
//! which the intent-switch reset rule needs.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::augment::SynonymLexicon;
use crate::corpus::{self, Dialogue, FrameState, HistoryMode, Speaker, Turn};
use crate::encoder::{Encoder, EncoderConfig};
use crate::error::bail;
use crate::mrc::{self, MrcParams};
use crate::numerals;
use crate::schema::{candidate_values, classify_slot, IntentDef, Schema, ServiceDef, SlotDef, SlotKind};
use crate::text;
use crate::wd::{self, CandidateScore, RankInput, WdParams};
use crate::{Result, DONTCARE, NO_INTENT, UNKNOWN};

pub const INTENT_THRESHOLD: f64 = 0.5;
pub const REQUESTED_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResetTrigger {
    IntentSwitch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResetScope {
    ClearPriorHistory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResetRule {
    pub service: String,
    pub trigger: ResetTrigger,
    #[serde(default = "default_scope")]
    pub scope: ResetScope,
}

fn default_scope() -> ResetScope {
    ResetScope::ClearPriorHistory
}

impl ResetRule {
    pub fn intent_switch(service: &str) -> Self {
        ResetRule { service: service.into(), trigger: ResetTrigger::IntentSwitch, scope: ResetScope::ClearPriorHistory }
    }
}

pub fn validate_rules(rules: &[ResetRule], schema: &Schema) -> Result<()> {
    for r in rules {
        if schema.service(&r.service).is_none() {
            bail!(Validation, "reset rule names undefined service `{}`", r.service);
        }
    }
    Ok(())
}

/// Tracked state of one service at one user turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnState {
    pub service: String,
    pub active_intent: String,
    pub requested_slots: BTreeSet<String>,
    pub slot_values: BTreeMap<String, String>,
}

impl TurnState {
    /// Canonical view of a gold frame state: first accepted value per slot,
    /// requested slots as a set.
    pub fn from_gold(service: &str, state: &FrameState) -> Self {
        TurnState {
            service: service.into(),
            active_intent: state.active_intent.clone(),
            requested_slots: state.requested_slots.iter().cloned().collect(),
            slot_values: state
                .slot_values
                .iter()
                .filter_map(|(k, v)| Some((k.clone(), v.first()?.clone())))
                .collect(),
        }
    }

    pub fn to_frame_state(&self) -> FrameState {
        FrameState {
            active_intent: self.active_intent.clone(),
            requested_slots: self.requested_slots.iter().cloned().collect(),
            slot_values: self.slot_values.iter().map(|(k, v)| (k.clone(), alloc::vec![v.clone()])).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    Span,
    Ranker,
}

/// How one slot value was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotTrace {
    pub slot: String,
    pub head: Head,
    pub score: f64,
    /// Source turn and byte range in its utterance, for span answers.
    pub turn: Option<usize>,
    pub span: Option<(usize, usize)>,
    /// Raw surface text before numeral conversion.
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedTurn {
    pub turn_idx: usize,
    pub state: TurnState,
    pub traces: Vec<SlotTrace>,
    /// First turn visible to slot extraction.
    pub history_start: usize,
}

/// What the tracker may look at for one decision.
#[derive(Debug, Clone, Copy)]
pub struct TurnContext<'a> {
    /// Dialogue turns up to and including the current one.
    pub turns: &'a [Turn],
    /// First visible turn.
    pub from: usize,
    pub turn_idx: usize,
    pub service: &'a ServiceDef,
}

/// A span answer located in the history.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanValue {
    pub text: String,
    pub score: f64,
    pub turn: Option<usize>,
    pub span: Option<(usize, usize)>,
}

/// The per-decision models behind the tracker.
pub trait StateModels {
    fn intent_probability(&self, ctx: &TurnContext<'_>, intent: &IntentDef) -> Result<f64>;
    fn requested_probability(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<f64>;
    /// Answer of an extractive slot, or `None` when the slot is unmentioned.
    fn extract_span(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<Option<SpanValue>>;
    /// Candidate scores of a categorical slot, highest first.
    fn rank(&self, ctx: &TurnContext<'_>, slot: &SlotDef, requested: &BTreeSet<String>) -> Result<Vec<CandidateScore>>;
}

impl<M: StateModels + ?Sized> StateModels for &M {
    fn intent_probability(&self, ctx: &TurnContext<'_>, intent: &IntentDef) -> Result<f64> {
        (**self).intent_probability(ctx, intent)
    }
    fn requested_probability(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<f64> {
        (**self).requested_probability(ctx, slot)
    }
    fn extract_span(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<Option<SpanValue>> {
        (**self).extract_span(ctx, slot)
    }
    fn rank(&self, ctx: &TurnContext<'_>, slot: &SlotDef, requested: &BTreeSet<String>) -> Result<Vec<CandidateScore>> {
        (**self).rank(ctx, slot, requested)
    }
}

impl<M: StateModels + ?Sized> StateModels for Box<M> {
    fn intent_probability(&self, ctx: &TurnContext<'_>, intent: &IntentDef) -> Result<f64> {
        (**self).intent_probability(ctx, intent)
    }
    fn requested_probability(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<f64> {
        (**self).requested_probability(ctx, slot)
    }
    fn extract_span(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<Option<SpanValue>> {
        (**self).extract_span(ctx, slot)
    }
    fn rank(&self, ctx: &TurnContext<'_>, slot: &SlotDef, requested: &BTreeSet<String>) -> Result<Vec<CandidateScore>> {
        (**self).rank(ctx, slot, requested)
    }
}

/// Trained parameters of every head plus the encoder settings and lexicon
/// they were trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub encoder: EncoderConfig,
    pub mrc: MrcParams,
    pub wd: WdParams,
    pub intent: WdParams,
    pub reqslot: WdParams,
    pub lexicon: SynonymLexicon,
    pub max_span_len: usize,
    pub span_threshold: f64,
}

impl ModelBundle {
    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.mrc.validate()?;
        for (name, p) in [("ranker", &self.wd), ("intent", &self.intent), ("requested-slot", &self.reqslot)] {
            p.validate()?;
            if p.dim != self.encoder.dim {
                bail!(Compatibility, "{name} head has dim {} but the encoder has {}", p.dim, self.encoder.dim);
            }
        }
        if self.mrc.dim != self.encoder.dim {
            bail!(Compatibility, "span head has dim {} but the encoder has {}", self.mrc.dim, self.encoder.dim);
        }
        Ok(())
    }
}

/// Learned heads over an encoder.
pub struct LearnedModels<'a> {
    pub encoder: &'a dyn Encoder,
    pub bundle: &'a ModelBundle,
}

impl<'a> LearnedModels<'a> {
    pub fn new(encoder: &'a dyn Encoder, bundle: &'a ModelBundle) -> Result<Self> {
        bundle.validate()?;
        if encoder.dim() != bundle.encoder.dim {
            bail!(Compatibility, "encoder dim {} does not match model dim {}", encoder.dim(), bundle.encoder.dim);
        }
        Ok(LearnedModels { encoder, bundle })
    }
}

impl StateModels for LearnedModels<'_> {
    fn intent_probability(&self, ctx: &TurnContext<'_>, intent: &IntentDef) -> Result<f64> {
        wd::classify(ctx.turns, ctx.from, ctx.turn_idx, &intent.description, self.encoder, &self.bundle.intent)
    }

    fn requested_probability(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<f64> {
        wd::classify(ctx.turns, ctx.from, ctx.turn_idx, &slot.description, self.encoder, &self.bundle.reqslot)
    }

    fn extract_span(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<Option<SpanValue>> {
        let history = corpus::history_between(ctx.turns, ctx.from, ctx.turn_idx, HistoryMode::Mrc)?;
        let context = text::tokenize_with_offsets(&history.text);
        let Some(ans) = mrc::answer(
            self.encoder,
            &self.bundle.mrc,
            &context,
            &slot.description,
            self.bundle.max_span_len,
            self.bundle.span_threshold,
        )?
        else {
            return Ok(None);
        };
        let range = context.span_bytes(ans.start, ans.end);
        // answers straddling an utterance boundary are not values
        let Some(seg) = history
            .segments
            .iter()
            .find(|s| s.utterance.start <= range.start && range.end <= s.utterance.end)
        else {
            return Ok(None);
        };
        let text = match history.original_text(ctx.turns, range.clone()) {
            Some(t) => t.to_string(),
            None => ans.text.trim().to_string(),
        };
        Ok(Some(SpanValue {
            text,
            score: ans.score,
            turn: Some(seg.turn),
            span: Some((range.start - seg.utterance.start, range.end - seg.utterance.start)),
        }))
    }

    fn rank(&self, ctx: &TurnContext<'_>, slot: &SlotDef, requested: &BTreeSet<String>) -> Result<Vec<CandidateScore>> {
        wd::rank_candidates(
            &RankInput {
                turns: ctx.turns,
                from: ctx.from,
                turn_idx: ctx.turn_idx,
                service: &ctx.service.name,
                slot,
                lexicon: &self.bundle.lexicon,
                requested_slots: requested,
            },
            self.encoder,
            &self.bundle.wd,
        )
    }
}

/// Reads the gold annotation of the current turn through the model
/// interface. Numerical answers are returned in the surface form found in
/// the visible history so the fill-time conversion is exercised.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleModels;

fn gold_state<'a>(ctx: &TurnContext<'a>) -> Result<&'a FrameState> {
    let Some(state) = ctx.turns[ctx.turn_idx].frame(&ctx.service.name).and_then(|f| f.state.as_ref()) else {
        bail!(Data, "turn {} has no gold state for `{}`", ctx.turn_idx, ctx.service.name);
    };
    Ok(state)
}

impl StateModels for OracleModels {
    fn intent_probability(&self, ctx: &TurnContext<'_>, intent: &IntentDef) -> Result<f64> {
        Ok(if gold_state(ctx)?.active_intent == intent.name { 1.0 } else { 0.0 })
    }

    fn requested_probability(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<f64> {
        Ok(if gold_state(ctx)?.requested_slots.contains(&slot.name) { 1.0 } else { 0.0 })
    }

    fn extract_span(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<Option<SpanValue>> {
        let Some(value) = gold_state(ctx)?.value(&slot.name) else {
            return Ok(None);
        };
        let mut out = SpanValue { text: value.to_string(), score: 1.0, turn: None, span: None };
        if classify_slot(slot) == SlotKind::Numerical {
            let history = corpus::history_between(ctx.turns, ctx.from, ctx.turn_idx, HistoryMode::Mrc)?;
            if let Ok(Some(range)) = corpus::locate_value(&history, value, SlotKind::Numerical) {
                if let Some(surface) = history.original_text(ctx.turns, range) {
                    out.text = surface.to_string();
                }
            }
        }
        Ok(Some(out))
    }

    fn rank(&self, ctx: &TurnContext<'_>, slot: &SlotDef, _requested: &BTreeSet<String>) -> Result<Vec<CandidateScore>> {
        let gold = gold_state(ctx)?.value(&slot.name).unwrap_or(UNKNOWN);
        let mut scores: Vec<CandidateScore> = candidate_values(slot)?
            .into_iter()
            .map(|c| CandidateScore { probability: if c == gold { 1.0 } else { 0.0 }, candidate: c })
            .collect();
        wd::sort_scores(&mut scores);
        Ok(scores)
    }
}

/// Answers extractive slots with the earliest numeral a user mentioned in the
/// visible history (deferring to the inner models when there is none) and
/// defers everything else. It makes the effect of history truncation
/// observable.
#[derive(Debug, Clone, Copy, Default)]
pub struct EarliestMention<M>(pub M);

impl<M: StateModels> StateModels for EarliestMention<M> {
    fn intent_probability(&self, ctx: &TurnContext<'_>, intent: &IntentDef) -> Result<f64> {
        self.0.intent_probability(ctx, intent)
    }

    fn requested_probability(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<f64> {
        self.0.requested_probability(ctx, slot)
    }

    fn extract_span(&self, ctx: &TurnContext<'_>, slot: &SlotDef) -> Result<Option<SpanValue>> {
        for t in ctx.from..=ctx.turn_idx {
            let turn = &ctx.turns[t];
            if turn.speaker != Speaker::User {
                continue;
            }
            if let Some(m) = numerals::numeral_mentions(&turn.utterance).into_iter().next() {
                return Ok(Some(SpanValue {
                    text: turn.utterance[m.span.clone()].to_string(),
                    score: 1.0,
                    turn: Some(t),
                    span: Some((m.span.start, m.span.end)),
                }));
            }
        }
        self.0.extract_span(ctx, slot)
    }

    fn rank(&self, ctx: &TurnContext<'_>, slot: &SlotDef, requested: &BTreeSet<String>) -> Result<Vec<CandidateScore>> {
        self.0.rank(ctx, slot, requested)
    }
}

/// The scalar history the reset rule needs, per service.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrackerMemory {
    /// Last non-NONE intent tracked for the service.
    pub prior_intent: Option<String>,
    /// First turn visible to slot extraction.
    pub history_start: usize,
}

/// Arabic-numeral form of a numerical answer; text without a single clear
/// numeral is kept as-is.
pub fn fill_numeric(surface: &str) -> String {
    if let Some(v) = numerals::to_arabic(surface) {
        return v;
    }
    match numerals::numeral_mentions(surface).as_slice() {
        [m] => m.value.to_string(),
        _ => surface.to_string(),
    }
}

/// Tracks one service at one user turn. Only `turns[..=turn_idx]` is read.
pub fn track_turn(
    models: &dyn StateModels,
    turns: &[Turn],
    turn_idx: usize,
    service: &ServiceDef,
    rules: &[ResetRule],
    memory: &TrackerMemory,
) -> Result<(TrackedTurn, TrackerMemory)> {
    let Some(turn) = turns.get(turn_idx) else {
        bail!(Usage, "turn {turn_idx} out of range");
    };
    if turn.speaker != Speaker::User {
        bail!(Usage, "turn {turn_idx} is not a user turn");
    }
    if turn.frame(&service.name).is_none() {
        bail!(Usage, "turn {turn_idx} has no frame for service `{}`", service.name);
    }
    let turns = &turns[..=turn_idx];
    let full = TurnContext { turns, from: 0, turn_idx, service };

    let mut active_intent = NO_INTENT.to_string();
    let mut best = f64::NEG_INFINITY;
    for intent in &service.intents {
        let p = models.intent_probability(&full, intent)?;
        if p > best {
            best = p;
            if p >= INTENT_THRESHOLD {
                active_intent = intent.name.clone();
            }
        }
    }

    let mut requested = BTreeSet::new();
    for slot in &service.slots {
        if models.requested_probability(&full, slot)? >= REQUESTED_THRESHOLD {
            requested.insert(slot.name.clone());
        }
    }

    let mut next = memory.clone();
    let rule_active = rules
        .iter()
        .any(|r| r.service == service.name && r.trigger == ResetTrigger::IntentSwitch);
    if active_intent != NO_INTENT {
        let switched = matches!(&memory.prior_intent, Some(p) if *p != active_intent);
        if rule_active && switched {
            next.history_start = turn_idx;
        }
        next.prior_intent = Some(active_intent.clone());
    }
    let from = next.history_start.min(turn_idx);
    let ctx = TurnContext { turns, from, turn_idx, service };

    let mut slot_values = BTreeMap::new();
    let mut traces = Vec::new();
    for slot in &service.slots {
        let kind = classify_slot(slot);
        if kind.is_extractive() {
            if let Some(ans) = models.extract_span(&ctx, slot)? {
                let value = if kind == SlotKind::Numerical && ans.text != DONTCARE {
                    fill_numeric(&ans.text)
                } else {
                    ans.text.clone()
                };
                if value.is_empty() {
                    continue;
                }
                traces.push(SlotTrace {
                    slot: slot.name.clone(),
                    head: Head::Span,
                    score: ans.score,
                    turn: ans.turn,
                    span: ans.span,
                    surface: ans.text,
                });
                slot_values.insert(slot.name.clone(), value);
            }
        } else {
            let scores = models.rank(&ctx, slot, &requested)?;
            let Some(top) = scores.first() else {
                continue;
            };
            if top.candidate == UNKNOWN {
                continue;
            }
            traces.push(SlotTrace {
                slot: slot.name.clone(),
                head: Head::Ranker,
                score: top.probability,
                turn: None,
                span: None,
                surface: top.candidate.clone(),
            });
            slot_values.insert(slot.name.clone(), top.candidate.clone());
        }
    }

    let state = TurnState { service: service.name.clone(), active_intent, requested_slots: requested, slot_values };
    Ok((TrackedTurn { turn_idx, state, traces, history_start: from }, next))
}

/// Tracks every (user turn, service) frame of a dialogue in order.
pub fn track_dialogue(
    models: &dyn StateModels,
    dialogue: &Dialogue,
    schema: &Schema,
    rules: &[ResetRule],
) -> Result<Vec<TrackedTurn>> {
    let mut memory: BTreeMap<String, TrackerMemory> = BTreeMap::new();
    let mut out = Vec::new();
    for t in dialogue.user_turns() {
        for frame in &dialogue.turns[t].frames {
            let Some(service) = schema.service(&frame.service) else {
                bail!(Usage, "dialogue `{}` turn {t}: undefined service `{}`", dialogue.dialogue_id, frame.service);
            };
            let mem = memory.entry(service.name.clone()).or_default();
            let (tracked, next) = track_turn(models, &dialogue.turns, t, service, rules, mem)
                .map_err(|e| e.context(alloc::format!("dialogue `{}` turn {t}", dialogue.dialogue_id)))?;
            *mem = next;
            out.push(tracked);
        }
    }
    Ok(out)
}

/// Copy of the dialogue with every user frame state replaced by the tracked
/// prediction.
pub fn predict_dialogue(
    models: &dyn StateModels,
    dialogue: &Dialogue,
    schema: &Schema,
    rules: &[ResetRule],
) -> Result<Dialogue> {
    let tracked = track_dialogue(models, dialogue, schema, rules)?;
    let mut out = dialogue.clone();
    for tr in tracked {
        let turn = &mut out.turns[tr.turn_idx];
        if let Some(frame) = turn.frames.iter_mut().find(|f| f.service == tr.state.service) {
            frame.state = Some(tr.state.to_frame_state());
        }
    }
    Ok(out)
}

pub fn predict_corpus(
    models: &dyn StateModels,
    dialogues: &[Dialogue],
    schema: &Schema,
    rules: &[ResetRule],
) -> Result<Vec<Dialogue>> {
    validate_rules(rules, schema)?;
    dialogues.iter().map(|d| predict_dialogue(models, d, schema, rules)).collect()
}
