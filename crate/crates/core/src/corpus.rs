//! Annotated dialogues, tagged history construction and training examples.
//!
//! The data types follow the field layout of the schema-guided dialogue
//! dataset so corpora deserialize directly. Span annotations are in char
//! (code point) offsets, as in the dataset files.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::bail;
use crate::numerals;
use crate::schema::{candidate_values, classify_slot, Extra, Schema, ServiceDef, SlotKind};
use crate::text::{self, TokenizedContext};
use crate::{Error, Result, DONTCARE, NO_INTENT, UNKNOWN};

/// Utterances kept by [`HistoryMode::Classifier`].
pub const CLASSIFIER_WINDOW: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Speaker {
    User,
    System,
}

impl Speaker {
    pub fn tag(self) -> &'static str {
        match self {
            Speaker::User => "User:",
            Speaker::System => "System:",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dialogue {
    pub dialogue_id: String,
    #[serde(default)]
    pub services: Vec<String>,
    pub turns: Vec<Turn>,
    #[serde(flatten)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub speaker: Speaker,
    pub utterance: String,
    #[serde(default)]
    pub frames: Vec<Frame>,
    #[serde(flatten)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub service: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<FrameState>,
    #[serde(default)]
    pub actions: Vec<Action>,
    #[serde(rename = "slots", default)]
    pub span_annotations: Vec<SpanAnnotation>,
    #[serde(flatten)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameState {
    pub active_intent: String,
    #[serde(default)]
    pub requested_slots: Vec<String>,
    #[serde(default)]
    pub slot_values: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub act: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<String>,
    #[serde(default)]
    pub values: Vec<String>,
    #[serde(flatten)]
    pub extra: Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActKind {
    Inform,
    Request,
    Offer,
    Confirm,
    Other,
}

impl ActKind {
    pub const TRACKED: [ActKind; 4] = [ActKind::Inform, ActKind::Request, ActKind::Offer, ActKind::Confirm];
}

impl Action {
    pub fn new(act: &str, slot: Option<&str>, values: &[&str]) -> Self {
        Action {
            act: act.into(),
            slot: slot.map(Into::into),
            values: values.iter().map(|v| (*v).into()).collect(),
            extra: Extra::new(),
        }
    }

    pub fn kind(&self) -> ActKind {
        match self.act.as_str() {
            "INFORM" => ActKind::Inform,
            "REQUEST" => ActKind::Request,
            "OFFER" => ActKind::Offer,
            "CONFIRM" => ActKind::Confirm,
            _ => ActKind::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanAnnotation {
    pub slot: String,
    #[serde(rename = "start")]
    pub start_char: usize,
    #[serde(rename = "exclusive_end")]
    pub end_char: usize,
}

impl FrameState {
    /// First accepted value of a slot.
    pub fn value(&self, slot: &str) -> Option<&str> {
        self.slot_values.get(slot).and_then(|v| v.first()).map(String::as_str)
    }
}

impl Turn {
    pub fn frame(&self, service: &str) -> Option<&Frame> {
        self.frames.iter().find(|f| f.service == service)
    }
}

impl Dialogue {
    /// Indices of user turns.
    pub fn user_turns(&self) -> impl Iterator<Item = usize> + '_ {
        self.turns
            .iter()
            .enumerate()
            .filter(|(_, t)| t.speaker == Speaker::User)
            .map(|(i, _)| i)
    }

    pub fn validate(&self, schema: &Schema) -> Result<()> {
        let id = &self.dialogue_id;
        for (i, turn) in self.turns.iter().enumerate() {
            let expected = if i % 2 == 0 { Speaker::User } else { Speaker::System };
            if turn.speaker != expected {
                bail!(Validation, "dialogue `{id}` turn {i}: expected {:?} speaker", expected);
            }
            let len = turn.utterance.chars().count();
            for frame in &turn.frames {
                let Some(service) = schema.service(&frame.service) else {
                    bail!(Validation, "dialogue `{id}` turn {i}: undefined service `{}`", frame.service);
                };
                for span in &frame.span_annotations {
                    if service.slot(&span.slot).is_none() {
                        bail!(
                            Validation,
                            "dialogue `{id}` turn {i}: span for undefined slot `{}`",
                            span.slot
                        );
                    }
                    if span.start_char >= span.end_char || span.end_char > len {
                        bail!(
                            Validation,
                            "dialogue `{id}` turn {i}: malformed span {}..{} for slot `{}`",
                            span.start_char,
                            span.end_char,
                            span.slot
                        );
                    }
                }
                if let Some(state) = &frame.state {
                    if state.active_intent != NO_INTENT && service.intent(&state.active_intent).is_none() {
                        bail!(
                            Validation,
                            "dialogue `{id}` turn {i}: undefined intent `{}`",
                            state.active_intent
                        );
                    }
                    for slot in state.slot_values.keys().chain(&state.requested_slots) {
                        if service.slot(slot).is_none() {
                            bail!(Validation, "dialogue `{id}` turn {i}: state names undefined slot `{slot}`");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HistoryMode {
    /// Full tagged history with the final user utterance appended again.
    Mrc,
    /// Full tagged history.
    Wd,
    /// The last nine tagged utterances.
    Classifier,
}

/// One tagged utterance inside a history string.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySegment {
    pub turn: usize,
    /// Byte range of the (masked) utterance text, excluding its tag.
    pub utterance: Range<usize>,
    /// Phone spans of the unmasked utterance, for offset translation.
    pub phone_spans: Vec<Range<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub text: String,
    pub segments: Vec<HistorySegment>,
}

impl History {
    /// Whether a byte range lies entirely inside one utterance.
    pub fn within_utterance(&self, range: &Range<usize>) -> bool {
        self.segments
            .iter()
            .any(|s| s.utterance.start <= range.start && range.end <= s.utterance.end)
    }

    /// Maps a byte range of the original utterance of `turn` into the history
    /// text, using the last segment holding that turn.
    pub fn map_utterance_range(&self, turn: usize, range: Range<usize>) -> Option<Range<usize>> {
        let seg = self.segments.iter().rev().find(|s| s.turn == turn)?;
        let start = text::masked_offset(&seg.phone_spans, range.start);
        let end = text::masked_offset(&seg.phone_spans, range.end);
        Some(seg.utterance.start + start..seg.utterance.start + end)
    }
}

impl History {
    /// Original-cased, unmasked utterance text behind a byte range of the
    /// history, whitespace-trimmed. `None` if the range crosses utterances.
    pub fn original_text<'a>(&self, turns: &'a [Turn], range: Range<usize>) -> Option<&'a str> {
        let seg = self
            .segments
            .iter()
            .find(|s| s.utterance.start <= range.start && range.end <= s.utterance.end)?;
        let utt = &turns.get(seg.turn)?.utterance;
        let start = text::unmasked_offset(&seg.phone_spans, range.start - seg.utterance.start, false);
        let end = text::unmasked_offset(&seg.phone_spans, range.end - seg.utterance.start, true);
        utt.get(start..end.min(utt.len())).map(str::trim)
    }
}

/// Tagged, phone-masked history of `turns[from..=upto]`.
pub fn history_between(turns: &[Turn], from: usize, upto: usize, mode: HistoryMode) -> Result<History> {
    let Some(last) = turns.get(upto) else {
        bail!(Usage, "turn {upto} out of range ({} turns)", turns.len());
    };
    if last.speaker != Speaker::User {
        bail!(Usage, "turn {upto} is not a user turn");
    }
    if from > upto {
        bail!(Usage, "history start {from} after turn {upto}");
    }
    let mut first = from;
    if mode == HistoryMode::Classifier {
        first = first.max((upto + 1).saturating_sub(CLASSIFIER_WINDOW));
    }
    let mut order: Vec<usize> = (first..=upto).collect();
    if mode == HistoryMode::Mrc {
        order.push(upto);
    }
    let mut out = History { text: String::new(), segments: Vec::with_capacity(order.len()) };
    for idx in order {
        let turn = &turns[idx];
        if !out.text.is_empty() {
            out.text.push(' ');
        }
        out.text.push_str(turn.speaker.tag());
        out.text.push(' ');
        let start = out.text.len();
        out.text.push_str(&text::mask_phone_numbers(&turn.utterance));
        out.segments.push(HistorySegment {
            turn: idx,
            utterance: start..out.text.len(),
            phone_spans: text::phone_spans(&turn.utterance),
        });
    }
    Ok(out)
}

/// Tagged history of `turns[0..=upto]` as a single string.
pub fn build_history(turns: &[Turn], upto: usize, mode: HistoryMode) -> Result<String> {
    history_between(turns, 0, upto, mode).map(|h| h.text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrcExample {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub service: String,
    pub slot: String,
    pub context: TokenizedContext,
    pub question: String,
    pub answer: Option<(usize, usize)>,
    pub has_answer: bool,
    /// Gold value the answer span was derived from.
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdExample {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub service: String,
    /// Groups the candidates of one (turn, slot) decision.
    pub instance: usize,
    pub context: TokenizedContext,
    pub pair_text: String,
    pub label: bool,
    pub slot: String,
    pub candidate: String,
}

/// Binary example for the intent and requested-slot classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierExample {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub service: String,
    /// Intent or slot name.
    pub target: String,
    pub context: TokenizedContext,
    pub pair_text: String,
    pub label: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    Mrc,
    Wd,
    Intent,
    ReqSlot,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Examples {
    Mrc(Vec<MrcExample>),
    Wd(Vec<WdExample>),
    Classifier(Vec<ClassifierExample>),
}

impl Examples {
    pub fn len(&self) -> usize {
        match self {
            Examples::Mrc(v) => v.len(),
            Examples::Wd(v) => v.len(),
            Examples::Classifier(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn pair_text(description: &str, candidate: &str) -> String {
    alloc::format!("{description}: {candidate}")
}

/// Gold state frames of user turns, as (turn index, service, state).
fn user_frames<'a>(
    dialogue: &'a Dialogue,
    schema: &'a Schema,
) -> impl Iterator<Item = (usize, &'a ServiceDef, &'a FrameState)> + 'a {
    dialogue.user_turns().flat_map(move |t| {
        dialogue.turns[t].frames.iter().filter_map(move |f| {
            let state = f.state.as_ref()?;
            Some((t, schema.service(&f.service)?, state))
        })
    })
}

/// Last byte range in the history where `value` is mentioned inside an
/// utterance. Numerical slots also match the English word form.
pub fn locate_value(history: &History, value: &str, kind: SlotKind) -> Result<Option<Range<usize>>> {
    let mut hits: Vec<Range<usize>> = Vec::new();
    if kind != SlotKind::Numerical {
        hits = text::find_word_occurrences(&history.text, value);
    } else {
        let target: u32 = match value.trim().parse() {
            Ok(v) if v <= numerals::MAX_VALUE => v,
            _ => bail!(Unsupported, "numerical value `{value}` outside 0..=100"),
        };
        for seg in &history.segments {
            let utt = &history.text[seg.utterance.clone()];
            hits.extend(
                numerals::numeral_mentions(utt)
                    .into_iter()
                    .filter(|m| m.value == target)
                    .map(|m| seg.utterance.start + m.span.start..seg.utterance.start + m.span.end),
            );
        }
    }
    Ok(hits
        .into_iter()
        .filter(|r| history.within_utterance(r))
        .max_by_key(|r| (r.start, r.end)))
}

fn mrc_examples(dialogue: &Dialogue, schema: &Schema, out: &mut Vec<MrcExample>) -> Result<()> {
    for (t, service, state) in user_frames(dialogue, schema) {
        let history = history_between(&dialogue.turns, 0, t, HistoryMode::Mrc)?;
        let context = text::tokenize_with_offsets(&history.text);
        for slot in &service.slots {
            let kind = classify_slot(slot);
            if !kind.is_extractive() {
                continue;
            }
            let variants = state.slot_values.get(&slot.name).cloned().unwrap_or_default();
            // dontcare has no surface span; such values are not span targets
            if variants.iter().any(|v| v == DONTCARE) {
                continue;
            }
            let mut best: Option<(Range<usize>, &String)> = None;
            for v in &variants {
                if let Some(r) = locate_value(&history, v, kind)? {
                    if best.as_ref().is_none_or(|(b, _)| r.start > b.start) {
                        best = Some((r, v));
                    }
                }
            }
            let (answer, value) = match (variants.first(), best) {
                (None, _) => (None, None),
                (Some(_), Some((range, v))) => {
                    let span = context.token_span(range).ok_or_else(|| {
                        Error::Data(alloc::format!(
                            "dialogue `{}` turn {t}: value `{v}` of `{}` maps to no token",
                            dialogue.dialogue_id,
                            slot.name
                        ))
                    })?;
                    (Some(span), Some(v.clone()))
                }
                (Some(v), None) => bail!(
                    Data,
                    "dialogue `{}` turn {t}: value `{v}` of slot `{}` not found in history",
                    dialogue.dialogue_id,
                    slot.name
                ),
            };
            out.push(MrcExample {
                dialogue_id: dialogue.dialogue_id.clone(),
                turn_index: t,
                service: service.name.clone(),
                slot: slot.name.clone(),
                context: context.clone(),
                question: slot.description.clone(),
                has_answer: answer.is_some(),
                answer,
                value,
            });
        }
    }
    Ok(())
}

fn wd_examples(dialogue: &Dialogue, schema: &Schema, out: &mut Vec<WdExample>) -> Result<()> {
    let mut instance = out.last().map_or(0, |e| e.instance + 1);
    for (t, service, state) in user_frames(dialogue, schema) {
        let history = build_history(&dialogue.turns, t, HistoryMode::Wd)?;
        let context = text::tokenize_with_offsets(&history);
        for slot in &service.slots {
            if classify_slot(slot).is_extractive() {
                continue;
            }
            let candidates = candidate_values(slot)?;
            let gold = state.value(&slot.name).unwrap_or(UNKNOWN);
            if !candidates.iter().any(|c| c == gold) {
                bail!(
                    Data,
                    "dialogue `{}` turn {t}: value `{gold}` not a candidate of `{}`",
                    dialogue.dialogue_id,
                    slot.name
                );
            }
            for candidate in candidates {
                out.push(WdExample {
                    dialogue_id: dialogue.dialogue_id.clone(),
                    turn_index: t,
                    service: service.name.clone(),
                    instance,
                    context: context.clone(),
                    pair_text: pair_text(&slot.description, &candidate),
                    label: candidate == gold,
                    slot: slot.name.clone(),
                    candidate,
                });
            }
            instance += 1;
        }
    }
    Ok(())
}

fn classifier_examples(
    dialogue: &Dialogue,
    schema: &Schema,
    task: Task,
    out: &mut Vec<ClassifierExample>,
) -> Result<()> {
    for (t, service, state) in user_frames(dialogue, schema) {
        let history = build_history(&dialogue.turns, t, HistoryMode::Classifier)?;
        let context = text::tokenize_with_offsets(&history);
        let requested: BTreeSet<&str> = state.requested_slots.iter().map(String::as_str).collect();
        let targets: Vec<(&str, &str, bool)> = match task {
            Task::Intent => service
                .intents
                .iter()
                .map(|i| (i.name.as_str(), i.description.as_str(), i.name == state.active_intent))
                .collect(),
            _ => service
                .slots
                .iter()
                .map(|s| (s.name.as_str(), s.description.as_str(), requested.contains(s.name.as_str())))
                .collect(),
        };
        for (name, description, label) in targets {
            out.push(ClassifierExample {
                dialogue_id: dialogue.dialogue_id.clone(),
                turn_index: t,
                service: service.name.clone(),
                target: name.to_string(),
                context: context.clone(),
                pair_text: description.to_string(),
                label,
            });
        }
    }
    Ok(())
}

/// Builds the supervised examples of one head from gold annotations.
pub fn make_training_examples(dialogues: &[Dialogue], schema: &Schema, task: Task) -> Result<Examples> {
    Ok(match task {
        Task::Mrc => {
            let mut out = Vec::new();
            for d in dialogues {
                mrc_examples(d, schema, &mut out)?;
            }
            Examples::Mrc(out)
        }
        Task::Wd => {
            let mut out = Vec::new();
            for d in dialogues {
                wd_examples(d, schema, &mut out)?;
            }
            Examples::Wd(out)
        }
        Task::Intent | Task::ReqSlot => {
            let mut out = Vec::new();
            for d in dialogues {
                classifier_examples(d, schema, task, &mut out)?;
            }
            Examples::Classifier(out)
        }
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::schema::{IntentDef, SlotDef};
    use alloc::vec;

    pub fn turn(speaker: Speaker, utterance: &str, frames: Vec<Frame>) -> Turn {
        Turn { speaker, utterance: utterance.into(), frames, extra: Extra::new() }
    }

    pub fn frame(service: &str, state: Option<FrameState>, actions: Vec<Action>) -> Frame {
        Frame { service: service.into(), state, actions, span_annotations: vec![], extra: Extra::new() }
    }

    pub fn state(intent: &str, values: &[(&str, &str)], requested: &[&str]) -> FrameState {
        FrameState {
            active_intent: intent.into(),
            requested_slots: requested.iter().map(|s| (*s).into()).collect(),
            slot_values: values.iter().map(|(k, v)| ((*k).into(), vec![(*v).into()])).collect(),
        }
    }

    pub fn schema() -> Schema {
        Schema::new(vec![ServiceDef::new(
            "Restaurants_1",
            "Restaurant search",
            vec![
                SlotDef::new("city", "City where the restaurant is located", &[]),
                SlotDef::new("time", "Time of the reservation", &[]),
                SlotDef::new("party_size", "Number of people", &["1", "2", "3", "4"]),
                SlotDef::new("has_live_music", "Whether the restaurant has live music", &["True", "False"]),
            ],
            vec![IntentDef::new("ReserveRestaurant", "Reserve a table", &["city"], &["time", "party_size"])],
        )])
        .unwrap()
    }

    fn dialogue(turns: Vec<Turn>) -> Dialogue {
        Dialogue { dialogue_id: "d1".into(), services: vec!["Restaurants_1".into()], turns, extra: Extra::new() }
    }

    #[test]
    fn single_turn_mrc_history_copies_utterance() {
        let turns = vec![turn(Speaker::User, "Hi", vec![])];
        assert_eq!(build_history(&turns, 0, HistoryMode::Mrc).unwrap(), "User: Hi User: Hi");
        assert_eq!(build_history(&turns, 0, HistoryMode::Wd).unwrap(), "User: Hi");
    }

    #[test]
    fn mrc_history_ends_with_two_copies() {
        let turns = vec![
            turn(Speaker::User, "I want to booking a restaurant which is economical for 2 people", vec![]),
            turn(
                Speaker::System,
                "Which city should I search in? What time is the reservation for? Do you have a preferred restaurant",
                vec![],
            ),
            turn(Speaker::User, "I Want San Jose in village at 11:30 in the morning", vec![]),
        ];
        let h = build_history(&turns, 2, HistoryMode::Mrc).unwrap();
        let last = "User: I Want San Jose in village at 11:30 in the morning";
        assert!(h.ends_with(&alloc::format!("{last} {last}")));
        assert!(h.starts_with("User: I want to booking"));
    }

    #[test]
    fn classifier_history_keeps_nine_utterances() {
        let turns: Vec<Turn> = (0..12)
            .map(|i| {
                let sp = if i % 2 == 0 { Speaker::User } else { Speaker::System };
                turn(sp, &alloc::format!("u{i}"), vec![])
            })
            .collect();
        // turn 11 is a system turn; use 10
        let h = build_history(&turns[..11], 10, HistoryMode::Classifier).unwrap();
        assert_eq!(h.matches(':').count(), 9);
        assert!(h.starts_with("User: u2"));
        let turns12: Vec<Turn> = (0..13)
            .map(|i| turn(if i % 2 == 0 { Speaker::User } else { Speaker::System }, "x", vec![]))
            .collect();
        let h = build_history(&turns12, 12, HistoryMode::Classifier).unwrap();
        assert_eq!(h.matches(':').count(), 9);
    }

    #[test]
    fn history_rejects_bad_turns() {
        let turns = vec![turn(Speaker::User, "a", vec![]), turn(Speaker::System, "b", vec![])];
        assert!(matches!(build_history(&turns, 1, HistoryMode::Wd), Err(Error::Usage(_))));
        assert!(matches!(build_history(&turns, 5, HistoryMode::Wd), Err(Error::Usage(_))));
    }

    #[test]
    fn history_masks_phone_numbers() {
        let turns = vec![turn(Speaker::User, "call 415-555-0132 for 2", vec![])];
        assert_eq!(build_history(&turns, 0, HistoryMode::Wd).unwrap(), "User: call phone for 2");
    }

    #[test]
    fn mrc_examples_per_extractive_slot() {
        let d = dialogue(vec![turn(
            Speaker::User,
            "Find me a place in San Jose",
            vec![frame("Restaurants_1", Some(state("ReserveRestaurant", &[("city", "San Jose")], &[])), vec![])],
        )]);
        let Examples::Mrc(ex) = make_training_examples(&[d], &schema(), Task::Mrc).unwrap() else {
            unreachable!()
        };
        // city, time, party_size (numerical)
        assert_eq!(ex.len(), 3);
        let city = ex.iter().find(|e| e.slot == "city").unwrap();
        assert!(city.has_answer);
        let (s, e) = city.answer.unwrap();
        assert_eq!(city.context.span_text(s, e), "San Jose");
        // the copy at the end is the most recent mention
        assert!(city.context.offsets[s].0 > city.context.text.len() / 2);
        assert_eq!(ex.iter().filter(|e| e.has_answer).count(), 1);
    }

    #[test]
    fn numerical_answers_restored_from_words() {
        let d = dialogue(vec![turn(
            Speaker::User,
            "a table for two people",
            vec![frame("Restaurants_1", Some(state("ReserveRestaurant", &[("party_size", "2")], &[])), vec![])],
        )]);
        let Examples::Mrc(ex) = make_training_examples(&[d], &schema(), Task::Mrc).unwrap() else {
            unreachable!()
        };
        let p = ex.iter().find(|e| e.slot == "party_size").unwrap();
        let (s, e) = p.answer.unwrap();
        assert_eq!(p.context.span_text(s, e), "two");
    }

    #[test]
    fn missing_value_is_a_data_error() {
        let d = dialogue(vec![turn(
            Speaker::User,
            "hello",
            vec![frame("Restaurants_1", Some(state("ReserveRestaurant", &[("city", "Paris")], &[])), vec![])],
        )]);
        let err = make_training_examples(&[d], &schema(), Task::Mrc).unwrap_err();
        assert!(matches!(err, Error::Data(ref m) if m.contains("d1")));
    }

    #[test]
    fn wd_examples_one_hot_over_candidates() {
        let d = dialogue(vec![turn(
            Speaker::User,
            "somewhere with live music",
            vec![frame("Restaurants_1", Some(state("ReserveRestaurant", &[("has_live_music", "True")], &[])), vec![])],
        )]);
        let Examples::Wd(ex) = make_training_examples(&[d], &schema(), Task::Wd).unwrap() else {
            unreachable!()
        };
        assert_eq!(ex.len(), 4);
        assert_eq!(ex.iter().map(|e| e.label).collect::<Vec<_>>(), [true, false, false, false]);
        assert_eq!(ex[0].pair_text, "Whether the restaurant has live music: True");
    }

    #[test]
    fn absent_slot_labels_unknown() {
        let d = dialogue(vec![turn(
            Speaker::User,
            "hi",
            vec![frame("Restaurants_1", Some(state("ReserveRestaurant", &[], &[])), vec![])],
        )]);
        let Examples::Wd(ex) = make_training_examples(&[d], &schema(), Task::Wd).unwrap() else {
            unreachable!()
        };
        let positives: Vec<&str> = ex.iter().filter(|e| e.label).map(|e| e.candidate.as_str()).collect();
        assert_eq!(positives, [UNKNOWN]);
    }

    #[test]
    fn classifier_examples_pair_descriptions() {
        let d = dialogue(vec![turn(
            Speaker::User,
            "what time?",
            vec![frame("Restaurants_1", Some(state("ReserveRestaurant", &[], &["time"])), vec![])],
        )]);
        let Examples::Classifier(ex) = make_training_examples(core::slice::from_ref(&d), &schema(), Task::Intent).unwrap() else {
            unreachable!()
        };
        assert_eq!(ex.len(), 1);
        assert!(ex[0].label);
        let Examples::Classifier(ex) = make_training_examples(&[d], &schema(), Task::ReqSlot).unwrap() else {
            unreachable!()
        };
        assert_eq!(ex.len(), 4);
        assert_eq!(ex.iter().filter(|e| e.label).count(), 1);
    }

    #[test]
    fn validation_names_dialogue() {
        let mut d = dialogue(vec![turn(Speaker::User, "hi", vec![frame("Nope", None, vec![])])]);
        let err = d.validate(&schema()).unwrap_err().to_string();
        assert!(err.contains("d1") && err.contains("Nope"));
        d.turns[0].frames[0].service = "Restaurants_1".into();
        d.turns[0].frames[0].span_annotations.push(SpanAnnotation { slot: "city".into(), start_char: 1, end_char: 9 });
        assert!(d.validate(&schema()).is_err());
    }
}
