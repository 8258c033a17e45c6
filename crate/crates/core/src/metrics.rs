//! Dialogue state tracking metrics.
//!
//! Scores are computed per (user turn, service) frame and macro-averaged:
//!
//! * joint goal accuracy: the minimum slot score over every slot assigned in
//!   either the prediction or the gold state (1 when neither assigns any);
//!   with `strict_binary`, 1 only when that minimum is exactly 1.
//! * average goal accuracy: the mean slot score over gold-assigned slots; a
//!   frame without gold assignments scores its joint goal value.
//! * slot tagging F1: F1 over non-categorical (slot, value) pairs, a pair
//!   matching when its fuzzy score is at least [`F1_MATCH_THRESHOLD`];
//!   averaged over frames where either side assigns a non-categorical slot.
//! * requested slots F1: set F1 per frame (two empty sets score 1).
//! * active intent accuracy: exact match, `NONE` included.
//!
//! Breakdowns use the same definitions on a subset of frames, so an overall
//! value is the frame-weighted mean of its groups (slot tagging F1 weighted by
//! its own frame count).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{Dialogue, FrameState, Speaker};
use crate::error::bail;
use crate::schema::{Schema, SlotDef};
use crate::text::normalize;
use crate::Result;

pub const F1_MATCH_THRESHOLD: f64 = 0.9;

/// Edit distance over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0; b.len() + 1];
    for (i, ca) in a.chars().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != *cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - levenshtein / max_len` on lowercased, whitespace-collapsed strings.
pub fn fuzzy_score(a: &str, b: &str) -> f64 {
    let a = normalize(a);
    let b = normalize(b);
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&a, &b) as f64 / longest as f64
}

/// Score of one slot. `gold` lists the accepted variants.
pub fn slot_assignment_score(slot: &SlotDef, predicted: Option<&str>, gold: Option<&[String]>) -> f64 {
    match (predicted, gold) {
        (None, None) => 1.0,
        (Some(_), None) | (None, Some(_)) => 0.0,
        (Some(p), Some(g)) => {
            if slot.is_categorical {
                if g.iter().any(|v| v == p) {
                    1.0
                } else {
                    0.0
                }
            } else {
                g.iter().map(|v| fuzzy_score(p, v)).fold(0.0, f64::max)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvalOptions {
    pub strict_binary: bool,
}

/// Scores of one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub dialogue_id: String,
    pub turn: usize,
    pub service: String,
    pub joint: f64,
    pub average: f64,
    /// `None` when neither side assigns a non-categorical slot.
    pub slot_f1: Option<f64>,
    pub requested_f1: f64,
    pub intent_correct: bool,
}

fn f1(tp: usize, predicted: usize, gold: usize) -> f64 {
    if predicted == 0 && gold == 0 {
        return 1.0;
    }
    if tp == 0 {
        return 0.0;
    }
    let p = tp as f64 / predicted as f64;
    let r = tp as f64 / gold as f64;
    2.0 * p * r / (p + r)
}

pub fn score_frame(
    slots: &[SlotDef],
    predicted: &FrameState,
    gold: &FrameState,
    options: EvalOptions,
) -> (f64, f64, Option<f64>, f64, bool) {
    let pred_value = |s: &SlotDef| predicted.slot_values.get(&s.name).and_then(|v| v.first()).map(String::as_str);
    let gold_values = |s: &SlotDef| gold.slot_values.get(&s.name).filter(|v| !v.is_empty()).map(Vec::as_slice);

    let mut joint: f64 = 1.0;
    let mut gold_sum = 0.0;
    let mut gold_count = 0usize;
    let (mut tp, mut n_pred, mut n_gold) = (0usize, 0usize, 0usize);
    for slot in slots {
        let p = pred_value(slot);
        let g = gold_values(slot);
        if p.is_none() && g.is_none() {
            continue;
        }
        let score = slot_assignment_score(slot, p, g);
        joint = joint.min(score);
        if g.is_some() {
            gold_sum += score;
            gold_count += 1;
        }
        if !slot.is_categorical {
            n_pred += usize::from(p.is_some());
            n_gold += usize::from(g.is_some());
            tp += usize::from(p.is_some() && g.is_some() && score >= F1_MATCH_THRESHOLD);
        }
    }
    if options.strict_binary {
        joint = if joint == 1.0 { 1.0 } else { 0.0 };
    }
    let average = if gold_count == 0 { joint } else { gold_sum / gold_count as f64 };
    let slot_f1 = (n_pred + n_gold > 0).then(|| f1(tp, n_pred, n_gold));

    let pr: BTreeSet<&String> = predicted.requested_slots.iter().collect();
    let gr: BTreeSet<&String> = gold.requested_slots.iter().collect();
    let requested_f1 = f1(pr.intersection(&gr).count(), pr.len(), gr.len());
    (joint, average, slot_f1, requested_f1, predicted.active_intent == gold.active_intent)
}

/// One group of averaged metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricGroup {
    pub frames: usize,
    pub slot_tagging_frames: usize,
    pub joint_goal_accuracy: f64,
    pub average_goal_accuracy: f64,
    pub slot_tagging_f1: f64,
    pub requested_slots_f1: f64,
    pub active_intent_accuracy: f64,
}

#[derive(Debug, Clone, Default)]
struct Acc {
    frames: usize,
    joint: f64,
    average: f64,
    slot_frames: usize,
    slot_f1: f64,
    requested: f64,
    intent: usize,
}

impl Acc {
    fn add(&mut self, f: &FrameScore) {
        self.frames += 1;
        self.joint += f.joint;
        self.average += f.average;
        if let Some(s) = f.slot_f1 {
            self.slot_frames += 1;
            self.slot_f1 += s;
        }
        self.requested += f.requested_f1;
        self.intent += usize::from(f.intent_correct);
    }

    fn finish(&self) -> MetricGroup {
        let n = self.frames.max(1) as f64;
        MetricGroup {
            frames: self.frames,
            slot_tagging_frames: self.slot_frames,
            joint_goal_accuracy: self.joint / n,
            average_goal_accuracy: self.average / n,
            slot_tagging_f1: if self.slot_frames == 0 { 1.0 } else { self.slot_f1 / self.slot_frames as f64 },
            requested_slots_f1: self.requested / n,
            active_intent_accuracy: self.intent as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub overall: MetricGroup,
    pub per_service: BTreeMap<String, MetricGroup>,
    /// Present when the set of training services is known.
    pub seen: Option<MetricGroup>,
    pub unseen: Option<MetricGroup>,
    pub strict_binary: bool,
    pub frames: Vec<FrameScore>,
}

impl MetricsReport {
    /// Flat `key=value` lines, overall values first.
    pub fn key_values(&self) -> String {
        let mut out = String::new();
        let mut group = |prefix: &str, g: &MetricGroup| {
            out.push_str(&format!("{prefix}joint_goal_accuracy={:.6}\n", g.joint_goal_accuracy));
            out.push_str(&format!("{prefix}average_goal_accuracy={:.6}\n", g.average_goal_accuracy));
            out.push_str(&format!("{prefix}slot_tagging_f1={:.6}\n", g.slot_tagging_f1));
            out.push_str(&format!("{prefix}requested_slots_f1={:.6}\n", g.requested_slots_f1));
            out.push_str(&format!("{prefix}active_intent_accuracy={:.6}\n", g.active_intent_accuracy));
            out.push_str(&format!("{prefix}frames={}\n", g.frames));
        };
        group("", &self.overall);
        for (name, g) in &self.per_service {
            group(&format!("service.{name}."), g);
        }
        if let Some(g) = &self.seen {
            group("seen.", g);
        }
        if let Some(g) = &self.unseen {
            group("unseen.", g);
        }
        out
    }

    /// Aligned text table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<24} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}\n",
            "group", "frames", "JGA", "AGA", "slotF1", "reqF1", "intent"
        );
        let mut row = |name: &str, g: &MetricGroup| {
            out.push_str(&format!(
                "{:<24} {:>7} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4}\n",
                name,
                g.frames,
                g.joint_goal_accuracy,
                g.average_goal_accuracy,
                g.slot_tagging_f1,
                g.requested_slots_f1,
                g.active_intent_accuracy
            ));
        };
        row("overall", &self.overall);
        for (name, g) in &self.per_service {
            row(name, g);
        }
        if let Some(g) = &self.seen {
            row("seen", g);
        }
        if let Some(g) = &self.unseen {
            row("unseen", g);
        }
        out
    }
}

/// Scores predictions against gold. Dialogues are matched by id, frames by
/// turn index and service.
pub fn evaluate(
    predictions: &[Dialogue],
    golds: &[Dialogue],
    schema: &Schema,
    options: EvalOptions,
    seen_services: Option<&BTreeSet<String>>,
) -> Result<MetricsReport> {
    let mut by_id: BTreeMap<&str, &Dialogue> = BTreeMap::new();
    for p in predictions {
        if by_id.insert(p.dialogue_id.as_str(), p).is_some() {
            bail!(Alignment, "prediction dialogue `{}` appears twice", p.dialogue_id);
        }
    }
    if predictions.len() != golds.len() {
        bail!(Alignment, "{} predicted dialogues but {} gold dialogues", predictions.len(), golds.len());
    }
    let mut golds_sorted: Vec<&Dialogue> = golds.iter().collect();
    golds_sorted.sort_by(|a, b| a.dialogue_id.cmp(&b.dialogue_id));

    let mut frames = Vec::new();
    for gold in golds_sorted {
        let id = &gold.dialogue_id;
        let Some(pred) = by_id.get(id.as_str()) else {
            bail!(Alignment, "gold dialogue `{id}` has no prediction");
        };
        if pred.turns.len() != gold.turns.len() {
            bail!(Alignment, "dialogue `{id}`: {} predicted turns, {} gold turns", pred.turns.len(), gold.turns.len());
        }
        for (t, (gt, pt)) in gold.turns.iter().zip(&pred.turns).enumerate() {
            if gt.speaker != Speaker::User {
                continue;
            }
            for gf in &gt.frames {
                let Some(gs) = &gf.state else { continue };
                let Some(ps) = pt.frame(&gf.service).and_then(|f| f.state.as_ref()) else {
                    bail!(Alignment, "dialogue `{id}` turn {t}: no predicted state for service `{}`", gf.service);
                };
                let Some(service) = schema.service(&gf.service) else {
                    bail!(Alignment, "dialogue `{id}` turn {t}: service `{}` not in schema", gf.service);
                };
                let (joint, average, slot_f1, requested_f1, intent_correct) =
                    score_frame(&service.slots, ps, gs, options);
                frames.push(FrameScore {
                    dialogue_id: id.clone(),
                    turn: t,
                    service: gf.service.clone(),
                    joint,
                    average,
                    slot_f1,
                    requested_f1,
                    intent_correct,
                });
            }
        }
    }
    if frames.is_empty() {
        bail!(Alignment, "no gold user frames to score");
    }

    let mut overall = Acc::default();
    let mut per_service: BTreeMap<String, Acc> = BTreeMap::new();
    let (mut seen, mut unseen) = (Acc::default(), Acc::default());
    for f in &frames {
        overall.add(f);
        per_service.entry(f.service.clone()).or_default().add(f);
        if let Some(s) = seen_services {
            if s.contains(&f.service) {
                seen.add(f);
            } else {
                unseen.add(f);
            }
        }
    }
    let group = |a: &Acc| (a.frames > 0).then(|| a.finish());
    Ok(MetricsReport {
        overall: overall.finish(),
        per_service: per_service.iter().map(|(k, a)| (k.clone(), a.finish())).collect(),
        seen: seen_services.and_then(|_| group(&seen)),
        unseen: seen_services.and_then(|_| group(&unseen)),
        strict_binary: options.strict_binary,
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::{frame, schema, state, turn};
    use crate::corpus::Speaker::{System, User};
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn fuzzy_examples() {
        assert_eq!(fuzzy_score("San Jose", "san  jose"), 1.0);
        assert!((fuzzy_score("abc", "abd") - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(fuzzy_score("", ""), 1.0);
        assert_eq!(fuzzy_score("abc", ""), 0.0);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
    }

    #[test]
    fn slot_scores() {
        let cat = SlotDef::new("free", "d", &["True", "False"]);
        let span = SlotDef::new("time", "d", &[]);
        assert_eq!(slot_assignment_score(&cat, None, None), 1.0);
        assert_eq!(slot_assignment_score(&cat, Some("True"), Some(&["False".to_string()])), 0.0);
        assert_eq!(slot_assignment_score(&cat, Some("True"), None), 0.0);
        let f = slot_assignment_score(&span, Some("11:30 am"), Some(&["11:30 in the morning".to_string()]));
        assert!(f > 0.0 && f < 1.0);
        let two = ["11:30 in the morning".to_string(), "11:30 am".to_string()];
        assert_eq!(slot_assignment_score(&span, Some("11:30 am"), Some(&two)), 1.0);
    }

    fn one_frame(pred: FrameState, gold: FrameState) -> (Dialogue, Dialogue) {
        let mk = |s: FrameState| Dialogue {
            dialogue_id: "x".into(),
            services: vec!["Restaurants_1".into()],
            turns: vec![
                turn(User, "hi", vec![frame("Restaurants_1", Some(s), vec![])]),
                turn(System, "hello", vec![]),
            ],
            extra: Default::default(),
        };
        (mk(pred), mk(gold))
    }

    #[test]
    fn one_wrong_categorical_of_two() {
        let (p, g) = one_frame(
            state("ReserveRestaurant", &[("has_live_music", "True"), ("party_size", "2")], &[]),
            state("ReserveRestaurant", &[("has_live_music", "False"), ("party_size", "2")], &[]),
        );
        let r = evaluate(&[p], &[g], &schema(), EvalOptions::default(), None).unwrap();
        assert_eq!(r.overall.joint_goal_accuracy, 0.0);
        assert_eq!(r.overall.average_goal_accuracy, 0.5);
        assert_eq!(r.overall.active_intent_accuracy, 1.0);
        assert_eq!(r.overall.slot_tagging_f1, 1.0);
        assert_eq!(r.overall.slot_tagging_frames, 0);
    }

    #[test]
    fn identity_scores_one() {
        let s = state("ReserveRestaurant", &[("city", "San Jose"), ("has_live_music", "True")], &["time"]);
        let (p, g) = one_frame(s.clone(), s);
        let r = evaluate(&[p], &[g], &schema(), EvalOptions { strict_binary: true }, None).unwrap();
        let o = &r.overall;
        for v in [
            o.joint_goal_accuracy,
            o.average_goal_accuracy,
            o.slot_tagging_f1,
            o.requested_slots_f1,
            o.active_intent_accuracy,
        ] {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn strict_binary_floors_fuzzy_joint() {
        let (p, g) = one_frame(
            state("ReserveRestaurant", &[("city", "San Jos")], &[]),
            state("ReserveRestaurant", &[("city", "San Jose")], &[]),
        );
        let soft = evaluate(core::slice::from_ref(&p), core::slice::from_ref(&g), &schema(), EvalOptions::default(), None).unwrap();
        let hard = evaluate(&[p], &[g], &schema(), EvalOptions { strict_binary: true }, None).unwrap();
        assert!((soft.overall.joint_goal_accuracy - 7.0 / 8.0).abs() < 1e-12);
        assert_eq!(hard.overall.joint_goal_accuracy, 0.0);
        assert_eq!(soft.overall.slot_tagging_f1, 0.0);
    }

    #[test]
    fn misaligned_corpora_rejected() {
        let s = state("ReserveRestaurant", &[], &[]);
        let (mut p, g) = one_frame(s.clone(), s);
        p.dialogue_id = "other".into();
        let err = evaluate(&[p], &[g], &schema(), EvalOptions::default(), None).unwrap_err();
        assert!(matches!(err, crate::Error::Alignment(_)));
    }

    #[test]
    fn requested_f1_and_empty_sets() {
        let (p, g) = one_frame(
            state("ReserveRestaurant", &[], &["time", "city"]),
            state("ReserveRestaurant", &[], &["time"]),
        );
        let r = evaluate(&[p], &[g], &schema(), EvalOptions::default(), None).unwrap();
        assert!((r.overall.requested_slots_f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.overall.joint_goal_accuracy, 1.0);
    }
}
