//! Hand-crafted discrete ("wide") features for candidate ranking.
//!
//! Every (history, slot, candidate) triple maps to exactly 83 binary features.
//! [`FEATURES`] is the authoritative layout; indices are stable within a
//! [`LAYOUT_VERSION`].

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::augment::{content_words, SynonymLexicon};
use crate::corpus::{ActKind, Speaker, Turn};
use crate::error::bail;
use crate::schema::{classify_slot, SlotDef, SlotKind};
use crate::text::{self, contains_phrase};
use crate::{Result, DONTCARE, UNKNOWN};

pub const NUM_FEATURES: usize = 83;
pub const LAYOUT_VERSION: u32 = 1;

/// Index, name and meaning of every feature.
pub const FEATURES: [(&str, &str); NUM_FEATURES] = [
    ("tone_interrogative", "current user utterance ends with '?' or opens with a wh-word or auxiliary"),
    ("tone_negative", "current user utterance contains no/not/never/n't style negation"),
    ("tone_declarative", "current user utterance is neither interrogative nor negative"),
    ("desc_current_user", "a content word of the slot description occurs in the current user utterance"),
    ("desc_last_system", "a content word of the slot description occurs in the previous system utterance"),
    ("desc_anywhere", "a content word of the slot description occurs anywhere in the history"),
    ("desc_syn_current_user", "a lexicon synonym of a description word occurs in the current user utterance"),
    ("desc_syn_last_system", "a lexicon synonym of a description word occurs in the previous system utterance"),
    ("desc_syn_anywhere", "a lexicon synonym of a description word occurs anywhere in the history"),
    ("value_current_user", "the candidate occurs in the current user utterance"),
    ("value_last_system", "the candidate occurs in the previous system utterance"),
    ("value_anywhere", "the candidate occurs anywhere in the history"),
    ("value_syn_current_user", "a lexicon synonym of the candidate occurs in the current user utterance"),
    ("value_syn_last_system", "a lexicon synonym of the candidate occurs in the previous system utterance"),
    ("value_syn_anywhere", "a lexicon synonym of the candidate occurs anywhere in the history"),
    ("sys_inform_slot", "previous system turn has an INFORM action on the slot"),
    ("sys_request_slot", "previous system turn has a REQUEST action on the slot"),
    ("sys_offer_slot", "previous system turn has an OFFER action on the slot"),
    ("sys_confirm_slot", "previous system turn has a CONFIRM action on the slot"),
    ("user_yes", "current user utterance opens with yes/yeah/sure/correct"),
    ("user_no", "current user utterance opens with no/nope/nah"),
    ("slot_requested", "the slot is among the current turn's requested slots"),
    ("turn_0", "current user turn is the 1st of the dialogue"),
    ("turn_1", "current user turn is the 2nd"),
    ("turn_2", "current user turn is the 3rd"),
    ("turn_3", "current user turn is the 4th"),
    ("turn_4", "current user turn is the 5th"),
    ("turn_5", "current user turn is the 6th"),
    ("turn_6", "current user turn is the 7th"),
    ("turn_7", "current user turn is the 8th"),
    ("turn_8", "current user turn is the 9th"),
    ("turn_9_plus", "current user turn is the 10th or later"),
    ("slot_name_in_history", "the slot name (underscores as spaces) occurs anywhere in the history"),
    ("value_or_syn_in_history", "the candidate or one of its synonyms occurs anywhere in the history"),
    ("cand_dontcare", "candidate is the dontcare sentinel"),
    ("cand_unknown", "candidate is the unknown sentinel"),
    ("cand_true", "candidate is True"),
    ("cand_false", "candidate is False"),
    ("cand_in_schema", "candidate comes from the schema's value list"),
    ("cand_offered", "a system OFFER on the slot listed the candidate anywhere in the history"),
    ("sys_inform_value", "previous system INFORM on the slot lists the candidate"),
    ("sys_request_value", "previous system REQUEST on the slot lists the candidate"),
    ("sys_offer_value", "previous system OFFER on the slot lists the candidate"),
    ("sys_confirm_value", "previous system CONFIRM on the slot lists the candidate"),
    ("confirm_value_yes", "previous system confirmed the candidate and the user says yes"),
    ("confirm_value_no", "previous system confirmed the candidate and the user says no"),
    ("offer_value_yes", "previous system offered the candidate and the user says yes"),
    ("request_slot_yes", "previous system requested the slot and the user says yes"),
    ("request_slot_no", "previous system requested the slot and the user says no"),
    ("dontcare_cue", "current user utterance has a no-preference cue (any, doesn't matter, ...)"),
    ("dontcare_cue_on_slot", "no-preference cue while the slot is under discussion (described or requested)"),
    ("negated_value", "the candidate follows a negation within three tokens in the current user utterance"),
    ("value_earlier_user", "the candidate occurs in an earlier user utterance"),
    ("value_any_system", "the candidate occurs in some system utterance"),
    ("slot_boolean", "the slot is boolean"),
    ("slot_text", "the slot is text-valued"),
    ("value_overlap_none", "no candidate token occurs in the current user utterance"),
    ("value_overlap_low", "under half of the candidate tokens occur in the current user utterance"),
    ("value_overlap_high", "at least half, not all, of the candidate tokens occur"),
    ("value_overlap_full", "every candidate token occurs in the current user utterance"),
    ("desc_overlap_none", "no description content word occurs in the current user utterance"),
    ("desc_overlap_low", "under half of the description content words occur"),
    ("desc_overlap_high", "at least half, not all, of the description content words occur"),
    ("desc_overlap_full", "every description content word occurs in the current user utterance"),
    ("history_len_lt20", "history has fewer than 20 tokens"),
    ("history_len_lt50", "history has 20 to 49 tokens"),
    ("history_len_lt100", "history has 50 to 99 tokens"),
    ("history_len_lt200", "history has 100 to 199 tokens"),
    ("history_len_ge200", "history has 200 or more tokens"),
    ("cand_len_1", "candidate has at most one token (sentinels included)"),
    ("cand_len_2", "candidate has two tokens"),
    ("cand_len_3_plus", "candidate has three or more tokens"),
    ("num_candidates_le4", "the slot has at most 4 candidates"),
    ("num_candidates_le8", "the slot has 5 to 8 candidates"),
    ("num_candidates_gt8", "the slot has more than 8 candidates"),
    ("bias", "always 1"),
    ("true_yes_after_system", "candidate True, user says yes, previous system acted on the slot"),
    ("false_no_after_system", "candidate False, user says no, previous system acted on the slot"),
    ("reserved_78", "reserved, always 0"),
    ("reserved_79", "reserved, always 0"),
    ("reserved_80", "reserved, always 0"),
    ("reserved_81", "reserved, always 0"),
    ("reserved_82", "reserved, always 0"),
];

mod idx {
    pub const TONE: usize = 0;
    pub const DESC: usize = 3;
    pub const VALUE: usize = 9;
    pub const SYS_ACT_SLOT: usize = 15;
    pub const USER_YES: usize = 19;
    pub const USER_NO: usize = 20;
    pub const REQUESTED: usize = 21;
    pub const TURN: usize = 22;
    pub const SLOT_NAME: usize = 32;
    pub const VALUE_HISTORY: usize = 33;
    pub const CAND_KIND: usize = 34;
    pub const SYS_ACT_VALUE: usize = 40;
    pub const CONFIRM_YES: usize = 44;
    pub const CONFIRM_NO: usize = 45;
    pub const OFFER_YES: usize = 46;
    pub const REQUEST_YES: usize = 47;
    pub const REQUEST_NO: usize = 48;
    pub const DONTCARE_CUE: usize = 49;
    pub const DONTCARE_ON_SLOT: usize = 50;
    pub const NEGATED_VALUE: usize = 51;
    pub const VALUE_EARLIER_USER: usize = 52;
    pub const VALUE_SYSTEM: usize = 53;
    pub const SLOT_BOOLEAN: usize = 54;
    pub const SLOT_TEXT: usize = 55;
    pub const VALUE_OVERLAP: usize = 56;
    pub const DESC_OVERLAP: usize = 60;
    pub const HISTORY_LEN: usize = 64;
    pub const CAND_LEN: usize = 69;
    pub const NUM_CANDIDATES: usize = 72;
    pub const BIAS: usize = 75;
    pub const TRUE_YES: usize = 76;
    pub const FALSE_NO: usize = 77;
}

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURES.iter().position(|(n, _)| *n == name)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WideFeatureVector {
    pub values: Vec<u8>,
    pub layout_version: u32,
}

impl WideFeatureVector {
    pub fn zeros() -> Self {
        WideFeatureVector { values: alloc::vec![0; NUM_FEATURES], layout_version: LAYOUT_VERSION }
    }

    pub fn get(&self, name: &str) -> bool {
        feature_index(name).is_some_and(|i| self.values[i] == 1)
    }

    fn set(&mut self, i: usize, on: bool) {
        self.values[i] = u8::from(on);
    }

    pub fn as_f64(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|v| f64::from(*v))
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != NUM_FEATURES || self.values.iter().any(|v| *v > 1) {
            bail!(Validation, "wide feature vector must hold {NUM_FEATURES} binary values");
        }
        Ok(())
    }
}

/// Everything the extractor looks at for one candidate.
#[derive(Debug, Clone, Copy)]
pub struct FeatureInput<'a> {
    /// Turns visible to the tracker (possibly truncated at an intent switch).
    pub turns: &'a [Turn],
    /// Index into `turns` of the current user turn.
    pub turn_idx: usize,
    pub service: &'a str,
    pub slot: &'a SlotDef,
    pub candidate: &'a str,
    pub num_candidates: usize,
    pub lexicon: &'a SynonymLexicon,
    /// Requested slots of the current turn, as decided by the requested-slot model.
    pub requested_slots: &'a BTreeSet<String>,
}

const WH_WORDS: &[&str] = &[
    "what", "where", "when", "who", "whom", "which", "why", "how", "is", "are", "was", "were", "do", "does", "did",
    "can", "could", "will", "would", "should", "shall", "may", "have", "has",
];
const NEGATIONS: &[&str] = &["no", "not", "never", "nothing", "none", "nope", "nah", "without"];
const YES_WORDS: &[&str] = &["yes", "yeah", "sure", "correct"];
const NO_WORDS: &[&str] = &["no", "nope", "nah"];
const DONTCARE_CUES: &[&str] = &[
    "don't care",
    "dont care",
    "doesn't matter",
    "does not matter",
    "no preference",
    "anything",
    "any",
    "whatever",
    "either",
];

fn first_word(tokens: &[String]) -> Option<&str> {
    tokens.iter().find(|t| t.chars().all(char::is_alphanumeric)).map(String::as_str)
}

pub fn is_interrogative(utterance: &str) -> bool {
    let toks = text::tokens(utterance);
    utterance.trim_end().ends_with('?') || first_word(&toks).is_some_and(|w| WH_WORDS.contains(&w))
}

pub fn is_negative(utterance: &str) -> bool {
    let lower = utterance.to_lowercase();
    lower.contains("n't")
        || contains_phrase(&lower, "don't need")
        || text::tokens(&lower).iter().any(|t| NEGATIONS.contains(&t.as_str()))
}

pub fn says_yes(utterance: &str) -> bool {
    first_word(&text::tokens(utterance)).is_some_and(|w| YES_WORDS.contains(&w))
}

pub fn says_no(utterance: &str) -> bool {
    first_word(&text::tokens(utterance)).is_some_and(|w| NO_WORDS.contains(&w))
}

pub fn has_dontcare_cue(utterance: &str) -> bool {
    DONTCARE_CUES.iter().any(|c| contains_phrase(utterance, c))
}

fn overlap_bucket(needle: &[String], hay: &[String]) -> usize {
    if needle.is_empty() {
        return 0;
    }
    let hits = needle.iter().filter(|t| hay.contains(t)).count();
    if hits == 0 {
        0
    } else if hits == needle.len() {
        3
    } else if 2 * hits >= needle.len() {
        2
    } else {
        1
    }
}

fn is_sentinel(candidate: &str) -> bool {
    candidate == DONTCARE || candidate == UNKNOWN
}

/// Deterministic 83-bit description of one candidate in context.
pub fn extract_wide_features(input: &FeatureInput<'_>) -> Result<WideFeatureVector> {
    let turns = input.turns;
    let t = input.turn_idx;
    match turns.get(t) {
        Some(turn) if turn.speaker == Speaker::User => {}
        _ => bail!(Usage, "feature extraction needs a user turn, got index {t}"),
    }
    let slot = input.slot;
    let cand = input.candidate;
    let lexicon = input.lexicon;
    let mut f = WideFeatureVector::zeros();

    let current = turns[t].utterance.as_str();
    let last_system = t.checked_sub(1).map(|i| &turns[i]).filter(|x| x.speaker == Speaker::System);
    let last_system_text = last_system.map_or("", |x| x.utterance.as_str());
    let visible = &turns[..=t];

    // tone
    let interrogative = is_interrogative(current);
    let negative = is_negative(current);
    f.set(idx::TONE, interrogative);
    f.set(idx::TONE + 1, negative);
    f.set(idx::TONE + 2, !interrogative && !negative);

    // description words and their synonyms
    let desc_words = content_words(&slot.description);
    let desc_in = |s: &str| desc_words.iter().any(|w| contains_phrase(s, w));
    let desc_syn_in = |s: &str| desc_words.iter().any(|w| lexicon.mentions_synonym(s, w));
    let anywhere = |pred: &dyn Fn(&str) -> bool| visible.iter().any(|x| pred(&x.utterance));
    f.set(idx::DESC, desc_in(current));
    f.set(idx::DESC + 1, desc_in(last_system_text));
    f.set(idx::DESC + 2, anywhere(&desc_in));
    f.set(idx::DESC + 3, desc_syn_in(current));
    f.set(idx::DESC + 4, desc_syn_in(last_system_text));
    f.set(idx::DESC + 5, anywhere(&desc_syn_in));

    // candidate value and its synonyms; sentinels never match text
    let sentinel = is_sentinel(cand);
    let value_in = |s: &str| !sentinel && contains_phrase(s, cand);
    let value_syn_in = |s: &str| !sentinel && lexicon.mentions_synonym(s, cand);
    f.set(idx::VALUE, value_in(current));
    f.set(idx::VALUE + 1, value_in(last_system_text));
    f.set(idx::VALUE + 2, anywhere(&value_in));
    f.set(idx::VALUE + 3, value_syn_in(current));
    f.set(idx::VALUE + 4, value_syn_in(last_system_text));
    f.set(idx::VALUE + 5, anywhere(&value_syn_in));

    // previous system actions on this slot
    let prev_actions: Vec<_> = last_system
        .and_then(|x| x.frame(input.service))
        .map(|fr| fr.actions.iter().filter(|a| a.slot.as_deref() == Some(slot.name.as_str())).collect())
        .unwrap_or_default();
    let yes = says_yes(current);
    let no = says_no(current);
    let mut acted_on_slot = false;
    for (k, kind) in ActKind::TRACKED.iter().enumerate() {
        let on_slot = prev_actions.iter().any(|a| a.kind() == *kind);
        let with_value = prev_actions.iter().any(|a| a.kind() == *kind && a.values.iter().any(|v| v == cand));
        acted_on_slot |= on_slot;
        f.set(idx::SYS_ACT_SLOT + k, on_slot);
        f.set(idx::SYS_ACT_VALUE + k, with_value);
    }
    f.set(idx::USER_YES, yes);
    f.set(idx::USER_NO, no);
    f.set(idx::REQUESTED, input.requested_slots.contains(&slot.name));

    let user_ordinal = visible.iter().filter(|x| x.speaker == Speaker::User).count() - 1;
    f.set(idx::TURN + user_ordinal.min(9), true);

    let slot_phrase = slot.name.replace('_', " ");
    f.set(idx::SLOT_NAME, anywhere(&|s: &str| contains_phrase(s, &slot_phrase)));
    f.set(idx::VALUE_HISTORY, anywhere(&|s: &str| value_in(s) || value_syn_in(s)));

    let kind = classify_slot(slot);
    let in_schema = slot.possible_values.iter().any(|v| v == cand);
    f.set(idx::CAND_KIND, cand == DONTCARE);
    f.set(idx::CAND_KIND + 1, cand == UNKNOWN);
    f.set(idx::CAND_KIND + 2, cand == "True");
    f.set(idx::CAND_KIND + 3, cand == "False");
    f.set(idx::CAND_KIND + 4, in_schema);
    let offered = visible.iter().filter(|x| x.speaker == Speaker::System).any(|x| {
        x.frame(input.service).is_some_and(|fr| {
            fr.actions.iter().any(|a| {
                a.kind() == ActKind::Offer
                    && a.slot.as_deref() == Some(slot.name.as_str())
                    && a.values.iter().any(|v| v == cand)
            })
        })
    });
    f.set(idx::CAND_KIND + 5, offered);

    let confirm_value = f.values[idx::SYS_ACT_VALUE + 3] == 1;
    let offer_value = f.values[idx::SYS_ACT_VALUE + 2] == 1;
    let request_slot = f.values[idx::SYS_ACT_SLOT + 1] == 1;
    f.set(idx::CONFIRM_YES, confirm_value && yes);
    f.set(idx::CONFIRM_NO, confirm_value && no);
    f.set(idx::OFFER_YES, offer_value && yes);
    f.set(idx::REQUEST_YES, request_slot && yes);
    f.set(idx::REQUEST_NO, request_slot && no);

    let cue = has_dontcare_cue(current);
    f.set(idx::DONTCARE_CUE, cue);
    f.set(idx::DONTCARE_ON_SLOT, cue && (desc_in(current) || request_slot));

    let current_tokens = text::tokens(current);
    let cand_tokens = if sentinel { Vec::new() } else { text::tokens(cand) };
    let negated = !cand_tokens.is_empty()
        && current_tokens.windows(cand_tokens.len()).enumerate().any(|(i, w)| {
            w == cand_tokens.as_slice()
                && current_tokens[i.saturating_sub(3)..i]
                    .iter()
                    .any(|t| NEGATIONS.contains(&t.as_str()) || t == "t")
        });
    f.set(idx::NEGATED_VALUE, negated);
    f.set(
        idx::VALUE_EARLIER_USER,
        visible[..t].iter().any(|x| x.speaker == Speaker::User && value_in(&x.utterance)),
    );
    f.set(
        idx::VALUE_SYSTEM,
        visible.iter().any(|x| x.speaker == Speaker::System && value_in(&x.utterance)),
    );
    f.set(idx::SLOT_BOOLEAN, kind == SlotKind::Boolean);
    f.set(idx::SLOT_TEXT, kind == SlotKind::Text);

    f.set(idx::VALUE_OVERLAP + overlap_bucket(&cand_tokens, &current_tokens), true);
    f.set(idx::DESC_OVERLAP + overlap_bucket(&desc_words, &current_tokens), true);

    let history_tokens: usize = visible.iter().map(|x| text::tokens(&x.utterance).len() + 2).sum();
    let len_bucket = match history_tokens {
        0..=19 => 0,
        20..=49 => 1,
        50..=99 => 2,
        100..=199 => 3,
        _ => 4,
    };
    f.set(idx::HISTORY_LEN + len_bucket, true);
    f.set(idx::CAND_LEN + cand_tokens.len().clamp(1, 3) - 1, true);
    let nc_bucket = match input.num_candidates {
        0..=4 => 0,
        5..=8 => 1,
        _ => 2,
    };
    f.set(idx::NUM_CANDIDATES + nc_bucket, true);
    f.set(idx::BIAS, true);
    f.set(idx::TRUE_YES, cand == "True" && yes && acted_on_slot);
    f.set(idx::FALSE_NO, cand == "False" && no && acted_on_slot);

    Ok(f)
}

/// The layout as a markdown table.
pub fn layout_markdown() -> String {
    let mut out = String::from("| index | name | definition |\n|---|---|---|\n");
    for (i, (name, def)) in FEATURES.iter().enumerate() {
        out.push_str(&alloc::format!("| {i} | `{name}` | {def} |\n"));
    }
    out
}

/// Names of the active features, for debugging output.
pub fn active_names(f: &WideFeatureVector) -> Vec<String> {
    f.values
        .iter()
        .zip(FEATURES.iter())
        .filter(|(v, _)| **v == 1)
        .map(|(_, (n, _))| n.to_string())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::{frame, turn};
    use crate::corpus::Action;
    use crate::schema::candidate_values;
    use alloc::vec;

    fn features(turns: &[Turn], slot: &SlotDef, candidate: &str, lex: &SynonymLexicon) -> WideFeatureVector {
        let requested = BTreeSet::new();
        extract_wide_features(&FeatureInput {
            turns,
            turn_idx: turns.len() - 1,
            service: "Svc",
            slot,
            candidate,
            num_candidates: candidate_values(slot).unwrap().len(),
            lexicon: lex,
            requested_slots: &requested,
        })
        .unwrap()
    }

    #[test]
    fn layout_has_unique_names() {
        let names: BTreeSet<&str> = FEATURES.iter().map(|(n, _)| *n).collect();
        assert_eq!(names.len(), NUM_FEATURES);
        assert_eq!(FEATURES[idx::BIAS].0, "bias");
        assert_eq!(FEATURES[idx::FALSE_NO].0, "false_no_after_system");
        assert_eq!(FEATURES[idx::NUM_CANDIDATES].0, "num_candidates_le4");
        assert_eq!(FEATURES[idx::HISTORY_LEN].0, "history_len_lt20");
    }

    #[test]
    fn interrogative_tone() {
        let slot = SlotDef::new("free_entry", "Whether entrance to attraction is free", &["True", "False"]);
        let turns = vec![turn(Speaker::User, "Is the entrance free?", vec![])];
        let f = features(&turns, &slot, "True", &SynonymLexicon::new());
        assert!(f.get("tone_interrogative"));
        assert!(!f.get("tone_declarative"));
        assert!(f.get("desc_current_user"));
        assert_eq!(f.values.len(), NUM_FEATURES);
    }

    #[test]
    fn sentinel_candidates() {
        let slot = SlotDef::new("event_type", "Type of event", &["Theater", "Music"]);
        let turns = vec![turn(Speaker::User, "dontcare unknown theater", vec![])];
        let f = features(&turns, &slot, "dontcare", &SynonymLexicon::new());
        assert!(f.get("cand_dontcare"));
        assert!(!f.get("value_current_user") && !f.get("value_anywhere"));
        assert!(!f.get("cand_in_schema"));
        let f = features(&turns, &slot, "Theater", &SynonymLexicon::new());
        assert!(f.get("value_current_user") && f.get("cand_in_schema"));
    }

    #[test]
    fn synonym_match() {
        let slot = SlotDef::new("event_type", "Type of event", &["Theater", "Music"]);
        let lex = SynonymLexicon::parse("theater\tbroadway\tbacktrans\t1\n").unwrap();
        let turns = vec![turn(Speaker::User, "any broadway show", vec![])];
        let f = features(&turns, &slot, "Theater", &lex);
        assert!(f.get("value_syn_current_user"));
        assert!(!f.get("value_current_user"));
        let f = features(&turns, &slot, "Music", &lex);
        assert!(!f.get("value_syn_current_user"));
    }

    #[test]
    fn system_actions_and_yes() {
        let slot = SlotDef::new("direct", "Whether the flight is direct", &["True", "False"]);
        let turns = vec![
            turn(Speaker::User, "book a flight", vec![]),
            turn(
                Speaker::System,
                "Shall I go ahead?",
                vec![frame("Svc", None, vec![Action::new("CONFIRM", Some("direct"), &["True"])])],
            ),
            turn(Speaker::User, "Yes, please.", vec![]),
        ];
        let f = features(&turns, &slot, "True", &SynonymLexicon::new());
        assert!(f.get("sys_confirm_slot") && f.get("sys_confirm_value"));
        assert!(f.get("user_yes") && f.get("confirm_value_yes") && f.get("true_yes_after_system"));
        assert!(f.get("turn_1"));
        let f = features(&turns, &slot, "False", &SynonymLexicon::new());
        assert!(f.get("sys_confirm_slot") && !f.get("sys_confirm_value"));
    }

    #[test]
    fn non_user_turn_rejected() {
        let slot = SlotDef::new("direct", "d", &["True", "False"]);
        let turns = vec![turn(Speaker::User, "a", vec![]), turn(Speaker::System, "b", vec![])];
        let requested = BTreeSet::new();
        let lex = SynonymLexicon::new();
        let input = FeatureInput {
            turns: &turns,
            turn_idx: 1,
            service: "Svc",
            slot: &slot,
            candidate: "True",
            num_candidates: 4,
            lexicon: &lex,
            requested_slots: &requested,
        };
        assert!(extract_wide_features(&input).is_err());
    }

    #[test]
    fn negation_and_tone() {
        assert!(is_negative("I don't need a direct flight"));
        assert!(is_negative("no thanks"));
        assert!(!is_negative("that sounds great"));
        assert!(says_no("No, not that one"));
        assert!(says_yes("yeah that works"));
        assert!(is_interrogative("what time is it"));
        assert!(has_dontcare_cue("it doesn't matter to me"));
    }
}
