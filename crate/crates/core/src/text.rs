//! Offset-preserving tokenization and phone-number masking.
//!
//! All offsets are byte offsets into the original string.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

/// Replacement for masked phone numbers.
pub const PHONE_TAG: &str = "phone";
const PHONE_MIN_DIGITS: usize = 7;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TokenizedContext {
    pub text: String,
    pub tokens: Vec<String>,
    pub offsets: Vec<(usize, usize)>,
    /// First token index of the question/pair segment. Equal to
    /// `tokens.len()` when the context carries no second segment.
    pub segment_boundary: usize,
}

impl TokenizedContext {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Original text covered by tokens `start..=end`.
    pub fn span_text(&self, start: usize, end: usize) -> &str {
        &self.text[self.offsets[start].0..self.offsets[end].1]
    }

    pub fn span_bytes(&self, start: usize, end: usize) -> Range<usize> {
        self.offsets[start].0..self.offsets[end].1
    }

    /// Smallest token span covering the byte range, if any token overlaps it.
    pub fn token_span(&self, range: Range<usize>) -> Option<(usize, usize)> {
        let start = self
            .offsets
            .iter()
            .position(|&(s, e)| e > range.start && s < range.end)?;
        let end = self
            .offsets
            .iter()
            .rposition(|&(s, e)| e > range.start && s < range.end)?;
        Some((start, end))
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Lowercased tokens split on whitespace, with every other non-alphanumeric
/// character as its own token.
pub fn tokenize_with_offsets(text: &str) -> TokenizedContext {
    let mut tokens = Vec::new();
    let mut offsets = Vec::new();
    let mut word_start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if is_word_char(c) {
            word_start.get_or_insert(i);
            continue;
        }
        if let Some(s) = word_start.take() {
            tokens.push(text[s..i].to_lowercase());
            offsets.push((s, i));
        }
        if !c.is_whitespace() {
            let e = i + c.len_utf8();
            tokens.push(text[i..e].to_lowercase());
            offsets.push((i, e));
        }
    }
    if let Some(s) = word_start {
        tokens.push(text[s..].to_lowercase());
        offsets.push((s, text.len()));
    }
    let boundary = tokens.len();
    TokenizedContext {
        text: text.to_string(),
        tokens,
        offsets,
        segment_boundary: boundary,
    }
}

/// Lowercased tokens only.
pub fn tokens(text: &str) -> Vec<String> {
    tokenize_with_offsets(text).tokens
}

/// Lowercase and collapse runs of whitespace to single spaces.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&word.to_lowercase());
    }
    out
}

fn is_phone_separator(c: char) -> bool {
    matches!(c, '-' | ' ' | '(' | ')')
}

/// Byte ranges that [`mask_phone_numbers`] replaces.
pub fn phone_spans(text: &str) -> Vec<Range<usize>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !(chars[i].1.is_ascii_digit() || is_phone_separator(chars[i].1)) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && (chars[i].1.is_ascii_digit() || is_phone_separator(chars[i].1)) {
            i += 1;
        }
        let run = &chars[run_start..i];
        let digits = run.iter().filter(|(_, c)| c.is_ascii_digit()).count();
        if digits < PHONE_MIN_DIGITS {
            continue;
        }
        let first = run.iter().position(|(_, c)| c.is_ascii_digit()).unwrap();
        let last = run.iter().rposition(|(_, c)| c.is_ascii_digit()).unwrap();
        let mut lo = first;
        let mut hi = last;
        // (415) 555-0132: keep the parenthesised area code inside the mask
        if lo > 0 && run[lo - 1].1 == '(' {
            lo -= 1;
        }
        if hi + 1 < run.len() && run[hi + 1].1 == ')' {
            hi += 1;
        }
        let start = run[lo].0;
        let end = run[hi].0 + run[hi].1.len_utf8();
        spans.push(start..end);
    }
    spans
}

/// Replaces every phone-like digit group (7 or more digits, optionally
/// separated by `-`, spaces or parentheses) with the word `phone`.
pub fn mask_phone_numbers(text: &str) -> String {
    let spans = phone_spans(text);
    if spans.is_empty() {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for span in spans {
        out.push_str(&text[cursor..span.start]);
        out.push_str(PHONE_TAG);
        cursor = span.end;
    }
    out.push_str(&text[cursor..]);
    out
}

/// Maps a byte offset of the unmasked text to the masked text. Offsets inside
/// a masked region clamp to the region's replacement.
pub fn masked_offset(spans: &[Range<usize>], offset: usize) -> usize {
    let mut shift: isize = 0;
    for span in spans {
        if offset >= span.end {
            shift += PHONE_TAG.len() as isize - span.len() as isize;
        } else if offset > span.start {
            return (span.start as isize + shift) as usize + PHONE_TAG.len().min(offset - span.start);
        }
    }
    (offset as isize + shift) as usize
}

/// Inverse of [`masked_offset`]. Offsets inside a replacement map to the
/// start of the phone span, or to its end when `round_up` is set.
pub fn unmasked_offset(spans: &[Range<usize>], offset: usize, round_up: bool) -> usize {
    let mut shift: isize = 0;
    for span in spans {
        let start = (span.start as isize + shift) as usize;
        let end = start + PHONE_TAG.len();
        if offset >= end {
            shift += span.len() as isize - PHONE_TAG.len() as isize;
        } else if offset > start {
            return if round_up { span.end } else { span.start };
        } else {
            break;
        }
    }
    (offset as isize + shift) as usize
}

/// Converts a char (code point) offset into a byte offset. Offsets past the
/// end map to `text.len()`.
pub fn char_to_byte(text: &str, char_offset: usize) -> usize {
    text.char_indices()
        .nth(char_offset)
        .map(|(b, _)| b)
        .unwrap_or(text.len())
}

pub fn byte_to_char(text: &str, byte_offset: usize) -> usize {
    text[..byte_offset].chars().count()
}

/// Byte ranges of case-insensitive occurrences of `needle` in `haystack`
/// that start and end on word boundaries.
pub fn find_word_occurrences(haystack: &str, needle: &str) -> Vec<Range<usize>> {
    let needle = needle.trim();
    if needle.is_empty() {
        return Vec::new();
    }
    let hay = haystack.to_lowercase();
    let pat = needle.to_lowercase();
    // lowercasing can change byte lengths outside ASCII; fall back to exact
    // matching in that case so offsets stay valid.
    let (hay, pat) = if hay.len() == haystack.len() && pat.len() == needle.len() {
        (hay, pat)
    } else {
        (haystack.to_string(), needle.to_string())
    };
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(pos) = hay[from..].find(&pat) {
        let start = from + pos;
        let end = start + pat.len();
        let before_ok = hay[..start].chars().next_back().is_none_or(|c| !is_word_char(c));
        let after_ok = hay[end..].chars().next().is_none_or(|c| !is_word_char(c));
        if before_ok && after_ok {
            out.push(start..end);
        }
        from = start + hay[start..].chars().next().map_or(1, char::len_utf8);
    }
    out
}

/// Whether `needle` occurs in `haystack` as a whole-word phrase, ignoring case.
pub fn contains_phrase(haystack: &str, needle: &str) -> bool {
    !find_word_occurrences(haystack, needle).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_with_original_offsets() {
        let t = tokenize_with_offsets("San Jose!");
        assert_eq!(t.tokens, ["san", "jose", "!"]);
        assert_eq!(t.offsets, [(0, 3), (4, 8), (8, 9)]);
        assert_eq!(t.segment_boundary, 3);
    }

    #[test]
    fn empty_input_has_no_tokens() {
        let t = tokenize_with_offsets("");
        assert!(t.tokens.is_empty());
        assert!(t.offsets.is_empty());
    }

    #[test]
    fn punctuation_splits_tokens() {
        let t = tokenize_with_offsets("at 11:30, don't");
        assert_eq!(t.tokens, ["at", "11", ":", "30", ",", "don", "'", "t"]);
    }

    #[test]
    fn token_span_covers_byte_range() {
        let t = tokenize_with_offsets("User: I want San Jose now");
        let start = t.text.find("San Jose").unwrap();
        assert_eq!(t.token_span(start..start + 8), Some((4, 5)));
        assert_eq!(t.span_text(4, 5), "San Jose");
    }

    #[test]
    fn masks_phone_numbers() {
        assert_eq!(mask_phone_numbers("call 415-555-0132 now"), "call phone now");
        assert_eq!(mask_phone_numbers("call (415) 555-0132."), "call phone.");
        assert_eq!(mask_phone_numbers("rated 4 stars for 2 people"), "rated 4 stars for 2 people");
        assert_eq!(mask_phone_numbers("ref 1234 and 5678"), "ref 1234 and 5678");
        assert_eq!(mask_phone_numbers("4155550132"), "phone");
    }

    #[test]
    fn masked_offsets_shift_past_replacements() {
        let text = "call 415-555-0132 at 5";
        let spans = phone_spans(text);
        let masked = mask_phone_numbers(text);
        let five = text.rfind('5').unwrap();
        assert_eq!(&masked[masked_offset(&spans, five)..], "5");
        assert_eq!(masked_offset(&spans, 2), 2);
    }

    #[test]
    fn unmasked_offsets_invert_masking() {
        let text = "call 415-555-0132 at 5";
        let spans = phone_spans(text);
        let masked = mask_phone_numbers(text);
        let tag = masked.find(PHONE_TAG).unwrap();
        assert_eq!(&text[unmasked_offset(&spans, tag, false)..unmasked_offset(&spans, tag + 5, true)], "415-555-0132");
        for off in [0, 2, text.len() - 1, text.len()] {
            assert_eq!(unmasked_offset(&spans, masked_offset(&spans, off), false), off);
        }
    }

    #[test]
    fn word_occurrences_respect_boundaries() {
        let s = "the theater in Theatre town, theater!";
        let hits = find_word_occurrences(s, "Theater");
        assert_eq!(hits.len(), 2);
        assert!(find_word_occurrences("theaters", "theater").is_empty());
        assert!(contains_phrase("any Broadway show", "broadway"));
    }

    #[test]
    fn char_and_byte_offsets_convert() {
        let s = "café au lait";
        assert_eq!(char_to_byte(s, 5), 6);
        assert_eq!(byte_to_char(s, 6), 5);
        assert_eq!(char_to_byte(s, 100), s.len());
    }

    #[test]
    fn normalize_collapses_whitespace() {
        assert_eq!(normalize("  San\t Jose \n"), "san jose");
    }
}
