//! English number words and digit mentions for the values 0 to 100.
//!
//! Numerical slot values are stored as Arabic numerals but may be mentioned
//! either way ("two" or "2"). [`numeral_mentions`] scans a string for both
//! surface forms, [`restore_numeric_span`] locates a given value and
//! [`to_arabic`] converts a mention back to digits.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::bail;
use crate::Result;

pub const MAX_VALUE: u32 = 100;

const UNITS: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
];

const TENS: [&str; 8] = ["twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];

/// A number found in text: byte range plus its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumeralMention {
    pub span: Range<usize>,
    pub value: u32,
}

/// English rendering of `n` (0 to 100), hyphenating compounds.
pub fn number_to_words(n: u32) -> Option<String> {
    match n {
        0..=19 => Some(UNITS[n as usize].to_string()),
        20..=99 => {
            let tens = TENS[(n / 10 - 2) as usize];
            Some(match n % 10 {
                0 => tens.to_string(),
                u => alloc::format!("{tens}-{}", UNITS[u as usize]),
            })
        }
        100 => Some("one hundred".to_string()),
        _ => None,
    }
}

fn unit_value(word: &str) -> Option<u32> {
    UNITS.iter().position(|u| *u == word).map(|i| i as u32)
}

fn tens_value(word: &str) -> Option<u32> {
    TENS.iter().position(|t| *t == word).map(|i| (i as u32 + 2) * 10)
}

struct Word<'a> {
    text: &'a str,
    span: Range<usize>,
}

/// Alphanumeric runs with their byte ranges.
fn words(text: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            out.push(Word { text: &text[s..i], span: s..i });
        }
    }
    if let Some(s) = start {
        out.push(Word { text: &text[s..], span: s..text.len() });
    }
    out
}

/// Whether the gap between two words is a single space or hyphen.
fn joined(text: &str, left: &Range<usize>, right: &Range<usize>) -> bool {
    matches!(&text[left.end..right.start], " " | "-")
}

/// All numeral mentions, left to right and non-overlapping. Compounds such as
/// "twenty-one", "twenty one" and "one hundred" are read as a single mention.
pub fn numeral_mentions(text: &str) -> Vec<NumeralMention> {
    let words = words(text);
    let lower: Vec<String> = words.iter().map(|w| w.text.to_lowercase()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let w = &lower[i];
        let next_joined = |j: usize| j + 1 < words.len() && joined(text, &words[j].span, &words[j + 1].span);

        if w.bytes().all(|b| b.is_ascii_digit()) {
            // decimals and digit groups with letters glued on are not counts
            let glued_decimal = text[words[i].span.end..].starts_with('.')
                && text[words[i].span.end + 1..].starts_with(|c: char| c.is_ascii_digit());
            if !glued_decimal && w.len() <= 3 {
                if let Ok(value) = w.parse::<u32>() {
                    if value <= MAX_VALUE {
                        out.push(NumeralMention { span: words[i].span.clone(), value });
                    }
                }
            }
            i += 1;
            continue;
        }
        if let Some(tens) = tens_value(w) {
            if next_joined(i) {
                if let Some(u) = unit_value(&lower[i + 1]).filter(|u| (1..=9).contains(u)) {
                    out.push(NumeralMention { span: words[i].span.start..words[i + 1].span.end, value: tens + u });
                    i += 2;
                    continue;
                }
            }
            out.push(NumeralMention { span: words[i].span.clone(), value: tens });
            i += 1;
            continue;
        }
        if let Some(u) = unit_value(w) {
            if u == 1 && next_joined(i) && lower[i + 1] == "hundred" {
                out.push(NumeralMention { span: words[i].span.start..words[i + 1].span.end, value: 100 });
                i += 2;
                continue;
            }
            out.push(NumeralMention { span: words[i].span.clone(), value: u });
            i += 1;
            continue;
        }
        if w == "hundred" {
            out.push(NumeralMention { span: words[i].span.clone(), value: 100 });
        }
        i += 1;
    }
    out
}

fn parse_value(value: &str) -> Result<u32> {
    match value.trim().parse::<i64>() {
        Ok(v) if (0..=MAX_VALUE as i64).contains(&v) => Ok(v as u32),
        Ok(v) => bail!(Unsupported, "numeric value {v} outside 0..={MAX_VALUE}"),
        Err(_) => bail!(Unsupported, "`{value}` is not an integer"),
    }
}

/// Byte span of the first mention of `value` in `utterance`, as digits or as
/// English words.
pub fn restore_numeric_span(utterance: &str, value: &str) -> Result<Option<Range<usize>>> {
    let target = parse_value(value)?;
    Ok(numeral_mentions(utterance)
        .into_iter()
        .find(|m| m.value == target)
        .map(|m| m.span))
}

/// Byte span of the last mention of `value`.
pub fn last_numeric_span(utterance: &str, value: &str) -> Result<Option<Range<usize>>> {
    let target = parse_value(value)?;
    Ok(numeral_mentions(utterance)
        .into_iter()
        .rev()
        .find(|m| m.value == target)
        .map(|m| m.span))
}

/// Arabic-numeral form of a mention such as "two", "Twenty-one" or "7".
pub fn to_arabic(mention: &str) -> Option<String> {
    let trimmed = mention.trim();
    let found = numeral_mentions(trimmed);
    match found.as_slice() {
        [m] if m.span == (0..trimmed.len()) => Some(m.value.to_string()),
        _ => None,
    }
}
