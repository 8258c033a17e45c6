//! Synonym lexicon used by the wide features, and the providers that expand
//! terms into synonyms (synonym services, back translation).
//!
//! Providers here are cache-backed: expansions are fetched offline and stored
//! in the same tab-separated format as the lexicon itself,
//!
//! ```text
//! term<TAB>synonym<TAB>source<TAB>score
//! ```
//!
//! Blank lines and lines starting with `#` are ignored, except the directive
//! `#!symmetric`, which makes lookups symmetric. In a provider cache an empty
//! synonym field records a term the provider knows but has no expansions for.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::bail;
use crate::schema::{classify_slot, Schema, SlotKind};
use crate::text::{self, normalize};
use crate::{Error, Result};

pub const DEFAULT_K: usize = 10;
pub const SYMMETRIC_DIRECTIVE: &str = "#!symmetric";

const STOPWORDS: &[&str] = &[
    "a", "about", "an", "and", "any", "are", "as", "at", "be", "been", "by", "can", "do", "does", "for", "from",
    "has", "have", "how", "if", "in", "into", "is", "it", "its", "not", "of", "on", "or", "that", "the", "their",
    "there", "this", "to", "was", "were", "what", "when", "where", "whether", "which", "who", "will", "with",
    "would", "you", "your",
];

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.contains(&word)
}

/// Lowercased non-stopword alphanumeric tokens of three or more characters.
pub fn content_words(text: &str) -> Vec<String> {
    text::tokens(text)
        .into_iter()
        .filter(|t| t.chars().count() >= 3 && t.chars().all(char::is_alphanumeric) && !is_stopword(t))
        .collect()
}

/// Serialized as its tab-separated text.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SynonymLexicon {
    entries: BTreeMap<String, BTreeSet<String>>,
    /// synonym -> terms, for symmetric lookup
    reverse: BTreeMap<String, BTreeSet<String>>,
    provenance: BTreeMap<(String, String), BTreeSet<String>>,
    scores: BTreeMap<(String, String), f64>,
    symmetric: bool,
}

/// One parsed line of the tab-separated format.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconLine {
    pub term: String,
    pub synonym: String,
    pub source: String,
    pub score: f64,
}

/// Parses the tab-separated format; returns the lines and whether the
/// symmetric directive was present.
pub fn parse_lines(input: &str) -> Result<(Vec<LexiconLine>, bool)> {
    let mut out = Vec::new();
    let mut symmetric = false;
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim() == SYMMETRIC_DIRECTIVE {
            symmetric = true;
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            bail!(Validation, "line {line_no}: expected 4 tab-separated fields, found {}", fields.len());
        }
        let term = normalize(fields[0]);
        if term.is_empty() {
            bail!(Validation, "line {line_no}: empty term");
        }
        let score: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("line {line_no}: bad score `{}`", fields[3])))?;
        if !score.is_finite() {
            bail!(Validation, "line {line_no}: non-finite score");
        }
        out.push(LexiconLine {
            term,
            synonym: normalize(fields[1]),
            source: fields[2].trim().to_string(),
            score,
        });
    }
    Ok((out, symmetric))
}

impl From<SynonymLexicon> for String {
    fn from(lex: SynonymLexicon) -> String {
        lex.to_tsv()
    }
}

impl TryFrom<String> for SynonymLexicon {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        SynonymLexicon::parse(&s)
    }
}

impl SynonymLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(input: &str) -> Result<Self> {
        let (lines, symmetric) = parse_lines(input)?;
        let mut lex = SynonymLexicon { symmetric, ..Self::default() };
        for l in lines {
            lex.insert(&l.term, &l.synonym, &l.source, l.score);
        }
        Ok(lex)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn set_symmetric(&mut self, symmetric: bool) {
        self.symmetric = symmetric;
    }

    /// Adds a pair; duplicates merge their provenance and keep the best score.
    /// Self-pairs and empty synonyms are dropped.
    pub fn insert(&mut self, term: &str, synonym: &str, source: &str, score: f64) {
        let term = normalize(term);
        let synonym = normalize(synonym);
        if term.is_empty() || synonym.is_empty() || term == synonym {
            return;
        }
        self.entries.entry(term.clone()).or_default().insert(synonym.clone());
        self.reverse.entry(synonym.clone()).or_default().insert(term.clone());
        let key = (term, synonym);
        self.provenance.entry(key.clone()).or_default().insert(source.to_string());
        let best = self.scores.entry(key).or_insert(score);
        if score > *best {
            *best = score;
        }
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Synonyms of a term (normalized lookup).
    pub fn lookup(&self, term: &str) -> BTreeSet<&str> {
        let key = normalize(term);
        let mut out: BTreeSet<&str> = self
            .entries
            .get(&key)
            .into_iter()
            .flatten()
            .map(String::as_str)
            .collect();
        if self.symmetric {
            out.extend(self.reverse.get(&key).into_iter().flatten().map(String::as_str));
        }
        out
    }

    pub fn provenance(&self, term: &str, synonym: &str) -> BTreeSet<&str> {
        self.provenance
            .get(&(normalize(term), normalize(synonym)))
            .into_iter()
            .flatten()
            .map(String::as_str)
            .collect()
    }

    /// Serializes to the tab-separated format, sorted, one line per
    /// (term, synonym, source).
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        if self.symmetric {
            out.push_str(SYMMETRIC_DIRECTIVE);
            out.push('\n');
        }
        for (term, syns) in &self.entries {
            for syn in syns {
                let key = (term.clone(), syn.clone());
                let score = self.scores.get(&key).copied().unwrap_or(0.0);
                for source in self.provenance.get(&key).into_iter().flatten() {
                    out.push_str(&format!("{term}\t{syn}\t{source}\t{score}\n"));
                }
            }
        }
        out
    }

    /// Whether `text` mentions `term` itself as a whole-word phrase.
    pub fn mentions_exact(text: &str, term: &str) -> bool {
        text::contains_phrase(text, term)
    }

    /// Whether `text` mentions any synonym of `term`.
    pub fn mentions_synonym(&self, text: &str, term: &str) -> bool {
        self.lookup(term).iter().any(|s| text::contains_phrase(text, s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderKind {
    SynonymApi,
    BackTranslation,
}

pub trait ExpansionProvider {
    fn name(&self) -> &str;
    fn kind(&self) -> ProviderKind;
    /// Up to `k` expansions, best first.
    fn expand(&self, term: &str, k: usize) -> Result<Vec<String>>;
}

/// Provider answering from a persisted cache of expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedProvider {
    name: String,
    kind: ProviderKind,
    cache: BTreeMap<String, Vec<(String, f64)>>,
}

impl CachedProvider {
    pub fn new(name: &str, kind: ProviderKind) -> Self {
        CachedProvider { name: name.to_string(), kind, cache: BTreeMap::new() }
    }

    /// Loads a cache in the tab-separated format. Expansions are ranked by
    /// descending score, file order breaking ties.
    pub fn parse(name: &str, kind: ProviderKind, input: &str) -> Result<Self> {
        let (lines, _) = parse_lines(input)?;
        let mut p = Self::new(name, kind);
        for l in lines {
            p.add(&l.term, &l.synonym, l.score);
        }
        Ok(p)
    }

    pub fn add(&mut self, term: &str, synonym: &str, score: f64) {
        let list = self.cache.entry(normalize(term)).or_default();
        let synonym = normalize(synonym);
        if !synonym.is_empty() && !list.iter().any(|(s, _)| *s == synonym) {
            list.push((synonym, score));
            // stable: equal scores keep insertion order
            list.sort_by(|a, b| b.1.total_cmp(&a.1));
        }
    }
}

impl ExpansionProvider for CachedProvider {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> ProviderKind {
        self.kind
    }

    fn expand(&self, term: &str, k: usize) -> Result<Vec<String>> {
        let key = normalize(term);
        let list = self.cache.get(&key).ok_or_else(|| Error::CacheMiss {
            provider: self.name.clone(),
            term: key.clone(),
        })?;
        Ok(list.iter().take(k).map(|(s, _)| s.clone()).collect())
    }
}

/// Union of every provider's top-`k` expansions, normalized, without the
/// term itself.
pub fn expand_term(term: &str, providers: &[&dyn ExpansionProvider], k: usize) -> Result<BTreeSet<String>> {
    let key = normalize(term);
    let mut out = BTreeSet::new();
    if k == 0 {
        return Ok(out);
    }
    for p in providers {
        for s in p.expand(&key, k)? {
            let s = normalize(&s);
            if s != key && !s.is_empty() {
                out.insert(s);
            }
        }
    }
    Ok(out)
}

/// Terms the lexicon covers: content words of every slot description and
/// the values of text-kind categorical slots.
pub fn lexicon_terms(schema: &Schema) -> BTreeSet<String> {
    let mut terms = BTreeSet::new();
    for service in &schema.services {
        for slot in &service.slots {
            terms.extend(content_words(&slot.description));
            if classify_slot(slot) == SlotKind::Text {
                terms.extend(slot.possible_values.iter().map(|v| normalize(v)));
            }
        }
    }
    terms
}

/// Expands every schema term with every provider. Errors carry the term.
pub fn build_lexicon(schema: &Schema, providers: &[&dyn ExpansionProvider], k: usize) -> Result<SynonymLexicon> {
    let mut lex = SynonymLexicon::new();
    let mut errors = Vec::new();
    for term in lexicon_terms(schema) {
        if k == 0 {
            continue;
        }
        for p in providers {
            match p.expand(&term, k) {
                Ok(list) => {
                    for (rank, s) in list.iter().enumerate() {
                        lex.insert(&term, s, p.name(), 1.0 / (rank + 1) as f64);
                    }
                }
                Err(e) => errors.push(format!("`{term}`: {e}")),
            }
        }
    }
    if !errors.is_empty() {
        bail!(Validation, "lexicon build failed for {} term(s): {}", errors.len(), errors.join("; "));
    }
    Ok(lex)
}
