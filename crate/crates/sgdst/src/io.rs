//! Readers and writers for schemas, dialogue corpora, lexicons, provider
//! caches and reset rules.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sgdst_core::augment::{CachedProvider, ProviderKind, SynonymLexicon};
use sgdst_core::corpus::Dialogue;
use sgdst_core::schema::Schema;
use sgdst_core::tracker::{self, ResetRule};

use crate::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.into(), source })?;
    }
    fs::write(path, text).map_err(|source| Error::Io { path: path.into(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json { path: path.into(), source })?;
    text.push('\n');
    write_text(path, &text)
}

fn model_err(path: &Path) -> impl FnOnce(sgdst_core::Error) -> Error + '_ {
    move |source| Error::Model { path: path.into(), source }
}

/// A schema file: a JSON list of service definitions.
pub fn load_schema(path: &Path) -> Result<Schema> {
    let schema: Schema = read_json(path)?;
    schema.validate().map_err(model_err(path))?;
    Ok(schema)
}

/// JSON files holding dialogues under `path`: the file itself, or every
/// `*.json` file of a directory except `schema.json`, in name order.
pub fn dialogue_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = fs::read_dir(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io { path: path.into(), source })?;
        let p = entry.path();
        if p.extension().is_some_and(|e| e == "json") && p.file_name().is_some_and(|n| n != "schema.json") {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads and validates every dialogue under `path` (a file holding a list of
/// dialogues, or a directory of such files).
pub fn load_dialogues(path: &Path, schema: &Schema) -> Result<Vec<Dialogue>> {
    let mut out = Vec::new();
    for file in dialogue_files(path)? {
        let dialogues: Vec<Dialogue> = read_json(&file)?;
        for d in &dialogues {
            d.validate(schema).map_err(model_err(&file))?;
        }
        out.extend(dialogues);
    }
    Ok(out)
}

pub fn write_dialogues(path: &Path, dialogues: &[Dialogue]) -> Result<()> {
    write_json(path, &dialogues)
}

pub fn load_lexicon(path: &Path) -> Result<SynonymLexicon> {
    SynonymLexicon::parse(&read_text(path)?).map_err(model_err(path))
}

pub fn write_lexicon(path: &Path, lexicon: &SynonymLexicon) -> Result<()> {
    write_text(path, &lexicon.to_tsv())
}

pub fn load_provider(path: &Path, name: &str, kind: ProviderKind) -> Result<CachedProvider> {
    CachedProvider::parse(name, kind, &read_text(path)?).map_err(model_err(path))
}

/// A rules file: a JSON list of `{service, trigger}` records.
pub fn load_rules(path: &Path, schema: &Schema) -> Result<Vec<ResetRule>> {
    let rules: Vec<ResetRule> = read_json(path)?;
    tracker::validate_rules(&rules, schema).map_err(model_err(path))?;
    Ok(rules)
}
