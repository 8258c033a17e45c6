//! Task ontology: services, intents and slots, plus slot routing.
//!
//! Every slot falls into exactly one [`SlotKind`]. Non-categorical slots and
//! categorical slots whose values are all integers are answered by the span
//! head; boolean and other categorical slots are ranked by the wide-and-deep
//! head over their value list extended with `dontcare` and `unknown`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::bail;
use crate::{Result, DONTCARE, UNKNOWN};

/// Fields present in the input but not modelled here. Kept so that files
/// round-trip, otherwise ignored.
pub type Extra = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema {
    pub services: Vec<ServiceDef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceDef {
    #[serde(rename = "service_name")]
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub slots: Vec<SlotDef>,
    #[serde(default)]
    pub intents: Vec<IntentDef>,
    #[serde(flatten)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotDef {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub is_categorical: bool,
    #[serde(default)]
    pub possible_values: Vec<String>,
    #[serde(flatten)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentDef {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub required_slots: Vec<String>,
    #[serde(default)]
    pub optional_slots: Vec<String>,
    #[serde(default)]
    pub is_transactional: bool,
    #[serde(flatten)]
    pub extra: Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SlotKind {
    Span,
    Numerical,
    Boolean,
    Text,
}

impl SlotKind {
    /// Span and numerical slots go through the span head.
    pub fn is_extractive(self) -> bool {
        matches!(self, SlotKind::Span | SlotKind::Numerical)
    }
}

impl SlotDef {
    pub fn new(name: &str, description: &str, values: &[&str]) -> Self {
        SlotDef {
            name: name.into(),
            description: description.into(),
            is_categorical: !values.is_empty(),
            possible_values: values.iter().map(|v| (*v).into()).collect(),
            extra: Extra::new(),
        }
    }

    pub fn kind(&self) -> SlotKind {
        classify_slot(self)
    }
}

impl IntentDef {
    pub fn new(name: &str, description: &str, required: &[&str], optional: &[&str]) -> Self {
        IntentDef {
            name: name.into(),
            description: description.into(),
            required_slots: required.iter().map(|s| (*s).into()).collect(),
            optional_slots: optional.iter().map(|s| (*s).into()).collect(),
            is_transactional: false,
            extra: Extra::new(),
        }
    }
}

impl ServiceDef {
    pub fn new(name: &str, description: &str, slots: Vec<SlotDef>, intents: Vec<IntentDef>) -> Self {
        ServiceDef {
            name: name.into(),
            description: description.into(),
            slots,
            intents,
            extra: Extra::new(),
        }
    }

    pub fn slot(&self, name: &str) -> Option<&SlotDef> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn intent(&self, name: &str) -> Option<&IntentDef> {
        self.intents.iter().find(|i| i.name == name)
    }
}

impl Schema {
    pub fn new(services: Vec<ServiceDef>) -> Result<Self> {
        let schema = Schema { services };
        schema.validate()?;
        Ok(schema)
    }

    pub fn service(&self, name: &str) -> Option<&ServiceDef> {
        self.services.iter().find(|s| s.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for service in &self.services {
            if !names.insert(service.name.as_str()) {
                bail!(Validation, "duplicate service `{}`", service.name);
            }
            let mut slots = BTreeSet::new();
            for slot in &service.slots {
                if !slots.insert(slot.name.as_str()) {
                    bail!(Validation, "service `{}`: duplicate slot `{}`", service.name, slot.name);
                }
                if slot.is_categorical && slot.possible_values.is_empty() {
                    bail!(
                        Validation,
                        "service `{}`: categorical slot `{}` has no possible values",
                        service.name,
                        slot.name
                    );
                }
                if !slot.is_categorical && !slot.possible_values.is_empty() {
                    bail!(
                        Validation,
                        "service `{}`: non-categorical slot `{}` lists possible values",
                        service.name,
                        slot.name
                    );
                }
            }
            let mut intents = BTreeSet::new();
            for intent in &service.intents {
                if !intents.insert(intent.name.as_str()) {
                    bail!(Validation, "service `{}`: duplicate intent `{}`", service.name, intent.name);
                }
                for name in intent.required_slots.iter().chain(&intent.optional_slots) {
                    if !slots.contains(name.as_str()) {
                        bail!(
                            Validation,
                            "service `{}`: intent `{}` references undefined slot `{}`",
                            service.name,
                            intent.name,
                            name
                        );
                    }
                }
                if let Some(dup) = intent
                    .required_slots
                    .iter()
                    .find(|s| intent.optional_slots.contains(s))
                {
                    bail!(
                        Validation,
                        "service `{}`: intent `{}` lists `{}` as both required and optional",
                        service.name,
                        intent.name,
                        dup
                    );
                }
            }
        }
        Ok(())
    }
}

/// Routes a slot to its kind. Total and deterministic.
pub fn classify_slot(slot: &SlotDef) -> SlotKind {
    if !slot.is_categorical {
        return SlotKind::Span;
    }
    let values = &slot.possible_values;
    if !values.is_empty() && values.iter().all(|v| v == "True" || v == "False") {
        SlotKind::Boolean
    } else if !values.is_empty() && values.iter().all(|v| v.trim().parse::<i64>().is_ok()) {
        SlotKind::Numerical
    } else {
        SlotKind::Text
    }
}

/// Candidate list for a ranked slot: the schema values followed by the two
/// sentinels, skipping a sentinel the schema already lists.
pub fn candidate_values(slot: &SlotDef) -> Result<Vec<String>> {
    let kind = classify_slot(slot);
    if kind.is_extractive() {
        bail!(
            Usage,
            "slot `{}` is {:?}; candidates exist only for boolean and text slots",
            slot.name,
            kind
        );
    }
    let mut out = slot.possible_values.clone();
    for sentinel in [DONTCARE, UNKNOWN] {
        if !out.iter().any(|v| v == sentinel) {
            out.push(sentinel.into());
        }
    }
    Ok(out)
}
