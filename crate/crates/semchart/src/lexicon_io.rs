//! The JSON lexicon file format.
//!
//! ```json
//! {
//!   "meta": { "ontology_note": "..." },
//!   "icons": {
//!     "cat":   { "gloss": "cat", "intrinsic": { "animate": 1, "human": -1 } },
//!     "drink": { "gloss": "to drink", "intrinsic": { "process": 1 },
//!                "cases": [ { "case": "agent",  "select": { "animate": 1 } },
//!                           { "case": "object", "select": { "liquid": 1 } } ] }
//!   }
//! }
//! ```
//!
//! A feature value is either `{ "v": number, "kind": "int" | "real" }` or a
//! bare number: an integer literal is an integer value (and must be `±1`), a
//! decimal literal is real.

use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use semchart_core::lexicon::{
    CaseSlot, Feature, FeatureSet, FeatureValue, LexEntry, Lexicon, LexiconError, ValueKind,
};
use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Number, Value};

/// Lexicons shipped with the crate, addressable by name.
pub const BUILTIN: [(&str, &str); 2] = [
    ("micro", include_str!("../lexicons/micro.json")),
    ("demo", include_str!("../lexicons/demo.json")),
];

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read lexicon `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Invalid(#[from] LexiconError),
}

/// Map entries in document order, duplicates kept so validation can name them.
struct Pairs<V>(Vec<(String, V)>);

impl<V> Default for Pairs<V> {
    fn default() -> Self {
        Pairs(Vec::new())
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Pairs<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairsVisitor<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for PairsVisitor<V> {
            type Value = Pairs<V>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut pairs = Vec::new();
                while let Some(entry) = map.next_entry()? {
                    pairs.push(entry);
                }
                Ok(Pairs(pairs))
            }
        }

        deserializer.deserialize_map(PairsVisitor(PhantomData))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    icons: Pairs<RawIcon>,
    #[serde(default)]
    meta: Option<Map<String, Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIcon {
    #[serde(default)]
    gloss: Option<String>,
    #[serde(default)]
    intrinsic: Pairs<RawValue>,
    #[serde(default)]
    cases: Vec<RawCase>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    case: String,
    select: Pairs<RawValue>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawKind {
    Int,
    Real,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawValue {
    Short(Number),
    Full { v: f64, kind: RawKind },
}

fn feature_value(entry: &str, path: &str, raw: RawValue) -> Result<FeatureValue, LexiconError> {
    let (magnitude, kind) = match raw {
        RawValue::Short(n) => {
            let kind = if n.is_f64() { ValueKind::Real } else { ValueKind::Integer };
            (n.as_f64().unwrap_or(f64::NAN), kind)
        }
        RawValue::Full { v, kind: RawKind::Int } => (v, ValueKind::Integer),
        RawValue::Full { v, kind: RawKind::Real } => (v, ValueKind::Real),
    };
    FeatureValue::new(magnitude, kind).map_err(|e| LexiconError::from_value(entry, path, e))
}

fn feature_set(entry: &str, path: &str, pairs: Pairs<RawValue>) -> Result<FeatureSet, LexiconError> {
    let mut set = FeatureSet::new();
    for (attribute, raw) in pairs.0 {
        let at = format!("{path}.{attribute}");
        let value = feature_value(entry, &at, raw)?;
        set.insert(Feature::new(attribute, value))
            .map_err(|e| LexiconError::from_feature_set(entry, &at, e))?;
    }
    Ok(set)
}

/// Parses and validates a lexicon document.
pub fn load_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: RawDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        LexiconError::Malformed {
            path: if path == "." || path == "?" { format!("line {} column {}", inner.line(), inner.column()) } else { path },
            message: inner.to_string(),
        }
    })?;

    let mut entries = Vec::with_capacity(doc.icons.0.len());
    for (id, icon) in doc.icons.0 {
        let base = format!("icons.{id}");
        let intrinsic = feature_set(&id, &format!("{base}.intrinsic"), icon.intrinsic)?;
        let mut entry = LexEntry::new(id.clone(), icon.gloss.unwrap_or_else(|| id.clone()), intrinsic);
        for (i, case) in icon.cases.into_iter().enumerate() {
            let select = feature_set(&id, &format!("{base}.cases[{i}].select"), case.select)?;
            entry = entry.with_case(CaseSlot::new(case.case, select));
        }
        entries.push(entry);
    }
    let mut lexicon = Lexicon::new(entries)?;
    if let Some(note) = doc.meta.as_ref().and_then(|m| m.get("ontology_note")).and_then(Value::as_str) {
        lexicon.ontology_note = note.to_string();
    }
    Ok(lexicon)
}

/// Loads a built-in lexicon by name, or a file by path. An existing file
/// shadows a built-in of the same name.
pub fn resolve_lexicon(name_or_path: &str) -> Result<Lexicon, LoadError> {
    let path = Path::new(name_or_path);
    if !path.exists() {
        if let Some((_, text)) = BUILTIN.iter().find(|(name, _)| *name == name_or_path) {
            return Ok(load_lexicon(text)?);
        }
    }
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: name_or_path.to_string(), source })?;
    Ok(load_lexicon(&text)?)
}

/// Serialized form of one value: integers as bare `±1`, reals as decimals.
pub fn value_to_json(value: &FeatureValue) -> Value {
    match value.kind() {
        ValueKind::Integer => json!(value.magnitude() as i64),
        ValueKind::Real => json!(value.magnitude()),
    }
}

pub fn feature_set_to_json(set: &FeatureSet) -> Value {
    Value::Object(set.iter().map(|f| (f.attribute.clone(), value_to_json(&f.value))).collect())
}

/// Canonical document: icons by id, attributes by name, cases in frame order.
pub fn lexicon_to_json(lexicon: &Lexicon) -> Value {
    let icons: Map<String, Value> = lexicon
        .entries()
        .map(|e| {
            let mut icon = Map::new();
            icon.insert("gloss".into(), json!(e.gloss));
            icon.insert("intrinsic".into(), feature_set_to_json(&e.intrinsic));
            if e.is_predicative() {
                let cases = e
                    .case_structure
                    .iter()
                    .map(|c| json!({ "case": c.case_type, "select": feature_set_to_json(&c.selectional) }))
                    .collect();
                icon.insert("cases".into(), Value::Array(cases));
            }
            (e.id.clone(), Value::Object(icon))
        })
        .collect();
    json!({ "meta": { "ontology_note": lexicon.ontology_note }, "icons": icons })
}

pub fn serialize_lexicon(lexicon: &Lexicon) -> String {
    let mut text = serde_json::to_string_pretty(&lexicon_to_json(lexicon)).expect("JSON values serialize");
    text.push('\n');
    text
}
