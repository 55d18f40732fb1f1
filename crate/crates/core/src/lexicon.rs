//! Icon senses: intrinsic features, case structures and the validated lexicon.
//!
//! Every icon carries a [`FeatureSet`] of attribute/value pairs describing what
//! the concept *is*. Predicative icons additionally carry an ordered case
//! structure: one [`CaseSlot`] per role, each holding the selectional features
//! expected of that role's filler.
//!
//! The feature ontology is flat: attributes are opaque tokens compared by
//! string equality, with no inheritance between them.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Whether a feature value is an integer polarity or a graded real.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    Integer,
    Real,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Integer => "int",
            ValueKind::Real => "real",
        }
    }
}

/// A feature magnitude in `[-1, 1]`. Integer values are restricted to `±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureValue {
    magnitude: f64,
    kind: ValueKind,
}

/// Why a raw magnitude was rejected.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ValueError {
    #[error("magnitude {0} is outside [-1, 1]")]
    OutOfRange(f64),
    #[error("integer value {0} is not +1 or -1")]
    IntegerNotUnit(f64),
}

impl FeatureValue {
    pub fn new(magnitude: f64, kind: ValueKind) -> Result<Self, ValueError> {
        match kind {
            ValueKind::Integer if magnitude != 1.0 && magnitude != -1.0 => {
                Err(ValueError::IntegerNotUnit(magnitude))
            }
            ValueKind::Real if !(-1.0..=1.0).contains(&magnitude) => {
                Err(ValueError::OutOfRange(magnitude))
            }
            _ => Ok(FeatureValue { magnitude, kind }),
        }
    }

    /// `+1` integer.
    pub const fn plus() -> Self {
        FeatureValue { magnitude: 1.0, kind: ValueKind::Integer }
    }

    /// `-1` integer.
    pub const fn minus() -> Self {
        FeatureValue { magnitude: -1.0, kind: ValueKind::Integer }
    }

    pub fn real(magnitude: f64) -> Result<Self, ValueError> {
        Self::new(magnitude, ValueKind::Real)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }
}

/// One attribute/value pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub attribute: String,
    pub value: FeatureValue,
}

impl Feature {
    pub fn new(attribute: impl Into<String>, value: FeatureValue) -> Self {
        Feature { attribute: attribute.into(), value }
    }
}

/// A set of features with pairwise-distinct attributes, kept sorted by
/// attribute token.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSet {
    features: Vec<Feature>,
}

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set, rejecting empty or repeated attributes.
    ///
    /// On failure the offending attribute is returned.
    pub fn from_features(
        features: impl IntoIterator<Item = Feature>,
    ) -> Result<Self, FeatureSetError> {
        let mut set = FeatureSet::new();
        for f in features {
            set.insert(f)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, feature: Feature) -> Result<(), FeatureSetError> {
        if feature.attribute.is_empty() {
            return Err(FeatureSetError::EmptyAttribute);
        }
        match self
            .features
            .binary_search_by(|f| f.attribute.as_str().cmp(&feature.attribute))
        {
            Ok(_) => Err(FeatureSetError::DuplicateAttribute(feature.attribute)),
            Err(at) => {
                self.features.insert(at, feature);
                Ok(())
            }
        }
    }

    pub fn get(&self, attribute: &str) -> Option<&FeatureValue> {
        self.features
            .binary_search_by(|f| f.attribute.as_str().cmp(attribute))
            .ok()
            .map(|i| &self.features[i].value)
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Feature> {
        self.features.iter()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

impl<'a> IntoIterator for &'a FeatureSet {
    type Item = &'a Feature;
    type IntoIter = core::slice::Iter<'a, Feature>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureSetError {
    #[error("empty attribute name")]
    EmptyAttribute,
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
}

/// A role of a predicate together with the features expected of its filler.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSlot {
    pub case_type: String,
    pub selectional: FeatureSet,
}

impl CaseSlot {
    pub fn new(case_type: impl Into<String>, selectional: FeatureSet) -> Self {
        CaseSlot { case_type: case_type.into(), selectional }
    }
}

/// One icon sense.
#[derive(Debug, Clone, PartialEq)]
pub struct LexEntry {
    pub id: String,
    pub gloss: String,
    pub intrinsic: FeatureSet,
    pub case_structure: Vec<CaseSlot>,
}

impl LexEntry {
    pub fn new(id: impl Into<String>, gloss: impl Into<String>, intrinsic: FeatureSet) -> Self {
        LexEntry {
            id: id.into(),
            gloss: gloss.into(),
            intrinsic,
            case_structure: Vec::new(),
        }
    }

    pub fn with_case(mut self, slot: CaseSlot) -> Self {
        self.case_structure.push(slot);
        self
    }

    /// Number of case slots.
    pub fn valency(&self) -> usize {
        self.case_structure.len()
    }

    /// An entry can head dependencies iff it has at least one case slot.
    pub fn is_predicative(&self) -> bool {
        !self.case_structure.is_empty()
    }

    pub fn slot(&self, case_type: &str) -> Option<&CaseSlot> {
        self.case_structure.iter().find(|s| s.case_type == case_type)
    }

    fn validate(&self) -> Result<(), LexiconError> {
        if self.id.is_empty() {
            return Err(LexiconError::EmptyId);
        }
        for (i, slot) in self.case_structure.iter().enumerate() {
            if slot.case_type.is_empty() {
                return Err(LexiconError::EmptyCaseType { entry: self.id.clone() });
            }
            if slot.selectional.is_empty() {
                return Err(LexiconError::EmptySelectional {
                    entry: self.id.clone(),
                    case: slot.case_type.clone(),
                });
            }
            if self.case_structure[..i].iter().any(|s| s.case_type == slot.case_type) {
                return Err(LexiconError::DuplicateCase {
                    entry: self.id.clone(),
                    case: slot.case_type.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Load-time validation failures. Each variant names the entry (and, where
/// relevant, the path inside it) that broke the rule.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LexiconError {
    #[error("duplicate icon id `{0}`")]
    DuplicateId(String),
    #[error("empty icon id")]
    EmptyId,
    #[error("icon `{entry}`: duplicate attribute `{attribute}` at {path}")]
    DuplicateAttribute { entry: String, path: String, attribute: String },
    #[error("icon `{entry}`: empty attribute name at {path}")]
    EmptyAttribute { entry: String, path: String },
    #[error("icon `{entry}`: magnitude {value} at {path} is outside [-1, 1]")]
    MagnitudeOutOfRange { entry: String, path: String, value: f64 },
    #[error("icon `{entry}`: integer value {value} at {path} is not +1 or -1")]
    IntegerNotUnit { entry: String, path: String, value: f64 },
    #[error("icon `{entry}`: case `{case}` has an empty selectional set")]
    EmptySelectional { entry: String, case: String },
    #[error("icon `{entry}`: case `{case}` declared twice")]
    DuplicateCase { entry: String, case: String },
    #[error("icon `{entry}`: empty case type")]
    EmptyCaseType { entry: String },
    #[error("malformed lexicon document at {path}: {message}")]
    Malformed { path: String, message: String },
}

impl LexiconError {
    /// Attaches entry and path context to a feature-value failure.
    pub fn from_value(entry: &str, path: &str, err: ValueError) -> Self {
        match err {
            ValueError::OutOfRange(value) => LexiconError::MagnitudeOutOfRange {
                entry: entry.to_string(),
                path: path.to_string(),
                value,
            },
            ValueError::IntegerNotUnit(value) => LexiconError::IntegerNotUnit {
                entry: entry.to_string(),
                path: path.to_string(),
                value,
            },
        }
    }

    /// Attaches entry and path context to a feature-set failure.
    pub fn from_feature_set(entry: &str, path: &str, err: FeatureSetError) -> Self {
        match err {
            FeatureSetError::EmptyAttribute => LexiconError::EmptyAttribute {
                entry: entry.to_string(),
                path: path.to_string(),
            },
            FeatureSetError::DuplicateAttribute(attribute) => LexiconError::DuplicateAttribute {
                entry: entry.to_string(),
                path: path.to_string(),
                attribute,
            },
        }
    }
}

/// Lookup of an id that the lexicon does not declare.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown icon `{0}`")]
pub struct UnknownIcon(pub String);

pub const FLAT_ONTOLOGY_NOTE: &str =
    "flat ontology: attributes are compared by token equality, no inheritance";

/// An immutable, validated collection of icon senses indexed by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexEntry>,
    pub ontology_note: String,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon { entries: BTreeMap::new(), ontology_note: FLAT_ONTOLOGY_NOTE.to_string() }
    }
}

impl Lexicon {
    pub fn new(entries: impl IntoIterator<Item = LexEntry>) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::default();
        for entry in entries {
            entry.validate()?;
            if lexicon.entries.contains_key(&entry.id) {
                return Err(LexiconError::DuplicateId(entry.id));
            }
            lexicon.entries.insert(entry.id.clone(), entry);
        }
        Ok(lexicon)
    }

    pub fn lookup(&self, id: &str) -> Result<&LexEntry, UnknownIcon> {
        self.entries.get(id).ok_or_else(|| UnknownIcon(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    /// Entries in id order.
    pub fn entries(&self) -> impl Iterator<Item = &LexEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ValueKind::Integer if self.magnitude > 0.0 => f.write_str("+1"),
            ValueKind::Integer => f.write_str("-1"),
            ValueKind::Real => write!(f, "{:?}", self.magnitude),
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.attribute, self.value)
    }
}
