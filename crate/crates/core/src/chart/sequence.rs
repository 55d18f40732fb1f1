use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Stable identity of one icon occurrence. Survives edits to the sequence,
/// unlike its position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceId(pub u32);

impl InstanceId {
    pub const MIN: InstanceId = InstanceId(0);
    pub const MAX: InstanceId = InstanceId(u32::MAX);
}

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IconInstance {
    pub instance: InstanceId,
    pub lexicon_id: String,
}

/// The current input. Instances are only ever appended with fresh, larger
/// ids, so the items stay sorted by id and positions are `index + 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IconSequence {
    items: Vec<IconInstance>,
    next_id: u32,
}

impl IconSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids<S: AsRef<str>>(ids: &[S]) -> Self {
        let mut seq = IconSequence::new();
        seq.append(ids);
        seq
    }

    /// Appends icons, returning the first newly issued id.
    pub fn append<S: AsRef<str>>(&mut self, ids: &[S]) -> InstanceId {
        let first = InstanceId(self.next_id);
        for id in ids {
            self.items.push(IconInstance {
                instance: InstanceId(self.next_id),
                lexicon_id: String::from(id.as_ref()),
            });
            self.next_id += 1;
        }
        first
    }

    pub(crate) fn remove(&mut self, doomed: &[InstanceId]) {
        self.items.retain(|i| !doomed.contains(&i.instance));
    }

    /// 1-based position of a live instance.
    pub fn position(&self, id: InstanceId) -> Option<usize> {
        self.items.binary_search_by(|i| i.instance.cmp(&id)).ok().map(|i| i + 1)
    }

    /// Instance at a 1-based position.
    pub fn at(&self, position: usize) -> Option<&IconInstance> {
        position.checked_sub(1).and_then(|i| self.items.get(i))
    }

    pub fn contains(&self, id: InstanceId) -> bool {
        self.position(id).is_some()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, IconInstance> {
        self.items.iter()
    }

    pub fn lexicon_ids(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|i| i.lexicon_id.as_str())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}
