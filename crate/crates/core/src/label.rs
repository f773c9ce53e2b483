use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Name of the reserved background class. It always has id 0.
pub const OTHER_LABEL: &str = "other";

/// Dense class identifier; 0 is always [`OTHER_LABEL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct LabelId(pub u32);

impl LabelId {
    pub const OTHER: LabelId = LabelId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_other(self) -> bool {
        self == Self::OTHER
    }
}

impl core::fmt::Display for LabelId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bidirectional label id <-> name mapping in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelTable {
    names: Vec<String>,
}

impl Default for LabelTable {
    fn default() -> Self {
        Self::new()
    }
}

impl LabelTable {
    /// A table holding only [`OTHER_LABEL`].
    pub fn new() -> Self {
        Self {
            names: alloc::vec![OTHER_LABEL.to_string()],
        }
    }

    /// Builds a table from names; "other" is inserted at id 0 if missing.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut table = Self::new();
        for n in names {
            table.intern(n.as_ref());
        }
        table
    }

    /// Returns the id for `name`, appending it if unseen.
    pub fn intern(&mut self, name: &str) -> LabelId {
        if let Some(id) = self.id(name) {
            return id;
        }
        self.names.push(name.to_string());
        LabelId((self.names.len() - 1) as u32)
    }

    pub fn id(&self, name: &str) -> Option<LabelId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| LabelId(i as u32))
    }

    pub fn name(&self, id: LabelId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn iter(&self) -> impl Iterator<Item = (LabelId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (LabelId(i as u32), n.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn other_is_always_zero() {
        let t = LabelTable::from_names(["washing", "other", "rubbing"]);
        assert_eq!(t.id("other"), Some(LabelId(0)));
        assert_eq!(t.id("washing"), Some(LabelId(1)));
        assert_eq!(t.id("rubbing"), Some(LabelId(2)));
        assert_eq!(t.name(LabelId(2)), Some("rubbing"));
    }
}
