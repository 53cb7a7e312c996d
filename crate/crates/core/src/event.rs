use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Name of the reserved clock event.
pub const TICK: &str = "tick";

/// A plant event, identified by its name.
///
/// Events order with `tick` first and every other event lexicographically by
/// name. Exploration orders throughout the crate follow this ordering, which
/// keeps state numbering reproducible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventId(Arc<str>);

impl EventId {
    pub fn new(name: impl AsRef<str>) -> Self {
        EventId(Arc::from(name.as_ref()))
    }

    pub fn tick() -> Self {
        EventId::new(TICK)
    }

    pub fn is_tick(&self) -> bool {
        &*self.0 == TICK
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl Ord for EventId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_tick(), other.is_tick()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for EventId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for EventId {
    fn from(s: &str) -> Self {
        EventId::new(s)
    }
}

impl Serialize for EventId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for EventId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s.is_empty() {
            return Err(serde::de::Error::custom("event names must be non-empty"));
        }
        Ok(EventId::new(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_sorts_first() {
        let mut v = [EventId::new("a"), EventId::tick(), EventId::new("Z"), EventId::new("α1")];
        v.sort();
        let names: Vec<_> = v.iter().map(EventId::name).collect();
        assert_eq!(names, ["tick", "Z", "a", "α1"]);
    }
}
