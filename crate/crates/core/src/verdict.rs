use serde::{Deserialize, Serialize};

/// Outcome of a decision procedure: passes, or fails with the first witness
/// found in declared order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict<W> {
    pub witness: Option<W>,
}

impl<W> Verdict<W> {
    pub fn pass() -> Self {
        Self { witness: None }
    }

    pub fn fail(witness: W) -> Self {
        Self { witness: Some(witness) }
    }

    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        Verdict {
            witness: self.witness.map(f),
        }
    }
}

impl<W> From<Option<W>> for Verdict<W> {
    fn from(witness: Option<W>) -> Self {
        Self { witness }
    }
}
