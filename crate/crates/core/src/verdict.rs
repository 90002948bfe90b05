//! Verdicts returned by structural predicates.

use serde::Serialize;
use serde_json::Value;

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
    /// Closed-form argument for an analytic model family.
    Analytic,
    /// Sampled evidence only.
    Probabilistic,
}

impl Mode {
    pub fn for_scalar<F: crate::Scalar>() -> Self {
        if F::EXACT {
            Mode::Exact
        } else {
            Mode::Float
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub property: String,
    #[serde(rename = "verdict")]
    pub holds: bool,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn new(property: &str, holds: bool, mode: Mode) -> Self {
        Self { property: property.to_string(), holds, mode, witness: None, note: None }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("verdict serializes")
    }
}
