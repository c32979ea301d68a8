use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::relstruct::{Structure, StructureSpec};

/// A homomorphism instance `source → target`.
///
/// `target` is `None` when the construction produced no elements; no
/// homomorphism exists then, since sources are nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomInstance {
    #[serde(serialize_with = "ser_structure")]
    pub source: Structure,
    #[serde(serialize_with = "ser_target")]
    pub target: Option<Structure>,
}

fn ser_structure<S: Serializer>(a: &Structure, s: S) -> Result<S::Ok, S::Error> {
    a.to_spec().serialize(s)
}

fn ser_target<S: Serializer>(a: &Option<Structure>, s: S) -> Result<S::Ok, S::Error> {
    a.as_ref().map(Structure::to_spec).serialize(s)
}

impl HomInstance {
    pub fn target_spec(&self) -> Option<StructureSpec> {
        self.target.as_ref().map(Structure::to_spec)
    }
}

/// What a construction did besides producing its output.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    /// Host node to the listing of its bag used as its color tuple.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub bag_listings: BTreeMap<String, Vec<String>>,
    /// Host nodes whose listing was padded with its least element.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub padded: Vec<String>,
    /// Elements added outside the main construction.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub special_vertices: Vec<String>,
    /// Host nodes removed before the construction.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dropped: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Output of a reduction together with a digest of its inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    /// Hex SHA-256 over the canonical JSON of the inputs.
    pub input_digest: String,
    pub output: HomInstance,
    pub trace: Trace,
}

impl ReductionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn source(&self) -> &Structure {
        &self.output.source
    }

    pub fn target(&self) -> Option<&Structure> {
        self.output.target.as_ref()
    }
}

/// Length-prefixed SHA-256 over the given canonical texts.
pub(crate) fn digest<S: AsRef<str>>(parts: &[S]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        let p = p.as_ref().as_bytes();
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
