//! The JSON model-spec format (`"specVersion": 1`).

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::builders;
use crate::error::{Error, Result};
use crate::model::{GroupHandle, Model, ModelKind, ModelOptions};
use crate::perm::Permutation;
use crate::scalar::{Rational, Scalar};
use crate::testspace::TestSpace;

pub const SPEC_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float,
}

impl Arithmetic {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Arithmetic::Exact),
            "float" => Some(Arithmetic::Float),
            _ => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Arithmetic::Exact => "exact",
            Arithmetic::Float => "float",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Permutations { generators: Vec<Vec<usize>> },
    Unitary { dim: usize },
    Orthogonal { dim: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModelSpec {
    pub spec_version: u32,
    pub name: String,
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arithmetic: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tests: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<BTreeMap<String, Value>>,
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Value>,
}

fn default_kind() -> String {
    "finite".into()
}

/// A loaded model in whichever arithmetic the spec (or an override) selected.
#[derive(Clone, Debug)]
pub enum AnyModel {
    Exact(Model<Rational>),
    Float(Model<f64>),
}

impl AnyModel {
    pub fn name(&self) -> &str {
        match self {
            AnyModel::Exact(m) => m.name(),
            AnyModel::Float(m) => m.name(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyModel::Exact(m) => m.dim(),
            AnyModel::Float(m) => m.dim(),
        }
    }
}

fn parse_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

pub fn parse_spec(text: &str) -> Result<ModelSpec> {
    let spec: ModelSpec = serde_json::from_str(text)
        .map_err(|e| parse_error(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    if spec.spec_version != SPEC_VERSION {
        return Err(parse_error("specVersion", format!("unsupported version {}", spec.spec_version)));
    }
    Ok(spec)
}

pub fn load(path: &Path, options: ModelOptions, mode: Option<Arithmetic>) -> Result<AnyModel> {
    let text = std::fs::read_to_string(path)?;
    load_str(&text, options, mode)
}

pub fn load_str(text: &str, options: ModelOptions, mode: Option<Arithmetic>) -> Result<AnyModel> {
    let spec = parse_spec(text)?;
    from_spec(&spec, options, mode)
}

pub fn from_spec(spec: &ModelSpec, options: ModelOptions, mode: Option<Arithmetic>) -> Result<AnyModel> {
    let declared = match &spec.arithmetic {
        None => None,
        Some(s) => Some(Arithmetic::parse(s).ok_or_else(|| parse_error("arithmetic", format!("unknown arithmetic `{s}`")))?),
    };
    match spec.kind.as_str() {
        "quantum" => {
            let GroupSpec::Unitary { dim } = spec.group else {
                return Err(parse_error("group.type", "quantum models take a unitary group"));
            };
            Ok(AnyModel::Float(builders::quantum_with(dim, options)?.with_name(&spec.name)))
        }
        "spin_factor" => {
            let GroupSpec::Orthogonal { dim } = spec.group else {
                return Err(parse_error("group.type", "spin-factor models take an orthogonal group"));
            };
            Ok(AnyModel::Float(builders::spin_factor_with(dim, options)?.with_name(&spec.name)))
        }
        "finite" => match mode.or(declared).unwrap_or(Arithmetic::Exact) {
            Arithmetic::Exact => Ok(AnyModel::Exact(finite_from_spec(spec, options)?)),
            Arithmetic::Float => Ok(AnyModel::Float(finite_from_spec(spec, options)?)),
        },
        other => Err(parse_error("kind", format!("unknown kind `{other}`"))),
    }
}

fn finite_from_spec<F: Scalar>(spec: &ModelSpec, options: ModelOptions) -> Result<Model<F>> {
    let mut index = HashMap::new();
    for (i, l) in spec.outcomes.iter().enumerate() {
        if index.insert(l.as_str(), i).is_some() {
            return Err(parse_error(format!("outcomes[{i}]"), format!("duplicate outcome label `{l}`")));
        }
    }
    let mut tests = Vec::new();
    for (t, test) in spec.tests.iter().enumerate() {
        let mut ids = Vec::new();
        for (j, l) in test.iter().enumerate() {
            let i = index
                .get(l.as_str())
                .ok_or_else(|| parse_error(format!("tests[{t}][{j}]"), format!("unknown outcome `{l}`")))?;
            ids.push(*i);
        }
        tests.push(ids);
    }
    let ts = TestSpace::new(spec.outcomes.clone(), tests)?;
    let mut states = Vec::new();
    for (k, s) in spec.states.iter().enumerate() {
        if let Some(bad) = s.keys().find(|l| !index.contains_key(l.as_str())) {
            return Err(parse_error(format!("states[{k}].{bad}"), "unknown outcome"));
        }
        let mut w = Vec::with_capacity(ts.len());
        for l in ts.labels() {
            let v = s
                .get(l)
                .ok_or_else(|| parse_error(format!("states[{k}]"), format!("missing value for outcome `{l}`")))?;
            w.push(parse_value(v).ok_or_else(|| parse_error(format!("states[{k}].{l}"), format!("not a number: {v}")))?);
        }
        states.push(w);
    }
    let GroupSpec::Permutations { generators } = &spec.group else {
        return Err(parse_error("group.type", "finite models take permutation generators"));
    };
    let mut gens = Vec::new();
    for (g, images) in generators.iter().enumerate() {
        let p = Permutation::new(images.clone()).map_err(|e| parse_error(format!("group.generators[{g}]"), e.to_string()))?;
        gens.push(p);
    }
    Model::finite(&spec.name, ts, states, gens, options)
}

fn parse_value<F: Scalar>(v: &Value) -> Option<F> {
    match v {
        Value::String(s) => F::parse(s),
        Value::Number(n) => F::parse(&n.to_string()),
        _ => None,
    }
}

/// The spec describing a model (finite: its generator states and group).
pub fn spec_of<F: Scalar>(model: &Model<F>) -> ModelSpec {
    let arithmetic = Some(if F::EXACT { "exact" } else { "float" }.to_string());
    match (model.kind(), model.group()) {
        (ModelKind::Quantum(n), _) => ModelSpec {
            spec_version: SPEC_VERSION,
            name: model.name().to_string(),
            kind: "quantum".into(),
            arithmetic: Some("float".into()),
            outcomes: vec![],
            tests: vec![],
            states: vec![],
            group: GroupSpec::Unitary { dim: n },
            provenance: None,
        },
        (ModelKind::SpinFactor(k), _) => ModelSpec {
            spec_version: SPEC_VERSION,
            name: model.name().to_string(),
            kind: "spin_factor".into(),
            arithmetic: Some("float".into()),
            outcomes: vec![],
            tests: vec![],
            states: vec![],
            group: GroupSpec::Orthogonal { dim: k },
            provenance: None,
        },
        (ModelKind::Finite, group) => {
            let ts = model.testspace();
            let generators = match group {
                GroupHandle::Finite { generators } => generators.iter().map(|p| p.0.clone()).collect(),
                _ => vec![],
            };
            ModelSpec {
                spec_version: SPEC_VERSION,
                name: model.name().to_string(),
                kind: "finite".into(),
                arithmetic,
                outcomes: ts.labels().to_vec(),
                tests: (0..ts.tests().len()).map(|t| model.test_labels(t)).collect(),
                states: model
                    .state_generators()
                    .iter()
                    .map(|w| ts.labels().iter().cloned().zip(w.iter().map(Scalar::to_json)).collect())
                    .collect(),
                group: GroupSpec::Permutations { generators },
                provenance: None,
            }
        }
    }
}

pub fn to_json_string(spec: &ModelSpec) -> String {
    let value = serde_json::to_value(spec).expect("spec serializes");
    let mut s = serde_json::to_string_pretty(&value).expect("spec serializes");
    s.push('\n');
    s
}
