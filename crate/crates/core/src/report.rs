//! Analysis orchestration and report emission.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis;
use crate::composites;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::quotient;
use crate::scalar::Scalar;
use crate::spinforms;

pub const PROPERTIES: [&str; 13] = [
    "sharp",
    "state-complete",
    "bisymmetric",
    "fully-symmetric",
    "irreducible",
    "spin-scan",
    "orthogonalizing",
    "self-dual",
    "incompressible",
    "quotient",
    "conjugate",
    "theorem1",
    "homogeneity-probe",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Format::Json),
            "text" => Some(Format::Text),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub spec_version: u32,
    pub model: Value,
    pub arithmetic: String,
    pub seed: u64,
    pub tolerance: f64,
    pub properties: BTreeMap<String, Value>,
    /// Rendered clause table from the spin scan; text output only.
    #[serde(skip)]
    pub audit_table: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse { location: format!("line {}, column {}", e.line(), e.column()), message: e.to_string() })
    }

    /// Entries whose computation failed.
    pub fn errors(&self) -> Vec<(&str, &str)> {
        self.properties
            .iter()
            .filter_map(|(k, v)| v.get("error").and_then(Value::as_str).map(|e| (k.as_str(), e)))
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.to_text(),
        }
    }

    pub fn to_text(&self) -> String {
        let name = self.model.get("name").and_then(Value::as_str).unwrap_or("?");
        let kind = self.model.get("kind").and_then(Value::as_str).unwrap_or("?");
        let mut out = format!("model {name} ({kind}, {}, seed {})\n", self.arithmetic, self.seed);
        for (k, v) in &self.properties {
            out.push_str(&format!("  {k}: {}\n", summarize(v)));
        }
        if let Some(table) = &self.audit_table {
            out.push_str("\nspin-scan identities (canonical form)\n");
            out.push_str(table);
        }
        out
    }
}

fn summarize(v: &Value) -> String {
    if let Some(e) = v.get("error") {
        return format!("error: {}", e.as_str().unwrap_or_default());
    }
    let mode = v.get("mode").and_then(Value::as_str).map(|m| format!(" [{m}]")).unwrap_or_default();
    if let Some(b) = v.get("verdict").and_then(Value::as_bool) {
        return format!("{b}{mode}");
    }
    if let Some(b) = v.get("present").and_then(Value::as_bool) {
        return if b { "present".into() } else { "absent".into() };
    }
    if let Some(b) = v.get("summary").and_then(Value::as_str) {
        return b.to_string();
    }
    "computed".into()
}

/// Parses a comma-separated property list; `all` selects every property.
pub fn parse_properties(list: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for p in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if p == "all" {
            return Ok(PROPERTIES.iter().map(|s| s.to_string()).collect());
        }
        if !PROPERTIES.contains(&p) {
            return Err(Error::Parse { location: "properties".into(), message: format!("unknown property `{p}`") });
        }
        out.push(p.to_string());
    }
    Ok(out)
}

/// Runs the requested properties; a failing property records its error and
/// the remaining ones still run.
pub fn analyze<F: Scalar>(model: &Model<F>, properties: &[String]) -> Report {
    let mut entries = BTreeMap::new();
    let mut audit_table = None;
    for p in properties {
        let value = match p.as_str() {
            "spin-scan" => spin_scan(model).map(|(v, table)| {
                audit_table = table;
                v
            }),
            other => run(model, other),
        };
        entries.insert(p.clone(), value.unwrap_or_else(|e| json!({ "error": e.to_string() })));
    }
    Report {
        spec_version: crate::spec::SPEC_VERSION,
        model: model.summary_json(),
        arithmetic: if F::EXACT { "exact" } else { "float" }.into(),
        seed: model.options().seed,
        tolerance: model.options().tolerance,
        properties: entries,
        audit_table,
    }
}

fn run<F: Scalar>(model: &Model<F>, property: &str) -> Result<Value> {
    match property {
        "sharp" => Ok(model.is_sharp()?.to_json()),
        "state-complete" => Ok(model.is_state_complete()?.to_json()),
        "bisymmetric" => Ok(model.is_bisymmetric()?.to_json()),
        "fully-symmetric" => Ok(model.is_fully_symmetric()?.to_json()),
        "irreducible" => Ok(analysis::is_irreducible(model)?.to_json()),
        "orthogonalizing" => Ok(spinforms::orthogonalizing_form(model)?.to_json()),
        "self-dual" => {
            let res = spinforms::orthogonalizing_form(model)?;
            let form = res.form.ok_or_else(|| Error::NoOrthogonalizingForm {
                c: res.canonical.c.as_ref().map(|c| c.to_string()).unwrap_or_default(),
                m: res.canonical.m.to_string(),
            })?;
            Ok(analysis::is_self_dual(model, &form)?.to_json())
        }
        "incompressible" => Ok(quotient::is_incompressible(model)?.to_json()),
        "quotient" => quotient_block(model),
        "conjugate" => {
            let conj = composites::build_conjugate(model)?;
            let iso = composites::is_isomorphism_state(model, &conj.model, &conj.correlator)?;
            let mut v = conj.to_json();
            v["isCorrelator"] = json!(composites::is_correlator(model, &conj));
            v["isomorphismState"] = iso.to_json();
            v["summary"] = json!(format!("correlator: {}, isomorphism state: {}", v["isCorrelator"], iso.holds));
            Ok(v)
        }
        "theorem1" => {
            let eq = composites::self_duality_equivalence(model)?;
            let mut v = eq.to_json();
            v["summary"] = json!(format!(
                "clauses agree: {} (a: {}, b: {}, c: {})",
                eq.agree(),
                eq.a.holds,
                eq.b.holds,
                eq.c.holds
            ));
            Ok(v)
        }
        "homogeneity-probe" => homogeneity_probe(model),
        other => Err(Error::Parse { location: "properties".into(), message: format!("unknown property `{other}`") }),
    }
}

fn spin_scan<F: Scalar>(model: &Model<F>) -> Result<(Value, Option<String>)> {
    let base = spinforms::canonical_inner_product(model)?;
    let mut v = json!({ "canonical": spinforms::form_report(&base, model) });
    let mut table = None;
    match spinforms::lemma1_audit(&base, model) {
        Ok(audit) => {
            table = Some(audit.to_text());
            v["audit"] = audit.to_json();
        }
        Err(e) => v["audit"] = json!({ "error": e.to_string() }),
    }
    v["window"] = match spinforms::positivity_window(&base, model) {
        Ok(w) => w.to_json(),
        Err(e) => json!({ "error": e.to_string() }),
    };
    v["uniform"] = match spinforms::uniform_form(model) {
        Ok(u) => spinforms::form_report(&u, model),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let passed = v["audit"]["passed"].as_bool().map_or("error".to_string(), |b| b.to_string());
    v["summary"] = json!(format!("canonical form SPIN: {}, identities pass: {passed}", v["canonical"]["spin"]["holds"]));
    Ok((v, table))
}

fn quotient_block<F: Scalar>(model: &Model<F>) -> Result<Value> {
    let dec = analysis::isotypic_decomposition(model)?;
    let mut components = Vec::new();
    for j in 0..dec.len() {
        components.push(match quotient::reduce_with(model, &dec, j) {
            Ok(r) => {
                let mut v = r.to_json();
                v["irreducible"] = match analysis::is_irreducible(&r.model) {
                    Ok(verdict) => verdict.to_json(),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                v
            }
            Err(e) => json!({ "component": j, "error": e.to_string() }),
        });
    }
    let combined = match quotient::combined_inner_product(model) {
        Ok(c) => c.to_json(),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({
        "summary": format!("{} component(s)", dec.len()),
        "decomposition": dec.to_json(),
        "components": components,
        "combined": combined,
    }))
}

/// Maps a state mixed along the first test onto a differently weighted state
/// along the last test.
fn homogeneity_probe<F: Scalar>(model: &Model<F>) -> Result<Value> {
    let tests = model.testspace().tests();
    let first = &tests[0];
    let last = &tests[tests.len() - 1];
    let delta = |x: usize| -> Result<Vec<F>> {
        if model.is_analytic() {
            Ok(model.orbit_covectors()[x].clone())
        } else {
            analysis::delta(model, x)
        }
    };
    let mix = |test: &[usize], reverse: bool| -> Result<Vec<F>> {
        let total = F::from_usize(test.len() * (test.len() + 1) / 2);
        let mut acc = vec![F::zero(); model.dim()];
        for (i, &x) in test.iter().enumerate() {
            let w = F::from_usize(if reverse { test.len() - i } else { i + 1 }) / total.clone();
            for (a, d) in acc.iter_mut().zip(delta(x)?) {
                *a = a.clone() + w.clone() * d;
            }
        }
        Ok(acc)
    };
    let alpha = mix(first, false)?;
    let beta = mix(last, true)?;
    let witness = analysis::homogeneity_automorphism(model, &alpha, &beta)?;
    let mut v = witness.to_json();
    v["alpha"] = crate::scalar::vec_to_json(&alpha);
    v["beta"] = crate::scalar::vec_to_json(&beta);
    v["summary"] = json!(format!("order automorphism: {}, residual {:e}", witness.order_automorphism, witness.residual));
    Ok(v)
}

pub fn emit(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let text = report.render(format);
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::scalar::Rational;

    fn all() -> Vec<String> {
        PROPERTIES.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn square_bit_report() {
        let m = builders::square_bit::<Rational>();
        let r = analyze(&m, &all());
        assert_eq!(r.properties["sharp"]["verdict"], json!(false));
        assert_eq!(r.properties["self-dual"]["verdict"], json!(false));
        assert_eq!(r.properties["orthogonalizing"]["present"], json!(true));
        assert!(r.to_text().contains("clause | holds"));
    }

    #[test]
    fn json_round_trips() {
        let m = builders::classical::<Rational>(3);
        let r = analyze(&m, &all());
        let text = r.render(Format::Json);
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back.render(Format::Json), text);
    }

    #[test]
    fn errors_stay_local() {
        let m = builders::example5::<Rational>();
        let r = analyze(&m, &all());
        assert_eq!(r.properties.len(), PROPERTIES.len());
        assert_eq!(r.properties["state-complete"]["verdict"], json!(false));
    }

    #[test]
    fn unknown_property_is_rejected() {
        assert!(parse_properties("sharp,bogus").is_err());
        assert_eq!(parse_properties("all").unwrap().len(), 13);
    }
}
