//! Load a model spec and print a text report.
//!
//! `cargo run --example analyze_spec -- crates/core/fixtures/square_bit.json`

use gptj::model::ModelOptions;
use gptj::report::{self, Format};
use gptj::spec::{self, AnyModel};

fn main() -> gptj::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/square_bit.json").into());
    let model = spec::load(path.as_ref(), ModelOptions::default(), None)?;
    let props = report::parse_properties("all")?;
    let r = match &model {
        AnyModel::Exact(m) => report::analyze(m, &props),
        AnyModel::Float(m) => report::analyze(m, &props),
    };
    print!("{}", r.render(Format::Text));
    Ok(())
}
