//! Split a reducible model into irreducible components and glue their forms back together.

use gptj::{analysis, builders, quotient, spinforms, Rational};

fn main() -> gptj::Result<()> {
    let m = builders::reducible_fixture::<Rational>();
    println!("irreducible: {}", analysis::is_irreducible(&m)?.holds);
    let dec = analysis::isotypic_decomposition(&m)?;
    println!("{} components", dec.len());
    for j in 0..dec.len() {
        let r = quotient::reduce_with(&m, &dec, j)?;
        let orth = spinforms::orthogonalizing_form(&r.model)?;
        println!(
            "  {}: dim {}, ε = {}, orthogonalizing form: {}",
            r.model.name(),
            r.model.dim(),
            r.epsilon,
            orth.form.is_some()
        );
    }
    let c = quotient::combined_inner_product(&m)?;
    println!("combined form PD {}, SPIN {}, orthogonalizing {}", c.positive_definite, c.spin, c.orthogonalizing);
    println!("{}", c.form.matrix.to_json());
    Ok(())
}
