//! Canonical form, positivity window and orthogonalizing form of a qubit.

use gptj::{builders, hermitian, spinforms};

fn main() -> gptj::Result<()> {
    let m = builders::quantum(2)?;
    let base = spinforms::canonical_inner_product(&m)?;
    let p = spinforms::parameters(&base, &m)?;
    println!("r² = {:.6}, c = {:.6}, m = {:.6}, M = {:.6}", p.r_squared, p.c.unwrap_or(f64::NAN), p.m, p.big_m);

    let w = spinforms::positivity_window(&base, &m)?;
    println!("positive for λ in [{:.6}, {:.6}]", w.lower, w.upper);

    let orth = spinforms::orthogonalizing_form(&m)?;
    let form = orth.form.expect("qubit canonical form is minimizing");
    println!("λ̄ = {:.6}", orth.lambda_bar.unwrap_or(f64::NAN));
    let half_trace = hermitian::trace_gram(2).scale(&0.5);
    println!("max |B - Tr(ab)/2| = {:.2e}", form.matrix.max_abs_diff(&half_trace));

    let audit = spinforms::lemma1_audit(&base, &m)?;
    print!("{}", audit.to_text());
    Ok(())
}
