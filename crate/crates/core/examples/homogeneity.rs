//! An order automorphism carrying one interior state to another.

use gptj::{analysis, builders, Rational, Scalar};

fn main() -> gptj::Result<()> {
    let m = builders::classical::<Rational>(2);
    let alpha = m.state_covector(&[Rational::ratio(3, 5), Rational::ratio(2, 5)])?;
    let beta = m.state_covector(&[Rational::ratio(3, 10), Rational::ratio(7, 10)])?;
    let h = analysis::homogeneity_automorphism(&m, &alpha, &beta)?;
    println!("filter factors {:?}", h.filter.factors.iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("map {}", h.map.to_json());
    println!("order automorphism: {}, image {:?}", h.order_automorphism, h.image.iter().map(ToString::to_string).collect::<Vec<_>>());

    let q = builders::quantum(2)?;
    let a = analysis::normalize_state(&q, &[0.7, 0.3, 0.2, 0.0]);
    let b = analysis::normalize_state(&q, &[0.5, 0.5, 0.0, -0.3]);
    let h = analysis::homogeneity_automorphism(&q, &a, &b)?;
    println!("qubit: order automorphism {}, residual {:.1e}", h.order_automorphism, h.residual);
    Ok(())
}
