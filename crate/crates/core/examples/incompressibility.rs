//! Primitivity-based incompressibility verdicts.

use gptj::{builders, quotient, Rational};

fn main() -> gptj::Result<()> {
    for n in 2..=5 {
        let v = quotient::is_incompressible(&builders::classical::<Rational>(n))?;
        println!("classical({n}): {}", v.holds);
    }
    let v = quotient::is_incompressible(&builders::imprimitive_fixture::<Rational>())?;
    println!("imprimitive fixture: {} blocks {}", v.holds, v.witness.unwrap_or_default());
    let v = quotient::is_incompressible(&builders::quantum(2)?)?;
    println!("qubit: {} ({:?})", v.holds, v.mode);
    Ok(())
}
