//! A segment of states on a classical bit: the hull is ℝ², the state space is not complete.

use gptj::{analysis, builders, Rational};

fn main() -> gptj::Result<()> {
    let m = builders::example5::<Rational>();
    let cone = analysis::primal_cone(&m)?;
    println!("dim E = {}, extreme rays of E₊: {}", m.dim(), cone.generators.len());
    let v = m.is_state_complete()?;
    println!("state-complete: {}", v.holds);
    if let Some(w) = v.witness {
        println!("witness: {w}");
    }
    println!("sharp: {}", m.is_sharp()?.holds);
    Ok(())
}
