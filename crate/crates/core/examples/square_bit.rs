//! The square bit: an orthogonalizing inner product that is not self-dualizing.

use gptj::{analysis, builders, spinforms, Rational};

fn main() -> gptj::Result<()> {
    let m = builders::square_bit::<Rational>();
    println!("{}: dim {}, rank {}", m.name(), m.dim(), m.rank());
    println!("sharp: {}", m.is_sharp()?.holds);

    let res = spinforms::orthogonalizing_form(&m)?;
    let form = res.form.expect("square bit has an orthogonalizing form");
    let x = |l: &str| m.outcome_vector(m.testspace().outcome(l).unwrap()).to_vec();
    println!(
        "<a,a> = {}, <a,a'> = {}, <a,b> = {}",
        form.eval(&x("a"), &x("a")),
        form.eval(&x("a"), &x("a'")),
        form.eval(&x("a"), &x("b"))
    );

    let sd = analysis::is_self_dual(&m, &form)?;
    println!("self-dual: {} witness {}", sd.holds, sd.witness.unwrap_or_default());
    Ok(())
}
