//! The three-way self-duality equivalence on classical, quantum, spin-factor and square-bit models.

use gptj::composites::{self_duality_equivalence, EquivalenceReport};
use gptj::{builders, Rational};

fn show(name: &str, r: &EquivalenceReport) {
    println!(
        "{name:>16}: iso-correlator {:5}  self-dual {:5}  sharp+complete {:5}  agree {}",
        r.a.holds,
        r.b.holds,
        r.c.holds,
        r.agree()
    );
}

fn main() -> gptj::Result<()> {
    show("classical(3)", &self_duality_equivalence(&builders::classical::<Rational>(3))?);
    show("qubit", &self_duality_equivalence(&builders::quantum(2)?)?);
    show("spin factor k=3", &self_duality_equivalence(&builders::spin_factor(3)?)?);
    show("square bit", &self_duality_equivalence(&builders::square_bit::<Rational>())?);
    Ok(())
}
