//! Models from coset data: the square bit rebuilt from the dihedral group.

use gptj::{analysis, builders, spinforms, Rational};

fn main() -> gptj::Result<()> {
    let m = builders::square_bit_from_cosets::<Rational>();
    println!("outcomes {:?}", m.testspace().labels());
    for t in 0..m.testspace().tests().len() {
        println!("test {t}: {:?}", m.test_labels(t));
    }
    println!("dim {}, irreducible {}", m.dim(), analysis::is_irreducible(&m)?.holds);
    let base = spinforms::canonical_inner_product(&m)?;
    println!("canonical parameters {}", spinforms::parameters(&base, &m)?.to_json());

    let r = builders::reducible_fixture::<Rational>();
    println!("reducible fixture irreducible: {}", analysis::is_irreducible(&r)?.holds);
    Ok(())
}
