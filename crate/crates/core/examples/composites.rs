//! Product states, the total-probability law, and the qubit correlator.

use gptj::{builders, composites, hermitian, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gptj::Result<()> {
    let a = builders::classical::<Rational>(2);
    let b = builders::square_bit::<Rational>();
    let omega = composites::product_state(&a, &b, &a.orbit_covectors()[0], &b.orbit_covectors()[0])?;
    let test = |m: &gptj::model::Model<Rational>| -> Vec<Vec<Rational>> {
        m.testspace().tests()[0].iter().map(|&x| m.outcome_vector(x).to_vec()).collect()
    };
    let audit = composites::total_probability_audit(&a, &b, &omega, &test(&a), &test(&b));
    println!("classical ⊗ square bit, total probability: {}", audit.holds);

    let q = builders::quantum(2)?;
    let conj = composites::build_conjugate(&q)?;
    println!("η(x, x̄) = 1/2 on the battery: {}", composites::is_correlator(&q, &conj));
    println!("isomorphism state: {}", composites::is_isomorphism_state(&q, &conj.model, &conj.correlator)?.holds);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = hermitian::haar_unitary(2, &mut rng);
    let basis: Vec<Vec<f64>> =
        (0..2).map(|i| hermitian::to_coords(&hermitian::projector(&u.column(i).into_owned()))).collect();
    let audit = composites::total_probability_audit(&q, &conj.model, &conj.correlator, &basis, &basis);
    println!("random basis: residual {:.1e}", audit.left_residual.max(audit.right_residual));
    Ok(())
}
