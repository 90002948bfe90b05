//! Spin factors: window, orthogonalizing form and self-duality of the Lorentz cone.

use gptj::{analysis, builders, spinforms};

fn main() -> gptj::Result<()> {
    for k in [2, 3, 5, 8] {
        let m = builders::spin_factor(k)?;
        let base = spinforms::canonical_inner_product(&m)?;
        let w = spinforms::positivity_window(&base, &m)?;
        let orth = spinforms::orthogonalizing_form(&m)?.form.expect("spin factors are minimizing");
        let sd = analysis::is_self_dual(&m, &orth)?;
        println!("k = {k}: window [{:.3}, {:.3}], self-dual {} ({:?})", w.lower, w.upper, sd.holds, sd.mode);
    }
    Ok(())
}
