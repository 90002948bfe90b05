//! Strong-conjugate dilation of a mixed qubit state.

use gptj::{builders, composites, hermitian};

fn main() -> gptj::Result<()> {
    let m = builders::quantum(2)?;
    let w = hermitian::diagonal(&[0.9, 0.1]);
    let d = composites::strong_conjugate_dilation(&m, &w)?;
    println!("eigenvalues {:?}", d.eigenvalues);
    println!("marginal residual {:.1e}", d.marginal_residual);
    println!("stabilizer residual {:.1e}", d.stabilizer_residual);
    for row in &d.correlations {
        println!("  {}", row.iter().map(|v| format!("{v:8.4}")).collect::<String>());
    }
    Ok(())
}
