//! Is a correlation matrix the pairwise correlation of some Γ·U model?
//! Membership in the clique partition polytope answers it, and the
//! certificate's weights build the model.

use invcorr::models::{model_from_membership, Sampler};
use invcorr::polytope::{membership, membership_exact, reconstruct, CorrMatrix, DEFAULT_TOL};
use invcorr::stats::correlation_matrix;

fn show(label: &str, r: &CorrMatrix) -> Result<(), invcorr::error::Error> {
    let cert = membership(r, DEFAULT_TOL)?;
    println!("{label}: member = {}, residual = {:?}", cert.member, cert.residual);
    if let Some(reason) = &cert.reason {
        println!("  {reason}");
    }
    for w in &cert.weights {
        println!("  {:.4} on {:?}", w.alpha, w.partition.blocks);
    }
    if cert.member {
        let back = reconstruct(&cert.partitions()?)?;
        println!("  reconstruction error {:.1e}", back.max_abs_diff(r));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A valid correlation matrix that no Γ·U model reaches.
    let outside = CorrMatrix::from_upper(3, &[0.8, 0.5, 0.2])?;
    show("(0.8, 0.5, 0.2)", &outside)?;
    println!("  exact arithmetic agrees: member = {}", membership_exact(&outside)?.member);

    show("negative entry", &CorrMatrix::from_upper(3, &[0.3, -0.1, 0.2])?)?;

    let inside = CorrMatrix::from_upper(4, &[0.6, 0.3, 0.2, 0.3, 0.2, 0.5])?;
    show("4x4 target", &inside)?;

    let model = model_from_membership(&membership(&inside, DEFAULT_TOL)?)?;
    let s = model.sample(200_000, 7);
    println!("empirical correlations from the certified model:");
    for row in correlation_matrix(&s) {
        println!("  {}", row.iter().map(|v| format!("{v:6.3}")).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}
