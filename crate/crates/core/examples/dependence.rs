//! Orthant and regression dependence for finite laws.

use invcorr::bivariate::{make_quasi_frechet, tri_atomic_quasi_independent};
use invcorr::dependence::{
    discretized_gamma_grid, fgm_conditional_derivative, is_nqd, is_pqd, is_prd, quadrant_gaps, Conditioning, GridPmf,
};
use invcorr::models::GammaModel;
use invcorr::partitions::SetPartition;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = [1.0 / 3.0; 3];
    let qi = tri_atomic_quasi_independent(&u, &u, 1.0 / 9.0)?;
    println!("quadrant gaps P(X<=a, Y<=b) - P(X<=a)P(Y<=b):");
    for row in quadrant_gaps(qi.probs()) {
        println!("  {row:?}");
    }
    println!("PQD {}, NQD {}", is_pqd(&qi, 1e-12), is_nqd(&qi, 1e-12));
    let rep = is_prd(&GridPmf::from_joint(&qi), &[0, 1], Conditioning::Equal, 1e-12)?;
    println!("PRD {} after {} up-sets; witness {:?}", rep.prd, rep.upsets_checked, rep.witness);

    let frechet = make_quasi_frechet(vec![1.0, 2.0, 3.0, 4.0], &[0.1, 0.4, 0.3, 0.2], 0.4, None)?;
    let grid = GridPmf::from_joint(&frechet);
    for cond in [Conditioning::Equal, Conditioning::AtMost] {
        println!("r = 0.4 Fréchet law, {cond:?} conditioning: PRD {}", is_prd(&grid, &[0, 1], cond, 1e-12)?.prd);
    }

    let m = GammaModel::new(3, vec![(SetPartition::full(3), 0.5), (SetPartition::singletons(3), 0.5)])?;
    let g = discretized_gamma_grid(&m, 3)?;
    println!(
        "ceil(3U) Γ·U grid with {} cells: PRD {}",
        g.cell_count(),
        is_prd(&g, &[0, 1, 2], Conditioning::Equal, 1e-12)?.prd
    );

    // Pairwise independent yet not PRD in the conditioning coordinate.
    println!("FGM d/ds P(U2 > 1/2, U3 > 1/2 | U1 = s) = {}", fgm_conditional_derivative(1.0, 0.5, 0.5)?);
    Ok(())
}
