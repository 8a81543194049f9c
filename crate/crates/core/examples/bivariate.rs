//! Finite bivariate laws: which ones keep their correlation under every
//! common transform of the two coordinates.

use invcorr::bivariate::{
    correlation, is_quasi_independent, make_quasi_frechet, quasi_frechet_fit, r_bounds, random_rearrangement,
    transform_correlation, tri_atomic_eps_range, tri_atomic_quasi_independent, JointPmf,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = [1.0 / 3.0; 3];
    let (lo, hi) = tri_atomic_eps_range(&u, &u);
    println!("tri-atomic cyclic perturbation admissible for eps in [{lo:.4}, {hi:.4}]");

    let qi = tri_atomic_quasi_independent(&u, &u, hi)?;
    println!("P = {:?}", qi.probs());
    println!("quasi-independent: {}", is_quasi_independent(&qi, 1e-12));
    println!(
        "corr = {:.3e}, corr of squares = {:.3e}",
        correlation(&qi)?,
        transform_correlation(&qi, &[1.0, 4.0, 9.0])?
    );
    println!("random rearrangement is the product law: {:?}", random_rearrangement(&qi).probs());

    let p = [0.5, 0.3, 0.2];
    let b = r_bounds(&p)?;
    println!("admissible invariant r for p = {p:?}: [{:.4}, {}]", b.lower, b.upper);
    let qf = make_quasi_frechet(vec![-1.0, 0.0, 4.0], &p, 0.3, None)?;
    println!("quasi-Fréchet fit: {:?}", quasi_frechet_fit(&qf, 1e-12)?);
    for g in [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [5.0, -2.0, 0.5]] {
        println!("  g on grid {g:?}: corr = {:.6}", transform_correlation(&qf, &g)?);
    }

    // Different marginals: correlation moves with the transform.
    let other = JointPmf::new(
        vec![0.0, 1.0, 2.0],
        vec![0.0, 1.0, 3.0],
        vec![vec![0.20, 0.05, 0.05], vec![0.05, 0.20, 0.05], vec![0.05, 0.05, 0.30]],
    )?;
    let n = other.grid().len();
    let square: Vec<f64> = other.grid().iter().map(|x| x * x).collect();
    println!(
        "different marginals: corr {:.4} vs corr of squares {:.4} on a {n}-point grid",
        correlation(&other)?,
        transform_correlation(&other, &square)?
    );
    Ok(())
}
