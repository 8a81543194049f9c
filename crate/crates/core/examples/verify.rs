//! The invariance oracle: exact on finite laws, statistical on samplers.

use invcorr::bivariate::{random, JointPmf};
use invcorr::models::MarkovModel;
use invcorr::polytope::CorrMatrix;
use invcorr::verify::{verify_exact, verify_mc, Mode};
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bi = JointPmf::new(vec![0.0, 1.0], vec![0.5, 3.0], vec![vec![0.35, 0.15], vec![0.1, 0.4]])?;
    for mode in [Mode::Increasing, Mode::All] {
        let r = verify_exact(&bi, mode, 20, 0, 1e-12)?;
        println!(
            "bi-atomic, {mode:?}: {:?}, max deviation {:.3}, structure says {:?}",
            r.verdict,
            r.max_abs_deviation,
            r.structural.map(|s| s.rule)
        );
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let (qf, r) = random::quasi_frechet(&mut rng, 5);
    let rep = verify_exact(&qf, Mode::All, 50, 1, 1e-12)?;
    println!("random quasi-Fréchet law, r = {r:.4}: {:?} over {} transforms", rep.verdict, rep.records.len());
    let noisy = random::perturb_symmetric(&mut rng, &qf);
    let rep = verify_exact(&noisy, Mode::All, 50, 1, 1e-12)?;
    println!(
        "after a symmetric perturbation: {:?}, failing ids {:?}",
        rep.verdict,
        &rep.failing_ids[..rep.failing_ids.len().min(8)]
    );

    let m = MarkovModel::new(vec![0.6, 0.3])?;
    let target = CorrMatrix::from_upper(3, &[0.6, 0.18, 0.3])?;
    let rep = verify_mc(&m, &target, Mode::All, 20, 100_000, 9, 0.01)?;
    println!(
        "Markov sampler: {:?}, z = {:.2}, {}",
        rep.verdict,
        rep.z.unwrap_or(f64::NAN),
        rep.se_method.as_deref().unwrap_or("")
    );
    println!("{}", serde_json::to_string_pretty(&rep.records[..2])?);
    Ok(())
}
