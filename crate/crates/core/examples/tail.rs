use invcorr::dependence::tail_dependence_estimate;
use invcorr::models::{FrechetPair, IndependentUniform, Sampler};

// Lower tail dependence of the positive Fréchet copula equals its weight r.
fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in [0.0, 0.4, 0.8] {
        let s = FrechetPair::positive(r)?.sample(1_000_000, 8);
        for u in [0.1, 0.01, 0.001] {
            let t = tail_dependence_estimate(&s, u)?;
            let flag = if t.stable { "" } else { " (too few tail points)" };
            println!("r = {r}: u = {u:<5} lambda = {:.4} ± {:.4}{flag}", t.lambda, t.se);
        }
    }
    let ind = tail_dependence_estimate(&IndependentUniform(2).sample(1_000_000, 9), 0.01)?;
    println!("independent: {:.4}", ind.lambda);
    Ok(())
}
