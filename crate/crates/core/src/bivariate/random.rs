//! Seeded generators of finite bivariate models with known structure, for
//! property tests, cross-checks, and demos.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::construct::{make_quasi_frechet, make_quasi_independent};
use super::pmf::JointPmf;
use super::structure::r_bounds;

/// Values of a random transform at `n` atoms: i.i.d. standard normal,
/// redrawn if constant, sorted when `monotone`.
pub fn g_values<R: Rng + ?Sized>(rng: &mut R, n: usize, monotone: bool) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if v.windows(2).all(|w| w[0] == w[1]) && n > 1 {
            continue;
        }
        if monotone {
            v.sort_by(f64::total_cmp);
        }
        return v;
    }
}

/// Random probability vector with every entry at least `floor / n`.
pub fn prob_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let mixed: Vec<f64> = raw.iter().map(|v| (1.0 - floor) * v / total + floor / n as f64).collect();
    let s: f64 = mixed.iter().sum();
    mixed.iter().map(|v| v / s).collect()
}

/// `n` strictly increasing, well separated atoms.
pub fn atoms<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut x: f64 = rng.random_range(-2.0..2.0);
    (0..n)
        .map(|_| {
            x += 0.5 + rng.random::<f64>();
            x
        })
        .collect()
}

/// Random antisymmetric matrix with zero row sums, supported on the
/// indices in `allowed` (a sum of 3-cycles). Zero when fewer than three
/// indices are allowed.
pub fn remainder<R: Rng + ?Sized>(rng: &mut R, n: usize, allowed: &[usize]) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; n]; n];
    let k = allowed.len();
    if k < 3 {
        return s;
    }
    let cycles = 1 + rng.random_range(0..k);
    for _ in 0..cycles {
        let a = allowed[rng.random_range(0..k)];
        let mut b = allowed[rng.random_range(0..k)];
        while b == a {
            b = allowed[rng.random_range(0..k)];
        }
        let mut c = allowed[rng.random_range(0..k)];
        while c == a || c == b {
            c = allowed[rng.random_range(0..k)];
        }
        let w: f64 = StandardNormal.sample(rng);
        for (i, j) in [(a, b), (b, c), (c, a)] {
            s[i][j] += w;
            s[j][i] -= w;
        }
    }
    s
}

/// Largest `t >= 0` with `base + t s >= 0` entrywise.
pub fn max_scale(base: &[Vec<f64>], s: &[Vec<f64>]) -> f64 {
    let mut t = f64::INFINITY;
    for (rb, rs) in base.iter().zip(s) {
        for (b, v) in rb.iter().zip(rs) {
            if *v < 0.0 {
                t = t.min(b / -v);
            }
        }
    }
    t
}

/// Quasi-r-Fréchet pmf on `n` atoms with a random non-exchangeable remainder.
/// Returns the pmf and its invariant correlation.
pub fn quasi_frechet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (JointPmf, f64) {
    let p = prob_vector(rng, n, 0.3);
    let bounds = r_bounds(&p).expect("valid p");
    let r = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(bounds.lower..=1.0) };
    let base: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { r * p[i] } else { 0.0 } + (1.0 - r) * p[i] * p[j]).collect())
        .collect();
    let all: Vec<usize> = (0..n).collect();
    let mut s = remainder(rng, n, &all);
    let t = max_scale(&base, &s);
    let scale = if t.is_finite() { t * rng.random::<f64>() } else { 0.0 };
    for row in s.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    let pmf = make_quasi_frechet(atoms(rng, n), &p, r, Some(&s)).expect("feasible by construction");
    (pmf, r)
}

/// Quasi-independent pmf whose marginals live on different (overlapping)
/// atom sets of sizes `m` and `n`.
pub fn quasi_independent<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> JointPmf {
    let total = m.max(n) + rng.random_range(0..=2);
    let grid = atoms(rng, total);
    let pick = |rng: &mut R, k: usize| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..total).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        let mut chosen = idx[..k].to_vec();
        chosen.sort_unstable();
        chosen
    };
    let xi = pick(rng, m);
    let yi = pick(rng, n);
    let p = prob_vector(rng, m, 0.3);
    let q = prob_vector(rng, n, 0.3);
    let mut pg = vec![0.0; total];
    let mut qg = vec![0.0; total];
    for (k, &i) in xi.iter().enumerate() {
        pg[i] = p[k];
    }
    for (k, &j) in yi.iter().enumerate() {
        qg[j] = q[k];
    }
    let base: Vec<Vec<f64>> = pg.iter().map(|a| qg.iter().map(|b| a * b).collect()).collect();
    let both: Vec<usize> = xi.iter().copied().filter(|i| yi.contains(i)).collect();
    let mut s = remainder(rng, total, &both);
    let t = max_scale(&base, &s);
    let scale = if t.is_finite() { t * rng.random::<f64>() } else { 0.0 };
    for row in s.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    // The constructor indexes the remainder by the atoms actually in use.
    let mut used: Vec<usize> = xi.iter().chain(&yi).copied().collect();
    used.sort_unstable();
    used.dedup();
    let s: Vec<Vec<f64>> = used.iter().map(|&a| used.iter().map(|&b| s[a][b]).collect()).collect();
    let xa: Vec<f64> = xi.iter().map(|&i| grid[i]).collect();
    let ya: Vec<f64> = yi.iter().map(|&j| grid[j]).collect();
    make_quasi_independent(xa, &p, ya, &q, &s).expect("feasible by construction")
}

/// Moves mass `delta` onto the diagonal cells `(a,a), (b,b)` and off
/// `(a,b), (b,a)` of a square pmf, keeping both marginals. The step is a
/// random fraction of the largest feasible one.
pub fn perturb_symmetric<R: Rng + ?Sized>(rng: &mut R, pmf: &JointPmf) -> JointPmf {
    let probs = pmf.grid_probs();
    let n = probs.len();
    let xi = pmf.x_grid_index();
    let yi = pmf.y_grid_index();
    let shared: Vec<usize> = xi.iter().copied().filter(|i| yi.contains(i)).collect();
    assert!(shared.len() >= 2, "perturbation needs two shared atoms");
    let a = shared[rng.random_range(0..shared.len())];
    let mut b = shared[rng.random_range(0..shared.len())];
    while b == a {
        b = shared[rng.random_range(0..shared.len())];
    }
    let up = rng.random_bool(0.5);
    let room = if up { probs[a][b].min(probs[b][a]) } else { probs[a][a].min(probs[b][b]) };
    let delta = room * rng.random_range(0.2..0.9) * if up { 1.0 } else { -1.0 };
    let mut g = probs;
    g[a][a] += delta;
    g[b][b] += delta;
    g[a][b] -= delta;
    g[b][a] -= delta;
    debug_assert!(g.len() == n);
    let probs = xi.iter().map(|&i| yi.iter().map(|&j| g[i][j].max(0.0)).collect()).collect();
    JointPmf::new(pmf.x_atoms().to_vec(), pmf.y_atoms().to_vec(), probs).expect("marginals preserved")
}

/// Arbitrary pmf with `m x n` cells and random atoms.
pub fn arbitrary<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> JointPmf {
    let cells = prob_vector(rng, m * n, 0.2);
    let probs = cells.chunks(n).map(<[f64]>::to_vec).collect();
    JointPmf::new(atoms(rng, m), atoms(rng, n), probs).expect("positive cells")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivariate::structure::{is_quasi_independent, quasi_frechet_fit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_claimed_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(2..=6);
            let (pmf, r) = quasi_frechet(&mut rng, n);
            let fit = quasi_frechet_fit(&pmf, 1e-12).unwrap().expect("quasi-Fréchet");
            assert!((fit - r).abs() < 1e-12);
            let m = rng.random_range(2..=5);
            let n = rng.random_range(2..=5);
            let qi = quasi_independent(&mut rng, m, n);
            assert!(is_quasi_independent(&qi, 1e-12));
        }
    }
}
