use crate::error::{Error, Result};

fn check(theta: f64, u: &[f64]) -> Result<()> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(Error::validation(format!("theta = {theta} outside [-1, 1]")));
    }
    if u.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::validation("arguments must lie in [0, 1]"));
    }
    Ok(())
}

/// Trivariate FGM copula `u1 u2 u3 (1 + theta (1-u1)(1-u2)(1-u3))`.
pub fn fgm_copula(theta: f64, u: [f64; 3]) -> Result<f64> {
    check(theta, &u)?;
    let [a, b, c] = u;
    Ok(a * b * c * (1.0 + theta * (1.0 - a) * (1.0 - b) * (1.0 - c)))
}

/// `P(U_1 <= s, U_2 > t2, U_3 > t3) / s` under the FGM copula, by
/// inclusion–exclusion on the copula.
pub fn fgm_conditional_upper(theta: f64, s: f64, t2: f64, t3: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::validation("s must be positive"));
    }
    let c = |x, y, z| fgm_copula(theta, [x, y, z]);
    Ok((s - c(s, t2, 1.0)? - c(s, 1.0, t3)? + c(s, t2, t3)?) / s)
}

/// `d/ds P(U > t | U_1 <= s)` with `t1 = 0`. The conditional probability is
/// affine in `s`, so the derivative is the constant
/// `-theta t2 t3 (1 - t2)(1 - t3)`.
pub fn fgm_conditional_derivative(theta: f64, t2: f64, t3: f64) -> Result<f64> {
    check(theta, &[t2, t3])?;
    Ok(-theta * t2 * t3 * (1.0 - t2) * (1.0 - t3))
}
