//! Special functions used by the ranking curve: the upper incomplete gamma
//! function Γ(s,x) for real, possibly negative s, and Riemann zeta sums.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("Γ(s,x) requires x > 0, got x = {0}")]
    NonPositiveX(f64),
    #[error("Γ(s,x) with s ≤ 0 requires non-integer s, got s = {0}")]
    NonPositiveIntegerS(f64),
    #[error("no convergence computing Γ({s}, {x})")]
    NoConvergence { s: f64, x: f64 },
}

const MAX_ITER: usize = 400;

/// Upper incomplete gamma function Γ(s,x) = ∫_x^∞ u^{s−1} e^{−u} du.
///
/// For s > 0: series for the lower function γ(s,x) when x < s+1, Lentz
/// continued fraction otherwise — the usual split that keeps both halves
/// well conditioned. For s ≤ 0 (non-integer only): computed from
/// Γ(s + ⌈|s|⌉ + 1, x) by the downward recurrence
/// Γ(σ−1, x) = (Γ(σ, x) − x^{σ−1} e^{−x}) / (σ−1).
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) {
        return Err(SpecialError::NonPositiveX(x));
    }
    if s > 0.0 {
        return gamma_upper_positive(s, x);
    }
    if s == s.trunc() {
        return Err(SpecialError::NonPositiveIntegerS(s));
    }
    let steps = (-s).ceil() as u32 + 1;
    let mut sigma = s + f64::from(steps);
    let mut g = gamma_upper_positive(sigma, x)?;
    for _ in 0..steps {
        sigma -= 1.0;
        g = (g - pow_exp(sigma, x)) / sigma;
    }
    Ok(g)
}

/// x^s · e^{−x}, evaluated in log space (x > 0).
fn pow_exp(s: f64, x: f64) -> f64 {
    (s * x.ln() - x).exp()
}

fn gamma_upper_positive(s: f64, x: f64) -> Result<f64, SpecialError> {
    if x < s + 1.0 {
        // Γ(s,x) = Γ(s) − γ(s,x), series for γ.
        let gamma_s = statrs::function::gamma::gamma(s);
        Ok(gamma_s - lower_series(s, x)?)
    } else {
        gamma_upper_cf(s, x)
    }
}

/// γ(s,x) = x^s e^{−x} Σ_{n≥0} x^n / (s(s+1)⋯(s+n)), for x < s+1.
fn lower_series(s: f64, x: f64) -> Result<f64, SpecialError> {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut denom = s;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            return Ok(pow_exp(s, x) * sum);
        }
    }
    Err(SpecialError::NoConvergence { s, x })
}

/// Modified Lentz continued fraction for Γ(s,x), x ≥ s+1:
/// Γ(s,x) = x^s e^{−x} / (x + 1 − s − 1(1−s)/(x + 3 − s − 2(2−s)/(…))).
fn gamma_upper_cf(s: f64, x: f64) -> Result<f64, SpecialError> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            return Ok(pow_exp(s, x) * h);
        }
    }
    Err(SpecialError::NoConvergence { s, x })
}

/// Partial zeta sum ζ_N(z) = Σ_{i=1}^{n} i^{−z}, summed smallest-first.
pub fn zeta_partial(z: f64, n: usize) -> f64 {
    let mut sum = 0.0;
    for i in (1..=n).rev() {
        sum += (i as f64).powf(-z);
    }
    sum
}

/// Riemann ζ(z) for z > 1: partial sum plus the Euler–Maclaurin tail
/// M^{1−z}/(z−1) + M^{−z}/2 − z·M^{−z−1}/12, error O(z³ M^{−z−3}).
pub fn zeta(z: f64) -> f64 {
    const M: usize = 20_000;
    let m = M as f64;
    let head = zeta_partial(z, M - 1);
    head + m.powf(1.0 - z) / (z - 1.0) + 0.5 * m.powf(-z) - z * m.powf(-z - 1.0) / 12.0
}
