//! Zipf weights, Pareto tails, and the jump-count time change.
//!
//! With weights following Zipf's law, w_i = a(N/i)^{1/b}, the empirical
//! weight distribution converges to the Pareto law λ([w,∞)) = (a/w)^b.
//! Reading the ranking process against its own total jump count S^N —
//! instead of wall-clock time — removes both the common activity profile
//! ã(t) and the scale a, leaving a one-parameter family of curves
//!
//! x(S) = N − Σ_i exp(−w_i S / Z(N))
//!      = N − b θ^b Γ(−b, c) = N − N e^{−c} + θ^b Γ(1−b, c),
//!
//! with θ = S/ζ_N(1/b) and c = θ/N^{1/b}. The first line is the finite sum
//! over the population; the Γ lines are its Pareto-integral approximation,
//! exact for the continuous law and within an Euler–Maclaurin correction
//! (≈ e^{−c}/2 particles) of the finite sum. Everything here keeps the
//! finite sums ζ_N and Z(N) rather than their slowly-approached
//! asymptotics.

use crate::intensity::{ActivityProfile, IntensityError, IntensitySpec, MixtureSpec};
use crate::ranking::{ParticleSystem, RankingError};
use crate::special::{self, SpecialError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimechangeError {
    #[error("Zipf scale a = {0} must be positive and finite")]
    BadScale(f64),
    #[error("Zipf exponent b = {0} must be positive and finite")]
    BadExponent(f64),
    #[error("population must be non-empty")]
    EmptyFamily,
    #[error("subset size {n} outside 1..={total}")]
    BadSubset { n: usize, total: usize },
    #[error("the Γ form needs 0 < b < 1, got b = {0}")]
    GammaNeedsSmallB(f64),
    #[error("total jump count S = {0} must be finite and ≥ 0")]
    BadTotalJumps(f64),
    #[error("Pareto tail needs w ≥ 0, got {0}")]
    BadTailPoint(f64),
    #[error("time change needs every class driven by one common activity profile")]
    NotCommonProfile,
    #[error("scaled time {0} must be finite and ≥ 0")]
    BadScaledTime(f64),
    #[error("total weight Z = {0} must be positive and finite")]
    BadTotalWeight(f64),
    #[error("scaled time needs jump {needed} but only {available} happened before the horizon")]
    HorizonExhausted { needed: usize, available: usize },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Intensity(#[from] IntensityError),
    #[error(transparent)]
    Ranking(#[from] RankingError),
}

/// The Zipf weight family w_i = a(N/i)^{1/b}, i = 1..N: strictly
/// decreasing, with scale a and tail exponent b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfFamily {
    a: f64,
    b: f64,
    n: usize,
}

impl ZipfFamily {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self, TimechangeError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(TimechangeError::BadScale(a));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(TimechangeError::BadExponent(b));
        }
        if n == 0 {
            return Err(TimechangeError::EmptyFamily);
        }
        Ok(ZipfFamily { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// w_i for 1-based rank i.
    pub fn weight(&self, i: usize) -> f64 {
        debug_assert!(1 <= i && i <= self.n);
        self.a * (self.n as f64 / i as f64).powf(1.0 / self.b)
    }
}

/// All N weights together with the exact partial sum Z(N, n) over the n
/// largest and the exact full sum Z(N). The sums are taken smallest term
/// first; the asymptotic formulas are never substituted here because they
/// are approached too slowly at realistic N.
pub fn zipf_weights_and_z(
    fam: &ZipfFamily,
    n_subset: usize,
) -> Result<(Vec<f64>, f64, f64), TimechangeError> {
    if !(1 <= n_subset && n_subset <= fam.n) {
        return Err(TimechangeError::BadSubset {
            n: n_subset,
            total: fam.n,
        });
    }
    let weights: Vec<f64> = (1..=fam.n).map(|i| fam.weight(i)).collect();
    let z_subset: f64 = weights[..n_subset].iter().rev().sum();
    let z_total: f64 = weights.iter().rev().sum();
    Ok((weights, z_subset, z_total))
}

/// The three asymptotic regimes of Z(N): a·N·b/(b−1) for b > 1,
/// a·N·ln N for b = 1, and a·N^{1/b}·ζ(1/b) for 0 < b < 1.
pub fn zipf_z_asymptotic(fam: &ZipfFamily) -> f64 {
    let n = fam.n as f64;
    if fam.b > 1.0 {
        fam.a * n * fam.b / (fam.b - 1.0)
    } else if fam.b == 1.0 {
        fam.a * n * n.ln()
    } else {
        fam.a * n.powf(1.0 / fam.b) * special::zeta(1.0 / fam.b)
    }
}

/// The Pareto tail λ([w, ∞)) = (a/w)^b for w ≥ a, 1 below the scale.
pub fn pareto_tail(a: f64, b: f64, w: f64) -> Result<f64, TimechangeError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(TimechangeError::BadScale(a));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(TimechangeError::BadExponent(b));
    }
    if !(w >= 0.0) {
        return Err(TimechangeError::BadTailPoint(w));
    }
    Ok(if w < a { 1.0 } else { (a / w).powf(b) })
}

/// Which expression evaluates the ranking curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveForm {
    /// the exact finite sum over the population; valid for every b > 0
    Sum,
    /// the Pareto-integral closed form via Γ(1−b, ·); needs 0 < b < 1
    Gamma,
}

/// The expected-position curve x(S) of the time-changed process under Zipf
/// weights. The scale a cancels between the weights and Z(N), so the curve
/// depends only on (N, b) — the basis of the one-parameter fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankingCurve {
    n: usize,
    b: f64,
    zeta_n: f64,
    form: CurveForm,
}

impl RankingCurve {
    pub fn new(n: usize, b: f64, form: CurveForm) -> Result<Self, TimechangeError> {
        if n == 0 {
            return Err(TimechangeError::EmptyFamily);
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(TimechangeError::BadExponent(b));
        }
        if form == CurveForm::Gamma && b >= 1.0 {
            return Err(TimechangeError::GammaNeedsSmallB(b));
        }
        Ok(RankingCurve {
            n,
            b,
            zeta_n: special::zeta_partial(1.0 / b, n),
            form,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// ζ_N(1/b), the finite normalizer shared by both forms.
    pub fn zeta_n(&self) -> f64 {
        self.zeta_n
    }

    pub fn form(&self) -> CurveForm {
        self.form
    }

    fn check_s(&self, s_total: f64) -> Result<(), TimechangeError> {
        if !(s_total >= 0.0 && s_total.is_finite()) {
            return Err(TimechangeError::BadTotalJumps(s_total));
        }
        Ok(())
    }

    /// x(S): strictly increasing from x(0) = 0 toward N.
    pub fn x_at(&self, s_total: f64) -> Result<f64, TimechangeError> {
        self.check_s(s_total)?;
        if s_total == 0.0 {
            return Ok(0.0);
        }
        let theta = s_total / self.zeta_n;
        match self.form {
            CurveForm::Sum => {
                // Σ_i (1 − e^{−θ i^{−1/b}}), small terms first
                let inv_b = 1.0 / self.b;
                Ok((1..=self.n)
                    .rev()
                    .map(|i| -(-theta * (i as f64).powf(-inv_b)).exp_m1())
                    .sum())
            }
            CurveForm::Gamma => {
                let c = theta / (self.n as f64).powf(1.0 / self.b);
                let tail = special::upper_incomplete_gamma(1.0 - self.b, c)?;
                Ok(-(self.n as f64) * (-c).exp_m1() + theta.powf(self.b) * tail)
            }
        }
    }

    /// x(S) over many S at once. For the sum form the rank powers i^{−1/b}
    /// are computed once and shared, which is what makes repeated loss
    /// evaluations in fitting affordable.
    pub fn x_many(&self, s_values: &[f64]) -> Result<Vec<f64>, TimechangeError> {
        match self.form {
            CurveForm::Sum => {
                let inv_b = 1.0 / self.b;
                let powers: Vec<f64> =
                    (1..=self.n).rev().map(|i| (i as f64).powf(-inv_b)).collect();
                s_values
                    .iter()
                    .map(|&s| {
                        self.check_s(s)?;
                        let theta = s / self.zeta_n;
                        Ok(powers.iter().map(|&p| -(-theta * p).exp_m1()).sum())
                    })
                    .collect()
            }
            CurveForm::Gamma => s_values.iter().map(|&s| self.x_at(s)).collect(),
        }
    }

    /// The Γ form written with Γ(−b, ·), before integration by parts:
    /// N − b θ^b Γ(−b, c). Mathematically identical to the Γ form of
    /// `x_at` and kept as a cross-check of the special-function path.
    pub fn x_via_gamma_neg(&self, s_total: f64) -> Result<f64, TimechangeError> {
        self.check_s(s_total)?;
        if self.b >= 1.0 {
            return Err(TimechangeError::GammaNeedsSmallB(self.b));
        }
        if s_total == 0.0 {
            return Ok(0.0);
        }
        let theta = s_total / self.zeta_n;
        let c = theta / (self.n as f64).powf(1.0 / self.b);
        let tail = special::upper_incomplete_gamma(-self.b, c)?;
        Ok(self.n as f64 - self.b * theta.powf(self.b) * tail)
    }
}

/// A mixture with one particle slot per Zipf rank: class i holds fraction
/// 1/N and jumps at rate w_i modulated by the given profile.
pub fn zipf_mixture(
    fam: &ZipfFamily,
    profile: &ActivityProfile,
) -> Result<MixtureSpec, TimechangeError> {
    let r = 1.0 / fam.n as f64;
    let atoms = (1..=fam.n)
        .map(|i| {
            Ok((
                r,
                IntensitySpec::common_profile(fam.weight(i), profile.clone())?,
            ))
        })
        .collect::<Result<Vec<_>, IntensityError>>()?;
    Ok(MixtureSpec::build(atoms)?)
}

/// The periodic part A_p(t) = A(t) − t of a normalized activity profile's
/// cumulative, and the shifted origin t + A_p(t). Sampling the boundary at
/// t_n = t_0 + nT collapses to the constant-profile formula started from
/// the shifted origin.
pub fn periodic_shift(profile: &ActivityProfile, t0: f64) -> Result<(f64, f64), TimechangeError> {
    if !(t0 >= 0.0 && t0.is_finite()) {
        return Err(TimechangeError::BadScaledTime(t0));
    }
    let a_p = profile.cumulative(t0) - t0;
    Ok((a_p, t0 + a_p))
}

/// Y_C^N read against the jump count: the boundary fraction right after
/// ⌊Z·t⌋ jump events. At t = 0 no event has happened and the value is 0;
/// as N grows the curve approaches 1 − ∫ e^{−wt} λ(dw) regardless of the
/// activity profile.
pub fn timechange_observable(
    system: &ParticleSystem,
    z_total: f64,
    t: f64,
) -> Result<f64, TimechangeError> {
    if system.mixture().common_profile().is_none() {
        return Err(TimechangeError::NotCommonProfile);
    }
    if !(z_total > 0.0 && z_total.is_finite()) {
        return Err(TimechangeError::BadTotalWeight(z_total));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(TimechangeError::BadScaledTime(t));
    }
    let jumps = system.total_jumps();
    let u = z_total * t;
    if !(u < jumps.total() as f64) {
        return Err(TimechangeError::HorizonExhausted {
            needed: u.floor() as usize,
            available: jumps.total(),
        });
    }
    let k = u.floor() as usize;
    if k == 0 {
        return Ok(0.0);
    }
    let s = jumps.inverse((k - 1) as f64).expect("k − 1 < total");
    Ok(system.boundary_fraction(s)?)
}

/// The finite-population limit curve of the time change,
/// 1 − (1/N) Σ_i e^{−w_i t}.
pub fn timechange_limit(weights: &[f64], t: f64) -> f64 {
    let mean: f64 = weights.iter().map(|&w| (-w * t).exp()).sum::<f64>() / weights.len() as f64;
    1.0 - mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::LimitEvaluator;
    use crate::ranking::Layout;

    #[test]
    fn zipf_weights_small_example() {
        // a = 1, b = 1/2: w_i = (4/i)², so (16, 4, 16/9, 1) summing to 205/9
        let fam = ZipfFamily::new(1.0, 0.5, 4).unwrap();
        let (w, z2, z4) = zipf_weights_and_z(&fam, 2).unwrap();
        assert_eq!(w.len(), 4);
        assert!((w[0] - 16.0).abs() < 1e-12);
        assert!((w[1] - 4.0).abs() < 1e-12);
        assert!((w[2] - 16.0 / 9.0) .abs() < 1e-12);
        assert!((w[3] - 1.0).abs() < 1e-12);
        assert!((z2 - 20.0).abs() < 1e-12);
        assert!((z4 - 205.0 / 9.0).abs() < 1e-12);
        let (_, z_all, z_total) = zipf_weights_and_z(&fam, 4).unwrap();
        assert_eq!(z_all, z_total);
    }

    #[test]
    fn zipf_subset_bounds() {
        let fam = ZipfFamily::new(1.0, 0.5, 4).unwrap();
        assert!(matches!(
            zipf_weights_and_z(&fam, 0),
            Err(TimechangeError::BadSubset { .. })
        ));
        assert!(matches!(
            zipf_weights_and_z(&fam, 5),
            Err(TimechangeError::BadSubset { .. })
        ));
    }

    #[test]
    fn huge_b_flattens_the_weights() {
        let fam = ZipfFamily::new(2.0, 1e6, 10).unwrap();
        let (_, _, z) = zipf_weights_and_z(&fam, 1).unwrap();
        assert!((z - 20.0).abs() < 1e-3);
    }

    #[test]
    fn asymptotic_regimes() {
        let heavy = ZipfFamily::new(1.0, 2.0, 1_000_000).unwrap();
        assert!((zipf_z_asymptotic(&heavy) - 2e6).abs() < 1e-6);
        let log = ZipfFamily::new(1.0, 1.0, 22026).unwrap();
        assert!((zipf_z_asymptotic(&log) - 22026.0 * (22026f64).ln()).abs() < 1e-9);
        // for b < 1 the exact sum approaches the asymptotic from below,
        // slowly and monotonely
        let mut prev_ratio = 0.0;
        for &n in &[100usize, 1000, 10000] {
            let fam = ZipfFamily::new(1.0, 0.5, n).unwrap();
            let (_, _, z) = zipf_weights_and_z(&fam, 1).unwrap();
            let ratio = z / zipf_z_asymptotic(&fam);
            assert!(ratio < 1.0);
            assert!(ratio > prev_ratio, "n = {n}");
            prev_ratio = ratio;
        }
        assert!(prev_ratio > 0.99);
    }

    #[test]
    fn pareto_tail_values() {
        assert_eq!(pareto_tail(2.0, 0.7, 2.0).unwrap(), 1.0);
        assert_eq!(pareto_tail(2.0, 0.7, 0.5).unwrap(), 1.0);
        assert!((pareto_tail(1.5, 1.0, 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            pareto_tail(1.0, 1.0, -0.5),
            Err(TimechangeError::BadTailPoint(_))
        ));
    }

    #[test]
    fn zipf_empirical_tail_approaches_pareto() {
        let n = 10_000;
        let fam = ZipfFamily::new(1.3, 0.6, n).unwrap();
        let (weights, _, _) = zipf_weights_and_z(&fam, 1).unwrap();
        for &w in &[1.3, 2.0, 5.0, 20.0] {
            let empirical = weights.iter().filter(|&&v| v >= w).count() as f64 / n as f64;
            let limit = pareto_tail(1.3, 0.6, w).unwrap();
            assert!(
                (empirical - limit).abs() <= 1.0 / n as f64 + 1e-12,
                "w = {w}: {empirical} vs {limit}"
            );
        }
    }

    #[test]
    fn curve_starts_at_zero_and_increases_to_n() {
        for form in [CurveForm::Sum, CurveForm::Gamma] {
            let curve = RankingCurve::new(697, 0.872, form).unwrap();
            assert_eq!(curve.x_at(0.0).unwrap(), 0.0);
            let mut prev = 0.0;
            for k in 1..=20 {
                let s = 2000.0 * k as f64;
                let x = curve.x_at(s).unwrap();
                assert!(x > prev, "form {form:?} S = {s}");
                assert!(x < 697.0);
                prev = x;
            }
            assert!(curve.x_at(1e9).unwrap() > 696.9999);
        }
    }

    #[test]
    fn curve_frozen_values() {
        // N = 697, b = 0.872, S chosen so that c = S/(N^{1/b} ζ_N) = 1/2
        let zeta_697 = 4.7947121218247521655;
        let s = 4368.3818049941398531;
        let gamma = RankingCurve::new(697, 0.872, CurveForm::Gamma).unwrap();
        assert!((gamma.zeta_n() - zeta_697).abs() < 1e-12);
        let xg = gamma.x_at(s).unwrap();
        assert!((xg - 486.39693096387825527).abs() < 1e-9, "xg = {xg}");
        let sum = RankingCurve::new(697, 0.872, CurveForm::Sum).unwrap();
        let xs = sum.x_at(s).unwrap();
        assert!((xs - 486.09362405328292441).abs() < 1e-9, "xs = {xs}");
    }

    #[test]
    fn gamma_routes_agree_to_float_accuracy() {
        for &(n, b) in &[(100usize, 0.3), (697, 0.5), (697, 0.872)] {
            let curve = RankingCurve::new(n, b, CurveForm::Gamma).unwrap();
            for k in 1..=25 {
                let s = curve.zeta_n() * (n as f64).powf(1.0 / b) * 0.2 * k as f64;
                let by_parts = curve.x_at(s).unwrap();
                let direct = curve.x_via_gamma_neg(s).unwrap();
                assert!(
                    (by_parts - direct).abs() <= 1e-8 * by_parts.abs().max(1.0),
                    "n {n} b {b} k {k}: {by_parts} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn sum_and_gamma_differ_by_half_a_particle() {
        // Euler–Maclaurin: the finite sum sits below the Pareto integral by
        // e^{−c}/2 plus higher corrections
        let sum = RankingCurve::new(697, 0.872, CurveForm::Sum).unwrap();
        let gamma = RankingCurve::new(697, 0.872, CurveForm::Gamma).unwrap();
        let scale = gamma.zeta_n() * 697f64.powf(1.0 / 0.872);
        for &c in &[0.2, 0.5, 1.0, 2.0] {
            let s = scale * c;
            let diff = sum.x_at(s).unwrap() - gamma.x_at(s).unwrap();
            let predicted = -0.5 * (-c as f64).exp();
            assert!(
                (diff - predicted).abs() < 1e-3,
                "c = {c}: diff {diff}, predicted {predicted}"
            );
        }
    }

    #[test]
    fn curve_is_scale_free() {
        // computing the exponents from explicit weights w_i S / Z(N) gives
        // the same curve for any a: it cancels against Z(N)
        let s = 3000.0;
        let sum_curve = RankingCurve::new(250, 0.6, CurveForm::Sum).unwrap();
        let reference = sum_curve.x_at(s).unwrap();
        for &a in &[1.0, 10.0] {
            let fam = ZipfFamily::new(a, 0.6, 250).unwrap();
            let (weights, _, z) = zipf_weights_and_z(&fam, 1).unwrap();
            let direct: f64 = weights
                .iter()
                .rev()
                .map(|&w| -(-w * s / z).exp_m1())
                .sum();
            assert!(
                (direct - reference).abs() < 1e-12 * reference,
                "a = {a}: {direct} vs {reference}"
            );
        }
    }

    #[test]
    fn batch_evaluation_matches_pointwise() {
        for form in [CurveForm::Sum, CurveForm::Gamma] {
            let curve = RankingCurve::new(697, 0.872, form).unwrap();
            let s_values: Vec<f64> = (0..10).map(|k| 900.0 * k as f64).collect();
            let batch = curve.x_many(&s_values).unwrap();
            for (k, &s) in s_values.iter().enumerate() {
                let single = curve.x_at(s).unwrap();
                assert!((batch[k] - single).abs() < 1e-10 * single.max(1.0));
            }
        }
    }

    #[test]
    fn gamma_form_rejects_large_b() {
        assert!(matches!(
            RankingCurve::new(100, 1.2, CurveForm::Gamma),
            Err(TimechangeError::GammaNeedsSmallB(_))
        ));
        assert!(RankingCurve::new(100, 1.2, CurveForm::Sum).is_ok());
    }

    #[test]
    fn periodic_shift_values() {
        let (a_p, shifted) = periodic_shift(&ActivityProfile::constant(), 0.7).unwrap();
        assert_eq!(a_p, 0.0);
        assert_eq!(shifted, 0.7);

        // ∫_0^{1/4} ε sin(2πu) du = (ε/2π)(1 − cos(π/2)) = 0.5/(2π)
        let sin = ActivityProfile::sinusoidal(1.0, 0.5).unwrap();
        let (a_p, _) = periodic_shift(&sin, 0.25).unwrap();
        assert!((a_p - 0.079577471545947667884).abs() < 1e-15);

        for k in 0..=20 {
            let t = 0.1 * k as f64;
            let (a_p_t, _) = periodic_shift(&sin, t).unwrap();
            let (a_p_next, _) = periodic_shift(&sin, t + 1.0).unwrap();
            assert!((a_p_next - a_p_t).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn sampled_boundary_factorizes_through_the_shift() {
        // on the grid t_n = t_0 + nT the boundary equals the constant-profile
        // formula started from the shifted origin
        let profile = ActivityProfile::sinusoidal(1.0, 0.5).unwrap();
        let rates = [(0.4, 1.0), (0.6, 3.0)];
        let mixture = MixtureSpec::build(
            rates
                .iter()
                .map(|&(r, w)| {
                    (
                        r,
                        IntensitySpec::common_profile(w, profile.clone()).unwrap(),
                    )
                })
                .collect(),
        )
        .unwrap();
        let ev = LimitEvaluator::new(&mixture, Layout::Proportional);
        let t0 = 0.3;
        let (_, origin) = periodic_shift(&profile, t0).unwrap();
        for n in 0..6 {
            let t_n = t0 + n as f64;
            let sampled = ev.y_c(t_n).unwrap();
            let homogeneous: f64 = 1.0
                - rates
                    .iter()
                    .map(|&(r, w)| r * (-w * (n as f64 + origin)).exp())
                    .sum::<f64>();
            assert!(
                (sampled - homogeneous).abs() < 1e-10,
                "n = {n}: {sampled} vs {homogeneous}"
            );
        }
    }

    #[test]
    fn observable_starts_at_zero_and_tracks_the_limit() {
        let fam = ZipfFamily::new(1.0, 1e9, 2000).unwrap(); // all weights ≈ 1
        let mixture = zipf_mixture(&fam, &ActivityProfile::constant()).unwrap();
        let system = ParticleSystem::init(2000, &mixture, Layout::Proportional, 3.0, 7).unwrap();
        let (weights, _, z) = zipf_weights_and_z(&fam, 1).unwrap();
        assert_eq!(timechange_observable(&system, z, 0.0).unwrap(), 0.0);
        let observed = timechange_observable(&system, z, 1.0).unwrap();
        let limit = timechange_limit(&weights, 1.0);
        assert!((limit - (1.0 - (-1f64).exp())).abs() < 1e-6);
        assert!(
            (observed - limit).abs() < 0.05,
            "observed {observed}, limit {limit}"
        );
        assert!(matches!(
            timechange_observable(&system, z, 50.0),
            Err(TimechangeError::HorizonExhausted { .. })
        ));
    }

    #[test]
    fn observable_requires_a_common_profile() {
        let spec = IntensitySpec::piecewise_linear_cumulative(vec![(0.0, 0.0), (1.0, 2.0)])
            .unwrap();
        let mixture = MixtureSpec::build(vec![(1.0, spec)]).unwrap();
        let system = ParticleSystem::init(10, &mixture, Layout::Proportional, 1.0, 3).unwrap();
        assert!(matches!(
            timechange_observable(&system, 2.0, 0.1),
            Err(TimechangeError::NotCommonProfile)
        ));
    }
}
