//! Intensity measures of the per-particle Poisson jump processes.
//!
//! Each particle's jumps form a Poisson process on (0,∞) whose mean measure
//! ρ is continuous and finite on bounded intervals; everything downstream
//! consumes only interval masses ρ((s,t]) and exact samples of the jump
//! times. Three constructors cover what the experiments need:
//!
//! - [`IntensitySpec::homogeneous`]: constant rate w, ρ((s,t]) = w·(t−s);
//! - [`IntensitySpec::common_profile`]: rate w modulated by a shared
//!   activity profile ã(t), ρ((s,t]) = w·(A(t)−A(s)) with A(t)=∫_0^t ã;
//! - [`IntensitySpec::piecewise_linear_cumulative`]: an arbitrary continuous
//!   piecewise-linear cumulative R(t) given by knots.
//!
//! Sampling is exact: the jump times are R^{-1}(Γ_j) for Γ_j the partial
//! sums of independent unit-mean exponentials, so the counts on disjoint
//! intervals are independent Poisson with means ρ((s,t]).

use rand::Rng;
use rand_distr::Exp1;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntensityError {
    #[error("rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("sinusoidal amplitude must lie in [0,1), got {0}")]
    AmplitudeOutOfRange(f64),
    #[error("piecewise-constant profile needs one more breakpoint than levels")]
    ProfileShapeMismatch,
    #[error("profile breakpoints must start at 0 and strictly increase")]
    BadBreakpoints,
    #[error("profile levels must be positive")]
    NonPositiveLevel,
    #[error("periodic profile must have mean level 1 over a period, got {0}")]
    NotNormalized(f64),
    #[error("cumulative knots must start at (0,0), strictly increase in time, and be non-decreasing in mass")]
    BadKnots,
    #[error("interval requires 0 ≤ s ≤ t, got s = {s}, t = {t}")]
    BadInterval { s: f64, t: f64 },
    #[error("horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error("mixture atoms must be non-empty")]
    EmptyMixture,
    #[error("mixture weights must be positive, got {0}")]
    NonPositiveWeight(f64),
    #[error("mixture weights must sum to 1 within 1e-9, got {0}")]
    WeightSum(f64),
}

/// Activity profile ã(t) > 0 shared by a common-profile population.
/// Periodic shapes are normalized so the mean level over one period is 1.
#[derive(Debug, Clone, PartialEq)]
pub enum ActivityProfile {
    Constant,
    Sinusoidal {
        period: f64,
        amplitude: f64,
    },
    PiecewiseConstant {
        /// m+1 points 0 = b_0 < … < b_m; the pattern repeats with period b_m.
        breakpoints: Vec<f64>,
        /// level on [b_j, b_{j+1}); all positive, mean 1 over the period.
        levels: Vec<f64>,
        /// cumulative mass at each breakpoint (derived).
        cum: Vec<f64>,
    },
}

impl ActivityProfile {
    pub fn constant() -> Self {
        ActivityProfile::Constant
    }

    /// ã(t) = 1 + ε·sin(2πt/T); automatically mean-1 over a period.
    pub fn sinusoidal(period: f64, amplitude: f64) -> Result<Self, IntensityError> {
        if !(period > 0.0) {
            return Err(IntensityError::BadBreakpoints);
        }
        if !(0.0..1.0).contains(&amplitude) {
            return Err(IntensityError::AmplitudeOutOfRange(amplitude));
        }
        Ok(ActivityProfile::Sinusoidal { period, amplitude })
    }

    /// Periodic piecewise-constant profile; `levels[j]` on
    /// [breakpoints[j], breakpoints[j+1]), repeating with period
    /// `breakpoints.last()`. The mean level over one period must be 1.
    pub fn piecewise_constant(
        breakpoints: Vec<f64>,
        levels: Vec<f64>,
    ) -> Result<Self, IntensityError> {
        if breakpoints.len() != levels.len() + 1 || levels.is_empty() {
            return Err(IntensityError::ProfileShapeMismatch);
        }
        if breakpoints[0] != 0.0 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(IntensityError::BadBreakpoints);
        }
        if levels.iter().any(|&l| !(l > 0.0)) {
            return Err(IntensityError::NonPositiveLevel);
        }
        let period = *breakpoints.last().unwrap();
        let mut cum = Vec::with_capacity(breakpoints.len());
        cum.push(0.0);
        for j in 0..levels.len() {
            cum.push(cum[j] + levels[j] * (breakpoints[j + 1] - breakpoints[j]));
        }
        let mean = cum.last().unwrap() / period;
        if (mean - 1.0).abs() > 1e-12 {
            return Err(IntensityError::NotNormalized(mean));
        }
        Ok(ActivityProfile::PiecewiseConstant {
            breakpoints,
            levels,
            cum,
        })
    }

    /// Instantaneous level ã(t) (right-continuous at breakpoints).
    pub fn level(&self, t: f64) -> f64 {
        match self {
            ActivityProfile::Constant => 1.0,
            ActivityProfile::Sinusoidal { period, amplitude } => {
                1.0 + amplitude * (2.0 * std::f64::consts::PI * t / period).sin()
            }
            ActivityProfile::PiecewiseConstant {
                breakpoints,
                levels,
                ..
            } => {
                let period = *breakpoints.last().unwrap();
                let tau = t.rem_euclid(period);
                let j = breakpoints.partition_point(|&b| b <= tau) - 1;
                levels[j.min(levels.len() - 1)]
            }
        }
    }

    /// Cumulative activity A(t) = ∫_0^t ã(u) du, for t ≥ 0.
    pub fn cumulative(&self, t: f64) -> f64 {
        match self {
            ActivityProfile::Constant => t,
            ActivityProfile::Sinusoidal { period, amplitude } => {
                let omega = 2.0 * std::f64::consts::PI / period;
                t + amplitude / omega * (1.0 - (omega * t).cos())
            }
            ActivityProfile::PiecewiseConstant {
                breakpoints, cum, ..
            } => {
                let period = *breakpoints.last().unwrap();
                let whole = (t / period).floor();
                let tau = t - whole * period;
                let j = breakpoints.partition_point(|&b| b <= tau).saturating_sub(1);
                let j = j.min(cum.len() - 2);
                // one period carries mass `period` by normalization
                whole * period + cum[j] + self.level_at_segment(j) * (tau - breakpoints[j])
            }
        }
    }

    fn level_at_segment(&self, j: usize) -> f64 {
        match self {
            ActivityProfile::PiecewiseConstant { levels, .. } => levels[j],
            _ => 1.0,
        }
    }

    /// Inverse of the cumulative: the unique t ≥ 0 with A(t) = m.
    ///
    /// Closed form for constant and piecewise-constant shapes; bisection to
    /// absolute tolerance 1e-12 for the sinusoidal one (A is strictly
    /// increasing since ã ≥ 1−ε > 0).
    pub fn inverse_cumulative(&self, m: f64) -> f64 {
        debug_assert!(m >= 0.0);
        match self {
            ActivityProfile::Constant => m,
            ActivityProfile::Sinusoidal { amplitude, .. } => {
                // (1−ε)·t ≤ A(t) ≤ (1+ε)·t brackets the root.
                let mut lo = m / (1.0 + amplitude);
                let mut hi = m / (1.0 - amplitude) + 1e-9;
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    if self.cumulative(mid) < m {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            ActivityProfile::PiecewiseConstant {
                breakpoints,
                levels,
                cum,
            } => {
                let period = *breakpoints.last().unwrap();
                // one period carries mass `period`
                let whole = (m / period).floor();
                let rem = m - whole * period;
                let j = cum.partition_point(|&c| c <= rem).saturating_sub(1);
                let j = j.min(levels.len() - 1);
                whole * period + breakpoints[j] + (rem - cum[j]) / levels[j]
            }
        }
    }

    /// Whether the profile repeats; returns the period.
    pub fn period(&self) -> Option<f64> {
        match self {
            ActivityProfile::Constant => None,
            ActivityProfile::Sinusoidal { period, .. } => Some(*period),
            ActivityProfile::PiecewiseConstant { breakpoints, .. } => {
                Some(*breakpoints.last().unwrap())
            }
        }
    }
}

/// Intensity measure of one particle's jump process, represented through its
/// cumulative R(t) = ρ((0,t]).
#[derive(Debug, Clone, PartialEq)]
pub enum IntensitySpec {
    Homogeneous {
        rate: f64,
    },
    CommonProfile {
        rate: f64,
        profile: ActivityProfile,
    },
    /// R(t) interpolates the knots linearly and stays flat after the last
    /// knot. Knots start at (0,0), strictly increase in time, and are
    /// non-decreasing in mass.
    PiecewiseLinearCumulative {
        knots: Vec<(f64, f64)>,
    },
}

impl IntensitySpec {
    pub fn homogeneous(rate: f64) -> Result<Self, IntensityError> {
        if !(rate > 0.0) {
            return Err(IntensityError::NonPositiveRate(rate));
        }
        Ok(IntensitySpec::Homogeneous { rate })
    }

    pub fn common_profile(rate: f64, profile: ActivityProfile) -> Result<Self, IntensityError> {
        if !(rate > 0.0) {
            return Err(IntensityError::NonPositiveRate(rate));
        }
        Ok(IntensitySpec::CommonProfile { rate, profile })
    }

    pub fn piecewise_linear_cumulative(knots: Vec<(f64, f64)>) -> Result<Self, IntensityError> {
        if knots.len() < 2 || knots[0] != (0.0, 0.0) {
            return Err(IntensityError::BadKnots);
        }
        for w in knots.windows(2) {
            if !(w[0].0 < w[1].0) || !(w[0].1 <= w[1].1) {
                return Err(IntensityError::BadKnots);
            }
        }
        Ok(IntensitySpec::PiecewiseLinearCumulative { knots })
    }

    /// Cumulative mass R(t) = ρ((0,t]) for t ≥ 0.
    pub fn cumulative(&self, t: f64) -> f64 {
        match self {
            IntensitySpec::Homogeneous { rate } => rate * t,
            IntensitySpec::CommonProfile { rate, profile } => rate * profile.cumulative(t),
            IntensitySpec::PiecewiseLinearCumulative { knots } => {
                let k = knots.partition_point(|&(kt, _)| kt <= t);
                if k == 0 {
                    return 0.0;
                }
                if k == knots.len() {
                    return knots[k - 1].1; // flat beyond the last knot
                }
                let (t0, m0) = knots[k - 1];
                let (t1, m1) = knots[k];
                m0 + (m1 - m0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Interval mass ρ((s,t]) = R(t) − R(s), additive over adjacent intervals.
    pub fn interval_mass(&self, s: f64, t: f64) -> Result<f64, IntensityError> {
        if !(0.0 <= s && s <= t) {
            return Err(IntensityError::BadInterval { s, t });
        }
        Ok(self.cumulative(t) - self.cumulative(s))
    }

    /// inf{u ≥ 0 : R(u) ≥ m}. Returns +∞ when the total mass stays below m
    /// (possible for the flat-tailed piecewise-linear cumulative).
    pub fn inverse_cumulative(&self, m: f64) -> f64 {
        match self {
            IntensitySpec::Homogeneous { rate } => m / rate,
            IntensitySpec::CommonProfile { rate, profile } => profile.inverse_cumulative(m / rate),
            IntensitySpec::PiecewiseLinearCumulative { knots } => {
                let k = knots.partition_point(|&(_, km)| km < m);
                if k == 0 {
                    return 0.0;
                }
                if k == knots.len() {
                    return f64::INFINITY;
                }
                let (t0, m0) = knots[k - 1];
                let (t1, m1) = knots[k];
                // m0 < m ≤ m1 and the segment rises, so m1 > m0
                t0 + (t1 - t0) * (m - m0) / (m1 - m0)
            }
        }
    }

    /// Exact jump times on (0, horizon]: τ_j = R^{-1}(Γ_j) for Γ_j the
    /// partial sums of unit-mean exponentials, truncated at the horizon.
    pub fn sample_jump_times<R: Rng + ?Sized>(
        &self,
        horizon: f64,
        rng: &mut R,
    ) -> Result<Vec<f64>, IntensityError> {
        if !(horizon > 0.0) {
            return Err(IntensityError::BadHorizon(horizon));
        }
        let total = self.cumulative(horizon);
        let mut times = Vec::new();
        let mut gamma = 0.0f64;
        loop {
            let e: f64 = rng.sample(Exp1);
            gamma += e;
            if gamma > total {
                break;
            }
            let t = self.inverse_cumulative(gamma).min(horizon);
            // strictly increasing by construction; equal floats would violate
            // the per-particle invariant, so drop such (measure-zero) repeats
            if times.last().map_or(true, |&prev| t > prev) {
                times.push(t);
            }
        }
        Ok(times)
    }

    /// Density w(t) = R'(t) where it exists: the rate for homogeneous, the
    /// modulated rate w·ã(t) for common-profile, and the segment slope
    /// (right-continuous) for piecewise-linear cumulatives.
    pub fn rate_density(&self, t: f64) -> f64 {
        match self {
            IntensitySpec::Homogeneous { rate } => *rate,
            IntensitySpec::CommonProfile { rate, profile } => rate * profile.level(t),
            IntensitySpec::PiecewiseLinearCumulative { knots } => {
                let k = knots.partition_point(|&(kt, _)| kt <= t);
                if k == 0 || k == knots.len() {
                    return 0.0;
                }
                let (t0, m0) = knots[k - 1];
                let (t1, m1) = knots[k];
                (m1 - m0) / (t1 - t0)
            }
        }
    }

    /// The activity profile when this intensity factorizes through one.
    pub fn profile_part(&self) -> Option<(f64, ActivityProfile)> {
        match self {
            IntensitySpec::Homogeneous { rate } => Some((*rate, ActivityProfile::Constant)),
            IntensitySpec::CommonProfile { rate, profile } => Some((*rate, profile.clone())),
            IntensitySpec::PiecewiseLinearCumulative { .. } => None,
        }
    }
}

/// One component of a finite intensity mixture: a class holding fraction
/// `weight` of the population, all with intensity `intensity`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureAtom {
    pub weight: f64,
    pub intensity: IntensitySpec,
}

/// Finite discrete mixture Λ = Σ_α r_α δ_{ρ_α} with Σ r_α = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    atoms: Vec<MixtureAtom>,
}

impl MixtureSpec {
    /// Validates and renormalizes the weights; the sum must already be
    /// within 1e-9 of 1, anything further off is rejected rather than
    /// silently rescaled.
    pub fn build(atoms: Vec<(f64, IntensitySpec)>) -> Result<Self, IntensityError> {
        if atoms.is_empty() {
            return Err(IntensityError::EmptyMixture);
        }
        for &(w, _) in &atoms {
            if !(w > 0.0) {
                return Err(IntensityError::NonPositiveWeight(w));
            }
        }
        let sum: f64 = atoms.iter().map(|&(w, _)| w).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(IntensityError::WeightSum(sum));
        }
        Ok(MixtureSpec {
            atoms: atoms
                .into_iter()
                .map(|(w, intensity)| MixtureAtom {
                    weight: w / sum,
                    intensity,
                })
                .collect(),
        })
    }

    pub fn atoms(&self) -> &[MixtureAtom] {
        &self.atoms
    }

    pub fn n_classes(&self) -> usize {
        self.atoms.len()
    }

    /// When every atom shares one activity profile (a constant rate counts
    /// as the constant profile), returns the per-class relative rates and
    /// that common profile.
    pub fn common_profile(&self) -> Option<(Vec<(f64, f64)>, ActivityProfile)> {
        let mut parts = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            parts.push((atom.weight, atom.intensity.profile_part()?));
        }
        let profile = parts[0].1 .1.clone();
        if parts.iter().any(|(_, (_, p))| *p != profile) {
            return None;
        }
        Some((
            parts.into_iter().map(|(r, (w, _))| (r, w)).collect(),
            profile,
        ))
    }
}
