//! One-parameter fit of the Pareto exponent b from (S, x) observations.
//!
//! An observed trajectory of the time-changed process yields pairs of the
//! cumulative jump count S and the position x of a reference particle.
//! Because the curve x(S) depends only on (N, b) — the Zipf scale a cancels
//! — the exponent is recovered by least squares over b alone: golden-section
//! search of the squared loss on (0.05, 0.99), with a 90% confidence
//! half-width from bootstrap resampling of the records.

use crate::timechange::{CurveForm, RankingCurve, TimechangeError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("fit needs at least {need} records, got {got}")]
    TooFewRecords { got: usize, need: usize },
    #[error("all observed jump counts are equal; the curve cannot be constrained")]
    DegenerateObservations,
    #[error("jump counts span only a factor {ratio:.3}; at least a decade is needed")]
    NarrowSpan { ratio: f64 },
    #[error("record (S = {s}, x = {x}) invalid for population size {n}")]
    BadRecord { s: f64, x: f64, n: usize },
    #[error("population size must be ≥ 1")]
    EmptyPopulation,
    #[error("loss minimum sits at the search boundary b = {b}; the estimate is unreliable")]
    SearchHitBoundary { b: f64 },
    #[error(transparent)]
    Timechange(#[from] TimechangeError),
}

/// Observed (S, x) pairs against one population of size N. Order is
/// irrelevant; the same S may repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    n: usize,
    records: Vec<(f64, f64)>,
}

impl ObservationSet {
    pub fn new(n: usize, records: Vec<(f64, f64)>) -> Result<Self, FitError> {
        if n == 0 {
            return Err(FitError::EmptyPopulation);
        }
        for &(s, x) in &records {
            if !(s >= 0.0 && s.is_finite() && (1.0..=n as f64).contains(&x)) {
                return Err(FitError::BadRecord { s, x, n });
            }
        }
        Ok(ObservationSet { n, records })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn records(&self) -> &[(f64, f64)] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// The fitted exponent with its fit quality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub b_hat: f64,
    /// root-mean-square position residual at b_hat
    pub residual_norm: f64,
    /// half-width of the 90% bootstrap confidence interval
    pub ci_halfwidth: f64,
}

/// Knobs of the fit; the defaults reproduce the standard workflow.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// seed of the bootstrap resampling streams
    pub seed: u64,
    pub resamples: usize,
    /// open search interval for b
    pub search: (f64, f64),
    /// golden-section bracket width at which the search stops
    pub tolerance: f64,
    /// curve form used in the loss; the finite sum is exact at finite N
    pub form: CurveForm,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            seed: 0,
            resamples: 200,
            search: (0.05, 0.99),
            tolerance: 1e-4,
            form: CurveForm::Sum,
        }
    }
}

const MIN_RECORDS: usize = 10;
const MIN_SPAN: f64 = 10.0;

/// Squared-loss sum Σ (x − x_curve(S; b))² of the records at exponent b.
/// Exposed so the unimodality of the loss can be inspected directly.
pub fn fit_loss(obs: &ObservationSet, b: f64, form: CurveForm) -> Result<f64, FitError> {
    let curve = RankingCurve::new(obs.n, b, form)?;
    let s_values: Vec<f64> = obs.records.iter().map(|&(s, _)| s).collect();
    let fitted = curve.x_many(&s_values)?;
    Ok(obs
        .records
        .iter()
        .zip(&fitted)
        .map(|(&(_, x), &v)| (x - v) * (x - v))
        .sum())
}

fn loss_on(records: &[(f64, f64)], n: usize, b: f64, form: CurveForm) -> f64 {
    let Ok(curve) = RankingCurve::new(n, b, form) else {
        return f64::INFINITY;
    };
    let s_values: Vec<f64> = records.iter().map(|&(s, _)| s).collect();
    match curve.x_many(&s_values) {
        Ok(fitted) => records
            .iter()
            .zip(&fitted)
            .map(|(&(_, x), &v)| (x - v) * (x - v))
            .sum(),
        Err(_) => f64::INFINITY,
    }
}

/// Golden-section minimizer; assumes a unimodal f on [lo, hi].
fn golden_min(mut lo: f64, mut hi: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Fits the exponent. The point estimate minimizes the squared loss over
/// the search interval; a minimum within twice the search tolerance of
/// either endpoint is reported as an error rather than silently clamped.
/// The confidence half-width spans the central 90% of bootstrap replicas,
/// each resampling the records with replacement on its own seeded stream.
pub fn fit_b(obs: &ObservationSet, opts: &FitOptions) -> Result<FitResult, FitError> {
    if obs.len() < MIN_RECORDS {
        return Err(FitError::TooFewRecords {
            got: obs.len(),
            need: MIN_RECORDS,
        });
    }
    let first_s = obs.records[0].0;
    if obs.records.iter().all(|&(s, _)| s == first_s) {
        return Err(FitError::DegenerateObservations);
    }
    let min_positive = obs
        .records
        .iter()
        .map(|&(s, _)| s)
        .filter(|&s| s > 0.0)
        .fold(f64::INFINITY, f64::min);
    let max_s = obs.records.iter().map(|&(s, _)| s).fold(0.0, f64::max);
    let span = max_s / min_positive;
    if !(span >= MIN_SPAN) {
        return Err(FitError::NarrowSpan { ratio: span });
    }

    let (lo, hi) = opts.search;
    let b_hat = golden_min(lo, hi, opts.tolerance, |b| {
        loss_on(&obs.records, obs.n, b, opts.form)
    });
    if b_hat - lo < 2.0 * opts.tolerance || hi - b_hat < 2.0 * opts.tolerance {
        return Err(FitError::SearchHitBoundary { b: b_hat });
    }
    let residual_norm = (fit_loss(obs, b_hat, opts.form)? / obs.len() as f64).sqrt();

    let mut replicas: Vec<f64> = (0..opts.resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let resampled: Vec<(f64, f64)> = (0..obs.len())
                .map(|_| obs.records[rng.gen_range(0..obs.len())])
                .collect();
            golden_min(lo, hi, opts.tolerance, |b| {
                loss_on(&resampled, obs.n, b, opts.form)
            })
        })
        .collect();
    replicas.sort_by(f64::total_cmp);
    let ci_halfwidth = if replicas.is_empty() {
        0.0
    } else {
        let q_lo = replicas[(replicas.len() as f64 * 0.05) as usize];
        let q_hi = replicas[((replicas.len() as f64 * 0.95) as usize).min(replicas.len() - 1)];
        0.5 * (q_hi - q_lo)
    };

    Ok(FitResult {
        b_hat,
        residual_norm,
        ci_halfwidth,
    })
}
