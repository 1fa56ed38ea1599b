//! Verifies that the limit tails solve their transport equation.
//!
//! Away from the moving boundary y_C(t) the per-class tails satisfy
//!
//! ∂U_α/∂t + (Σ_β w_β(t) U_β) ∂U_α/∂y = −w_α(t) U_α,
//!
//! a Burgers-type equation whose flux velocity is the total jump activity of
//! the volume below y and whose right side drains class α at its own rate
//! w_α(t). This module measures the residual of that equation with central
//! differences (second order in the step h) and integrates its
//! characteristics with a fixed-step fourth-order Runge–Kutta scheme, so
//! both can be compared against the closed-form transport curves.
//!
//! The tails are continuous but not differentiable across y = y_C(t), so
//! residual stencils must keep clear of the boundary; the interleaved
//! initial layout is likewise required, because block initial data carries
//! kinks into the smooth region.

use crate::limit::{LimitError, LimitEvaluator};
use crate::ranking::Layout;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BurgersError {
    #[error("step h = {0} must be positive and finite")]
    BadStep(f64),
    #[error("stencil at (y = {y}, t = {t}) with h = {h} leaves the domain")]
    StencilOutsideDomain { y: f64, t: f64, h: f64 },
    #[error(
        "point (y = {y}, t = {t}) sits within {gap} of the boundary y_C = {y_c}, \
         where the tails are not differentiable"
    )]
    TooNearBoundary { y: f64, t: f64, y_c: f64, gap: f64 },
    #[error("residuals need the interleaved layout; block initial data has kinks")]
    KinkedInitialData,
    #[error("characteristic needs start time {t_start} < end time {t_end}")]
    BadTimeWindow { t_start: f64, t_end: f64 },
    #[error("integration needs at least one step")]
    NoSteps,
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// Settings for residual sweeps over a (y, t) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeCheckConfig {
    /// central-difference step in both y and t
    pub h: f64,
    /// grid points closer than `margin_factor`·h to y_C(t) are skipped
    pub margin_factor: f64,
    /// upper edge of the y grid, kept a little below 1 where the tails
    /// flatten out and relative error loses meaning
    pub y_max: f64,
}

impl Default for PdeCheckConfig {
    fn default() -> Self {
        PdeCheckConfig {
            h: 1e-4,
            margin_factor: 10.0,
            y_max: 0.99,
        }
    }
}

impl PdeCheckConfig {
    fn validate(&self) -> Result<(), BurgersError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(BurgersError::BadStep(self.h));
        }
        assert!(
            self.margin_factor >= 2.0,
            "margins below 2h let stencils touch the boundary"
        );
        assert!(
            self.y_max > 0.0 && self.y_max + self.h < 1.0,
            "y grid must leave room for the +h stencil arm"
        );
        Ok(())
    }
}

/// One grid point of a residual sweep: the PDE residual of every class.
#[derive(Debug, Clone)]
pub struct ResidualSample {
    pub y: f64,
    pub t: f64,
    pub h: f64,
    pub residuals: Vec<f64>,
}

fn rate_at(ev: &LimitEvaluator, alpha: usize, t: f64) -> f64 {
    ev.atoms()[alpha].intensity.rate_density(t)
}

/// Central-difference residual of the transport equation at one interior
/// point, one value per class. The stencil (y ± h, t ± h) must stay inside
/// the strip 0 < y < 1, 0 < t, and at least h away from the boundary curve
/// at all three times it touches.
pub fn pde_residual(
    ev: &LimitEvaluator,
    y: f64,
    t: f64,
    h: f64,
) -> Result<Vec<f64>, BurgersError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(BurgersError::BadStep(h));
    }
    if ev.layout() != Layout::Proportional {
        return Err(BurgersError::KinkedInitialData);
    }
    if !(y - h > 0.0 && y + h < 1.0 && t - h > 0.0) {
        return Err(BurgersError::StencilOutsideDomain { y, t, h });
    }
    for s in [t - h, t, t + h] {
        let y_c = ev.y_c(s)?;
        if (y - y_c).abs() <= h {
            return Err(BurgersError::TooNearBoundary {
                y,
                t,
                y_c,
                gap: (y - y_c).abs(),
            });
        }
    }

    let u = ev.limit_tail(y, t)?;
    let u_tp = ev.limit_tail(y, t + h)?;
    let u_tm = ev.limit_tail(y, t - h)?;
    let u_yp = ev.limit_tail(y + h, t)?;
    let u_ym = ev.limit_tail(y - h, t)?;

    let k = ev.n_classes();
    let flux: f64 = (0..k).map(|b| rate_at(ev, b, t) * u[b]).sum();
    Ok((0..k)
        .map(|a| {
            let u_t = (u_tp[a] - u_tm[a]) / (2.0 * h);
            let u_y = (u_yp[a] - u_ym[a]) / (2.0 * h);
            u_t + flux * u_y + rate_at(ev, a, t) * u[a]
        })
        .collect())
}

/// Residuals over an n_y × times grid, skipping points within
/// `margin_factor`·h of the boundary. The y grid runs from
/// `margin_factor`·h to y_max.
pub fn residual_grid(
    ev: &LimitEvaluator,
    cfg: &PdeCheckConfig,
    times: &[f64],
    n_y: usize,
) -> Result<Vec<ResidualSample>, BurgersError> {
    cfg.validate()?;
    let lo = cfg.margin_factor * cfg.h;
    let hi = cfg.y_max;
    let mut out = Vec::new();
    for &t in times {
        let y_c = ev.y_c(t)?;
        for j in 0..n_y {
            let y = if n_y == 1 {
                lo
            } else {
                lo + (hi - lo) * j as f64 / (n_y - 1) as f64
            };
            if (y - y_c).abs() < cfg.margin_factor * cfg.h {
                continue;
            }
            let residuals = pde_residual(ev, y, t, cfg.h)?;
            out.push(ResidualSample {
                y,
                t,
                h: cfg.h,
                residuals,
            });
        }
    }
    Ok(out)
}

/// Where a characteristic enters the smooth region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CharStart {
    /// leaves the front y = 0 at time t1 carrying the boundary data r_α
    TopSide { t1: f64 },
    /// leaves (y0, 0) carrying the initial data u_α(y0)
    TailSide { y0: f64 },
}

/// A characteristic trajectory: positions y and transported values φ_α at
/// every Runge–Kutta node.
#[derive(Debug, Clone)]
pub struct CharCurve {
    pub times: Vec<f64>,
    pub y: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
}

/// Integrates the characteristic system
///
/// dy/dt = Σ_β w_β(t) φ_β,   dφ_α/dt = −w_α(t) φ_α
///
/// with `steps` fixed RK4 steps up to t_end. Along the exact solution
/// y(t) reproduces the transport curves y_A / y_B and φ_α the class tails.
pub fn characteristic_curve(
    ev: &LimitEvaluator,
    start: CharStart,
    t_end: f64,
    steps: usize,
) -> Result<CharCurve, BurgersError> {
    if steps == 0 {
        return Err(BurgersError::NoSteps);
    }
    let k = ev.n_classes();
    let (t_start, y0, phi0): (f64, f64, Vec<f64>) = match start {
        CharStart::TopSide { t1 } => {
            if !(t1 >= 0.0) {
                return Err(LimitError::BadTime(t1).into());
            }
            (t1, 0.0, ev.atoms().iter().map(|a| a.weight).collect())
        }
        CharStart::TailSide { y0 } => {
            if !(0.0..=1.0).contains(&y0) {
                return Err(LimitError::BadY(y0).into());
            }
            (0.0, y0, (0..k).map(|a| ev.initial_tail(a, y0)).collect())
        }
    };
    if !(t_start < t_end && t_end.is_finite()) {
        return Err(BurgersError::BadTimeWindow { t_start, t_end });
    }

    // state vector (y, φ_1, …, φ_k)
    let deriv = |t: f64, state: &[f64], out: &mut [f64]| {
        let mut dy = 0.0;
        for b in 0..k {
            let w = rate_at(ev, b, t);
            dy += w * state[1 + b];
            out[1 + b] = -w * state[1 + b];
        }
        out[0] = dy;
    };

    let dt = (t_end - t_start) / steps as f64;
    let mut state: Vec<f64> = std::iter::once(y0).chain(phi0).collect();
    let mut times = Vec::with_capacity(steps + 1);
    let mut ys = Vec::with_capacity(steps + 1);
    let mut phis = Vec::with_capacity(steps + 1);
    let mut k1 = vec![0.0; k + 1];
    let mut k2 = vec![0.0; k + 1];
    let mut k3 = vec![0.0; k + 1];
    let mut k4 = vec![0.0; k + 1];
    let mut tmp = vec![0.0; k + 1];

    let record = |times: &mut Vec<f64>, ys: &mut Vec<f64>, phis: &mut Vec<Vec<f64>>, t: f64, s: &[f64]| {
        times.push(t);
        ys.push(s[0]);
        phis.push(s[1..].to_vec());
    };
    record(&mut times, &mut ys, &mut phis, t_start, &state);

    for step in 0..steps {
        let t = t_start + dt * step as f64;
        deriv(t, &state, &mut k1);
        for i in 0..=k {
            tmp[i] = state[i] + 0.5 * dt * k1[i];
        }
        deriv(t + 0.5 * dt, &tmp, &mut k2);
        for i in 0..=k {
            tmp[i] = state[i] + 0.5 * dt * k2[i];
        }
        deriv(t + 0.5 * dt, &tmp, &mut k3);
        for i in 0..=k {
            tmp[i] = state[i] + dt * k3[i];
        }
        deriv(t + dt, &tmp, &mut k4);
        for i in 0..=k {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        record(
            &mut times,
            &mut ys,
            &mut phis,
            t_start + dt * (step + 1) as f64,
            &state,
        );
    }

    Ok(CharCurve {
        times,
        y: ys,
        phi: phis,
    })
}
