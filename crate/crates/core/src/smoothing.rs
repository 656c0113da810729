//! The C-infinity radial cutoff: identically 1 on the inner ball, 0 outside
//! the outer ball, monotone in between. All singular analysis on the
//! Fourier side happens inside its support; everything else sees the
//! complement, where symbols are smooth.

use crate::fd::{richardson_diff, stencil_reach};
use crate::symbols::TorusPoint;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Default inner radius: keeps the cut well inside the fundamental cell.
pub const DEFAULT_INNER: f64 = PI / 4.0;
/// Default support radius.
pub const DEFAULT_OUTER: f64 = PI / 2.0;

/// Radial smooth cutoff with `eval = 1` on `|k| <= r_inner` and `eval = 0`
/// on `|k| >= r_outer`.
#[derive(Debug, Clone, Copy)]
pub struct BumpFunction {
    dim: usize,
    r_inner: f64,
    r_outer: f64,
}

/// Builds the canonical bump for the radius pair.
///
/// The profile is the symmetric mollifier step `psi(t) =
/// phi(1-t)/(phi(1-t) + phi(t))` with `phi(t) = exp(-1/t)` for positive t;
/// every derivative vanishes at both ends and `psi(1/2) = 1/2` exactly.
pub fn make_bump(dim: usize, r_inner: f64, r_outer: f64) -> Result<BumpFunction> {
    if !(0.0 < r_inner && r_inner < r_outer && r_outer <= PI) {
        return Err(Error::BumpRadii {
            inner: r_inner,
            outer: r_outer,
        });
    }
    Ok(BumpFunction {
        dim,
        r_inner,
        r_outer,
    })
}

fn phi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let up = phi(1.0 - t);
    up / (up + phi(t))
}

impl BumpFunction {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inner_radius(&self) -> f64 {
        self.r_inner
    }

    pub fn outer_radius(&self) -> f64 {
        self.r_outer
    }

    /// Width of the transition annulus.
    pub fn width(&self) -> f64 {
        self.r_outer - self.r_inner
    }

    pub fn eval(&self, k: &TorusPoint) -> f64 {
        self.eval_radial(k.norm())
    }

    /// The radial profile itself; radius in radians.
    pub fn eval_radial(&self, r: f64) -> f64 {
        smooth_step((r - self.r_inner) / (self.r_outer - self.r_inner))
    }

    /// Evaluation from raw coordinates (assumed canonical).
    pub fn eval_raw(&self, k: &[f64]) -> f64 {
        self.eval_radial(k.iter().map(|c| c * c).sum::<f64>().sqrt())
    }
}

/// Mixed partial derivative of the bump by Richardson-extrapolated central
/// differences with step `1e-3 * width`.
///
/// Returns exact zeros when the whole stencil lies in a region where the
/// bump is constant, so norm sweeps over V or outside U cost nothing and
/// carry no FD noise. Within the transition annulus per-axis orders up to 6
/// are supported.
pub fn bump_derivative(chi: &BumpFunction, k: &TorusPoint, alpha: &[usize]) -> Result<f64> {
    if alpha.len() != chi.dim {
        return Err(Error::DimensionMismatch {
            expected: chi.dim,
            got: alpha.len(),
        });
    }
    if alpha.iter().any(|&a| a > 6) {
        return Err(Error::Stencil(format!(
            "per-axis derivative order {} beyond the tabulated stencils",
            alpha.iter().max().unwrap()
        )));
    }
    let h = 1e-3 * chi.width();
    let reach = stencil_reach(alpha) as f64 * h;
    let order: usize = alpha.iter().sum();
    let r = k.norm();
    // The stencil samples stay within `reach` per axis, so within
    // `reach * sqrt(d)` in radius.
    let slack = reach * (chi.dim as f64).sqrt() * 1.000001;
    if r + slack <= chi.r_inner {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if r - slack >= chi.r_outer {
        return Ok(0.0);
    }
    if k.coords().iter().any(|&c| c.abs() + reach > PI) {
        return Err(Error::Stencil(format!(
            "stencil around {:?} crosses the representative cut at pi",
            k.coords()
        )));
    }
    let f = |p: &[f64]| chi.eval_raw(p);
    Ok(richardson_diff(&f, k.coords(), alpha, h))
}
