//! Decay-law diagnostics: the normalized remainder, its fitted exponent,
//! finite-difference Sobolev norms over the cutoff regions, and the
//! scale-free ratio tying the two together.
//!
//! The leading behaviour of a reconstructed lattice function is
//! `f(x) ~ a_d h(0) |x|^{2-d}`; everything here measures how far a computed
//! table is from that law and how large the symbol-side norms are that
//! control the deviation. The constant in that control is not computable,
//! so [`verify_bound`] only reports the ratio; uniformity of the ratio
//! across model families and radius ranges is what the test suite checks.

use serde::{Deserialize, Serialize};

use crate::fd::central_diff;
use crate::numeric::Compensated;
use crate::quad::offset_nodes;
use crate::riesz::s_eval;
use crate::smoothing::BumpFunction;
use crate::symbols::{constants, Symbol};
use crate::transform::QuadratureGrid;
use crate::{Error, Result};

/// Step used by every finite-difference derivative in this module; each
/// derivative is computed at this step and at half of it, Richardson
/// combined, with the pair doubling as a settling check.
const FD_STEP: f64 = 1e-2;

/// Clearance kept between quadrature nodes and the region boundary. The
/// widest tensor stencil in use (orders up to four) reaches sqrt(5) steps
/// from its center; keeping the margin fixed instead of order-dependent
/// means every derivative order integrates over the identical node set, so
/// norms of increasing order are monotone by construction.
const FD_CLEARANCE: f64 = 2.5 * FD_STEP;

/// Highest derivative order the norm estimator accepts; covers the
/// window-side orders needed through dimension six.
const MAX_NORM_ORDER: usize = 4;

/// Schema tag embedded in serialized reports.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Integration region for [`sobolev_norm`], tied to the bump geometry:
/// membership tests are metric-ball comparisons against the bump radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormRegion {
    /// The ball `|k| <= r_outer` carrying the cutoff.
    OuterBall,
    /// The torus minus the open ball `|k| < r_inner` on which the cutoff
    /// is identically one (the symbol may blow up inside it).
    TorusMinusInnerBall,
}

/// One row of a decay sweep: a lattice point, the computed value, and its
/// normalized forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub x: Vec<i64>,
    /// Computed lattice-function value at `x`.
    pub f: f64,
    /// `|x|^{d-2} f / a_d`, the quantity that tends to `h(0)`.
    pub scaled: f64,
    /// `scaled - h0`, stored exactly as that difference.
    pub remainder: f64,
    /// Quadrature error carried alongside (never folded into) the
    /// remainder, so grid noise stays distinguishable from the genuine
    /// deviation at small `|x|`.
    pub error_estimate: f64,
    /// Evaluation route that produced `f`.
    pub method_tag: String,
}

/// Full outcome of a decay sweep: the row table, the fitted decay
/// exponent, the symbol norms, and their ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub schema_version: u32,
    pub d: usize,
    pub model_id: String,
    /// Rows sorted by `|x|`.
    pub rows: Vec<ReportRow>,
    /// Log-log slope of `f` against `|x|`; `-(d-2)` for Green-type decay.
    pub fitted_exponent: f64,
    /// Coefficient of determination of that fit in log-log space.
    pub fit_r2: f64,
    /// True when sign-changing values forced the fit onto magnitudes.
    pub fit_used_abs: bool,
    /// Leading constant `h(0)` the scaled values approach.
    pub h0: f64,
    /// Symbol norm of order `d - 2`, integrability 1, over the torus minus
    /// the inner ball.
    pub norm_f: f64,
    /// Quotient-symbol norm of window order and integrability over the
    /// outer ball.
    pub norm_h: f64,
    /// `max |remainder| / (norm_f + norm_h)`.
    pub bound_ratio: f64,
}

/// Normalized deviation from the leading decay term:
/// `|x|^{d-2} f_val / a_d - h0`.
pub fn remainder(f_val: f64, x: &[i64], h0: f64, d: usize) -> Result<f64> {
    let c = constants(d)?;
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    let rsq: f64 = x.iter().map(|&v| (v * v) as f64).sum();
    if rsq == 0.0 {
        return Err(Error::Parameter(
            "remainder is defined away from the origin".into(),
        ));
    }
    Ok(rsq.sqrt().powi(d as i32 - 2) * f_val / c.a - h0)
}

/// Least-squares fit of `log f` against `log r` over rows `(r, f)`.
/// Returns `(slope, intercept, r2)`.
///
/// Sign-changing data is rejected rather than silently rectified; callers
/// that want a magnitude fit take `|f|` themselves and flag it.
pub fn fit_decay_exponent(rows: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if rows.len() < 3 {
        return Err(Error::NotEnoughData(format!(
            "decay fit needs at least 3 rows, got {}",
            rows.len()
        )));
    }
    for (i, &(r, f)) in rows.iter().enumerate() {
        if !(r > 0.0) {
            return Err(Error::Parameter(format!(
                "fit row {i} has nonpositive radius {r}"
            )));
        }
        if !(f > 0.0) {
            return Err(Error::NonpositiveFit { index: i, value: f });
        }
    }
    let mut radii: Vec<f64> = rows.iter().map(|&(r, _)| r).collect();
    radii.sort_by(f64::total_cmp);
    for w in radii.windows(2) {
        if (w[1] - w[0]).abs() <= 1e-12 * w[1] {
            return Err(Error::Parameter(format!(
                "fit rows repeat the radius {}",
                w[0]
            )));
        }
    }
    let n = rows.len() as f64;
    let xbar = rows.iter().map(|&(r, _)| r.ln()).sum::<f64>() / n;
    let ybar = rows.iter().map(|&(_, f)| f.ln()).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(r, f) in rows {
        let dx = r.ln() - xbar;
        let dy = f.ln() - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r2 = if syy <= 1e-24 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok((slope, intercept, r2))
}

/// All derivative multi-indices with `|alpha| <= n` over `d` axes, in a
/// fixed lexicographic order (the all-zero index first).
fn multi_indices(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn fill(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, axis: usize, budget: usize) {
        if axis == cur.len() {
            out.push(cur.clone());
            return;
        }
        for m in 0..=budget {
            cur[axis] = m;
            fill(out, cur, axis + 1, budget - m);
        }
        cur[axis] = 0;
    }
    let mut out = Vec::new();
    fill(&mut out, &mut vec![0; d], 0, n);
    out.sort();
    out
}

/// Sum over all multi-indices `|alpha| <= n` of the `L^p` norms (normalized
/// torus measure) of the finite-difference derivatives of `f` over the
/// region, quadratured on the offset grid.
///
/// Nodes keep [`FD_CLEARANCE`] away from the region boundary so every
/// stencil point stays inside; derivatives are Richardson pairs at
/// [`FD_STEP`] and half of it, and a pair that fails to settle reports the
/// symbol as numerically outside the space rather than returning a number.
pub fn sobolev_norm(
    f: &Symbol,
    region: NormRegion,
    n: usize,
    p: f64,
    grid: &QuadratureGrid,
    chi: &BumpFunction,
) -> Result<f64> {
    let d = grid.dim();
    if f.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: f.dim(),
        });
    }
    if chi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: chi.dim(),
        });
    }
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!(
            "integrability exponent must be at least 1, got {p}"
        )));
    }
    if n > MAX_NORM_ORDER {
        return Err(Error::Parameter(format!(
            "derivative order {n} above the supported maximum {MAX_NORM_ORDER}"
        )));
    }

    // Quadrature nodes strictly inside the region, with stencil clearance.
    let axis = offset_nodes(grid.n_per_axis());
    let mut nodes: Vec<f64> = Vec::new();
    let mut idx = vec![0usize; d];
    'mesh: loop {
        let rsq: f64 = (0..d).map(|a| axis[idx[a]] * axis[idx[a]]).sum();
        let r = rsq.sqrt();
        let keep = match region {
            NormRegion::OuterBall => r + FD_CLEARANCE <= chi.outer_radius(),
            NormRegion::TorusMinusInnerBall => r >= chi.inner_radius() + FD_CLEARANCE,
        };
        if keep {
            nodes.extend((0..d).map(|a| axis[idx[a]]));
        }
        let mut a = 0;
        loop {
            if a == d {
                break 'mesh;
            }
            idx[a] += 1;
            if idx[a] < axis.len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
    if nodes.is_empty() {
        return Err(Error::Stencil(format!(
            "no grid node clears the region boundary by {FD_CLEARANCE}"
        )));
    }

    let ev = f.evaluator();
    let g = |k: &[f64]| -> f64 {
        let ksq: f64 = k.iter().map(|v| v * v).sum();
        ev.value(k, ksq)
    };
    let cell = 1.0 / (grid.n_per_axis() as f64).powi(d as i32);

    let mut norm = 0.0;
    for alpha in multi_indices(d, n) {
        let order: usize = alpha.iter().sum();
        let mut powers = Compensated::new();
        for node in nodes.chunks_exact(d) {
            let val = if order == 0 {
                g(node)
            } else {
                let coarse = central_diff(&g, node, &alpha, FD_STEP);
                let fine = central_diff(&g, node, &alpha, FD_STEP / 2.0);
                let ext = (4.0 * fine - coarse) / 3.0;
                if (fine - coarse).abs() > 0.25 * (1.0 + ext.abs()) {
                    return Err(Error::Refinement(format!(
                        "derivative {alpha:?} does not settle under step halving \
                         at k = {node:?} ({coarse:.3e} vs {fine:.3e})"
                    )));
                }
                ext
            };
            powers.add(val.abs().powf(p) * cell);
        }
        norm += powers.total().powf(1.0 / p);
    }
    Ok(norm)
}

/// Recomputes the scale-free diagnostic `max |remainder| / (norm_f +
/// norm_h)` from a finished report.
pub fn verify_bound(report: &AsymptoticsReport) -> Result<f64> {
    if report.rows.is_empty() {
        return Err(Error::NotEnoughData(
            "bound ratio needs at least one row".into(),
        ));
    }
    if !(report.norm_f > 0.0 && report.norm_h > 0.0) {
        return Err(Error::Parameter(format!(
            "bound ratio needs positive norms, got {} and {}",
            report.norm_f, report.norm_h
        )));
    }
    let worst = report
        .rows
        .iter()
        .map(|row| row.remainder.abs())
        .fold(0.0, f64::max);
    Ok(worst / (report.norm_f + report.norm_h))
}

/// Sup of the weighted profile `|y|^{n_d} |s(y)|` over a fixed angular
/// probe set, for each radius in increasing order.
pub fn u_decay_check(
    h: &Symbol,
    chi: &BumpFunction,
    radii: &[f64],
    grid: &QuadratureGrid,
) -> Result<Vec<(f64, f64)>> {
    let d = grid.dim();
    let c = constants(d)?;
    if radii.is_empty() {
        return Err(Error::NotEnoughData("need at least one probe radius".into()));
    }
    if !(radii[0] > 0.0) {
        return Err(Error::Parameter(format!(
            "probe radii must be positive, got {}",
            radii[0]
        )));
    }
    for w in radii.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Parameter(format!(
                "probe radii must increase, got {} after {}",
                w[1], w[0]
            )));
        }
    }
    let dirs = angular_probe_set(d);
    let mut out = Vec::with_capacity(radii.len());
    let mut y = vec![0.0; d];
    for &r in radii {
        let mut sup = 0.0f64;
        for dir in &dirs {
            for a in 0..d {
                y[a] = r * dir[a];
            }
            let s = s_eval(h, chi, &y, grid)?;
            sup = sup.max(r.powi(c.n as i32) * s.value.abs());
        }
        out.push((r, sup));
    }
    Ok(out)
}

/// Fixed angular probes: the coordinate axes, every two-axis diagonal, the
/// main diagonal, and two rays with irrational component ratios so not all
/// probes sit on lattice-symmetric lines.
fn angular_probe_set(d: usize) -> Vec<Vec<f64>> {
    fn normalized(mut v: Vec<f64>) -> Vec<f64> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        v
    }
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for a in 0..d {
        let mut e = vec![0.0; d];
        e[a] = 1.0;
        dirs.push(e);
    }
    for a in 0..d {
        for b in a + 1..d {
            let mut e = vec![0.0; d];
            e[a] = 1.0;
            e[b] = 1.0;
            dirs.push(normalized(e));
        }
    }
    dirs.push(vec![1.0 / (d as f64).sqrt(); d]);
    dirs.push(normalized(
        (0..d).map(|a| ((a + 1) as f64).sqrt()).collect(),
    ));
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    dirs.push(normalized((0..d).map(|a| phi.powi(a as i32)).collect()));
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::StepDistribution;
    use crate::smoothing::make_bump;
    use crate::symbols::{green_symbol, h_at_zero, h_symbol};
    use std::f64::consts::PI;

    fn srw_h(d: usize) -> Symbol {
        let dist = StepDistribution::srw(d).unwrap();
        let g = green_symbol(&dist).unwrap();
        h_symbol(&g, h_at_zero(&dist).unwrap())
    }

    fn default_bump(d: usize) -> BumpFunction {
        make_bump(d, PI / 4.0, PI / 2.0).unwrap()
    }

    #[test]
    fn remainder_vanishes_for_exact_leading_term() {
        let c = constants(3).unwrap();
        let f_val = c.a * 6.0 / 7.0;
        let r = remainder(f_val, &[7, 0, 0], 6.0, 3).unwrap();
        assert!(r.abs() < 1e-12, "r = {r:.3e}");
        let c5 = constants(5).unwrap();
        let f5 = c5.a * 10.0 / 27.0;
        let r5 = remainder(f5, &[3, 0, 0, 0, 0], 10.0, 5).unwrap();
        assert!(r5.abs() < 1e-12, "r5 = {r5:.3e}");
    }

    #[test]
    fn remainder_of_zero_value_is_minus_h0() {
        let r = remainder(0.0, &[2, 1, 0], 6.0, 3).unwrap();
        assert_eq!(r, -6.0);
    }

    #[test]
    fn remainder_is_linear_in_the_value() {
        // remainder(2f) - remainder(f) equals the scaled value itself.
        let c = constants(3).unwrap();
        let x = [3i64, 4, 0];
        let f_val = 0.0123;
        let lo = remainder(f_val, &x, 6.0, 3).unwrap();
        let hi = remainder(2.0 * f_val, &x, 6.0, 3).unwrap();
        let scaled = 5.0 * f_val / c.a;
        assert!(
            (hi - lo - scaled).abs() < 1e-14 * scaled.abs(),
            "{} vs {}",
            hi - lo,
            scaled
        );
    }

    #[test]
    fn remainder_rejects_origin_and_wrong_dim() {
        assert!(matches!(
            remainder(1.0, &[0, 0, 0], 6.0, 3),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            remainder(1.0, &[1, 0], 6.0, 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let rows: Vec<(f64, f64)> = [2.0, 3.0, 5.0, 8.0, 13.0]
            .iter()
            .map(|&r| (r, 2.7 / r))
            .collect();
        let (slope, intercept, r2) = fit_decay_exponent(&rows).unwrap();
        assert!((slope + 1.0).abs() < 1e-12, "slope {slope}");
        assert!((intercept - 2.7f64.ln()).abs() < 1e-12);
        assert!(r2 > 1.0 - 1e-12);
    }

    #[test]
    fn fit_of_constant_rows_is_flat() {
        let rows = vec![(2.0, 0.4), (4.0, 0.4), (9.0, 0.4)];
        let (slope, _, r2) = fit_decay_exponent(&rows).unwrap();
        assert!(slope.abs() < 1e-12, "slope {slope}");
        assert_eq!(r2, 1.0);
    }

    #[test]
    fn fit_slope_ignores_positive_scaling() {
        let rows = vec![(2.0, 0.31), (3.0, 0.17), (5.0, 0.093), (9.0, 0.041)];
        let scaled: Vec<(f64, f64)> = rows.iter().map(|&(r, f)| (r, 7.3 * f)).collect();
        let (s1, i1, _) = fit_decay_exponent(&rows).unwrap();
        let (s2, i2, _) = fit_decay_exponent(&scaled).unwrap();
        assert!((s1 - s2).abs() < 1e-12, "{s1} vs {s2}");
        assert!((i2 - i1 - 7.3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_input_validation() {
        assert!(matches!(
            fit_decay_exponent(&[(1.0, 1.0), (2.0, 0.5)]),
            Err(Error::NotEnoughData(_))
        ));
        let bad = fit_decay_exponent(&[(1.0, 1.0), (2.0, -0.5), (3.0, 0.3)]);
        match bad {
            Err(Error::NonpositiveFit { index, value }) => {
                assert_eq!(index, 1);
                assert_eq!(value, -0.5);
            }
            other => panic!("expected NonpositiveFit, got {other:?}"),
        }
        assert!(matches!(
            fit_decay_exponent(&[(1.0, 1.0), (1.0, 0.5), (3.0, 0.3)]),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            fit_decay_exponent(&[(0.0, 1.0), (2.0, 0.5), (3.0, 0.3)]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn flat_symbol_norm_is_region_volume() {
        // Order zero, integrability one: the norm of the constant symbol is
        // the normalized volume of the region. Tolerance covers the node
        // granularity of the ball indicator plus the stencil clearance.
        let f = Symbol::constant(3, 1.0);
        let chi = default_bump(3);
        let grid = QuadratureGrid::new(3, 32).unwrap();
        let v0 = sobolev_norm(&f, NormRegion::TorusMinusInnerBall, 0, 1.0, &grid, &chi).unwrap();
        let ball = (4.0 / 3.0) * PI * (PI / 4.0).powi(3) / (2.0 * PI).powi(3);
        assert!((v0 - (1.0 - ball)).abs() < 6e-3, "v0 = {v0}");
        // Derivative orders add nothing for a constant, and the node set is
        // identical by the fixed clearance, so the norm is unchanged.
        let v2 = sobolev_norm(&f, NormRegion::TorusMinusInnerBall, 2, 1.0, &grid, &chi).unwrap();
        assert!(v2 >= v0, "order terms must not decrease the norm");
        assert!((v2 - v0).abs() < 1e-6, "v2 - v0 = {:.3e}", v2 - v0);
    }

    #[test]
    fn quotient_norm_is_finite_and_grid_stable() {
        let h = srw_h(3);
        let chi = default_bump(3);
        // The ball-indicator boundary layer dominates the grid dependence
        // and thins like the node spacing, so percent-level stability needs
        // this resolution.
        let coarse = sobolev_norm(
            &h,
            NormRegion::OuterBall,
            2,
            2.0,
            &QuadratureGrid::new(3, 64).unwrap(),
            &chi,
        )
        .unwrap();
        let fine = sobolev_norm(
            &h,
            NormRegion::OuterBall,
            2,
            2.0,
            &QuadratureGrid::new(3, 128).unwrap(),
            &chi,
        )
        .unwrap();
        assert!(coarse.is_finite() && coarse > 0.0);
        let rel = (fine - coarse).abs() / fine;
        assert!(rel < 0.01, "coarse {coarse} vs fine {fine} (rel {rel:.2e})");
    }

    #[test]
    fn norms_grow_with_order_and_region() {
        let h = srw_h(3);
        let chi = default_bump(3);
        let grid = QuadratureGrid::new(3, 32).unwrap();
        let n0 = sobolev_norm(&h, NormRegion::OuterBall, 0, 2.0, &grid, &chi).unwrap();
        let n1 = sobolev_norm(&h, NormRegion::OuterBall, 1, 2.0, &grid, &chi).unwrap();
        let n2 = sobolev_norm(&h, NormRegion::OuterBall, 2, 2.0, &grid, &chi).unwrap();
        assert!(n0 < n1 && n1 < n2, "{n0} {n1} {n2}");
        // A strictly smaller ball integrates over a node subset.
        let narrow = make_bump(3, PI / 8.0, PI / 4.0).unwrap();
        let small = sobolev_norm(&h, NormRegion::OuterBall, 1, 2.0, &grid, &narrow).unwrap();
        let large = sobolev_norm(&h, NormRegion::OuterBall, 1, 2.0, &grid, &chi).unwrap();
        assert!(small < large, "{small} vs {large}");
    }

    #[test]
    fn kinked_symbol_fails_step_refinement() {
        // Square-root kink on the planes |k_1| = 0.49: first derivatives
        // explode under step halving at the grid nodes nearest the plane,
        // which the settling check must report instead of integrating.
        let f = Symbol::custom(3, None, |k: &[f64]| {
            1.0 + (k[0].abs() - 0.49).abs().sqrt()
        });
        let chi = default_bump(3);
        let grid = QuadratureGrid::new(3, 32).unwrap();
        let got = sobolev_norm(&f, NormRegion::TorusMinusInnerBall, 2, 2.0, &grid, &chi);
        assert!(matches!(got, Err(Error::Refinement(_))), "got {got:?}");
    }

    #[test]
    fn bound_ratio_of_synthetic_report() {
        let c = constants(3).unwrap();
        let mk_row = |l: i64, rem: f64| ReportRow {
            x: vec![l, 0, 0],
            f: c.a * (6.0 + rem) / l as f64,
            scaled: 6.0 + rem,
            remainder: rem,
            error_estimate: 1e-9,
            method_tag: "synthetic".into(),
        };
        let mut report = AsymptoticsReport {
            schema_version: REPORT_SCHEMA_VERSION,
            d: 3,
            model_id: "synthetic".into(),
            rows: vec![mk_row(10, 0.0), mk_row(20, 0.0)],
            fitted_exponent: -1.0,
            fit_r2: 1.0,
            fit_used_abs: false,
            h0: 6.0,
            norm_f: 2.0,
            norm_h: 3.0,
            bound_ratio: 0.0,
        };
        assert_eq!(verify_bound(&report).unwrap(), 0.0);
        report.rows.push(mk_row(40, -0.25));
        assert!((verify_bound(&report).unwrap() - 0.05).abs() < 1e-15);
        report.norm_h = 0.0;
        assert!(matches!(verify_bound(&report), Err(Error::Parameter(_))));
        report.norm_h = 3.0;
        report.rows.clear();
        assert!(matches!(verify_bound(&report), Err(Error::NotEnoughData(_))));
    }

    #[test]
    fn probe_set_is_unit_length() {
        for d in [3usize, 5] {
            let dirs = angular_probe_set(d);
            assert_eq!(dirs.len(), d + d * (d - 1) / 2 + 3);
            for dir in &dirs {
                let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weighted_profile_shrinks_with_radius() {
        // A trigonometric-polynomial symbol times the bump transforms to a
        // smooth compactly-banded profile whose weighted sup decays fast.
        let h = Symbol::custom(3, None, |k: &[f64]| {
            2.0 + k[0].cos() + k[1].cos() + k[2].cos()
        });
        let chi = default_bump(3);
        let grid = QuadratureGrid::new(3, 32).unwrap();
        // The profile oscillates under its decaying envelope, so sup samples
        // at nearby radii scatter; space the radii far enough apart that the
        // envelope drop dominates the crest-to-trough ratio.
        let sups = u_decay_check(&h, &chi, &[6.0, 20.0, 70.0], &grid).unwrap();
        assert_eq!(sups.len(), 3);
        assert!(
            sups[1].1 < sups[0].1 && sups[2].1 < sups[1].1,
            "sups = {sups:?}"
        );
    }

    #[test]
    fn probe_radii_validation() {
        let h = srw_h(3);
        let chi = default_bump(3);
        let grid = QuadratureGrid::new(3, 16).unwrap();
        let single = u_decay_check(&h, &chi, &[7.0], &grid).unwrap();
        assert_eq!(single.len(), 1);
        assert!(matches!(
            u_decay_check(&h, &chi, &[], &grid),
            Err(Error::NotEnoughData(_))
        ));
        assert!(matches!(
            u_decay_check(&h, &chi, &[8.0, 8.0], &grid),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            u_decay_check(&h, &chi, &[-1.0, 4.0], &grid),
            Err(Error::Parameter(_))
        ));
    }
}
