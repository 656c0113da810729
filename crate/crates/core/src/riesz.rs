//! Real-space evaluation of the singular part as a Riesz-kernel convolution.
//!
//! With `s` the inverse transform of the compactly supported product
//! `s_hat = chi_hat * h`, the singular part becomes
//! `I1(x) = a_d int |x - y|^{2-d} s(y) dy`. This module evaluates `s`
//! pointwise ([`s_eval`]), tabulates it on cubic grids by a separable
//! cosine contraction, and integrates the convolution over a ball with an
//! analytic envelope correction for the remaining tail ([`i1_riesz`],
//! [`j2_tail`]). Because `s_hat` is supported strictly inside the
//! fundamental cell, the grid sums equal `s` up to images displaced by the
//! full grid period, which decay with the function itself: node counts only
//! have to track the phase oscillation, not the symbol's regularity.

use crate::numeric::{hurwitz_zeta, Compensated};
use crate::quad::{gauss_legendre_on, positive_offset_nodes, sphere_surface};
use crate::smoothing::BumpFunction;
use crate::symbols::{constants, Symbol};
use crate::transform::{check_even, Estimated, QuadratureGrid};
use crate::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Affordability cap for a single folded evaluation: capped nodes per axis
/// raised to the dimension.
const MAX_EVAL_NODES: usize = 1 << 26;

/// Oscillation rule shared by every grid in this module: nodes per axis so
/// that the phase `k . y` is sampled at least eight times per period along
/// each axis, with the caller's grid as the floor.
fn oscillation_nodes(base: usize, y_inf: f64, r_outer: f64) -> usize {
    let need = (8.0 * y_inf * r_outer / PI).ceil() as usize;
    base.max(need).next_multiple_of(2)
}

/// Pointwise `s(y) = int chi_hat(k) h(k) e^{-ik.y} dk / (2pi)^d` over the
/// support ball. `y` need not be a lattice point. The reported error is the
/// grid-doubling difference; the dominant true error is the grid image
/// `s(y + n e_j)`, far below it for the enforced node counts.
pub fn s_eval(h: &Symbol, chi: &BumpFunction, y: &[f64], grid: &QuadratureGrid) -> Result<Estimated> {
    let d = grid.dim();
    if h.dim() != d || chi.dim() != d || y.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: if h.dim() != d { h.dim() } else { y.len() },
        });
    }
    check_even(h)?;
    let y_inf = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let r_outer = chi.outer_radius();
    let n = oscillation_nodes(grid.n_per_axis(), y_inf, r_outer);
    // The refined comparison grid is the expensive one; budget for it.
    let capped = (2.0 * n as f64 * r_outer / (2.0 * PI)).ceil() as usize + 1;
    if capped.pow(d as u32) > MAX_EVAL_NODES {
        return Err(Error::Grid(format!(
            "|y|_inf = {y_inf:.1} needs {n} nodes per axis; pointwise evaluation unaffordable"
        )));
    }
    let eval = h.evaluator();
    let run = |n: usize| {
        crate::transform::FoldGrid::uniform(d, n, Some(r_outer)).sum_phase(y, |k, ksq| {
            let w = chi.eval_radial(ksq.sqrt());
            if w == 0.0 {
                0.0
            } else {
                w * eval.value(k, ksq)
            }
        })
    };
    let coarse = run(n);
    let fine = run(2 * n);
    Ok(Estimated {
        value: fine,
        error: (fine - coarse).abs().max(1e-14 * fine.abs()),
    })
}

// ---------------------------------------------------------------------------
// Tabulated s on cubic grids.

/// `s` sampled on the cubic grid `delta * Z^d` inside a box, stored on the
/// nonnegative octant (the integrand is even per axis, so `s` is too).
pub(crate) struct SField {
    dim: usize,
    delta: f64,
    /// Octant extent: valid indices are `0..=half` per axis.
    half: usize,
    values: Vec<f64>,
}

impl SField {
    /// Tabulates `s` on `delta * Z^d` covering `|y|_inf <= r_max` by a
    /// separable cosine contraction: the tensor k-grid sum is folded one
    /// axis at a time, so the cost is a handful of dense matrix passes
    /// instead of one full k-sum per node.
    pub fn build(
        h: &Symbol,
        chi: &BumpFunction,
        r_max: f64,
        delta: f64,
        n_k: usize,
    ) -> Result<SField> {
        let d = h.dim();
        let r_outer = chi.outer_radius();
        let ks: Vec<f64> = positive_offset_nodes(n_k)
            .into_iter()
            .take_while(|&k| k < r_outer)
            .collect();
        if ks.is_empty() {
            return Err(Error::Grid(format!(
                "no grid nodes inside the support ball (n = {n_k})"
            )));
        }
        let m = ks.len();
        // Even extent so that every second node is again a centered lattice
        // (the coarse half of a Richardson pair stays aligned with x).
        let half = ((r_max / delta).ceil() as usize).next_multiple_of(2);
        let t = half + 1;
        if (t as f64).powi(d as i32) * 8.0 > 2e9 {
            return Err(Error::Grid(format!(
                "field of {t}^{d} nodes exceeds the memory budget"
            )));
        }

        // Samples of chi_hat * h on the positive-orthant k-grid.
        let eval = h.evaluator();
        let mut data: Vec<f64> = (0..m.pow(d as u32))
            .into_par_iter()
            .map(|flat| {
                let mut k = [0.0f64; 8];
                let mut rest = flat;
                for a in (0..d).rev() {
                    k[a] = ks[rest % m];
                    rest /= m;
                }
                let ksq: f64 = k[..d].iter().map(|c| c * c).sum();
                let w = chi.eval_radial(ksq.sqrt());
                if w == 0.0 {
                    0.0
                } else {
                    w * eval.value(&k[..d], ksq)
                }
            })
            .collect();

        // Contract the trailing k-axis against its cosine table, repeatedly:
        // [k_0 .. k_a, y_{a+1} .. ] -> [k_0 .. k_{a-1}, y_a, y_{a+1} .. ].
        let w_axis = 2.0 / n_k as f64;
        for a in (0..d).rev() {
            let mut table = vec![0.0f64; m * t];
            for (i, &k) in ks.iter().enumerate() {
                for tau in 0..t {
                    table[i * t + tau] = w_axis * (k * delta * tau as f64).cos();
                }
            }
            let pre = m.pow(a as u32);
            let post = t.pow((d - 1 - a) as u32);
            let mut out = vec![0.0f64; pre * t * post];
            out.par_chunks_mut(t * post)
                .zip(data.par_chunks(m * post))
                .for_each(|(out_chunk, in_chunk)| {
                    for i in 0..m {
                        let row = &in_chunk[i * post..(i + 1) * post];
                        for tau in 0..t {
                            let c = table[i * t + tau];
                            let dst = &mut out_chunk[tau * post..(tau + 1) * post];
                            for (o, &v) in dst.iter_mut().zip(row) {
                                *o += c * v;
                            }
                        }
                    }
                });
            data = out;
        }

        Ok(SField {
            dim: d,
            delta,
            half,
            values: data,
        })
    }

    pub fn half(&self) -> usize {
        self.half
    }

    /// Value at the node `delta * j` (any signs; folded onto the octant).
    pub fn get(&self, j: &[i64]) -> f64 {
        let t = self.half + 1;
        let mut idx = 0usize;
        for &ji in j {
            idx = idx * t + ji.unsigned_abs() as usize;
        }
        self.values[idx]
    }

    /// Per-unit-radius shell statistics `(center, sup |s|, sum s)` for bins
    /// `[j, j+1)` in `|y|`, computed over the whole signed grid.
    pub fn shell_stats(&self, r_lo: f64, r_hi: f64) -> Vec<(f64, f64, f64)> {
        let lo = r_lo.floor().max(0.0) as usize;
        let hi = (r_hi.ceil() as usize).max(lo + 1);
        let mut sup = vec![0.0f64; hi - lo];
        let mut sum = vec![Compensated::new(); hi - lo];
        let h = self.half as i64;
        let mut j = vec![-h; self.dim];
        'outer: loop {
            let r = self
                .delta
                * (j.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt();
            if r >= lo as f64 && r < hi as f64 {
                let v = self.get(&j);
                let bin = (r as usize) - lo;
                sup[bin] = sup[bin].max(v.abs());
                sum[bin].add(v);
            }
            let mut a = 0;
            loop {
                if a == self.dim {
                    break 'outer;
                }
                j[a] += 1;
                if j[a] <= h {
                    break;
                }
                j[a] = -h;
                a += 1;
            }
        }
        (0..hi - lo)
            .map(|b| ((lo + b) as f64 + 0.5, sup[b], sum[b].total() * self.delta.powi(self.dim as i32)))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Kernel cell integrals.

/// `int_{[0,1]^d} |u|^{2-d} du`, by the self-similar corner identity: the
/// sub-box `[0,1/2]^d` is a copy of the whole integral scaled by
/// `2^{-d} * 2^{d-2} = 1/4`, so the integral equals `4/3` of the sum over
/// the remaining `2^d - 1` half-size boxes, where the integrand is smooth
/// (`|u| >= 1/2`) and plain Gauss-Legendre converges fast.
fn corner_unit_integral(d: usize) -> f64 {
    let g = 12;
    let lo = gauss_legendre_on(0.0, 0.5, g);
    let hi = gauss_legendre_on(0.5, 1.0, g);
    let mut total = 0.0;
    for box_id in 1..(1usize << d) {
        let mut acc = Compensated::new();
        let mut idx = vec![0usize; d];
        loop {
            let mut rsq = 0.0;
            let mut w = 1.0;
            for a in 0..d {
                let nb = if box_id >> a & 1 == 0 { &lo } else { &hi };
                let u = nb.0[idx[a]];
                rsq += u * u;
                w *= nb.1[idx[a]];
            }
            acc.add(w * rsq.powf((2.0 - d as f64) / 2.0));
            let mut a = 0;
            loop {
                if a == d {
                    break;
                }
                idx[a] += 1;
                if idx[a] < g {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
        total += acc.total();
    }
    total * 4.0 / 3.0
}

/// `int_{cell} |u|^{2-d} du` over the cell `[-1/2, 1/2]^d`, in units where
/// the cell has side one: `2^{d-2}` corner integrals by even symmetry.
fn centered_cell_integral(d: usize) -> f64 {
    2.0f64.powi(d as i32 - 2) * corner_unit_integral(d)
}

/// `|u|^{2-d}` from `|u|^2`, avoiding `powf` on the hot path.
#[inline]
fn inv_dist_pow(rsq: f64, d: usize) -> f64 {
    match d {
        3 => rsq.sqrt().recip(),
        4 => rsq.recip(),
        5 => (rsq * rsq.sqrt()).recip(),
        _ => (rsq * rsq).recip(),
    }
}

// ---------------------------------------------------------------------------
// The convolution engine.

struct ConvRegion {
    r_dom: f64,
    /// Keep nodes with `|y| >= cut` (outer-region restriction).
    inner_cut: Option<f64>,
}

/// `a_d sum_nodes |x - y|^{2-d} s(y) delta^d` over the ball, with the
/// kernel integrated exactly over cells at and next to `x`. `step` walks
/// every `step`-th node of the field, so one tabulation serves both the
/// fine and the coarse sum of a Richardson pair.
fn convolve(field: &SField, x: &[i64], region: &ConvRegion, step: usize) -> f64 {
    let d = field.dim;
    let a_d = constants(d).expect("dimension validated upstream").a;
    let delta = field.delta * step as f64;
    let cell_volume = delta.powi(d as i32);
    let half = field.half as i64;
    let step_i = step as i64;
    let inv_delta = 1.0 / field.delta;
    let xj: Vec<i64> = x
        .iter()
        .map(|&xi| (xi as f64 * inv_delta).round() as i64)
        .collect();
    let near_r = if d <= 4 { 2i64 } else { 1i64 };
    let gl_order = if d <= 4 { 8 } else { 4 };
    let gl = gauss_legendre_on(-delta / 2.0, delta / 2.0, gl_order);
    let cell_unit = centered_cell_integral(d);
    let r_dom_sq = region.r_dom * region.r_dom;
    let cut_sq = region.inner_cut.map(|c| c * c - 1e-9);

    let first: Vec<i64> = (-half..=half).step_by(step).collect();
    let partials: Vec<f64> = first
        .par_iter()
        .map(|&j0| {
            let mut acc = Compensated::new();
            let mut j = vec![0i64; d];
            j[0] = j0;
            for a in 1..d {
                j[a] = -half;
            }
            'outer: loop {
                let ysq: f64 = j
                    .iter()
                    .map(|&v| {
                        let y = v as f64 * field.delta;
                        y * y
                    })
                    .sum();
                let inside = ysq <= r_dom_sq && cut_sq.map_or(true, |c| ysq >= c);
                if inside {
                    let dj_inf = j
                        .iter()
                        .zip(&xj)
                        .map(|(&ji, &xi)| (ji - xi).abs() / step_i)
                        .max()
                        .unwrap_or(0);
                    let aligned = j.iter().zip(&xj).all(|(&ji, &xi)| (ji - xi) % step_i == 0);
                    let s_val = field.get(&j);
                    if !aligned || dj_inf > near_r {
                        let rsq: f64 = j
                            .iter()
                            .zip(&xj)
                            .map(|(&ji, &xi)| {
                                let u = (ji - xi) as f64 * field.delta;
                                u * u
                            })
                            .sum();
                        acc.add(s_val * a_d * inv_dist_pow(rsq, d) * cell_volume);
                    } else if dj_inf == 0 {
                        acc.add(s_val * a_d * delta * delta * cell_unit);
                    } else {
                        // Kernel integrated over the cell by tensor
                        // Gauss-Legendre; s frozen at the node.
                        let c: Vec<f64> = j
                            .iter()
                            .zip(&xj)
                            .map(|(&ji, &xi)| (xi - ji) as f64 * field.delta)
                            .collect();
                        let mut cell = Compensated::new();
                        let mut idx = vec![0usize; d];
                        loop {
                            let mut rsq = 0.0;
                            let mut w = 1.0;
                            for a in 0..d {
                                let u = c[a] - gl.0[idx[a]];
                                rsq += u * u;
                                w *= gl.1[idx[a]];
                            }
                            cell.add(w * inv_dist_pow(rsq, d));
                            let mut a = 0;
                            loop {
                                if a == d {
                                    break;
                                }
                                idx[a] += 1;
                                if idx[a] < gl_order {
                                    break;
                                }
                                idx[a] = 0;
                                a += 1;
                            }
                            if idx.iter().all(|&i| i == 0) {
                                break;
                            }
                        }
                        acc.add(s_val * a_d * cell.total());
                    }
                }
                let mut a = 1;
                loop {
                    if a == d {
                        break 'outer;
                    }
                    j[a] += step_i;
                    if j[a] <= half {
                        break;
                    }
                    j[a] = -half;
                    a += 1;
                }
            }
            acc.total()
        })
        .collect();
    let mut total = Compensated::new();
    for p in partials {
        total.add(p);
    }
    total.total()
}

/// Analytic tail correction for the region `|y| > r_dom`.
///
/// For `d >= 4` the envelope `|s(y)| <= u_sup |y|^{-n_d}` integrates in
/// closed form against the kernel's spherical average (`rho^{2-d}` for
/// shells outside `|x|`). For `d = 3` that integral diverges (`n_3 = 2`
/// exactly cancels the shell growth), so the envelope exponent is instead
/// fitted from the field's outer shells and must come out steeper than 2.
fn tail_correction(field: &SField, d: usize, r_dom: f64) -> Result<f64> {
    let c = constants(d)?;
    let stats = field.shell_stats(0.72 * r_dom, r_dom);
    let usable: Vec<(f64, f64)> = stats
        .iter()
        .filter(|&&(_, sup, _)| sup > 0.0)
        .map(|&(rho, sup, _)| (rho, sup))
        .collect();
    if usable.len() < 3 {
        return Err(Error::TailFit(format!(
            "only {} usable shells in [{:.1}, {:.1}]",
            usable.len(),
            0.72 * r_dom,
            r_dom
        )));
    }
    if d >= 4 {
        let n_d = c.n as f64;
        let u_sup = usable
            .iter()
            .map(|&(rho, sup)| sup * rho.powf(n_d))
            .fold(0.0f64, f64::max);
        return Ok(c.a * u_sup * sphere_surface(d - 1) * r_dom.powf(2.0 - n_d) / (n_d - 2.0));
    }
    // d = 3: least-squares slope of ln sup vs ln rho.
    let n = usable.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(rho, sup) in &usable {
        let lx = rho.ln();
        let ly = sup.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let m = -slope;
    if m <= 2.25 {
        return Err(Error::TailFit(format!(
            "shell envelope decays like rho^{:.2}; too slow to integrate the tail",
            -m
        )));
    }
    let sup_at_dom = intercept.exp() * r_dom.powf(-m);
    // 4 pi a_3 = 1: the tail integral collapses to sup * R^2 / (m - 2).
    Ok(sup_at_dom * r_dom * r_dom / (m - 2.0))
}

/// Shared driver: tabulate `s` once at `delta = 1/2`, convolve at both
/// `delta` and `2 delta` through the same table, extrapolate the `delta^2`
/// error, and append the analytic tail.
fn convolution_value(
    h: &Symbol,
    chi: &BumpFunction,
    x: &[i64],
    r_dom: f64,
    inner_cut: Option<f64>,
    grid: &QuadratureGrid,
) -> Result<Estimated> {
    let d = grid.dim();
    if h.dim() != d || chi.dim() != d || x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: if h.dim() != d { h.dim() } else { x.len() },
        });
    }
    check_even(h)?;
    if r_dom < 6.0 {
        return Err(Error::Parameter(format!(
            "domain radius {r_dom} too small for the tail window; need at least 6"
        )));
    }
    let n_k = oscillation_nodes(grid.n_per_axis(), r_dom, chi.outer_radius());
    let field = SField::build(h, chi, r_dom, 0.5, n_k)?;
    let region = ConvRegion { r_dom, inner_cut };
    let fine = convolve(&field, x, &region, 1);
    let coarse = convolve(&field, x, &region, 2);
    let value = fine + (fine - coarse) / 3.0;
    let grid_err = (fine - coarse).abs() / 3.0;
    let tail = tail_correction(&field, d, r_dom)?;
    let total = value + tail;
    if tail.abs() > 0.1 * total.abs() {
        return Err(Error::TailDominates {
            tail,
            value: total,
        });
    }
    Ok(Estimated {
        value: total,
        error: grid_err + tail.abs() + 1e-12 * total.abs(),
    })
}

/// `I1(x)` as the real-space convolution `a_d int |x-y|^{2-d} s(y) dy`
/// over `|y| <= domain_radius`, plus the analytic envelope tail. Requires
/// `domain_radius >= 2 |x|` so that every tail shell lies outside `|x|`,
/// where the kernel's spherical average is exactly `rho^{2-d}`.
pub fn i1_riesz(
    h: &Symbol,
    chi: &BumpFunction,
    x: &[i64],
    domain_radius: f64,
    grid: &QuadratureGrid,
) -> Result<Estimated> {
    let x_norm = x.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
    if domain_radius < 2.0 * x_norm {
        return Err(Error::Parameter(format!(
            "domain_radius {domain_radius} < 2 |x| = {:.2}",
            2.0 * x_norm
        )));
    }
    convolution_value(h, chi, x, domain_radius, None, grid)
}

/// `|x|^{d-2} J2(x)` with `J2 = a_d int_{|y| >= eps |x|} |x-y|^{2-d} s(y) dy`:
/// the same convolution restricted to the outer region. The domain radius
/// is `max(2 |x|, 64)`: the mollifier profile inside `s` decays only like a
/// stretched exponential, so smaller balls leave the envelope tail above
/// the 10% gate.
pub fn j2_tail(
    h: &Symbol,
    chi: &BumpFunction,
    x: &[i64],
    epsilon: f64,
    grid: &QuadratureGrid,
) -> Result<Estimated> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if x.iter().all(|&v| v == 0) {
        return Err(Error::Parameter("j2_tail needs x != 0".into()));
    }
    let d = grid.dim();
    let x_norm = x.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
    let r_dom = (2.0 * x_norm).max(64.0);
    let inner = convolution_value(h, chi, x, r_dom, Some(epsilon * x_norm), grid)?;
    let scale = x_norm.powi(d as i32 - 2);
    Ok(Estimated {
        value: scale * inner.value,
        error: scale * inner.error,
    })
}

/// `int s(y) dy`, by the lattice trapezoid sum over `|y| <= r_max` plus a
/// fitted power-law continuation of the per-shell sums. For unit spacing
/// the full lattice sum equals the integral exactly (the symbol's support
/// ball keeps every nonzero grid image out of reach), so the entire error
/// is truncation plus the per-point grid images.
pub fn s_mass(h: &Symbol, chi: &BumpFunction, r_max: f64, grid: &QuadratureGrid) -> Result<Estimated> {
    let d = grid.dim();
    if h.dim() != d || chi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: h.dim(),
        });
    }
    check_even(h)?;
    if r_max < 16.0 {
        return Err(Error::Parameter(format!(
            "r_max {r_max} too small for a stable tail fit; need at least 16"
        )));
    }
    let n_k = oscillation_nodes(grid.n_per_axis(), r_max, chi.outer_radius());
    let field = SField::build(h, chi, r_max, 1.0, n_k)?;
    // The lattice sum runs over |y| < R strictly; the shell-sum
    // continuation then covers the unit-width bins [R, R+1), [R+1, R+2),
    // ... with no overlap and no gap. Truncating the same field at a
    // smaller ball exposes the actual truncation sensitivity, which is the
    // dominant error here (the k-grid images are negligible by the
    // oscillation rule).
    let cut = |r0: f64| -> Result<f64> {
        let half = field.half() as i64;
        let r_sq = r0 * r0;
        let mut j = vec![-half; d];
        let mut ball = Compensated::new();
        'outer: loop {
            let ysq: f64 = j.iter().map(|&v| (v * v) as f64).sum();
            if ysq < r_sq {
                ball.add(field.get(&j));
            }
            let mut a = 0;
            loop {
                if a == d {
                    break 'outer;
                }
                j[a] += 1;
                if j[a] <= half {
                    break;
                }
                j[a] = -half;
                a += 1;
            }
        }
        // Fit only the top quarter of the ball: closer in, the
        // sign-oscillating mollifier shells still dominate the smooth
        // power-law component and would poison the continuation.
        let stats = field.shell_stats(0.75 * r0, r0);
        let usable: Vec<(f64, f64)> = stats
            .iter()
            .filter(|&&(_, _, sum)| sum.abs() > 0.0)
            .map(|&(rho, _, sum)| (rho, sum))
            .collect();
        if usable.len() < 4 {
            return Err(Error::TailFit(format!(
                "only {} usable shells for the mass tail",
                usable.len()
            )));
        }
        let all_positive = usable.iter().all(|&(_, s)| s > 0.0);
        let tail = if all_positive {
            let n = usable.len() as f64;
            let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
            for &(rho, sum) in &usable {
                let lx = rho.ln();
                let ly = sum.ln();
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            let intercept = (sy - slope * sx) / n;
            let m = -slope;
            if m <= 1.25 {
                return Err(Error::TailFit(format!(
                    "mass shell sums decay like rho^{:.2}; tail not summable",
                    -m
                )));
            }
            intercept.exp() * hurwitz_zeta(m, r0 + 0.5)
        } else {
            // Alternating or noisy shell sums: bound the continuation by
            // the last shell's magnitude instead of fitting a power law.
            usable.last().map(|&(_, s)| s.abs()).unwrap_or(0.0)
        };
        Ok(ball.total() + tail)
    };
    let full = cut(r_max.floor())?;
    let inner = cut((0.8 * r_max).floor())?;
    Ok(Estimated {
        value: full,
        error: (full - inner).abs().max(1e-13 * full.abs()),
    })
}
