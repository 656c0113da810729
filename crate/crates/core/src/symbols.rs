//! Torus-side objects: points on `(-pi, pi]^d`, Fourier symbols of step
//! distributions, the quotient symbol `h(k) = |k|^2 * f_hat(k)`, and the
//! dimension-dependent constants of the decay law.

use crate::lattice::StepDistribution;
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

const TWO_PI: f64 = 2.0 * PI;

/// A point of the torus, stored as the canonical representative in `(-pi, pi]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Reduces arbitrary real coordinates to the canonical cell.
    pub fn new(coords: &[f64]) -> Self {
        TorusPoint {
            coords: coords.iter().map(|&c| reduce_coord(c)).collect(),
        }
    }

    /// Wraps coordinates that are already canonical; debug-asserted, not re-reduced.
    pub fn from_canonical(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|&c| -PI < c && c <= PI));
        TorusPoint { coords }
    }

    pub fn zero(dim: usize) -> Self {
        TorusPoint {
            coords: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean norm of the canonical representative.
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }
}

/// Maps a real number to its representative in `(-pi, pi]`.
pub fn reduce_coord(x: f64) -> f64 {
    let mut r = x - TWO_PI * (x / TWO_PI).round();
    if r <= -PI {
        r += TWO_PI;
    }
    if r > PI {
        r -= TWO_PI;
    }
    r
}

/// Gamma function for positive arguments (Lanczos, g = 7, 9 terms).
///
/// Relative accuracy on the half-integers used by `constants` is well below
/// 1e-13; validated against closed forms in the tests.
pub fn gamma_pos(x: f64) -> f64 {
    assert!(x > 0.0, "gamma_pos needs x > 0");
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection keeps small arguments accurate.
        return PI / ((PI * x).sin() * gamma_pos(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (TWO_PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// Constants of the decay law in dimension `d`.
///
/// `a` multiplies `|x|^(2-d)` in the limit, `n` is the derivative order of
/// the window-side Sobolev norm, and `(p, q)` the conjugate integrability
/// pair used by that norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionConstants {
    pub dim: usize,
    pub a: f64,
    pub n: usize,
    pub p: f64,
    pub q: f64,
}

/// Returns the constants for dimension `d >= 3` with the default `p = 2`.
pub fn constants(d: usize) -> Result<DimensionConstants> {
    if d < 3 {
        return Err(Error::Dimension(d));
    }
    let a = gamma_pos((d as f64 - 2.0) / 2.0) / (4.0 * PI.powf(d as f64 / 2.0));
    let n = if d > 4 { d - 2 } else { d - 1 };
    Ok(DimensionConstants {
        dim: d,
        a,
        n,
        p: 2.0,
        q: 2.0,
    })
}

/// Same constants with an explicit integrability exponent.
///
/// For d = 3, 4 the decay law needs exactly p = 2; above four dimensions any
/// p in `(d/(d-2), 2]` works (smaller ones break the quotient estimates,
/// larger ones the duality pairing).
pub fn constants_with_p(d: usize, p: f64) -> Result<DimensionConstants> {
    let mut c = constants(d)?;
    if d <= 4 {
        if p != 2.0 {
            return Err(Error::Parameter(format!(
                "integrability exponent must be 2 for d = {d}, got {p}"
            )));
        }
        return Ok(c);
    }
    let lower = d as f64 / (d as f64 - 2.0);
    if !(p > lower && p <= 2.0) {
        return Err(Error::Parameter(format!(
            "integrability exponent p = {p} outside ({lower}, 2] for d = {d}"
        )));
    }
    c.p = p;
    c.q = p / (p - 1.0);
    Ok(c)
}

type CustomEval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum SymbolKind {
    Constant(f64),
    DHat(StepDistribution),
    /// `1 / (1 - D_hat)`, singular at the origin.
    Green(StepDistribution),
    /// `|k|^2 * base(k)` with a prescribed value at `k = 0`.
    H { base: Box<Symbol>, at_zero: f64 },
    Custom { eval: CustomEval, at_zero: Option<f64> },
}

/// A real-valued symbol on the torus.
///
/// Everything in scope is even in each coordinate (step distributions are
/// closed under signed coordinate permutations), so symbol values are real;
/// the single-point transforms assert the vanishing of the conjugate part.
#[derive(Clone)]
pub struct Symbol {
    dim: usize,
    kind: SymbolKind,
}

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.kind {
            SymbolKind::Constant(c) => format!("Constant({c})"),
            SymbolKind::DHat(_) => "DHat".into(),
            SymbolKind::Green(_) => "Green".into(),
            SymbolKind::H { .. } => "H".into(),
            SymbolKind::Custom { .. } => "Custom".into(),
        };
        write!(f, "Symbol(dim={}, {})", self.dim, name)
    }
}

impl Symbol {
    pub fn constant(dim: usize, value: f64) -> Self {
        Symbol {
            dim,
            kind: SymbolKind::Constant(value),
        }
    }

    pub fn custom(
        dim: usize,
        at_zero: Option<f64>,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Symbol {
            dim,
            kind: SymbolKind::Custom {
                eval: Arc::new(eval),
                at_zero,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True if the symbol diverges at the origin (Green symbols do).
    pub fn singular_at_zero(&self) -> bool {
        match &self.kind {
            SymbolKind::Green(_) => true,
            SymbolKind::H { .. } | SymbolKind::Constant(_) => false,
            SymbolKind::DHat(_) => false,
            SymbolKind::Custom { at_zero, .. } => at_zero.is_none(),
        }
    }

    /// The value (or limit) at the origin, when finite and known.
    pub fn value_at_zero(&self) -> Option<f64> {
        match &self.kind {
            SymbolKind::Constant(c) => Some(*c),
            SymbolKind::DHat(_) => Some(1.0),
            SymbolKind::Green(_) => None,
            SymbolKind::H { at_zero, .. } => Some(*at_zero),
            SymbolKind::Custom { at_zero, .. } => *at_zero,
        }
    }

    /// The step distribution backing the symbol, if it has one.
    pub fn distribution(&self) -> Option<&StepDistribution> {
        match &self.kind {
            SymbolKind::DHat(d) | SymbolKind::Green(d) => Some(d),
            SymbolKind::H { base, .. } => base.distribution(),
            _ => None,
        }
    }

    /// Evaluates at a canonical point.
    pub fn eval(&self, k: &TorusPoint) -> f64 {
        debug_assert_eq!(k.dim(), self.dim);
        self.eval_raw(k.coords())
    }

    /// Evaluates at raw coordinates assumed to lie in the canonical cell.
    ///
    /// Quadrature grids produce canonical coordinates directly; this skips
    /// the reduction. Green symbols return `+inf` at the exact origin.
    pub fn eval_raw(&self, k: &[f64]) -> f64 {
        match &self.kind {
            SymbolKind::Constant(c) => *c,
            SymbolKind::DHat(d) => 1.0 - one_minus_d_hat(d, k),
            SymbolKind::Green(d) => {
                let m = one_minus_d_hat(d, k);
                if m == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / m
                }
            }
            SymbolKind::H { base, at_zero } => {
                let ksq: f64 = k.iter().map(|c| c * c).sum();
                if ksq == 0.0 {
                    *at_zero
                } else {
                    ksq * base.eval_raw(k)
                }
            }
            SymbolKind::Custom { eval, .. } => eval(k),
        }
    }
}

/// `D_hat(k) = sum_x D(x) cos(k.x)`; the conjugate sine sum is asserted to
/// vanish, which pins down the required symmetry of `D`.
pub fn d_hat(d: &StepDistribution, k: &TorusPoint) -> Result<f64> {
    if d.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: k.dim(),
        });
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, w) in d.points() {
        let phase: f64 = x
            .iter()
            .zip(k.coords())
            .map(|(&xi, &ki)| xi as f64 * ki)
            .sum();
        re += w * phase.cos();
        im += w * phase.sin();
    }
    assert!(
        im.abs() < 1e-12,
        "sine part {im:.3e} of D_hat nonzero; distribution not symmetric"
    );
    Ok(re)
}

/// `1 - D_hat(k)` in cancellation-free form, `sum_x D(x) * 2 sin^2(k.x / 2)`.
///
/// Near `k = 0` the naive difference loses all digits; this form is exact to
/// roundoff for every `k` and is what the Green symbol divides by.
pub fn one_minus_d_hat(d: &StepDistribution, k: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, w) in d.points() {
        let half: f64 = x
            .iter()
            .zip(k)
            .map(|(&xi, &ki)| xi as f64 * ki)
            .sum::<f64>()
            * 0.5;
        let s = half.sin();
        acc += w * 2.0 * s * s;
    }
    acc
}

/// The Green symbol `1 / (1 - D_hat)`.
///
/// Construction scans the torus for zeros of the denominator away from the
/// origin and refuses distributions whose symbol vanishes elsewhere.
pub fn green_symbol(d: &StepDistribution) -> Result<Symbol> {
    let scan_n = if d.dim() >= 5 { 16 } else { 24 };
    let zeros = zero_scan(d, scan_n)?;
    if let Some(z) = zeros.first() {
        return Err(Error::SymbolZero {
            at: z.coords().to_vec(),
            value: one_minus_d_hat(d, z.coords()).abs(),
        });
    }
    Ok(Symbol {
        dim: d.dim(),
        kind: SymbolKind::Green(d.clone()),
    })
}

/// The symbol of `D` itself.
pub fn d_hat_symbol(d: &StepDistribution) -> Symbol {
    Symbol {
        dim: d.dim(),
        kind: SymbolKind::DHat(d.clone()),
    }
}

/// `h(k) = |k|^2 * f_hat(k)` with the caller-supplied limit at the origin.
pub fn h_symbol(f: &Symbol, at_zero: f64) -> Symbol {
    Symbol {
        dim: f.dim(),
        kind: SymbolKind::H {
            base: Box::new(f.clone()),
            at_zero,
        },
    }
}

/// `h(0) = 2d / sigma^2` for the Green symbol of `D`.
pub fn h_at_zero(d: &StepDistribution) -> Result<f64> {
    let sigma2 = d.moment(2);
    if !(sigma2 > 0.0) {
        return Err(Error::Distribution(format!(
            "second moment {sigma2} not positive"
        )));
    }
    Ok(2.0 * d.dim() as f64 / sigma2)
}

/// Radial estimate of the origin limit of `|k|^2 * f_hat(k)`.
#[derive(Debug, Clone, Copy)]
pub struct H0Estimate {
    pub value: f64,
    pub spread: f64,
}

/// Estimates `h(0)` for a symbol without a known closed form by sampling
/// `|k|^2 f_hat` along the axes at shrinking radii and extrapolating in
/// `r^2`. The spread across radii is returned as a quality indicator; for a
/// Green symbol prefer `h_at_zero`.
pub fn estimate_h0_radial(f: &Symbol) -> H0Estimate {
    let d = f.dim();
    let radial_mean = |r: f64| -> f64 {
        let mut acc = 0.0;
        for axis in 0..d {
            let mut k = vec![0.0; d];
            k[axis] = r;
            acc += r * r * f.eval_raw(&k);
        }
        acc / d as f64
    };
    let v1 = radial_mean(4e-2);
    let v2 = radial_mean(2e-2);
    let v3 = radial_mean(1e-2);
    // Two Richardson levels in r^2.
    let e12 = (4.0 * v2 - v1) / 3.0;
    let e23 = (4.0 * v3 - v2) / 3.0;
    H0Estimate {
        value: e23,
        spread: (e23 - e12).abs(),
    }
}

/// Scans the plain tensor grid (including the face points, excluding the
/// origin itself) for zeros of `1 - D_hat`.
///
/// Points with `|1 - D_hat| < 1e-6` are refined by two local subdivision
/// rounds before applying the reporting threshold `1e-10`. The origin's own
/// zero is excluded together with its basin (one coarse cell), so a fine
/// scan does not rediscover the removable singularity.
pub fn zero_scan(d: &StepDistribution, grid_n: usize) -> Result<Vec<TorusPoint>> {
    if grid_n < 8 {
        return Err(Error::Grid(format!("zero_scan needs grid_n >= 8, got {grid_n}")));
    }
    let dim = d.dim();
    let h = TWO_PI / grid_n as f64;
    let mut hits: Vec<TorusPoint> = Vec::new();
    let mut candidates: Vec<Vec<f64>> = Vec::new();

    let mut idx = vec![1usize; dim];
    let mut k = vec![0.0; dim];
    loop {
        let mut all_zero = true;
        for (a, &j) in idx.iter().enumerate() {
            k[a] = -PI + h * j as f64;
            if 2 * j != grid_n {
                all_zero = false;
            }
        }
        if !all_zero {
            let m = one_minus_d_hat(d, &k).abs();
            if m < 1e-6 {
                candidates.push(k.clone());
            }
        }
        // Odometer over j in 1..=grid_n per axis.
        let mut a = 0;
        loop {
            if a == dim {
                break;
            }
            idx[a] += 1;
            if idx[a] <= grid_n {
                break;
            }
            idx[a] = 1;
            a += 1;
        }
        if a == dim {
            break;
        }
    }

    let origin_basin = 2.0 * h;
    for cand in candidates {
        let refined = refine_zero(d, &cand, h);
        let r: f64 = refined.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r < origin_basin {
            continue;
        }
        if one_minus_d_hat(d, &refined).abs() < 1e-10 {
            let pt = TorusPoint::new(&refined);
            let dup = hits
                .iter()
                .any(|p| dist_torus(p.coords(), pt.coords()) < h);
            if !dup {
                hits.push(pt);
            }
        }
    }
    Ok(hits)
}

fn dist_torus(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| reduce_coord(x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Two rounds of 8x local subdivision around a candidate cell.
fn refine_zero(d: &StepDistribution, center: &[f64], coarse_h: f64) -> Vec<f64> {
    let dim = center.len();
    let mut best = center.to_vec();
    let mut best_val = one_minus_d_hat(d, &best).abs();
    let mut half = coarse_h;
    for _ in 0..2 {
        let step = half / 8.0;
        let anchor = best.clone();
        let mut idx = vec![0usize; dim];
        let mut k = vec![0.0; dim];
        loop {
            for a in 0..dim {
                k[a] = anchor[a] - half + step * idx[a] as f64;
            }
            let m = one_minus_d_hat(d, &k).abs();
            if m < best_val {
                best_val = m;
                best.copy_from_slice(&k);
            }
            let mut a = 0;
            loop {
                if a == dim {
                    break;
                }
                idx[a] += 1;
                if idx[a] <= 16 {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == dim {
                break;
            }
        }
        half = step;
    }
    best
}

// ---------------------------------------------------------------------------
// Fast evaluation paths for quadrature loops.
//
// Grid sums evaluate symbols millions of times; the general orbit sum for
// D_hat costs O(support size) per node, which for a wide spread-out walk in
// d = 5 is thousands of trig calls. Structured distributions admit O(d)
// separable forms, and the quotient symbols need 1 - D_hat without the
// catastrophic cancellation of computing D_hat first.

/// Specialized evaluation of `D_hat` and `1 - D_hat`.
pub(crate) enum DhatEval {
    /// Nearest-neighbor uniform: `D_hat = (1/d) Σ cos k_j`.
    Srw { dim: usize },
    /// Uniform on the punctured sup-norm box: per-axis Dirichlet kernels,
    /// `D_hat = (Π_j dir_r(k_j) - 1) / ((2r+1)^d - 1)`.
    SpreadOut { range: i64, denom: f64 },
    /// Anything else: the plain orbit sum.
    Table(Vec<(Vec<i64>, f64)>),
}

fn dirichlet(range: i64, t: f64) -> f64 {
    let mut dir = 1.0;
    for m in 1..=range {
        dir += 2.0 * (m as f64 * t).cos();
    }
    dir
}

impl DhatEval {
    pub(crate) fn for_distribution(d: &StepDistribution) -> DhatEval {
        let dim = d.dim();
        // Unit steps, equal weights, 2d of them: exactly the simple walk
        // (distinctness is guaranteed by construction, so counting suffices).
        if d.range() == 1 && d.len() == 2 * dim {
            let w = 1.0 / (2 * dim) as f64;
            if d
                .points()
                .all(|(x, wt)| (wt - w).abs() < 1e-15 && x.iter().map(|c| c.abs()).sum::<i64>() == 1)
            {
                return DhatEval::Srw { dim };
            }
        }
        // Full box minus origin with equal weights: distinct points inside
        // the box, none at the origin, and the exact count pin the set.
        let r = d.range();
        if r >= 1 && dim as u32 * ((2 * r as u64 + 1).ilog2() + 1) < 62 {
            let box_size = (2 * r + 1).pow(dim as u32);
            let count = box_size - 1;
            let w = 1.0 / count as f64;
            if d.len() as i64 == count
                && d.points()
                    .all(|(x, wt)| (wt - w).abs() < 1e-15 && x.iter().any(|&c| c != 0))
            {
                return DhatEval::SpreadOut {
                    range: r,
                    denom: count as f64,
                };
            }
        }
        DhatEval::Table(d.points().map(|(x, w)| (x.to_vec(), w)).collect())
    }

    #[inline]
    pub(crate) fn eval(&self, k: &[f64]) -> f64 {
        match self {
            DhatEval::Srw { dim } => k.iter().map(|&t| t.cos()).sum::<f64>() / *dim as f64,
            DhatEval::SpreadOut { range, denom } => {
                let mut prod = 1.0;
                for &t in k {
                    prod *= dirichlet(*range, t);
                }
                (prod - 1.0) / denom
            }
            DhatEval::Table(pts) => pts
                .iter()
                .map(|(x, w)| {
                    w * x
                        .iter()
                        .zip(k)
                        .map(|(&c, &t)| c as f64 * t)
                        .sum::<f64>()
                        .cos()
                })
                .sum(),
        }
    }

    /// `1 - D_hat` in cancellation-free form: accurate to relative epsilon
    /// even where `D_hat` is within 1e-12 of 1.
    #[inline]
    pub(crate) fn one_minus(&self, k: &[f64]) -> f64 {
        match self {
            DhatEval::Srw { dim } => {
                let mut acc = 0.0;
                for &t in k {
                    let s = (0.5 * t).sin();
                    acc += 2.0 * s * s;
                }
                acc / *dim as f64
            }
            DhatEval::SpreadOut { range, denom } => {
                // M^d - Π (M - delta_j), with delta_j = M - dir(k_j) >= 0
                // computed from sines; the recurrence
                //   T_j = M T_{j-1} + delta_j Π_{i<j}(M - delta_i)
                // builds the difference without forming M^d - (M^d - small).
                let m = 2.0 * *range as f64 + 1.0;
                let mut t_acc = 0.0;
                let mut prod = 1.0;
                for &kj in k {
                    let mut delta = 0.0;
                    for s in 1..=*range {
                        let sn = (0.5 * s as f64 * kj).sin();
                        delta += 4.0 * sn * sn;
                    }
                    t_acc = m * t_acc + delta * prod;
                    prod *= m - delta;
                }
                t_acc / denom
            }
            DhatEval::Table(pts) => pts
                .iter()
                .map(|(x, w)| {
                    let phase: f64 = x.iter().zip(k).map(|(&c, &t)| c as f64 * t).sum();
                    let s = (0.5 * phase).sin();
                    w * 2.0 * s * s
                })
                .sum(),
        }
    }
}

/// A symbol compiled for tight loops: the structure is resolved once, and
/// `value` is then branch-cheap per node. Callers supply `|k|^2` because
/// grid iterators already track it.
pub(crate) enum FastSymbol<'a> {
    Constant(f64),
    DHat(DhatEval),
    Green(DhatEval),
    /// `|k|^2 / (1 - D_hat)`.
    QuotientH(DhatEval),
    /// `|k|^2 * base(k)` for a general base.
    Scaled { base: &'a Symbol },
    Direct(&'a Symbol),
}

impl Symbol {
    pub(crate) fn evaluator(&self) -> FastSymbol<'_> {
        match &self.kind {
            SymbolKind::Constant(c) => FastSymbol::Constant(*c),
            SymbolKind::DHat(d) => FastSymbol::DHat(DhatEval::for_distribution(d)),
            SymbolKind::Green(d) => FastSymbol::Green(DhatEval::for_distribution(d)),
            SymbolKind::H { base, .. } => match &base.kind {
                SymbolKind::Green(d) => FastSymbol::QuotientH(DhatEval::for_distribution(d)),
                _ => FastSymbol::Scaled { base },
            },
            SymbolKind::Custom { .. } => FastSymbol::Direct(self),
        }
    }
}

impl FastSymbol<'_> {
    #[inline]
    pub(crate) fn value(&self, k: &[f64], ksq: f64) -> f64 {
        match self {
            FastSymbol::Constant(c) => *c,
            FastSymbol::DHat(e) => e.eval(k),
            FastSymbol::Green(e) => 1.0 / e.one_minus(k),
            FastSymbol::QuotientH(e) => ksq / e.one_minus(k),
            FastSymbol::Scaled { base } => ksq * base.eval_raw(k),
            FastSymbol::Direct(s) => s.eval_raw(k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::StepDistribution;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reduction_hits_canonical_cell() {
        assert_relative_eq!(reduce_coord(1.5 * PI), -0.5 * PI, epsilon = 1e-15);
        assert_eq!(reduce_coord(PI), PI);
        assert_eq!(reduce_coord(-PI), PI);
        assert_eq!(reduce_coord(0.0), 0.0);
        assert!(reduce_coord(TWO_PI).abs() < 1e-15);
        assert_relative_eq!(reduce_coord(-2.5 * PI), -0.5 * PI, epsilon = 1e-15);
    }

    #[test]
    fn gamma_matches_closed_forms() {
        let s = PI.sqrt();
        for (x, want) in [
            (0.5, s),
            (1.0, 1.0),
            (1.5, s / 2.0),
            (2.0, 1.0),
            (2.5, 0.75 * s),
            (3.0, 2.0),
        ] {
            let got = gamma_pos(x);
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "gamma({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn constants_match_low_dimensions() {
        let c3 = constants(3).unwrap();
        assert!((c3.a * 4.0 * PI - 1.0).abs() < 1e-14);
        assert_eq!((c3.n, c3.p), (2, 2.0));
        let c4 = constants(4).unwrap();
        assert!((c4.a * 4.0 * PI * PI - 1.0).abs() < 1e-13);
        assert_eq!(c4.n, 3);
        let c5 = constants(5).unwrap();
        assert!((c5.a * 8.0 * PI * PI - 1.0).abs() < 1e-13);
        assert_eq!(c5.n, 3);
        assert_eq!(constants(6).unwrap().n, 4);
        assert!(constants(2).is_err());
    }

    #[test]
    fn integrability_override_validates() {
        // Low dimensions admit only the Plancherel pairing.
        assert!(constants_with_p(3, 2.0).is_ok());
        assert!(constants_with_p(3, 1.9).is_err());
        assert!(constants_with_p(4, 1.99).is_err());
        // d = 5: anything in (5/3, 2].
        let c = constants_with_p(5, 1.8).unwrap();
        assert_relative_eq!(c.q, 1.8 / 0.8, epsilon = 1e-12);
        assert!(constants_with_p(5, 5.0 / 3.0).is_err());
        assert!(constants_with_p(5, 2.5).is_err());
    }

    #[test]
    fn d_hat_srw3_values() {
        let d = StepDistribution::srw(3).unwrap();
        assert_relative_eq!(d_hat(&d, &TorusPoint::zero(3)).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            d_hat(&d, &TorusPoint::new(&[PI, PI, PI])).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            d_hat(&d, &TorusPoint::new(&[PI / 2.0, 0.0, 0.0])).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert!(d_hat(&d, &TorusPoint::zero(4)).is_err());
    }

    #[test]
    fn green_symbol_dominates_one_half() {
        // 1 - D_hat ranges over [0, 2] for the simple walk, so the symbol
        // never drops below 1/2.
        let d = StepDistribution::srw(3).unwrap();
        let g = green_symbol(&d).unwrap();
        let mut state = 0x243F_6A88_85A3_08D3u64;
        for _ in 0..500 {
            let mut k = [0.0; 3];
            for c in &mut k {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *c = (state >> 11) as f64 / (1u64 << 53) as f64 * TWO_PI - PI;
            }
            assert!(g.eval(&TorusPoint::new(&k)) >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn axis_limit_matches_second_moment() {
        // |k|^-2 (1 - D_hat) -> sigma^2 / (2d) along each axis.
        let d = StepDistribution::spread_out(3, 2).unwrap();
        let want = d.moment(2) / 6.0;
        for axis in 0..3 {
            let mut k = [0.0; 3];
            k[axis] = 1e-3;
            let got = one_minus_d_hat(&d, &k) / 1e-6;
            assert!((got - want).abs() < 1e-4, "axis {axis}: {got} vs {want}");
        }
    }

    #[test]
    fn green_symbol_at_antipode() {
        let d = StepDistribution::srw(3).unwrap();
        let g = green_symbol(&d).unwrap();
        assert!(g.singular_at_zero());
        assert_relative_eq!(g.eval(&TorusPoint::new(&[PI, PI, PI])), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn quotient_symbol_is_continuous_at_origin() {
        let d = StepDistribution::srw(3).unwrap();
        let g = green_symbol(&d).unwrap();
        let h0 = h_at_zero(&d).unwrap();
        assert_relative_eq!(h0, 6.0, epsilon = 1e-14);
        let h = h_symbol(&g, h0);
        assert_eq!(h.eval(&TorusPoint::zero(3)), 6.0);
        let v = h.eval(&TorusPoint::new(&[1e-4, 0.0, 0.0]));
        assert!((v - 6.0).abs() < 1e-6, "h(1e-4 e1) = {v}");
    }

    #[test]
    fn quotient_of_flat_symbol_is_ksq() {
        let one = Symbol::constant(3, 1.0);
        let h = h_symbol(&one, 0.0);
        assert_eq!(h.eval(&TorusPoint::zero(3)), 0.0);
        let k = TorusPoint::new(&[0.3, -0.4, 0.1]);
        assert_relative_eq!(h.eval(&k), 0.26, epsilon = 1e-15);
    }

    #[test]
    fn h_at_zero_examples() {
        assert_relative_eq!(
            h_at_zero(&StepDistribution::srw(5).unwrap()).unwrap(),
            10.0,
            epsilon = 1e-13
        );
        let sp = StepDistribution::spread_out(3, 2).unwrap();
        // sum over the five-cube minus origin of |x|^2 is 750, on 124 points.
        assert_relative_eq!(sp.moment(2), 750.0 / 124.0, epsilon = 1e-12);
        assert_relative_eq!(h_at_zero(&sp).unwrap(), 6.0 * 124.0 / 750.0, epsilon = 1e-12);
        // d = 5 with second moment 2: unit steps weight 1/15, double steps 1/30.
        let mut pts = Vec::new();
        for a in 0..5usize {
            for s in [-1i64, 1] {
                let mut p = vec![0i64; 5];
                p[a] = s;
                pts.push((p.clone(), 1.0 / 15.0));
                p[a] = 2 * s;
                pts.push((p, 1.0 / 30.0));
            }
        }
        let stretched = StepDistribution::new(5, pts).unwrap();
        assert_relative_eq!(stretched.moment(2), 2.0, epsilon = 1e-13);
        assert_relative_eq!(h_at_zero(&stretched).unwrap(), 5.0, epsilon = 1e-13);
    }

    #[test]
    fn radial_h0_estimate_agrees() {
        let d = StepDistribution::srw(3).unwrap();
        let g = green_symbol(&d).unwrap();
        let est = estimate_h0_radial(&g);
        assert!((est.value - 6.0).abs() < 1e-4, "estimate {est:?}");
        assert!(est.spread < 1e-4);
    }

    #[test]
    fn zero_scan_clean_for_srw3() {
        let d = StepDistribution::srw(3).unwrap();
        assert!(zero_scan(&d, 32).unwrap().is_empty());
    }

    #[test]
    fn zero_scan_finds_two_step_degeneracy() {
        // Two-step walk of SRW3: D_hat becomes the square, so the antipode
        // (pi, pi, pi) turns into a genuine zero of 1 - D_hat.
        let mut pts: Vec<(Vec<i64>, f64)> = vec![(vec![0, 0, 0], 1.0 / 6.0)];
        for a in 0..3 {
            for s in [-2i64, 2] {
                let mut p = vec![0i64; 3];
                p[a] = s;
                pts.push((p, 1.0 / 36.0));
            }
        }
        for a in 0..3 {
            for b in (a + 1)..3 {
                for sa in [-1i64, 1] {
                    for sb in [-1i64, 1] {
                        let mut p = vec![0i64; 3];
                        p[a] = sa;
                        p[b] = sb;
                        pts.push((p, 2.0 / 36.0));
                    }
                }
            }
        }
        let d2 = StepDistribution::new(3, pts).unwrap();
        let zeros = zero_scan(&d2, 16).unwrap();
        assert!(
            zeros
                .iter()
                .any(|z| z.coords().iter().all(|&c| (c - PI).abs() < 1e-8)),
            "expected the antipode in {zeros:?}"
        );
        assert!(green_symbol(&d2).is_err());
    }

    #[test]
    fn fast_paths_match_orbit_sum() {
        let srw = StepDistribution::srw(4).unwrap();
        let spread = StepDistribution::spread_out(3, 2).unwrap();
        let srw_eval = DhatEval::for_distribution(&srw);
        let spread_eval = DhatEval::for_distribution(&spread);
        assert!(matches!(srw_eval, DhatEval::Srw { .. }));
        assert!(matches!(spread_eval, DhatEval::SpreadOut { .. }));
        let ks4 = [0.3, -1.2, 2.9, 0.01];
        let ks3 = [0.7, -2.4, 1.1];
        let want4 = d_hat(&srw, &TorusPoint::new(&ks4)).unwrap();
        let want3 = d_hat(&spread, &TorusPoint::new(&ks3)).unwrap();
        assert!((srw_eval.eval(&ks4) - want4).abs() < 1e-14);
        assert!((spread_eval.eval(&ks3) - want3).abs() < 1e-13);
        // The subtracted form must agree, and stay relatively accurate
        // where direct subtraction would lose most digits.
        let tiny = [1e-6, -2e-6, 3e-7];
        let direct = one_minus_d_hat(&spread, &tiny);
        let fast = spread_eval.one_minus(&tiny);
        assert!(((fast - direct) / direct).abs() < 1e-10, "{fast} vs {direct}");
    }

    #[test]
    fn structured_lookalikes_fall_back_to_table() {
        // Equal weights but not the full box: must not take the separable
        // path.
        let axes_and_diag: Vec<(Vec<i64>, f64)> = {
            let mut pts = Vec::new();
            for a in 0..3 {
                for s in [-1i64, 1] {
                    let mut p = vec![0i64; 3];
                    p[a] = s;
                    pts.push(p);
                }
            }
            for signs in 0..8u32 {
                pts.push((0..3).map(|b| if signs & (1 << b) != 0 { -1 } else { 1 }).collect());
            }
            let w = 1.0 / pts.len() as f64;
            pts.into_iter().map(|p| (p, w)).collect()
        };
        let d = StepDistribution::new(3, axes_and_diag).unwrap();
        let eval = DhatEval::for_distribution(&d);
        assert!(matches!(eval, DhatEval::Table(_)));
        let k = [0.4, 1.3, -0.9];
        let want = d_hat(&d, &TorusPoint::new(&k)).unwrap();
        assert!((eval.eval(&k) - want).abs() < 1e-14);
        assert!((eval.one_minus(&k) - (1.0 - want)).abs() < 1e-13);
    }

    #[test]
    fn compiled_symbols_match_plain_eval() {
        let dist = StepDistribution::spread_out(3, 1).unwrap();
        let g = green_symbol(&dist).unwrap();
        let h = h_symbol(&g, h_at_zero(&dist).unwrap());
        let k = [0.9, -0.33, 1.7];
        let ksq: f64 = k.iter().map(|c| c * c).sum();
        let ge = g.evaluator();
        let he = h.evaluator();
        let kp = TorusPoint::new(&k);
        assert!((ge.value(&k, ksq) - g.eval(&kp)).abs() < 1e-12);
        assert!((he.value(&k, ksq) - h.eval(&kp)).abs() < 1e-12);
        let c = Symbol::constant(3, 2.5);
        assert_eq!(c.evaluator().value(&k, ksq), 2.5);
    }

    proptest! {
        #[test]
        fn d_hat_invariant_under_signed_permutations(
            kx in -8.0f64..8.0, ky in -8.0f64..8.0, kz in -8.0f64..8.0,
            perm in 0usize..6, signs in 0u8..8
        ) {
            let d = StepDistribution::spread_out(3, 2).unwrap();
            let k = [kx, ky, kz];
            let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let mut kp = [0.0; 3];
            for (slot, &src) in orders[perm].iter().enumerate() {
                let s = if signs & (1 << slot) != 0 { -1.0 } else { 1.0 };
                kp[slot] = s * k[src];
            }
            let v0 = d_hat(&d, &TorusPoint::new(&k)).unwrap();
            let v1 = d_hat(&d, &TorusPoint::new(&kp)).unwrap();
            prop_assert!((v0 - v1).abs() < 1e-12);
            prop_assert!(v0.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn reduction_is_idempotent(x in -50.0f64..50.0) {
            let r = reduce_coord(x);
            prop_assert!(-PI < r && r <= PI);
            prop_assert!((reduce_coord(r) - r).abs() < 1e-15);
            // Representative differs from the input by a whole period.
            let m = (x - r) / TWO_PI;
            prop_assert!((m - m.round()).abs() < 1e-9);
        }
    }
}
