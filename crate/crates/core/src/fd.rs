//! Central finite differences for mixed partial derivatives, with two-level
//! Richardson extrapolation. Shared by the bump-derivative surface and the
//! Sobolev norm estimators.

/// Coefficients of the second-order central stencil for one derivative
/// order: offsets are `-(len-1)/2 ..= (len-1)/2` in units of the step.
///
/// Orders 0..=6; higher mixed orders come from tensoring these per axis.
fn stencil(order: usize) -> &'static [f64] {
    match order {
        0 => &[1.0],
        1 => &[-0.5, 0.0, 0.5],
        2 => &[1.0, -2.0, 1.0],
        3 => &[-0.5, 1.0, 0.0, -1.0, 0.5],
        4 => &[1.0, -4.0, 6.0, -4.0, 1.0],
        5 => &[-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5],
        6 => &[1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0],
        _ => panic!("central stencils tabulated up to order 6, got {order}"),
    }
}

/// Half-width (in steps) of the tensor stencil for a multi-index.
pub fn stencil_reach(alpha: &[usize]) -> usize {
    alpha.iter().map(|&a| stencil(a).len() / 2).max().unwrap_or(0)
}

/// Mixed central difference `D^alpha f` at `x` with per-axis step `h`.
///
/// The tensor-product stencil evaluates f at every offset combination; cost
/// grows as the product of the per-axis stencil sizes, fine for |alpha| <= 8
/// in the dimensions used here.
pub fn central_diff<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], alpha: &[usize], h: f64) -> f64 {
    assert_eq!(x.len(), alpha.len());
    let dim = x.len();
    let coefs: Vec<&[f64]> = alpha.iter().map(|&a| stencil(a)).collect();
    let mut idx = vec![0usize; dim];
    let mut point = vec![0.0f64; dim];
    let mut acc = 0.0;
    loop {
        let mut c = 1.0;
        for a in 0..dim {
            let s = coefs[a];
            c *= s[idx[a]];
            let half = (s.len() / 2) as isize;
            point[a] = x[a] + (idx[a] as isize - half) as f64 * h;
        }
        if c != 0.0 {
            acc += c * f(&point);
        }
        let mut a = 0;
        loop {
            if a == dim {
                let total: usize = alpha.iter().sum();
                return acc / h.powi(total as i32);
            }
            idx[a] += 1;
            if idx[a] < coefs[a].len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// Richardson-extrapolated mixed derivative: combines steps `h` and `h/2`
/// to cancel the O(h^2) term of the central stencils, leaving O(h^4).
pub fn richardson_diff<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], alpha: &[usize], h: f64) -> f64 {
    let coarse = central_diff(f, x, alpha, h);
    let fine = central_diff(f, x, alpha, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_are_exact() {
        // Central stencils are exact on quadratics: f = x^2 y^2,
        // d2x d1y f = 2 * 2 y = 8 at y = 2.
        let g = |p: &[f64]| p[0] * p[0] * p[1] * p[1];
        let got = central_diff(&g, &[1.5, 2.0], &[2, 1], 1e-2);
        // Exact up to roundoff (eps * |f| / h^3 is a few 1e-9 here).
        assert!((got - 8.0).abs() < 1e-7, "got {got}");
        // One Richardson level is exact on cubics: f = x^2 y^3,
        // d2x d1y f = 6 y^2 = 24 (the plain stencil is off by h^2 here).
        let f = |p: &[f64]| p[0] * p[0] * p[1] * p[1] * p[1];
        let plain = central_diff(&f, &[1.5, 2.0], &[2, 1], 1e-2);
        assert!((plain - 24.0).abs() > 1e-5, "h^2 error term expected");
        let ext = richardson_diff(&f, &[1.5, 2.0], &[2, 1], 1e-2);
        assert!((ext - 24.0).abs() < 1e-7, "ext {ext}");
    }

    #[test]
    fn transcendental_fourth_order() {
        // d4/dx4 sin = sin; at 0.7 with Richardson the error is O(h^4).
        let f = |p: &[f64]| p[0].sin();
        let got = richardson_diff(&f, &[0.7], &[4], 5e-2);
        assert!((got - 0.7f64.sin()).abs() < 1e-6, "got {got}");
    }

    #[test]
    fn mixed_third_order() {
        let f = |p: &[f64]| (p[0] * p[1]).exp();
        // d3x (e^{xy}) = y^3 e^{xy}; at (0.3, 0.5).
        let want = 0.125 * (0.15f64).exp();
        let got = richardson_diff(&f, &[0.3, 0.5], &[3, 0], 2e-2);
        assert!((got - want).abs() < 1e-8 * want.abs().max(1.0));
    }

    #[test]
    fn reach_matches_stencil_width() {
        assert_eq!(stencil_reach(&[0, 0]), 0);
        assert_eq!(stencil_reach(&[1, 2]), 1);
        assert_eq!(stencil_reach(&[3, 1]), 2);
        assert_eq!(stencil_reach(&[4, 4, 0]), 2);
        assert_eq!(stencil_reach(&[6]), 3);
    }

    #[test]
    fn high_orders_track_sin() {
        let f = |p: &[f64]| p[0].sin();
        // 5th derivative of sin is cos, 6th is -sin.
        let d5 = richardson_diff(&f, &[0.7], &[5], 8e-2);
        assert!((d5 - 0.7f64.cos()).abs() < 1e-5, "d5 = {d5}");
        let d6 = richardson_diff(&f, &[0.7], &[6], 8e-2);
        assert!((d6 + 0.7f64.sin()).abs() < 1e-4, "d6 = {d6}");
    }
}
