//! Quadrature building blocks: Gauss-Legendre rules, the exact angular
//! reduction of radial integrals, and the half-step ("offset") uniform
//! grids used everywhere so the origin is never a node.

use crate::symbols::gamma_pos;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre polynomial from the Chebyshev-like
/// initial guess; exact for polynomials of degree 2n-1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        weights[i] = w;
        nodes[n - 1 - i] = x.abs();
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        t.iter().map(|&ti| mid + half * ti).collect(),
        w.iter().map(|&wi| wi * half).collect(),
    )
}

/// Surface measure of the unit sphere S^{m} in R^{m+1}.
pub fn sphere_surface(m: usize) -> f64 {
    let half = (m as f64 + 1.0) / 2.0;
    2.0 * PI.powf(half) / gamma_pos(half)
}

/// The angular factor of a radial Fourier integral in d dimensions:
///
///   integral over the unit sphere of e^{-i z w·e} dσ(w)
///     = sphere_surface(d-2) · angular_kernel(d, z),
///
/// where `angular_kernel(d, z) = ∫_0^π cos(z cos θ) sin^{d-2}θ dθ`.
/// Closed forms for d = 3 and d = 5; the general case integrates the
/// smooth periodic-extendable integrand by the midpoint rule.
pub fn angular_kernel(d: usize, z: f64) -> f64 {
    debug_assert!(d >= 3);
    let z = z.abs();
    match d {
        3 => {
            // sin(z)/z is cancellation-free; the series only guards z ~ 0.
            if z < 1e-6 {
                2.0 * (1.0 - z * z / 6.0)
            } else {
                2.0 * z.sin() / z
            }
        }
        5 => {
            // sin z - z cos z loses ~ z^{-2} relative digits; switch to the
            // series where that loss would exceed ~1e-12.
            if z < 0.02 {
                let z2 = z * z;
                4.0 / 3.0 - 2.0 * z2 / 15.0 + z2 * z2 / 210.0 - z2 * z2 * z2 / 11340.0
            } else {
                4.0 * (z.sin() - z * z.cos()) / (z * z * z)
            }
        }
        _ => {
            let n = (48 + z.ceil() as usize).next_multiple_of(2);
            let h = PI / n as f64;
            let mut acc = 0.0;
            for j in 0..n {
                let theta = (j as f64 + 0.5) * h;
                acc += (z * theta.cos()).cos() * theta.sin().powi(d as i32 - 2);
            }
            acc * h
        }
    }
}

/// Offset uniform nodes on (-π, π): k = -π + (m + 1/2)·2π/n.
///
/// Symmetric under sign flip, and never contains 0 or ±π, so singular
/// symbols and the representative cut are both avoided.
pub fn offset_nodes(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|m| -PI + (m as f64 + 0.5) * h).collect()
}

/// The strictly positive half of `offset_nodes(n)` (n even): n/2 nodes in
/// (0, π). With even integrands each stands for its mirror image.
pub fn positive_offset_nodes(n: usize) -> Vec<f64> {
    debug_assert!(n % 2 == 0);
    let h = 2.0 * PI / n as f64;
    (0..n / 2).map(|m| (m as f64 + 0.5) * h).collect()
}

/// Positive offset nodes for a symmetric interval (-r, r): n/2 nodes in
/// (0, r), spacing 2r/n.
pub fn positive_offset_nodes_in(r: f64, n: usize) -> Vec<f64> {
    debug_assert!(n % 2 == 0);
    let h = 2.0 * r / n as f64;
    (0..n / 2).map(|m| (m as f64 + 0.5) * h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let (x, w) = gauss_legendre(5);
        // Degree 8 <= 2n-1 = 9: exact.
        let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert!((got - 2.0 / 9.0).abs() < 1e-14);
        let odd: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(7)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_structure() {
        for n in [1, 2, 7, 48, 109] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for i in 0..n {
                assert!(w[i] > 0.0);
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-14, "asymmetric nodes");
            }
            for i in 1..n {
                assert!(x[i] > x[i - 1]);
            }
        }
    }

    #[test]
    fn mapped_rule_integrates_exp() {
        let (x, w) = gauss_legendre_on(0.0, 1.0, 12);
        let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.exp()).sum();
        assert!((got - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn sphere_surfaces_match_closed_forms() {
        assert!((sphere_surface(1) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_surface(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_surface(3) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere_surface(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn angular_kernel_at_zero_is_beta_value() {
        // A_d(0) = sqrt(pi)·Γ((d-1)/2)/Γ(d/2).
        for d in 3..=6 {
            let want = PI.sqrt() * gamma_pos((d as f64 - 1.0) / 2.0) / gamma_pos(d as f64 / 2.0);
            assert!(
                (angular_kernel(d, 0.0) - want).abs() < 1e-12,
                "d = {d}"
            );
        }
    }

    #[test]
    fn closed_forms_match_gauss_reference() {
        // Independent reference: Gauss-Legendre in t for
        // ∫_{-1}^{1} cos(zt)(1-t²)^{(d-3)/2} dt, smooth for odd d.
        let reference = |d: usize, z: f64| {
            let (t, w) = gauss_legendre(128);
            t.iter()
                .zip(&w)
                .map(|(&ti, &wi)| {
                    wi * (z * ti).cos() * (1.0 - ti * ti).powi((d as i32 - 3) / 2)
                })
                .sum::<f64>()
        };
        for z in [0.0, 1e-3, 0.3, 5.0, 40.0] {
            assert!(
                (angular_kernel(3, z) - reference(3, z)).abs() < 1e-12,
                "d=3 z={z}"
            );
            assert!(
                (angular_kernel(5, z) - reference(5, z)).abs() < 1e-12,
                "d=5 z={z}"
            );
        }
    }

    #[test]
    fn branch_seam_is_continuous() {
        let below = angular_kernel(3, 1e-6 - 1e-12);
        let above = angular_kernel(3, 1e-6 + 1e-12);
        assert!((below - above).abs() < 1e-13);
        // Gap small enough that the function's own slope (~5e-3) cannot
        // hide a branch mismatch.
        let below = angular_kernel(5, 0.02 - 1e-12);
        let above = angular_kernel(5, 0.02 + 1e-12);
        assert!(
            (below - above).abs() < 5e-12,
            "below {below:.17e} above {above:.17e}"
        );
    }

    #[test]
    fn even_dimension_matches_bessel_value() {
        // A_4(z) = pi·J_1(z)/z; J_1(1) = 0.4400505857449335.
        let got = angular_kernel(4, 1.0);
        assert!((got - PI * 0.4400505857449335).abs() < 1e-10, "got {got}");
    }

    #[test]
    fn offset_grids_avoid_origin_and_cut() {
        let nodes = offset_nodes(16);
        assert_eq!(nodes.len(), 16);
        for &k in &nodes {
            assert!(k.abs() > 1e-12 && k.abs() < PI - 1e-12);
            assert!(nodes.iter().any(|&m| (m + k).abs() < 1e-12));
        }
        let pos = positive_offset_nodes(16);
        assert_eq!(pos.len(), 8);
        assert!(pos.iter().all(|&k| k > 0.0 && k < PI));
        for (i, &k) in pos.iter().enumerate() {
            assert!((k - nodes[8 + i]).abs() < 1e-12);
        }
        let sub = positive_offset_nodes_in(0.5, 8);
        assert_eq!(sub.len(), 4);
        assert!((sub[0] - 0.0625).abs() < 1e-15);
        assert!((sub[3] - 0.4375).abs() < 1e-15);
    }
}
