//! Gauss–Legendre quadrature nodes and weights on [−1, 1], computed by
//! Newton iteration on the Legendre polynomial recurrence.

use crate::Scalar;

/// Returns `(nodes, weights)` of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre<F: Scalar>(n: usize) -> (Vec<F>, Vec<F>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess for the i-th root (descending order).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P'_n at x by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            dp = nf * (x * p - p0) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (
        nodes.into_iter().map(F::c).collect(),
        weights.into_iter().map(F::c).collect(),
    )
}

/// ∫ₐᵇ f dx by the n-point Gauss–Legendre rule.
pub fn integrate<F: Scalar>(f: impl Fn(F) -> F, a: F, b: F, n: usize) -> F {
    let (nodes, weights) = gauss_legendre::<F>(n);
    let half = (b - a) * F::c(0.5);
    let mid = (b + a) * F::c(0.5);
    let mut acc = F::zero();
    for (x, w) in nodes.iter().zip(&weights) {
        acc += *w * f(mid + half * *x);
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_rules() {
        let (x, w) = gauss_legendre::<f64>(1);
        assert_eq!(x, vec![0.0]);
        assert_eq!(w, vec![2.0]);

        let (x, w) = gauss_legendre::<f64>(2);
        let r = 1.0 / 3.0f64.sqrt();
        assert!((x[0] - r).abs() < 1e-15 && (x[1] + r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exactness() {
        // n-point rule is exact through degree 2n−1.
        let v = integrate(|x: f64| x * x * x * x * x * x, -1.0, 1.0, 4);
        assert!((v - 2.0 / 7.0).abs() < 1e-14);
        let v = integrate(|x: f64| 3.0 * x * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 10.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_moment() {
        // ∫ z² φ(z) dz over [−8, 8] ≈ 1.
        let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let v = integrate(|z| z * z * phi(z), -8.0, 8.0, 96);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
