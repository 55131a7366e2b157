//! Shared test-only oracles, independent of the library's computation
//! paths: Gauss–Hermite quadrature for integrating the density directly,
//! and a brute-force Isserlis pairing enumerator over the twelve real
//! components for fourth moments.

#![allow(dead_code)]

use quadbell_core::gaussian::{CovarianceModel, SecondMoments};
use quadbell_core::lhv::{Representation, Side, Sign};

/// Nodes and weights for ∫ e^{-x²} f(x) dx ≈ Σ w_i f(x_i), computed by
/// Newton iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => {
                let k = (2 * n + 1) as f64;
                k.sqrt() - 1.85575 * k.powf(-1.0 / 6.0)
            }
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut derivative = 0.0;
        for _ in 0..100 {
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2 - (((j - 1) as f64) / j as f64).sqrt() * p3;
            }
            derivative = (2.0 * n as f64).sqrt() * p2;
            let step = p1 / derivative;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (derivative * derivative);
        weights[n - 1 - i] = weights[i];
    }
    (nodes.into_iter().rev().collect(), weights.into_iter().rev().collect())
}

/// ∫ f over R² by tensor Gauss–Hermite with the substitution x = α t.
pub fn integrate_2d(f: impl Fn(f64, f64) -> f64, alpha: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_hermite(order);
    // Fold the weight inversion e^{+t²} into per-axis factors.
    let factors: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&t, &w)| w * (t * t).exp())
        .collect();
    let mut total = 0.0;
    for (i, &ti) in nodes.iter().enumerate() {
        for (j, &tj) in nodes.iter().enumerate() {
            total += factors[i] * factors[j] * f(alpha * ti, alpha * tj);
        }
    }
    total * alpha * alpha
}

/// ∫ f over R⁴ by tensor Gauss–Hermite with the substitution x = α t.
pub fn integrate_4d(f: impl Fn([f64; 4]) -> f64, alpha: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_hermite(order);
    let factors: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&t, &w)| w * (t * t).exp())
        .collect();
    let mut total = 0.0;
    for (i, &ti) in nodes.iter().enumerate() {
        for (j, &tj) in nodes.iter().enumerate() {
            let fij = factors[i] * factors[j];
            for (k, &tk) in nodes.iter().enumerate() {
                let fijk = fij * factors[k];
                for (l, &tl) in nodes.iter().enumerate() {
                    total += fijk
                        * factors[l]
                        * f([alpha * ti, alpha * tj, alpha * tk, alpha * tl]);
                }
            }
        }
    }
    total * alpha.powi(4)
}

/// Real-component index of one mode: E_k ↦ (Re at 2k, Im at 2k+1).
fn re(mode: usize) -> usize {
    2 * mode
}

fn im(mode: usize) -> usize {
    2 * mode + 1
}

/// A count-rate reality written as x^T Q x + c over the twelve ordered
/// real components, the structural form the pairing enumerator consumes.
pub struct QuadraticObservable {
    pub q: [[f64; 12]; 12],
    pub c: f64,
}

impl QuadraticObservable {
    fn zero() -> Self {
        Self {
            q: [[0.0; 12]; 12],
            c: 0.0,
        }
    }

    /// Add coeff · (Σ v_i x_i)² to the quadratic form.
    fn add_square(&mut self, coeffs: &[(usize, f64)], scale: f64) {
        for &(i, vi) in coeffs {
            for &(j, vj) in coeffs {
                self.q[i][j] += scale * vi * vj;
            }
        }
    }
}

/// Build the quadratic form of one count-rate reality at angle θ for the
/// requested side, port and representation.
pub fn rate_observable(
    representation: Representation,
    side: Side,
    sign: Sign,
    theta: f64,
) -> QuadraticObservable {
    let (cos, sin) = (theta.cos(), theta.sin());
    let (first, second, vacuum) = match side {
        Side::A => (0usize, 2usize, 4usize), // modes E_1, E_3, E_5
        Side::B => (1usize, 3usize, 5usize), // modes E_2, E_4, E_6
    };
    // F = E_first cosθ + E_second sinθ for +, E_second cosθ - E_first sinθ for -.
    let (c1, c2) = match sign {
        Sign::Plus => (cos, sin),
        Sign::Minus => (-sin, cos),
    };
    let mut obs = QuadraticObservable::zero();
    match representation {
        Representation::WignerIntensity => {
            // |F|² - 1/2
            obs.add_square(&[(re(first), c1), (re(second), c2)], 1.0);
            obs.add_square(&[(im(first), c1), (im(second), c2)], 1.0);
            obs.c = -0.5;
        }
        Representation::QuadratureDerived => {
            // 4|F|² - 4|E_vac|²
            obs.add_square(&[(re(first), c1), (re(second), c2)], 4.0);
            obs.add_square(&[(im(first), c1), (im(second), c2)], 4.0);
            obs.add_square(&[(re(vacuum), 1.0)], -4.0);
            obs.add_square(&[(im(vacuum), 1.0)], -4.0);
        }
    }
    obs
}

/// ⟨x^T Q x⟩ + c for zero-mean Gaussian x with covariance Σ.
pub fn pairing_mean(obs: &QuadraticObservable, moments: &SecondMoments) -> f64 {
    let mut trace = 0.0;
    for a in 0..12 {
        for b in 0..12 {
            trace += obs.q[a][b] * moments.table[a][b];
        }
    }
    trace + obs.c
}

/// ⟨(x^T A x + c_A)(x^T B x + c_B)⟩ by literal enumeration of the three
/// Isserlis pairings of every index quadruple.
pub fn pairing_product_moment(
    a_obs: &QuadraticObservable,
    b_obs: &QuadraticObservable,
    moments: &SecondMoments,
) -> f64 {
    let sigma = &moments.table;
    let mut fourth = 0.0;
    for a in 0..12 {
        for b in 0..12 {
            let qa = a_obs.q[a][b];
            if qa == 0.0 {
                continue;
            }
            for c in 0..12 {
                for d in 0..12 {
                    let qb = b_obs.q[c][d];
                    if qb == 0.0 {
                        continue;
                    }
                    let m4 = sigma[a][b] * sigma[c][d]
                        + sigma[a][c] * sigma[b][d]
                        + sigma[a][d] * sigma[b][c];
                    fourth += qa * qb * m4;
                }
            }
        }
    }
    let trace_a = pairing_mean(a_obs, moments) - a_obs.c;
    let trace_b = pairing_mean(b_obs, moments) - b_obs.c;
    fourth + a_obs.c * trace_b + b_obs.c * trace_a + a_obs.c * b_obs.c
}

/// Brute-force ⟨R^i_A(θ_A) R^j_B(θ_B)⟩ from the covariance table alone.
pub fn pairing_joint_moment(
    model: &CovarianceModel,
    theta_a: f64,
    theta_b: f64,
    signs: (Sign, Sign),
    representation: Representation,
) -> f64 {
    let moments = model.exact_second_moments();
    let a = rate_observable(representation, Side::A, signs.0, theta_a);
    let b = rate_observable(representation, Side::B, signs.1, theta_b);
    pairing_product_moment(&a, &b, &moments)
}

/// Self-check for the rule itself: Σw = √π and Σw x² = √π/2.
pub fn assert_hermite_rule_is_sound(order: usize) {
    let (nodes, weights) = gauss_hermite(order);
    let total: f64 = weights.iter().sum();
    let second: f64 = nodes.iter().zip(&weights).map(|(&x, &w)| w * x * x).sum();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    assert!((total - sqrt_pi).abs() < 1e-12, "Σw = {total}");
    assert!((second - sqrt_pi / 2.0).abs() < 1e-12, "Σwx² = {second}");
}
