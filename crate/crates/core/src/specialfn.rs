//! Special functions and quadrature primitives.
//!
//! Everything here works in plain `f64`. Laguerre polynomials use the
//! standard normalization `L_n^mu(0) = binomial(n + mu, n)`.

use crate::error::{Error, Result};

/// Largest degree accepted by [`laguerre`].
pub const MAX_LAGUERRE_DEGREE: usize = 1_000_000;

/// Largest order accepted by [`gauss_laguerre`].
pub const MAX_QUADRATURE_ORDER: usize = 512;

/// Generalized Laguerre polynomial `L_n^mu(x)` by upward three-term recurrence.
pub fn laguerre(n: usize, mu: f64, x: f64) -> Result<f64> {
    if n > MAX_LAGUERRE_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    if !mu.is_finite() || mu <= -1.0 {
        return Err(Error::InvalidLaguerreParameter(mu));
    }
    Ok(laguerre_unchecked(n, mu, x))
}

pub(crate) fn laguerre_unchecked(n: usize, mu: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + mu - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + mu - x) * cur - (kf + mu) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = L_k^mu(x)` for `k = 0..out.len()`.
pub(crate) fn laguerre_sequence(mu: f64, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 1.0 + mu - x;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 + mu - x) * out[k] - (kf + mu) * out[k - 1]) / (kf + 1.0);
    }
}

const EXACT_FACTORIALS: usize = 20;

/// `ln(n!)`, exact integer product up to 20!, Stirling series beyond.
pub fn log_factorial(n: u64) -> f64 {
    if n as usize <= EXACT_FACTORIALS {
        let prod: u64 = (1..=n).product();
        return (prod as f64).ln();
    }
    let x = n as f64 + 1.0;
    let x2 = x * x;
    let series = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2)
        - 1.0 / (1680.0 * x * x2 * x2 * x2);
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// Binomial coefficient `binomial(top, k)` for any integer `top`, including
/// negative values (`top (top-1) ... (top-k+1) / k!`).
///
/// Returns exactly 0 when `0 <= top < k`.
pub fn binomial(top: i64, k: u64) -> f64 {
    if top >= 0 && (top as u64) < k {
        return 0.0;
    }
    let mut exact: Option<i128> = Some(1);
    for j in 0..k {
        exact = exact.and_then(|r| {
            let num = r.checked_mul(top as i128 - j as i128)?;
            Some(num / (j as i128 + 1))
        });
    }
    match exact {
        Some(r) => r as f64,
        None => {
            let mut r = 1.0;
            for j in 0..k {
                r *= (top as f64 - j as f64) / (j as f64 + 1.0);
            }
            r
        }
    }
}

/// Gauss-Laguerre rule for `∫₀^∞ f(u) e^{-u} du`.
///
/// At high orders the weights of the outermost nodes fall below the smallest
/// subnormal `f64` and are stored as exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i f(u_i)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

const SCALE_LIMIT: f64 = 1e150;

/// Returns `(p_n, p_{n-1})` proportional to `(L_n(x), L_{n-1}(x))`.
fn laguerre_pair_scaled(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > SCALE_LIMIT {
            cur /= SCALE_LIMIT;
            prev /= SCALE_LIMIT;
        }
    }
    (cur, prev)
}

/// `ln Σ_{k<n} L_k(x)²`.
fn christoffel_log_sum(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut log_scale = 0.0f64;
    let mut acc = 0.0;
    for k in 0..n {
        acc += cur * cur;
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > SCALE_LIMIT {
            cur /= SCALE_LIMIT;
            prev /= SCALE_LIMIT;
            acc /= SCALE_LIMIT * SCALE_LIMIT;
            log_scale += SCALE_LIMIT.ln();
        }
    }
    acc.ln() + 2.0 * log_scale
}

fn newton_step(order: usize, z: f64) -> f64 {
    let (p, p_prev) = laguerre_pair_scaled(order, z);
    p / (order as f64 * (p - p_prev) / z)
}

const NEWTON_MAX_ITER: usize = 100;
const NOISE_FLOOR: f64 = 1e-11;
const BESSEL_GUESSES: usize = 8;
const BESSEL_MIN_ORDER: usize = 32;

/// Small Laguerre roots from the Bessel asymptotics `u ≈ j_{0,k}² / (4n + 2)`,
/// with McMahon's expansion for the zeros of `J_0`.
fn small_root_guess(i: usize, n: f64) -> f64 {
    let beta = (i as f64 + 0.75) * std::f64::consts::PI;
    let j0 = beta + 1.0 / (8.0 * beta) - 124.0 / (3.0 * (8.0 * beta).powi(3));
    let nu = 4.0 * n + 2.0;
    j0 * j0 / nu * (1.0 + (j0 * j0 - 2.0) / (3.0 * nu * nu))
}
const NODE_TOL: f64 = 1e-14;

/// Gauss-Laguerre nodes and weights for weight `e^{-u}` on `[0, ∞)`.
///
/// Nodes come from Newton iteration on `L_order` seeded with the classic
/// asymptotic estimates (Bessel-zero guesses for the smallest roots of large
/// orders) and extrapolation from the previous two roots. Weights are Christoffel numbers `w_i = 1 / Σ_{k<n} L_k(u_i)²`,
/// which avoid the cancellation in the derivative formula.
pub fn gauss_laguerre(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_QUADRATURE_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    let n = order as f64;
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    let mut z = 0.0;
    for i in 0..order {
        z = match i {
            _ if order >= BESSEL_MIN_ORDER && i < BESSEL_GUESSES => small_root_guess(i, n),
            0 => 3.0 / (1.0 + 2.4 * n),
            1 => z + 15.0 / (1.0 + 2.5 * n),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut converged = false;
        let mut last_step = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITER {
            let step = newton_step(order, z);
            z -= step;
            // Absolute 1e-14, floored at a few ulps for large nodes, or the
            // rounding floor of the recurrence once Newton stops contracting.
            let at_tolerance = step.abs() <= NODE_TOL.max(4.0 * f64::EPSILON * z.abs());
            let stalled = step.abs() < NOISE_FLOOR * z.max(1.0) && step.abs() > 0.5 * last_step;
            last_step = step.abs();
            if at_tolerance || stalled {
                converged = true;
                z -= newton_step(order, z);
                break;
            }
        }
        let ordered = nodes.last().map_or(z > 0.0, |&last: &f64| z > last);
        if !converged || !ordered || !z.is_finite() {
            return Err(Error::RootNotConverged { order, index: i });
        }
        nodes.push(z);
        weights.push((-christoffel_log_sum(order, z)).exp());
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Closed form and quadrature value of `2∫₀^∞ x^{2λ+1} e^{-x²} L_n^μ(x²) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreIntegral {
    pub closed_form: f64,
    pub quadrature: f64,
}

impl LaguerreIntegral {
    pub fn residual(&self) -> f64 {
        (self.closed_form - self.quadrature).abs() / self.closed_form.abs().max(1.0)
    }
}

/// Checks `2∫x^{2λ+1}e^{-x²}L_n^μ(x²)dx = (-1)^n Γ(λ+1) binomial(λ-μ, n)`.
///
/// After `u = x²` the left side is `∫u^λ e^{-u} L_n^μ(u) du`, a polynomial
/// moment that Gauss-Laguerre integrates exactly.
pub fn verify_laguerre_integral(n: usize, mu: usize, lambda: usize) -> Result<LaguerreIntegral> {
    if n > 10 || mu > 8 || lambda > 8 {
        return Err(Error::Precondition(format!(
            "laguerre integral check needs n <= 10, mu <= 8, lambda <= 8 (got {n}, {mu}, {lambda})"
        )));
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let closed_form =
        sign * log_factorial(lambda as u64).exp().round() * binomial(lambda as i64 - mu as i64, n as u64);
    let rule = gauss_laguerre((lambda + n) / 2 + 2)?;
    let quadrature = rule.integrate(|u| u.powi(lambda as i32) * laguerre_unchecked(n, mu as f64, u));
    Ok(LaguerreIntegral {
        closed_form,
        quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_degrees() {
        assert_eq!(laguerre(0, 3.5, 7.2).unwrap(), 1.0);
        assert_eq!(laguerre(1, 0.0, 1.0).unwrap(), 0.0);
        // 3 - 3x + x²/2 at x = 2
        assert!((laguerre(2, 1.0, 2.0).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn laguerre_rejects_bad_input() {
        assert_eq!(laguerre(MAX_LAGUERRE_DEGREE + 1, 0.0, 1.0), Err(Error::DegreeTooLarge(1_000_001)));
        assert!(matches!(laguerre(3, 0.0, f64::NAN), Err(Error::NonFinite(_))));
        assert!(matches!(laguerre(3, 0.0, f64::INFINITY), Err(Error::NonFinite(_))));
        assert!(matches!(laguerre(3, -1.5, 1.0), Err(Error::InvalidLaguerreParameter(_))));
    }

    #[test]
    fn laguerre_at_origin_is_binomial() {
        for n in 0..15 {
            for mu in 0..6 {
                let expect = binomial((n + mu) as i64, n as u64);
                let got = laguerre(n, mu as f64, 0.0).unwrap();
                assert!((got - expect).abs() <= 1e-12 * expect, "n={n} mu={mu}");
            }
        }
    }

    #[test]
    fn sequence_matches_pointwise() {
        let mut buf = [0.0; 12];
        laguerre_sequence(2.0, 3.3, &mut buf);
        for (k, v) in buf.iter().enumerate() {
            assert_eq!(*v, laguerre_unchecked(k, 2.0, 3.3));
        }
    }

    #[test]
    fn log_factorial_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert!((log_factorial(10) - 3_628_800f64.ln()).abs() < 1e-14);
        assert!((log_factorial(10) - 15.104412573).abs() < 1e-9);
    }

    #[test]
    fn log_factorial_stirling_branch_continuous() {
        // 21! and 22! from the exact 20! times the missing factors
        let l20 = log_factorial(20);
        assert!((log_factorial(21) - (l20 + 21f64.ln())).abs() < 1e-13);
        assert!((log_factorial(22) - (l20 + 21f64.ln() + 22f64.ln())).abs() < 1e-13);
        let mut acc = l20;
        for n in 21..200u64 {
            acc += (n as f64).ln();
            assert!((log_factorial(n) - acc).abs() <= 1e-13 * acc, "n={n}");
        }
    }

    #[test]
    fn binomial_cases() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(0, 1), 0.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(-1, 3), -1.0);
        assert_eq!(binomial(-2, 2), 3.0);
        assert_eq!(binomial(-3, 3), -10.0);
    }

    #[test]
    fn gauss_laguerre_small_orders() {
        let r1 = gauss_laguerre(1).unwrap();
        assert!((r1.nodes()[0] - 1.0).abs() < 1e-15);
        assert!((r1.weights()[0] - 1.0).abs() < 1e-15);

        let r2 = gauss_laguerre(2).unwrap();
        let s2 = 2f64.sqrt();
        assert!((r2.nodes()[0] - (2.0 - s2)).abs() < 1e-14);
        assert!((r2.nodes()[1] - (2.0 + s2)).abs() < 1e-14);
        assert!((r2.weights()[0] - (2.0 + s2) / 4.0).abs() < 1e-14);
        assert!((r2.weights()[1] - (2.0 - s2) / 4.0).abs() < 1e-14);
        assert!((r2.integrate(|u| u) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_laguerre_rejects_orders() {
        assert_eq!(gauss_laguerre(0), Err(Error::InvalidOrder(0)));
        assert_eq!(gauss_laguerre(513), Err(Error::InvalidOrder(513)));
    }

    #[test]
    fn cubic_moment() {
        for order in 2..40 {
            let r = gauss_laguerre(order).unwrap();
            assert!((r.integrate(|u| u * u * u) - 6.0).abs() < 1e-12, "order {order}");
        }
    }

    #[test]
    fn integral_identity_examples() {
        let a = verify_laguerre_integral(0, 0, 2).unwrap();
        assert_eq!(a.closed_form, 2.0);
        let b = verify_laguerre_integral(1, 3, 3).unwrap();
        assert_eq!(b.closed_form, 0.0);
        assert!(b.quadrature.abs() < 1e-12);
        let c = verify_laguerre_integral(2, 0, 2).unwrap();
        assert_eq!(c.closed_form, 2.0);
        for v in [a, b, c] {
            assert!(v.residual() < 1e-10);
        }
        assert!(verify_laguerre_integral(11, 0, 0).is_err());
    }
}
