use coherent2d::specialfn::{binomial, gauss_laguerre, laguerre, log_factorial, verify_laguerre_integral};
use proptest::prelude::*;

fn factorial(p: usize) -> f64 {
    (1..=p).map(|k| k as f64).product()
}

#[test]
fn every_order_converges_with_valid_rule() {
    for order in 1..=512 {
        let rule = gauss_laguerre(order).unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(rule.order(), order);
        assert!(rule.nodes()[0] > 0.0);
        assert!(rule.nodes().windows(2).all(|w| w[1] > w[0]), "order {order}");
        assert!(rule.weights().iter().all(|&w| w >= 0.0));
        if order <= 128 {
            assert!(rule.weights().iter().all(|&w| w > 0.0), "order {order}");
        }
        let m0: f64 = rule.weights().iter().sum();
        let m1 = rule.integrate(|u| u);
        assert!((m0 - 1.0).abs() < 1e-13, "order {order}: zeroth moment {m0}");
        assert!((m1 - 1.0).abs() < 1e-12, "order {order}: first moment {m1}");
    }
}

#[test]
fn moment_exactness() {
    for order in [2usize, 4, 8, 16, 32] {
        let rule = gauss_laguerre(order).unwrap();
        for p in 0..2 * order {
            let got = rule.integrate(|u| u.powi(p as i32));
            let exact = factorial(p);
            assert!(((got - exact) / exact).abs() < 1e-11, "order {order} p {p}: {got} vs {exact}");
        }
    }
}

#[test]
fn nodes_are_roots() {
    for order in [3usize, 17, 64, 150] {
        let rule = gauss_laguerre(order).unwrap();
        for &u in rule.nodes() {
            // relative to the size of neighbouring values
            let here = laguerre(order, 0.0, u).unwrap().abs();
            let scale = laguerre(order - 1, 0.0, u).unwrap().abs();
            assert!(here <= 1e-10 * scale.max(1.0), "order {order} u {u}");
        }
    }
}

#[test]
fn orthogonality_under_quadrature() {
    for mu in 0..=3u32 {
        for j in 0..=10usize {
            for k in 0..=10usize {
                let rule = gauss_laguerre(j + k + mu as usize + 2).unwrap();
                let got = rule.integrate(|u| {
                    u.powi(mu as i32) * laguerre(j, mu as f64, u).unwrap() * laguerre(k, mu as f64, u).unwrap()
                });
                let expect = if j == k {
                    (log_factorial((mu as usize + j) as u64) - log_factorial(j as u64)).exp()
                } else {
                    0.0
                };
                assert!((got - expect).abs() < 1e-10 * expect.max(1.0), "mu {mu} j {j} k {k}: {got}");
            }
        }
    }
}

#[test]
fn recurrence_consistency() {
    for mu in 0..=6 {
        let mu = mu as f64;
        for xi in 0..=100 {
            let x = 0.5 * xi as f64;
            for n in 1..50usize {
                let lp = laguerre(n + 1, mu, x).unwrap();
                let l = laguerre(n, mu, x).unwrap();
                let lm = laguerre(n - 1, mu, x).unwrap();
                let a = (n as f64 + 1.0) * lp;
                let b = (2.0 * n as f64 + mu + 1.0 - x) * l;
                let c = (n as f64 + mu) * lm;
                let scale = a.abs().max(b.abs()).max(c.abs()).max(f64::MIN_POSITIVE);
                assert!((a - b + c).abs() <= 1e-9 * scale);
            }
        }
    }
}

#[test]
fn integral_identity_sweep() {
    for n in 0..=6 {
        for mu in 0..=4 {
            for lambda in 0..=6 {
                let v = verify_laguerre_integral(n, mu, lambda).unwrap();
                assert!(v.residual() <= 1e-10, "n {n} mu {mu} lambda {lambda}: {v:?}");
                if lambda == mu && n >= 1 {
                    assert_eq!(v.closed_form, 0.0);
                }
            }
        }
    }
}

#[test]
fn binomial_matches_pascal() {
    for top in -6i64..=12 {
        for k in 1..=8u64 {
            let lhs = binomial(top, k);
            let rhs = binomial(top - 1, k) + binomial(top - 1, k - 1);
            assert_eq!(lhs, rhs, "top {top} k {k}");
        }
    }
}

proptest! {
    #[test]
    fn log_factorial_monotone(n in 0u64..5000) {
        prop_assert!(log_factorial(n + 1) >= log_factorial(n));
        let step = log_factorial(n + 1) - log_factorial(n);
        prop_assert!((step - ((n + 1) as f64).ln()).abs() <= 1e-12 * log_factorial(n + 1).max(1.0));
    }

    #[test]
    fn laguerre_matches_explicit_sum(n in 0usize..12, mu in 0u32..6, x in 0.0f64..20.0) {
        // L_n^mu(x) = Σ_k (-1)^k binomial(n+mu, n-k) x^k / k!
        let explicit: f64 = (0..=n)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial((n as u32 + mu) as i64, (n - k) as u64) * x.powi(k as i32) / factorial(k)
            })
            .sum();
        let got = laguerre(n, mu as f64, x).unwrap();
        let scale = (0..=n).map(|k| binomial((n as u32 + mu) as i64, (n - k) as u64) * x.powi(k as i32) / factorial(k)).sum::<f64>();
        prop_assert!((got - explicit).abs() <= 1e-12 * scale.max(1.0));
    }
}
