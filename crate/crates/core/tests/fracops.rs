mod common;

use common::{lanczos_gamma, max_abs, observed_orders, power_samples};
use fracmfg::fracops::*;
use proptest::prelude::*;

const ORDERS: [f64; 4] = [0.3, 0.5, 0.7, 0.9];

fn order(v: f64) -> FractionalOrder {
    FractionalOrder::new(v).unwrap()
}

/// Value at `t = 1` of the stencil applied to `t^p` on `n` steps.
fn at_one(mu: f64, kind: StencilKind, p: i32, n: usize) -> f64 {
    let s = build_stencil(order(mu), kind, Direction::Forward, n + 1, 1.0 / n as f64).unwrap();
    *s.apply(&power_samples(p, n)).unwrap().last().unwrap()
}

fn exact_at_one(mu: f64, kind: StencilKind, p: i32) -> f64 {
    let pf = p as f64;
    match kind {
        StencilKind::RlIntegral => lanczos_gamma(pf + 1.0) / lanczos_gamma(pf + 1.0 + mu),
        StencilKind::CaputoDerivative if p == 0 => 0.0,
        _ => lanczos_gamma(pf + 1.0) / lanczos_gamma(pf + 1.0 - mu),
    }
}

#[test]
fn power_rules_at_400_nodes() {
    for mu in ORDERS {
        for kind in [StencilKind::RlDerivative, StencilKind::CaputoDerivative, StencilKind::RlIntegral] {
            for p in 0..3 {
                let exact = exact_at_one(mu, kind, p);
                let got = at_one(mu, kind, p, 399);
                let err = if exact == 0.0 { got.abs() } else { (got / exact - 1.0).abs() };
                assert!(err <= 1e-2, "{kind:?} mu={mu} p={p}: {got} vs {exact}");
            }
        }
    }
}

#[test]
fn grunwald_schemes_converge_at_first_order() {
    for mu in ORDERS {
        for kind in [StencilKind::RlDerivative, StencilKind::RlIntegral] {
            for p in 0..3 {
                let exact = exact_at_one(mu, kind, p);
                let errs: Vec<f64> = [100, 200, 400, 800].iter().map(|&n| (at_one(mu, kind, p, n) - exact).abs()).collect();
                for r in observed_orders(&errs) {
                    assert!((r - 1.0).abs() <= 0.2, "{kind:?} mu={mu} p={p}: order {r}");
                }
            }
        }
    }
}

#[test]
fn l1_caputo_converges_at_two_minus_mu() {
    for mu in ORDERS {
        // exact on affine functions
        for p in 0..2 {
            assert!(
                (at_one(mu, StencilKind::CaputoDerivative, p, 400) - exact_at_one(mu, StencilKind::CaputoDerivative, p)).abs()
                    < 1e-12
            );
        }
        let exact = exact_at_one(mu, StencilKind::CaputoDerivative, 2);
        let errs: Vec<f64> =
            [100, 200, 400, 800].iter().map(|&n| (at_one(mu, StencilKind::CaputoDerivative, 2, n) - exact).abs()).collect();
        for r in observed_orders(&errs) {
            assert!((r - (2.0 - mu)).abs() <= 0.2, "mu={mu}: order {r}");
        }
    }
}

#[test]
fn backward_stencils_are_exact_transposes() {
    let n = 200;
    let dt = 1.0 / (n - 1) as f64;
    let u: Vec<f64> = (0..n).map(|i| (3.1 * i as f64 * dt).sin() + 0.2).collect();
    let f: Vec<f64> = (0..n).map(|i| (1.7 * i as f64 * dt).cos() - 0.4 * i as f64 * dt).collect();
    for mu in ORDERS {
        for kind in [StencilKind::RlDerivative, StencilKind::RlIntegral] {
            let fwd = build_stencil(order(mu), kind, Direction::Forward, n, dt).unwrap();
            let bwd = build_stencil(order(mu), kind, Direction::Backward, n, dt).unwrap();
            for i in (0..n).step_by(17) {
                for j in (0..n).step_by(13) {
                    assert_eq!(fwd.entry(i, j), bwd.entry(j, i));
                }
            }
            let lhs = grid_pairing(&fwd.apply(&u).unwrap(), &f, dt);
            let rhs = grid_pairing(&u, &bwd.apply(&f).unwrap(), dt);
            let scale = grid_pairing(&u, &u, dt).sqrt()
                * grid_pairing(&f, &f, dt).sqrt()
                * fwd.weights().iter().map(|w| w.abs()).sum::<f64>();
            let rel = (lhs - rhs).abs() / scale;
            assert!(rel <= 1e-13, "{kind:?} mu={mu}: {rel:.2e}");
        }
    }
}

#[test]
fn start_corrected_stencil_transposes_too() {
    let n = 50;
    let dt = 0.02;
    let fwd = FractionalStencil::complement(order(0.6), StencilKind::RlDerivative, Direction::Forward, n, dt)
        .unwrap()
        .with_start_correction()
        .unwrap();
    let back = fwd.transposed();
    for i in 0..n {
        for j in 0..n {
            assert_eq!(fwd.entry(i, j), back.entry(j, i));
        }
    }
}

#[test]
fn integrals_compose() {
    let n = 300;
    let dt = 1.0 / n as f64;
    let f: Vec<f64> = (0..=n).map(|k| (2.0 * k as f64 * dt).sin() + 1.0).collect();
    for (a, b) in [(0.3, 0.4), (0.5, 0.5), (0.2, 0.7)] {
        let ia = build_stencil(order(a), StencilKind::RlIntegral, Direction::Forward, n + 1, dt).unwrap();
        let ib = build_stencil(order(b), StencilKind::RlIntegral, Direction::Forward, n + 1, dt).unwrap();
        let iab = build_stencil(order(a + b), StencilKind::RlIntegral, Direction::Forward, n + 1, dt).unwrap();
        let lhs = ia.apply(&ib.apply(&f).unwrap()).unwrap();
        let rhs = iab.apply(&f).unwrap();
        let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
        assert!(max_abs(&diff) < 1e-12 * max_abs(&rhs), "{a}+{b}");
    }
}

#[test]
fn integral_inverts_derivative() {
    let n = 120;
    let dt = 1.0 / n as f64;
    let f: Vec<f64> = (0..=n).map(|k| (k as f64 * dt).powf(1.5) - 0.3 * k as f64 * dt).collect();
    let d = build_stencil(order(0.4), StencilKind::RlDerivative, Direction::Forward, n + 1, dt).unwrap();
    let i = build_stencil(order(0.4), StencilKind::RlIntegral, Direction::Forward, n + 1, dt).unwrap();
    let back = i.apply(&d.apply(&f).unwrap()).unwrap();
    let diff: Vec<f64> = back.iter().zip(&f).map(|(x, y)| x - y).collect();
    assert!(max_abs(&diff) < 1e-13);
}

#[test]
fn classical_limits() {
    let dt = 0.1;
    let f = [0.5, 1.5, -0.25, 2.0, 4.0];
    let d = build_stencil(order(1.0), StencilKind::RlDerivative, Direction::Forward, 5, dt).unwrap();
    let out = d.apply(&f).unwrap();
    for n in 1..5 {
        assert!((out[n] - (f[n] - f[n - 1]) / dt).abs() < 1e-12);
    }
    let c = build_stencil(order(1.0), StencilKind::CaputoDerivative, Direction::Forward, 5, dt).unwrap();
    let out = c.apply(&f).unwrap();
    for n in 1..5 {
        assert!((out[n] - (f[n] - f[n - 1]) / dt).abs() < 1e-12);
    }
    let i = build_stencil(order(1.0), StencilKind::RlIntegral, Direction::Forward, 5, dt).unwrap();
    let out = i.apply(&f).unwrap();
    let mut acc = 0.0;
    for n in 0..5 {
        acc += dt * f[n];
        assert!((out[n] - acc).abs() < 1e-12);
    }
    let id = FractionalStencil::with_order(0.0, StencilKind::RlDerivative, Direction::Backward, 5, dt).unwrap();
    assert_eq!(id.apply(&f).unwrap(), f.to_vec());
}

#[test]
fn regularized_caputo_kills_constants() {
    let n = 64;
    let s = build_stencil(order(0.6), StencilKind::RlDerivative, Direction::Forward, n, 0.05).unwrap();
    let out = s.regularized_caputo(&vec![3.7; n], 3.7).unwrap();
    assert!(max_abs(&out) < 1e-12);
    let i = build_stencil(order(0.6), StencilKind::RlIntegral, Direction::Forward, n, 0.05).unwrap();
    assert!(i.regularized_caputo(&vec![1.0; n], 1.0).is_err());
}

#[test]
fn rejects_orders_outside_unit_interval() {
    for v in [0.0, -0.5, 1.0001, f64::INFINITY] {
        let msg = FractionalOrder::new(v).unwrap_err().to_string();
        assert!(msg.contains("order must lie in (0,1]"), "{msg}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derivative_is_linear(mu in 0.05f64..1.0, a in -3.0f64..3.0, seed in 0u64..1000) {
        let n = 40;
        let s = build_stencil(order(mu), StencilKind::RlDerivative, Direction::Forward, n, 0.025).unwrap();
        let f: Vec<f64> = (0..n).map(|k| ((k as u64 * 31 + seed) % 17) as f64 - 8.0).collect();
        let g: Vec<f64> = (0..n).map(|k| ((k as u64 * 7 + seed) % 11) as f64).collect();
        let mix: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + y).collect();
        let lhs = s.apply(&mix).unwrap();
        let sf = s.apply(&f).unwrap();
        let sg = s.apply(&g).unwrap();
        for k in 0..n {
            let rhs = a * sf[k] + sg[k];
            prop_assert!((lhs[k] - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn grunwald_partial_sums_decay_like_power(mu in 0.05f64..0.95) {
        // Partial sums of (1 - z)^mu are the coefficients of (1 - z)^(mu - 1),
        // which behave like N^(-mu) / Gamma(1 - mu).
        let n = 4000;
        let g = grunwald_coefficients(mu, n);
        let mut acc = 0.0;
        let mut prev = f64::INFINITY;
        for w in g {
            acc += w;
            prop_assert!(acc > 0.0 && acc <= prev);
            prev = acc;
        }
        let asymptotic = (n as f64).powf(-mu) / lanczos_gamma(1.0 - mu);
        prop_assert!((acc / asymptotic - 1.0).abs() < 1e-3);
    }
}
