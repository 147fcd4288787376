use hjadm_core::adomian::{
    build_series, oracle_polynomial, oracle_series, oracle_value, recursion_polynomial,
    composition_polynomial, AdmSeries, CapPolicy,
};
use hjadm_core::{parse, Expr, ProblemSpec};
use proptest::prelude::*;
use std::f64::consts::PI;

fn problem(h: &str, u0: &str, a: f64, b: f64) -> ProblemSpec {
    ProblemSpec::new(parse(h).unwrap(), parse(u0).unwrap(), a, b).unwrap()
}

fn burgers() -> ProblemSpec {
    problem("v^2/2", "-x^2", -5.0, 5.0)
}

fn eikonal_sin() -> ProblemSpec {
    problem("-sqrt(1+v^2)", "sin(x)", 0.0, 2.0 * PI)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn three_generators_agree_exactly() {
    for n in 0..=6 {
        let t = composition_polynomial(n);
        assert_eq!(recursion_polynomial(n), t, "recursion, order {n}");
        assert_eq!(oracle_polynomial(n).unwrap(), t, "oracle, order {n}");
    }
}

#[test]
fn monomials_are_homogeneous() {
    for n in 1..=12 {
        for (m, c) in composition_polynomial(n).terms() {
            assert_eq!(m.weight() as usize, n);
            assert_eq!(m.parts.len(), m.order as usize);
            assert!(*c.numer() > 0);
        }
    }
}

// H and its derivatives for H = c3 v^3 + c2 v^2 + c1 v + c0.
fn cubic_derivs(c: [f64; 4], v: f64) -> Vec<f64> {
    let [c0, c1, c2, c3] = c;
    let mut h = vec![
        c0 + v * (c1 + v * (c2 + v * c3)),
        c1 + v * (2.0 * c2 + 3.0 * v * c3),
        2.0 * c2 + 6.0 * v * c3,
        6.0 * c3,
    ];
    h.resize(8, 0.0);
    h
}

fn poly4(c: &[f64; 5], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, k| acc * x + k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn instantiated_generators_agree(
        c in prop::array::uniform4(-3.0f64..3.0),
        stand_ins in prop::array::uniform7(prop::array::uniform5(-1.0f64..1.0)),
        x in -1.0f64..1.0,
    ) {
        let h_text = format!("{}*v^3 + {}*v^2 + {}*v + {}", c[3], c[2], c[1], c[0]);
        let h_expr = parse(&h_text).unwrap();
        let w: Vec<f64> = stand_ins.iter().map(|p| poly4(p, x)).collect();
        let h = cubic_derivs(c, w[0]);
        for n in 0..=6 {
            let a = composition_polynomial(n).evaluate(&h, &w);
            let b = recursion_polynomial(n).evaluate(&h, &w);
            let o = oracle_value(&h_expr, n, &w).unwrap();
            let scale = 1.0 + a.abs();
            prop_assert!((a - b).abs() <= 1e-9 * scale, "order {}: {} vs {}", n, a, b);
            prop_assert!((a - o).abs() <= 1e-9 * scale, "order {}: {} vs oracle {}", n, a, o);
        }
    }
}

#[test]
fn fixed_cubic_against_oracle() {
    let h = parse("v^3 - 2*v").unwrap();
    let w = [0.3, -1.2, 0.7, 2.0, -0.4];
    let hv = cubic_derivs([0.0, -2.0, 0.0, 1.0], w[0]);
    for n in 0..=4 {
        let a = composition_polynomial(n).evaluate(&hv, &w);
        assert!((a - oracle_value(&h, n, &w).unwrap()).abs() < 1e-12, "order {n}");
    }
}

/// `σ A_n(u_0, .., u_n)` with `u_k = ũ_k t^k/k!` against `ũ_{n+1} t^n/n!`.
fn check_separable(p: &ProblemSpec, points: &[(f64, f64)]) {
    let s = build_series(p, 5, CapPolicy::Fail).unwrap();
    let dh: Vec<Expr> = (0..6)
        .scan(p.hamiltonian().clone(), |h, _| {
            let out = h.clone();
            *h = h.differentiate("v").unwrap();
            Some(out)
        })
        .collect();
    for &(x, t) in points {
        let w0 = s.derivative_at(0, x).unwrap();
        let h: Vec<f64> = dh.iter().map(|d| d.eval_at("v", w0).unwrap()).collect();
        for n in 0..=4 {
            let mut fact = 1.0;
            let w: Vec<f64> = (0..=n)
                .map(|k| {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    s.derivative_at(k, x).unwrap() * t.powi(k as i32) / fact
                })
                .collect();
            let lhs = -composition_polynomial(n).evaluate(&h, &w);
            let rhs = s.coefficient_at(n + 1, x).unwrap() * t.powi(n as i32) / fact;
            assert!(
                (lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()),
                "order {n} at ({x}, {t}): {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn terms_separate_in_time() {
    let points: Vec<(f64, f64)> = (0..20)
        .map(|i| (-2.0 + 0.23 * i as f64, 0.05 + 0.04 * i as f64))
        .collect();
    check_separable(&burgers(), &points);
    let points: Vec<(f64, f64)> = (0..20).map(|i| (0.1 + 0.31 * i as f64, 0.02 + 0.05 * i as f64)).collect();
    check_separable(&eikonal_sin(), &points);
}

#[test]
fn burgers_coefficients_follow_the_closed_form() {
    let s = build_series(&burgers(), 8, CapPolicy::Fail).unwrap();
    let mut scale = 1.0;
    for n in 0..=8 {
        if n > 0 {
            scale *= 2.0 * n as f64;
        }
        for x in [-2.0, -1.0, 0.5, 1.0, 3.0] {
            let got = s.coefficient_at(n, x).unwrap();
            assert!(rel_close(got, -x * x * scale, 1e-9), "n={n} x={x}: {got}");
        }
    }
}

#[test]
fn burgers_truncation_is_the_geometric_tail() {
    let s = build_series(&burgers(), 8, CapPolicy::Fail).unwrap();
    for n in 0..=8 {
        for t in [0.1, 0.25, 0.4] {
            for x in [-2.0, 0.5, 1.0, 3.0] {
                let exact = -x * x / (1.0 - 2.0 * t);
                let err = (s.partial_sum(n, x, t).unwrap() - exact).abs();
                let tail = (x * x * (2.0 * t).powi(n as i32 + 1) / (1.0 - 2.0 * t)).abs();
                // the error is a difference of two rounded values near
                // `exact`, so it cannot resolve better than a few ulps of it
                let floor = 4.0 * f64::EPSILON * exact.abs();
                assert!(
                    (err - tail).abs() <= 1e-10 * tail + floor,
                    "N={n} t={t} x={x}: {err} vs {tail}"
                );
            }
        }
    }
}

#[test]
fn burgers_closed_form_solves_the_equation() {
    // u = -x^2/(1-2t): u_t = -2x^2/(1-2t)^2, u_x = -2x/(1-2t)
    let u = parse("-x^2/(1-2*t)").unwrap();
    let u_t = u.differentiate("t").unwrap();
    let u_x = u.differentiate("x").unwrap();
    let residual = Expr::add(u_t, Expr::div(Expr::powi(u_x, 2), Expr::int(2))).simplify();
    assert!(residual.is_zero(), "residual simplifies to {residual}");
}

#[test]
fn linear_data_gives_a_finite_series() {
    for (a, b) in [(1.0f64, 0.0f64), (3.0, 1.0), (-2.0, 5.0)] {
        let p = problem("-sqrt(1+v^2)", &format!("{a}*x + {b}"), -5.0, 5.0);
        let s = build_series(&p, 6, CapPolicy::Fail).unwrap();
        assert_eq!(s.finite_from(), Some(2));
        for x in [-3.0, 0.0, 2.0] {
            for t in [0.0, 0.5, 1.7] {
                let exact = a * x + b + t * (1.0 + a * a).sqrt();
                assert!((s.partial_sum(6, x, t).unwrap() - exact).abs() <= 1e-12);
                assert!(s.residual(6, x, t).unwrap().abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn sin_terms_match_the_printed_and_oracle_forms() {
    let p = eikonal_sin();
    let s = build_series(&p, 4, CapPolicy::Fail).unwrap();
    let oracle = oracle_series(&p, 4).unwrap();
    for i in 0..20 {
        let x = -3.0 + 0.3 * i as f64;
        let (c, sn) = (x.cos(), x.sin());
        let u1 = (1.0 + c * c).sqrt();
        let u2 = -c * c * sn / (1.0 + c * c);
        assert!((s.coefficient_at(1, x).unwrap() - u1).abs() <= 1e-9);
        assert!((s.coefficient_at(2, x).unwrap() - u2).abs() <= 1e-9);
        for n in 3..=4 {
            let o = oracle[n].eval_at("x", x).unwrap();
            assert!((s.coefficient_at(n, x).unwrap() - o).abs() <= 1e-8, "n={n} x={x}");
        }
    }
}

fn slope(s: &AdmSeries, order: usize, x: f64) -> f64 {
    let pts: Vec<(f64, f64)> = (0..9)
        .map(|i| {
            let t = 10f64.powf(-3.0 + 0.25 * i as f64);
            (t.ln(), s.residual(order, x, t).unwrap().abs().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
    sxy / sxx
}

#[test]
fn residual_order() {
    let cases = [
        (burgers(), [-1.5, -0.5, 0.7, 1.0, 2.0]),
        (eikonal_sin(), [0.4, 1.1, 2.0, 3.5, 5.0]),
    ];
    for (p, xs) in cases {
        let s = build_series(&p, 4, CapPolicy::Fail).unwrap();
        for order in 2..=4 {
            for x in xs {
                let k = slope(&s, order, x);
                assert!(k >= order as f64 - 0.5, "N={order} x={x}: slope {k}");
            }
        }
    }
}
