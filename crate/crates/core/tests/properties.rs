use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use cmverify::cmdeg::{check_sign_pattern, estimate_cm_degree, DegreeSearch, LogGrid, ScaledTailOracle};
use cmverify::inequalities::{f_poly_exact, FPolyForm};
use cmverify::laplace::{verify_representation, Representation};
use cmverify::laurent::{h_function, h_nth_derivative, remainder_hk, remainder_hk_derivative, TailSeries};
use cmverify::precision::rel_diff;
use cmverify::specfun::{a_coeff, bessel_i, exp_recip_derivative, hyp1f2, polygamma, CoeffTable};
use cmverify::WorkingPrecision;

fn p() -> WorkingPrecision {
    WorkingPrecision::default()
}

/// Log-uniform sample in `[lo, hi]`.
fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn signed(i: u32, v: Float) -> Float {
    if i % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `sum_j (-1)^j C(n, j) f(t + (n/2 - j) h) / h^n`, accurate to `O(h^2)`.
fn central_difference<F>(n: u32, t: &Float, h: &Float, wide: WorkingPrecision, f: F) -> Float
where
    F: Fn(&Float) -> Float,
{
    let mut acc = wide.zero();
    for j in 0..=n {
        let shift = wide.float(f64::from(n) / 2.0 - f64::from(j));
        let x = wide.float(t + wide.float(&shift * h));
        let c = wide.float(Integer::from(Integer::binomial_u(n, j)));
        let term = f(&x) * c;
        if j % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc / wide.float(h.pow(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polygamma_recurrence_residual(n in 1u32..=3, t in log_uniform(0.1, 100.0)) {
        let prec = p();
        let t = prec.float(t);
        let jump = prec.float(Float::factorial(n)) / prec.float((&t).pow(n + 1));
        let expected = signed(n, jump);
        let residual = polygamma(n, &prec.float(&t + 1u32), prec).unwrap() - polygamma(n, &t, prec).unwrap() - expected;
        prop_assert!(residual.abs() < prec.pow10(-40));
    }

    #[test]
    fn polygamma_sign(n in 1u32..=4, t in log_uniform(0.1, 100.0)) {
        let prec = p();
        let v = polygamma(n, &prec.float(t), prec).unwrap();
        prop_assert!(signed(n + 1, v).is_sign_positive());
    }

    #[test]
    fn bessel_i_increases(nu in 0u32..6, a in 0.0f64..40.0, gap in 1e-6f64..10.0) {
        let prec = p();
        let lo = bessel_i(nu, &prec.float(a), prec).unwrap();
        let hi = bessel_i(nu, &prec.float(a + gap), prec).unwrap();
        prop_assert!(lo < hi);
    }

    #[test]
    fn hyp1f2_increases(k in 0u32..6, a in 0.0f64..100.0, gap in 1e-6f64..10.0) {
        let prec = p();
        let lo = hyp1f2(k + 1, k + 2, &prec.float(a), prec).unwrap();
        let hi = hyp1f2(k + 1, k + 2, &prec.float(a + gap), prec).unwrap();
        prop_assert!(lo < hi);
    }

    #[test]
    fn scaled_remainder_is_cm_at_its_degree(k in 0u32..=4, t in log_uniform(1e-2, 1e6)) {
        let prec = p();
        let r = prec.float(k + 1);
        let ders = TailSeries::remainder(k).scaled_derivatives(&r, &prec.float(t), 6, prec).unwrap();
        for (n, d) in ders.into_iter().enumerate() {
            prop_assert!(signed(n as u32, d) > 0, "k={} n={} t={}", k, n, t);
        }
    }

    #[test]
    fn h_is_cm_and_above_one(t in log_uniform(0.05, 1e3)) {
        let prec = p();
        let t = prec.float(t);
        prop_assert!(h_function(&t, prec).unwrap() > 1);
        for i in 0..=8u32 {
            let v = signed(i, h_nth_derivative(i, &t, prec).unwrap());
            prop_assert!(v > 0, "i={}", i);
        }
    }

    #[test]
    fn h_tail_decreases(a in log_uniform(10.0, 1e3), ratio in 1.0001f64..3.0) {
        let prec = p();
        let lo = h_function(&prec.float(a), prec).unwrap();
        let hi = h_function(&prec.float(a * ratio), prec).unwrap();
        prop_assert!(hi < lo);
    }

    #[test]
    fn difference_step_is_monotone(i in 0u32..=6, t in log_uniform(1e-2, 1e3)) {
        let prec = p();
        let t = prec.float(t);
        let here = signed(i, h_nth_derivative(i, &t, prec).unwrap());
        let next = signed(i, h_nth_derivative(i, &prec.float(&t + 1u32), prec).unwrap());
        prop_assert!(here > next);
    }

    #[test]
    fn f_forms_agree_at_random_rationals(i in 0u32..=12, num in 1i64..5000, den in 1i64..500) {
        let t = Rational::from((num, den));
        let a = f_poly_exact(i, &t, FPolyForm::A).unwrap().value;
        prop_assert_eq!(&f_poly_exact(i, &t, FPolyForm::B).unwrap().value, &a);
        if i >= 1 {
            prop_assert_eq!(&f_poly_exact(i, &t, FPolyForm::C).unwrap().value, &a);
            prop_assert_eq!(&f_poly_exact(i, &t, FPolyForm::D).unwrap().value, &a);
        }
    }

    #[test]
    fn f_is_negative(i in 0u32..=12, t in log_uniform(1e-2, 1e3)) {
        let exact = Float::with_val(64, t).to_rational().unwrap();
        prop_assert!(f_poly_exact(i, &exact, FPolyForm::A).unwrap().value < 0);
    }
}

#[test]
fn exp_recip_derivative_matches_finite_differences() {
    let prec = p();
    let wide = WorkingPrecision::new(150).unwrap();
    let h = wide.pow10(-25);
    for i in 1..=4u32 {
        for t in [0.5, 1.0, 2.0, 5.0] {
            let got = exp_recip_derivative(i, &prec.float(t), prec).unwrap();
            let fd = central_difference(i, &wide.float(t), &h, wide, |x| wide.float(x.recip_ref()).exp());
            assert!(rel_diff(&prec.float(&fd), &got) < 1e-8, "i={i} t={t}");
        }
    }
}

#[test]
fn a_coeff_matches_symbolic_differentiation() {
    // (e^(1/t))^(i) = e^u Q_i(u) with u = 1/t, Q_0 = 1, Q_{i+1} = -u^2 (Q_i + Q_i')
    let mut q: Vec<Integer> = vec![Integer::from(1)];
    for i in 1..=8u32 {
        let mut sum = q.clone();
        sum.push(Integer::new());
        for (d, c) in q.iter().enumerate().skip(1) {
            sum[d - 1] += Integer::from(c * d as u32);
        }
        let mut next = vec![Integer::new(); sum.len() + 2];
        for (d, c) in sum.iter().enumerate() {
            next[d + 2] = Integer::from(-c);
        }
        q = next;
        while q.last().is_some_and(|c| *c == 0) {
            q.pop();
        }
        // closed form: (-1)^i sum_k a_{i,k} u^(2i-k)
        let mut closed = vec![Integer::new(); 2 * i as usize + 1];
        let table = CoeffTable::new(i);
        for (k, a) in table.entries().iter().enumerate() {
            assert_eq!(*a, a_coeff(i, k as u32).unwrap());
            let coeff = if i % 2 == 1 { Integer::from(-a) } else { a.clone() };
            closed[2 * i as usize - k] = coeff;
        }
        while closed.last().is_some_and(|c| *c == 0) {
            closed.pop();
        }
        assert_eq!(closed, q, "i={i}");
    }
}

#[test]
fn remainder_derivatives_match_finite_differences() {
    let prec = p();
    let wide = WorkingPrecision::new(150).unwrap();
    let h = wide.pow10(-25);
    for k in [0u32, 2, 5] {
        for n in 1..=3u32 {
            for t in [0.3, 1.0, 4.0, 30.0] {
                let got = remainder_hk_derivative(k, n, &prec.float(t), prec).unwrap();
                let fd = central_difference(n, &wide.float(t), &h, wide, |x| remainder_hk(k, x, wide).unwrap());
                assert!(rel_diff(&prec.float(&fd), &got) < 1e-8, "k={k} n={n} t={t}");
            }
        }
    }
}

#[test]
fn sign_pattern_is_downward_closed() {
    let prec = p();
    let grid = LogGrid::new(1e-2, 1e6, 60).unwrap();
    for (k, r, r_lower) in [(0u32, 1.0, 0.5), (2, 3.0, 2.9), (4, 5.0, 1.0)] {
        let pass = |r: f64| {
            let oracle = ScaledTailOracle { series: TailSeries::remainder(k), r: prec.float(r) };
            check_sign_pattern(&oracle, &grid, 6, prec).unwrap().pass
        };
        assert!(pass(r), "k={k} r={r}");
        assert!(pass(r_lower), "k={k} r'={r_lower}");
    }
}

#[test]
fn degree_bracket_is_reproducible() {
    let prec = p();
    let mut search = DegreeSearch::for_remainder(1);
    search.grid = LogGrid::new(1e-2, 1e6, 80).unwrap();
    let est = estimate_cm_degree(1, &search, prec).unwrap();
    let scan = |r: f64| {
        let oracle = ScaledTailOracle { series: TailSeries::remainder(1), r: prec.float(r) };
        check_sign_pattern(&oracle, &search.grid, search.max_order, prec).unwrap()
    };
    assert!(scan(est.r_lo).pass);
    assert!(!scan(est.r_hi).pass);
    assert_eq!(estimate_cm_degree(1, &search, prec).unwrap(), est);
}

#[test]
fn violation_above_degree_is_first_order_and_persists() {
    let prec = p();
    let grid = LogGrid::new(1e-2, 1e6, 200).unwrap();
    for k in 0..=4u32 {
        let r = prec.float(f64::from(k) + 1.25);
        let series = TailSeries::remainder(k);
        let oracle = ScaledTailOracle { series, r: r.clone() };
        let v = check_sign_pattern(&oracle, &grid, 6, prec).unwrap().first_violation.expect("violation");
        assert_eq!(v.order, 1, "k={k}");
        // t^(k+1.25) H_k(t) grows without bound, so the first derivative stays positive
        for t in grid.points(prec).into_iter().filter(|t| *t > grid.median()) {
            let d = series.scaled_derivatives(&r, &t, 1, prec).unwrap();
            assert!(d[1].is_sign_positive(), "k={k} t={t}");
        }
    }
}

#[test]
fn f12_and_bessel_representations_agree() {
    let prec = p();
    let tol = 1e-10;
    for k in 0..=3u32 {
        for z in [0.5, 1.0, 2.0, 5.0] {
            let z = prec.float(z);
            let a = verify_representation(Representation::F12 { k }, &z, tol, prec).unwrap();
            let b = verify_representation(Representation::Bessel { k }, &z, tol, prec).unwrap();
            assert!(rel_diff(&a.rhs, &b.rhs) < 2.0 * tol, "k={k} z={z}");
        }
    }
}
