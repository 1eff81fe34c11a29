mod common;

use proptest::prelude::*;

use hmcert::bound::{bound_hull, certify_with, with_threads, Budget, Claim, Domain, Precision};
use hmcert::exact::{int, iv_arctan_pi, iv_exp, iv_sqrt, rat, Interval, Rational};
use hmcert::expr::{Chart, Expr, NamedExpression};
use hmcert::poly::{cheb_generate, denom_positive, from_bernstein, to_bernstein, Polynomial, RationalFunction};
use hmcert::tower::TowerElement;

use common::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..=10_000, 1i64..=997).prop_map(|(n, d)| rat(n, d))
}

fn interval() -> impl Strategy<Value = Interval> {
    (rational(), rational()).prop_map(|(a, b)| Interval::spanning(a, b))
}

/// An interval with a point inside it.
fn interval_with_point() -> impl Strategy<Value = (Interval, Rational)> {
    (interval(), 0i64..=1000).prop_map(|(x, k)| {
        let p = point_in(&x, k, 1000);
        (x, p)
    })
}

/// An interval with a sub-interval.
fn nested() -> impl Strategy<Value = (Interval, Interval)> {
    (interval(), 0i64..=1000, 0i64..=1000).prop_map(|(x, a, b)| {
        let s = Interval::spanning(point_in(&x, a, 1000), point_in(&x, b, 1000));
        (x, s)
    })
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((-50i64..=50, 1i64..=9), 1..=max_deg + 1)
        .prop_map(|c| Polynomial::from_rationals(&c.into_iter().map(|(n, d)| rat(n, d)).collect::<Vec<_>>()))
}

fn tower() -> impl Strategy<Value = TowerElement> {
    let part = (prop::collection::vec(-4i64..=4, 1..=3), any::<bool>()).prop_map(|(c, shifted)| {
        let p = RationalFunction::from_poly(Polynomial::from_ints(&c));
        if shifted {
            p.div(&RationalFunction::from_poly(Polynomial::from_ints(&[1, 0, 1]))).unwrap()
        } else {
            p
        }
    });
    (part.clone(), part.clone(), part.clone(), part).prop_map(|(a, b, c, d)| TowerElement::new(a, b, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn interval_ops_are_sound((x, p) in interval_with_point(), (y, q) in interval_with_point()) {
        soundness_case(&x, &y, &p, &q).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn interval_ops_are_inclusion_monotone((x, xs) in nested(), (y, ys) in nested()) {
        monotonicity_case(&x, &xs, &y, &ys).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn tower_mul_commutes_and_associates(a in tower(), b in tower(), c in tower()) {
        tower_case(&a, &b, &c).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn bernstein_round_trip(p in small_poly(12), pts in prop::collection::vec(rational(), 50)) {
        bernstein_case(&p, &pts).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn rational_function_bernstein_evaluation(
        n in small_poly(6),
        d in small_poly(4),
        pts in prop::collection::vec((0i64..=1000).prop_map(|k| rat(k, 1000)), 25),
    ) {
        // make the denominator positive on [0, 1]
        let d = &d.scale(&rat(1, 1000)) + &Polynomial::one();
        let r = RationalFunction::new(n, d).unwrap();
        let (bn, bd) = (to_bernstein(r.num(), None), to_bernstein(r.den(), None));
        for x in &pts {
            prop_assert_eq!(r.eval(x).unwrap(), bn.eval(x) / bd.eval(x));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transcendental_widths_shrink_with_precision(x in interval(), k in 4usize..20) {
        let small = x.scale(&rat(1, 10));
        let (a, b) = (iv_exp(&small, k), iv_exp(&small, k + 4));
        prop_assert!(b.width() <= a.width());
        let pos = small.abs();
        let (a, b) = (iv_sqrt(&pos, 8 * k as u32).unwrap(), iv_sqrt(&pos, 8 * k as u32 + 16).unwrap());
        prop_assert!(b.width() <= a.width());
        let (a, _) = iv_arctan_pi(&small, k);
        let (b, _) = iv_arctan_pi(&small, k + 4);
        prop_assert!(b.width() <= a.width());
    }

    #[test]
    fn exp_encloses_fixed_point_oracle(p in (-2000i64..=2000, 1i64..=97).prop_map(|(n, d)| rat(n, 100 * d))) {
        let e = iv_exp(&Interval::point(p.clone()), 24);
        let v = Fx::from_rational(&p).exp().to_rational();
        let tol = rat(1, 1_000_000_000_000);
        prop_assert!(e.lo() <= &(&v + &tol) && &(&v - &tol) <= e.hi(), "{} vs {}", e, v);
    }

    #[test]
    fn tree_hull_refines_under_subdivision(a in 0i64..=1000, b in 0i64..=1000, c in 0i64..=1000, d in 0i64..=1000) {
        // x(1−x) + x²/(1+x) − exp(x)/3, evaluated naively
        let x = Expr::Var;
        let body = Expr::sub(
            Expr::add(
                Expr::mul(x.clone(), Expr::sub(Expr::constant(int(1)), x.clone())),
                Expr::div(Expr::mul(x.clone(), x.clone()), Expr::add(Expr::constant(int(1)), x.clone())),
            ),
            Expr::mul(Expr::constant(rat(1, 3)), Expr::exp(x)),
        );
        let e = NamedExpression::new("refine", Chart::Y, body);
        let outer = Interval::spanning(rat(a, 1000), rat(b, 1000));
        let inner = Interval::spanning(point_in(&outer, c, 1000), point_in(&outer, d, 1000));
        let pr = Precision::default();
        let (h_out, h_in) = (bound_hull(&e, &outer, &pr).unwrap(), bound_hull(&e, &inner, &pr).unwrap());
        prop_assert!(h_in.subset_of(&h_out), "{} not in {}", h_in, h_out);
    }

    #[test]
    fn positive_bernstein_denominators_evaluate_positive(
        c in prop::collection::vec(1i64..=100, 2..=8),
        a in 1i64..=499, b in 501i64..=999,
    ) {
        let form = hmcert::poly::BernsteinForm::new(c.iter().map(|&k| int(k)).collect()).unwrap();
        prop_assert!(denom_positive(&form));
        let p = from_bernstein(&form);
        let v = p.eval_interval(&Interval::spanning(rat(a, 1000), rat(b, 1000)));
        prop_assert!(v.hi() > &int(0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn modular_gcd_matches_subresultant(a in small_poly(5), b in small_poly(5), g in small_poly(4)) {
        let (x, y) = (&a * &g, &b * &g);
        let m = x.gcd(&y);
        prop_assert_eq!(&m, &x.gcd_subresultant(&y));
        if !g.is_zero() {
            prop_assert!(m.exact_div(&g.monic()).is_some() || m.is_zero());
        }
    }
}

#[test]
fn chebyshev_normalizations() {
    for n in 0..40 {
        let t = cheb_generate(n);
        assert_eq!(t.eval(&int(1)), int(1), "T_{n}(1)");
        let at0 = t.eval(&int(0));
        if n % 2 == 1 {
            assert_eq!(at0, int(0));
        } else {
            assert_eq!(at0, int(if (n / 2) % 2 == 0 { 1 } else { -1 }));
        }
    }
}

/// A claim that needs a few hundred boxes, so both the parallel and the
/// sequential branches of the traversal run.
fn splitting_problem() -> (NamedExpression, Domain, Claim) {
    let x = Expr::Var;
    let body = Expr::mul(
        Expr::mul(x.clone(), Expr::sub(Expr::constant(int(1)), x.clone())),
        Expr::exp(Expr::mul(Expr::constant(rat(1, 2)), x)),
    );
    // max of x(1−x)e^{x/2} on [0,1] is about 0.3260
    (NamedExpression::new("split", Chart::Y, body), Domain::unit(Chart::Y), Claim::sup(rat(34, 100)))
}

#[test]
fn certificates_are_thread_count_independent() {
    let (e, d, c) = splitting_problem();
    let run = |threads: usize, parallel: bool| {
        with_threads(threads, || certify_with(&e, &d, &c, Budget::default(), Precision::default(), parallel).unwrap().to_json())
    };
    let one = run(1, true);
    assert!(one.contains("certified"), "{one}");
    assert_eq!(one, run(4, true));
    assert_eq!(one, run(8, true));
    assert_eq!(one, run(4, false));
}

#[test]
fn budget_exhaustion_is_thread_count_independent() {
    let (e, d, c) = splitting_problem();
    let tight = Budget { max_depth: 48, max_boxes: 37 };
    let run = |threads: usize| with_threads(threads, || certify_with(&e, &d, &c, tight, Precision::default(), true).unwrap().to_json());
    let one = run(1);
    assert!(one.contains("budget"), "{one}");
    for n in [2, 3, 8] {
        assert_eq!(one, run(n));
    }
}
