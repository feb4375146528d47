use super::*;
use crate::curve::{find_full_torsion_curve, scale_curve, torsion_table};
use proptest::prelude::*;

fn ctx(p: u64, l: u32) -> SeriesContext {
    let c = find_full_torsion_curve(p, l).unwrap();
    SeriesContext::new(&torsion_table(&c, l).unwrap(), DEFAULT_ORDER).unwrap()
}

#[test]
fn xy_expansion_shape() {
    let c = WeierstrassCurve::over_prime(1009, 3, 17, 123).unwrap();
    let e = expand_xy(&c, 8).unwrap();
    let f = c.field();
    assert_eq!(e.x.lead(), -2);
    assert_eq!(e.x.coeff_at(-2), Some(f.one()));
    assert_eq!(e.x.coeff_at(0), Some(f.zero()));
    assert_eq!(e.x.coeff_at(2), Some(-&c.a));
    assert_eq!(e.y.lead(), -3);
    assert_eq!(e.y.c(0), f.int(-1));
    assert_eq!(e.y.c(4), c.a);
    assert_eq!(e.omega.c(0), f.one());
    assert_eq!(e.omega.c(4), &f.int(2) * &c.a);
    // t = −x/y.
    let t = BalancedSeries::monomial(f, 1);
    assert_eq!(e.x.mul(&t), e.y.mul(&t).mul(&t).neg());
    // y² = x³ + ax + b to the available precision.
    let lhs = e.y.mul(&e.y);
    let rhs = e.eval_x_poly(&DivisionPolynomials::new(&c).cubic());
    let diff = lhs.sub(&rhs);
    assert!(diff.is_zero());
    assert!(diff.abs_prec() >= 2);
}

#[test]
fn small_characteristic_is_rejected() {
    let c = WeierstrassCurve::over_prime(7, 3, 1, 3).unwrap();
    assert!(matches!(
        expand_xy(&c, 8),
        Err(Error::CharacteristicTooSmall { .. })
    ));
}

#[test]
fn line_and_vertical_series() {
    for (p, l) in [(19u64, 3u32), (29, 4), (71, 5)] {
        let s = ctx(p, l);
        let t = s.table();
        let a = &t.curve().a;
        for pi in t.nonzero_indices() {
            let v = vertical_series(&s, pi).unwrap();
            let prof = LambdaProfile::from_series(&v).unwrap();
            assert!(prof.lambda.is_zero() && prof.nu.is_zero());
            assert_eq!(prof.mu, -&t.x(pi));
            assert_eq!(v.c(4), -a);
            for qi in t.nonzero_indices() {
                let ri = t.neg(t.add(pi, qi));
                if ri.is_zero() {
                    continue;
                }
                let d = TorsionDivisor::line(t, pi, qi);
                let (series, prof) = line_series(&s, &d).unwrap();
                assert!(prof.mu.is_zero());
                assert_eq!(prof.lambda.square(), &(&t.x(pi) + &t.x(qi)) + &t.x(ri));
                assert_eq!(prof.nu, &t.y(pi) - &(&prof.lambda * &t.x(pi)));
                assert_eq!(prof.nu, &t.y(qi) - &(&prof.lambda * &t.x(qi)));
                assert_eq!(series.c(4), -a);
                // λ of the line agrees with the sum of single-point λ's.
                let sum = &(s.lambda(pi) + s.lambda(qi)) + s.lambda(ri);
                assert_eq!(prof.lambda, sum);
                assert_eq!(expand_fd(&s, &d).unwrap(), series);
            }
        }
        assert_eq!(
            vertical_series(&s, TorsionIndex::ZERO),
            Err(Error::IdentityPoint)
        );
    }
}

#[test]
fn degenerate_line_divisors() {
    let s = ctx(19, 3);
    let t = s.table();
    let p = t.idx(1, 0);
    let with_o =
        TorsionDivisor::from_terms(3, [(p, 1), (t.neg(p), 1), (TorsionIndex::ZERO, 1)]).unwrap();
    assert!(matches!(
        line_series(&s, &with_o),
        Err(Error::DegenerateDivisor(_))
    ));
    let skew = TorsionDivisor::from_terms(3, [(p, 2), (t.idx(0, 1), 1)]).unwrap();
    assert!(matches!(
        line_series(&s, &skew),
        Err(Error::DegenerateDivisor(_))
    ));
}

#[test]
fn divisor_expansions() {
    let s = ctx(71, 5);
    let t = s.table();
    let one = expand_fd(&s, &TorsionDivisor::point(5, TorsionIndex::ZERO).unwrap()).unwrap();
    assert_eq!(one.lead(), 0);
    assert!(one.coeffs()[1..].iter().all(|c| c.is_zero()) && one.c(0).is_one());
    for pi in t.nonzero_indices() {
        let fp = expand_fd(&s, &TorsionDivisor::point(5, pi).unwrap()).unwrap();
        assert_eq!(fp.lead(), -1);
        let neg = s.profile(t.neg(pi));
        assert_eq!(neg.lambda, -s.lambda(pi));
        assert_eq!(neg.mu, *s.mu(pi));
        assert_eq!(neg.nu, -s.nu(pi));
    }
    // All of E[ℓ]: normalized ψ_ℓ, with vanishing λ, μ, ν.
    let all = TorsionDivisor::from_terms(5, t.indices().map(|i| (i, 1))).unwrap();
    let fd = expand_fd(&s, &all).unwrap();
    assert_eq!(fd.lead(), 1 - 25);
    for j in 1..=3 {
        assert!(fd.c(j).is_zero());
    }
    let d = DivisionPolynomials::new(t.curve());
    let psi = s.expansion().eval_x_poly(&d.reduced(5));
    let psi = psi.scale(&psi.c(0).inv().unwrap());
    assert_eq!(psi, fd);
}

#[test]
fn full_divisor_matches_psi_for_even_level() {
    let s = ctx(29, 4);
    let t = s.table();
    let all = TorsionDivisor::from_terms(4, t.indices().map(|i| (i, 1))).unwrap();
    let fd = expand_fd(&s, &all).unwrap();
    let d = DivisionPolynomials::new(t.curve());
    let psi = s
        .expansion()
        .eval_x_poly(&d.reduced(4))
        .mul(&s.expansion().y);
    let psi = psi.scale(&psi.c(0).inv().unwrap());
    assert_eq!(psi, fd);
}

#[test]
fn point_relations_and_cross_checks() {
    for (p, l) in [(19u64, 3u32), (31, 3), (29, 4), (71, 5), (101, 5)] {
        let s = ctx(p, l);
        let t = s.table();
        let f = t.curve().field();
        for pi in t.nonzero_indices() {
            let (lam, mu, nu) = (s.lambda(pi), s.mu(pi), s.nu(pi));
            assert_eq!(t.x(pi), &lam.square() - &(&f.int(2) * mu));
            let y = &(&(&f.int(3) * nu) - &(&f.int(3) * &(mu * lam))) + &lam.pow(3);
            assert_eq!(t.y(pi), y);
            assert_eq!(telescoping_lambda(t, pi), *lam);
            assert_eq!(linear_chain_series(&s, pi).unwrap(), *s.point_series(pi));
        }
    }
}

#[test]
fn t_times_n_opening_terms() {
    let c = WeierstrassCurve::over_prime(1009, 3, 17, 123).unwrap();
    let e = expand_xy(&c, 8).unwrap();
    let f = c.field();
    let t = BalancedSeries::monomial(f, 1).truncate(8);
    assert_eq!(e.t_times(1).unwrap(), t);
    for n in [2i64, 3] {
        let tn = e.t_times(n as u64).unwrap();
        assert_eq!(tn.lead(), 1);
        assert_eq!(tn.c(0), f.int(n));
        for j in [1, 2, 3, 5] {
            assert!(tn.c(j).is_zero(), "n={n} j={j}");
        }
        let c5 = &(&(&f.int(2) * &c.a) * &f.int(n - n.pow(5))) / &f.int(5);
        assert_eq!(tn.c(4), c5);
        // Group law in the Laurent field as the oracle.
        let (x, y) = (e.x.clone(), e.y.clone());
        let lam = x
            .mul(&x)
            .scale(&f.int(3))
            .add(&BalancedSeries::constant(c.a.clone()))
            .div(&y.scale(&f.int(2)))
            .unwrap();
        let mut xk = lam.mul(&lam).sub(&x.scale(&f.int(2)));
        let mut yk = lam.mul(&x.sub(&xk)).sub(&y);
        if n == 3 {
            let lam = yk.sub(&y).div(&xk.sub(&x)).unwrap();
            let x3 = lam.mul(&lam).sub(&x).sub(&xk);
            let y3 = lam.mul(&x.sub(&x3)).sub(&y);
            xk = x3;
            yk = y3;
        }
        assert_eq!(xk.div(&yk).unwrap().neg(), tn);
    }
}

#[test]
fn composition_pattern() {
    for (p, l) in [(71u64, 5u32), (31, 3)] {
        let s = ctx(p, l);
        let t = s.table();
        let f = t.curve().field();
        for pi in t.nonzero_indices().take(12) {
            let fp = s.point_series(pi);
            assert_eq!(compose_with_n(s.expansion(), fp, 1).unwrap(), *fp);
            for n in [2i64, 3] {
                let g = compose_with_n(s.expansion(), fp, n as u64).unwrap();
                assert_eq!(g.lead(), -1);
                let inv_n = f.int(n).inv().unwrap();
                assert_eq!(g.c(0), inv_n);
                let g = g.scale(&f.int(n));
                assert_eq!(g.c(1), s.lambda(pi) * &f.int(n));
                assert_eq!(g.c(2), s.mu(pi) * &f.int(n * n));
                assert_eq!(g.c(3), s.nu(pi) * &f.int(n * n * n));
            }
        }
    }
}

#[test]
fn json_dump() {
    let s = ctx(19, 3);
    let v = s.point_series(s.table().idx(1, 0)).to_json();
    assert_eq!(v["lead"], -1);
    assert_eq!(v["coeffs"].as_array().unwrap().len(), DEFAULT_ORDER + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balanced_grading(u in 2i64..28, which in 0usize..3) {
        let (p, l) = [(71u64, 5u32), (29, 4), (31, 3)][which];
        let s = ctx(p, l);
        let t = s.table();
        let fu = t.curve().field().int(u);
        let (c2, map) = scale_curve(t.curve(), &fu).unwrap();
        let t2 = t.transport(&c2, &map).unwrap();
        let s2 = SeriesContext::new(&t2, DEFAULT_ORDER).unwrap();
        let check = |a: &BalancedSeries, b: &BalancedSeries| {
            assert_eq!(a.lead(), b.lead());
            for j in 0..=DEFAULT_ORDER {
                assert_eq!(b.c(j), &a.c(j) * &fu.pow(j as u64), "j={j}");
            }
        };
        check(&s.expansion().x, &s2.expansion().x);
        check(&s.expansion().y, &s2.expansion().y);
        check(&s.expansion().omega, &s2.expansion().omega);
        for i in t.indices() {
            check(s.point_series(i), s2.point_series(i));
            if !i.is_zero() {
                check(&vertical_series(&s, i).unwrap(), &vertical_series(&s2, i).unwrap());
            }
        }
    }

    #[test]
    fn multiplicative_and_additive(ms in proptest::collection::vec(-2i64..3, 9), ns in proptest::collection::vec(-2i64..3, 9)) {
        let s = ctx(19, 3);
        let t = s.table();
        let idx: Vec<_> = t.indices().collect();
        let d = TorsionDivisor::from_terms(3, idx.iter().copied().zip(ms)).unwrap();
        let e = TorsionDivisor::from_terms(3, idx.iter().copied().zip(ns)).unwrap();
        let fd = expand_fd(&s, &d).unwrap();
        let fe = expand_fd(&s, &e).unwrap();
        let fde = expand_fd(&s, &d.add(&e)).unwrap();
        prop_assert_eq!(fd.mul(&fe), fde.clone());
        prop_assert_eq!(fd.lead(), d.multiplicity(TorsionIndex::ZERO) - d.degree());
        let lam = |x: &BalancedSeries| LambdaProfile::from_series(x).unwrap().lambda;
        prop_assert_eq!(lam(&fde), &lam(&fd) + &lam(&fe));
    }
}
