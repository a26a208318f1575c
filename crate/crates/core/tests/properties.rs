//! Randomized invariants of the algebra, the kernels and the lattice tools.

use proptest::prelude::*;

use qtriple::abel_rothe::{bilateral_term, NumericParams, RgjForm};
use qtriple::algebra::rational::rat;
use qtriple::algebra::{Bindings, LaurentPoly, Monomial, TruncatedSeries, Var, WeightMap};
use qtriple::convergence::{
    convergence_probe, dominating_bound_check, m_substitution, region_predicate, ProbeTarget, Region,
    RegionPoint,
};
use qtriple::kernels::{poch, q_binom, PochIndex};
use qtriple::multidim::{default_x, exponent_identity, permutations, vandermonde_expand, vandermonde_product};
use qtriple::numeric::ComplexHP;

const VARS: [Var; 5] = [Var::Q, Var::A, Var::B, Var::Z, Var::C];

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((0..VARS.len(), -2i32..=3), 0..3)
        .prop_map(|ps| Monomial::from_pairs(&ps.into_iter().map(|(i, e)| (VARS[i], e)).collect::<Vec<_>>()))
}

fn coefficient() -> impl Strategy<Value = qtriple::algebra::Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

/// Sparse Laurent polynomials with up to five terms.
fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((monomial(), coefficient()), 0..5).prop_map(LaurentPoly::from_terms)
}

/// Polynomials with only nonnegative exponents in the graded variables.
fn graded_poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((0u8..3, 0u8..3, 0u8..2, -2i32..=2), coefficient()), 0..5).prop_map(|ts| {
        LaurentPoly::from_terms(ts.into_iter().map(|((q, a, b, z), c)| {
            (Monomial::from_pairs(&[(Var::Q, q as i32), (Var::A, a as i32), (Var::B, b as i32), (Var::Z, z)]), c)
        }))
    })
}

fn series(p: &LaurentPoly, order: i64) -> TruncatedSeries {
    TruncatedSeries::new(p, WeightMap::standard(), order)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(x in poly(), y in poly(), z in poly()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn m_substitution_round_trip(k in prop::collection::vec(-1000i64..=1000, 1..8)) {
        let (m, v) = m_substitution(&k);
        prop_assert!(v.pass, "{}", v);
        let back: Vec<i64> = (0..k.len()).map(|i| m[i..].iter().sum()).collect();
        prop_assert_eq!(back, k);
    }

    #[test]
    fn exponent_identity_random(k in prop::collection::vec(-40i64..=40, 1..6)) {
        prop_assert!(exponent_identity(&k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn series_mul_is_truncated_poly_mul(x in graded_poly(), y in graded_poly(), order in 0i64..6) {
        let w = WeightMap::standard();
        // the product may be known beyond `order`; compare on the common range
        let lhs = series(&x, order).mul(&series(&y, order)).unwrap();
        prop_assert!(lhs.order() >= order);
        prop_assert_eq!(lhs.truncate_to(order).into_body(), (&x * &y).truncate(&w, order));
    }

    #[test]
    fn invert_then_mul_is_one(tail in graded_poly(), order in 0i64..6) {
        // 1 + (positive-weight part) is invertible
        let w = WeightMap::standard();
        let f = LaurentPoly::one() + (&tail - &tail.component(&w, 0));
        let s = series(&f, order);
        let prod = s.mul(&s.invert().unwrap()).unwrap();
        prop_assert!(prod.is_one(), "{}", prod.body());
    }

    #[test]
    fn substitute_commutes_with_ring_operations(x in graded_poly(), y in graded_poly(), order in 0i64..5) {
        // weight-nondecreasing binding; z occurs with negative exponents, so its image is a weight-0 monomial
        let b = Bindings::new()
            .bind(Var::A, LaurentPoly::term(1, &[(Var::A, 1), (Var::Q, 1)]) + LaurentPoly::var(Var::B))
            .bind(Var::Z, LaurentPoly::term(-2, &[(Var::Z, 1)]));
        let (sx, sy) = (series(&x, order), series(&y, order));
        let sub = |s: &TruncatedSeries| s.substitute(&b).unwrap();
        let sum = sub(&sx.add(&sy).unwrap());
        prop_assert_eq!(sum.truncate_to(order), sub(&sx).add(&sub(&sy)).unwrap().truncate_to(order));
        let prod = sub(&sx.mul(&sy).unwrap());
        prop_assert_eq!(prod.truncate_to(order), sub(&sx).mul(&sub(&sy)).unwrap().truncate_to(order));
    }

    #[test]
    fn poch_functional_equation(k in -8i64..=8, c in 1i64..=4, ea in 0i32..=2, ez in -1i32..=1) {
        // (x)_{k+1} = (x)_k (1 - x q^k); w(a) = 9 keeps every x q^j, |j| <= 8, of positive weight
        let w = WeightMap::q_only().with(Var::A, 9);
        let order = 6;
        let x = LaurentPoly::term(c, &[(Var::A, ea.max(1)), (Var::Z, ez)]);
        let order = order + 9 * ea.max(1) as i64;
        let lhs = poch(&x, PochIndex::Finite(k + 1), &w, order).unwrap();
        let step = TruncatedSeries::new(&(LaurentPoly::one() - x.mul_monomial(&Monomial::var(Var::Q, k as i32))), w, order);
        let rhs = poch(&x, PochIndex::Finite(k), &w, order).unwrap().mul(&step).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn poch_infinite_quotient(k in -5i64..=5, c in 1i64..=4, ez in -1i32..=1) {
        // (x)_inf / (x q^k)_inf = (x)_k
        let w = WeightMap::q_only().with(Var::A, 6);
        let order = 12;
        let x = LaurentPoly::term(c, &[(Var::A, 1), (Var::Z, ez)]);
        let shifted = x.mul_monomial(&Monomial::var(Var::Q, k as i32));
        let lhs = poch(&x, PochIndex::Infinite, &w, order).unwrap()
            .mul(&poch(&shifted, PochIndex::Infinite, &w, order).unwrap().invert().unwrap()).unwrap();
        prop_assert_eq!(lhs, poch(&x, PochIndex::Finite(k), &w, order).unwrap());
    }

    #[test]
    fn vandermonde_with_rational_x(
        k in prop::collection::vec(-4i64..=4, 1..=4),
        xs in prop::collection::vec(coefficient(), 4),
    ) {
        let x: Vec<LaurentPoly> = xs[..k.len()].iter().map(|c| LaurentPoly::constant(c.clone())).collect();
        prop_assert_eq!(vandermonde_expand(&k, &x), vandermonde_product(&k, &x));
    }

    #[test]
    fn q_binomial_symmetry_and_pascal(n in 1u32..=12, k in 0i64..=12) {
        let k = k.min(n as i64);
        prop_assert_eq!(q_binom(n, k), q_binom(n, n as i64 - k));
        let pascal = q_binom(n - 1, k - 1) + q_binom(n - 1, k).mul_monomial(&Monomial::var(Var::Q, k as i32));
        prop_assert_eq!(q_binom(n, k), pascal);
    }

    #[test]
    fn bilateral_term_valuation_bound(k in -30i64..=30, reversed in any::<bool>()) {
        let form = if reversed { RgjForm::Reversed } else { RgjForm::Theorem };
        let t = bilateral_term(form, k, &WeightMap::standard(), 3).unwrap();
        prop_assert!(t.min_weight >= k.abs() - 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn dominating_ratio_is_az_to_the_r(a in 0.05f64..0.8, b in -0.9f64..0.9, r in 2usize..=3, pick in 0usize..6) {
        let prec = 64;
        let perms = permutations(r);
        let sigma = &perms[pick % perms.len()].0;
        let p = RegionPoint {
            a: ComplexHP::real(prec, a),
            b: ComplexHP::real(prec, b),
            z: ComplexHP::one(prec),
            x: default_x(r, prec),
            q: ComplexHP::real(prec, 0.5),
        };
        let v = dominating_bound_check(sigma, &p, 60).unwrap();
        prop_assert!(v.pass, "{}", v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// Points at least 0.1 away from `max(|az|, |b|) = 1`.
    #[test]
    fn probe_agrees_with_the_region(az in 0.0f64..0.9, b in 0.0f64..0.9, out in any::<bool>(), which in any::<bool>(), z in 0.3f64..0.95) {
        let (az, b) = if out { if which { (az + 1.1, b * 0.9) } else { (az * 0.9, b + 1.1) } } else { (az, b) };
        let p = NumericParams::real(64, az / z, b, z, 0.5, 1e-10);
        let inside = region_predicate(
            &RegionPoint { a: p.a.clone(), b: p.b.clone(), z: p.z.clone(), x: vec![], q: p.q.clone() },
            Region::New,
        ).unwrap();
        prop_assert_eq!(inside, !out);
        // 0.9^480 is far below the tolerance; the default windows stop at 192
        let windows: Vec<i64> = (1..=30).map(|i| 16 * i).collect();
        let v = convergence_probe(ProbeTarget::Rgj, &p, &windows).unwrap();
        prop_assert!(v.pass, "{} behaviour {:?}", v, v.get_param("behavior"));
    }
}
