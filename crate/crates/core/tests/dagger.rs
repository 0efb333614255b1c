mod common;

use arithdist::dagger::{
    ar_pairing_and_norm, banach_norm, dagger_classify, legendre_certificate, ord_profile, ord_profile_fits,
    phi_valuation_growth, DaggerVerdict, GrowthCertificate, TruncatedSeries,
};
use arithdist::coalgebra::PdPolynomial;
use arithdist::padic::{factorial, factorial_valuation, parse_rational};
use arithdist::{DistElement, GroupKind, Level, LevelContext, MultiIndex, Prime, Rational};
use common::rat;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn p_power(p: u64, v: i64) -> Rational {
    let base = Rational::from_integer(BigInt::from(p));
    if v >= 0 {
        num_traits::pow(base, v as usize)
    } else {
        num_traits::pow(base.recip(), (-v) as usize)
    }
}

fn ceil(x: &Rational) -> i64 {
    i64::try_from(x.ceil().to_integer()).unwrap()
}

/// A series with `v(a_k) = ceil(eta k) + c`, optionally pushed below the line at one degree.
fn family(p: u64, horizon: u64, eta: &Rational, c: i64, dent: Option<(u64, i64)>) -> TruncatedSeries {
    let ctx = LevelContext::new(p, Level::Infinite).unwrap();
    TruncatedSeries::from_fn(ctx, horizon, |k| {
        let mut v = ceil(&(eta * rat(k as i64))) + c;
        if let Some((d, drop)) = dent {
            if d == k {
                v -= drop;
            }
        }
        p_power(p, v) * rat(if k % 2 == 0 { 1 } else { -1 })
    })
}

fn slope() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec!["1/3", "1/2", "2/3", "1", "3/2", "2"]).prop_map(q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn certificate_and_profile_agree(
        p in prop::sample::select(vec![2u64, 3, 5]),
        eta in slope(),
        c in -2i64..=2,
        horizon in 8u64..=48,
        dent in prop::option::of((0u64..48, 1i64..=3)),
    ) {
        let s = family(p, horizon, &eta, c, dent).with_certificate(GrowthCertificate::new(eta.clone(), rat(c)).unwrap());
        let (alpha, beta) = s.certificate().unwrap().ord_bound();
        let fits = ord_profile_fits(&s, &alpha, &beta).unwrap();
        let verdict = dagger_classify(&s).unwrap();
        let refuted = matches!(verdict, DaggerVerdict::RefutedAtHorizon { .. });
        prop_assert_eq!(fits, !refuted, "{:?}", verdict);
        let dented = dent.is_some_and(|(d, _)| d <= horizon);
        prop_assert_eq!(refuted, dented);
        if let DaggerVerdict::RefutedAtHorizon { degree, .. } = verdict {
            prop_assert_eq!(degree, dent.unwrap().0);
        }
    }

    #[test]
    fn stepwise_conversion_equals_direct(p in prop::sample::select(vec![2u64, 3, 5]), m in 0u32..=3, coeffs in prop::collection::vec(-20i64..=20, 1..40)) {
        let ctx = LevelContext::finite(p, m).unwrap();
        let s = TruncatedSeries::from_fn(ctx, coeffs.len() as u64 - 1, |k| rat(coeffs[k as usize]));
        let mut stepwise = s.clone();
        for next in m + 1..=m + 3 {
            stepwise = stepwise.rebase(Level::Finite(next));
        }
        stepwise = stepwise.rebase(Level::Infinite);
        let direct = s.to_kostant();
        prop_assert_eq!(direct.terms().collect::<Vec<_>>(), stepwise.terms().collect::<Vec<_>>());
    }

    #[test]
    fn banach_norm_is_submultiplicative(
        p in prop::sample::select(vec![2u64, 3, 5]),
        a in prop::collection::vec((-3i64..=3, 1i64..=7), 1..10),
        b in prop::collection::vec((-3i64..=3, 1i64..=7), 1..10),
    ) {
        let ctx = LevelContext::new(p, Level::Infinite).unwrap();
        let g = GroupKind::Additive(1);
        let series = |v: &[(i64, i64)]| TruncatedSeries::from_fn(ctx, v.len() as u64 - 1, |k| {
            let (e, u) = v[k as usize];
            p_power(p, e) * rat(u)
        });
        let element = |s: &TruncatedSeries| {
            let mut u = DistElement::zero(g.clone(), ctx);
            for (k, c) in s.terms() {
                u = u.add(&DistElement::kostant_generator(g.clone(), ctx, "xi", k.entries()[0]).unwrap().scale(c)).unwrap();
            }
            u
        };
        let (sa, sb) = (series(&a), series(&b));
        let prod = element(&sa).mul(&element(&sb)).unwrap();
        let horizon = sa.horizon() + sb.horizon();
        let sp = TruncatedSeries::new(ctx, 1, horizon, prod.terms().map(|(k, c)| (k.n.clone(), c * Rational::from_integer(ctx.q_factorial(k.n.total()))))).unwrap();
        prop_assert!(banach_norm(&sp) <= banach_norm(&sa) * banach_norm(&sb));
    }

    #[test]
    fn json_round_trip(p in prop::sample::select(vec![2u64, 3]), coeffs in prop::collection::vec(-9i64..=9, 1..12)) {
        let ctx = LevelContext::new(p, Level::Infinite).unwrap();
        let s = TruncatedSeries::from_fn(ctx, coeffs.len() as u64 - 1, |k| rat(coeffs[k as usize]))
            .with_certificate(GrowthCertificate::new(q("1/2"), q("-3")).unwrap());
        let back = TruncatedSeries::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), s.to_json());
    }
}

#[test]
fn level_zero_coefficients_pick_up_factorials() {
    let ctx = LevelContext::finite(3, 0).unwrap();
    let s = TruncatedSeries::from_fn(ctx, 12, |_| Rational::one()).to_kostant();
    for k in 0..=12u32 {
        assert_eq!(s.coefficient(&MultiIndex::new(vec![k])).into_value(), Rational::from_integer(factorial(k as u64)));
    }
}

#[test]
fn indeterminate_outcomes() {
    let ctx = LevelContext::new(2, Level::Infinite).unwrap();
    let s = TruncatedSeries::from_fn(ctx, 4, |_| Rational::one());
    assert!(matches!(dagger_classify(&s).unwrap(), DaggerVerdict::Indeterminate { .. }));
    // v >= k/8 - 1 holds on the stored terms but says nothing at horizon 4
    let vacuous = TruncatedSeries::from_fn(ctx, 4, |k| p_power(2, k as i64)).with_certificate(GrowthCertificate::new(q("1/8"), q("-1")).unwrap());
    assert!(matches!(dagger_classify(&vacuous).unwrap(), DaggerVerdict::Indeterminate { .. }));
    assert!(GrowthCertificate::new(Rational::zero(), Rational::zero()).is_err());
    let finite = TruncatedSeries::from_fn(LevelContext::finite(2, 1).unwrap(), 4, |_| Rational::one());
    assert!(dagger_classify(&finite).is_err());
    let zero = TruncatedSeries::from_fn(ctx, 4, |_| Rational::zero());
    assert!(ord_profile(&zero, 4).unwrap().is_empty());
}

#[test]
fn level_gap_follows_legendre() {
    for p in [2u64, 3, 5] {
        let prime = Prime::new(p).unwrap();
        for m in 0..=2u32 {
            let table = phi_valuation_growth(m, Level::Infinite, 400, prime).unwrap();
            assert!(table.monotone && table.unbounded);
            let pm = p.pow(m);
            for &(k, v) in &table.rows {
                // q_k! is trivial at level infinity
                assert_eq!(v, factorial_valuation(k / pm, prime), "p = {p}, m = {m}, k = {k}");
            }
        }
        for m in 1..=3u32 {
            let cert = legendre_certificate(prime, m).unwrap();
            let table = phi_valuation_growth(0, Level::Finite(m), 400, prime).unwrap();
            for &(k, v) in &table.rows {
                assert!(rat(v as i64) >= cert.bound(k), "p = {p}, m = {m}, k = {k}");
            }
        }
        assert!(legendre_certificate(prime, 0).is_err());
        assert!(phi_valuation_growth(2, Level::Finite(1), 10, prime).is_err());
    }
}

#[test]
fn pairing_with_a_tate_truncation() {
    let ctx = LevelContext::new(3, Level::Infinite).unwrap();
    let s = TruncatedSeries::from_fn(ctx, 6, |k| p_power(3, k as i64));
    let f = PdPolynomial::from_terms(ctx, 1, 6, (0..=6u32).map(|k| (MultiIndex::new(vec![k]), p_power(3, -(k as i64)))))
        .unwrap();
    let r = ar_pairing_and_norm(&s, &f, &q("1/2")).unwrap();
    assert_eq!(r.value.into_value(), rat(7));
    // log sizes: -k + k/2 for the series, k - k/2 for the truncation
    let functional = r.functional_bound.unwrap();
    assert_eq!((functional.exponent.as_str(), functional.degree), ("0/1", 0));
    let tate = r.tate_norm.unwrap();
    assert_eq!((tate.exponent.as_str(), tate.degree), ("3/1", 6));
}
