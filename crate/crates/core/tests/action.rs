mod common;

use arithdist::action::{act, from_taylor, taylor, GroupFunction};
use arithdist::padic::binomial;
use arithdist::{DistElement, GroupKind, Level, LevelContext, Rational};
use common::{context, element, rat};
use num_traits::Zero;
use proptest::prelude::*;

fn pair(g: GroupKind) -> impl Strategy<Value = (DistElement, DistElement)> {
    context().prop_flat_map(move |ctx| (element(g.clone(), ctx, 4), element(g.clone(), ctx, 4)))
}

fn value(u: &DistElement, f: &GroupFunction) -> Rational {
    act(u, f).unwrap().into_value()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn additive_action_follows_the_coproduct((u, v) in pair(GroupKind::Additive(1)), j in 0i64..=8) {
        let g = GroupKind::Additive(1);
        let lhs = value(&u.mul(&v).unwrap(), &GroupFunction::power(g.clone(), j).unwrap());
        let mut rhs = Rational::zero();
        for i in 0..=j {
            let c = Rational::from_integer(binomial(j as u64, i as u64));
            rhs += c * value(&u, &GroupFunction::power(g.clone(), i).unwrap())
                * value(&v, &GroupFunction::power(g.clone(), j - i).unwrap());
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplicative_characters_are_grouplike((u, v) in pair(GroupKind::Multiplicative(1)), j in -6i64..=8) {
        let f = GroupFunction::power(GroupKind::Multiplicative(1), j).unwrap();
        prop_assert_eq!(value(&u.mul(&v).unwrap(), &f), value(&u, &f) * value(&v, &f));
    }

    #[test]
    fn taylor_data_of_integral_functions_is_integral(
        ctx in context(),
        coeffs in prop::collection::vec((-4i64..=6, -9i64..=9), 1..5),
    ) {
        let f = GroupFunction::new(GroupKind::Multiplicative(1), coeffs.into_iter().map(|(e, c)| (vec![e], rat(c)))).unwrap();
        prop_assert!(taylor(&f, 8, ctx).unwrap().is_integral());
    }

    #[test]
    fn taylor_round_trip(p in prop::sample::select(vec![2u64, 3, 5]), coeffs in prop::collection::vec((0i64..=6, -9i64..=9), 1..5)) {
        let ctx = LevelContext::new(p, Level::Infinite).unwrap();
        for g in [GroupKind::Additive(1), GroupKind::Multiplicative(1)] {
            let f = GroupFunction::new(g.clone(), coeffs.iter().map(|&(e, c)| (vec![e], rat(c)))).unwrap();
            let back = from_taylor(g, &taylor(&f, 6, ctx).unwrap()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}

#[test]
fn additive_functions_reject_poles() {
    assert!(GroupFunction::power(GroupKind::Additive(1), -1).is_err());
    assert!(GroupFunction::power(GroupKind::Multiplicative(1), -1).is_ok());
}

#[test]
fn json_round_trip() {
    let g = GroupKind::Product(vec![GroupKind::Additive(1), GroupKind::Multiplicative(1)]);
    let f = GroupFunction::new(g, [(vec![2, -1], rat(3)), (vec![0, 4], rat(-1))]).unwrap();
    assert_eq!(GroupFunction::from_json(&f.to_json()).unwrap(), f);
}
