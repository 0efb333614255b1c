#![allow(dead_code)]

use arithdist::{DistElement, GroupKind, Level, LevelContext, MultiIndex, PbwKey, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn level() -> impl Strategy<Value = Level> {
    prop_oneof![(0u32..=3).prop_map(Level::Finite), Just(Level::Infinite)]
}

pub fn context() -> impl Strategy<Value = LevelContext> {
    (prop::sample::select(vec![2u64, 3, 5]), level()).prop_map(|(p, m)| LevelContext::new(p, m).unwrap())
}

/// A PBW key for `group` whose total degree is at most `n`.
pub fn key(group: &GroupKind, n: u32) -> impl Strategy<Value = PbwKey> {
    let (a, b, c) = group.slot_lengths();
    prop::collection::vec(0..=n, a + b + c)
        .prop_filter("degree bound", move |v| v.iter().sum::<u32>() <= n)
        .prop_map(move |v| {
            PbwKey::new(
                MultiIndex::new(v[..a].to_vec()),
                MultiIndex::new(v[a..a + b].to_vec()),
                MultiIndex::new(v[a + b..].to_vec()),
            )
        })
}

/// A nonzero integral combination of up to three basis elements.
pub fn element(group: GroupKind, ctx: LevelContext, n: u32) -> impl Strategy<Value = DistElement> {
    prop::collection::vec((key(&group, n), (-4i64..=4).prop_filter("nonzero", |x| *x != 0)), 1..=3)
        .prop_map(move |terms| {
            DistElement::from_terms(group.clone(), ctx, terms.into_iter().map(|(k, c)| (k, rat(c)))).unwrap()
        })
        .prop_filter("nonzero", |u| !u.is_zero())
}

pub fn commutative_groups() -> impl Strategy<Value = GroupKind> {
    prop_oneof![
        Just(GroupKind::Additive(1)),
        Just(GroupKind::Multiplicative(1)),
        Just(GroupKind::Additive(2)),
        Just(GroupKind::Product(vec![GroupKind::Additive(1), GroupKind::Multiplicative(1)])),
    ]
}
