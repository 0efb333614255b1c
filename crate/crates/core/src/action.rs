//! Functions on `G_a^N` and `G_m^N` and the action of distributions on them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::coalgebra::PdPolynomial;
use crate::dist::enveloping::accumulate;
use crate::dist::{write_linear_combination, DistElement};
use crate::error::{Error, Result};
use crate::group::{CoordinateKind, GroupKind};
use crate::padic::{binomial_signed, parse_rational, rational_to_string, LevelContext, MultiIndex, Rational, ValuedRational};

/// A (Laurent) polynomial in `T_1..T_N` on a product of additive and
/// multiplicative factors. Coordinates follow the flattened PBW order.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction {
    group: GroupKind,
    kinds: Vec<CoordinateKind>,
    terms: BTreeMap<Vec<i64>, Rational>,
}

impl GroupFunction {
    pub fn new(group: GroupKind, terms: impl IntoIterator<Item = (Vec<i64>, Rational)>) -> Result<Self> {
        let kinds = group
            .coordinate_kinds()
            .ok_or_else(|| Error::UnsupportedGroup(group.to_string()))?;
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != kinds.len() {
                return Err(Error::LengthMismatch(kinds.len(), e.len()));
            }
            for (&x, k) in e.iter().zip(&kinds) {
                if x < 0 && *k == CoordinateKind::Additive {
                    return Err(Error::Malformed("negative exponent on an additive coordinate".into()));
                }
            }
            accumulate(&mut out, e, c);
        }
        Ok(GroupFunction { group, kinds, terms: out })
    }

    /// `T^j` on a rank-one group.
    pub fn power(group: GroupKind, j: i64) -> Result<Self> {
        Self::new(group, [(vec![j], Rational::one())])
    }

    pub fn group(&self) -> &GroupKind {
        &self.group
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::ContextMismatch("functions on different groups".into()));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            accumulate(&mut out.terms, e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).filter(|(_, v)| !v.is_zero()).collect();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::ContextMismatch("functions on different groups".into()));
        }
        let mut out = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                accumulate(&mut out, e, ca * cb);
            }
        }
        Ok(GroupFunction { group: self.group.clone(), kinds: self.kinds.clone(), terms: out })
    }

    /// `f(identity)`.
    pub fn at_identity(&self) -> Rational {
        self.terms
            .iter()
            .filter(|(e, _)| e.iter().zip(&self.kinds).all(|(&x, k)| x == 0 || *k == CoordinateKind::Multiplicative))
            .map(|(_, c)| c.clone())
            .sum()
    }

    pub fn is_integral(&self, ctx: &LevelContext) -> bool {
        self.terms.values().all(|c| crate::padic::is_p_integral(c, ctx.p))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group.to_json(),
            "terms": self.terms.iter().map(|(e, c)| json!({"exp": e, "coeff": rational_to_string(c)})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let group = GroupKind::from_json(v.get("group").ok_or_else(|| Error::Malformed("missing `group`".into()))?)?;
        let mut terms = Vec::new();
        for t in v.get("terms").and_then(Value::as_array).into_iter().flatten() {
            let e: Vec<i64> = serde_json::from_value(t.get("exp").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Malformed(e.to_string()))?;
            let c = t.get("coeff").and_then(Value::as_str).ok_or_else(|| Error::Malformed("missing `coeff`".into()))?;
            terms.push((e, parse_rational(c)?));
        }
        Self::new(group, terms)
    }
}

impl fmt::Display for GroupFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.kinds.len();
        let var = |i: usize| if n == 1 { "T".to_string() } else { format!("T_{}", i + 1) };
        write_linear_combination(
            f,
            self.terms.iter().map(|(e, c)| (e.clone(), c.clone())),
            |f, e| {
                let mut first = true;
                for (i, &x) in e.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    if x == 1 {
                        write!(f, "{}", var(i))?;
                    } else {
                        write!(f, "{}^{x}", var(i))?;
                    }
                }
                Ok(!first)
            },
            |e| e.iter().all(|&x| x == 0),
        )
    }
}

/// `<xi^<k>, T^j>` per coordinate: `q_k! C(j, k)` evaluated at the identity.
fn basis_pairing(ctx: &LevelContext, kind: CoordinateKind, k: u32, j: i64) -> BigInt {
    match kind {
        CoordinateKind::Additive => {
            if j == k as i64 {
                ctx.q_factorial(k as u64)
            } else {
                BigInt::zero()
            }
        }
        CoordinateKind::Multiplicative => ctx.q_factorial(k as u64) * binomial_signed(j, k as u64),
    }
}

/// `u(f)`: the distribution paired with the Taylor coefficients of `f` at the identity.
pub fn act(u: &DistElement, f: &GroupFunction) -> Result<ValuedRational> {
    if u.group() != f.group() {
        return Err(Error::ContextMismatch(format!("{} acting on a function on {}", u.group(), f.group())));
    }
    let ctx = *u.ctx();
    let mut total = Rational::zero();
    for (key, c) in u.terms() {
        let k = key.flat();
        for (e, d) in &f.terms {
            let mut v = BigInt::one();
            for ((&ki, &ji), kind) in k.iter().zip(e).zip(&f.kinds) {
                v *= basis_pairing(&ctx, *kind, ki, ji);
                if v.is_zero() {
                    break;
                }
            }
            if !v.is_zero() {
                total += c * d * Rational::from_integer(v);
            }
        }
    }
    Ok(ValuedRational::new(total, ctx.p))
}

/// `sum_{|k| <= n} <xi^<k>, f> t^{k}`.
pub fn taylor(f: &GroupFunction, n: u64, ctx: LevelContext) -> Result<PdPolynomial> {
    let rank = f.kinds.len();
    let mut terms = Vec::new();
    for k in multi_indices(rank, n) {
        let mut c = Rational::zero();
        for (e, d) in &f.terms {
            let mut v = BigInt::one();
            for ((&ki, &ji), kind) in k.iter().zip(e).zip(&f.kinds) {
                v *= basis_pairing(&ctx, *kind, ki, ji);
            }
            c += d * Rational::from_integer(v);
        }
        terms.push((MultiIndex::new(k), c));
    }
    PdPolynomial::from_terms(ctx, rank, n, terms)
}

/// Rebuilds a function from Taylor data taken at `m = inf`, where `t^{k} = t^k`
/// and `t = T` (additive) or `t = T - 1` (multiplicative).
pub fn from_taylor(group: GroupKind, data: &PdPolynomial) -> Result<GroupFunction> {
    let kinds = group
        .coordinate_kinds()
        .ok_or_else(|| Error::UnsupportedGroup(group.to_string()))?;
    if data.ctx().m != crate::padic::Level::Infinite {
        return Err(Error::ContextMismatch("reconstruction needs Taylor data at level inf".into()));
    }
    let mut out = GroupFunction::new(group.clone(), [])?;
    for (k, c) in data.terms() {
        let mut term = GroupFunction::new(group.clone(), [(vec![0; kinds.len()], c.clone())])?;
        for (i, (&ki, kind)) in k.iter().zip(&kinds).enumerate() {
            let mut unit = vec![0i64; kinds.len()];
            unit[i] = 1;
            let t = match kind {
                CoordinateKind::Additive => GroupFunction::new(group.clone(), [(unit, Rational::one())])?,
                CoordinateKind::Multiplicative => GroupFunction::new(
                    group.clone(),
                    [(unit, Rational::one()), (vec![0; kinds.len()], -Rational::one())],
                )?,
            };
            for _ in 0..ki {
                term = term.mul(&t)?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

pub(crate) fn multi_indices(rank: usize, n: u64) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for v in &out {
            let used: u64 = v.iter().map(|&x| x as u64).sum();
            for k in 0..=(n - used) {
                let mut w = v.clone();
                w.push(k as u32);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Level;

    fn ctx(p: u64, m: u32) -> LevelContext {
        LevelContext::finite(p, m).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    #[test]
    fn act_examples() {
        let ga = GroupKind::Additive(1);
        let c = ctx(2, 1);
        let f = GroupFunction::power(ga.clone(), 2).unwrap();
        assert_eq!(act(&DistElement::xi(ga.clone(), c, 2).unwrap(), &f).unwrap().value(), &r(1));
        let g = GroupFunction::new(ga.clone(), [(vec![0], r(5)), (vec![3], r(2))]).unwrap();
        assert_eq!(act(&DistElement::one(ga, c), &g).unwrap().value(), &r(5));
        let gm = GroupKind::Multiplicative(1);
        let t = GroupFunction::power(gm.clone(), 1).unwrap();
        assert_eq!(act(&DistElement::xi(gm.clone(), c, 1).unwrap(), &t).unwrap().value(), &r(1));
        let inv = GroupFunction::power(gm.clone(), -1).unwrap();
        assert_eq!(act(&DistElement::one(gm.clone(), c), &inv).unwrap().value(), &r(1));
        assert_eq!(act(&DistElement::xi(gm, c, 1).unwrap(), &inv).unwrap().value(), &r(-1));
    }

    #[test]
    fn taylor_examples() {
        let ga = GroupKind::Additive(1);
        let t = taylor(&GroupFunction::power(ga.clone(), 1).unwrap(), 1, ctx(2, 1)).unwrap();
        assert_eq!(t.coefficient(&MultiIndex::new(vec![1])).value(), &r(1));
        assert!(t.coefficient(&MultiIndex::new(vec![0])).is_zero());
        let t2 = taylor(&GroupFunction::power(ga, 2).unwrap(), 2, ctx(2, 1)).unwrap();
        assert_eq!(t2.coefficient(&MultiIndex::new(vec![2])).value(), &r(1));
        let gm = GroupKind::Multiplicative(1);
        let tt = taylor(&GroupFunction::power(gm, 1).unwrap(), 2, ctx(2, 1)).unwrap();
        assert_eq!(tt.terms().count(), 2);
        assert_eq!(tt.coefficient(&MultiIndex::new(vec![0])).value(), &r(1));
        assert_eq!(tt.coefficient(&MultiIndex::new(vec![1])).value(), &r(1));
    }

    #[test]
    fn reconstruction_is_exact() {
        let inf = LevelContext::new(3, Level::Infinite).unwrap();
        let g: GroupKind = "product:Ga:1,Gm:1".parse().unwrap();
        let f = GroupFunction::new(g.clone(), [(vec![2, 3], r(4)), (vec![1, 0], r(-1)), (vec![0, 1], r(7))]).unwrap();
        let data = taylor(&f, 5, inf).unwrap();
        assert_eq!(from_taylor(g, &data).unwrap(), f);
    }

    #[test]
    fn display() {
        let gm = GroupKind::Multiplicative(1);
        let f = GroupFunction::new(gm, [(vec![-1], r(2)), (vec![0], r(1)), (vec![3], r(-1))]).unwrap();
        assert_eq!(f.to_string(), "2*T^-1 + 1 - T^3");
    }
}
