//! Truncated divided-power algebras `P^n_(m)` of the additive and
//! multiplicative groups, their comultiplication, and the duality pairing
//! with distributions.
//!
//! For `G_m` the coordinate is `tau = T - 1`. For products, exponents are
//! flattened in the order of `PbwKey::flat` (additive coordinates first).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::dist::enveloping::accumulate;
use crate::dist::{ctx_from_json, DistElement, PbwKey};
use crate::error::{Error, Result};
use crate::group::{CoordinateKind, GroupKind};
use crate::padic::{parse_rational, rational_to_string, LevelContext, MultiIndex, Rational, ValuedRational};

/// A truncated divided-power polynomial `sum a_k t^{k}` with `|k| <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct PdPolynomial {
    ctx: LevelContext,
    rank: usize,
    order: u64,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl PdPolynomial {
    pub fn zero(ctx: LevelContext, rank: usize, order: u64) -> Self {
        PdPolynomial { ctx, rank, order, terms: BTreeMap::new() }
    }

    /// Terms beyond the order bound are dropped.
    pub fn from_terms(
        ctx: LevelContext,
        rank: usize,
        order: u64,
        terms: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Result<Self> {
        let mut out = Self::zero(ctx, rank, order);
        for (k, c) in terms {
            if k.len() != rank {
                return Err(Error::LengthMismatch(rank, k.len()));
            }
            if k.total() <= order {
                accumulate(&mut out.terms, k, c);
            }
        }
        Ok(out)
    }

    /// The single monomial `t^{k}`.
    pub fn monomial(ctx: LevelContext, order: u64, k: MultiIndex) -> Result<Self> {
        let rank = k.len();
        Self::from_terms(ctx, rank, order, [(k, Rational::one())])
    }

    pub fn ctx(&self) -> &LevelContext {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: &MultiIndex) -> ValuedRational {
        ValuedRational::new(self.terms.get(k).cloned().unwrap_or_else(Rational::zero), self.ctx.p)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| crate::padic::is_p_integral(c, self.ctx.p))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx || self.rank != other.rank || self.order != other.order {
            return Err(Error::ContextMismatch(format!(
                "P^{}({}) of rank {} vs P^{}({}) of rank {}",
                self.order, self.ctx, self.rank, other.order, other.ctx, other.rank
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            accumulate(&mut out.terms, k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c));
        Self::from_terms(self.ctx, self.rank, self.order, terms).expect("same rank")
    }

    /// `t^{k'} t^{k''} = ac(k'+k'', k') t^{k'+k''}`, truncated at the order bound.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.ctx, self.rank, self.order);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.total() + b.total() > self.order {
                    continue;
                }
                let sum = a.add(b);
                let coeff: BigInt = sum
                    .iter()
                    .zip(a.iter())
                    .map(|(&s, &x)| self.ctx.ac_int(s as u64, x as u64))
                    .product();
                accumulate(&mut out.terms, sum, ca * cb * Rational::from_integer(coeff));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.ctx.p.get(),
            "m": serde_json::to_value(self.ctx.m).unwrap(),
            "rank": self.rank,
            "order": self.order,
            "terms": self.terms.iter().map(|(k, c)| json!({"exp": k, "coeff": rational_to_string(c)})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ctx = ctx_from_json(v)?;
        let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(|| Error::Malformed("missing `rank`".into()))?;
        let order = v.get("order").and_then(Value::as_u64).ok_or_else(|| Error::Malformed("missing `order`".into()))?;
        let mut terms = Vec::new();
        for t in v.get("terms").and_then(Value::as_array).into_iter().flatten() {
            let exp: MultiIndex = serde_json::from_value(t.get("exp").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Malformed(e.to_string()))?;
            let coeff = t.get("coeff").and_then(Value::as_str).ok_or_else(|| Error::Malformed("missing `coeff`".into()))?;
            terms.push((exp, parse_rational(coeff)?));
        }
        Self::from_terms(ctx, rank as usize, order, terms)
    }
}

/// `(x+y)^{k} = sum cro(k, k') x^{k'} y^{k''}` as `(k', k'', coefficient)`.
pub fn pd_sum_expand(k: u64, ctx: &LevelContext) -> Vec<(u64, u64, ValuedRational)> {
    (0..=k)
        .rev()
        .map(|a| (a, k - a, ValuedRational::new(ctx.cro_rat(k, a), ctx.p)))
        .collect()
}

/// A tensor `sum c . t^{alpha} (x) t^{beta}`.
pub type Tensor = Vec<(MultiIndex, MultiIndex, Rational)>;

/// `delta^{n,n'}(t^{k})` for `G_a^N`.
pub fn comul_additive(k: &MultiIndex, n: u64, n1: u64, ctx: &LevelContext) -> Tensor {
    let mut acc: Vec<(Vec<u32>, Vec<u32>, Rational)> = vec![(vec![], vec![], Rational::one())];
    for &ki in k.iter() {
        let mut next = Vec::new();
        for (l, r, c) in &acc {
            for a in 0..=ki {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2.push(a);
                r2.push(ki - a);
                next.push((l2, r2, c * ctx.cro_rat(ki as u64, a as u64)));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(l, r, c)| (MultiIndex::new(l), MultiIndex::new(r), c))
        .filter(|(l, r, _)| l.total() <= n && r.total() <= n1)
        .collect()
}

/// `delta^{n,n'}(tau^{l})` for `G_m` from `mu(tau) = x + y`, `x = tau(x)1 + 1(x)tau`,
/// `y = tau (x) tau`: the divided power of the sum is expanded term by term.
pub fn comul_multiplicative(l: u64, n: u64, n1: u64, ctx: &LevelContext) -> Tensor {
    let mut out: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for (r, j, c_outer) in pd_sum_expand(l, ctx) {
        // y^{j} = q_j! tau^{j} (x) tau^{j}
        let y_coeff = Rational::from_integer(ctx.q_factorial(j));
        for (s, t, c_inner) in pd_sum_expand(r, ctx) {
            // x^{r} contributes tau^{s} (x) tau^{t}; multiply by tau^{j} on both sides
            let left = s + j;
            let right = t + j;
            let c = c_outer.value()
                * c_inner.value()
                * &y_coeff
                * Rational::from_integer(ctx.ac_int(left, s) * ctx.ac_int(right, t));
            accumulate(&mut out, (left as u32, right as u32), c);
        }
    }
    out.into_iter()
        .filter(|((a, b), _)| (*a as u64) <= n && (*b as u64) <= n1)
        .map(|((a, b), c)| (MultiIndex::new(vec![a]), MultiIndex::new(vec![b]), c))
        .collect()
}

/// The coefficient of `tau^{s+l-r} (x) tau^{l-s}` in `mu(tau^{l})`, summed over
/// the pairs `(r, s)` producing that bidegree, written as a single product.
pub fn comul_multiplicative_compressed(l: u64, ctx: &LevelContext) -> BTreeMap<(u32, u32), Rational> {
    let mut out = BTreeMap::new();
    for r in 0..=l {
        for s in 0..=r {
            let c = ctx.cro_rat(l, r)
                * ctx.cro_rat(r, s)
                * Rational::from_integer(
                    ctx.q_factorial(l - r) * ctx.ac_int(s + l - r, s) * ctx.ac_int(l - s, r - s),
                );
            accumulate(&mut out, ((s + l - r) as u32, (l - s) as u32), c);
        }
    }
    out
}

type CoefficientTable = HashMap<(u32, u32), Rational>;

/// Cached `delta(t^{k})` per coordinate, as a map from bidegree to coefficient.
fn coordinate_comul(ctx: &LevelContext, kind: CoordinateKind, k: u32) -> Arc<CoefficientTable> {
    static CACHE: OnceLock<Mutex<HashMap<(LevelContext, bool, u32), Arc<CoefficientTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (*ctx, kind == CoordinateKind::Additive, k);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let tensor = match kind {
        CoordinateKind::Additive => comul_additive(&MultiIndex::new(vec![k]), k as u64, k as u64, ctx),
        CoordinateKind::Multiplicative => comul_multiplicative(k as u64, k as u64, k as u64, ctx),
    };
    let table: CoefficientTable = tensor
        .into_iter()
        .map(|(a, b, c)| ((a.entries()[0], b.entries()[0]), c))
        .collect();
    let table = Arc::new(table);
    cache.lock().unwrap().insert(key, table.clone());
    table
}

fn coordinate_kinds(group: &GroupKind) -> Result<Vec<CoordinateKind>> {
    group
        .coordinate_kinds()
        .ok_or_else(|| Error::UnsupportedGroup(format!("{group} has no implemented comultiplication")))
}

/// `<u, f>`: the dual bases `xi^<k>` and `t^{k}` pair to the Kronecker delta.
pub fn pair(u: &DistElement, f: &PdPolynomial) -> Result<ValuedRational> {
    let kinds = coordinate_kinds(u.group())?;
    if u.ctx() != f.ctx() || kinds.len() != f.rank() {
        return Err(Error::ContextMismatch("distribution and polynomial live over different groups".into()));
    }
    let mut total = Rational::zero();
    for (k, c) in u.terms() {
        let exp = MultiIndex::new(k.flat());
        if let Some(d) = f.terms.get(&exp) {
            total += c * d;
        }
    }
    Ok(ValuedRational::new(total, u.ctx().p))
}

/// `u . v` computed as `(u (x) v) o delta` on each dual basis monomial.
pub fn mul_via_comul(u: &DistElement, v: &DistElement) -> Result<DistElement> {
    if u.group() != v.group() || u.ctx() != v.ctx() {
        return Err(Error::ContextMismatch("operands of different algebras".into()));
    }
    let kinds = coordinate_kinds(u.group())?;
    let ctx = *u.ctx();
    let lens = u.group().slot_lengths();
    let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    for (ka, ca) in u.terms() {
        let fa = ka.flat();
        for (kb, cb) in v.terms() {
            let fb = kb.flat();
            // per coordinate: the targets k_i whose coproduct hits (a_i, b_i)
            let mut acc: Vec<(Vec<u32>, Rational)> = vec![(vec![], ca * cb)];
            for ((&a, &b), kind) in fa.iter().zip(&fb).zip(&kinds) {
                let range = match kind {
                    CoordinateKind::Additive => (a + b)..=(a + b),
                    CoordinateKind::Multiplicative => a.max(b)..=(a + b),
                };
                let mut next = Vec::new();
                for k in range {
                    let table = coordinate_comul(&ctx, *kind, k);
                    if let Some(c) = table.get(&(a, b)) {
                        for (e, d) in &acc {
                            let mut e2 = e.clone();
                            e2.push(k);
                            next.push((e2, d * c));
                        }
                    }
                }
                acc = next;
            }
            for (e, c) in acc {
                accumulate(&mut out, e, c);
            }
        }
    }
    DistElement::from_terms(
        u.group().clone(),
        ctx,
        out.into_iter().map(|(e, c)| (PbwKey::from_flat(&e, lens), c)),
    )
}
