//! Level-`m` differential operators `sum a_{jk} t^j d^<k>` on one-dimensional
//! charts, and the map `Q` from distributions to invariant operators.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::dist::enveloping::accumulate;
use crate::dist::{ctx_from_json, write_linear_combination, DistElement, PbwKey};
use crate::error::{Error, Result};
use crate::group::GroupKind;
use crate::linalg;
use crate::padic::{
    binomial_signed, factorial, is_p_integral, parse_rational, rational_to_string, valuation, Level, LevelContext,
    MultiIndex, Rational,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    /// `Spec Z_p[t]`, the additive group; identity `t = 0`.
    AffineLine,
    /// `Spec Z_p[T, 1/T]`, the multiplicative group; identity `T = 1`.
    Torus,
    /// The standard charts of the projective line, `t_1 = 1/t_0`.
    P1(u8),
}

impl Chart {
    pub fn coordinate(&self) -> &'static str {
        match self {
            Chart::AffineLine | Chart::P1(0) => "t",
            Chart::Torus => "T",
            Chart::P1(_) => "s",
        }
    }

    pub fn allows_poles(&self) -> bool {
        !matches!(self, Chart::AffineLine)
    }

    pub fn other(&self) -> Chart {
        match self {
            Chart::P1(i) => Chart::P1(1 - i),
            c => *c,
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::AffineLine => write!(f, "A1"),
            Chart::Torus => write!(f, "Gm"),
            Chart::P1(i) => write!(f, "P1:{i}"),
        }
    }
}

impl FromStr for Chart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A1" | "Ga" => Ok(Chart::AffineLine),
            "Gm" | "T" | "Torus" => Ok(Chart::Torus),
            "P1:0" | "P1" => Ok(Chart::P1(0)),
            "P1:1" => Ok(Chart::P1(1)),
            _ => Err(Error::Malformed(format!("unknown chart `{s}`"))),
        }
    }
}

/// A Laurent polynomial on a chart, as exponent -> coefficient.
pub type ChartFunction = BTreeMap<i64, Rational>;

/// `sum a_{jk} t^j d^<k>` with coefficients to the left of the derivations.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOp {
    ctx: LevelContext,
    chart: Chart,
    /// keyed by `(k, j)` so terms list by derivation order first
    terms: BTreeMap<(u32, i64), Rational>,
}

impl DiffOp {
    pub fn zero(ctx: LevelContext, chart: Chart) -> Self {
        DiffOp { ctx, chart, terms: BTreeMap::new() }
    }

    pub fn from_terms(ctx: LevelContext, chart: Chart, terms: impl IntoIterator<Item = (i64, u32, Rational)>) -> Result<Self> {
        let mut out = Self::zero(ctx, chart);
        for (j, k, c) in terms {
            if j < 0 && !chart.allows_poles() {
                return Err(Error::Malformed(format!("negative power t^{j} on the affine line")));
            }
            accumulate(&mut out.terms, (k, j), c);
        }
        Ok(out)
    }

    /// `c t^j d^<k>`.
    pub fn monomial(ctx: LevelContext, chart: Chart, j: i64, k: u32, c: Rational) -> Result<Self> {
        Self::from_terms(ctx, chart, [(j, k, c)])
    }

    pub fn derivation(ctx: LevelContext, chart: Chart, k: u32) -> Self {
        Self::monomial(ctx, chart, 0, k, Rational::one()).expect("no poles")
    }

    pub fn constant(ctx: LevelContext, chart: Chart, c: Rational) -> Self {
        Self::monomial(ctx, chart, 0, 0, c).expect("no poles")
    }

    pub fn ctx(&self) -> &LevelContext {
        &self.ctx
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// `(j, k, a_{jk})`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u32, &Rational)> {
        self.terms.iter().map(|(&(k, j), c)| (j, k, c))
    }

    pub fn coefficient(&self, j: i64, k: u32) -> Rational {
        self.terms.get(&(k, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(k, _)| k).max()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| is_p_integral(c, self.ctx.p))
    }

    pub fn min_valuation(&self) -> Option<i64> {
        self.terms.values().filter_map(|c| valuation(c, self.ctx.p)).min()
    }

    /// No negative powers of the coordinate.
    pub fn is_pole_free(&self) -> bool {
        self.terms.keys().all(|&(_, j)| j >= 0)
    }

    /// The constant `c` when the operator is multiplication by `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.chart != other.chart || self.ctx != other.ctx {
            return Err(Error::ContextMismatch(format!(
                "operators on {} ({}) and {} ({})",
                self.chart, self.ctx, other.chart, other.ctx
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (key, c) in &other.terms {
            accumulate(&mut out.terms, *key, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.ctx, self.chart);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(k, v)| (*k, v * c)).collect();
        }
        out
    }

    /// `self o other`, using `d^<k> o f = sum ac(k, k1) d^<k1>(f) d^<k2>`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let ctx = &self.ctx;
        let mut out = BTreeMap::new();
        for (&(k, j), a) in &self.terms {
            for (&(k1, j1), b) in &other.terms {
                let ab = a * b;
                for d in 0..=k {
                    let coeff = ctx.ac_int(k as u64, d as u64) * ctx.q_factorial(d as u64) * binomial_signed(j1, d as u64);
                    if coeff.is_zero() {
                        continue;
                    }
                    let rest = k - d;
                    let c = &ab * Rational::from_integer(coeff) * ctx.cro_rat((rest + k1) as u64, rest as u64);
                    accumulate(&mut out, (rest + k1, j + j1 - d as i64), c);
                }
            }
        }
        Ok(DiffOp { ctx: self.ctx, chart: self.chart, terms: out })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut out = Self::constant(self.ctx, self.chart, Rational::one());
        for _ in 0..e {
            out = out.compose(self)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// `P(f)` with `d^<k>(t^j) = q_k! C(j, k) t^{j-k}`.
    pub fn apply(&self, f: &ChartFunction) -> Result<ChartFunction> {
        let mut out = ChartFunction::new();
        for (&(k, j), a) in &self.terms {
            for (&e, c) in f {
                if e < 0 && !self.chart.allows_poles() {
                    return Err(Error::Malformed("negative power on the affine line".into()));
                }
                let v = self.ctx.q_factorial(k as u64) * binomial_signed(e, k as u64);
                if !v.is_zero() {
                    accumulate(&mut out, j + e - k as i64, a * c * Rational::from_integer(v));
                }
            }
        }
        Ok(out)
    }

    /// The same operator written at another level.
    pub fn rebase(&self, target: Level) -> Self {
        let dest = self.ctx.with_level(target);
        let mut out = Self::zero(dest, self.chart);
        for (&(k, j), c) in &self.terms {
            let f = Rational::new(self.ctx.q_factorial(k as u64), dest.q_factorial(k as u64));
            out.terms.insert((k, j), c * f);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "chart": self.chart.to_string(),
            "p": self.ctx.p.get(),
            "m": serde_json::to_value(self.ctx.m).unwrap(),
            "terms": self.terms.iter().map(|(&(k, j), c)| json!({"j": j, "k": k, "coeff": rational_to_string(c)})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let chart: Chart = v
            .get("chart")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Malformed("missing `chart`".into()))?
            .parse()?;
        let ctx = ctx_from_json(v)?;
        let mut terms = Vec::new();
        for t in v.get("terms").and_then(Value::as_array).into_iter().flatten() {
            let j = t.get("j").and_then(Value::as_i64).ok_or_else(|| Error::Malformed("missing `j`".into()))?;
            let k = t.get("k").and_then(Value::as_u64).ok_or_else(|| Error::Malformed("missing `k`".into()))?;
            let c = t.get("coeff").and_then(Value::as_str).ok_or_else(|| Error::Malformed("missing `coeff`".into()))?;
            terms.push((j, k as u32, parse_rational(c)?));
        }
        Self::from_terms(ctx, chart, terms)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.chart.coordinate();
        let inf = self.ctx.m == Level::Infinite;
        write_linear_combination(
            f,
            self.terms.iter().map(|(&key, c)| (key, c.clone())),
            |f, &(k, j)| {
                let mut wrote = false;
                if j != 0 {
                    if j == 1 {
                        write!(f, "{var}")?;
                    } else {
                        write!(f, "{var}^{j}")?;
                    }
                    wrote = true;
                }
                if k != 0 {
                    if wrote {
                        write!(f, "*")?;
                    }
                    match (k, inf) {
                        (1, _) => write!(f, "d")?,
                        (_, false) => write!(f, "d<{k}>")?,
                        (_, true) => write!(f, "d[{k}]")?,
                    }
                    wrote = true;
                }
                Ok(wrote)
            },
            |&(k, j)| k == 0 && j == 0,
        )
    }
}

/// `t, s` transition: substitutes `t = 1/s`, `d_t = -s^2 d_s` and conjugates by
/// `s^lambda`, so that sections of `O(lambda)` glue via `g = s^lambda f`.
pub fn chart_transform(op: &DiffOp, lambda: i64) -> Result<DiffOp> {
    let Chart::P1(i) = op.chart else {
        return Err(Error::Malformed(format!("chart {} has no transition", op.chart)));
    };
    let ctx = op.ctx;
    let target = Chart::P1(1 - i);
    let mono = |j: i64, k: u32, c: Rational| DiffOp::monomial(ctx, target, j, k, c);
    // -s^2 d_s, and its powers rescaled to divided powers
    let e = mono(2, 1, -Rational::one())?;
    let top = op.order().unwrap_or(0);
    let mut powers = Vec::with_capacity(top as usize + 1);
    let mut acc = DiffOp::constant(ctx, target, Rational::one());
    for k in 0..=top {
        if k > 0 {
            acc = acc.compose(&e)?;
        }
        let scale = Rational::new(ctx.q_factorial(k as u64), factorial(k as u64));
        powers.push(acc.scale(&scale));
    }
    let mut substituted = DiffOp::zero(ctx, target);
    for (j, k, c) in op.terms() {
        let term = mono(-j, 0, c.clone())?.compose(&powers[k as usize])?;
        substituted = substituted.add(&term)?;
    }
    if lambda == 0 {
        return Ok(substituted);
    }
    let left = mono(lambda, 0, Rational::one())?;
    let right = mono(-lambda, 0, Rational::one())?;
    left.compose(&substituted)?.compose(&right)
}

/// Images of `e, h, f` in chart 0 of the projective line, twisted by `O(lambda)`.
pub(crate) fn sl2_generator_images(ctx: LevelContext, lambda: i64) -> [DiffOp; 3] {
    let c = Chart::P1(0);
    let l = Rational::from_integer(BigInt::from(lambda));
    let mono = |j, k, v: Rational| DiffOp::monomial(ctx, c, j, k, v).expect("no poles");
    let two = Rational::from_integer(BigInt::from(2));
    let e = mono(0, 1, -Rational::one());
    let h = mono(1, 1, two).sub(&mono(0, 0, l.clone())).unwrap();
    let f = mono(2, 1, Rational::one()).sub(&mono(1, 0, l)).unwrap();
    [e, h, f]
}

/// `Q(u)` on the chart. For the projective line the result is written in the
/// requested chart.
pub fn qmap(u: &DistElement, chart: Chart) -> Result<DiffOp> {
    qmap_twisted(u, chart, 0)
}

/// `Q(u)` together with an integrality verdict; a non-integral image is
/// reported, never passed off as an element of the integral lattice.
#[derive(Clone, Debug, PartialEq)]
pub enum QmapImage {
    Integral(DiffOp),
    NonIntegral(DiffOp),
}

pub fn qmap_checked(u: &DistElement, chart: Chart) -> Result<QmapImage> {
    let op = qmap(u, chart)?;
    Ok(if op.is_integral() { QmapImage::Integral(op) } else { QmapImage::NonIntegral(op) })
}

pub(crate) fn qmap_twisted(u: &DistElement, chart: Chart, lambda: i64) -> Result<DiffOp> {
    let ctx = *u.ctx();
    let incompatible = || Error::UnsupportedGroup(format!("{} does not act on chart {chart}", u.group()));
    match (u.group(), chart) {
        (GroupKind::Additive(1), Chart::AffineLine) => {
            DiffOp::from_terms(ctx, chart, u.terms().map(|(k, c)| (0, k.n.entries()[0], c.clone())))
        }
        (GroupKind::Multiplicative(1), Chart::Torus) => DiffOp::from_terms(
            ctx,
            chart,
            u.terms().map(|(k, c)| {
                let k = k.t.entries()[0];
                (k as i64, k, c.clone())
            }),
        ),
        (GroupKind::Reductive(g), Chart::P1(i)) if g.datum().is_sl2() => {
            let op = sl2_qmap_chart0(u, lambda)?;
            if i == 0 {
                Ok(op)
            } else {
                chart_transform(&op, lambda)
            }
        }
        _ => Err(incompatible()),
    }
}

fn sl2_qmap_chart0(u: &DistElement, lambda: i64) -> Result<DiffOp> {
    let ctx = *u.ctx();
    let [qe, qh, qf] = sl2_generator_images(ctx, lambda);
    let poly = u.to_enveloping()?;
    let max = |i: usize| poly.keys().map(|e| e[i]).max().unwrap_or(0);
    let powers = |op: &DiffOp, n: u32| -> Result<Vec<DiffOp>> {
        let mut v = vec![DiffOp::constant(ctx, Chart::P1(0), Rational::one())];
        for i in 0..n as usize {
            v.push(v[i].compose(op)?);
        }
        Ok(v)
    };
    let pe = powers(&qe, max(0))?;
    let ph = powers(&qh, max(1))?;
    let pf = powers(&qf, max(2))?;
    let mut out = DiffOp::zero(ctx, Chart::P1(0));
    for (e, c) in &poly {
        // anti-multiplicative: Q(e^a h^b f^c) = Q(f)^c Q(h)^b Q(e)^a
        let term = pf[e[2] as usize].compose(&ph[e[1] as usize])?.compose(&pe[e[0] as usize])?;
        out = out.add(&term.scale(c))?;
    }
    Ok(out)
}

/// `P(e)`: the distribution `f -> (P f)(identity)`.
pub fn eval_at_identity(op: &DiffOp) -> Result<DistElement> {
    let ctx = op.ctx;
    let (group, at_one) = match op.chart {
        Chart::AffineLine => (GroupKind::Additive(1), false),
        Chart::Torus => (GroupKind::Multiplicative(1), true),
        c => return Err(Error::NoIdentityPoint(c.to_string())),
    };
    let mut terms = Vec::new();
    for (j, k, c) in op.terms() {
        if at_one || j == 0 {
            let key = if at_one {
                PbwKey::new(MultiIndex::zeros(0), MultiIndex::new(vec![k]), MultiIndex::zeros(0))
            } else {
                PbwKey::new(MultiIndex::new(vec![k]), MultiIndex::zeros(0), MultiIndex::zeros(0))
            };
            terms.push((key, c.clone()));
        }
    }
    DistElement::from_terms(group, ctx, terms)
}

/// Conjugation by the translation `t -> t + c` (affine line) or `t -> c t` (torus).
pub fn translate_conjugate(op: &DiffOp, c: &Rational) -> Result<DiffOp> {
    let ctx = op.ctx;
    match op.chart {
        Chart::AffineLine => {
            let mut terms = Vec::new();
            for (j, k, a) in op.terms() {
                // a (t - c)^j
                for i in 0..=j {
                    let coeff = Rational::from_integer(crate::padic::binomial(j as u64, i as u64))
                        * pow_rational(&-c.clone(), j - i);
                    terms.push((i, k, a * coeff));
                }
            }
            DiffOp::from_terms(ctx, op.chart, terms)
        }
        Chart::Torus => {
            if valuation(c, ctx.p) != Some(0) {
                return Err(Error::NonUnitPoint(rational_to_string(c)));
            }
            DiffOp::from_terms(ctx, op.chart, op.terms().map(|(j, k, a)| (j, k, a * pow_rational(c, k as i64 - j))))
        }
        ch => Err(Error::NoIdentityPoint(ch.to_string())),
    }
}

pub(crate) fn pow_rational(x: &Rational, e: i64) -> Rational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// A lattice basis of the operators of order at most `n` invariant under all
/// translations, and whether it spans the same space as the images of the
/// distribution basis.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantOperators {
    pub basis: Vec<DiffOp>,
    pub matches_qmap_span: bool,
}

/// Invariance is imposed for a symbolic point: each coefficient of a
/// non-trivial power of the point must vanish.
pub fn invariant_operators(n: u32, chart: Chart, ctx: LevelContext) -> Result<InvariantOperators> {
    let group = match chart {
        Chart::AffineLine => GroupKind::Additive(1),
        Chart::Torus => GroupKind::Multiplicative(1),
        c => return Err(Error::NoIdentityPoint(c.to_string())),
    };
    let js: Vec<i64> = match chart {
        Chart::AffineLine => (0..=n as i64).collect(),
        _ => (-(n as i64)..=n as i64).collect(),
    };
    let unknowns: Vec<(i64, u32)> = (0..=n).flat_map(|k| js.iter().map(move |&j| (j, k))).collect();
    // conditions indexed by (power of the point, j', k)
    let mut conditions: BTreeMap<(i64, i64, u32), Vec<Rational>> = BTreeMap::new();
    let width = unknowns.len();
    for (col, &(j, k)) in unknowns.iter().enumerate() {
        let images: Vec<(i64, i64, Rational)> = match chart {
            Chart::AffineLine => (0..=j)
                .map(|i| {
                    let sign = if (j - i) % 2 == 0 { 1 } else { -1 };
                    (j - i, i, Rational::from_integer(crate::padic::binomial(j as u64, i as u64) * sign))
                })
                .collect(),
            _ => vec![(k as i64 - j, j, Rational::one())],
        };
        for (power, jj, c) in images {
            if power == 0 {
                continue;
            }
            let row = conditions.entry((power, jj, k)).or_insert_with(|| vec![Rational::zero(); width]);
            row[col] += c;
        }
    }
    let rows: Vec<Vec<Rational>> = conditions.into_values().collect();
    let null = linalg::nullspace(&rows, width);
    let mut basis = Vec::new();
    for v in null {
        let op = DiffOp::from_terms(ctx, chart, unknowns.iter().zip(&v).map(|(&(j, k), c)| (j, k, c.clone())))?;
        basis.push(primitive(&op));
    }
    basis.sort_by_key(|b| b.order());
    let images: Vec<DiffOp> = (0..=n)
        .map(|k| qmap(&DistElement::xi(group.clone(), ctx, k)?, chart))
        .collect::<Result<_>>()?;
    let to_rows = |ops: &[DiffOp]| -> Vec<Vec<Rational>> {
        ops.iter().map(|o| unknowns.iter().map(|&(j, k)| o.coefficient(j, k)).collect()).collect()
    };
    let (a, b) = (to_rows(&basis), to_rows(&images));
    let matches = a.len() == b.len() && linalg::row_span_contains(&a, &b) && linalg::row_span_contains(&b, &a);
    Ok(InvariantOperators { basis, matches_qmap_span: matches })
}

/// Rescales by a power of `p` (and sign) so the smallest valuation is zero
/// and the leading coefficient is positive.
fn primitive(op: &DiffOp) -> DiffOp {
    let Some(v) = op.min_valuation() else { return op.clone() };
    let p = Rational::from_integer(BigInt::from(op.ctx.p.get()));
    let mut out = op.scale(&pow_rational(&p, -v));
    let lead_negative = out.terms().next().is_some_and(|(_, _, c)| c.is_negative());
    {
        if lead_negative {
            out = out.scale(&-Rational::one());
        }
        // strip the prime-to-p part of a single-term operator
        if out.terms.len() == 1 {
            let c = out.terms.values().next().unwrap().clone();
            let scale = pow_rational(&p, valuation(&c, op.ctx.p).unwrap_or(0)) / c;
            out = out.scale(&scale);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, m: u32) -> LevelContext {
        LevelContext::finite(p, m).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn d(c: LevelContext, k: u32) -> DiffOp {
        DiffOp::derivation(c, Chart::AffineLine, k)
    }

    fn t(c: LevelContext, j: i64) -> DiffOp {
        DiffOp::monomial(c, Chart::AffineLine, j, 0, r(1)).unwrap()
    }

    #[test]
    fn compose_examples() {
        let c = ctx(2, 1);
        assert_eq!(d(c, 1).compose(&t(c, 1)).unwrap().to_string(), "1 + t*d");
        assert_eq!(d(c, 2).compose(&t(c, 1)).unwrap().to_string(), "d + t*d<2>");
        assert_eq!(d(c, 2).compose(&d(c, 2)).unwrap(), d(c, 4).scale(&r(3)));
        let other = DiffOp::derivation(c, Chart::Torus, 1);
        assert!(d(c, 1).compose(&other).is_err());
    }

    #[test]
    fn apply_examples() {
        let c = ctx(2, 1);
        let f = |j: i64| ChartFunction::from([(j, r(1))]);
        assert_eq!(d(c, 1).apply(&f(3)).unwrap(), ChartFunction::from([(2, r(3))]));
        assert_eq!(d(c, 2).apply(&f(2)).unwrap(), ChartFunction::from([(0, r(1))]));
        assert!(d(c, 2).apply(&f(1)).unwrap().is_empty());
    }

    #[test]
    fn qmap_closed_forms() {
        let c = ctx(3, 0);
        let xi3 = DistElement::xi(GroupKind::Additive(1), c, 3).unwrap();
        assert_eq!(qmap(&xi3, Chart::AffineLine).unwrap(), d(c, 3));
        let xi2 = DistElement::xi(GroupKind::Multiplicative(1), c, 2).unwrap();
        let op = qmap(&xi2, Chart::Torus).unwrap();
        assert_eq!(op.to_string(), "T^2*d<2>");
        assert_eq!(eval_at_identity(&op).unwrap(), xi2);
        assert!(qmap(&xi2, Chart::AffineLine).is_err());
        assert!(matches!(eval_at_identity(&DiffOp::derivation(c, Chart::P1(0), 1)), Err(Error::NoIdentityPoint(_))));
    }

    #[test]
    fn casimir_vanishes() {
        for c in [ctx(2, 0), ctx(3, 1)] {
            let g = GroupKind::sl2();
            let half = Rational::new(BigInt::from(1), BigInt::from(2));
            let h = DistElement::generator(g.clone(), c, "h", 1).unwrap();
            let e = DistElement::generator(g.clone(), c, "e", 1).unwrap();
            let f = DistElement::generator(g.clone(), c, "f", 1).unwrap();
            let omega = h.mul(&h).unwrap().scale(&half).add(&h).unwrap().add(&f.mul(&e).unwrap().scale(&r(2))).unwrap();
            assert!(qmap(&omega, Chart::P1(0)).unwrap().is_zero());
            assert!(qmap(&omega, Chart::P1(1)).unwrap().is_zero());
        }
    }

    #[test]
    fn sl2_bracket_convention() {
        let c = ctx(5, 0);
        let g = GroupKind::sl2();
        let labels = ["e", "h", "f"];
        for x in labels {
            for y in labels {
                let ux = DistElement::generator(g.clone(), c, x, 1).unwrap();
                let uy = DistElement::generator(g.clone(), c, y, 1).unwrap();
                let lhs = qmap(&ux, Chart::P1(0)).unwrap().commutator(&qmap(&uy, Chart::P1(0)).unwrap()).unwrap();
                let rhs = qmap(&uy.commutator(&ux).unwrap(), Chart::P1(0)).unwrap();
                assert_eq!(lhs, rhs, "[{x}, {y}]");
            }
        }
    }

    #[test]
    fn transform_examples() {
        let c = ctx(2, 1);
        let p = |j, k| DiffOp::monomial(c, Chart::P1(0), j, k, r(1)).unwrap();
        assert_eq!(chart_transform(&p(0, 1), 0).unwrap().to_string(), "-s^2*d");
        assert_eq!(chart_transform(&p(1, 1), 0).unwrap().to_string(), "-s*d");
        assert_eq!(chart_transform(&p(0, 0), 3).unwrap().to_string(), "1");
        for lambda in [0, 1, 4] {
            for (j, k) in [(0, 3), (2, 2), (-1, 4), (5, 1)] {
                let back = chart_transform(&chart_transform(&p(j, k), lambda).unwrap(), lambda).unwrap();
                assert_eq!(back, p(j, k));
            }
        }
    }

    #[test]
    fn translations() {
        let c = ctx(3, 1);
        for pt in [1, -3, 5] {
            for k in 0..5 {
                assert_eq!(translate_conjugate(&d(c, k), &r(pt)).unwrap(), d(c, k));
            }
        }
        let op = DiffOp::monomial(c, Chart::Torus, 3, 3, r(1)).unwrap();
        assert_eq!(translate_conjugate(&op, &r(2)).unwrap(), op);
        assert!(matches!(translate_conjugate(&op, &r(3)), Err(Error::NonUnitPoint(_))));
        let shifted = translate_conjugate(&t(c, 1), &r(0)).unwrap();
        assert_eq!(shifted, t(c, 1));
        let moved = translate_conjugate(&t(c, 2), &r(1)).unwrap();
        assert_eq!(moved.to_string(), "1 - 2*t + t^2");
    }

    #[test]
    fn invariants() {
        let c = ctx(2, 1);
        let inv = invariant_operators(2, Chart::AffineLine, c).unwrap();
        assert_eq!(inv.basis, vec![d(c, 0), d(c, 1), d(c, 2)]);
        assert!(inv.matches_qmap_span);
        let inv0 = invariant_operators(0, Chart::Torus, c).unwrap();
        assert_eq!(inv0.basis.len(), 1);
        let inv = invariant_operators(2, Chart::Torus, c).unwrap();
        let names: Vec<String> = inv.basis.iter().map(|b| b.to_string()).collect();
        assert_eq!(names, vec!["1", "T*d", "T^2*d<2>"]);
        assert!(inv.matches_qmap_span);
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(2, 1);
        let op = DiffOp::from_terms(c, Chart::P1(0), [(-1, 2, r(3)), (0, 0, Rational::new(BigInt::from(1), BigInt::from(2)))]).unwrap();
        assert_eq!(DiffOp::from_json(&op.to_json()).unwrap(), op);
        assert!(DiffOp::monomial(c, Chart::AffineLine, -1, 0, r(1)).is_err());
    }
}
