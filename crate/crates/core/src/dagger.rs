//! Truncations of completed distribution algebras: growth certificates,
//! order profiles, Banach norms and the pairing with Tate algebras.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::coalgebra::PdPolynomial;
use crate::dist::ctx_from_json;
use crate::dist::enveloping::accumulate;
use crate::error::{Error, Result};
use crate::padic::{
    factorial_valuation, parse_rational, q_of, rational_to_string, valuation, Level, LevelContext, MultiIndex, Prime,
    Rational, ValuedRational,
};

/// The affine bound `v(a_k) >= eta |k| + c` with `eta > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthCertificate {
    eta: Rational,
    c: Rational,
}

impl GrowthCertificate {
    pub fn new(eta: Rational, c: Rational) -> Result<Self> {
        if eta <= Rational::zero() {
            return Err(Error::Malformed(format!("eta must be positive, got {eta}")));
        }
        Ok(GrowthCertificate { eta, c })
    }

    pub fn eta(&self) -> &Rational {
        &self.eta
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn bound(&self, degree: u64) -> Rational {
        &self.eta * Rational::from_integer(BigInt::from(degree)) + &self.c
    }

    /// The equivalent bound `ord(P_i) <= alpha i + beta` on order profiles.
    pub fn ord_bound(&self) -> (Rational, Rational) {
        (self.eta.recip(), -&self.c / &self.eta)
    }
}

/// The exact Legendre minorant of `v(k!) - v(q_k!) = sum_{i=1}^m floor(k/p^i)`.
pub fn legendre_certificate(p: Prime, m: u32) -> Result<GrowthCertificate> {
    let pr = Rational::from_integer(BigInt::from(p.get()));
    let s: Rational = (1..=m).map(|i| num_traits::pow(pr.recip(), i as usize)).sum();
    if m == 0 {
        return Err(Error::Malformed("level 0 has no positive Legendre slope".into()));
    }
    GrowthCertificate::new(s.clone(), s - Rational::from_integer(BigInt::from(m)))
}

/// A finite truncation `sum_{|k| <= H} a_k xi^<k>` of a completed series.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    ctx: LevelContext,
    rank: usize,
    horizon: u64,
    terms: BTreeMap<MultiIndex, Rational>,
    certificate: Option<GrowthCertificate>,
}

impl TruncatedSeries {
    pub fn new(
        ctx: LevelContext,
        rank: usize,
        horizon: u64,
        terms: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            if k.len() != rank {
                return Err(Error::LengthMismatch(rank, k.len()));
            }
            if k.total() <= horizon {
                accumulate(&mut map, k, c);
            }
        }
        Ok(TruncatedSeries { ctx, rank, horizon, terms: map, certificate: None })
    }

    /// Rank one series with coefficients `a(k)` for `k <= horizon`.
    pub fn from_fn(ctx: LevelContext, horizon: u64, a: impl Fn(u64) -> Rational) -> Self {
        Self::new(ctx, 1, horizon, (0..=horizon).map(|k| (MultiIndex::new(vec![k as u32]), a(k)))).expect("rank one")
    }

    pub fn with_certificate(mut self, cert: GrowthCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn certificate(&self) -> Option<&GrowthCertificate> {
        self.certificate.as_ref()
    }

    pub fn ctx(&self) -> &LevelContext {
        &self.ctx
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Keeps the terms with `|k| <= horizon` and lowers the horizon.
    pub fn truncate(&self, horizon: u64) -> Self {
        let mut out = self.clone();
        out.horizon = horizon.min(self.horizon);
        out.terms.retain(|k, _| k.total() <= out.horizon);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: &MultiIndex) -> ValuedRational {
        ValuedRational::new(self.terms.get(k).cloned().unwrap_or_else(Rational::zero), self.ctx.p)
    }

    /// Rewrites the series in the `[k]` basis: `xi^<k>_m = q_k! xi^[k]`.
    pub fn to_kostant(&self) -> Self {
        self.rebase(Level::Infinite)
    }

    /// Rewrites the series at another level (`xi^<k>_m = q^(m)_k!/q^(m')_k! xi^<k>_m'`).
    pub fn rebase(&self, target: Level) -> Self {
        let dest = self.ctx.with_level(target);
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), c * Rational::new(self.ctx.q_factorial_multi(k), dest.q_factorial_multi(k))))
            .collect();
        TruncatedSeries { ctx: dest, rank: self.rank, horizon: self.horizon, terms, certificate: self.certificate.clone() }
    }

    fn require_kostant(&self) -> Result<()> {
        match self.ctx.m {
            Level::Infinite => Ok(()),
            Level::Finite(m) => Err(Error::MissingBasisConversion(m)),
        }
    }

    fn valued(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.terms.iter().filter_map(|(k, c)| valuation(c, self.ctx.p).map(|v| (k.total(), v)))
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "p": self.ctx.p.get(),
            "m": serde_json::to_value(self.ctx.m).unwrap(),
            "rank": self.rank,
            "horizon": self.horizon,
            "terms": self.terms.iter().map(|(k, c)| json!({"k": k, "coeff": rational_to_string(c)})).collect::<Vec<_>>(),
        });
        if let Some(cert) = &self.certificate {
            v["certificate"] = json!({"eta": rational_to_string(&cert.eta), "c": rational_to_string(&cert.c)});
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ctx = ctx_from_json(v)?;
        let rank = v.get("rank").and_then(Value::as_u64).unwrap_or(1) as usize;
        let mut terms = Vec::new();
        for t in v.get("terms").and_then(Value::as_array).into_iter().flatten() {
            let k: MultiIndex = match t.get("k") {
                Some(Value::Number(n)) => MultiIndex::new(vec![n.as_u64().unwrap_or(0) as u32]),
                Some(x) => serde_json::from_value(x.clone()).map_err(|e| Error::Malformed(e.to_string()))?,
                None => return Err(Error::Malformed("term missing `k`".into())),
            };
            let c = t.get("coeff").and_then(Value::as_str).ok_or_else(|| Error::Malformed("term missing `coeff`".into()))?;
            terms.push((k, parse_rational(c)?));
        }
        let horizon = match v.get("horizon").and_then(Value::as_u64) {
            Some(h) => h,
            None => terms.iter().map(|(k, _)| k.total()).max().unwrap_or(0),
        };
        let mut s = Self::new(ctx, rank, horizon, terms)?;
        if let Some(cert) = v.get("certificate") {
            let get = |name: &str| -> Result<Rational> {
                parse_rational(cert.get(name).and_then(Value::as_str).ok_or_else(|| Error::Malformed(format!("certificate missing `{name}`")))?)
            };
            s = s.with_certificate(GrowthCertificate::new(get("eta")?, get("c")?)?);
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DaggerVerdict {
    /// The declared bound holds on every stored term and is non-vacuous at the horizon.
    Certified { eta: String, c: String },
    /// A stored term violates the declared bound.
    RefutedAtHorizon { degree: u64, valuation: i64, bound: String },
    /// No certificate, or one that says nothing at this horizon.
    Indeterminate { reason: String },
}

/// Finite-data test of the growth condition; never asserts membership of the
/// full series.
pub fn dagger_classify(s: &TruncatedSeries) -> Result<DaggerVerdict> {
    s.require_kostant()?;
    let Some(cert) = s.certificate() else {
        return Ok(DaggerVerdict::Indeterminate { reason: "no growth certificate given".into() });
    };
    let mut worst: Option<(u64, i64, Rational)> = None;
    for (deg, v) in s.valued() {
        let b = cert.bound(deg);
        if Rational::from_integer(BigInt::from(v)) < b && worst.as_ref().is_none_or(|w| deg < w.0) {
            worst = Some((deg, v, b));
        }
    }
    if let Some((degree, valuation, bound)) = worst {
        return Ok(DaggerVerdict::RefutedAtHorizon { degree, valuation, bound: rational_to_string(&bound) });
    }
    if cert.bound(s.horizon) <= Rational::zero() {
        return Ok(DaggerVerdict::Indeterminate {
            reason: format!("bound eta*H + c = {} is not positive at the horizon", cert.bound(s.horizon)),
        });
    }
    Ok(DaggerVerdict::Certified { eta: rational_to_string(&cert.eta), c: rational_to_string(&cert.c) })
}

/// `ord(P_i)` for `i = lo..=hi`: the largest `|k|` with `v(a_k) <= i`, `None`
/// when there is no such term. The zero series gives an empty profile.
pub fn ord_profile_range(s: &TruncatedSeries, lo: i64, hi: i64) -> Result<Vec<Option<u64>>> {
    s.require_kostant()?;
    if s.terms.is_empty() {
        return Ok(Vec::new());
    }
    Ok((lo..=hi)
        .map(|i| s.valued().filter(|&(_, v)| v <= i).map(|(d, _)| d).max())
        .collect())
}

pub fn ord_profile(s: &TruncatedSeries, i_max: i64) -> Result<Vec<Option<u64>>> {
    ord_profile_range(s, 0, i_max)
}

/// Does `ord(P_i) <= alpha i + beta` hold on every valuation level present?
pub fn ord_profile_fits(s: &TruncatedSeries, alpha: &Rational, beta: &Rational) -> Result<bool> {
    let Some(lo) = s.valued().map(|(_, v)| v).min() else { return Ok(true) };
    let hi = s.valued().map(|(_, v)| v).max().unwrap();
    let profile = ord_profile_range(s, lo, hi)?;
    Ok(profile.iter().zip(lo..).all(|(o, i)| match o {
        None => true,
        Some(d) => Rational::from_integer(BigInt::from(*d)) <= alpha * Rational::from_integer(BigInt::from(i)) + beta,
    }))
}

/// `p^{-min v(a_k)}`; zero for the zero series.
pub fn banach_norm(s: &TruncatedSeries) -> Rational {
    norm_of(s.valued().map(|(_, v)| v).min(), s.ctx.p)
}

fn norm_of(min_v: Option<i64>, p: Prime) -> Rational {
    match min_v {
        None => Rational::zero(),
        Some(v) => {
            let pr = Rational::from_integer(BigInt::from(p.get()));
            crate::diffops::pow_rational(&pr, -v)
        }
    }
}

/// A `p`-adic size `p^exponent`, kept in exact log form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogBound {
    /// `log_p` of the bound
    pub exponent: String,
    /// the degree at which it is attained (smallest such)
    pub degree: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArPairing {
    pub value: ValuedRational,
    /// `sup |a_k| r^{-|k|}`: the norm of the series as a functional on `A_r`
    pub functional_bound: Option<LogBound>,
    /// `sup |b_k| r^{|k|}` for the Tate truncation
    pub tate_norm: Option<LogBound>,
}

fn log_sup(items: impl Iterator<Item = (u64, i64)>, slope: &Rational, sign: i64) -> Option<LogBound> {
    let mut best: Option<(Rational, u64)> = None;
    for (deg, v) in items {
        let e = Rational::from_integer(BigInt::from(-v)) + slope * Rational::from_integer(BigInt::from(sign * deg as i64));
        if best.as_ref().is_none_or(|(b, d)| e > *b || (e == *b && deg < *d)) {
            best = Some((e, deg));
        }
    }
    best.map(|(e, degree)| LogBound { exponent: rational_to_string(&e), degree })
}

/// Pairs a `[k]`-basis series with `f = sum b_k t^k` (`xi^[k] . t^k' = delta`)
/// for the radius `r = p^{-slope}`.
pub fn ar_pairing_and_norm(s: &TruncatedSeries, f: &PdPolynomial, slope: &Rational) -> Result<ArPairing> {
    s.require_kostant()?;
    if *slope <= Rational::zero() {
        return Err(Error::InvalidRadius(slope.to_string()));
    }
    if f.ctx().m != Level::Infinite || f.rank() != s.rank {
        return Err(Error::ContextMismatch("the Tate truncation must be a rank-matching level-inf polynomial".into()));
    }
    let mut value = Rational::zero();
    for (k, a) in &s.terms {
        value += a * f.coefficient(k).value();
    }
    let p = s.ctx.p;
    let tate = f.terms().filter_map(|(k, b)| valuation(b, p).map(|v| (k.total(), v)));
    Ok(ArPairing {
        value: ValuedRational::new(value, p),
        functional_bound: log_sup(s.valued(), slope, 1),
        tate_norm: log_sup(tate, slope, -1),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiTable {
    pub p: u64,
    pub m: u32,
    pub m_target: String,
    /// `(k, v(q^(m)_k! / q^(m')_k!))`
    pub rows: Vec<(u64, u64)>,
    pub monotone: bool,
    /// strictly increasing along `k = j p^{m+1}`
    pub unbounded: bool,
}

/// `v_p(q^(m)_k!/q^(m')_k!) = sum_{i=m+1}^{m'} floor(k/p^i)` by Legendre.
pub fn phi_valuation_growth(m: u32, target: Level, k_max: u64, p: Prime) -> Result<PhiTable> {
    if target <= Level::Finite(m) {
        return Err(Error::LevelDecrease { source_level: m.to_string(), target: target.to_string() });
    }
    let src = LevelContext { p, m: Level::Finite(m) };
    let dst = LevelContext { p, m: target };
    let rows: Vec<(u64, u64)> = (0..=k_max)
        .map(|k| (k, factorial_valuation(q_of(k, &src), p) - factorial_valuation(q_of(k, &dst), p)))
        .collect();
    let monotone = rows.windows(2).all(|w| w[0].1 <= w[1].1);
    let step = p.get().checked_pow(m + 1);
    let unbounded = match step {
        Some(step) if step <= k_max => {
            let samples: Vec<u64> = (0..=k_max / step).map(|j| rows[(j * step) as usize].1).collect();
            samples.len() >= 2 && samples.windows(2).all(|w| w[0] < w[1])
        }
        _ => false,
    };
    Ok(PhiTable { p: p.get(), m, m_target: target.to_string(), rows, monotone, unbounded })
}

/// `v(k!) - v(q_k!)` at level `m`: the valuation of `k!/q_k!`.
pub fn level_gap_valuation(k: u64, ctx: &LevelContext) -> u64 {
    factorial_valuation(k, ctx.p) - factorial_valuation(q_of(k, ctx), ctx.p)
}

pub fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inf(p: u64) -> LevelContext {
        LevelContext::new(p, Level::Infinite).unwrap()
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(BigInt::from(a), BigInt::from(b))
    }

    fn p_pow(p: u64, e: u64) -> Rational {
        Rational::from_integer(BigInt::from(p).pow(e as u32))
    }

    #[test]
    fn classify_examples() {
        let s = TruncatedSeries::from_fn(inf(2), 32, |k| p_pow(2, k));
        let cert = GrowthCertificate::new(q(1, 1), q(0, 1)).unwrap();
        assert!(matches!(dagger_classify(&s.clone().with_certificate(cert)).unwrap(), DaggerVerdict::Certified { .. }));
        assert!(matches!(dagger_classify(&s).unwrap(), DaggerVerdict::Indeterminate { .. }));
        let ones = TruncatedSeries::from_fn(inf(2), 32, |_| q(1, 1));
        let cert = GrowthCertificate::new(q(1, 4), q(-3, 1)).unwrap();
        match dagger_classify(&ones.with_certificate(cert)).unwrap() {
            DaggerVerdict::RefutedAtHorizon { degree, .. } => assert_eq!(degree, 13),
            v => panic!("{v:?}"),
        }
        let lvl = TruncatedSeries::from_fn(LevelContext::finite(2, 1).unwrap(), 4, |_| q(1, 1));
        assert_eq!(dagger_classify(&lvl), Err(Error::MissingBasisConversion(1)));
    }

    #[test]
    fn legendre_series_is_certified() {
        for (p, m) in [(2, 1), (2, 3), (3, 2), (5, 1)] {
            let c = LevelContext::finite(p, m).unwrap();
            let pr = Prime::new(p).unwrap();
            let s = TruncatedSeries::from_fn(inf(p), 64, |k| p_pow(p, level_gap_valuation(k, &c)));
            let cert = legendre_certificate(pr, m).unwrap();
            // the minorant is attained
            let tight = (0..=64u64).any(|k| Rational::from_integer(BigInt::from(level_gap_valuation(k, &c))) == cert.bound(k));
            assert!(tight, "p={p} m={m}");
            assert!(matches!(dagger_classify(&s.with_certificate(cert)).unwrap(), DaggerVerdict::Certified { .. }));
        }
    }

    #[test]
    fn profiles() {
        let s = TruncatedSeries::from_fn(inf(3), 20, |k| p_pow(3, k));
        let prof = ord_profile(&s, 5).unwrap();
        assert_eq!(prof, (0..=5).map(Some).collect::<Vec<_>>());
        let half = TruncatedSeries::from_fn(inf(3), 20, |k| p_pow(3, k.div_ceil(2)));
        let prof = ord_profile(&half, 4).unwrap();
        assert_eq!(prof, vec![Some(0), Some(2), Some(4), Some(6), Some(8)]);
        let zero = TruncatedSeries::from_fn(inf(3), 20, |_| Rational::zero());
        assert!(ord_profile(&zero, 4).unwrap().is_empty());
        assert!(ord_profile_fits(&s, &q(1, 1), &q(0, 1)).unwrap());
        assert!(!ord_profile_fits(&s, &q(1, 2), &q(0, 1)).unwrap());
    }

    #[test]
    fn norms() {
        let c = LevelContext::finite(2, 1).unwrap();
        let s = TruncatedSeries::new(c, 1, 4, [(MultiIndex::new(vec![1]), q(1, 2))]).unwrap();
        assert_eq!(banach_norm(&s), q(2, 1));
        let integral = TruncatedSeries::from_fn(c, 10, |k| q(k as i64 + 1, 1));
        assert!(banach_norm(&integral) <= q(1, 1));
        assert!(banach_norm(&integral.rebase(Level::Finite(3))) <= banach_norm(&integral));
    }

    #[test]
    fn stepwise_conversion_matches_direct() {
        let c = LevelContext::finite(2, 0).unwrap();
        let s = TruncatedSeries::from_fn(c, 40, |k| q(k as i64 * 3 + 1, 7));
        let mut step = s.clone();
        for m in 1..=6 {
            step = step.rebase(Level::Finite(m));
        }
        let direct = s.to_kostant();
        // at level 6, 2^6 > 40 so every q_k vanishes and the bases coincide
        assert_eq!(step.rebase(Level::Infinite), direct);
        assert_eq!(step.terms, direct.terms);
    }

    #[test]
    fn ar_pairing() {
        let c = inf(2);
        let s = TruncatedSeries::from_fn(c, 16, |k| p_pow(2, k));
        let f = PdPolynomial::from_terms(c, 1, 16, [(MultiIndex::new(vec![2]), q(1, 1))]).unwrap();
        let out = ar_pairing_and_norm(&s, &f, &q(1, 2)).unwrap();
        assert_eq!(out.value.value(), &q(4, 1));
        let bound = out.functional_bound.unwrap();
        assert_eq!((bound.exponent.as_str(), bound.degree), ("0/1", 0));
        let s2 = TruncatedSeries::new(c, 1, 4, [(MultiIndex::new(vec![2]), q(1, 1))]).unwrap();
        let t3 = PdPolynomial::from_terms(c, 1, 4, [(MultiIndex::new(vec![3]), q(1, 1))]).unwrap();
        assert!(ar_pairing_and_norm(&s2, &t3, &q(1, 2)).unwrap().value.is_zero());
        assert!(matches!(ar_pairing_and_norm(&s, &f, &q(0, 1)), Err(Error::InvalidRadius(_))));
    }

    #[test]
    fn phi_table() {
        let p = Prime::new(2).unwrap();
        let t = phi_valuation_growth(0, Level::Finite(1), 16, p).unwrap();
        assert_eq!(t.rows[4].1, 2);
        assert_eq!(t.rows[8].1, 4);
        assert!(t.monotone && t.unbounded);
        let t = phi_valuation_growth(2, Level::Finite(4), 16, p).unwrap();
        assert!(t.rows[..4].iter().all(|r| r.1 == 0));
        assert!(phi_valuation_growth(2, Level::Finite(2), 16, p).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = TruncatedSeries::from_fn(inf(5), 6, |k| q(k as i64, 5))
            .with_certificate(GrowthCertificate::new(q(1, 3), q(-1, 1)).unwrap());
        assert_eq!(TruncatedSeries::from_json(&s.to_json()).unwrap(), s);
    }
}
