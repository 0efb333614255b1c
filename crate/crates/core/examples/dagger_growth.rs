//! Overconvergence certificates for truncated series and the growth of the
//! valuations separating two levels.

use arithdist::coalgebra::PdPolynomial;
use arithdist::dagger::{
    ar_pairing_and_norm, dagger_classify, legendre_certificate, ord_profile, phi_valuation_growth,
    GrowthCertificate, TruncatedSeries,
};
use arithdist::padic::parse_rational;
use arithdist::{Level, LevelContext, MultiIndex, Prime, Rational};
use num_bigint::BigInt;

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).unwrap()
}

fn main() -> arithdist::Result<()> {
    let p = Prime::new(3)?;
    let ctx = LevelContext::new(3, Level::Infinite)?;

    // a_k = 3^{floor(k/2)}
    let s = TruncatedSeries::from_fn(ctx, 40, |k| Rational::from_integer(BigInt::from(3).pow((k / 2) as u32)));
    let good = s.clone().with_certificate(GrowthCertificate::new(parse_rational("1/2")?, parse_rational("-1")?)?);
    let bad = s.clone().with_certificate(GrowthCertificate::new(parse_rational("2/3")?, parse_rational("0")?)?);
    println!("eta = 1/2: {}", json(&dagger_classify(&good)?));
    println!("eta = 2/3: {}", json(&dagger_classify(&bad)?));
    println!("ord profile: {:?}", ord_profile(&s, 6)?);

    let one = PdPolynomial::monomial(ctx, 0, MultiIndex::new(vec![0]))?;
    let pairing = ar_pairing_and_norm(&s, &one, &parse_rational("1/4")?)?;
    println!("pairing with 1: {}, functional bound {:?}", pairing.value, pairing.functional_bound);

    let cert = legendre_certificate(p, 1)?;
    println!("level-gap certificate at m = 1: eta = {}, c = {}", cert.eta(), cert.c());
    let table = phi_valuation_growth(1, Level::Finite(2), 81, p)?;
    println!("v(q^(1)_k!/q^(2)_k!) monotone {}, unbounded {}", table.monotone, table.unbounded);
    for (k, v) in table.rows.iter().filter(|(k, _)| k % 9 == 0) {
        println!("  k = {k}: {v}");
    }
    Ok(())
}
