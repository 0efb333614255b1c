//! Products in the distribution algebras of G_a, G_m and SL_2, checked against
//! the product dual to comultiplication where that is available.

use arithdist::coalgebra::mul_via_comul;
use arithdist::{DistElement, GroupKind, Level, LevelContext};

fn main() -> arithdist::Result<()> {
    let ctx = LevelContext::finite(2, 1)?;

    let ga = GroupKind::Additive(1);
    let x = DistElement::xi(ga.clone(), ctx, 2)?;
    let prod = x.mul(&x)?;
    println!("G_a {ctx}: xi<2> * xi<2> = {prod}");
    assert_eq!(prod, mul_via_comul(&x, &x)?);

    let gm = GroupKind::Multiplicative(1);
    let a = DistElement::xi(gm.clone(), ctx, 1)?;
    let b = DistElement::xi(gm, ctx, 3)?;
    println!("G_m {ctx}: xi<1> * xi<3> = {}", a.mul(&b)?);

    for m in [Level::Finite(0), Level::Infinite] {
        let ctx = LevelContext::new(3, m)?;
        let sl2 = GroupKind::sl2();
        let e = DistElement::generator(sl2.clone(), ctx, "e", 2)?;
        let f = DistElement::generator(sl2, ctx, "f", 2)?;
        let fe = f.mul(&e)?;
        println!("SL_2 {ctx}: f<2> * e<2> = {fe}");
        println!("  integral: {}, order: {:?}", fe.is_integral(), fe.order());
        println!("  symbol: {}", fe.symbol()?);
    }
    Ok(())
}
