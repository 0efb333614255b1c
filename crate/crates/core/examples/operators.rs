//! Realizing distributions as invariant differential operators.

use arithdist::diffops::{eval_at_identity, qmap, qmap_checked, Chart, QmapImage};
use arithdist::{DistElement, GroupKind, LevelContext};

fn main() -> arithdist::Result<()> {
    let ctx = LevelContext::finite(2, 1)?;

    let ga = GroupKind::Additive(1);
    let gm = GroupKind::Multiplicative(1);
    for k in 1..=4 {
        let u = DistElement::xi(ga.clone(), ctx, k)?;
        let v = DistElement::xi(gm.clone(), ctx, k)?;
        let (qu, qv) = (qmap(&u, Chart::AffineLine)?, qmap(&v, Chart::Torus)?);
        println!("Q(xi<{k}>): {qu}    |    {qv}");
        // evaluating at the identity recovers the distribution
        assert_eq!(eval_at_identity(&qu)?, u);
        assert_eq!(eval_at_identity(&qv)?, v);
    }

    let sl2 = GroupKind::sl2();
    for label in ["e", "h", "f"] {
        let u = DistElement::generator(sl2.clone(), ctx, label, 2)?;
        let op = qmap(&u, Chart::P1(0))?;
        println!("Q({label}<2>) = {op}");
    }

    let h = DistElement::generator(sl2, ctx, "h", 3)?;
    match qmap_checked(&h, Chart::P1(0))? {
        QmapImage::Integral(op) => println!("Q(h<3>) integral: {op}"),
        QmapImage::NonIntegral(op) => println!("Q(h<3>) not integral: {op}"),
    }
    Ok(())
}
