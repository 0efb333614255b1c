//! Distributions acting on regular functions, and Taylor expansion at the identity.

use arithdist::action::{act, taylor, GroupFunction};
use arithdist::cli::eval_function;
use arithdist::{DistElement, GroupKind, LevelContext};

fn main() -> arithdist::Result<()> {
    let ctx = LevelContext::finite(3, 0)?;
    let gm = GroupKind::Multiplicative(1);

    let f = eval_function("2*T^-1 + 1 - T^3", &gm)?;
    println!("f = {f}");
    for k in 0..=4 {
        let u = DistElement::xi(gm.clone(), ctx, k)?;
        println!("  <xi<{k}>, f> = {}", act(&u, &f)?);
    }

    let t5 = GroupFunction::power(gm, 5)?;
    let data = taylor(&t5, 5, ctx)?;
    print!("Taylor data of T^5 at {ctx}:");
    for (k, c) in data.terms() {
        print!(" [{k}] {c}");
    }
    println!();
    Ok(())
}
