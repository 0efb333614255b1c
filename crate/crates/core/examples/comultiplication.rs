//! Truncated comultiplication of the additive and multiplicative coordinate rings.

use arithdist::coalgebra::{comul_additive, comul_multiplicative, pd_sum_expand};
use arithdist::padic::rational_to_string;
use arithdist::{LevelContext, MultiIndex};

fn main() -> arithdist::Result<()> {
    let ctx = LevelContext::finite(2, 1)?;

    println!("(x + y)^<4> at {ctx}:");
    for (a, b, c) in pd_sum_expand(4, &ctx) {
        println!("  {c} x^<{a}> y^<{b}>");
    }

    println!("additive delta^(2,2)(t^<(2,1)>):");
    for (l, r, c) in comul_additive(&MultiIndex::new(vec![2, 1]), 2, 2, &ctx) {
        println!("  {} t^<{l}> (x) t^<{r}>", rational_to_string(&c));
    }

    println!("multiplicative delta^(3,3)(tau^<3>):");
    for (l, r, c) in comul_multiplicative(3, 3, 3, &ctx) {
        println!("  {} tau^<{l}> (x) tau^<{r}>", rational_to_string(&c));
    }
    Ok(())
}
