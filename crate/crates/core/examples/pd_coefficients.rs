//! Divided-power binomial coefficients at several levels and their p-adic valuations.
//!
//!     cargo run --example pd_coefficients -- 3 9

use arithdist::padic::{pd_binomial, pd_multinomial, Level, LevelContext};

fn main() -> arithdist::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let p = args.first().copied().unwrap_or(2);
    let k = args.get(1).copied().unwrap_or(8);

    for m in [Level::Finite(0), Level::Finite(1), Level::Finite(2), Level::Infinite] {
        let ctx = LevelContext::new(p, m)?;
        print!("{ctx}:");
        for k1 in 0..=k {
            let c = pd_binomial(k, k1, &ctx)?;
            print!(" {c}");
        }
        println!();
    }

    // the multinomial variant and its valuation
    let ctx = LevelContext::finite(p, 1)?;
    let c = pd_multinomial(k, k / 2, &ctx)?;
    println!("multinomial <{k}, {}> at {ctx} = {c}, v_p = {:?}", k / 2, c.valuation());
    Ok(())
}
