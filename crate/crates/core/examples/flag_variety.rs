//! Global differential operators on the projective line and the comparison with
//! the enveloping algebra of sl_2 modulo the central character.

use arithdist::flag::{global_sections, localization_check, theta_character, TwistDatum};
use arithdist::LevelContext;

fn main() -> arithdist::Result<()> {
    let ctx = LevelContext::finite(3, 1)?;

    for n in 0..=4 {
        let g = global_sections(n, ctx, TwistDatum::untwisted())?;
        println!("order <= {n}: {} global operators", g.dim());
    }

    for lambda in 0..=2 {
        let twist = TwistDatum::new(lambda);
        let theta = theta_character(ctx, twist)?;
        let report = localization_check(4, ctx, twist)?;
        println!(
            "lambda = {lambda}: theta = {}, image rank {}, kernel {}, passed {}",
            theta.theta,
            report.image_rank,
            report.kernel_dim,
            report.passed()
        );
    }
    Ok(())
}
