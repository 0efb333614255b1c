//! Parsing element expressions and driving the command-line interface in-process.

use arithdist::cli::{eval_dist, eval_op, run};
use arithdist::diffops::Chart;
use arithdist::{GroupKind, Level, LevelContext};

fn main() -> arithdist::Result<()> {
    let ctx = LevelContext::new(2, Level::Infinite)?;
    let sl2 = GroupKind::sl2();
    for text in ["[h, e^2/2!]", "f*e", "binom(h, 2) - h*(h - 1)/2"] {
        println!("{text}  =>  {}", eval_dist(text, &sl2, ctx)?);
    }
    let op = eval_op("(1 + t)*d", LevelContext::finite(3, 0)?, Chart::AffineLine)?;
    println!("(1 + t)*d  =>  {op}");

    for args in [
        vec!["mul", "--group", "Ga", "--p", "2", "--m", "1", "xi<2>", "xi<2>"],
        vec!["qmap", "--group", "Gm", "--p", "3", "--m", "0", "xi<2>"],
        vec!["normalize", "--group", "sl2", "--p", "3", "--m", "0", "--json", "e*f"],
    ] {
        let out = run(std::iter::once("arithdist").chain(args.iter().copied()));
        print!("$ arithdist {}\n{}", args.join(" "), out.stdout);
        if out.code != 0 {
            eprint!("{}", out.stderr);
        }
    }
    Ok(())
}
