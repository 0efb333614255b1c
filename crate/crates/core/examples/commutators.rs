//! The commutator identities between divided powers of root vectors and
//! binomials in the Cartan subalgebra.

use arithdist::dist::commutator::{commutator_identity_suite, SuiteBounds};
use arithdist::{ChevalleyDatum, Level, LevelContext};

fn main() -> arithdist::Result<()> {
    for (datum, p, m) in [
        (ChevalleyDatum::sl2(), 2, Level::Infinite),
        (ChevalleyDatum::sl2(), 3, Level::Finite(0)),
        (ChevalleyDatum::gl2(), 2, Level::Infinite),
    ] {
        let ctx = LevelContext::new(p, m)?;
        let report = commutator_identity_suite(&datum, ctx, SuiteBounds::default())?;
        println!("{} at {ctx}: {} checks, passed {}", datum.name(), report.checks.len(), report.passed());
        for u in report.units.iter().take(3) {
            println!("  unit for [{}, {}] at k = {}: {} (v = {:?})", u.torus, u.root, u.k, u.unit, u.valuation);
        }
        for f in report.failures() {
            println!("  FAIL {} {}: {}", f.identity, f.params, f.detail);
        }
    }
    Ok(())
}
