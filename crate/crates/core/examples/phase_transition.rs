//! Locate the two thresholds where `E[δ_∞]` crosses 1: in `u` for the
//! family built on `quartic(2)`, and in the initial mass `l` for `quartic(7)`.

use rrw::transition::{find_threshold, sweep, Axis, SearchBudget};
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let base = ReinforcementFunction::quartic(2.0)?;
    let budget = SearchBudget::default();

    let u = find_threshold(Axis::U { l: 1.0 }, &base, (0.1, 64.0), 1.0, &budget)?;
    println!("u-threshold: {:?} in [{:.4}, {:.4}] after {} probes", u.status, u.lo, u.hi, u.iterations.len());
    println!("  E at lo = {} ({:?}), E at hi = {} ({:?})", u.est_lo.mean, u.est_lo.ci, u.est_hi.mean, u.est_hi.ci);

    let l = find_threshold(Axis::L { u: 3.5 }, &base, (0.25, 8.0), 1.0, &budget)?;
    println!("l-threshold: {:?} in [{:.4}, {:.4}] after {} probes", l.status, l.lo, l.hi, l.iterations.len());
    println!("  E at lo = {} ({:?}), E at hi = {} ({:?})", l.est_lo.mean, l.est_lo.ci, l.est_hi.mean, l.est_hi.ci);

    let grid = [0.5, 1.0, 2.0, 4.0, 8.0];
    for (axis, name) in [(Axis::U { l: 1.0 }, "u"), (Axis::L { u: 3.5 }, "l")] {
        let curve = sweep(axis, &base, &grid, &budget.drift)?;
        println!("{name}-sweep:");
        for r in &curve.rows {
            println!("  {:>4} -> {} ± {:.4} ({:?})", r.param, r.mean, r.stderr, r.regime);
        }
        println!("  monotonicity flags: {}", curve.flags.len());
    }
    Ok(())
}
