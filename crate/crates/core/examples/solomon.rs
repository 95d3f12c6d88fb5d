//! Solomon's criterion for a random walk in an i.i.d. Beta environment, in
//! closed form and by simulation.

use rrw::criteria::solomon_check;
use rrw::urn::UrnState;
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let id = ReinforcementFunction::polya();
    for (alpha, l) in [(0.5, 2.0), (0.6, 5.0), (0.4, 5.0), (0.55, 20.0)] {
        let r = solomon_check(&id, UrnState::new(alpha, l)?, 20_000, 400, 13)?;
        println!(
            "Beta({:.1}, {:.1}): psi(a) - psi(b) = {:+.6}, simulated {:+.4} ± {:.4} -> {} {:?}",
            r.beta_a,
            r.beta_b,
            r.criterion,
            r.mc_mean.unwrap_or(f64::NAN),
            r.mc_stderr.unwrap_or(f64::NAN),
            r.verdict,
            r.direction
        );
    }
    let q = ReinforcementFunction::quartic(2.0)?;
    if let Err(e) = solomon_check(&q, UrnState::new(0.5, 2.0)?, 0, 0, 0) {
        println!("quartic(2): {e}");
    }
    Ok(())
}
