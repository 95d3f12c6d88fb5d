//! Exact law of the Red count by dynamic programming, checked against
//! simulation and against the closed form for the Pólya urn.

use rrw::rng;
use rrw::urn::{exact_urn_dp, simulate_urn, UrnState};
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let f = ReinforcementFunction::quartic(2.0)?;
    let init = UrnState::new(0.5, 2.0)?;
    let n = 200;
    let law = exact_urn_dp(&f, init, n)?;

    let total: f64 = law.row(n).iter().sum();
    println!("sum of P({n}, k) = {total:.15}");
    println!("E[alpha_{n}] = {:.6}", law.expect(n, |a| a));

    let reps = 20_000;
    let reds = rng::replicate(3, reps, |r, _| {
        let t = simulate_urn(&f, init, n, 3, r as u64);
        t.draws.iter().filter(|d| d.letter() == 'R').count()
    });
    for k in [90, 100, 110] {
        let hat = reds.iter().filter(|&&x| x == k).count() as f64 / reps as f64;
        println!("P({n}, {k}): exact {:.5}  simulated {hat:.5}", law.prob(n, k));
    }

    // From (1/2, 2) the Pólya urn has a uniform Red count: P(n, k) = 1/(n + 1).
    let polya = exact_urn_dp(&ReinforcementFunction::polya(), init, 50)?;
    let worst = polya.row(50).iter().map(|p| (p - 1.0 / 51.0).abs()).fold(0.0, f64::max);
    println!("polya uniformity defect at n = 50: {worst:.2e}");
    Ok(())
}
