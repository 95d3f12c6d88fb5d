//! A single generalized Pólya urn: the proportion settles near a stable fixed
//! point of `f`, and the Pólya urn (`f(x) = x`) converges to a Beta law.

use rrw::rng;
use rrw::stats::MeanSe;
use rrw::urn::{simulate_urn, UrnState};
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let init = UrnState::new(0.5, 2.0)?;

    let f = ReinforcementFunction::linear(0.3)?;
    let traj = simulate_urn(&f, init, 20_000, 42, 0);
    for n in [0, 10, 100, 1_000, 10_000, 20_000] {
        println!("linear(0.3)  n = {n:>6}  alpha = {:.5}", traj.states[n].alpha);
    }

    // Pólya from (0.6, 5): the limit is Beta(3, 2), with mean 0.6 and variance 0.04.
    let polya = ReinforcementFunction::polya();
    let init = UrnState::new(0.6, 5.0)?;
    let finals = rng::replicate(7, 2_000, |r, _| simulate_urn(&polya, init, 5_000, 7, r as u64).states[5_000].alpha);
    let m = MeanSe::of(&finals);
    let var = finals.iter().map(|a| (a - m.mean).powi(2)).sum::<f64>() / (finals.len() - 1) as f64;
    println!("polya: mean {:.4} ± {:.4} (0.6), variance {:.4} (0.04)", m.mean, m.stderr, var);

    let mut csv = Vec::new();
    simulate_urn(&f, UrnState::new(0.5, 2.0)?, 5, 1, 0).write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
