//! Estimate `E[δ_∞]` for a few functions, with the exact truncated drift,
//! the Monte Carlo continuation and the tail correction.

use rrw::drift::{estimate_delta_inf, exact_drift_series, DriftConfig};
use rrw::urn::UrnState;
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let init = UrnState::new(0.5, 2.0)?;
    let cfg = DriftConfig { n_dp: 5_000, n_mc: 50_000, replicas: 200, seed: 11, ..Default::default() };

    for src in ["const(0.5)", "quartic(2)", "quartic(7)", "const(0.6)", "mix"] {
        let f = ReinforcementFunction::parse(src)?;
        let est = estimate_delta_inf(&f, init, &cfg)?;
        let ci = est.ci().map(|(lo, hi)| format!("[{lo:.5}, {hi:.5}]")).unwrap_or_else(|| "undefined".into());
        println!("{src:<12} E[delta] = {:<22} 99% CI {ci}  ({:?}, {:?})", est.mean.to_string(), est.regime, est.method);
        if let Some(t) = &est.tail {
            println!("{:<12} tail correction {:.2e}, tail error {:.2e}, fitted exponent {:.3}", "", t.correction, t.error, t.fitted_exponent);
        }
    }

    let f = ReinforcementFunction::quartic(2.0)?;
    let s = exact_drift_series(&f, init, 10_000)?;
    for n in [10, 100, 1_000, 10_000] {
        println!("quartic(2): exact E[delta_{n}] = {:.6}", s.values[n]);
    }
    Ok(())
}
