//! The positive and negative parts of the drift, and the three regimes:
//! convergent, divergent, and both parts infinite.

use rrw::drift::{clt_check, drift_parts_profile, regime_of};
use rrw::funcs::analyze;
use rrw::urn::UrnState;
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let init = UrnState::new(0.5, 2.0)?;
    for src in ["quartic(2)", "mix", "linear(0.4)"] {
        let f = ReinforcementFunction::parse(src)?;
        let regime = regime_of(&analyze(&f)?);
        let prof = drift_parts_profile(&f, init, 5_000, 300, 5)?;
        let last = prof.checkpoints.last().unwrap();
        println!("{src}: {regime:?}");
        println!(
            "  N = {}: E[delta+] = {:.4}, E[delta-] = {:.4}, growth exponents {:?} / {:?}",
            last.n, last.pos_part, last.neg_part, prof.pos_growth_exponent, prof.neg_growth_exponent
        );
    }

    // Around a fixed point with f'(p) < 1/2 the urn obeys a CLT.
    let f = ReinforcementFunction::linear(0.2)?;
    let clt = clt_check(&f, 0.5, init, 10_000, 2_000, 9)?;
    println!(
        "linear(0.2) CLT: variance {:.4} against {:.4} (ratio {:.3}, exact {:?})",
        clt.empirical_variance, clt.target, clt.ratio, clt.exact_variance
    );
    Ok(())
}
