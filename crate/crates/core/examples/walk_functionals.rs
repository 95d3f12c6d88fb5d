//! Walk functionals at the hitting time of level `a`, and the balance
//! `a = E[U_{T_a}] + E[D⁺_{T_a}]`.

use rrw::urn::UrnState;
use rrw::walk::{drift_equation, simulate_walk, walk_functionals, EnvironmentSpec, StopRule, WalkOptions};
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let env = EnvironmentSpec::homogeneous(UrnState::new(0.5, 2.0)?);
    let f = ReinforcementFunction::quartic(2.0)?;

    let rec = simulate_walk(&f, env, WalkOptions::hit(StopRule::HitLevel(5)), 8, 0)?;
    let rep = walk_functionals(&rec);
    println!(
        "T_5 = {:?}, U = {}, X+ = {}, D+ = {:.4}, M+ = {:.4}",
        rep.T_a, rep.U_Ta, rep.Xplus_Ta, rep.Dplus_Ta, rep.M_Ta
    );

    for (src, a) in [("quartic(2)", 3), ("const(0.6)", 3), ("const(0.5)", 2)] {
        let f = ReinforcementFunction::parse(src)?;
        let r = drift_equation(&f, env, a, 5_000, 4, None, None)?;
        println!(
            "{src:<11} a = {a}: E[U] = {:.4}, E[D+] = {:.4}, residual {:+.4} ({:.2} se, {:?})",
            r.u_mean,
            r.dplus_mean,
            r.residual,
            r.z_score(),
            r.sampler
        );
    }
    Ok(())
}
