//! The three monotone couplings: ordered functions, an off-centre start, and
//! ordered initial masses.

use rrw::coupling::{couple_function_order, couple_off_center, violation_sweep, CouplingSpec};
use rrw::urn::UrnState;
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let half = ReinforcementFunction::constant(0.5)?;
    let q = ReinforcementFunction::quartic(2.0)?;
    let init = UrnState::new(0.5, 2.0)?;

    let run = couple_function_order(&half, &q, init, 10_000, 1, 0)?;
    let last = run.alpha.states.len() - 1;
    println!(
        "const(0.5) <= quartic(2): final {:.4} <= {:.4}, violations {}",
        run.alpha.states[last].alpha,
        run.beta.states[last].alpha,
        run.violations()
    );

    let run = couple_off_center(&q, 0.75, 2.0, 10_000, 2, 0)?;
    println!("off-centre (0.75, 4) vs (0.5, 4): violations {}", run.violations());
    if let Err(e) = couple_off_center(&q, 0.6, 1.0, 10, 2, 0) {
        println!("off-centre (0.6, 2): {e}");
    }

    for spec in [
        CouplingSpec::FunctionOrder { f: half.clone(), g: q.clone(), init },
        CouplingSpec::OffCenter { f: q.clone(), alpha: 0.75, l: 2.0 },
        CouplingSpec::MassOrder { f: q.clone(), l0: 1.0, l1: 2.0 },
    ] {
        let s = violation_sweep(&spec, 2_000, 200, 3)?;
        println!("{:?}: {} of {} streams violate, first at {:?}", s.kind, s.violating_streams, s.streams, s.first);
    }
    Ok(())
}
