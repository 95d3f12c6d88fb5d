//! Parse reinforcement functions, evaluate them and inspect their fixed points.

use rrw::funcs::{analyze, derivative};
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    for src in ["quartic(2)", "mix", "0.5 + 2*(x - 0.5)^4", "family(quartic(2), 3.5)", "0.2 + 0.7*x^2"] {
        let f = ReinforcementFunction::parse(src)?;
        let (d1, d2) = derivative(&f, 0.5);
        println!("{src}");
        println!("  canonical : {}", f.expr().map(|e| e.to_string()).unwrap_or_default());
        println!("  f(0), f(1/2), f(1) = {:.4}, {:.4}, {:.4}", f.eval(0.0), f.eval(0.5), f.eval(1.0));
        println!("  f'(1/2) = {d1:.6}, f''(1/2) = {d2:.6}");
        let rep = analyze(&f)?;
        for fp in &rep.fixed_points {
            println!("  fixed point {:.6}  f' = {:.4}  stable = {}", fp.p, fp.fprime, fp.stable);
        }
        println!("  f >= 1/2 everywhere: {}", rep.ge_half);
    }

    match ReinforcementFunction::parse("0.5 + * x") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    match analyze(&ReinforcementFunction::parse("x")?) {
        Err(e) => println!("identity: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
