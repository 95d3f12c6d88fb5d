//! Exhaustive path enumeration: exact position law and `E[M⁺_n] = 0`.

use rrw::urn::UrnState;
use rrw::walk::{exact_walk_oracle, EnvironmentSpec};
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let env = EnvironmentSpec::homogeneous(UrnState::new(0.5, 2.0)?);
    let f = ReinforcementFunction::mix();
    let h = 14;
    let r = exact_walk_oracle(&f, env, h)?;
    println!("total probability over 2^{h} paths: {:.15}", r.total_probability);
    for m in [1, 2, 4, 8, 14] {
        println!(
            "n = {m:>2}: E[X+] = {:+.6}  E[D+] = {:+.6}  E[M+] = {:+.1e}  E[U] = {:.4}",
            r.xplus_mean[m], r.dplus_mean[m], r.mplus_mean[m], r.u_mean[m]
        );
    }
    print!("P(X_{h} = j):");
    for j in (-4..=4).step_by(2) {
        print!("  {j}: {:.4}", r.prob_at(h, j));
    }
    println!();
    println!("P(T_1 <= {h}) = {:.4}, P(T_-1 <= {h}) = {:.4}", r.hit_up[0], r.hit_down[0]);
    Ok(())
}
