//! Recurrence/transience verdicts with the rule used and the hypothesis
//! audit, including classical edge weights mapped to urn environments.

use rrw::criteria::{classify, map_classical_weights, ClassicalWeights};
use rrw::drift::DriftConfig;
use rrw::urn::UrnState;
use rrw::walk::EnvironmentSpec;
use rrw::ReinforcementFunction;

fn main() -> rrw::Result<()> {
    let env = EnvironmentSpec::homogeneous(UrnState::new(0.5, 2.0)?);
    let budget = DriftConfig { n_dp: 5_000, n_mc: 20_000, replicas: 200, seed: 7, ..Default::default() };

    for src in ["const(0.5)", "quartic(2)", "family(quartic(2), 8)", "const(0.7)", "mix", "linear(0.4)", "x"] {
        let f = ReinforcementFunction::parse(src)?;
        let v = classify(&f, env, &budget)?;
        println!("{src:<24} {:<12} {:<20} {}", v.verdict.to_string(), v.rule.name(), v.note);
        if v.verdict == rrw::criteria::Verdict::Inconclusive {
            for a in v.audit.iter().filter(|a| !a.ok) {
                println!("{:<24} failed [{}] {}", "", a.rule, a.hypothesis);
            }
        }
    }

    let directed = map_classical_weights(&ClassicalWeights::directed(1.0, 1.0, 1.0))?;
    let undirected = map_classical_weights(&ClassicalWeights::undirected(1.0, 1.0))?;
    println!("directed a0 = 1, delta = 1   -> {directed:?}");
    println!("undirected b0 = 1, delta = 1 -> {undirected:?}");
    let id = ReinforcementFunction::polya();
    for (name, e) in [("directed", directed), ("undirected", undirected)] {
        let v = classify(&id, e, &budget)?;
        println!("{name}: {} via {}", v.verdict, v.rule);
    }
    Ok(())
}
