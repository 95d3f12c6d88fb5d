use std::collections::BTreeMap;

use statrs::function::gamma::digamma;

use rrw::criteria::{classify, solomon_check, Rule, Verdict};
use rrw::drift::DriftConfig;
use rrw::walk::{empirical_regime, RegimeConfig};
use rrw::{EnvironmentSpec, ReinforcementFunction, UrnState};

fn env(alpha: f64, l: f64) -> EnvironmentSpec {
    EnvironmentSpec::homogeneous(UrnState::new(alpha, l).unwrap())
}

#[test]
fn rule_hypotheses_match_snapshot() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/rule_hypotheses.json")).unwrap();
    let want: BTreeMap<String, Vec<String>> = serde_json::from_str(&text).unwrap();
    let got: BTreeMap<String, Vec<String>> = Rule::ALL
        .iter()
        .map(|r| (r.name().to_string(), r.hypotheses().iter().map(|h| h.to_string()).collect()))
        .collect();
    assert_eq!(got, want);
}

fn rank(v: Verdict) -> u8 {
    match v {
        Verdict::Recurrent => 0,
        Verdict::Inconclusive => 1,
        Verdict::Transient => 2,
    }
}

#[test]
fn verdicts_move_towards_transience_in_u() {
    let base = ReinforcementFunction::quartic(2.0).unwrap();
    let cfg = DriftConfig { n_dp: 2_000, n_mc: 10_000, replicas: 200, seed: 5, ..Default::default() };
    let mut last = 0;
    let mut seen = Vec::new();
    for u in [0.5, 1.0, 2.0, 3.0, 6.0, 12.0] {
        let v = classify(&base.family(u).unwrap(), env(0.5, 2.0), &cfg).unwrap();
        seen.push((u, v.verdict, v.rule));
        assert!(rank(v.verdict) >= last, "{seen:?}");
        last = rank(v.verdict);
    }
    assert_eq!(seen[0].1, Verdict::Recurrent, "{seen:?}");
    assert_eq!(seen[5].1, Verdict::Transient, "{seen:?}");
}

// Beta parameters below 1 leave a slowly decaying truncation bias at any finite horizon.
#[test]
fn solomon_monte_carlo_matches_closed_form() {
    let id = ReinforcementFunction::polya();
    for (i, (alpha, l)) in [(0.5, 2.0), (0.3, 4.0), (0.75, 4.0), (0.6, 5.0), (0.25, 8.0)].into_iter().enumerate() {
        let r = solomon_check(&id, UrnState::new(alpha, l).unwrap(), 20_000, 4_000, 90 + i as u64).unwrap();
        let (a, b) = (alpha * l, (1.0 - alpha) * l);
        assert!((r.beta_a - a).abs() < 1e-12 && (r.beta_b - b).abs() < 1e-12);
        let exact = digamma(a) - digamma(b);
        assert!((r.criterion - exact).abs() < 1e-12);
        let (m, se) = (r.mc_mean.unwrap(), r.mc_stderr.unwrap());
        assert!((m - exact).abs() <= 3.0 * se, "({a}, {b}): mc {m} +- {se} vs {exact}");
    }
}

#[test]
fn empirical_regime_separates_known_cases() {
    let cfg = RegimeConfig { horizon: 10_000, replicas: 300, burn_in: 100, seed: 11 };
    let run = |src: &str| empirical_regime(&ReinforcementFunction::parse(src).unwrap(), env(0.5, 2.0), &cfg).unwrap();
    let srw = run("const(0.5)");
    let biased = run("const(0.9)");
    let mix = run("mix");
    assert!(srw.heuristic && biased.heuristic);
    assert!(srw.return_fraction > 0.8, "{srw:?}");
    assert!(biased.return_fraction < 0.05, "{biased:?}");
    assert!(biased.escape_fraction > 0.95, "{biased:?}");
    assert!(mix.escape_fraction > srw.escape_fraction, "{mix:?} vs {srw:?}");
    assert!(mix.mean_max_level > srw.mean_max_level, "{mix:?} vs {srw:?}");
}
