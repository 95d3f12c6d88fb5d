use serde::Serialize;

use super::{EnvironmentSpec, Walker};
use crate::error::Result;
use crate::funcs::ReinforcementFunction;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeConfig {
    pub horizon: u64,
    pub replicas: usize,
    /// Returns to 0 are counted only after this many steps.
    pub burn_in: u64,
    pub seed: u64,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        RegimeConfig { horizon: 100_000, replicas: 1_000, burn_in: 1_000, seed: 0 }
    }
}

/// Summary statistics of simulated walks. Heuristic evidence only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeEvidence {
    pub heuristic: bool,
    /// Fraction of replicas visiting 0 at some time in `(burn_in, horizon]`.
    pub return_fraction: f64,
    pub mean_returns: f64,
    pub mean_max_level: f64,
    pub mean_abs_final: f64,
    /// Fraction of replicas that never return after the burn-in and end
    /// beyond `sqrt(horizon)` in absolute value.
    pub escape_fraction: f64,
    /// The same no-return probability for the simple symmetric walk.
    pub srw_no_return_baseline: f64,
    pub replicas: usize,
    pub horizon: u64,
}

/// `P(no zero of the simple random walk in (m, n])`, by the arcsine law.
pub fn srw_no_return_probability(m: u64, n: u64) -> f64 {
    2.0 / std::f64::consts::PI * ((m as f64 / n as f64).sqrt()).asin()
}

pub fn empirical_regime(f: &ReinforcementFunction, env: EnvironmentSpec, cfg: &RegimeConfig) -> Result<RegimeEvidence> {
    env.validate()?;
    let level = (cfg.horizon as f64).sqrt();
    let runs: Vec<(u64, i64, i64)> = rng::replicate(cfg.seed, cfg.replicas, |_, rng| {
        let mut w = Walker::new(env);
        let mut returns = 0u64;
        while w.n < cfg.horizon {
            w.step(f, rng::uniform(rng));
            if w.x == 0 && w.n > cfg.burn_in {
                returns += 1;
            }
        }
        (returns, w.max_x, w.x)
    });
    let n = runs.len().max(1) as f64;
    let returned = runs.iter().filter(|r| r.0 > 0).count() as f64;
    let escaped = runs.iter().filter(|r| r.0 == 0 && (r.2.abs() as f64) >= level).count() as f64;
    Ok(RegimeEvidence {
        heuristic: true,
        return_fraction: returned / n,
        mean_returns: runs.iter().map(|r| r.0 as f64).sum::<f64>() / n,
        mean_max_level: runs.iter().map(|r| r.1 as f64).sum::<f64>() / n,
        mean_abs_final: runs.iter().map(|r| r.2.abs() as f64).sum::<f64>() / n,
        escape_fraction: escaped / n,
        srw_no_return_baseline: srw_no_return_probability(cfg.burn_in, cfg.horizon),
        replicas: cfg.replicas,
        horizon: cfg.horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::urn::UrnState;

    fn env() -> EnvironmentSpec {
        EnvironmentSpec::homogeneous(UrnState::new(0.5, 2.0).unwrap())
    }

    #[test]
    fn biased_walk_never_returns() {
        let f = ReinforcementFunction::constant(0.9).unwrap();
        let cfg = RegimeConfig { horizon: 20_000, replicas: 200, ..Default::default() };
        let e = empirical_regime(&f, env(), &cfg).unwrap();
        assert_eq!(e.return_fraction, 0.0);
        assert_eq!(e.escape_fraction, 1.0);
    }

    #[test]
    fn symmetric_walk_follows_arcsine_law() {
        let f = ReinforcementFunction::constant(0.5).unwrap();
        let cfg = RegimeConfig { horizon: 100_000, replicas: 1000, burn_in: 1000, seed: 3 };
        let e = empirical_regime(&f, env(), &cfg).unwrap();
        let q = e.srw_no_return_baseline;
        let se = (q * (1.0 - q) / 1000.0).sqrt();
        assert!((1.0 - e.return_fraction - q).abs() < 4.0 * se, "{e:?}");
    }
}
