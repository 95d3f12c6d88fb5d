use serde::Serialize;

use super::{simulate_walk_with, EnvironmentSpec, RecordLevel, StopRule, WalkOptions, WalkRecord, WalkStatus, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::funcs::{analyze, ReinforcementFunction};
use crate::rng;
use crate::stats::{self, MeanSe};
use crate::urn::UrnProcess;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct FunctionalReport {
    pub T_a: Option<u64>,
    pub U_Ta: u64,
    pub Dplus_Ta: f64,
    pub Xplus_Ta: i64,
    pub M_Ta: f64,
    /// Where the per-step `M⁺` series was written, if anywhere.
    pub M_series_ref: Option<String>,
    #[serde(skip)]
    pub m_series: Vec<f64>,
}

/// Functionals at the end of a record (the hitting time when one fired).
pub fn walk_functionals(record: &WalkRecord) -> FunctionalReport {
    let m_series = record
        .series
        .as_ref()
        .map(|s| s.xplus.iter().zip(&s.dplus).map(|(x, d)| *x as f64 - d).collect())
        .unwrap_or_default();
    FunctionalReport {
        T_a: record.hit_time(),
        U_Ta: record.u,
        Dplus_Ta: record.dplus,
        Xplus_Ta: record.xplus,
        M_Ta: record.mplus(),
        M_series_ref: None,
        m_series,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// Full walk simulation.
    Full,
    /// Negative excursions collapsed to a single counted left step.
    Collapsed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftEquationReport {
    pub a: i64,
    pub u_mean: f64,
    pub u_stderr: f64,
    pub dplus_mean: f64,
    pub dplus_stderr: f64,
    /// `sqrt(se_U² + se_D²)`.
    pub combined_stderr: f64,
    /// Standard error of the per-replica sum `U + D⁺`.
    pub paired_stderr: f64,
    pub residual: f64,
    pub replicas: usize,
    pub capped: usize,
    pub sampler: Sampler,
}

impl DriftEquationReport {
    /// `|a − (Ê[U] + Ê[D⁺])|` in units of the combined standard error.
    pub fn z_score(&self) -> f64 {
        if self.combined_stderr == 0.0 {
            if self.residual == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.residual.abs() / self.combined_stderr
        }
    }
}

/// `(U_{T_a}, D⁺_{T_a}, capped)` with negative excursions collapsed.
///
/// Valid when `f ≥ 1/2`: an excursion below 0 then returns almost surely,
/// and it touches neither the urns at sites `≥ 0` nor `D⁺`, so only the
/// left step out of 0 (counted in `U`) matters.
fn collapsed_run(
    f: &ReinforcementFunction,
    env: EnvironmentSpec,
    a: i64,
    cap: u64,
    rng: &mut rng::StreamRng,
) -> (u64, f64, bool) {
    let mut urns: Vec<UrnProcess> = (0..a).map(|x| UrnProcess::new(env.site(x))).collect();
    let (mut x, mut u, mut d, mut n) = (0i64, 0u64, 0.0f64, 0u64);
    while x < a {
        if n >= cap {
            return (u, d, true);
        }
        let urn = &mut urns[x as usize];
        let p = f.eval(urn.alpha());
        let right = rng::uniform(rng) < p;
        urn.record(right);
        d += 2.0 * p - 1.0;
        n += 1;
        if right {
            x += 1;
        } else if x == 0 {
            u += 1;
        } else {
            x -= 1;
        }
    }
    (u, d, false)
}

/// Monte Carlo check of `a = E[U_{T_a}] + E[D⁺_{T_a}]`.
///
/// `sampler = None` picks the collapsed sampler whenever `f ≥ 1/2`.
pub fn drift_equation(
    f: &ReinforcementFunction,
    env: EnvironmentSpec,
    a: i64,
    replicas: usize,
    seed: u64,
    cap: Option<u64>,
    sampler: Option<Sampler>,
) -> Result<DriftEquationReport> {
    if a <= 0 {
        return Err(Error::InvalidParameter(format!("level a = {a} must be positive")));
    }
    env.validate()?;
    let cap = cap.unwrap_or(DEFAULT_CAP);
    let ge_half = analyze(f).map(|r| r.ge_half).unwrap_or(false);
    let sampler = match sampler {
        Some(Sampler::Collapsed) if !ge_half => {
            return Err(Error::HypothesisUnmet("collapsed excursions need f >= 1/2".into()))
        }
        Some(s) => s,
        None if ge_half => Sampler::Collapsed,
        None => Sampler::Full,
    };
    let runs: Vec<(u64, f64, bool)> = rng::replicate(seed, replicas, |r, rng| match sampler {
        Sampler::Collapsed => collapsed_run(f, env, a, cap, rng),
        Sampler::Full => {
            let opts = WalkOptions { stop: StopRule::HitLevel(a), cap, level: RecordLevel::Summary };
            let rec = simulate_walk_with(f, env, opts, rng, seed, r as u64).expect("validated inputs");
            (rec.u, rec.dplus, rec.status == WalkStatus::CapReached)
        }
    });
    let kept: Vec<&(u64, f64, bool)> = runs.iter().filter(|r| !r.2).collect();
    let us: Vec<f64> = kept.iter().map(|r| r.0 as f64).collect();
    let ds: Vec<f64> = kept.iter().map(|r| r.1).collect();
    let sums: Vec<f64> = kept.iter().map(|r| r.0 as f64 + r.1).collect();
    let (mu, md, ms) = (MeanSe::of(&us), MeanSe::of(&ds), MeanSe::of(&sums));
    Ok(DriftEquationReport {
        a,
        u_mean: mu.mean,
        u_stderr: mu.stderr,
        dplus_mean: md.mean,
        dplus_stderr: md.stderr,
        combined_stderr: stats::combined(mu.stderr, md.stderr),
        paired_stderr: ms.stderr,
        residual: a as f64 - (mu.mean + md.mean),
        replicas,
        capped: runs.len() - kept.len(),
        sampler,
    })
}
