//! Threshold search and parameter sweeps for `E[δ_∞]`.
//!
//! Two axes are supported, both with initial urns `(1/2, 2l)`:
//! - `u`: the family `f_u` built from a base function at fixed `l`.
//!   `E[δᵘ_∞]/u` is nondecreasing in `u`.
//! - `l`: a fixed function with the initial mass varying.
//!   `E[δ_∞]` is non-increasing in `l`.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::drift::{estimate_delta_inf, DriftConfig, DriftEstimate, DriftValue, Regime};
use crate::error::{Error, Result};
use crate::funcs::{analyze, symmetry_defect, ReinforcementFunction};
use crate::rng;
use crate::stats;
use crate::urn::UrnState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "axis", rename_all = "lowercase")]
pub enum Axis {
    /// Scan `u` in `f_u` with the initial mass `l` held fixed.
    U { l: f64 },
    /// Scan `l` with the function `f_u` held fixed.
    L { u: f64 },
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::U { .. } => "u",
            Axis::L { .. } => "l",
        }
    }

    fn increasing(&self) -> bool {
        matches!(self, Axis::U { .. })
    }

    /// Function and initial urn at parameter value `t`.
    pub fn point(&self, base: &ReinforcementFunction, t: f64) -> Result<(ReinforcementFunction, UrnState)> {
        let (u, l) = match *self {
            Axis::U { l } => (t, l),
            Axis::L { u } => (u, t),
        };
        let f = if u == 1.0 { base.clone() } else { base.family(u)? };
        Ok((f, UrnState::new(0.5, 2.0 * l)?))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdStatus {
    Bracketed,
    NoCrossing,
    BudgetExhausted,
}

/// Position of a confidence interval relative to the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointEstimate {
    pub param: f64,
    pub mean: DriftValue,
    pub stderr: f64,
    pub ci: Option<(f64, f64)>,
    pub regime: Regime,
    pub replicas: usize,
    #[serde(rename = "N")]
    pub n_trunc: usize,
    pub side: Side,
}

impl PointEstimate {
    fn new(param: f64, est: &DriftEstimate, target: f64) -> Self {
        // Truncated estimates in an unknown regime carry no tail bound.
        let ci = if est.regime == Regime::Unknown { None } else { est.ci() };
        let side = match ci {
            Some((lo, _)) if lo > target => Side::Above,
            Some((_, hi)) if hi < target => Side::Below,
            _ => Side::Unresolved,
        };
        PointEstimate {
            param,
            mean: est.mean,
            stderr: est.half_width() / est.z,
            ci,
            regime: est.regime,
            replicas: est.replicas,
            n_trunc: est.n_trunc,
            side,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Iteration {
    pub lo: f64,
    pub hi: f64,
    pub probe: PointEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub est_lo: PointEstimate,
    pub est_hi: PointEstimate,
    pub status: ThresholdStatus,
    pub target: f64,
    pub iterations: Vec<Iteration>,
}

impl ThresholdResult {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// JSON with the log omitted.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "axis": self.axis.name(),
            "lo": self.lo,
            "hi": self.hi,
            "est_lo": self.est_lo,
            "est_hi": self.est_hi,
            "status": self.status,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    /// Starting point for every estimate; `replicas` doubles on demand.
    pub drift: DriftConfig,
    pub max_replicas: usize,
    pub max_iterations: usize,
    /// Stop once `hi − lo ≤ rel_tol · (hi + lo)/2`.
    pub rel_tol: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { drift: DriftConfig::default(), max_replicas: 8_000, max_iterations: 40, rel_tol: 0.05 }
    }
}

/// Check the standing assumptions on the base function.
pub fn check_base(f: &ReinforcementFunction) -> Result<()> {
    let (defect, t) = symmetry_defect(f);
    if defect > 1e-9 {
        let (l, r) = (0.5 - t, 0.5 + t);
        return Err(Error::SymmetryViolation { x: l, mirror: r, left: f.eval(l), right: f.eval(r) });
    }
    let rep = analyze(f)?;
    if !rep.unique_at_half() {
        return Err(Error::HypothesisUnmet("base function must have 1/2 as its unique fixed point".into()));
    }
    if rep.fsecond_half_sign() != 0 {
        return Err(Error::HypothesisUnmet(format!("base function needs f''(1/2) = 0, got {}", rep.fsecond_half)));
    }
    Ok(())
}

struct Evaluator<'a> {
    axis: Axis,
    base: &'a ReinforcementFunction,
    target: f64,
    budget: SearchBudget,
}

impl Evaluator<'_> {
    fn estimate(&self, t: f64, replicas: usize) -> Result<PointEstimate> {
        let (f, init) = self.axis.point(self.base, t)?;
        let label = format!("{}:{:016x}:{replicas}", self.axis.name(), t.to_bits());
        let cfg = DriftConfig { replicas, seed: rng::derive_seed(self.budget.drift.seed, &label), ..self.budget.drift };
        let est = estimate_delta_inf(&f, init, &cfg)?;
        Ok(PointEstimate::new(t, &est, self.target))
    }

    /// Estimate at `t`, doubling replicas until the side is resolved.
    fn resolve(&self, t: f64) -> Result<PointEstimate> {
        let mut reps = self.budget.drift.replicas.max(2);
        loop {
            let est = self.estimate(t, reps)?;
            // Divergent or DP-only estimates do not improve with more replicas.
            if est.side != Side::Unresolved || est.replicas == 0 || reps >= self.budget.max_replicas {
                return Ok(est);
            }
            reps = (reps * 2).min(self.budget.max_replicas);
        }
    }

    fn low_side(&self) -> Side {
        if self.axis.increasing() {
            Side::Below
        } else {
            Side::Above
        }
    }
}

/// CI-aware bisection for the crossing of `E[δ_∞] = target` in `[lo, hi]`.
pub fn find_threshold(
    axis: Axis,
    base: &ReinforcementFunction,
    range: (f64, f64),
    target: f64,
    budget: &SearchBudget,
) -> Result<ThresholdResult> {
    let (mut lo, mut hi) = range;
    if !(lo < hi && lo > 0.0 && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("search range [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    if !(budget.rel_tol > 0.0) {
        return Err(Error::InvalidParameter("relative tolerance must be > 0".into()));
    }
    check_base(base)?;
    let ev = Evaluator { axis, base, target, budget: *budget };
    let low_side = ev.low_side();

    let ends: Vec<Result<PointEstimate>> = [lo, hi].par_iter().map(|&t| ev.resolve(t)).collect();
    let mut ends = ends.into_iter();
    let mut est_lo = ends.next().unwrap()?;
    let mut est_hi = ends.next().unwrap()?;
    let result = |status, lo, hi, est_lo, est_hi, iterations| {
        Ok(ThresholdResult { axis, lo, hi, est_lo, est_hi, status, target, iterations })
    };

    if est_lo.side == Side::Unresolved || est_hi.side == Side::Unresolved {
        return result(ThresholdStatus::BudgetExhausted, lo, hi, est_lo, est_hi, vec![]);
    }
    if est_lo.side == est_hi.side {
        return result(ThresholdStatus::NoCrossing, lo, hi, est_lo, est_hi, vec![]);
    }
    if est_lo.side != low_side {
        return Err(Error::HypothesisUnmet(format!(
            "monotonicity violated on the {} axis: side {:?} at {lo} and {:?} at {hi}",
            axis.name(),
            est_lo.side,
            est_hi.side
        )));
    }

    let mut log = Vec::new();
    while hi - lo > budget.rel_tol * 0.5 * (hi + lo) {
        if log.len() >= budget.max_iterations {
            return result(ThresholdStatus::BudgetExhausted, lo, hi, est_lo, est_hi, log);
        }
        let w = hi - lo;
        // Midpoint first, then nudged probes when the midpoint stays unresolved.
        let probes = [0.5, 0.375, 0.625, 0.25, 0.75];
        let mut resolved = None;
        for frac in probes {
            let t = lo + frac * w;
            let est = ev.resolve(t)?;
            log.push(Iteration { lo, hi, probe: est.clone() });
            if est.side != Side::Unresolved {
                resolved = Some(est);
                break;
            }
        }
        let Some(est) = resolved else {
            return result(ThresholdStatus::BudgetExhausted, lo, hi, est_lo, est_hi, log);
        };
        if est.side == low_side {
            lo = est.param;
            est_lo = est;
        } else {
            hi = est.param;
            est_hi = est;
        }
    }
    result(ThresholdStatus::Bracketed, lo, hi, est_lo, est_hi, log)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub mean: DriftValue,
    /// Standard error including the tail error.
    pub stderr: f64,
    pub n_replicas: usize,
    #[serde(rename = "N_trunc")]
    pub n_trunc: usize,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityFlag {
    pub left: f64,
    pub right: f64,
    /// Size of the violation in combined standard errors.
    pub excess_sigmas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCurve {
    pub axis: Axis,
    pub rows: Vec<SweepRow>,
    pub flags: Vec<MonotonicityFlag>,
}

impl SweepCurve {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "param,mean,stderr,n_replicas,N_trunc")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{},{}", r.param, r.mean, r.stderr, r.n_replicas, r.n_trunc)?;
        }
        Ok(())
    }
}

/// Number of standard errors by which `(a, b)` breaks the expected ordering,
/// or `None` when it holds within `3` combined stderr.
fn violation(axis: Axis, a: &SweepRow, b: &SweepRow) -> Option<f64> {
    // On the u axis the monotone quantity is E[δᵘ]/u.
    let (sa, sb) = match axis {
        Axis::U { .. } => (a.param, b.param),
        Axis::L { .. } => (1.0, 1.0),
    };
    let (ma, mb) = (value(a.mean) / sa, value(b.mean) / sb);
    let drop = if axis.increasing() { ma - mb } else { mb - ma };
    if drop.is_nan() || drop <= 0.0 {
        return None;
    }
    let se = stats::combined(a.stderr / sa, b.stderr / sb);
    let k = if se > 0.0 { drop / se } else { f64::INFINITY };
    (k > 3.0).then_some(k)
}

fn value(v: DriftValue) -> f64 {
    match v {
        DriftValue::Finite(x) => x,
        DriftValue::PlusInfinity => f64::INFINITY,
        DriftValue::MinusInfinity => f64::NEG_INFINITY,
        DriftValue::Undefined => f64::NAN,
    }
}

/// Estimate `E[δ_∞]` on a sorted grid and flag monotonicity violations.
pub fn sweep(axis: Axis, base: &ReinforcementFunction, grid: &[f64], cfg: &DriftConfig) -> Result<SweepCurve> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("sweep grid must be strictly increasing".into()));
    }
    let rows: Vec<Result<SweepRow>> = grid
        .par_iter()
        .map(|&t| {
            let (f, init) = axis.point(base, t)?;
            let label = format!("{}:{:016x}", axis.name(), t.to_bits());
            let cfg = DriftConfig { seed: rng::derive_seed(cfg.seed, &label), ..*cfg };
            let est = estimate_delta_inf(&f, init, &cfg)?;
            Ok(SweepRow {
                param: t,
                mean: est.mean,
                stderr: est.half_width() / est.z,
                n_replicas: est.replicas,
                n_trunc: est.n_trunc,
                regime: est.regime,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let flags = rows
        .windows(2)
        .filter_map(|w| {
            violation(axis, &w[0], &w[1]).map(|k| MonotonicityFlag { left: w[0].param, right: w[1].param, excess_sigmas: k })
        })
        .collect();
    Ok(SweepCurve { axis, rows, flags })
}
