//! The per-site drift `δ_n = Σ_{k=0}^{n} (2 f(α_k) − 1)` and estimators of
//! its limit.
//!
//! `δ_n⁺` and `δ_n⁻` accumulate the positive and negative parts of the
//! increments, and `δ_n` is defined as their difference so the
//! decomposition holds exactly.
//!
//! [`estimate_delta_inf`] first classifies the regime from the fixed-point
//! report of `f`, then
//!
//! - in the convergent regime combines an exact DP prefix, a Monte Carlo
//!   continuation started from the DP law, and a fitted `c·N^{-1/2}` tail;
//! - in the divergent regimes reports a tagged infinite value together with a
//!   finite estimate of the opposite part;
//! - otherwise reports truncated values only.

use std::fmt;
use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::funcs::{analyze, derivative, FixedPointReport, ReinforcementFunction};
use crate::rng::{self, StreamRng};
use crate::stats::{self, MeanSe, TailFit};
use crate::urn::{exact_drift, UrnDp, UrnProcess, UrnState, MAX_DP_HORIZON};

#[derive(Debug, Clone, PartialEq)]
pub struct DriftSeries {
    pub values: Vec<f64>,
    pub pos: Vec<f64>,
    pub neg: Vec<f64>,
}

impl DriftSeries {
    pub fn last(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }
}

/// Pathwise series `δ_0..=δ_n` along one urn trajectory.
pub fn drift_series(f: &ReinforcementFunction, init: UrnState, n: usize, seed: u64, stream: u64) -> DriftSeries {
    let mut rng = rng::stream(seed, stream);
    let mut urn = UrnProcess::new(init);
    let (mut values, mut pos, mut neg) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
    let (mut p, mut q) = (0.0, 0.0);
    for k in 0..=n {
        let fa = f.eval(urn.alpha());
        let inc = 2.0 * fa - 1.0;
        if inc > 0.0 {
            p += inc;
        } else {
            q -= inc;
        }
        values.push(p - q);
        pos.push(p);
        neg.push(q);
        if k < n {
            urn.record(rng::uniform(&mut rng) < fa);
        }
    }
    DriftSeries { values, pos, neg }
}

/// Expected series `E[δ_n]`, `E[δ_n^±]` from the exact urn law.
pub fn exact_drift_series(f: &ReinforcementFunction, init: UrnState, n: usize) -> Result<DriftSeries> {
    let d = exact_drift(f, init, n)?;
    Ok(DriftSeries { values: d.mean, pos: d.pos, neg: d.neg })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    ConvergentFinite,
    DivergentPlus,
    DivergentMinus,
    PartsInfinite,
    Unknown,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Regime of `E[δ_∞]` implied by the fixed-point structure of `f`.
pub fn regime_of(report: &FixedPointReport) -> Regime {
    if let Some(fp) = report.unique_point() {
        if fp.p > 0.5 + 1e-9 {
            return Regime::DivergentPlus;
        }
        if fp.p < 0.5 - 1e-9 {
            return Regime::DivergentMinus;
        }
        if !report.fprime_half_zero() {
            return Regime::PartsInfinite;
        }
        return match report.fsecond_half_sign() {
            1 => Regime::DivergentPlus,
            -1 => Regime::DivergentMinus,
            _ => Regime::ConvergentFinite,
        };
    }
    // With f >= 1/2 the negative part vanishes, so a stable fixed point
    // above 1/2 is reached with positive probability and E[δ_∞] = +∞.
    let stable_above = report.fixed_points.iter().any(|fp| fp.stable && fp.p > 0.5 + 1e-9);
    if report.ge_half && stable_above {
        return Regime::DivergentPlus;
    }
    Regime::Unknown
}

/// A drift value that may be infinite or undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftValue {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Undefined,
}

impl DriftValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            DriftValue::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for DriftValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriftValue::Finite(v) => write!(f, "{v}"),
            DriftValue::PlusInfinity => f.write_str("+inf"),
            DriftValue::MinusInfinity => f.write_str("-inf"),
            DriftValue::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for DriftValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DriftValue::Finite(v) => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dp,
    Mc,
    #[serde(rename = "dp+mc")]
    DpMc,
    #[serde(rename = "dp+mc+tail")]
    DpMcTail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub tail_model: &'static str,
    /// Added to the truncated mean.
    pub correction: f64,
    /// Disagreement with a free-exponent fit, used as a systematic error.
    pub error: f64,
    pub fitted_exponent: f64,
    pub fit_window: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartEstimate {
    pub value: DriftValue,
    pub truncated: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftEstimate {
    pub mean: DriftValue,
    pub stderr: f64,
    #[serde(rename = "N")]
    pub n_trunc: usize,
    pub tail: Option<TailReport>,
    pub regime: Regime,
    pub method: Method,
    /// Estimate of `E[δ_N]` at the truncation horizon.
    pub truncated_mean: f64,
    pub pos_part: PartEstimate,
    pub neg_part: PartEstimate,
    pub replicas: usize,
    pub z: f64,
}

impl DriftEstimate {
    /// Half-width of the confidence interval, including the tail error.
    pub fn half_width(&self) -> f64 {
        self.z * self.stderr + self.tail.as_ref().map_or(0.0, |t| t.error)
    }

    /// Confidence interval for `E[δ_∞]`; infinite ends for divergent regimes.
    pub fn ci(&self) -> Option<(f64, f64)> {
        match self.mean {
            DriftValue::Finite(m) => Some((m - self.half_width(), m + self.half_width())),
            DriftValue::PlusInfinity => Some((f64::INFINITY, f64::INFINITY)),
            DriftValue::MinusInfinity => Some((f64::NEG_INFINITY, f64::NEG_INFINITY)),
            DriftValue::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftConfig {
    pub n_dp: usize,
    pub n_mc: usize,
    pub replicas: usize,
    pub z: f64,
    pub seed: u64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig { n_dp: 10_000, n_mc: 100_000, replicas: 1_000, z: stats::Z99, seed: 0 }
    }
}

/// Per-replica sums `(δ, δ⁺, δ⁻)` over the terms with indices in
/// `(n0, n]` for each checkpoint `n`, starting from `start` at time `n0`.
/// With `include_start` the term at `n0` itself is also counted.
fn run_sums(
    f: &ReinforcementFunction,
    start: UrnProcess,
    include_start: bool,
    checkpoints: &[usize],
    rng: &mut StreamRng,
) -> Vec<[f64; 3]> {
    let mut urn = start;
    let mut out = Vec::with_capacity(checkpoints.len());
    let (mut p, mut q) = (0.0, 0.0);
    let mut fa = f.eval(urn.alpha());
    if include_start {
        let inc = 2.0 * fa - 1.0;
        if inc > 0.0 {
            p += inc;
        } else {
            q -= inc;
        }
    }
    let mut n = urn.steps() as usize;
    for &cp in checkpoints {
        while n < cp {
            urn.record(rng::uniform(rng) < fa);
            n += 1;
            fa = f.eval(urn.alpha());
            let inc = 2.0 * fa - 1.0;
            if inc > 0.0 {
                p += inc;
            } else {
                q -= inc;
            }
        }
        out.push([p - q, p, q]);
    }
    out
}

fn cdf_of(row: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    row.iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn sample_index(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().unwrap_or(&1.0);
    let target = u * total;
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

/// Monte Carlo continuation from the DP law at time `dp.n()`.
fn continue_from_dp(
    f: &ReinforcementFunction,
    init: UrnState,
    dp: &UrnDp,
    checkpoints: &[usize],
    replicas: usize,
    seed: u64,
) -> Vec<Vec<[f64; 3]>> {
    let cdf = cdf_of(dp.row());
    let n0 = dp.n() as u64;
    rng::replicate(seed, replicas, |_, rng| {
        let k = sample_index(&cdf, rng::uniform(rng)) as u64;
        run_sums(f, UrnProcess::at(init, n0, k), false, checkpoints, rng)
    })
}

fn column(runs: &[Vec<[f64; 3]>], cp: usize, part: usize) -> Vec<f64> {
    runs.iter().map(|r| r[cp][part]).collect()
}

fn log_grid(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut v: Vec<usize> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    v.dedup();
    v
}

/// Fit the tail on the last decade of the exact series and extrapolate
/// from `n_mc` to infinity.
fn tail_from_exact(mean: &[f64], n_dp: usize, n_mc: usize) -> Option<TailReport> {
    let lo = (n_dp / 10).max(10);
    if n_dp < 100 {
        return None;
    }
    let idx = log_grid(lo, n_dp, 60);
    let ns: Vec<f64> = idx.iter().map(|&i| i as f64).collect();
    let vals: Vec<f64> = idx.iter().map(|&i| mean[i]).collect();
    let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread == 0.0 {
        return Some(TailReport {
            tail_model: "sqrt",
            correction: 0.0,
            error: 0.0,
            fitted_exponent: f64::NAN,
            fit_window: (lo, n_dp),
        });
    }
    let sqrt_fit = stats::fit_tail_fixed(&ns, &vals, 0.5);
    let free_fit: TailFit = stats::fit_tail(&ns, &vals);
    let at = n_mc as f64;
    let correction = sqrt_fit.tail_beyond(at);
    let error = (correction - free_fit.tail_beyond(at)).abs();
    Some(TailReport { tail_model: "sqrt", correction, error, fitted_exponent: free_fit.exponent, fit_window: (lo, n_dp) })
}

/// Estimate `E[δ_∞]` for the urn started at `init`.
pub fn estimate_delta_inf(f: &ReinforcementFunction, init: UrnState, config: &DriftConfig) -> Result<DriftEstimate> {
    let report = analyze(f)?;
    estimate_with_report(f, &report, init, config)
}

pub fn estimate_with_report(
    f: &ReinforcementFunction,
    report: &FixedPointReport,
    init: UrnState,
    config: &DriftConfig,
) -> Result<DriftEstimate> {
    init.validate()?;
    if config.n_dp > MAX_DP_HORIZON {
        return Err(Error::HorizonTooLarge { requested: config.n_dp, limit: MAX_DP_HORIZON });
    }
    let regime = regime_of(report);
    let exact = exact_drift(f, init, config.n_dp)?;
    let n_dp = config.n_dp;

    let use_mc = config.n_mc > n_dp && config.replicas > 1;
    let (n_trunc, trunc, se, method) = if use_mc {
        let runs = continue_from_dp(f, init, &exact.terminal, &[config.n_mc], config.replicas, config.seed);
        let parts: Vec<MeanSe> = (0..3).map(|j| MeanSe::of(&column(&runs, 0, j))).collect();
        let base = [exact.mean[n_dp], exact.pos[n_dp], exact.neg[n_dp]];
        let trunc = [base[0] + parts[0].mean, base[1] + parts[1].mean, base[2] + parts[2].mean];
        let se = [parts[0].stderr, parts[1].stderr, parts[2].stderr];
        (config.n_mc, trunc, se, Method::DpMc)
    } else {
        (n_dp, [exact.mean[n_dp], exact.pos[n_dp], exact.neg[n_dp]], [0.0; 3], Method::Dp)
    };

    let part = |value: DriftValue, i: usize| PartEstimate { value, truncated: trunc[i], stderr: se[i] };
    let finite = |i: usize| DriftValue::Finite(trunc[i]);

    let (mean, tail, method, pos_part, neg_part) = match regime {
        Regime::ConvergentFinite => {
            let tail = tail_from_exact(&exact.mean, n_dp, n_trunc);
            let corr = tail.as_ref().map_or(0.0, |t| t.correction);
            let method = if tail.is_some() && method == Method::DpMc { Method::DpMcTail } else { method };
            (DriftValue::Finite(trunc[0] + corr), tail, method, part(finite(1), 1), part(finite(2), 2))
        }
        Regime::DivergentPlus => {
            (DriftValue::PlusInfinity, None, method, part(DriftValue::PlusInfinity, 1), part(finite(2), 2))
        }
        Regime::DivergentMinus => {
            (DriftValue::MinusInfinity, None, method, part(finite(1), 1), part(DriftValue::MinusInfinity, 2))
        }
        Regime::PartsInfinite => (
            DriftValue::Undefined,
            None,
            method,
            part(DriftValue::PlusInfinity, 1),
            part(DriftValue::PlusInfinity, 2),
        ),
        Regime::Unknown => (finite(0), None, method, part(finite(1), 1), part(finite(2), 2)),
    };

    let stderr = if matches!(mean, DriftValue::Finite(_)) { se[0] } else { 0.0 };
    Ok(DriftEstimate {
        mean,
        stderr,
        n_trunc,
        tail,
        regime,
        method,
        truncated_mean: trunc[0],
        pos_part,
        neg_part,
        replicas: if use_mc { config.replicas } else { 0 },
        z: config.z,
    })
}

impl DriftEstimate {
    pub fn write_json<W: Write>(&self, w: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(w, self).map_err(std::io::Error::from)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub pos_part: f64,
    pub pos_stderr: f64,
    pub neg_part: f64,
    pub neg_stderr: f64,
    /// Exact `(E[δ_N], E[δ_N⁺], E[δ_N⁻])` when the DP horizon allows it.
    pub exact: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartsProfile {
    pub checkpoints: Vec<Checkpoint>,
    pub pos_growth_exponent: Option<f64>,
    pub neg_growth_exponent: Option<f64>,
    /// Last two checkpoints of `E[δ_N⁻]` within 3 combined standard errors.
    pub neg_cauchy: bool,
    pub pos_cauchy: bool,
    /// First-to-last increase of `E[δ_N⁺]` beyond 3 combined standard errors.
    pub pos_growing: bool,
    pub neg_growing: bool,
    pub replicas: usize,
}

impl PartsProfile {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "N,mean,stderr,pos_part,neg_part")?;
        for c in &self.checkpoints {
            writeln!(w, "{},{},{},{},{}", c.n, c.mean, c.stderr, c.pos_part, c.neg_part)?;
        }
        Ok(())
    }
}

/// `100, 200, 500, 1000, …` up to and including `n`.
pub fn checkpoints_up_to(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 100usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let c = decade * m;
            if c >= n {
                break 'outer;
            }
            out.push(c);
        }
        decade *= 10;
    }
    out.push(n);
    out
}

/// Growth of `E[δ_N⁺]` and `E[δ_N⁻]` at geometric checkpoints.
pub fn drift_parts_profile(
    f: &ReinforcementFunction,
    init: UrnState,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<PartsProfile> {
    if n < 100 {
        return Err(Error::InvalidParameter(format!("profile horizon {n} must be at least 100")));
    }
    init.validate()?;
    let cps = checkpoints_up_to(n);
    let exact = if n <= MAX_DP_HORIZON { Some(exact_drift(f, init, n)?) } else { None };
    let runs = rng::replicate(seed, replicas, |_, rng| run_sums(f, UrnProcess::new(init), true, &cps, rng));

    let checkpoints: Vec<Checkpoint> = cps
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let m = MeanSe::of(&column(&runs, i, 0));
            let p = MeanSe::of(&column(&runs, i, 1));
            let q = MeanSe::of(&column(&runs, i, 2));
            Checkpoint {
                n: c,
                mean: m.mean,
                stderr: m.stderr,
                pos_part: p.mean,
                pos_stderr: p.stderr,
                neg_part: q.mean,
                neg_stderr: q.stderr,
                exact: exact.as_ref().map(|e| [e.mean[c], e.pos[c], e.neg[c]]),
            }
        })
        .collect();

    let growth = |part: usize| -> Option<f64> {
        let hi = n as f64;
        let window: Vec<usize> = match &exact {
            Some(_) => log_grid((n / 10).max(1), n, 40),
            None => cps.iter().copied().filter(|&c| c as f64 >= hi / 10.0).collect(),
        };
        let xs: Vec<f64> = window.iter().map(|&c| c as f64).collect();
        let ys: Vec<f64> = match &exact {
            Some(e) => window.iter().map(|&c| [&e.mean, &e.pos, &e.neg][part][c]).collect(),
            None => window
                .iter()
                .map(|c| {
                    let i = cps.iter().position(|x| x == c).unwrap();
                    checkpoints[i].part(part).0
                })
                .collect(),
        };
        stats::loglog_slope(&xs, &ys)
    };

    let last = checkpoints.len() - 1;
    let cauchy = |part: usize| {
        if last == 0 {
            return true;
        }
        let (a, sa) = checkpoints[last - 1].part(part);
        let (b, sb) = checkpoints[last].part(part);
        (b - a).abs() <= 3.0 * stats::combined(sa, sb)
    };
    let growing = |part: usize| {
        let (a, sa) = checkpoints[0].part(part);
        let (b, sb) = checkpoints[last].part(part);
        b - a > 3.0 * stats::combined(sa, sb)
    };

    Ok(PartsProfile {
        pos_growth_exponent: growth(1),
        neg_growth_exponent: growth(2),
        neg_cauchy: cauchy(2),
        pos_cauchy: cauchy(1),
        pos_growing: growing(1),
        neg_growing: growing(2),
        checkpoints,
        replicas,
    })
}

impl Checkpoint {
    fn part(&self, i: usize) -> (f64, f64) {
        match i {
            0 => (self.mean, self.stderr),
            1 => (self.pos_part, self.pos_stderr),
            _ => (self.neg_part, self.neg_stderr),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub p: f64,
    pub a: f64,
    pub n: usize,
    pub empirical_variance: f64,
    pub target: f64,
    pub ratio: f64,
    pub retained: usize,
    pub replicas: usize,
    /// Same conditional variance computed from the exact urn law.
    pub exact_variance: Option<f64>,
}

/// Width of the conditioning window `|α_n − p| < CLT_WINDOW`.
pub const CLT_WINDOW: f64 = 0.1;

/// Compare the variance of `√n (α_n − p)` with `p(1−p)/(1 − 2a)`, `a = f'(p)`.
pub fn clt_check(
    f: &ReinforcementFunction,
    p: f64,
    init: UrnState,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<CltReport> {
    init.validate()?;
    let (a, _) = derivative(f, p);
    if a >= 0.5 {
        return Err(Error::UnsupportedRegime(format!("f'(p) = {a} >= 1/2 at p = {p}")));
    }
    if (f.eval_raw(p) - p).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("{p} is not a fixed point of {f}")));
    }
    let target = p * (1.0 - p) / (1.0 - 2.0 * a);
    let scale = (n as f64).sqrt();
    let finals = rng::replicate(seed, replicas, |_, rng| {
        let mut urn = UrnProcess::new(init);
        for _ in 0..n {
            let fa = f.eval(urn.alpha());
            urn.record(rng::uniform(rng) < fa);
        }
        urn.alpha()
    });
    let kept: Vec<f64> = finals.iter().filter(|x| (**x - p).abs() < CLT_WINDOW).map(|x| scale * (x - p)).collect();
    let empirical_variance = MeanSe::variance(&kept);

    let exact_variance = if n <= MAX_DP_HORIZON {
        let d = exact_drift(f, init, n)?;
        let dp = &d.terminal;
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (k, &pr) in dp.row().iter().enumerate() {
            let x = dp.alpha_at(k);
            if (x - p).abs() < CLT_WINDOW {
                let z = scale * (x - p);
                w += pr;
                m1 += pr * z;
                m2 += pr * z * z;
            }
        }
        (w > 0.0).then(|| m2 / w - (m1 / w).powi(2))
    } else {
        None
    };

    Ok(CltReport {
        p,
        a,
        n,
        empirical_variance,
        target,
        ratio: empirical_variance / target,
        retained: kept.len(),
        replicas,
        exact_variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn init() -> UrnState {
        UrnState::new(0.5, 2.0).unwrap()
    }

    #[test]
    fn series_trivial_cases() {
        let half = ReinforcementFunction::constant(0.5).unwrap();
        assert!(drift_series(&half, init(), 50, 1, 0).values.iter().all(|v| *v == 0.0));
        let c = ReinforcementFunction::constant(0.75).unwrap();
        let s = drift_series(&c, init(), 50, 1, 0);
        for (n, v) in s.values.iter().enumerate() {
            assert_eq!(*v, 0.5 * (n + 1) as f64);
        }
        let polya = exact_drift_series(&ReinforcementFunction::polya(), init(), 1000).unwrap();
        assert!(polya.values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn decomposition_is_exact_pathwise() {
        let s = drift_series(&ReinforcementFunction::mix(), UrnState::new(0.2, 1.0).unwrap(), 2000, 9, 4);
        for i in 0..s.values.len() {
            assert_eq!(s.values[i], s.pos[i] - s.neg[i]);
            if i > 0 {
                assert!(s.pos[i] >= s.pos[i - 1] && s.neg[i] >= s.neg[i - 1]);
                assert!((s.values[i] - s.values[i - 1]).abs() <= 1.0);
            }
        }
    }

    #[test]
    fn regimes_of_builtins() {
        let r = |f: ReinforcementFunction| regime_of(&analyze(&f).unwrap());
        assert_eq!(r(ReinforcementFunction::constant(0.5).unwrap()), Regime::ConvergentFinite);
        assert_eq!(r(ReinforcementFunction::constant(0.75).unwrap()), Regime::DivergentPlus);
        assert_eq!(r(ReinforcementFunction::constant(0.25).unwrap()), Regime::DivergentMinus);
        assert_eq!(r(ReinforcementFunction::quartic(2.0).unwrap()), Regime::ConvergentFinite);
        assert_eq!(r(ReinforcementFunction::mix()), Regime::DivergentPlus);
        assert_eq!(r(ReinforcementFunction::linear(0.4).unwrap()), Regime::PartsInfinite);
        let q = ReinforcementFunction::quartic(2.0).unwrap();
        assert_eq!(r(q.family(6.0).unwrap()), Regime::DivergentPlus);
        assert_eq!(r(q.family(4.0).unwrap()), Regime::Unknown);
    }

    #[test]
    fn estimate_constant_half_is_exactly_zero() {
        let cfg = DriftConfig { n_dp: 200, n_mc: 400, replicas: 20, ..Default::default() };
        let e = estimate_delta_inf(&ReinforcementFunction::constant(0.5).unwrap(), init(), &cfg).unwrap();
        assert_eq!(e.mean, DriftValue::Finite(0.0));
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.regime, Regime::ConvergentFinite);
    }

    #[test]
    fn estimate_constant_three_quarters_diverges() {
        let cfg = DriftConfig { n_dp: 100, n_mc: 200, replicas: 10, ..Default::default() };
        let e = estimate_delta_inf(&ReinforcementFunction::constant(0.75).unwrap(), init(), &cfg).unwrap();
        assert_eq!(e.mean, DriftValue::PlusInfinity);
        assert_eq!(e.neg_part.value, DriftValue::Finite(0.0));
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(json["mean"], "+inf");
        assert_eq!(json["regime"], "DivergentPlus");
        assert_eq!(json["N"], 200);
    }

    #[test]
    fn quartic_estimate_matches_dp_limit() {
        let cfg = DriftConfig { n_dp: 2000, n_mc: 8000, replicas: 200, seed: 5, ..Default::default() };
        let e = estimate_delta_inf(&ReinforcementFunction::quartic(2.0).unwrap(), UrnState::new(0.5, 1.0).unwrap(), &cfg)
            .unwrap();
        let m = e.mean.finite().unwrap();
        assert_eq!(e.method, Method::DpMcTail);
        // independent long-horizon DP limit
        assert!((m - 0.18558).abs() < e.half_width() + 2e-3, "{m} ± {}", e.half_width());
    }

    #[test]
    fn continuation_sampler_matches_exact_dp() {
        let f = ReinforcementFunction::mix();
        let init = UrnState::new(0.3, 2.0).unwrap();
        let exact = exact_drift(&f, init, 150).unwrap();
        let mut dp = UrnDp::new(init);
        for _ in 0..50 {
            dp.advance(&f);
        }
        let runs = continue_from_dp(&f, init, &dp, &[150], 20_000, 3);
        let m = MeanSe::of(&column(&runs, 0, 0));
        let want = exact.mean[150] - exact.mean[50];
        assert!((m.mean - want).abs() < 4.0 * m.stderr, "{} vs {want}", m.mean);
    }

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints_up_to(100), vec![100]);
        assert_eq!(checkpoints_up_to(1000), vec![100, 200, 500, 1000]);
        assert_eq!(checkpoints_up_to(3000), vec![100, 200, 500, 1000, 2000, 3000]);
    }

    #[test]
    fn clt_targets_and_precondition() {
        let half = ReinforcementFunction::constant(0.5).unwrap();
        let r = clt_check(&half, 0.5, init(), 400, 2000, 1).unwrap();
        assert_eq!(r.target, 0.25);
        assert!((r.exact_variance.unwrap() - 0.25).abs() < 0.01);
        let lin = ReinforcementFunction::linear(0.4).unwrap();
        assert!((clt_check(&lin, 0.5, init(), 10, 10, 1).unwrap().target - 1.25).abs() < 1e-12);
        let steep = ReinforcementFunction::linear(0.6).unwrap();
        assert!(matches!(clt_check(&steep, 0.5, init(), 10, 10, 1), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn profile_csv_header() {
        let p = drift_parts_profile(&ReinforcementFunction::quartic(2.0).unwrap(), init(), 200, 50, 2).unwrap();
        assert!(p.checkpoints.iter().all(|c| c.neg_part == 0.0));
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("N,mean,stderr,pos_part,neg_part\n100,"));
    }
}
