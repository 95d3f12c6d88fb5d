//! The reinforced walk on ℤ with one urn per site.
//!
//! At time `n` the walker at `x` steps right with probability `f(α̃ˣ)`, where
//! `α̃ˣ = (l₀α₀ + rights) / (l₀ + departures)` uses the initial state of site
//! `x` from the [`EnvironmentSpec`]. Each step consumes exactly one uniform,
//! so the departures from a given site form an urn process driven by the
//! uniforms consumed there.
//!
//! Functionals tracked along the way:
//!
//! - `U_n`: number of steps from 0 to −1;
//! - `X⁺_n`: sum of the steps taken from sites `≥ 0`, so `X⁺_n = max(X_n, 0) − U_n`;
//! - `D⁺_n`: sum of `2f(α̃) − 1` over departures from sites `≥ 0`;
//! - `M⁺_n = X⁺_n − D⁺_n`, a martingale.

mod functionals;
mod oracle;
mod regime;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use functionals::{drift_equation, walk_functionals, DriftEquationReport, FunctionalReport, Sampler};
pub use oracle::{enumerate_paths, exact_walk_oracle, OracleReport, ORACLE_MAX_HORIZON};
pub use regime::{empirical_regime, srw_no_return_probability, RegimeConfig, RegimeEvidence};

use crate::error::{Error, Result};
use crate::funcs::ReinforcementFunction;
use crate::rng::{self, StreamRng};
use crate::urn::{UrnProcess, UrnState};

/// Default step cap for hitting-time stop rules.
pub const DEFAULT_CAP: u64 = 100_000_000;

/// Initial urn states: `w0` at the origin, `w_plus` for `x ≥ 1` and
/// `w_minus` for `x ≤ −1` (falling back to `w_plus` when absent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    pub w0: UrnState,
    pub w_plus: UrnState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_minus: Option<UrnState>,
}

impl EnvironmentSpec {
    /// Every site starts at `w`.
    pub fn homogeneous(w: UrnState) -> Self {
        EnvironmentSpec { w0: w, w_plus: w, w_minus: Some(w) }
    }

    pub fn validate(&self) -> Result<()> {
        self.w0.validate()?;
        self.w_plus.validate()?;
        if let Some(m) = self.w_minus {
            m.validate()?;
        }
        Ok(())
    }

    /// Environment is homogeneous on the negative side as well.
    pub fn has_hypothesis_two(&self) -> bool {
        self.w_minus.is_some()
    }

    pub fn negative(&self) -> UrnState {
        self.w_minus.unwrap_or(self.w_plus)
    }

    pub fn site(&self, x: i64) -> UrnState {
        match x {
            0 => self.w0,
            x if x > 0 => self.w_plus,
            _ => self.negative(),
        }
    }
}

/// Lazily materialised per-site urns covering the visited range.
#[derive(Debug, Clone)]
pub struct Sites {
    env: EnvironmentSpec,
    nonneg: Vec<UrnProcess>,
    neg: Vec<UrnProcess>,
}

impl Sites {
    pub fn new(env: EnvironmentSpec) -> Self {
        Sites { env, nonneg: Vec::new(), neg: Vec::new() }
    }

    #[inline]
    pub fn get_mut(&mut self, x: i64) -> &mut UrnProcess {
        if x >= 0 {
            let i = x as usize;
            while self.nonneg.len() <= i {
                let s = self.env.site(self.nonneg.len() as i64);
                self.nonneg.push(UrnProcess::new(s));
            }
            &mut self.nonneg[i]
        } else {
            let i = (-x - 1) as usize;
            while self.neg.len() <= i {
                self.neg.push(UrnProcess::new(self.env.negative()));
            }
            &mut self.neg[i]
        }
    }

    /// Current urn at `x`, or the untouched initial one.
    pub fn get(&self, x: i64) -> UrnProcess {
        let slot = if x >= 0 { self.nonneg.get(x as usize) } else { self.neg.get((-x - 1) as usize) };
        slot.copied().unwrap_or_else(|| UrnProcess::new(self.env.site(x)))
    }

    /// Departures from `x` so far (the local time `Lˣ_n`).
    pub fn visits(&self, x: i64) -> u64 {
        self.get(x).steps()
    }
}

/// Outcome of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub from: i64,
    pub right: bool,
    /// `f(α̃)` at the departure site.
    pub p: f64,
    pub site_alpha: f64,
    pub site_l: f64,
}

/// Walker state plus running functionals.
#[derive(Debug, Clone)]
pub struct Walker {
    pub x: i64,
    pub n: u64,
    pub u_count: u64,
    pub xplus: i64,
    pub dplus: f64,
    pub max_x: i64,
    pub min_x: i64,
    pub sites: Sites,
}

impl Walker {
    pub fn new(env: EnvironmentSpec) -> Self {
        Walker { x: 0, n: 0, u_count: 0, xplus: 0, dplus: 0.0, max_x: 0, min_x: 0, sites: Sites::new(env) }
    }

    pub fn mplus(&self) -> f64 {
        self.xplus as f64 - self.dplus
    }

    #[inline]
    pub fn step(&mut self, f: &ReinforcementFunction, uniform: f64) -> StepInfo {
        let from = self.x;
        let urn = self.sites.get_mut(from);
        let (site_alpha, site_l) = (urn.alpha(), urn.l());
        let p = f.eval(site_alpha);
        let right = uniform < p;
        urn.record(right);
        let d: i64 = if right { 1 } else { -1 };
        if from >= 0 {
            self.xplus += d;
            self.dplus += 2.0 * p - 1.0;
            if from == 0 && !right {
                self.u_count += 1;
            }
        }
        self.x += d;
        self.n += 1;
        self.max_x = self.max_x.max(self.x);
        self.min_x = self.min_x.min(self.x);
        StepInfo { from, right, p, site_alpha, site_l }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    Horizon(u64),
    /// First time `X_n = a`.
    HitLevel(i64),
    /// First time `|X_n| = a`.
    HitEither(i64),
}

impl StopRule {
    fn validate(&self) -> Result<()> {
        match *self {
            StopRule::HitLevel(0) => Err(Error::InvalidParameter("hit level must be nonzero".into())),
            StopRule::HitEither(a) if a <= 0 => Err(Error::InvalidParameter("hit level must be positive".into())),
            _ => Ok(()),
        }
    }

    fn hit(&self, x: i64) -> bool {
        match *self {
            StopRule::Horizon(_) => false,
            StopRule::HitLevel(a) => x == a,
            StopRule::HitEither(a) => x.abs() == a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WalkStatus {
    Horizon,
    Hit,
    CapReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordLevel {
    Full,
    Summary,
}

/// Per-step series, present only for [`RecordLevel::Full`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSeries {
    /// `X_0..=X_n`.
    pub x: Vec<i64>,
    /// Urn state at `X_k` just before departure `k`; the final entry is the
    /// untouched state at `X_n`.
    pub site_alpha: Vec<f64>,
    pub site_l: Vec<f64>,
    pub uniforms: Vec<f64>,
    /// `U_k`, `X⁺_k`, `D⁺_k` for `k = 0..=n`.
    pub u: Vec<u64>,
    pub xplus: Vec<i64>,
    pub dplus: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct WalkRecord {
    pub stop: StopRule,
    pub status: WalkStatus,
    pub steps: u64,
    pub final_x: i64,
    pub u: u64,
    pub xplus: i64,
    pub dplus: f64,
    pub max_x: i64,
    pub min_x: i64,
    pub series: Option<PathSeries>,
    pub sites: Sites,
    pub seed: u64,
    pub stream: u64,
}

impl WalkRecord {
    pub fn mplus(&self) -> f64 {
        self.xplus as f64 - self.dplus
    }

    pub fn hit_time(&self) -> Option<u64> {
        (self.status == WalkStatus::Hit).then_some(self.steps)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,X,site_alpha,site_l")?;
        if let Some(s) = &self.series {
            for k in 0..s.x.len() {
                writeln!(w, "{k},{},{},{}", s.x[k], s.site_alpha[k], s.site_l[k])?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOptions {
    pub stop: StopRule,
    pub cap: u64,
    pub level: RecordLevel,
}

impl WalkOptions {
    pub fn horizon(n: u64) -> Self {
        WalkOptions { stop: StopRule::Horizon(n), cap: DEFAULT_CAP, level: RecordLevel::Full }
    }

    pub fn hit(stop: StopRule) -> Self {
        WalkOptions { stop, cap: DEFAULT_CAP, level: RecordLevel::Full }
    }
}

/// Simulate one walk on stream `(seed, stream)`.
pub fn simulate_walk(
    f: &ReinforcementFunction,
    env: EnvironmentSpec,
    opts: WalkOptions,
    seed: u64,
    stream: u64,
) -> Result<WalkRecord> {
    let mut rng = rng::stream(seed, stream);
    simulate_walk_with(f, env, opts, &mut rng, seed, stream)
}

pub(crate) fn simulate_walk_with(
    f: &ReinforcementFunction,
    env: EnvironmentSpec,
    opts: WalkOptions,
    rng: &mut StreamRng,
    seed: u64,
    stream: u64,
) -> Result<WalkRecord> {
    env.validate()?;
    opts.stop.validate()?;
    let limit = match opts.stop {
        StopRule::Horizon(n) => n,
        _ => opts.cap,
    };
    let mut w = Walker::new(env);
    let mut series = (opts.level == RecordLevel::Full).then(|| {
        let mut s = PathSeries::default();
        s.x.push(0);
        s.u.push(0);
        s.xplus.push(0);
        s.dplus.push(0.0);
        s
    });
    let mut status = match opts.stop {
        StopRule::Horizon(_) => WalkStatus::Horizon,
        _ => WalkStatus::CapReached,
    };
    while w.n < limit {
        let u = rng::uniform(rng);
        let info = w.step(f, u);
        if let Some(s) = series.as_mut() {
            s.site_alpha.push(info.site_alpha);
            s.site_l.push(info.site_l);
            s.uniforms.push(u);
            s.x.push(w.x);
            s.u.push(w.u_count);
            s.xplus.push(w.xplus);
            s.dplus.push(w.dplus);
        }
        if opts.stop.hit(w.x) {
            status = WalkStatus::Hit;
            break;
        }
    }
    if let Some(s) = series.as_mut() {
        let last = w.sites.get(w.x);
        s.site_alpha.push(last.alpha());
        s.site_l.push(last.l());
    }
    Ok(WalkRecord {
        stop: opts.stop,
        status,
        steps: w.n,
        final_x: w.x,
        u: w.u_count,
        xplus: w.xplus,
        dplus: w.dplus,
        max_x: w.max_x,
        min_x: w.min_x,
        series,
        sites: w.sites,
        seed,
        stream,
    })
}
