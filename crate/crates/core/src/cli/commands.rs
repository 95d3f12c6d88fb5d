use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::Format;
use super::env::parse_env;
use crate::coupling::{violation_sweep, CouplingSpec};
use crate::criteria::{classify, solomon_check};
use crate::drift::{clt_check, drift_parts_profile, estimate_delta_inf, DriftConfig};
use crate::error::{Error, Result};
use crate::funcs::{analyze, symmetry_defect, ReinforcementFunction};
use crate::stats::Z99;
use crate::transition::{find_threshold, sweep, Axis, SearchBudget, ThresholdStatus};
use crate::urn::{exact_urn_dp, simulate_urn, UrnState};
use crate::walk::{
    drift_equation, empirical_regime, exact_walk_oracle, simulate_walk, walk_functionals, EnvironmentSpec,
    RegimeConfig, Sampler, StopRule, WalkOptions, WalkStatus, DEFAULT_CAP,
};

pub enum Body {
    Csv(Vec<u8>),
    Json(Value),
}

pub struct Outcome {
    pub body: Body,
    /// Set when a budget cap was hit; the output is still written.
    pub budget: Option<String>,
}

impl Outcome {
    fn json<T: Serialize>(v: &T) -> Result<Self> {
        let v = serde_json::to_value(v).map_err(std::io::Error::from)?;
        Ok(Outcome { body: Body::Json(v), budget: None })
    }

    fn csv(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Self> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        Ok(Outcome { body: Body::Csv(buf), budget: None })
    }
}

pub struct Ctx {
    pub seed: u64,
    pub format: Format,
}

pub trait Command: Serialize + DeserializeOwned + Clone {
    const NAME: &'static str;
    const FORMAT: Format;
    fn defaults() -> Self;
    fn execute(&self, ctx: &Ctx) -> Result<Outcome>;
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Config { path: name.into(), msg: "required parameter is missing".into() })
}

fn function(f: &Option<String>) -> Result<ReinforcementFunction> {
    ReinforcementFunction::parse(&need(f, "f")?)
}

fn environment(env: &Option<String>) -> Result<EnvironmentSpec> {
    parse_env(&need(env, "env")?)
}

fn json_only(ctx: &Ctx) -> Result<()> {
    match ctx.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::Config { path: "format".into(), msg: "this command writes JSON only".into() }),
    }
}

fn drift_config(n_dp: &Option<usize>, n: &Option<usize>, replicas: &Option<usize>, seed: u64) -> Result<DriftConfig> {
    Ok(DriftConfig { n_dp: need(n_dp, "N_dp")?, n_mc: need(n, "N")?, replicas: need(replicas, "replicas")?, seed, ..Default::default() })
}

/// Fixed points, derivatives at 1/2 and the symmetry defect of `f`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub f: Option<String>,
}

impl Command for AnalyzeArgs {
    const NAME: &'static str = "analyze";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        Self::default()
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        let report = analyze(&f)?;
        let (defect, _) = symmetry_defect(&f);
        let mut v = serde_json::to_value(&report).map_err(std::io::Error::from)?;
        v["symmetry_defect"] = json!(defect);
        v["canonical"] = json!(f.expr().map(|e| e.to_string()));
        Ok(Outcome { body: Body::Json(v), budget: None })
    }
}

/// Simulate one urn, or compute the exact law of its Red count.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrnArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub l0: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Exact dynamic programme instead of simulation.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", require_equals = true)]
    pub exact: Option<bool>,
    #[arg(long)]
    pub stream: Option<u64>,
}

impl Command for UrnArgs {
    const NAME: &'static str = "urn";
    const FORMAT: Format = Format::Csv;
    fn defaults() -> Self {
        UrnArgs { f: None, alpha0: Some(0.5), l0: Some(2.0), n: Some(1000), exact: Some(false), stream: Some(0) }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        let f = function(&self.f)?;
        let init = UrnState::new(need(&self.alpha0, "alpha0")?, need(&self.l0, "l0")?)?;
        let n = need(&self.n, "N")?;
        if need(&self.exact, "exact")? {
            let law = exact_urn_dp(&f, init, n)?;
            return match ctx.format {
                Format::Csv => Outcome::csv(|w| law.write_csv(w)),
                Format::Json => {
                    let rows: Vec<&[f64]> = (0..=n).map(|i| law.row(i)).collect();
                    Outcome::json(&json!({ "horizon": n, "initial": init, "rows": rows }))
                }
            };
        }
        let traj = simulate_urn(&f, init, n, ctx.seed, need(&self.stream, "stream")?);
        match ctx.format {
            Format::Csv => Outcome::csv(|w| traj.write_csv(w)),
            Format::Json => {
                let draws: String = traj.draws.iter().map(|d| d.letter()).collect();
                Outcome::json(&json!({ "initial": init, "states": traj.states, "draws": draws }))
            }
        }
    }
}

/// Estimate `E[δ_∞]` with a confidence interval.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftEstimateArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub l0: Option<f64>,
    /// Exact horizon.
    #[arg(long = "N-dp")]
    #[serde(rename = "N_dp")]
    pub n_dp: Option<usize>,
    /// Monte Carlo horizon.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Normal quantile for the interval.
    #[arg(long)]
    pub z: Option<f64>,
}

impl Command for DriftEstimateArgs {
    const NAME: &'static str = "drift estimate";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        let d = DriftConfig::default();
        DriftEstimateArgs {
            f: None,
            alpha0: Some(0.5),
            l0: Some(2.0),
            n_dp: Some(d.n_dp),
            n: Some(d.n_mc),
            replicas: Some(d.replicas),
            z: Some(Z99),
        }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        let init = UrnState::new(need(&self.alpha0, "alpha0")?, need(&self.l0, "l0")?)?;
        let cfg = DriftConfig { z: need(&self.z, "z")?, ..drift_config(&self.n_dp, &self.n, &self.replicas, ctx.seed)? };
        let est = estimate_delta_inf(&f, init, &cfg)?;
        let mut v = serde_json::to_value(&est).map_err(std::io::Error::from)?;
        v["ci"] = json!(est.ci());
        Ok(Outcome { body: Body::Json(v), budget: None })
    }
}

/// Checkpoint profile of `E[δ_N]` and its positive and negative parts.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftProfileArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub l0: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
}

impl Command for DriftProfileArgs {
    const NAME: &'static str = "drift profile";
    const FORMAT: Format = Format::Csv;
    fn defaults() -> Self {
        DriftProfileArgs { f: None, alpha0: Some(0.5), l0: Some(2.0), n: Some(10_000), replicas: Some(1_000) }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        let f = function(&self.f)?;
        let init = UrnState::new(need(&self.alpha0, "alpha0")?, need(&self.l0, "l0")?)?;
        let prof = drift_parts_profile(&f, init, need(&self.n, "N")?, need(&self.replicas, "replicas")?, ctx.seed)?;
        match ctx.format {
            Format::Csv => Outcome::csv(|w| prof.write_csv(w)),
            Format::Json => Outcome::json(&prof),
        }
    }
}

/// Variance of `sqrt(n)(α_n − p)` against the CLT prediction.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftCltArgs {
    #[arg(long)]
    pub f: Option<String>,
    /// Fixed point (the unique one when absent).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub l0: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
}

impl Command for DriftCltArgs {
    const NAME: &'static str = "drift clt";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        DriftCltArgs { f: None, p: None, alpha0: Some(0.5), l0: Some(2.0), n: Some(10_000), replicas: Some(10_000) }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        let p = match self.p {
            Some(p) => p,
            None => analyze(&f)?
                .unique_point()
                .map(|fp| fp.p)
                .ok_or_else(|| Error::HypothesisUnmet("f has no unique fixed point; pass --p".into()))?,
        };
        let init = UrnState::new(need(&self.alpha0, "alpha0")?, need(&self.l0, "l0")?)?;
        Outcome::json(&clt_check(&f, p, init, need(&self.n, "N")?, need(&self.replicas, "replicas")?, ctx.seed)?)
    }
}

/// Simulate one walk to a horizon or a hitting time.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSimulateArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub env: Option<String>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    /// Stop at the first visit to this level instead of at `N`.
    #[arg(long, allow_hyphen_values = true)]
    pub hit: Option<i64>,
    /// Stop at the first visit to `±a`.
    #[arg(long)]
    pub hit_either: Option<i64>,
    /// Step cap for hitting rules.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long)]
    pub stream: Option<u64>,
}

impl Command for WalkSimulateArgs {
    const NAME: &'static str = "walk simulate";
    const FORMAT: Format = Format::Csv;
    fn defaults() -> Self {
        WalkSimulateArgs {
            f: None,
            env: Some("w:0.5,2".into()),
            n: Some(1000),
            hit: None,
            hit_either: None,
            cap: Some(DEFAULT_CAP),
            stream: Some(0),
        }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        let f = function(&self.f)?;
        let env = environment(&self.env)?;
        let stop = match (self.hit, self.hit_either) {
            (Some(a), None) => StopRule::HitLevel(a),
            (None, Some(a)) => StopRule::HitEither(a),
            (None, None) => StopRule::Horizon(need(&self.n, "N")?),
            _ => return Err(Error::Config { path: "hit".into(), msg: "give at most one of hit and hit_either".into() }),
        };
        let opts = WalkOptions { cap: need(&self.cap, "cap")?, ..WalkOptions::hit(stop) };
        let rec = simulate_walk(&f, env, opts, ctx.seed, need(&self.stream, "stream")?)?;
        let budget = (rec.status == WalkStatus::CapReached).then(|| format!("step cap {} reached", opts.cap));
        let mut out = match ctx.format {
            Format::Csv => Outcome::csv(|w| rec.write_csv(w))?,
            Format::Json => Outcome::json(&json!({
                "status": rec.status,
                "steps": rec.steps,
                "final_x": rec.final_x,
                "U": rec.u,
                "Xplus": rec.xplus,
                "Dplus": rec.dplus,
                "M": rec.mplus(),
                "max_x": rec.max_x,
                "min_x": rec.min_x,
            }))?,
        };
        out.budget = budget;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SamplerArg {
    Full,
    Collapsed,
}

/// Functionals at the hitting time of level `a`; with `replicas > 0`, the
/// Monte Carlo balance `a = E[U] + E[D⁺]` instead.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkFunctionalsArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub env: Option<String>,
    #[arg(long)]
    pub a: Option<i64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long)]
    pub stream: Option<u64>,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerArg>,
    /// Write the `M⁺` series of the single run to this CSV file.
    #[arg(long)]
    pub series_out: Option<PathBuf>,
}

impl Command for WalkFunctionalsArgs {
    const NAME: &'static str = "walk functionals";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        WalkFunctionalsArgs {
            f: None,
            env: Some("w:0.5,2".into()),
            a: Some(1),
            replicas: Some(0),
            cap: Some(DEFAULT_CAP),
            stream: Some(0),
            sampler: None,
            series_out: None,
        }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        let env = environment(&self.env)?;
        let a = need(&self.a, "a")?;
        let cap = need(&self.cap, "cap")?;
        let replicas = need(&self.replicas, "replicas")?;
        if replicas > 0 {
            let sampler = self.sampler.map(|s| match s {
                SamplerArg::Full => Sampler::Full,
                SamplerArg::Collapsed => Sampler::Collapsed,
            });
            let rep = drift_equation(&f, env, a, replicas, ctx.seed, Some(cap), sampler)?;
            let mut out = Outcome::json(&rep)?;
            if rep.capped > 0 {
                out.budget = Some(format!("{} of {replicas} replicas hit the step cap", rep.capped));
            }
            return Ok(out);
        }
        let opts = WalkOptions { cap, ..WalkOptions::hit(StopRule::HitLevel(a)) };
        let rec = simulate_walk(&f, env, opts, ctx.seed, need(&self.stream, "stream")?)?;
        let mut rep = walk_functionals(&rec);
        if let Some(path) = &self.series_out {
            let mut buf = String::from("k,M\n");
            for (k, m) in rep.m_series.iter().enumerate() {
                buf.push_str(&format!("{k},{m}\n"));
            }
            std::fs::write(path, buf)?;
            rep.M_series_ref = Some(path.display().to_string());
        }
        let mut out = Outcome::json(&rep)?;
        if rec.status == WalkStatus::CapReached {
            out.budget = Some(format!("step cap {cap} reached before level {a}"));
        }
        Ok(out)
    }
}

/// Exact law of the first `h ≤ 16` steps.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkOracleArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub env: Option<String>,
    #[arg(long)]
    pub h: Option<usize>,
}

impl Command for WalkOracleArgs {
    const NAME: &'static str = "walk oracle";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        WalkOracleArgs { f: None, env: Some("w:0.5,2".into()), h: Some(10) }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        Outcome::json(&exact_walk_oracle(&f, environment(&self.env)?, need(&self.h, "h")?)?)
    }
}

/// Return statistics of simulated walks (heuristic only).
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkRegimeArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub env: Option<String>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<u64>,
}

impl Command for WalkRegimeArgs {
    const NAME: &'static str = "walk regime";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        let d = RegimeConfig::default();
        WalkRegimeArgs {
            f: None,
            env: Some("w:0.5,2".into()),
            n: Some(d.horizon),
            replicas: Some(d.replicas),
            burn_in: Some(d.burn_in),
        }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        let cfg = RegimeConfig {
            horizon: need(&self.n, "N")?,
            replicas: need(&self.replicas, "replicas")?,
            burn_in: need(&self.burn_in, "burn_in")?,
            seed: ctx.seed,
        };
        Outcome::json(&empirical_regime(&f, environment(&self.env)?, &cfg)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    /// `f ≤ g` drives the same uniforms from the same initial urn.
    FunctionOrder,
    /// `(α, 2l)` against `(1/2, 2l)` under a symmetric `f`.
    #[value(name = "offcenter")]
    #[serde(rename = "offcenter")]
    OffCenter,
    /// `(1/2, 2l0)` against `(1/2, 2l1)` under a symmetric `f`.
    MassOrder,
}

/// Run a monotone coupling and report order violations.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupleArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub f: Option<String>,
    /// Upper function for the function-order coupling.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub l0: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Number of independent streams; above 1 only a summary is written.
    #[arg(long)]
    pub streams: Option<usize>,
    #[arg(long)]
    pub stream: Option<u64>,
}

impl Command for CoupleArgs {
    const NAME: &'static str = "couple";
    const FORMAT: Format = Format::Csv;
    fn defaults() -> Self {
        CoupleArgs {
            kind: None,
            f: None,
            g: None,
            alpha0: Some(0.5),
            l0: Some(2.0),
            alpha: None,
            l: None,
            l1: None,
            n: Some(10_000),
            streams: Some(1),
            stream: Some(0),
        }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        let f = function(&self.f)?;
        let spec = match need(&self.kind, "kind")? {
            KindArg::FunctionOrder => CouplingSpec::FunctionOrder {
                f,
                g: function(&self.g).map_err(|e| match e {
                    Error::Config { .. } => Error::Config { path: "g".into(), msg: "required parameter is missing".into() },
                    e => e,
                })?,
                init: UrnState::new(need(&self.alpha0, "alpha0")?, need(&self.l0, "l0")?)?,
            },
            KindArg::OffCenter => CouplingSpec::OffCenter { f, alpha: need(&self.alpha, "alpha")?, l: need(&self.l, "l")? },
            KindArg::MassOrder => CouplingSpec::MassOrder { f, l0: need(&self.l0, "l0")?, l1: need(&self.l1, "l1")? },
        };
        let n = need(&self.n, "N")?;
        let streams = need(&self.streams, "streams")?;
        if streams > 1 {
            let s = violation_sweep(&spec, n, streams, ctx.seed)?;
            return match ctx.format {
                Format::Json => Outcome::json(&s),
                Format::Csv => Outcome::csv(|w| {
                    use std::io::Write;
                    writeln!(w, "kind,streams,steps,violating_streams,total_violations")?;
                    let kind = serde_json::to_value(s.kind).map_err(std::io::Error::from)?;
                    let kind = kind.as_str().unwrap_or_default().to_string();
                    writeln!(w, "{kind},{},{},{},{}", s.streams, s.steps, s.violating_streams, s.total_violations)
                }),
            };
        }
        let run = spec.run(n, ctx.seed, need(&self.stream, "stream")?)?;
        match ctx.format {
            Format::Csv => Outcome::csv(|w| run.write_csv(w)),
            Format::Json => Outcome::json(&json!({
                "kind": run.kind,
                "violations": run.violations(),
                "violation_steps": run.violation_steps,
                "alpha": run.alpha.states.iter().map(|s| s.alpha).collect::<Vec<_>>(),
                "beta": run.beta.states.iter().map(|s| s.alpha).collect::<Vec<_>>(),
            })),
        }
    }
}

/// Recurrence/transience verdict with the rule used and a hypothesis audit.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub env: Option<String>,
    #[arg(long = "N-dp")]
    #[serde(rename = "N_dp")]
    pub n_dp: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
}

impl Command for ClassifyArgs {
    const NAME: &'static str = "classify";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        let d = DriftConfig::default();
        ClassifyArgs {
            f: None,
            env: Some("w:0.5,2".into()),
            n_dp: Some(d.n_dp),
            n: Some(d.n_mc),
            replicas: Some(d.replicas),
        }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        let cfg = drift_config(&self.n_dp, &self.n, &self.replicas, ctx.seed)?;
        Outcome::json(&classify(&f, environment(&self.env)?, &cfg)?)
    }
}

/// Solomon's criterion for `f(x) = x`, with a Monte Carlo cross-check.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolomonArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub l0: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
}

impl Command for SolomonArgs {
    const NAME: &'static str = "solomon";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        SolomonArgs { f: Some("x".into()), alpha0: Some(0.5), l0: Some(2.0), n: Some(100_000), replicas: Some(1_000) }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        let init = UrnState::new(need(&self.alpha0, "alpha0")?, need(&self.l0, "l0")?)?;
        Outcome::json(&solomon_check(&f, init, need(&self.n, "N")?, need(&self.replicas, "replicas")?, ctx.seed)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AxisArg {
    U,
    L,
}

fn axis(a: &Option<AxisArg>, l: &Option<f64>, u: &Option<f64>) -> Result<Axis> {
    Ok(match need(a, "axis")? {
        AxisArg::U => Axis::U { l: need(l, "l")? },
        AxisArg::L => Axis::L { u: need(u, "u")? },
    })
}

/// CI-aware bisection for the parameter where `E[δ_∞]` crosses the target.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    /// Base function, symmetric about 1/2.
    #[arg(long)]
    pub f: Option<String>,
    /// Initial mass held fixed on the `u` axis.
    #[arg(long)]
    pub l: Option<f64>,
    /// Family scale held fixed on the `l` axis.
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long = "N-dp")]
    #[serde(rename = "N_dp")]
    pub n_dp: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub max_replicas: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

impl Command for ThresholdArgs {
    const NAME: &'static str = "threshold";
    const FORMAT: Format = Format::Json;
    fn defaults() -> Self {
        let d = SearchBudget::default();
        ThresholdArgs {
            axis: None,
            f: None,
            l: Some(1.0),
            u: Some(1.0),
            lo: None,
            hi: None,
            target: Some(1.0),
            rel_tol: Some(d.rel_tol),
            n_dp: Some(d.drift.n_dp),
            n: Some(d.drift.n_mc),
            replicas: Some(d.drift.replicas),
            max_replicas: Some(d.max_replicas),
            max_iterations: Some(d.max_iterations),
        }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        json_only(ctx)?;
        let f = function(&self.f)?;
        let axis = axis(&self.axis, &self.l, &self.u)?;
        let budget = SearchBudget {
            drift: drift_config(&self.n_dp, &self.n, &self.replicas, ctx.seed)?,
            max_replicas: need(&self.max_replicas, "max_replicas")?,
            max_iterations: need(&self.max_iterations, "max_iterations")?,
            rel_tol: need(&self.rel_tol, "rel_tol")?,
        };
        let range = (need(&self.lo, "lo")?, need(&self.hi, "hi")?);
        let r = find_threshold(axis, &f, range, need(&self.target, "target")?, &budget)?;
        let mut v = r.summary_json();
        v["target"] = json!(r.target);
        v["iterations"] = serde_json::to_value(&r.iterations).map_err(std::io::Error::from)?;
        let budget = (r.status == ThresholdStatus::BudgetExhausted)
            .then(|| format!("bracket [{}, {}] could not be narrowed further", r.lo, r.hi));
        Ok(Outcome { body: Body::Json(v), budget })
    }
}

/// `E[δ_∞]` along a grid of `u` or `l` values.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    /// Comma-separated increasing grid.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long = "N-dp")]
    #[serde(rename = "N_dp")]
    pub n_dp: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
}

impl Command for SweepArgs {
    const NAME: &'static str = "sweep";
    const FORMAT: Format = Format::Csv;
    fn defaults() -> Self {
        let d = DriftConfig::default();
        SweepArgs {
            axis: None,
            f: None,
            l: Some(1.0),
            u: Some(1.0),
            grid: Some("0.5,1,2,4,8".into()),
            n_dp: Some(d.n_dp),
            n: Some(d.n_mc),
            replicas: Some(d.replicas),
        }
    }
    fn execute(&self, ctx: &Ctx) -> Result<Outcome> {
        let f = function(&self.f)?;
        let axis = axis(&self.axis, &self.l, &self.u)?;
        let grid: Vec<f64> = need(&self.grid, "grid")?
            .split(',')
            .map(|t| {
                t.trim().parse().map_err(|_| Error::Config { path: "grid".into(), msg: format!("`{t}` is not a number") })
            })
            .collect::<Result<_>>()?;
        let cfg = drift_config(&self.n_dp, &self.n, &self.replicas, ctx.seed)?;
        let curve = sweep(axis, &f, &grid, &cfg)?;
        match ctx.format {
            Format::Csv => Outcome::csv(|w| curve.write_csv(w)),
            Format::Json => Outcome::json(&curve),
        }
    }
}
