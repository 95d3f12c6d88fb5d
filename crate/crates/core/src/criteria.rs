//! Recurrence/transience classification.
//!
//! [`classify`] walks through the available rules in a fixed order and
//! stops at the first one whose hypotheses hold and whose deciding
//! inequality clears a 99% confidence margin. Every rule it looks at leaves
//! entries in the audit, so an `Inconclusive` verdict shows which
//! hypotheses failed.
//!
//! Verdicts are almost-sure statements: under the homogeneity hypotheses the
//! walk is either recurrent with probability one or transient with
//! probability one.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::drift::{estimate_with_report, DriftConfig, DriftEstimate, DriftValue, Regime};
use crate::error::{Error, Result};
use crate::funcs::{analyze, FixedPointReport, ReinforcementFunction};
use crate::rng;
use crate::stats::MeanSe;
use crate::urn::{UrnProcess, UrnState};
use crate::walk::EnvironmentSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Directed,
    Undirected,
}

/// Site-homogeneous classical reinforcement weights.
///
/// Directed: `a_left = a₀(x, x−1)`, `a_right = a₀(x, x+1)` at every site.
/// Undirected: `b₀(x, x+1) = b0` on every edge, walk started at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalWeights {
    pub mode: WeightMode,
    pub a_left: f64,
    pub a_right: f64,
    pub b0: f64,
    pub delta: f64,
}

impl ClassicalWeights {
    pub fn directed(a_left: f64, a_right: f64, delta: f64) -> Self {
        ClassicalWeights { mode: WeightMode::Directed, a_left, a_right, b0: 0.0, delta }
    }

    pub fn undirected(b0: f64, delta: f64) -> Self {
        ClassicalWeights { mode: WeightMode::Undirected, a_left: 0.0, a_right: 0.0, b0, delta }
    }
}

/// Environment of the generalized walk with the same law as the classical one
/// (with `f(x) = x`).
pub fn map_classical_weights(w: &ClassicalWeights) -> Result<EnvironmentSpec> {
    if !(w.delta > 0.0) {
        return Err(Error::InvalidParameter(format!("reinforcement increment {} must be > 0", w.delta)));
    }
    match w.mode {
        WeightMode::Directed => {
            if !(w.a_left > 0.0 && w.a_right > 0.0) {
                return Err(Error::InvalidParameter("directed weights must be > 0".into()));
            }
            let s = w.a_left + w.a_right;
            Ok(EnvironmentSpec::homogeneous(UrnState::new(w.a_right / s, s / w.delta)?))
        }
        WeightMode::Undirected => {
            if !(w.b0 > 0.0) {
                return Err(Error::InvalidParameter("undirected weight b0 must be > 0".into()));
            }
            let (b, d) = (w.b0, w.delta);
            let l = (2.0 * b + d) / (2.0 * d);
            Ok(EnvironmentSpec {
                w0: UrnState::new(0.5, b / d)?,
                w_plus: UrnState::new(b / (2.0 * b + d), l)?,
                w_minus: Some(UrnState::new((b + d) / (2.0 * b + d), l)?),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Recurrent,
    Transient,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `f ≥ 1/2`: recurrent iff `E[δ¹_∞] ≤ 1`.
    #[serde(rename = "theorem-1")]
    Theorem1,
    /// `f ≥ 1/2` and either 1/2 is not the unique stable fixed point or `f''(1/2) > 0`.
    #[serde(rename = "theorem-1-corollary")]
    Theorem1Corollary,
    /// Unique fixed point `p ≠ 1/2`.
    #[serde(rename = "theorem-2")]
    Theorem2,
    /// Unique fixed point 1/2, `f'(1/2) = 0`, and `E[δ¹_∞] > 1` or `E[δ⁻¹_∞] < −1`.
    #[serde(rename = "theorem-2-drift")]
    Theorem2Drift,
    /// Unique fixed point 1/2, `f'(1/2) = 0`, `f''(1/2) ≠ 0`.
    #[serde(rename = "theorem-2-corollary")]
    Theorem2Corollary,
    /// `f ≥ 1/2` on `[1/2, 1]` with all fixed points `≥ 1/2`.
    #[serde(rename = "right-half-corollary")]
    RightHalfCorollary,
    /// `f(x) = x`: random walk in an i.i.d. Beta environment.
    Solomon,
    None,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::Theorem1,
        Rule::Theorem1Corollary,
        Rule::Theorem2,
        Rule::Theorem2Drift,
        Rule::Theorem2Corollary,
        Rule::RightHalfCorollary,
        Rule::Solomon,
        Rule::None,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Rule::Theorem1 => "theorem-1",
            Rule::Theorem1Corollary => "theorem-1-corollary",
            Rule::Theorem2 => "theorem-2",
            Rule::Theorem2Drift => "theorem-2-drift",
            Rule::Theorem2Corollary => "theorem-2-corollary",
            Rule::RightHalfCorollary => "right-half-corollary",
            Rule::Solomon => "solomon",
            Rule::None => "none",
        }
    }

    /// The hypotheses of the rule, in the order they are audited.
    pub fn hypotheses(&self) -> &'static [&'static str] {
        match self {
            Rule::Theorem1 => &[H_ENV_PLUS, H_GE_HALF, H_DRIFT_FINITE],
            Rule::Theorem1Corollary => &[H_ENV_PLUS, H_GE_HALF, H_NOT_UNIQUE_STABLE_OR_CONVEX],
            Rule::Theorem2 => &[H_ENV_BOTH, H_UNIQUE, H_P_NOT_HALF],
            Rule::Theorem2Drift => &[H_ENV_BOTH, H_UNIQUE, H_P_HALF, H_FPRIME_ZERO],
            Rule::Theorem2Corollary => &[H_ENV_BOTH, H_UNIQUE, H_P_HALF, H_FPRIME_ZERO, H_FSECOND_NONZERO],
            Rule::RightHalfCorollary => &[H_ENV_BOTH, H_GE_HALF_RIGHT, H_FIXED_GE_HALF, H_RIGHT_HALF_CASE],
            Rule::Solomon => &[H_IDENTITY, H_ENV_BOTH],
            Rule::None => &[],
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const H_ENV_PLUS: &str = "initial urns agree at every site x >= 1";
pub const H_ENV_BOTH: &str = "initial urns agree at every site x >= 1 and at every site x <= -1";
pub const H_GE_HALF: &str = "f >= 1/2 on [0,1]";
pub const H_DRIFT_FINITE: &str = "E[delta^1_inf] is estimable with a finite confidence interval";
pub const H_NOT_UNIQUE_STABLE_OR_CONVEX: &str = "1/2 is not the unique stable fixed point, or f''(1/2) > 0";
pub const H_UNIQUE: &str = "f has a unique fixed point p";
pub const H_P_NOT_HALF: &str = "p != 1/2";
pub const H_P_HALF: &str = "p = 1/2";
pub const H_FPRIME_ZERO: &str = "f'(1/2) = 0";
pub const H_FSECOND_NONZERO: &str = "f''(1/2) != 0";
pub const H_GE_HALF_RIGHT: &str = "f >= 1/2 on [1/2,1]";
pub const H_FIXED_GE_HALF: &str = "every fixed point is >= 1/2";
pub const H_RIGHT_HALF_CASE: &str =
    "1/2 is not a fixed point, or it is a fixed point but not the only one and f'(1/2) = 0";
pub const H_IDENTITY: &str = "f(x) = x";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub rule: Rule,
    pub hypothesis: &'static str,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftEvidence {
    pub mean: DriftValue,
    pub stderr: f64,
    pub ci: Option<(f64, f64)>,
    pub regime: Regime,
    #[serde(rename = "N")]
    pub n_trunc: usize,
}

impl From<&DriftEstimate> for DriftEvidence {
    fn from(e: &DriftEstimate) -> Self {
        DriftEvidence { mean: e.mean, stderr: e.stderr, ci: e.ci(), regime: e.regime, n_trunc: e.n_trunc }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta1: Option<DriftEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_minus1: Option<DriftEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_points: Option<FixedPointReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solomon: Option<SolomonReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationVerdict {
    pub verdict: Verdict,
    pub rule: Rule,
    pub evidence: Evidence,
    pub audit: Vec<AuditEntry>,
    pub note: String,
}

struct Audit(Vec<AuditEntry>);

impl Audit {
    /// Record the hypotheses of `rule` and report whether all hold.
    fn check(&mut self, rule: Rule, oks: &[bool]) -> bool {
        let hs = rule.hypotheses();
        debug_assert_eq!(hs.len(), oks.len());
        for (h, ok) in hs.iter().zip(oks) {
            self.0.push(AuditEntry { rule, hypothesis: h, ok: *ok });
        }
        oks.iter().all(|b| *b)
    }
}

/// Apply the classification rules to `f` in environment `env`.
pub fn classify(f: &ReinforcementFunction, env: EnvironmentSpec, budget: &DriftConfig) -> Result<ClassificationVerdict> {
    env.validate()?;
    let hyp2 = env.has_hypothesis_two();
    let mut audit = Audit(Vec::new());
    let mut evidence = Evidence::default();
    let done = |verdict, rule, evidence, audit: Audit, note: String| {
        Ok(ClassificationVerdict { verdict, rule, evidence, audit: audit.0, note })
    };

    if f.is_identity() {
        if audit.check(Rule::Solomon, &[true, hyp2]) {
            let plus = solomon_check(f, env.w_plus, 0, 0, 0)?;
            let minus = solomon_check(f, env.negative(), 0, 0, 0)?;
            let recurrent = plus.criterion <= SOLOMON_TOL && minus.criterion >= -SOLOMON_TOL;
            let note = format!(
                "E[ln(a/(1-a))] = {} for sites x >= 1 and {} for sites x <= -1",
                plus.criterion, minus.criterion
            );
            evidence.solomon = Some(plus);
            let v = if recurrent { Verdict::Recurrent } else { Verdict::Transient };
            return done(v, Rule::Solomon, evidence, audit, note);
        }
        return done(Verdict::Inconclusive, Rule::None, evidence, audit, "identity without two-sided homogeneity".into());
    }

    let report = analyze(f)?;
    evidence.fixed_points = Some(report.clone());
    let unique = report.unique;
    let p = report.unique_point().map(|fp| fp.p);
    let p_half = report.unique_at_half();
    let fprime_zero = report.fprime_half_zero();
    let f2 = report.fsecond_half_sign();

    if report.outside_theorem_range() {
        return done(
            Verdict::Inconclusive,
            Rule::None,
            evidence,
            audit,
            "f reaches 1 while dipping below 1/2; no rule covers this case".into(),
        );
    }

    // Unique fixed point away from 1/2.
    if audit.check(Rule::Theorem2, &[hyp2, unique, unique && !p_half]) {
        let note = format!("unique fixed point p = {}", p.unwrap_or(f64::NAN));
        return done(Verdict::Transient, Rule::Theorem2, evidence, audit, note);
    }

    if report.ge_half {
        let stable: Vec<f64> = report.fixed_points.iter().filter(|fp| fp.stable).map(|fp| fp.p).collect();
        let half_unique_stable = stable.len() == 1 && (stable[0] - 0.5).abs() <= 1e-9;
        let corollary = !half_unique_stable || (p_half && f2 > 0);
        if audit.check(Rule::Theorem1Corollary, &[true, true, corollary]) {
            let note = format!("stable fixed points {stable:?}, f''(1/2) = {}", report.fsecond_half);
            return done(Verdict::Transient, Rule::Theorem1Corollary, evidence, audit, note);
        }
        let est = estimate_with_report(f, &report, env.w_plus, budget)?;
        let ev = DriftEvidence::from(&est);
        let finite = matches!(est.regime, Regime::ConvergentFinite | Regime::Unknown);
        evidence.delta1 = Some(ev.clone());
        if audit.check(Rule::Theorem1, &[true, true, finite]) {
            let (lo, hi) = ev.ci.unwrap_or((f64::NAN, f64::NAN));
            // Partial sums are nondecreasing when f >= 1/2, so a truncated
            // estimate is still a valid lower bound.
            let hi = if est.regime == Regime::ConvergentFinite { hi } else { f64::INFINITY };
            let note = format!("E[delta^1_inf] in [{lo}, {hi}] at 99%");
            let v = if hi <= 1.0 {
                Verdict::Recurrent
            } else if lo > 1.0 {
                Verdict::Transient
            } else {
                return done(Verdict::Inconclusive, Rule::Theorem1, evidence, audit, note);
            };
            return done(v, Rule::Theorem1, evidence, audit, note);
        }
    } else {
        audit.check(Rule::Theorem1, &[true, false, false]);
    }

    if audit.check(Rule::Theorem2Corollary, &[hyp2, unique, p_half, fprime_zero, f2 != 0]) {
        let note = format!("f''(1/2) = {}", report.fsecond_half);
        return done(Verdict::Transient, Rule::Theorem2Corollary, evidence, audit, note);
    }

    if audit.check(Rule::Theorem2Drift, &[hyp2, unique, p_half, fprime_zero]) {
        let plus = estimate_with_report(f, &report, env.w_plus, budget)?;
        let minus_budget = DriftConfig { seed: rng::derive_seed(budget.seed, "delta-minus-1"), ..*budget };
        let minus = estimate_with_report(f, &report, env.negative(), &minus_budget)?;
        let (ep, em) = (DriftEvidence::from(&plus), DriftEvidence::from(&minus));
        evidence.delta1 = Some(ep.clone());
        evidence.delta_minus1 = Some(em.clone());
        let plus_fires = ep.ci.is_some_and(|(lo, _)| lo > 1.0);
        let minus_fires = em.ci.is_some_and(|(_, hi)| hi < -1.0);
        let note = format!("E[delta^1_inf] CI {:?}, E[delta^-1_inf] CI {:?}", ep.ci, em.ci);
        if plus_fires || minus_fires {
            return done(Verdict::Transient, Rule::Theorem2Drift, evidence, audit, note);
        }
        return done(Verdict::Inconclusive, Rule::Theorem2Drift, evidence, audit, note);
    }

    let fixed_ge_half = report.fixed_points.iter().all(|fp| fp.p >= 0.5 - 1e-9);
    let half_fixed = report.fixed_points.iter().any(|fp| (fp.p - 0.5).abs() <= 1e-9);
    let case = !half_fixed || (report.fixed_points.len() > 1 && fprime_zero);
    if audit.check(Rule::RightHalfCorollary, &[hyp2, report.ge_half_right, fixed_ge_half, case]) {
        let note = format!("fixed points {:?}", report.fixed_points.iter().map(|fp| fp.p).collect::<Vec<_>>());
        return done(Verdict::Transient, Rule::RightHalfCorollary, evidence, audit, note);
    }

    audit.check(Rule::Solomon, &[false, hyp2]);
    done(Verdict::Inconclusive, Rule::None, evidence, audit, "no rule applies".into())
}

/// Tolerance for the closed-form Solomon criterion to count as zero.
pub const SOLOMON_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolomonReport {
    /// Beta parameters `(l₀α₀, l₀(1 − α₀))` of the limiting proportion.
    pub beta_a: f64,
    pub beta_b: f64,
    /// `ψ(a) − ψ(b) = E[ln(α/(1 − α))]`.
    pub criterion: f64,
    pub verdict: Verdict,
    pub direction: Option<Direction>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub mc_horizon: usize,
    pub mc_replicas: usize,
}

/// Solomon's criterion for the identity map with homogeneous initial urns.
/// A Monte Carlo cross-check over `replicas` urns of `horizon` steps runs
/// when `replicas > 0`.
pub fn solomon_check(
    f: &ReinforcementFunction,
    init: UrnState,
    horizon: usize,
    replicas: usize,
    seed: u64,
) -> Result<SolomonReport> {
    if !f.is_identity() {
        return Err(Error::NotLinear);
    }
    init.validate()?;
    let (a, b) = (init.l * init.alpha, init.l * (1.0 - init.alpha));
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter("Beta parameters must both be positive".into()));
    }
    let criterion = digamma(a) - digamma(b);
    let (verdict, direction) = if criterion.abs() <= SOLOMON_TOL {
        (Verdict::Recurrent, None)
    } else if criterion > 0.0 {
        (Verdict::Transient, Some(Direction::Right))
    } else {
        (Verdict::Transient, Some(Direction::Left))
    };
    let (mc_mean, mc_stderr) = if replicas > 0 {
        let logits = rng::replicate(seed, replicas, |_, rng| {
            let mut urn = UrnProcess::new(init);
            for _ in 0..horizon {
                let x = urn.alpha();
                urn.record(rng::uniform(rng) < x);
            }
            let x = urn.alpha();
            (x / (1.0 - x)).ln()
        });
        let m = MeanSe::of(&logits);
        (Some(m.mean), Some(m.stderr))
    } else {
        (None, None)
    };
    Ok(SolomonReport {
        beta_a: a,
        beta_b: b,
        criterion,
        verdict,
        direction,
        mc_mean,
        mc_stderr,
        mc_horizon: horizon,
        mc_replicas: replicas,
    })
}
