//! Pathwise couplings of two urn processes driven by one uniform stream.
//!
//! - Function order: both urns add Red iff `u < f(α)` (resp. `g(β)`), so
//!   `f ≤ g` gives `α_n ≤ β_n`.
//! - Off-centre and mass order use the mirror rule: an urn at `x ≥ 1/2` adds
//!   Red iff `u ≤ f(x)`, an urn at `x < 1/2` adds Red iff `u ≥ 1 − f(x)`.
//!
//! Dominance is checked on integer Red counts, never on rounded proportions.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcs::{symmetry_defect, ReinforcementFunction};
use crate::rng::{self, StreamRng};
use crate::urn::{Draw, UrnProcess, UrnState, UrnTrajectory};

const ORDER_GRID: usize = 10_000;
const SYMMETRY_TOL: f64 = 1e-10;
const INTEGRALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CouplingKind {
    FunctionOrder,
    OffCenter,
    MassOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledRun {
    pub kind: CouplingKind,
    /// The trajectory that should stay below (function order) or closer to
    /// 1/2 (off-centre: the `β` urn started at 1/2; mass order: the heavier urn).
    pub alpha: UrnTrajectory,
    pub beta: UrnTrajectory,
    /// Per-step dominance failures, index `n` for the state after `n` draws.
    pub violation_steps: Vec<usize>,
}

impl CoupledRun {
    pub fn violations(&self) -> usize {
        self.violation_steps.len()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,alpha,beta,violation")?;
        let mut bad = self.violation_steps.iter().peekable();
        for (n, (a, b)) in self.alpha.states.iter().zip(&self.beta.states).enumerate() {
            let v = if bad.peek() == Some(&&n) {
                bad.next();
                1
            } else {
                0
            };
            writeln!(w, "{n},{},{},{v}", a.alpha, b.alpha)?;
        }
        Ok(())
    }
}

#[inline]
fn mirror_red(f: &ReinforcementFunction, x: f64, u: f64) -> bool {
    if x >= 0.5 {
        u <= f.eval(x)
    } else {
        u >= 1.0 - f.eval(x)
    }
}

struct Pair {
    a: UrnProcess,
    b: UrnProcess,
    sa: Vec<UrnState>,
    sb: Vec<UrnState>,
    da: Vec<Draw>,
    db: Vec<Draw>,
}

impl Pair {
    fn new(a: UrnState, b: UrnState, n: usize) -> Pair {
        let mut sa = Vec::with_capacity(n + 1);
        let mut sb = Vec::with_capacity(n + 1);
        sa.push(a);
        sb.push(b);
        Pair {
            a: UrnProcess::new(a),
            b: UrnProcess::new(b),
            sa,
            sb,
            da: Vec::with_capacity(n),
            db: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, ra: bool, rb: bool) {
        self.a.record(ra);
        self.b.record(rb);
        self.sa.push(self.a.state());
        self.sb.push(self.b.state());
        self.da.push(if ra { Draw::Red } else { Draw::Blue });
        self.db.push(if rb { Draw::Red } else { Draw::Blue });
    }

    fn finish(self, kind: CouplingKind, violation_steps: Vec<usize>, seed: u64, stream: u64) -> CoupledRun {
        CoupledRun {
            kind,
            alpha: UrnTrajectory { initial: self.sa[0], draws: self.da, states: self.sa, seed, stream },
            beta: UrnTrajectory { initial: self.sb[0], draws: self.db, states: self.sb, seed, stream },
            violation_steps,
        }
    }
}

fn check_order(f: &ReinforcementFunction, g: &ReinforcementFunction) -> Result<()> {
    for i in 0..=ORDER_GRID {
        let x = i as f64 / ORDER_GRID as f64;
        let (a, b) = (f.eval(x), g.eval(x));
        if a > b {
            return Err(Error::PreconditionOrder(format!("f({x}) = {a} > g({x}) = {b}")));
        }
    }
    Ok(())
}

fn check_symmetric(f: &ReinforcementFunction) -> Result<()> {
    let (d, t) = symmetry_defect(f);
    if d > SYMMETRY_TOL {
        return Err(Error::SymmetryViolation {
            x: 0.5 - t,
            mirror: 0.5 + t,
            left: f.eval_raw(0.5 - t),
            right: f.eval_raw(0.5 + t),
        });
    }
    Ok(())
}

/// `α_n` driven by `f` and `β_n` driven by `g`, both from `init`.
/// Requires `f ≤ g` on a `10^4 + 1` point grid.
pub fn couple_function_order(
    f: &ReinforcementFunction,
    g: &ReinforcementFunction,
    init: UrnState,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<CoupledRun> {
    init.validate()?;
    check_order(f, g)?;
    Ok(function_order_unchecked(f, g, init, n, seed, stream))
}

fn function_order_unchecked(
    f: &ReinforcementFunction,
    g: &ReinforcementFunction,
    init: UrnState,
    n: usize,
    seed: u64,
    stream: u64,
) -> CoupledRun {
    let mut rng = rng::stream(seed, stream);
    let mut pair = Pair::new(init, init, n);
    let mut bad = Vec::new();
    for step in 1..=n {
        let u = rng::uniform(&mut rng);
        let ra = u < f.eval(pair.a.alpha());
        let rb = u < g.eval(pair.b.alpha());
        pair.push(ra, rb);
        if pair.a.reds() > pair.b.reds() {
            bad.push(step);
        }
    }
    pair.finish(CouplingKind::FunctionOrder, bad, seed, stream)
}

/// `m = 2αl − l`, required to be a nonnegative integer.
pub fn off_center_offset(alpha: f64, l: f64) -> Result<u64> {
    let m = 2.0 * alpha * l - l;
    let r = m.round();
    if r < 0.0 || (m - r).abs() > INTEGRALITY_TOL {
        return Err(Error::IntegralityViolation { value: m });
    }
    Ok(r as u64)
}

/// Urns from `(α, 2l)` and `(1/2, 2l)` under the mirror rule;
/// checks `|β_n − 1/2| ≤ |α_n − 1/2|`. The run's `alpha` field holds the
/// off-centre urn and `beta` the centred one.
pub fn couple_off_center(
    f: &ReinforcementFunction,
    alpha: f64,
    l: f64,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<CoupledRun> {
    let a0 = UrnState::new(alpha, 2.0 * l)?;
    let b0 = UrnState::new(0.5, 2.0 * l)?;
    let m = off_center_offset(alpha, l)? as i64;
    check_symmetric(f)?;
    let mut rng = rng::stream(seed, stream);
    let mut pair = Pair::new(a0, b0, n);
    let mut bad = Vec::new();
    for step in 1..=n {
        mirror_step(f, &mut pair, &mut rng);
        let (ka, kb, s) = (pair.a.reds() as i64, pair.b.reds() as i64, step as i64);
        // 2(β L) − L = 2 k_b − n and 2(α L) − L = 2m + 2 k_a − n.
        if (2 * kb - s).abs() > (2 * m + 2 * ka - s).abs() {
            bad.push(step);
        }
    }
    Ok(pair.finish(CouplingKind::OffCenter, bad, seed, stream))
}

fn mirror_step(f: &ReinforcementFunction, pair: &mut Pair, rng: &mut StreamRng) {
    let u = rng::uniform(rng);
    let ra = mirror_red(f, pair.a.alpha(), u);
    let rb = mirror_red(f, pair.b.alpha(), u);
    pair.push(ra, rb);
}

/// Urns from `(1/2, 2 l₁)` (the run's `alpha`) and `(1/2, 2 l₀)` (its
/// `beta`) under the mirror rule; checks `|β_n − 1/2| ≥ |α_n − 1/2|`.
pub fn couple_mass_order(
    f: &ReinforcementFunction,
    l0: f64,
    l1: f64,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<CoupledRun> {
    if !(l0 > 0.0 && l0 <= l1) {
        return Err(Error::PreconditionOrder(format!("need 0 < l0 <= l1, got l0 = {l0}, l1 = {l1}")));
    }
    let a0 = UrnState::new(0.5, 2.0 * l1)?;
    let b0 = UrnState::new(0.5, 2.0 * l0)?;
    check_symmetric(f)?;
    let mut rng = rng::stream(seed, stream);
    let mut pair = Pair::new(a0, b0, n);
    let mut bad = Vec::new();
    for step in 1..=n {
        mirror_step(f, &mut pair, &mut rng);
        let s = step as f64;
        let da = (2.0 * pair.a.reds() as f64 - s).abs() * (2.0 * l0 + s);
        let db = (2.0 * pair.b.reds() as f64 - s).abs() * (2.0 * l1 + s);
        if db < da * (1.0 - 1e-12) {
            bad.push(step);
        }
    }
    Ok(pair.finish(CouplingKind::MassOrder, bad, seed, stream))
}

/// Which coupling to run across many streams.
#[derive(Debug, Clone)]
pub enum CouplingSpec {
    FunctionOrder { f: ReinforcementFunction, g: ReinforcementFunction, init: UrnState },
    OffCenter { f: ReinforcementFunction, alpha: f64, l: f64 },
    MassOrder { f: ReinforcementFunction, l0: f64, l1: f64 },
}

impl CouplingSpec {
    pub fn run(&self, n: usize, seed: u64, stream: u64) -> Result<CoupledRun> {
        match self {
            CouplingSpec::FunctionOrder { f, g, init } => couple_function_order(f, g, *init, n, seed, stream),
            CouplingSpec::OffCenter { f, alpha, l } => couple_off_center(f, *alpha, *l, n, seed, stream),
            CouplingSpec::MassOrder { f, l0, l1 } => couple_mass_order(f, *l0, *l1, n, seed, stream),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationSummary {
    pub kind: CouplingKind,
    pub streams: usize,
    pub steps: usize,
    pub violating_streams: usize,
    pub total_violations: usize,
    /// `(stream, step)` of the first violation in stream order.
    pub first: Option<(usize, usize)>,
}

/// Run the coupling on streams `0..streams` and count dominance failures.
pub fn violation_sweep(spec: &CouplingSpec, n: usize, streams: usize, seed: u64) -> Result<ViolationSummary> {
    // Validate once up front so errors surface before fanning out.
    let first = spec.run(0, seed, 0)?;
    let counts: Vec<Vec<usize>> = rng::replicate(seed, streams, |r, _| {
        spec.run(n, seed, r as u64).map(|c| c.violation_steps).unwrap_or_default()
    });
    let mut summary = ViolationSummary {
        kind: first.kind,
        streams,
        steps: n,
        violating_streams: 0,
        total_violations: 0,
        first: None,
    };
    for (r, v) in counts.iter().enumerate() {
        if !v.is_empty() {
            summary.violating_streams += 1;
            summary.total_violations += v.len();
            if summary.first.is_none() {
                summary.first = Some((r, v[0]));
            }
        }
    }
    Ok(summary)
}
