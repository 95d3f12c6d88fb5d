//! Two-colour urn processes and their exact finite-horizon law.
//!
//! From state `(α, l)` a Red ball is added with probability `f(α)`:
//! `α' = (lα + 1)/(l + 1)` on Red, `α' = lα/(l + 1)` on Blue, `l' = l + 1`.
//! After `n` steps with `k` Red draws the state is
//! `((l₀α₀ + k)/(l₀ + n), l₀ + n)`, so the law at time `n` is a distribution
//! over `k ∈ {0, …, n}`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::ReinforcementFunction;
use crate::rng::{self, StreamRng};

/// Default guard on the horizon of the full DP table.
pub const MAX_DP_HORIZON: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UrnState {
    pub alpha: f64,
    pub l: f64,
}

impl UrnState {
    pub fn new(alpha: f64, l: f64) -> Result<Self> {
        let s = UrnState { alpha, l };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {} must lie in [0, 1]", self.alpha)));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass l = {} must be > 0", self.l)));
        }
        Ok(())
    }

    /// Red mass `lα`.
    pub fn red(&self) -> f64 {
        self.l * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Draw {
    Red,
    Blue,
}

impl Draw {
    pub fn letter(self) -> char {
        match self {
            Draw::Red => 'R',
            Draw::Blue => 'B',
        }
    }
}

/// One urn transition; Red iff `uniform < f(α)`.
pub fn urn_step(state: UrnState, f: &ReinforcementFunction, uniform: f64) -> UrnState {
    let red = uniform < f.eval(state.alpha);
    let l = state.l + 1.0;
    let alpha = (state.red() + if red { 1.0 } else { 0.0 }) / l;
    UrnState { alpha, l }
}

/// An urn tracked by its Red-draw count, so the state never accumulates
/// rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrnProcess {
    base_red: f64,
    base_l: f64,
    n: u64,
    k: u64,
}

impl UrnProcess {
    pub fn new(init: UrnState) -> Self {
        UrnProcess { base_red: init.red(), base_l: init.l, n: 0, k: 0 }
    }

    /// Urn after `n` steps of which `k` were Red.
    pub fn at(init: UrnState, n: u64, k: u64) -> Self {
        debug_assert!(k <= n);
        UrnProcess { base_red: init.red(), base_l: init.l, n, k }
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        (self.base_red + self.k as f64) / (self.base_l + self.n as f64)
    }

    #[inline]
    pub fn l(&self) -> f64 {
        self.base_l + self.n as f64
    }

    pub fn state(&self) -> UrnState {
        UrnState { alpha: self.alpha(), l: self.l() }
    }

    pub fn steps(&self) -> u64 {
        self.n
    }

    pub fn reds(&self) -> u64 {
        self.k
    }

    #[inline]
    pub fn record(&mut self, red: bool) {
        self.n += 1;
        self.k += red as u64;
    }

    /// Draw with a given uniform. Returns the draw together with the value
    /// `f(α)` used for it.
    #[inline]
    pub fn step(&mut self, f: &ReinforcementFunction, uniform: f64) -> (Draw, f64) {
        let p = f.eval(self.alpha());
        let red = uniform < p;
        self.record(red);
        (if red { Draw::Red } else { Draw::Blue }, p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrnTrajectory {
    pub initial: UrnState,
    pub draws: Vec<Draw>,
    pub states: Vec<UrnState>,
    pub seed: u64,
    pub stream: u64,
}

impl UrnTrajectory {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,alpha,l,draw")?;
        for (n, s) in self.states.iter().enumerate() {
            let d = if n == 0 { String::new() } else { self.draws[n - 1].letter().to_string() };
            writeln!(w, "{n},{},{},{d}", s.alpha, s.l)?;
        }
        Ok(())
    }
}

/// Simulate `n` steps on stream `(seed, stream)`.
pub fn simulate_urn(f: &ReinforcementFunction, init: UrnState, n: usize, seed: u64, stream: u64) -> UrnTrajectory {
    let mut rng = rng::stream(seed, stream);
    simulate_urn_with(f, init, n, &mut rng, seed, stream)
}

fn simulate_urn_with(
    f: &ReinforcementFunction,
    init: UrnState,
    n: usize,
    rng: &mut StreamRng,
    seed: u64,
    stream: u64,
) -> UrnTrajectory {
    let mut p = UrnProcess::new(init);
    let mut draws = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n + 1);
    states.push(init);
    for _ in 0..n {
        let (d, _) = p.step(f, rng::uniform(rng));
        draws.push(d);
        states.push(p.state());
    }
    UrnTrajectory { initial: init, draws, states, seed, stream }
}

/// Law of the Red count: `P(n, k)` for `0 ≤ k ≤ n ≤ N`.
#[derive(Debug, Clone)]
pub struct ExactUrnLaw {
    pub horizon: usize,
    pub initial: UrnState,
    rows: Vec<Vec<f64>>,
}

impl ExactUrnLaw {
    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn prob(&self, n: usize, k: usize) -> f64 {
        self.rows[n].get(k).copied().unwrap_or(0.0)
    }

    pub fn alpha_at(&self, n: usize, k: usize) -> f64 {
        UrnProcess::at(self.initial, n as u64, k as u64).alpha()
    }

    /// `E[g(α_n)]`.
    pub fn expect(&self, n: usize, g: impl Fn(f64) -> f64) -> f64 {
        self.rows[n].iter().enumerate().map(|(k, p)| p * g(self.alpha_at(n, k))).sum()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,k,prob")?;
        for (n, row) in self.rows.iter().enumerate() {
            for (k, p) in row.iter().enumerate() {
                writeln!(w, "{n},{k},{p}")?;
            }
        }
        Ok(())
    }
}

/// Streaming DP: holds only the current row.
#[derive(Debug, Clone)]
pub struct UrnDp {
    init: UrnState,
    n: usize,
    row: Vec<f64>,
    fvals: Vec<f64>,
}

impl UrnDp {
    pub fn new(init: UrnState) -> Self {
        UrnDp { init, n: 0, row: vec![1.0], fvals: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    pub fn alpha_at(&self, k: usize) -> f64 {
        UrnProcess::at(self.init, self.n as u64, k as u64).alpha()
    }

    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.row.iter().enumerate().map(|(k, p)| p * g(self.alpha_at(k))).sum()
    }

    /// `f(α_{n,k})` for the current row, computed once per row.
    pub fn fvals(&mut self, f: &ReinforcementFunction) -> &[f64] {
        if self.fvals.len() != self.row.len() {
            let vals: Vec<f64> = (0..self.row.len()).map(|k| f.eval(self.alpha_at(k))).collect();
            self.fvals = vals;
        }
        &self.fvals
    }

    pub fn advance(&mut self, f: &ReinforcementFunction) {
        self.fvals(f);
        let m = self.row.len();
        let mut next = vec![0.0; m + 1];
        for k in 0..m {
            let p = self.row[k];
            let q = self.fvals[k];
            next[k] += p * (1.0 - q);
            next[k + 1] += p * q;
        }
        let s: f64 = next.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            next.iter_mut().for_each(|v| *v /= s);
        }
        self.row = next;
        self.fvals.clear();
        self.n += 1;
    }
}

pub fn exact_urn_dp(f: &ReinforcementFunction, init: UrnState, horizon: usize) -> Result<ExactUrnLaw> {
    exact_urn_dp_limited(f, init, horizon, MAX_DP_HORIZON)
}

pub fn exact_urn_dp_limited(
    f: &ReinforcementFunction,
    init: UrnState,
    horizon: usize,
    limit: usize,
) -> Result<ExactUrnLaw> {
    if horizon > limit {
        return Err(Error::HorizonTooLarge { requested: horizon, limit });
    }
    init.validate()?;
    let mut dp = UrnDp::new(init);
    let mut rows = Vec::with_capacity(horizon + 1);
    rows.push(dp.row().to_vec());
    for _ in 0..horizon {
        dp.advance(f);
        rows.push(dp.row().to_vec());
    }
    Ok(ExactUrnLaw { horizon, initial: init, rows })
}

/// Exact expectations of the drift series along the urn.
#[derive(Debug, Clone)]
pub struct ExactDrift {
    /// `E[δ_n]` for `n = 0..=N`.
    pub mean: Vec<f64>,
    pub pos: Vec<f64>,
    pub neg: Vec<f64>,
    /// `E[α_n]`.
    pub alpha_mean: Vec<f64>,
    /// DP state at the horizon, for continuations.
    pub terminal: UrnDp,
}

/// `E[δ_n]`, `E[δ_n^±]` and `E[α_n]` for `n ≤ N` in `O(N)` memory.
pub fn exact_drift(f: &ReinforcementFunction, init: UrnState, horizon: usize) -> Result<ExactDrift> {
    init.validate()?;
    let mut dp = UrnDp::new(init);
    let cap = horizon + 1;
    let (mut mean, mut pos, mut neg, mut alpha_mean) =
        (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
    let (mut m, mut p, mut q) = (0.0, 0.0, 0.0);
    for n in 0..=horizon {
        let fv = dp.fvals(f).to_vec();
        let (mut dm, mut dpos, mut dneg, mut am) = (0.0, 0.0, 0.0, 0.0);
        for (k, (&w, &fk)) in dp.row().iter().zip(&fv).enumerate() {
            let inc = 2.0 * fk - 1.0;
            dm += w * inc;
            if inc > 0.0 {
                dpos += w * inc;
            } else {
                dneg -= w * inc;
            }
            am += w * dp.alpha_at(k);
        }
        m += dm;
        p += dpos;
        q += dneg;
        mean.push(m);
        pos.push(p);
        neg.push(q);
        alpha_mean.push(am);
        if n < horizon {
            dp.advance(f);
        }
    }
    Ok(ExactDrift { mean, pos, neg, alpha_mean, terminal: dp })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(a: f64, l: f64) -> UrnState {
        UrnState::new(a, l).unwrap()
    }

    #[test]
    fn step_examples() {
        let f = ReinforcementFunction::constant(0.9).unwrap();
        assert_eq!(urn_step(st(0.5, 2.0), &f, 0.5), UrnState { alpha: 2.0 / 3.0, l: 3.0 });
        assert_eq!(urn_step(st(0.5, 2.0), &f, 0.95), UrnState { alpha: 1.0 / 3.0, l: 3.0 });
        let p = urn_step(st(2.0 / 3.0, 3.0), &ReinforcementFunction::polya(), 0.6);
        assert_eq!(p, UrnState { alpha: 0.75, l: 4.0 });
    }

    #[test]
    fn invalid_states() {
        assert!(UrnState::new(1.1, 1.0).is_err());
        assert!(UrnState::new(0.5, 0.0).is_err());
    }

    #[test]
    fn trajectory_is_deterministic_and_conserves_mass() {
        let f = ReinforcementFunction::polya();
        let a = simulate_urn(&f, st(0.5, 2.0), 500, 11, 3);
        let b = simulate_urn(&f, st(0.5, 2.0), 500, 11, 3);
        assert_eq!(a, b);
        assert_eq!(a.states.last().unwrap().l, 502.0);
        let reds = a.draws.iter().filter(|d| **d == Draw::Red).count() as f64;
        let last = a.states.last().unwrap();
        assert!((last.red() - 1.0 - reds).abs() < 1e-9);
        for w in a.states.windows(2).zip(&a.draws) {
            let ((s, t), d) = ((w.0[0], w.0[1]), w.1);
            let expect = (s.red() + if *d == Draw::Red { 1.0 } else { 0.0 }) / (s.l + 1.0);
            assert!((t.alpha - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn dp_small_cases() {
        let half = ReinforcementFunction::constant(0.5).unwrap();
        let law = exact_urn_dp(&half, st(0.5, 2.0), 2).unwrap();
        assert_eq!(law.row(2), &[0.25, 0.5, 0.25]);
        let polya = exact_urn_dp(&ReinforcementFunction::polya(), st(0.5, 2.0), 2).unwrap();
        for &p in polya.row(2) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quartic_first_drift_term() {
        let f = ReinforcementFunction::quartic(2.0).unwrap();
        let d = exact_drift(&f, st(0.5, 2.0), 1).unwrap();
        assert_eq!(d.mean[0], 0.0);
        assert!((d.mean[1] - 2.0 / 648.0).abs() < 1e-15);
    }

    #[test]
    fn horizon_guard() {
        let f = ReinforcementFunction::polya();
        assert!(matches!(
            exact_urn_dp_limited(&f, st(0.5, 2.0), 11, 10),
            Err(Error::HorizonTooLarge { requested: 11, limit: 10 })
        ));
    }

    #[test]
    fn rows_normalised_and_odd_symmetric_null() {
        for f in [ReinforcementFunction::polya(), ReinforcementFunction::linear(0.4).unwrap()] {
            let d = exact_drift(&f, st(0.5, 2.0), 1000).unwrap();
            for n in 0..=1000 {
                assert!(d.mean[n].abs() < 1e-12, "{f} n={n} {}", d.mean[n]);
                assert!((d.alpha_mean[n] - 0.5).abs() < 1e-12);
            }
            let s: f64 = d.terminal.row().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn streaming_matches_table() {
        let f = ReinforcementFunction::mix();
        let law = exact_urn_dp(&f, st(0.3, 1.5), 60).unwrap();
        let d = exact_drift(&f, st(0.3, 1.5), 60).unwrap();
        for n in [0, 1, 17, 60] {
            assert!((law.expect(n, |a| a) - d.alpha_mean[n]).abs() < 1e-14);
        }
        let direct: f64 = (0..=60).map(|n| law.expect(n, |a| 2.0 * f.eval(a) - 1.0)).sum();
        assert!((direct - d.mean[60]).abs() < 1e-12);
    }

    #[test]
    fn csv_shapes() {
        let f = ReinforcementFunction::polya();
        let mut buf = Vec::new();
        simulate_urn(&f, st(0.5, 2.0), 2, 1, 0).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,alpha,l,draw\n0,0.5,2,\n1,"));
        let mut buf = Vec::new();
        exact_urn_dp(&f, st(0.5, 2.0), 1).unwrap().write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,k,prob\n0,0,1\n1,0,0.5\n1,1,0.5\n");
    }
}
