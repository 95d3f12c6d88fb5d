use serde::Serialize;

use super::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::funcs::ReinforcementFunction;
use crate::urn::UrnProcess;

pub const ORACLE_MAX_HORIZON: usize = 16;

/// Running state of one enumerated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub x: i64,
    pub u: u64,
    pub xplus: i64,
    pub dplus: f64,
}

/// Visit every path of length `h` with its exact probability. The visitor
/// receives the probability and the path points `0..=h`.
pub fn enumerate_paths(
    f: &ReinforcementFunction,
    env: EnvironmentSpec,
    h: usize,
    mut visit: impl FnMut(f64, &[PathPoint]),
) -> Result<()> {
    if h > ORACLE_MAX_HORIZON {
        return Err(Error::HorizonTooLarge { requested: h, limit: ORACLE_MAX_HORIZON });
    }
    env.validate()?;
    let off = h as i64;
    let mut urns: Vec<UrnProcess> = (-off..=off).map(|x| UrnProcess::new(env.site(x))).collect();
    let mut path = Vec::with_capacity(h + 1);
    path.push(PathPoint { x: 0, u: 0, xplus: 0, dplus: 0.0 });
    recurse(f, h, off, &mut urns, &mut path, 1.0, &mut visit);
    Ok(())
}

fn recurse(
    f: &ReinforcementFunction,
    h: usize,
    off: i64,
    urns: &mut [UrnProcess],
    path: &mut Vec<PathPoint>,
    prob: f64,
    visit: &mut impl FnMut(f64, &[PathPoint]),
) {
    if path.len() == h + 1 {
        visit(prob, path);
        return;
    }
    let cur = *path.last().unwrap();
    let slot = (cur.x + off) as usize;
    let saved = urns[slot];
    let p = f.eval(saved.alpha());
    for right in [true, false] {
        let q = if right { p } else { 1.0 - p };
        if q == 0.0 {
            continue;
        }
        let mut urn = saved;
        urn.record(right);
        urns[slot] = urn;
        let d: i64 = if right { 1 } else { -1 };
        let mut next = PathPoint { x: cur.x + d, ..cur };
        if cur.x >= 0 {
            next.xplus += d;
            next.dplus += 2.0 * p - 1.0;
            if cur.x == 0 && !right {
                next.u += 1;
            }
        }
        path.push(next);
        recurse(f, h, off, urns, path, prob * q, visit);
        path.pop();
    }
    urns[slot] = saved;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub horizon: usize,
    pub total_probability: f64,
    /// `position_law[m][j + h] = P(X_m = j)`.
    pub position_law: Vec<Vec<f64>>,
    pub mplus_mean: Vec<f64>,
    pub xplus_mean: Vec<f64>,
    pub dplus_mean: Vec<f64>,
    pub u_mean: Vec<f64>,
    /// `P(T_a ≤ h)` for `a = 1..=h`.
    pub hit_up: Vec<f64>,
    /// `P(T_{−a} ≤ h)` for `a = 1..=h`.
    pub hit_down: Vec<f64>,
}

impl OracleReport {
    pub fn prob_at(&self, m: usize, j: i64) -> f64 {
        let idx = j + self.horizon as i64;
        if idx < 0 {
            return 0.0;
        }
        self.position_law[m].get(idx as usize).copied().unwrap_or(0.0)
    }
}

/// Exact law of the first `h ≤ 16` steps by enumerating all `2^h` paths.
pub fn exact_walk_oracle(f: &ReinforcementFunction, env: EnvironmentSpec, h: usize) -> Result<OracleReport> {
    let width = 2 * h + 1;
    let mut rep = OracleReport {
        horizon: h,
        total_probability: 0.0,
        position_law: vec![vec![0.0; width]; h + 1],
        mplus_mean: vec![0.0; h + 1],
        xplus_mean: vec![0.0; h + 1],
        dplus_mean: vec![0.0; h + 1],
        u_mean: vec![0.0; h + 1],
        hit_up: vec![0.0; h],
        hit_down: vec![0.0; h],
    };
    enumerate_paths(f, env, h, |p, path| {
        rep.total_probability += p;
        let (mut hi, mut lo) = (0i64, 0i64);
        for (m, pt) in path.iter().enumerate() {
            rep.position_law[m][(pt.x + h as i64) as usize] += p;
            rep.mplus_mean[m] += p * (pt.xplus as f64 - pt.dplus);
            rep.xplus_mean[m] += p * pt.xplus as f64;
            rep.dplus_mean[m] += p * pt.dplus;
            rep.u_mean[m] += p * pt.u as f64;
            hi = hi.max(pt.x);
            lo = lo.min(pt.x);
        }
        for a in 1..=hi as usize {
            rep.hit_up[a - 1] += p;
        }
        for a in 1..=(-lo) as usize {
            rep.hit_down[a - 1] += p;
        }
    })?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::urn::UrnState;
    use crate::walk::{simulate_walk, WalkOptions};

    fn env() -> EnvironmentSpec {
        EnvironmentSpec::homogeneous(UrnState::new(0.5, 2.0).unwrap())
    }

    #[test]
    fn symmetric_two_steps() {
        let f = ReinforcementFunction::constant(0.5).unwrap();
        let r = exact_walk_oracle(&f, env(), 2).unwrap();
        assert_eq!(r.prob_at(2, 0), 0.5);
        assert_eq!(r.prob_at(2, 2), 0.25);
        assert_eq!(r.prob_at(2, -2), 0.25);
        assert_eq!(r.hit_up[0], 0.5);
    }

    #[test]
    fn first_step_and_martingale() {
        let f = ReinforcementFunction::quartic(2.0).unwrap();
        let r = exact_walk_oracle(&f, env(), 12).unwrap();
        assert!((r.prob_at(1, 1) - 0.5).abs() < 1e-12);
        assert!((r.total_probability - 1.0).abs() < 1e-12);
        for m in 0..=12 {
            assert!(r.mplus_mean[m].abs() < 1e-10);
            assert!((r.xplus_mean[m] - r.dplus_mean[m]).abs() < 1e-10);
        }
    }

    #[test]
    fn horizon_guard() {
        let f = ReinforcementFunction::polya();
        assert!(matches!(exact_walk_oracle(&f, env(), 17), Err(Error::HorizonTooLarge { .. })));
    }

    #[test]
    fn monte_carlo_agrees_with_oracle() {
        let f = ReinforcementFunction::mix();
        let h = 10;
        let r = exact_walk_oracle(&f, env(), h).unwrap();
        let n = 40_000;
        let finals: Vec<i64> =
            rng::replicate(21, n, |i, _| simulate_walk(&f, env(), WalkOptions::horizon(h as u64), 21, i as u64).unwrap().final_x);
        for j in (-10..=10).step_by(2) {
            let p = r.prob_at(h, j);
            let phat = finals.iter().filter(|&&x| x == j).count() as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-9);
            assert!((phat - p).abs() <= 4.0 * se + 1e-12, "j={j} {phat} vs {p}");
        }
    }
}
