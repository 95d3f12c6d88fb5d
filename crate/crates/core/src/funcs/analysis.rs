use serde::Serialize;

use super::ReinforcementFunction;
use crate::error::{Error, Result};

const GRID: usize = 10_000;
const ROOT_TOL: f64 = 1e-12;
const FLAT_TOL: f64 = 1e-9;
const FLAT_FRACTION: f64 = 0.01;
const STABLE_TOL: f64 = 1e-9;
const H1: f64 = 1e-5;
const H2: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub p: f64,
    pub fprime: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub fixed_points: Vec<FixedPoint>,
    pub fprime_half: f64,
    pub fsecond_half: f64,
    /// `f >= 1/2` on `[0, 1]`.
    pub ge_half: bool,
    /// `f >= 1/2` on `[1/2, 1]`.
    pub ge_half_right: bool,
    pub unique: bool,
    /// `f` attains 1 somewhere on the grid.
    pub reaches_one: bool,
    /// Derivatives came from the expression tree rather than finite differences.
    pub exact_derivatives: bool,
}

impl FixedPointReport {
    pub fn unique_point(&self) -> Option<&FixedPoint> {
        if self.unique {
            self.fixed_points.first()
        } else {
            None
        }
    }

    fn tol_first(&self) -> f64 {
        if self.exact_derivatives {
            1e-8
        } else {
            1e-6
        }
    }

    fn tol_second(&self) -> f64 {
        if self.exact_derivatives {
            1e-8
        } else {
            1e-4
        }
    }

    pub fn fprime_half_zero(&self) -> bool {
        self.fprime_half.abs() <= self.tol_first()
    }

    /// Sign of `f''(1/2)` with derivative noise treated as zero.
    pub fn fsecond_half_sign(&self) -> i8 {
        if self.fsecond_half > self.tol_second() {
            1
        } else if self.fsecond_half < -self.tol_second() {
            -1
        } else {
            0
        }
    }

    /// The unique fixed point is `1/2` (within root tolerance).
    pub fn unique_at_half(&self) -> bool {
        self.unique_point().is_some_and(|fp| (fp.p - 0.5).abs() <= 1e-9)
    }

    /// `f` touches 1 while dipping below 1/2: outside every theorem's range.
    pub fn outside_theorem_range(&self) -> bool {
        self.reaches_one && !self.ge_half
    }
}

/// `(f'(x), f''(x))`, from the expression tree when available.
pub fn derivative(f: &ReinforcementFunction, x: f64) -> (f64, f64) {
    if let Some(j) = f.jet(x) {
        return (j.d1, j.d2);
    }
    let e = |x: f64| f.eval_raw(x);
    let d1 = if x - H1 < 0.0 {
        (-3.0 * e(x) + 4.0 * e(x + H1) - e(x + 2.0 * H1)) / (2.0 * H1)
    } else if x + H1 > 1.0 {
        (3.0 * e(x) - 4.0 * e(x - H1) + e(x - 2.0 * H1)) / (2.0 * H1)
    } else {
        (e(x + H1) - e(x - H1)) / (2.0 * H1)
    };
    let d2 = if x - H2 < 0.0 {
        (e(x) - 2.0 * e(x + H2) + e(x + 2.0 * H2)) / (H2 * H2)
    } else if x + H2 > 1.0 {
        (e(x) - 2.0 * e(x - H2) + e(x - 2.0 * H2)) / (H2 * H2)
    } else {
        (e(x + H2) - 2.0 * e(x) + e(x - H2)) / (H2 * H2)
    };
    (d1, d2)
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locate fixed points and derivatives at 1/2 on a `10^4 + 1` point grid.
pub fn analyze(f: &ReinforcementFunction) -> Result<FixedPointReport> {
    let xs: Vec<f64> = (0..=GRID).map(|i| i as f64 / GRID as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f.eval_raw(x)).collect();

    let g: Vec<f64> = xs.iter().zip(&vals).map(|(x, v)| v - x).collect();
    let flat = g.iter().filter(|v| v.abs() <= FLAT_TOL).count();
    let percent = 100.0 * flat as f64 / xs.len() as f64;
    if percent > 100.0 * FLAT_FRACTION {
        return Err(Error::NonIsolatedFixedPoints { percent });
    }

    for (&x, &v) in xs.iter().zip(&vals) {
        if !(v > 0.0 && v <= 1.0 + 1e-12) {
            return Err(Error::RangeViolation { x, value: v });
        }
    }

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..xs.len() {
        if g[i].abs() <= ROOT_TOL {
            roots.push(xs[i]);
        }
        if i + 1 < xs.len() && g[i].abs() > ROOT_TOL && g[i + 1].abs() > ROOT_TOL && g[i] * g[i + 1] < 0.0 {
            roots.push(bisect(|x| f.eval_raw(x) - x, xs[i], xs[i + 1]));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);

    let fixed_points: Vec<FixedPoint> = roots
        .into_iter()
        .map(|p| {
            let (fprime, _) = derivative(f, p);
            FixedPoint { p, fprime, stable: fprime <= 1.0 + STABLE_TOL }
        })
        .collect();

    let (fprime_half, fsecond_half) = derivative(f, 0.5);
    let ge = |v: &f64| *v >= 0.5 - 1e-12;
    Ok(FixedPointReport {
        unique: fixed_points.len() == 1,
        fixed_points,
        fprime_half,
        fsecond_half,
        ge_half: vals.iter().all(ge),
        ge_half_right: vals[GRID / 2..].iter().all(ge),
        reaches_one: vals.iter().any(|&v| v >= 1.0),
        exact_derivatives: f.expr().is_some(),
    })
}

/// Largest `|f(1/2 - t) - f(1/2 + t)|` over a grid of `t ∈ [0, 1/2]`,
/// together with the offending `t`.
pub fn symmetry_defect(f: &ReinforcementFunction) -> (f64, f64) {
    let n = GRID / 2;
    let mut worst = (0.0, 0.0);
    for i in 0..=n {
        let t = i as f64 / GRID as f64;
        let d = (f.eval_raw(0.5 - t) - f.eval_raw(0.5 + t)).abs();
        if d > worst.0 {
            worst = (d, t);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str) -> ReinforcementFunction {
        ReinforcementFunction::parse(s).unwrap()
    }

    #[test]
    fn constant_half() {
        let r = analyze(&rf("0.5")).unwrap();
        assert!(r.unique);
        assert_eq!(r.fixed_points, vec![FixedPoint { p: 0.5, fprime: 0.0, stable: true }]);
    }

    #[test]
    fn quartic_unique_at_half() {
        let f = rf("0.5 + 2*(x-0.5)^4");
        let r = analyze(&f).unwrap();
        assert!(r.unique && r.ge_half && r.ge_half_right);
        assert!((r.fixed_points[0].p - 0.5).abs() < 1e-12);
        assert_eq!(r.fprime_half, 0.0);
        assert_eq!(r.fsecond_half, 0.0);
        assert!(!r.reaches_one);
    }

    #[test]
    fn identity_is_not_isolated() {
        assert!(matches!(analyze(&rf("x")), Err(Error::NonIsolatedFixedPoints { .. })));
    }

    #[test]
    fn range_violation() {
        assert!(matches!(analyze(&rf("1.5*x")), Err(Error::RangeViolation { .. })));
        assert!(matches!(analyze(&rf("x - 0.1")), Err(Error::RangeViolation { .. })));
    }

    #[test]
    fn const_point_seven_and_mix() {
        let r = analyze(&ReinforcementFunction::constant(0.7).unwrap()).unwrap();
        assert!(r.unique && (r.fixed_points[0].p - 0.7).abs() < 1e-12);
        let m = analyze(&ReinforcementFunction::mix()).unwrap();
        assert!(m.unique_at_half() && m.fprime_half_zero());
        assert_eq!(m.fsecond_half_sign(), 1);
        assert!(!m.ge_half && !m.ge_half_right);
    }

    #[test]
    fn family_above_four_gains_fixed_point_at_one() {
        let f = ReinforcementFunction::quartic(2.0).unwrap();
        let r = analyze(&f.family(6.0).unwrap()).unwrap();
        assert_eq!(r.fixed_points.len(), 3);
        assert!(!r.fixed_points[1].stable);
        let last = r.fixed_points.last().unwrap();
        assert_eq!(last.p, 1.0);
        assert!(last.stable);
        let r4 = analyze(&f.family(4.0).unwrap()).unwrap();
        assert!(r4.fixed_points.iter().any(|fp| fp.p == 1.0 && !fp.stable));
    }

    #[test]
    fn finite_differences_agree_with_jets() {
        let closure = ReinforcementFunction::from_fn("m", |x| {
            let t = x - 0.5;
            0.5 + 1.5 * t * t - 8.0 * t.powi(4)
        });
        let a = analyze(&closure).unwrap();
        let b = analyze(&ReinforcementFunction::mix()).unwrap();
        assert!(!a.exact_derivatives);
        assert!(a.fprime_half_zero());
        assert!((a.fsecond_half - b.fsecond_half).abs() < 1e-4);
        assert_eq!(a.fsecond_half_sign(), 1);
    }

    #[test]
    fn linear_fixed_point_derivative() {
        let r = analyze(&ReinforcementFunction::linear(0.4).unwrap()).unwrap();
        assert!(r.unique);
        assert!((r.fixed_points[0].fprime - 0.4).abs() < 1e-12);
        assert!(!r.ge_half);
    }

    #[test]
    fn symmetry() {
        assert!(symmetry_defect(&ReinforcementFunction::quartic(2.0).unwrap()).0 < 1e-15);
        assert!(symmetry_defect(&ReinforcementFunction::linear(0.4).unwrap()).0 > 0.1);
    }
}
