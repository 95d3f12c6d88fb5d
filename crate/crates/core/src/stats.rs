//! Small statistical helpers shared by the Monte Carlo estimators.

use serde::{Deserialize, Serialize};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanSe {
    /// Two-pass mean and standard error; summation runs in slice order.
    pub fn of(xs: &[f64]) -> MeanSe {
        let n = xs.len();
        if n == 0 {
            return MeanSe { mean: f64::NAN, stderr: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n as f64 - 1.0) / n as f64).sqrt()
        } else {
            0.0
        };
        MeanSe { mean, stderr, n }
    }

    pub fn variance(xs: &[f64]) -> f64 {
        let n = xs.len();
        if n < 2 {
            return f64::NAN;
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0)
    }
}

/// Combined standard error of a difference or sum of independent estimates.
pub fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// Kolmogorov–Smirnov distance between the empirical law of `xs` and U(0,1).
pub fn ks_uniform(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (x - lo).abs().max((hi - x).abs())
        })
        .fold(0.0, f64::max)
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Slope of `ln y` against `ln x`, skipping nonpositive values.
/// `None` when fewer than two usable points remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    if lx.len() < 2 {
        return None;
    }
    Some(linear_fit(&lx, &ly).1)
}

/// Fit of `v(N) ≈ limit - coeff * N^(-exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub limit: f64,
    pub coeff: f64,
    pub exponent: f64,
    pub rss: f64,
}

impl TailFit {
    /// Remaining mass `limit - v(N)` predicted by the fit.
    pub fn tail_beyond(&self, n: f64) -> f64 {
        self.coeff * n.powf(-self.exponent)
    }
}

/// Least squares fit with the exponent held fixed.
pub fn fit_tail_fixed(ns: &[f64], vals: &[f64], exponent: f64) -> TailFit {
    let zs: Vec<f64> = ns.iter().map(|n| n.powf(-exponent)).collect();
    let (limit, slope) = linear_fit(&zs, vals);
    let rss = zs
        .iter()
        .zip(vals)
        .map(|(z, v)| {
            let r = v - (limit + slope * z);
            r * r
        })
        .sum();
    TailFit { limit, coeff: -slope, exponent, rss }
}

/// Least squares fit with a free exponent in `[0.05, 4]`: coarse scan, then
/// golden-section refinement around the best grid point.
pub fn fit_tail(ns: &[f64], vals: &[f64]) -> TailFit {
    let rss = |b: f64| fit_tail_fixed(ns, vals, b).rss;
    let (lo_b, hi_b, step) = (0.05, 4.0, 0.01);
    let mut best = lo_b;
    let mut best_rss = f64::INFINITY;
    let mut b = lo_b;
    while b <= hi_b + 1e-12 {
        let r = rss(b);
        if r < best_rss {
            best_rss = r;
            best = b;
        }
        b += step;
    }
    let (mut a, mut c) = ((best - step).max(lo_b), (best + step).min(hi_b));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = c - g * (c - a);
        let x2 = a + g * (c - a);
        if rss(x1) <= rss(x2) {
            c = x2;
        } else {
            a = x1;
        }
    }
    let mid = 0.5 * (a + c);
    let refined = fit_tail_fixed(ns, vals, mid);
    let coarse = fit_tail_fixed(ns, vals, best);
    if refined.rss <= coarse.rss {
        refined
    } else {
        coarse
    }
}
