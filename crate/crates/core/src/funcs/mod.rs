//! Reinforcement functions `f : [0,1] → (0,1]`.
//!
//! A [`ReinforcementFunction`] is either parsed from the expression language
//! in [`expr`] or wraps a caller-supplied closure. Values are cheap to clone
//! and immutable, so one instance can be shared by every worker thread.
//!
//! ```
//! use rrw::funcs::ReinforcementFunction;
//!
//! let f = ReinforcementFunction::parse("0.5 + 2*(x-0.5)^4").unwrap();
//! assert_eq!(f.eval(1.0), 0.625);
//! let g = f.family(8.0).unwrap();
//! assert_eq!(g.eval(1.0), 1.0);
//! ```

mod analysis;
pub mod expr;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub use analysis::{analyze, derivative, symmetry_defect, FixedPoint, FixedPointReport};
pub use expr::{Builtin, Expr, Jet};

use crate::error::{Error, Result};

/// Lower clamp applied by [`ReinforcementFunction::eval`].
pub const EVAL_FLOOR: f64 = 1e-12;

type Closure = dyn Fn(f64) -> f64 + Send + Sync;

enum Repr {
    Expr(Expr),
    Custom(Box<Closure>),
}

struct Inner {
    source: String,
    repr: Repr,
    clamps: AtomicU64,
}

#[derive(Clone)]
pub struct ReinforcementFunction {
    inner: Arc<Inner>,
}

impl ReinforcementFunction {
    fn from_expr(expr: Expr) -> Self {
        let source = expr.to_string();
        Self::with_source(source, expr)
    }

    fn with_source(source: String, expr: Expr) -> Self {
        ReinforcementFunction {
            inner: Arc::new(Inner { source, repr: Repr::Expr(expr), clamps: AtomicU64::new(0) }),
        }
    }

    /// Parse an expression or builtin name. The source text is kept verbatim.
    pub fn parse(src: &str) -> Result<Self> {
        let expr = expr::parse(src)?;
        Ok(Self::with_source(src.trim().to_string(), expr))
    }

    /// Wrap an arbitrary closure. No symbolic derivatives are available.
    pub fn from_fn(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ReinforcementFunction {
            inner: Arc::new(Inner {
                source: name.into(),
                repr: Repr::Custom(Box::new(f)),
                clamps: AtomicU64::new(0),
            }),
        }
    }

    fn builtin(b: Builtin) -> Result<Self> {
        b.check()?;
        Ok(Self::from_expr(Expr::Builtin(b)))
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::builtin(Builtin::Const(c))
    }

    pub fn linear(a: f64) -> Result<Self> {
        Self::builtin(Builtin::Linear(a))
    }

    pub fn polya() -> Self {
        Self::from_expr(Expr::Builtin(Builtin::Polya))
    }

    pub fn quartic(c: f64) -> Result<Self> {
        Self::builtin(Builtin::Quartic(c))
    }

    pub fn mix() -> Self {
        Self::from_expr(Expr::Builtin(Builtin::Mix))
    }

    /// `f_u` with `2 f_u - 1 = min(u (2 f - 1), 1)`.
    pub fn family(&self, u: f64) -> Result<Self> {
        make_family(self, u)
    }

    pub fn source(&self) -> &str {
        &self.inner.source
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.inner.repr {
            Repr::Expr(e) => Some(e),
            Repr::Custom(_) => None,
        }
    }

    /// Unclamped value.
    #[inline]
    pub fn eval_raw(&self, x: f64) -> f64 {
        match &self.inner.repr {
            Repr::Expr(e) => e.eval(x),
            Repr::Custom(f) => f(x),
        }
    }

    /// Value clamped to `[EVAL_FLOOR, 1]`; every clamp is counted.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let v = self.eval_raw(x);
        if (EVAL_FLOOR..=1.0).contains(&v) {
            v
        } else {
            self.inner.clamps.fetch_add(1, Ordering::Relaxed);
            if v > 1.0 {
                1.0
            } else {
                EVAL_FLOOR
            }
        }
    }

    /// Number of clamped evaluations so far, across all clones.
    pub fn clamp_count(&self) -> u64 {
        self.inner.clamps.load(Ordering::Relaxed)
    }

    /// Exact value and derivatives when the function came from an expression.
    pub fn jet(&self, x: f64) -> Option<Jet> {
        self.expr().map(|e| e.jet(x))
    }

    /// True for the identity map, recognised syntactically or on a grid.
    pub fn is_identity(&self) -> bool {
        if let Some(e) = self.expr() {
            if e.is_identity() {
                return true;
            }
        }
        (0..=1000).all(|i| {
            let x = i as f64 / 1000.0;
            (self.eval_raw(x) - x).abs() <= 1e-12
        })
    }
}

impl fmt::Debug for ReinforcementFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReinforcementFunction({:?})", self.source())
    }
}

impl fmt::Display for ReinforcementFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.source())
    }
}

/// Build `g(x) = (1 + min(u (2 f(x) - 1), 1)) / 2`.
pub fn make_family(f: &ReinforcementFunction, u: f64) -> Result<ReinforcementFunction> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::InvalidParameter(format!("family scale u = {u} must be >= 0")));
    }
    match f.expr() {
        Some(e) => Ok(ReinforcementFunction::from_expr(Expr::Builtin(Builtin::Family(
            Box::new(e.clone()),
            u,
        )))),
        None => {
            let base = f.clone();
            let name = format!("family({}, {u})", f.source());
            Ok(ReinforcementFunction::from_fn(name, move |x| {
                0.5 * (1.0 + (u * (2.0 * base.eval_raw(x) - 1.0)).min(1.0))
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..=n).map(move |i| i as f64 / n as f64)
    }

    #[test]
    fn builtin_evaluations() {
        assert_eq!(ReinforcementFunction::parse("0.5").unwrap().eval(0.3), 0.5);
        assert_eq!(ReinforcementFunction::parse("x").unwrap().eval(0.7), 0.7);
        assert_eq!(ReinforcementFunction::parse("0.5 + 2*(x-0.5)^4").unwrap().eval(1.0), 0.625);
    }

    #[test]
    fn family_edge_scales() {
        let f = ReinforcementFunction::quartic(2.0).unwrap();
        let one = f.family(1.0).unwrap();
        let zero = f.family(0.0).unwrap();
        for x in grid(1000) {
            assert_eq!(one.eval(x), f.eval(x));
            assert_eq!(zero.eval(x), 0.5);
        }
        assert_eq!(f.family(8.0).unwrap().eval(1.0), 1.0);
        assert!(matches!(f.family(-0.1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn family_of_closure_matches_family_of_expr() {
        let f = ReinforcementFunction::mix();
        let g = ReinforcementFunction::from_fn("mix-closure", |x| {
            let t = x - 0.5;
            0.5 + 1.5 * t * t - 8.0 * t.powi(4)
        });
        let (fu, gu) = (f.family(3.0).unwrap(), g.family(3.0).unwrap());
        for x in grid(500) {
            assert!((fu.eval(x) - gu.eval(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn clamping_is_counted() {
        let f = ReinforcementFunction::from_fn("bad", |x| 2.0 * x - 0.5);
        assert_eq!(f.eval(0.0), EVAL_FLOOR);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.clone().clamp_count(), 2);
    }

    #[test]
    fn identity_detection() {
        assert!(ReinforcementFunction::polya().is_identity());
        assert!(ReinforcementFunction::parse("x").unwrap().is_identity());
        assert!(ReinforcementFunction::parse("2*x - x").unwrap().is_identity());
        assert!(!ReinforcementFunction::mix().is_identity());
    }
}
