//! Environment strings for `--env`.
//!
//! ```text
//! w:ALPHA,L                              every site starts at (ALPHA, L)
//! w0:A,L;plus:A,L[;minus:A,L]            origin, x >= 1, x <= -1
//! directed:A_LEFT,A_RIGHT,DELTA          classical directed weights
//! undirected:B0,DELTA                    classical undirected weights
//! ```

use crate::criteria::{map_classical_weights, ClassicalWeights};
use crate::error::{Error, Result};
use crate::urn::UrnState;
use crate::walk::EnvironmentSpec;

fn bad(msg: impl Into<String>) -> Error {
    Error::Config { path: "env".into(), msg: msg.into() }
}

fn numbers(s: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("`{t}` is not a number"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(bad(format!("expected {n} numbers in `{s}`")));
    }
    Ok(v)
}

fn urn(s: &str) -> Result<UrnState> {
    let v = numbers(s, 2)?;
    UrnState::new(v[0], v[1])
}

pub fn parse_env(src: &str) -> Result<EnvironmentSpec> {
    let (mut w0, mut plus, mut minus) = (None, None, None);
    for part in src.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) = part.split_once(':').ok_or_else(|| bad(format!("missing `:` in `{part}`")))?;
        match key.trim() {
            "w" => return Ok(EnvironmentSpec::homogeneous(urn(val)?)),
            "directed" => {
                let v = numbers(val, 3)?;
                return map_classical_weights(&ClassicalWeights::directed(v[0], v[1], v[2]));
            }
            "undirected" => {
                let v = numbers(val, 2)?;
                return map_classical_weights(&ClassicalWeights::undirected(v[0], v[1]));
            }
            "w0" => w0 = Some(urn(val)?),
            "plus" => plus = Some(urn(val)?),
            "minus" => minus = Some(urn(val)?),
            k => return Err(bad(format!("unknown key `{k}`"))),
        }
    }
    match (w0, plus) {
        (Some(w0), Some(w_plus)) => Ok(EnvironmentSpec { w0, w_plus, w_minus: minus }),
        _ => Err(bad("need `w:` or both `w0:` and `plus:`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        let h = parse_env("w:0.5,2").unwrap();
        assert_eq!(h, EnvironmentSpec::homogeneous(UrnState { alpha: 0.5, l: 2.0 }));
        let one = parse_env("w0:0.5,1; plus:0.6,2").unwrap();
        assert_eq!(one.w_minus, None);
        let u = parse_env("undirected:1,1").unwrap();
        assert_eq!(u.w_plus.l, 1.5);
        assert_eq!(parse_env("directed:1,1,1").unwrap(), h);
        for s in ["w:0.5", "q:1,2", "plus:0.5,1", "w:a,b"] {
            assert!(matches!(parse_env(s), Err(Error::Config { .. })), "{s}");
        }
    }
}
