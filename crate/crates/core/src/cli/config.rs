use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON file with parameters; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommonFile {
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

const COMMON_KEYS: [&str; 3] = ["seed", "out", "format"];

/// Fully merged settings of one invocation.
#[derive(Debug, Clone)]
pub struct Resolved<P> {
    pub params: P,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Echo written into the provenance header.
    pub echo: Map<String, Value>,
}

fn config_error(path: &Path, msg: impl Into<String>) -> Error {
    Error::Config { path: path.display().to_string(), msg: msg.into() }
}

fn read_file(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Ok(Map::new());
    }
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(config_error(path, "top level must be a JSON object")),
        Err(e) => Err(config_error(path, e.to_string())),
    }
}

fn typed<T: DeserializeOwned>(path: &Path, m: Map<String, Value>) -> Result<T> {
    serde_path_to_error::deserialize(Value::Object(m))
        .map_err(|e| config_error(path, format!("at `{}`: {}", e.path(), e.inner())))
}

fn overlay(base: &mut Map<String, Value>, top: Value) {
    if let Value::Object(m) = top {
        for (k, v) in m {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
    }
}

fn to_map<T: Serialize>(v: &T) -> Map<String, Value> {
    match serde_json::to_value(v) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

/// Merge defaults, the config file and command-line flags, in that order.
pub fn resolve<P>(flags: &P, common: &CommonArgs, defaults: P, default_format: Format) -> Result<Resolved<P>>
where
    P: Serialize + DeserializeOwned,
{
    let (file_common, file_params) = match &common.config {
        Some(path) => {
            let mut m = read_file(path)?;
            let mut c = Map::new();
            for k in COMMON_KEYS {
                if let Some(v) = m.remove(k) {
                    c.insert(k.to_string(), v);
                }
            }
            let fc: CommonFile = typed(path, c)?;
            let fp: P = typed(path, m)?;
            (fc, Some(to_map(&fp)))
        }
        None => (CommonFile::default(), None),
    };
    let mut merged = to_map(&defaults);
    if let Some(fp) = file_params {
        overlay(&mut merged, Value::Object(fp));
    }
    overlay(&mut merged, serde_json::to_value(flags).unwrap_or(Value::Null));
    let params: P = serde_json::from_value(Value::Object(merged.clone()))
        .map_err(|e| Error::Config { path: "<flags>".into(), msg: e.to_string() })?;

    let seed = common.seed.or(file_common.seed).unwrap_or(0);
    let format = common.format.or(file_common.format).unwrap_or(default_format);
    let out = common.out.clone().or(file_common.out);
    let mut echo = merged;
    echo.retain(|_, v| !v.is_null());
    echo.insert("seed".into(), Value::from(seed));
    echo.insert("format".into(), serde_json::to_value(format).unwrap_or(Value::Null));
    Ok(Resolved { params, seed, out, format, echo })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct P {
        f: Option<String>,
        #[serde(rename = "N")]
        n: Option<usize>,
    }

    fn defaults() -> P {
        P { f: None, n: Some(10) }
    }

    fn with_file(text: &str) -> (tempfile::NamedTempFile, CommonArgs) {
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), text).unwrap();
        let c = CommonArgs { config: Some(file.path().to_path_buf()), ..Default::default() };
        (file, c)
    }

    #[test]
    fn empty_file_gives_defaults() {
        let (_f, c) = with_file("");
        let r = resolve(&P::default(), &c, defaults(), Format::Json).unwrap();
        assert_eq!(r.params, defaults());
        assert_eq!(r.seed, 0);
        assert_eq!(r.echo["N"], 10);
    }

    #[test]
    fn flags_override_file() {
        let (_f, mut c) = with_file(r#"{"seed": 1, "N": 5, "f": "x"}"#);
        c.seed = Some(2);
        let flags = P { f: None, n: Some(7) };
        let r = resolve(&flags, &c, defaults(), Format::Csv).unwrap();
        assert_eq!(r.seed, 2);
        assert_eq!(r.params, P { f: Some("x".into()), n: Some(7) });
    }

    #[test]
    fn unknown_key_is_named() {
        let (_f, c) = with_file(r#"{"bogus": 1}"#);
        let e = resolve(&P::default(), &c, defaults(), Format::Csv).unwrap_err();
        assert!(matches!(e, Error::Config { .. }));
        assert!(e.to_string().contains("bogus"), "{e}");
        let (_f, c) = with_file(r#"{"N": "ten"}"#);
        let e = resolve(&P::default(), &c, defaults(), Format::Csv).unwrap_err();
        assert!(e.to_string().contains('N'), "{e}");
    }
}
