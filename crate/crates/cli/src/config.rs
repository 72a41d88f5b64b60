//! Flat key=value configuration. File values are read first, command-line
//! values override them. Every key a command reads is echoed in its header.

use overlap_core::limit_kernels::{regime_to_params, EdgeSide, RegimeSpec};
use overlap_core::{EnsembleParams64, OverlapError, C64};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub field: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError { kind: "config", field: Some(field.to_string()), message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: "io", field: None, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            "config" | "usage" => 2,
            "io" => 3,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind, "field": self.field, "message": self.message } }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(k) => write!(f, "{} error in '{}': {}", self.kind, k, self.message),
            None => write!(f, "{} error: {}", self.kind, self.message),
        }
    }
}

impl From<OverlapError> for CliError {
    fn from(e: OverlapError) -> Self {
        let kind = match e {
            OverlapError::Domain { .. } => "domain",
            OverlapError::Singular { .. } => "singular",
            OverlapError::Overflow { .. } => "overflow",
            OverlapError::NoConvergence { .. } => "no_convergence",
            OverlapError::Breakdown { .. } => "breakdown",
            OverlapError::Consistency { .. } => "consistency",
            OverlapError::Degenerate { .. } => "degenerate",
        };
        CliError { kind, field: None, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parse `key=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config("config", format!("line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Reads typed values out of the merged key map and records what was used.
pub struct Resolver {
    given: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(given: BTreeMap<String, String>) -> Self {
        Resolver { given, used: BTreeMap::new() }
    }

    fn raw(&mut self, key: &str, default: Option<&str>) -> CliResult<String> {
        let v = match self.given.get(key) {
            Some(v) => v.clone(),
            None => default.ok_or_else(|| CliError::config(key, "required"))?.to_string(),
        };
        self.used.insert(key.to_string(), v.clone());
        Ok(v)
    }

    pub fn has(&self, key: &str) -> bool {
        self.given.contains_key(key)
    }

    pub fn get<T: FromStr>(&mut self, key: &str, default: Option<&str>) -> CliResult<T>
    where
        T::Err: fmt::Display,
    {
        let v = self.raw(key, default)?;
        v.parse().map_err(|e: T::Err| CliError::config(key, format!("cannot parse '{v}': {e}")))
    }

    pub fn optional_string(&mut self, key: &str) -> Option<String> {
        self.given.get(key).cloned().inspect(|v| {
            self.used.insert(key.to_string(), v.clone());
        })
    }

    pub fn choice(&mut self, key: &str, default: Option<&str>, allowed: &[&str]) -> CliResult<String> {
        let v = self.raw(key, default)?;
        if allowed.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(CliError::config(key, format!("'{v}' is not one of {}", allowed.join("|"))))
        }
    }

    /// Complex value written `re,im`.
    pub fn complex(&mut self, key: &str, default: Option<&str>) -> CliResult<C64> {
        let v = self.raw(key, default)?;
        parse_complex(&v).ok_or_else(|| CliError::config(key, format!("expected re,im, got '{v}'")))
    }

    pub fn list<T: FromStr>(&mut self, key: &str, default: Option<&str>) -> CliResult<Vec<T>> {
        let v = self.raw(key, default)?;
        v.split(',')
            .map(|s| s.trim().parse::<T>().map_err(|_| CliError::config(key, format!("bad list entry '{s}'"))))
            .collect()
    }

    /// Fails on keys that were supplied but never read.
    pub fn finish(self) -> CliResult<BTreeMap<String, String>> {
        if let Some(k) = self.given.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(CliError::config(k, "unknown key for this command"));
        }
        Ok(self.used)
    }
}

pub fn parse_complex(s: &str) -> Option<C64> {
    let (a, b) = s.split_once(',').unwrap_or((s, "0"));
    Some(C64::new(a.trim().parse().ok()?, b.trim().parse().ok()?))
}

pub const REGIMES: &[&str] = &["bulk", "edge-outer", "edge-inner", "weak", "singular"];

pub fn regime(r: &mut Resolver) -> CliResult<RegimeSpec<f64>> {
    let kind = r.choice("regime", None, REGIMES)?;
    let spec = match kind.as_str() {
        "bulk" => RegimeSpec::bulk(r.get("a", Some("1"))?, r.get("b", Some("1"))?, r.get("p", Some("1"))?),
        "edge-outer" => RegimeSpec::edge(r.get("a", Some("1"))?, r.get("b", Some("1"))?, EdgeSide::Outer),
        "edge-inner" => RegimeSpec::edge(r.get("a", Some("1"))?, r.get("b", Some("1"))?, EdgeSide::Inner),
        "weak" => RegimeSpec::weak(r.get("rho", Some("1.5"))?),
        _ => RegimeSpec::singular(r.get("b", Some("1"))?, r.get("Lfix", Some("2"))?),
    }
    .map_err(|e| CliError::config("regime", e.to_string()))?;
    Ok(spec.with_theta(r.get("theta", Some("0"))?))
}

/// (n, L) either from a regime at size N or given directly.
pub fn ensemble(r: &mut Resolver) -> CliResult<EnsembleParams64> {
    let big_n: usize = r.get("N", None)?;
    if r.has("regime") {
        let spec = regime(r)?;
        return regime_to_params(&spec, big_n).map_err(|e| CliError::config("N", e.to_string()));
    }
    let n: f64 = r.get("n", None)?;
    let l: f64 = r.get("L", Some("0"))?;
    EnsembleParams64::new(big_n, n, l).map_err(|e| CliError::config("n", e.to_string()))
}

pub fn default_workers() -> usize {
    std::env::var("OVERLAP_KERNELS_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_and_overrides() {
        let mut m = parse_config_text("# c\nN = 4\n\nn=10\n").unwrap();
        assert_eq!(m["N"], "4");
        m.insert("N".into(), "5".into());
        let mut r = Resolver::new(m);
        assert_eq!(r.get::<usize>("N", None).unwrap(), 5);
        assert!(r.get::<usize>("L", None).is_err());
        assert!(r.finish().is_err());
        assert!(parse_config_text("oops").is_err());
    }

    #[test]
    fn complex_values() {
        assert_eq!(parse_complex("0.5,-1").unwrap(), C64::new(0.5, -1.0));
        assert_eq!(parse_complex("2").unwrap(), C64::new(2.0, 0.0));
        assert!(parse_complex("a,b").is_none());
    }

    #[test]
    fn error_record_is_json() {
        let e = CliError::config("N", "required");
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["error"]["field"], "N");
        assert_eq!(e.exit_code(), 2);
    }
}
