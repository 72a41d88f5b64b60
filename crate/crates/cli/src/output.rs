use crate::config::{CliError, CliResult};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};

/// 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A CSV table with its `#` header block. Rows are buffered and written in
/// order once the command finishes.
pub struct Table {
    header: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &str, echo: &BTreeMap<String, String>, seed: u64, columns: &[&str]) -> Self {
        let mut header = vec![format!("version={}", env!("CARGO_PKG_VERSION")), format!("command={command}")];
        header.extend(echo.iter().map(|(k, v)| format!("{k}={v}")));
        header.push(format!("seed={seed}"));
        Table { header, columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for h in &self.header {
            s.push_str("# ");
            s.push_str(h);
            s.push('\n');
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    /// Write to `path`, or stdout when `path` is None or "-".
    pub fn write(&self, path: Option<&str>) -> CliResult<()> {
        let text = self.render();
        let res = match path {
            None | Some("-") => io::stdout().lock().write_all(text.as_bytes()),
            Some(p) => File::create(p).and_then(|f| {
                let mut w = BufWriter::new(f);
                w.write_all(text.as_bytes())?;
                w.flush()
            }),
        };
        res.map_err(|e| CliError::io(format!("{}: {e}", path.unwrap_or("stdout"))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn header_block() {
        let mut echo = BTreeMap::new();
        echo.insert("N".to_string(), "3".to_string());
        let mut t = Table::new("sample", &echo, 7, &["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        let s = t.render();
        assert!(s.starts_with("# version="));
        assert!(s.contains("# command=sample\n# N=3\n# seed=7\na,b\n1,2\n"));
    }
}
