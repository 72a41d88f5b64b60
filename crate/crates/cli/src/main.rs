mod commands;
mod config;
mod output;

use clap::{Args, Parser};
use config::{parse_config_text, CliError, CliResult, Resolver};
use std::collections::BTreeMap;
use std::process::ExitCode;

/// Overlap kernels of the induced spherical unitary ensemble.
#[derive(Parser, Debug)]
#[command(name = "overlap-kernels", version)]
struct Cli {
    /// kernel-eval | limit-eval | converge-scan | sample | overlap-mc | validate
    command: String,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// key=value file; command-line values take precedence
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Default: $OVERLAP_KERNELS_WORKERS, else the number of cores
    #[arg(long)]
    workers: Option<usize>,
    /// Output path; stdout when absent
    #[arg(long)]
    out: Option<String>,
    #[arg(long = "N")]
    big_n: Option<usize>,
    #[arg(long = "n")]
    n: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    /// bulk | edge-outer | edge-inner | weak | singular
    #[arg(long)]
    regime: Option<String>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Fixed L of the singular regime
    #[arg(long = "Lfix")]
    lfix: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Complex points are written re,im
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lam: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<String>,
    /// direct | simplified | both
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma separated ladder of N
    #[arg(long)]
    ns: Option<String>,
    /// kernel | d11 | qhat
    #[arg(long)]
    quantity: Option<String>,
    /// quenched11 | quenched12 | prop21 | radial | profile
    #[arg(long)]
    statistic: Option<String>,
    /// Comma separated radial bin edges
    #[arg(long)]
    bins: Option<String>,
    /// Quadrature tolerance used by validate
    #[arg(long)]
    tol: Option<f64>,
    /// Off-diagonal overlap file for sample
    #[arg(long = "offdiag-out")]
    offdiag_out: Option<String>,
    /// Any other key, as key=value
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Opts {
    fn overrides(&self) -> CliResult<BTreeMap<String, String>> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        let s = |x: &Option<String>| x.clone();
        let f = |x: Option<f64>| x.map(|v| v.to_string());
        put("seed", self.seed.map(|v| v.to_string()));
        put("workers", self.workers.map(|v| v.to_string()));
        put("N", self.big_n.map(|v| v.to_string()));
        put("n", f(self.n));
        put("L", f(self.l));
        put("regime", s(&self.regime));
        put("a", f(self.a));
        put("b", f(self.b));
        put("p", f(self.p));
        put("rho", f(self.rho));
        put("Lfix", f(self.lfix));
        put("theta", f(self.theta));
        put("z", s(&self.z));
        put("w", s(&self.w));
        put("lam", s(&self.lam));
        put("zeta", s(&self.zeta));
        put("eta", s(&self.eta));
        put("chi", s(&self.chi));
        put("method", s(&self.method));
        put("samples", self.samples.map(|v| v.to_string()));
        put("ns", s(&self.ns));
        put("quantity", s(&self.quantity));
        put("statistic", s(&self.statistic));
        put("bins", s(&self.bins));
        put("tol", f(self.tol));
        put("offdiag_out", s(&self.offdiag_out));
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::config("set", format!("expected KEY=VALUE, got '{kv}'")))?;
            m.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(m)
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    if !commands::COMMANDS.contains(&cli.command.as_str()) {
        return Err(CliError::config("command", format!("unknown command '{}'", cli.command)));
    }
    let mut keys = match &cli.opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{path}: {e}")))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    let mut out = cli.opts.out.clone();
    if let Some(o) = keys.remove("out") {
        out.get_or_insert(o);
    }
    keys.extend(cli.opts.overrides()?);
    let outcome = commands::run(&cli.command, Resolver::new(keys))?;
    outcome.table.write(out.as_deref())?;
    if let Some((path, t)) = &outcome.extra {
        t.write(Some(path))?;
    }
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            let err = CliError { kind: "usage", field: None, message: first };
            eprintln!("{}", err.to_json());
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
