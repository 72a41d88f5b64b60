use crate::config::{default_workers, ensemble, regime, CliError, CliResult, Resolver};
use crate::output::{num, Table};
use overlap_core::finite_kernels::{decouple_check, k11_finite, ConfigPoint, KernelMethod};
use overlap_core::finite_structures::build_poly_family;
use overlap_core::limit_kernels::{
    d11_scan, default_chi, default_grid, droplet, kernel_scan, regime_to_params, D11_limit, D12_limit, K11_limit,
    RegimeKind, RegimeSpec,
};
use overlap_core::oracles::{
    asymptotic_qhat_check, brute_force_D, default_qhat_grid, quadrature_gram, DKind, QuadratureSpec,
};
use overlap_core::finite_kernels::d11_finite;
use overlap_core::sampler::{
    mc_conditional_profile, mc_prop21_distribution, mc_quenched_ratio, mc_quenched_ratio_o12, mc_radial_ks,
    sample_overlaps, SampleConfig,
};
use overlap_core::special_functions::calL_rho;
use overlap_core::{EnsembleParams64, C64};

pub const COMMANDS: &[&str] = &["kernel-eval", "limit-eval", "converge-scan", "sample", "overlap-mc", "validate"];

/// Result of a command: the main table, an optional second table with its
/// path, and whether every check passed.
pub struct Outcome {
    pub table: Table,
    pub extra: Option<(String, Table)>,
    pub ok: bool,
}

fn seed_and_workers(r: &mut Resolver) -> CliResult<(u64, usize)> {
    let seed = r.get("seed", Some("0"))?;
    let dw = default_workers().to_string();
    let workers: usize = r.get("workers", Some(&dw))?;
    if workers == 0 {
        return Err(CliError::config("workers", "must be positive"));
    }
    Ok((seed, workers))
}

/// Echo without the seed, which gets its own header line.
fn finish(r: Resolver) -> CliResult<std::collections::BTreeMap<String, String>> {
    let mut echo = r.finish()?;
    echo.remove("seed");
    Ok(echo)
}

fn pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> CliResult<R> {
    let p = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError { kind: "runtime", field: None, message: e.to_string() })?;
    Ok(p.install(f))
}

pub fn run(command: &str, mut r: Resolver) -> CliResult<Outcome> {
    match command {
        "kernel-eval" => kernel_eval(&mut r).and_then(|(cols, rows)| simple(command, r, cols, rows)),
        "limit-eval" => limit_eval(&mut r).and_then(|(cols, rows)| simple(command, r, cols, rows)),
        "converge-scan" => converge_scan(command, r),
        "sample" => sample(command, r),
        "overlap-mc" => overlap_mc(command, r),
        "validate" => validate(command, r),
        _ => Err(CliError::config("command", format!("unknown command '{command}'"))),
    }
}

fn simple(command: &str, mut r: Resolver, cols: &[&str], rows: Vec<Vec<String>>) -> CliResult<Outcome> {
    let (seed, _) = seed_and_workers(&mut r)?;
    let mut t = Table::new(command, &finish(r)?, seed, cols);
    rows.into_iter().for_each(|row| t.push(row));
    Ok(Outcome { table: t, extra: None, ok: true })
}

fn kernel_eval(r: &mut Resolver) -> CliResult<(&'static [&'static str], Vec<Vec<String>>)> {
    let p = ensemble(r)?;
    let z = r.complex("z", None)?;
    let w = r.complex("w", None)?;
    let lam = r.complex("lam", None)?;
    let methods = match r.choice("method", Some("both"), &["direct", "simplified", "both"])?.as_str() {
        "direct" => vec![KernelMethod::Direct],
        "simplified" => vec![KernelMethod::Simplified],
        _ => vec![KernelMethod::Direct, KernelMethod::Simplified],
    };
    let mut rows = Vec::new();
    for m in methods {
        let e = k11_finite(z, w, lam, &p, m)?;
        let name = if m == KernelMethod::Direct { "direct" } else { "simplified" };
        rows.push(vec![
            p.big_n.to_string(),
            num(p.n),
            num(p.l),
            num(z.re),
            num(z.im),
            num(w.re),
            num(w.im),
            num(lam.re),
            num(lam.im),
            name.to_string(),
            num(e.value.re),
            num(e.value.im),
            e.regularized.to_string(),
        ]);
    }
    const COLS: &[&str] =
        &["N", "n", "L", "re_z", "im_z", "re_w", "im_w", "re_lam", "im_lam", "method", "re_K", "im_K", "regularized"];
    Ok((COLS, rows))
}

fn regime_name(s: &RegimeSpec<f64>) -> &'static str {
    match s.kind {
        RegimeKind::StrongBulk => "bulk",
        RegimeKind::StrongEdge if s.sign() > 0.0 => "edge-outer",
        RegimeKind::StrongEdge => "edge-inner",
        RegimeKind::Weak => "weak",
        RegimeKind::Singular => "singular",
    }
}

fn limit_eval(r: &mut Resolver) -> CliResult<(&'static [&'static str], Vec<Vec<String>>)> {
    let spec = regime(r)?;
    let zeta = r.complex("zeta", None)?;
    let eta = r.complex("eta", None)?;
    let dc = default_chi::<f64>(spec.kind);
    let chi = r.complex("chi", Some(&format!("{},{}", dc.re, dc.im)))?;
    let k = K11_limit(&spec, zeta, eta, chi)?;
    let d11 = D11_limit(&spec, &ConfigPoint::new(vec![zeta])?)?;
    let d12 = if zeta != eta {
        D12_limit(&spec, &ConfigPoint::new(vec![zeta, eta])?)?
    } else {
        C64::new(f64::NAN, f64::NAN)
    };
    let row = vec![
        regime_name(&spec).to_string(),
        num(zeta.re),
        num(zeta.im),
        num(eta.re),
        num(eta.im),
        num(chi.re),
        num(chi.im),
        num(k.re),
        num(k.im),
        num(d11),
        num(d12.re),
        num(d12.im),
    ];
    const COLS: &[&str] = &[
        "regime", "re_zeta", "im_zeta", "re_eta", "im_eta", "re_chi", "im_chi", "re_K", "im_K", "D11", "re_D12", "im_D12",
    ];
    Ok((COLS, vec![row]))
}

fn default_ladder(kind: RegimeKind) -> &'static str {
    match kind {
        RegimeKind::StrongBulk => "25,50,100",
        RegimeKind::StrongEdge => "50,100,200",
        RegimeKind::Weak | RegimeKind::Singular => "20,40,80",
    }
}

fn converge_scan(command: &str, mut r: Resolver) -> CliResult<Outcome> {
    let spec = regime(&mut r)?;
    let ns: Vec<usize> = r.list("ns", Some(default_ladder(spec.kind)))?;
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::config("ns", "need positive sizes"));
    }
    let quantity = r.choice("quantity", Some("kernel"), &["kernel", "d11", "qhat"])?;
    let (seed, workers) = seed_and_workers(&mut r)?;
    let rows: Vec<(usize, f64)> = match quantity.as_str() {
        "kernel" => {
            let dc = default_chi::<f64>(spec.kind);
            let chi = r.complex("chi", Some(&format!("{},{}", dc.re, dc.im)))?;
            let grid = default_grid::<f64>();
            pool(workers, || kernel_scan(&spec, &ns, &grid, chi))??.iter().map(|x| (x.big_n, x.sup_err)).collect()
        }
        "d11" => pool(workers, || d11_scan(&spec, &ns, &default_grid()))??.iter().map(|x| (x.big_n, x.sup_err)).collect(),
        _ => pool(workers, || asymptotic_qhat_check(&spec, &ns, &default_qhat_grid(spec.kind)))??
            .iter()
            .map(|x| (x.big_n, x.sup_err))
            .collect(),
    };
    let mut t = Table::new(command, &finish(r)?, seed, &["N", "sup_err"]);
    for (n, e) in rows {
        t.push(vec![n.to_string(), num(e)]);
    }
    Ok(Outcome { table: t, extra: None, ok: true })
}

fn sample_config(r: &mut Resolver, default_samples: &str) -> CliResult<(SampleConfig, u64)> {
    let p = ensemble(r)?;
    let samples: usize = r.get("samples", Some(default_samples))?;
    let (seed, workers) = seed_and_workers(r)?;
    let cfg = SampleConfig::new(p, samples, seed, workers).map_err(|e| CliError::config("samples", e.to_string()))?;
    Ok((cfg, seed))
}

fn sample(command: &str, mut r: Resolver) -> CliResult<Outcome> {
    let (cfg, seed) = sample_config(&mut r, "100")?;
    let offdiag = r.optional_string("offdiag_out");
    let batch = sample_overlaps(&cfg, offdiag.is_some())?;
    let echo = finish(r)?;
    let mut t = Table::new(command, &echo, seed, &["sample_id", "re_lambda", "im_lambda", "O_diag"]);
    for (i, (lams, diag)) in batch.eigenvalues.iter().zip(&batch.diag_overlaps).enumerate() {
        for (l, o) in lams.iter().zip(diag) {
            t.push(vec![i.to_string(), num(l.re), num(l.im), num(*o)]);
        }
    }
    let extra = match (offdiag, batch.offdiag) {
        (Some(path), Some(off)) => {
            let mut t2 = Table::new(command, &echo, seed, &["sample_id", "j", "k", "re_O", "im_O"]);
            for (i, j, k, o) in off {
                t2.push(vec![i.to_string(), j.to_string(), k.to_string(), num(o.re), num(o.im)]);
            }
            Some((path, t2))
        }
        _ => None,
    };
    Ok(Outcome { table: t, extra, ok: true })
}

fn overlap_mc(command: &str, mut r: Resolver) -> CliResult<Outcome> {
    let stat = r.choice("statistic", Some("quenched11"), &["quenched11", "quenched12", "prop21", "radial", "profile"])?;
    let (cfg, seed) = sample_config(&mut r, "1000")?;
    let p = cfg.params;
    let table = match stat.as_str() {
        "quenched11" | "quenched12" => {
            let m = if stat == "quenched11" { mc_quenched_ratio(&cfg)? } else { mc_quenched_ratio_o12(&cfg)? };
            let mut t = Table::new(command, &finish(r)?, seed, &["statistic", "mean", "stderr", "z_score", "count", "resampled"]);
            t.push(vec![
                stat.clone(),
                num(m.mean),
                num(m.stderr),
                num(m.z_score(1.0)),
                m.count.to_string(),
                m.resampled.to_string(),
            ]);
            t
        }
        "prop21" | "radial" => {
            let k = if stat == "prop21" { mc_prop21_distribution(&cfg)? } else { mc_radial_ks(&cfg)? };
            let mut t = Table::new(command, &finish(r)?, seed, &["statistic", "ks", "p_value", "count"]);
            t.push(vec![stat.clone(), num(k.statistic), num(k.p_value), k.count.to_string()]);
            t
        }
        _ => {
            let d = droplet(&p);
            let lo = (d.r1 - 0.1).max(0.0);
            let hi = d.r2 + 0.1;
            let default_edges: Vec<String> = (0..=10).map(|i| format!("{}", lo + (hi - lo) * i as f64 / 10.0)).collect();
            let edges: Vec<f64> = r.list("bins", Some(&default_edges.join(",")))?;
            let rows = mc_conditional_profile(&cfg, &edges)?;
            let cols = ["r_lo", "r_hi", "count", "mean", "stderr", "analytic_center", "analytic_bin", "empty"];
            let mut t = Table::new(command, &finish(r)?, seed, &cols);
            for b in rows {
                t.push(vec![
                    num(b.r_lo),
                    num(b.r_hi),
                    b.count.to_string(),
                    num(b.mean),
                    num(b.stderr),
                    num(b.analytic_center),
                    num(b.analytic_bin),
                    b.empty.to_string(),
                ]);
            }
            t
        }
    };
    Ok(Outcome { table, extra: None, ok: true })
}

struct Check {
    name: &'static str,
    measured: f64,
    tol: f64,
    pass: bool,
}

fn check(name: &'static str, measured: f64, tol: f64) -> Check {
    Check { name, measured, tol, pass: measured <= tol }
}

fn params(nn: usize, n: f64, l: f64) -> CliResult<EnsembleParams64> {
    Ok(EnsembleParams64::new(nn, n, l)?)
}

fn validate(command: &str, mut r: Resolver) -> CliResult<Outcome> {
    let qtol: f64 = r.get("tol", Some("1e-10"))?;
    let samples: usize = r.get("samples", Some("2000"))?;
    let (seed, workers) = seed_and_workers(&mut r)?;
    let c = C64::new;
    let mut out = Vec::new();

    // planar orthogonality
    let p = params(6, 10.0, 2.0)?;
    let fam = build_poly_family(5, &p, c(0.7, 0.3))?;
    let g = quadrature_gram(&fam, &p, &QuadratureSpec::for_weight(&p, 6, qtol)?)?;
    let mut worst: f64 = 0.0;
    for j in 0..=5 {
        for k in 0..=5 {
            let want = if j == k { fam.norms[j] } else { 0.0 };
            worst = worst.max((g[j][k] - want).norm() / fam.norms[j].max(1.0));
        }
    }
    out.push(check("gram_orthogonality", worst, 1e-6));

    // direct vs simplified kernel on a fixed pseudo-random set
    let p = params(6, 18.0, 3.0)?;
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let t = i as f64;
        let pt = |s: f64| C64::from_polar(0.5 + 0.7 * ((t * 0.37 + s).sin() * 0.5 + 0.5), 2.1 * t + s);
        let (z, w, lam) = (pt(0.0), pt(1.3), pt(2.9));
        let d = k11_finite(z, w, lam, &p, KernelMethod::Direct)?.value;
        let s = k11_finite(z, w, lam, &p, KernelMethod::Simplified)?.value;
        worst = worst.max((d - s).norm() / d.norm());
    }
    out.push(check("kernel_routes_agree", worst, 1e-9));

    let p = params(3, 7.0, 1.5)?;
    let dev = decouple_check(&ConfigPoint::new(vec![c(0.3, 0.2), c(-0.4, 0.5)])?, &p)?;
    out.push(check("decoupling", dev, 1e-9));

    let p = params(2, 5.0, 1.0)?;
    let z1 = c(0.3, 0.2);
    let bf = brute_force_D(&[z1], &p, DKind::D11, &QuadratureSpec::for_weight(&p, 2, qtol)?)?;
    let lib = d11_finite(&ConfigPoint::new(vec![z1])?, &p)?;
    out.push(check("brute_force_d11", (bf.re - lib).abs() / lib, 1e-6));

    let bulk = RegimeSpec::bulk(1.0, 1.0, 1.0)?;
    let rows = pool(workers, || kernel_scan(&bulk, &[25, 50, 100], &default_grid(), default_chi(RegimeKind::StrongBulk)))??;
    let dec = rows.windows(2).all(|w| w[1].sup_err < w[0].sup_err);
    let mut ch = check("bulk_kernel_limit_N100", rows[2].sup_err, 0.05);
    ch.pass &= dec;
    out.push(ch);

    let rows = asymptotic_qhat_check(&bulk, &[200], &default_qhat_grid(RegimeKind::StrongBulk))?;
    out.push(check("qhat_bulk_N200", rows[0].sup_err, 1e-6));

    let rho = 50.0;
    let mut worst: f64 = 0.0;
    for x in [-1.0, -0.4, 0.0, 0.6, 1.0] {
        worst = worst.max((calL_rho(c(x, 0.0), rho)? * (2.0 / (rho * rho)) - 1.0).norm());
    }
    out.push(check("weak_to_bulk_rho50", worst, 1e-3));

    let p = params(1, 3.0, 0.0)?;
    let cfg = SampleConfig::new(p, 50, seed, workers)?;
    let b = sample_overlaps(&cfg, false)?;
    let dev = b.diag_overlaps.iter().flatten().map(|o| (o - 1.0).abs()).fold(0.0, f64::max);
    out.push(check("n1_overlap_is_one", dev, 1e-10));

    let spec = RegimeSpec::bulk(1.0, 1.0, 1.0)?;
    let p = regime_to_params(&spec, 6)?;
    let m = mc_quenched_ratio(&SampleConfig::new(p, samples, seed, workers)?)?;
    out.push(check("mc_quenched_o11_zscore", m.z_score(1.0), 3.0));

    let p = regime_to_params(&spec, 10)?;
    let k = mc_radial_ks(&SampleConfig::new(p, samples.min(1000), seed, workers)?)?;
    out.push(check("mc_radial_ks", k.statistic, 0.03));

    let mut t = Table::new(command, &finish(r)?, seed, &["invariant", "measured", "tolerance", "status"]);
    let ok = out.iter().all(|c| c.pass);
    for ch in out {
        t.push(vec![ch.name.to_string(), num(ch.measured), num(ch.tol), if ch.pass { "pass" } else { "fail" }.to_string()]);
    }
    Ok(Outcome { table: t, extra: None, ok })
}
