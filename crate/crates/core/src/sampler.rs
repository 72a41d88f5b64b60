//! Monte Carlo sampling of the induced spherical ensemble and eigenvector
//! overlap statistics.
//!
//! A matrix is built as G = U (Y†Y)^{1/2} with Y = X A^{-1/2}, X a complex
//! Ginibre block and A = V†V. Replica `i` draws from ChaCha8 seeded with the
//! master seed on stream `i`, so aggregated output does not depend on the
//! number of workers.

use crate::error::{domain, OverlapError, Result};
use crate::finite_kernels::{cond_exp_o11, kernel_KN, quenched_o11, quenched_o12_chordal};
use crate::finite_structures::EnsembleParams;
use crate::special_functions::reg_incomplete_beta;
use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

type C = Complex<f64>;
type Params = EnsembleParams<f64>;

/// Relative eigenvalue gap below which a sample is redrawn.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Tolerance for the bound O_jj >= 1.
pub const DIAG_TOL: f64 = 1e-8;
const MAX_REDRAWS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleConfig {
    pub params: Params,
    pub n_samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// Rows of X. Default N + L.
    pub x_rows: Option<usize>,
    /// Rows of V in A = V†V. Default n.
    pub wishart_dof: Option<usize>,
}

impl SampleConfig {
    pub fn new(params: Params, n_samples: usize, seed: u64, workers: usize) -> Result<Self> {
        let cfg = SampleConfig { params, n_samples, seed, workers, x_rows: None, wishart_dof: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if p.n.fract() != 0.0 || p.l.fract() != 0.0 {
            return Err(domain("SampleConfig", format!("sampling needs integer n and L, got n={}, L={}", p.n, p.l)));
        }
        if self.n_samples == 0 {
            return Err(domain("SampleConfig", "n_samples must be positive"));
        }
        if self.workers == 0 {
            return Err(domain("SampleConfig", "workers must be positive"));
        }
        let (xr, dof) = self.shape();
        if xr < p.big_n || dof < p.big_n {
            return Err(domain("SampleConfig", format!("x_rows={xr} and wishart_dof={dof} must be >= N={}", p.big_n)));
        }
        Ok(())
    }

    /// (rows of X, rows of V).
    pub fn shape(&self) -> (usize, usize) {
        let p = &self.params;
        let xr = self.x_rows.unwrap_or(p.big_n + p.l as usize);
        let dof = self.wishart_dof.unwrap_or(p.n as usize);
        (xr, dof)
    }
}

// ------------------------------------------------------------ matrix draws

fn gauss(rng: &mut ChaCha8Rng) -> C {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

/// Standard complex Ginibre matrix, E|g_ij|² = 1.
pub fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<C> {
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = gauss(rng);
        }
    }
    m
}

/// Haar unitary from the QR factors of a Ginibre matrix, with the phases of
/// diag(R) moved into Q.
pub fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C> {
    let qr = ginibre(n, n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// f(H) for Hermitian H through its eigendecomposition.
fn hermitian_fn(h: DMatrix<C>, f: impl Fn(f64) -> Option<f64>) -> Option<DMatrix<C>> {
    let h = (&h + h.adjoint()) * C::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut v = eig.eigenvectors.clone();
    for (j, &e) in eig.eigenvalues.iter().enumerate() {
        let s = f(e)?;
        for i in 0..v.nrows() {
            v[(i, j)] *= s;
        }
    }
    Some(v * eig.eigenvectors.adjoint())
}

/// One ISUE matrix. `None` when A is numerically singular.
pub fn sample_matrix(cfg: &SampleConfig, rng: &mut ChaCha8Rng) -> Option<DMatrix<C>> {
    let nn = cfg.params.big_n;
    let (xr, dof) = cfg.shape();
    let x = ginibre(xr, nn, rng);
    let v = ginibre(dof, nn, rng);
    let a = v.adjoint() * &v;
    let a_isqrt = hermitian_fn(a, |e| if e > 1e-300 { Some(1.0 / e.sqrt()) } else { None })?;
    let y = x * a_isqrt;
    let yy = y.adjoint() * &y;
    let root = hermitian_fn(yy, |e| Some(e.max(0.0).sqrt()))?;
    let u = haar_unitary(nn, rng);
    Some(u * root)
}

fn replica_rng(seed: u64, idx: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx as u64);
    rng
}

/// Draw `cfg.n_samples` matrices (replica order).
pub fn sample_isue(cfg: &SampleConfig) -> Result<Vec<DMatrix<C>>> {
    cfg.validate()?;
    run_pool(cfg, |idx| {
        let mut rng = replica_rng(cfg.seed, idx);
        match sample_matrix(cfg, &mut rng) {
            Some(m) => Ok(m),
            None => sample_matrix(cfg, &mut rng).ok_or_else(|| OverlapError::Breakdown {
                op: "sample_isue",
                msg: "A not invertible twice in a row".into(),
            }),
        }
    })
}

fn run_pool<R: Send>(cfg: &SampleConfig, f: impl Fn(usize) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| domain("run_pool", e.to_string()))?;
    pool.install(|| (0..cfg.n_samples).into_par_iter().map(&f).collect())
}

// ---------------------------------------------------------------- overlaps

/// Eigenvalues of one matrix with its full overlap matrix.
#[derive(Clone, Debug)]
pub struct OverlapSample {
    pub eigenvalues: Vec<C>,
    /// O_jk = (L_j†L_k)(R_j†R_k), row-major N × N.
    pub overlaps: DMatrix<C>,
}

impl OverlapSample {
    pub fn diag(&self) -> Vec<f64> {
        (0..self.eigenvalues.len()).map(|j| self.overlaps[(j, j)].re).collect()
    }
}

/// Eigenvalues and right eigenvector matrix P of an upper triangular T.
fn triangular_eigvecs(t: &DMatrix<C>) -> DMatrix<C> {
    let n = t.nrows();
    let mut x = DMatrix::<C>::zeros(n, n);
    for j in 0..n {
        let lam = t[(j, j)];
        x[(j, j)] = C::new(1.0, 0.0);
        for i in (0..j).rev() {
            let mut s = C::new(0.0, 0.0);
            for k in i + 1..=j {
                s += t[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = -s / (t[(i, i)] - lam);
        }
    }
    x
}

/// Relative minimal eigenvalue gap.
pub fn relative_gap(lams: &[C]) -> f64 {
    let scale = lams.iter().map(|l| l.norm()).fold(1.0, f64::max);
    let mut g = f64::INFINITY;
    for i in 0..lams.len() {
        for j in i + 1..lams.len() {
            g = g.min((lams[i] - lams[j]).norm());
        }
    }
    g / scale
}

/// Overlaps from an explicit right eigenvector matrix P.
pub fn overlaps_from_eigvecs(p: &DMatrix<C>) -> Result<DMatrix<C>> {
    let pinv = p.clone().try_inverse().ok_or(OverlapError::Degenerate {
        op: "eig_overlaps",
        msg: "eigenvector matrix not invertible".into(),
    })?;
    let n = p.nrows();
    // L_j = row j of P⁻¹ transposed, R_j = column j of P.
    let ll = pinv.conjugate() * pinv.transpose();
    let rr = p.adjoint() * p;
    let mut o = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            o[(j, k)] = ll[(j, k)] * rr[(j, k)];
        }
    }
    Ok(o)
}

/// Eigenvalues and overlap matrix of a square matrix with simple spectrum.
pub fn eig_overlaps(m: &DMatrix<C>) -> Result<OverlapSample> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(domain("eig_overlaps", "need a non-empty square matrix"));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or(OverlapError::NoConvergence { op: "eig_overlaps", iters: 100_000 })?;
    let (q, t) = schur.unpack();
    let lams: Vec<C> = (0..n).map(|j| t[(j, j)]).collect();
    if relative_gap(&lams) < DEGENERACY_GAP {
        return Err(OverlapError::Degenerate { op: "eig_overlaps", msg: "near-degenerate spectrum".into() });
    }
    let p = q * triangular_eigvecs(&t);
    let overlaps = overlaps_from_eigvecs(&p)?;
    for j in 0..n {
        let d = overlaps[(j, j)].re;
        if !(d >= 1.0 - DIAG_TOL) {
            return Err(OverlapError::Consistency { op: "eig_overlaps", msg: format!("O_jj = {d} < 1") });
        }
    }
    Ok(OverlapSample { eigenvalues: lams, overlaps })
}

/// One replica: draw, decompose, redraw on degeneracy. Returns the sample,
/// the number of redraws and the generator for further per-replica draws.
fn overlap_replica(cfg: &SampleConfig, idx: usize) -> Result<(OverlapSample, usize, ChaCha8Rng)> {
    let mut rng = replica_rng(cfg.seed, idx);
    let mut redraws = 0;
    loop {
        let res = sample_matrix(cfg, &mut rng)
            .ok_or(OverlapError::Degenerate { op: "sample_matrix", msg: "singular A".into() })
            .and_then(|m| eig_overlaps(&m));
        match res {
            Ok(s) => return Ok((s, redraws, rng)),
            Err(OverlapError::Degenerate { .. }) if redraws < MAX_REDRAWS => redraws += 1,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct OverlapBatch {
    pub eigenvalues: Vec<Vec<C>>,
    pub diag_overlaps: Vec<Vec<f64>>,
    /// (sample, j, k, O_jk) for j != k when requested.
    pub offdiag: Option<Vec<(usize, usize, usize, C)>>,
    pub resampled: usize,
}

/// Eigenvalues and overlaps for every replica.
pub fn sample_overlaps(cfg: &SampleConfig, keep_offdiag: bool) -> Result<OverlapBatch> {
    cfg.validate()?;
    let reps = run_pool(cfg, |i| overlap_replica(cfg, i).map(|(s, r, _)| (s, r)))?;
    let mut b = OverlapBatch { offdiag: keep_offdiag.then(Vec::new), ..Default::default() };
    for (i, (s, r)) in reps.into_iter().enumerate() {
        b.resampled += r;
        if let Some(off) = b.offdiag.as_mut() {
            let n = s.eigenvalues.len();
            for j in 0..n {
                for k in 0..n {
                    if j != k {
                        off.push((i, j, k, s.overlaps[(j, k)]));
                    }
                }
            }
        }
        b.diag_overlaps.push(s.diag());
        b.eigenvalues.push(s.eigenvalues);
    }
    Ok(b)
}

/// Fraction of eigenvalue moduli outside [lo, hi].
pub fn fraction_outside(batch: &OverlapBatch, lo: f64, hi: f64) -> f64 {
    let mut total = 0usize;
    let mut out = 0usize;
    for l in batch.eigenvalues.iter().flatten() {
        total += 1;
        let r = l.norm();
        if r < lo || r > hi {
            out += 1;
        }
    }
    out as f64 / total.max(1) as f64
}

// -------------------------------------------------------------- statistics

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
    pub resampled: usize,
}

impl MeanStderr {
    pub fn from_values(v: &[f64], resampled: usize) -> Self {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        MeanStderr { mean, stderr: (var / n).sqrt(), count: v.len(), resampled }
    }

    /// |mean − target| in units of stderr.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

fn rotate_first<T: Copy>(v: &[T], j: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len());
    out.push(v[j]);
    out.extend(v.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x));
    out
}

/// Mean over samples of (1/N) Σ_j O_jj / quenched_o11(λ_j; rest).
pub fn mc_quenched_ratio(cfg: &SampleConfig) -> Result<MeanStderr> {
    cfg.validate()?;
    let p = cfg.params;
    let reps = run_pool(cfg, |i| {
        let (s, r, _) = overlap_replica(cfg, i)?;
        let n = s.eigenvalues.len();
        let mut acc = 0.0;
        for j in 0..n {
            acc += s.overlaps[(j, j)].re / quenched_o11(&rotate_first(&s.eigenvalues, j), &p)?;
        }
        Ok((acc / n as f64, r))
    })?;
    let vals: Vec<f64> = reps.iter().map(|x| x.0).collect();
    Ok(MeanStderr::from_values(&vals, reps.iter().map(|x| x.1).sum()))
}

/// Mean over samples of the real part of O_jk / quenched_o12_chordal,
/// averaged over all ordered pairs j != k.
pub fn mc_quenched_ratio_o12(cfg: &SampleConfig) -> Result<MeanStderr> {
    cfg.validate()?;
    let p = cfg.params;
    if p.big_n < 2 {
        return Err(domain("mc_quenched_ratio_o12", "need N >= 2"));
    }
    let reps = run_pool(cfg, |i| {
        let (s, r, _) = overlap_replica(cfg, i)?;
        let n = s.eigenvalues.len();
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let mut lams = vec![s.eigenvalues[j], s.eigenvalues[k]];
                lams.extend((0..n).filter(|&m| m != j && m != k).map(|m| s.eigenvalues[m]));
                acc += (s.overlaps[(j, k)] / quenched_o12_chordal(&lams, &p)?).re;
            }
        }
        Ok((acc / (n * (n - 1)) as f64, r))
    })?;
    let vals: Vec<f64> = reps.iter().map(|x| x.0).collect();
    Ok(MeanStderr::from_values(&vals, reps.iter().map(|x| x.1).sum()))
}

/// Draw from the density (m+1)/(1+x)^{m+2} on x > 0.
pub fn draw_x(m: f64, rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random();
    (1.0 - u).powf(-1.0 / (m + 1.0)) - 1.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub count: usize,
}

/// Two-sample KS on log O_jj: direct overlaps against the product of
/// independent factors on the same eigenvalues. `j` is uniform per sample.
pub fn mc_prop21_distribution(cfg: &SampleConfig) -> Result<KsResult> {
    cfg.validate()?;
    let m = cfg.params.m();
    let reps = run_pool(cfg, |i| {
        let (s, _, mut rng) = overlap_replica(cfg, i)?;
        let n = s.eigenvalues.len();
        let j = rng.random_range(0..n);
        let lj = s.eigenvalues[j];
        let mut prod = 1.0;
        for (k, lk) in s.eigenvalues.iter().enumerate() {
            if k != j {
                let c = (1.0 + lj.norm_sqr()) * (1.0 + lk.norm_sqr()) / (lj - lk).norm_sqr();
                prod *= 1.0 + c * draw_x(m, &mut rng);
            }
        }
        Ok((s.overlaps[(j, j)].re.ln(), prod.ln()))
    })?;
    let a: Vec<f64> = reps.iter().map(|x| x.0).collect();
    let b: Vec<f64> = reps.iter().map(|x| x.1).collect();
    let d = ks_two_sample(&a, &b);
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    Ok(KsResult { statistic: d, p_value: kolmogorov_pvalue(d, ne), count: a.len() })
}

/// One radial bin of the conditional overlap profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub r_lo: f64,
    pub r_hi: f64,
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
    /// cond_exp_o11 at the bin center.
    pub analytic_center: f64,
    /// ∫ D₁,₁ / ∫ R_{N,1} over the bin.
    pub analytic_bin: f64,
    /// No eigenvalue fell into the bin.
    pub empty: bool,
}

fn simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Radially binned E[O_jj | |λ_j| ∈ bin].
pub fn mc_conditional_profile(cfg: &SampleConfig, edges: &[f64]) -> Result<Vec<ProfileRow>> {
    cfg.validate()?;
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0]) || w[0] < 0.0) {
        return Err(domain("mc_conditional_profile", "bin edges must be nonnegative and increasing"));
    }
    let nb = edges.len() - 1;
    let reps = run_pool(cfg, |i| {
        let (s, _, _) = overlap_replica(cfg, i)?;
        let mut sums = vec![0.0; nb];
        let mut counts = vec![0usize; nb];
        for (j, l) in s.eigenvalues.iter().enumerate() {
            let r = l.norm();
            if let Some(b) = (0..nb).find(|&b| r >= edges[b] && r < edges[b + 1]) {
                sums[b] += s.overlaps[(j, j)].re;
                counts[b] += 1;
            }
        }
        Ok((sums, counts))
    })?;
    let p = cfg.params;
    let ns = reps.len() as f64;
    let mut rows = Vec::with_capacity(nb);
    for b in 0..nb {
        let tot_c: usize = reps.iter().map(|x| x.1[b]).sum();
        let tot_s: f64 = reps.iter().map(|x| x.0[b]).sum();
        let (lo, hi) = (edges[b], edges[b + 1]);
        let rc = 0.5 * (lo + hi);
        let dens = |r: f64| kernel_KN(C::new(r, 0.0), C::new(r, 0.0), &p).map(|k| k.re);
        let mut err = None;
        let num = simpson(
            |r| match (dens(r), cond_exp_o11(C::new(r, 0.0), &p)) {
                (Ok(d), Ok(e)) => d * e * r,
                (Err(e), _) | (_, Err(e)) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            hi,
            64,
        );
        let den = simpson(|r| dens(r).unwrap_or(f64::NAN) * r, lo, hi, 64);
        if let Some(e) = err {
            return Err(e);
        }
        let center = cond_exp_o11(C::new(rc, 0.0), &p)?;
        if tot_c == 0 {
            rows.push(ProfileRow {
                r_lo: lo,
                r_hi: hi,
                count: 0,
                mean: f64::NAN,
                stderr: f64::NAN,
                analytic_center: center,
                analytic_bin: num / den,
                empty: true,
            });
            continue;
        }
        let mean = tot_s / tot_c as f64;
        // Ratio estimator clustered by sample.
        let ss: f64 = reps.iter().map(|x| (x.0[b] - mean * x.1[b] as f64).powi(2)).sum();
        let var = ss * ns / (ns - 1.0).max(1.0) / (tot_c as f64).powi(2);
        rows.push(ProfileRow {
            r_lo: lo,
            r_hi: hi,
            count: tot_c,
            mean,
            stderr: var.sqrt(),
            analytic_center: center,
            analytic_bin: num / den,
            empty: false,
        });
    }
    Ok(rows)
}

// ------------------------------------------------------ radial law and KS

/// P(|λ| ≤ r) for a uniformly chosen eigenvalue:
/// (1/N) Σ_{k<N} I_{r²/(1+r²)}(k+L+1, n−k).
pub fn radial_cdf(r: f64, p: &Params) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    let t = r * r / (1.0 + r * r);
    let mut s = 0.0;
    for k in 0..p.big_n {
        let kf = k as f64;
        s += reg_incomplete_beta(kf + p.l + 1.0, p.n - kf, t)?;
    }
    Ok(s / p.nf())
}

/// sup |F_emp − F|.
pub fn ks_one_sample(data: &[f64], cdf: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut v = data.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// sup |F_a − F_b|.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic KS p-value for statistic `d` at effective sample size `ne`.
pub fn kolmogorov_pvalue(d: f64, ne: f64) -> f64 {
    let s = ne.sqrt();
    let lam = (s + 0.12 + 0.11 / s) * d;
    if lam < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let jf = j as f64;
        let t = 2.0 * (-2.0 * jf * jf * lam * lam).exp();
        sum += if j % 2 == 1 { t } else { -t };
        if t < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// KS statistic of sampled eigenvalue moduli against [`radial_cdf`].
pub fn mc_radial_ks(cfg: &SampleConfig) -> Result<KsResult> {
    let batch = sample_overlaps(cfg, false)?;
    let r: Vec<f64> = batch.eigenvalues.iter().flatten().map(|l| l.norm()).collect();
    let d = ks_one_sample(&r, |x| radial_cdf(x, &cfg.params))?;
    Ok(KsResult { statistic: d, p_value: kolmogorov_pvalue(d, r.len() as f64), count: r.len() })
}

/// Column-rescaled copy of P, used by the invariance checks.
pub fn rescale_columns(p: &DMatrix<C>, s: &DVector<C>) -> DMatrix<C> {
    let mut out = p.clone();
    for j in 0..p.ncols() {
        for i in 0..p.nrows() {
            out[(i, j)] *= s[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(nn: usize, n: f64, l: f64, samples: usize) -> SampleConfig {
        SampleConfig::new(EnsembleParams::new(nn, n, l).unwrap(), samples, 7, 2).unwrap()
    }

    #[test]
    fn unitary_input_is_normal() {
        let mut rng = replica_rng(1, 0);
        let u = haar_unitary(6, &mut rng);
        let s = eig_overlaps(&u).unwrap();
        for j in 0..6 {
            for k in 0..6 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((s.overlaps[(j, k)] - C::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn row_sums_are_one() {
        let c = cfg(5, 10.0, 2.0, 1);
        let mut rng = replica_rng(3, 0);
        let m = sample_matrix(&c, &mut rng).unwrap();
        let s = eig_overlaps(&m).unwrap();
        for j in 0..5 {
            let row: C = (0..5).map(|k| s.overlaps[(j, k)]).sum();
            assert!((row - C::new(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut a = cfg(4, 8.0, 1.0, 12);
        let b1 = sample_overlaps(&a, true).unwrap();
        a.workers = 3;
        let b2 = sample_overlaps(&a, true).unwrap();
        assert_eq!(b1.eigenvalues, b2.eigenvalues);
        assert_eq!(b1.diag_overlaps, b2.diag_overlaps);
    }

    #[test]
    fn x_draw_mean() {
        let mut rng = replica_rng(5, 0);
        let m = 40.0;
        let k = 200_000;
        let mean = (0..k).map(|_| draw_x(m, &mut rng)).sum::<f64>() / k as f64;
        assert!((mean * m - 1.0).abs() < 0.05);
    }

    #[test]
    fn pvalue_monotone() {
        assert!(kolmogorov_pvalue(0.01, 1000.0) > 0.99);
        assert!(kolmogorov_pvalue(0.1, 1000.0) < 1e-6);
        let mid = kolmogorov_pvalue(1.36 / 1000f64.sqrt(), 1000.0);
        assert!((mid - 0.05).abs() < 0.01);
    }

    #[test]
    fn rejects_fractional_parameters() {
        let p = EnsembleParams::new(3, 6.5, 1.0).unwrap();
        assert!(SampleConfig::new(p, 10, 0, 1).is_err());
    }
}
