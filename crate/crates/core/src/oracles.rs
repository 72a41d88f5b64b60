//! Brute-force references: plane quadrature, Gram-Schmidt on monomials,
//! direct integration of the D definitions and the q̂ asymptotics.
//!
//! Nothing here calls the kernel routes of `finite_kernels`; moments are
//! rebuilt from the radial formula or by quadrature.

use crate::error::{domain, OverlapError, Result};
use crate::finite_structures::{qhat_scaled, EnsembleParams, PolyFamily};
use crate::limit_kernels::{map_point, regime_to_params, EdgeSide, RegimeKind, RegimeSpec};
use crate::scaled::Scaled;
use crate::special_functions::{calE, log_gamma, L_rho, F};
use num_complex::Complex;
use rayon::prelude::*;

type C = Complex<f64>;
type Params = EnsembleParams<f64>;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub r_max: f64,
    pub tol: f64,
    pub max_refine: usize,
    /// Starting number of angular nodes; doubled once as an error check.
    pub angular_nodes: usize,
}

impl QuadratureSpec {
    /// Cutoff for integrands bounded by |z|^{2 deg} e^{-NQ(z)}: the tail
    /// ∫_{r_max}^∞ r^{2L+2deg+1}(1+r²)^{-(n+L+1)} 2 dr stays below tol/10.
    /// Angular nodes 4·deg + 8.
    pub fn for_weight(p: &Params, deg: usize, tol: f64) -> Result<Self> {
        let e = p.n - deg as f64;
        if !(e > 0.0) {
            return Err(domain("QuadratureSpec", format!("degree {deg} not integrable for n = {}", p.n)));
        }
        let r_max = (e * tol / 10.0).powf(-0.5 / e).max(4.0);
        Ok(QuadratureSpec { r_max, tol, max_refine: 40, angular_nodes: 4 * deg + 8 })
    }
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> C, a: f64, b: f64) -> (C, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Piece {
    a: f64,
    b: f64,
    val: C,
    err: f64,
    depth: usize,
}

/// Globally adaptive GK15 on [a, b] starting from the given breakpoints.
pub fn integrate_1d(f: impl Fn(f64) -> C, breaks: &[f64], tol: f64, max_refine: usize) -> Result<(C, f64)> {
    let mut pieces: Vec<Piece> = breaks
        .windows(2)
        .map(|w| {
            let (val, err) = gk15(&f, w[0], w[1]);
            Piece { a: w[0], b: w[1], val, err, depth: 0 }
        })
        .collect();
    loop {
        let err: f64 = pieces.iter().map(|p| p.err).sum();
        if err <= tol {
            let val = pieces.iter().map(|p| p.val).sum();
            return Ok((val, err));
        }
        let (i, worst) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, p)| (i, p.depth))
            .unwrap();
        if worst >= max_refine || !err.is_finite() {
            return Err(OverlapError::NoConvergence { op: "integrate_1d", iters: max_refine });
        }
        let p = pieces.swap_remove(i);
        let m = 0.5 * (p.a + p.b);
        for (a, b) in [(p.a, m), (m, p.b)] {
            let (val, err) = gk15(&f, a, b);
            pieces.push(Piece { a, b, val, err, depth: p.depth + 1 });
        }
    }
}

fn radial_breaks(r_max: f64) -> Vec<f64> {
    let mut b = vec![0.0, 0.125, 0.25, 0.5];
    let mut r = 1.0;
    while r < r_max {
        b.push(r);
        r *= 2.0;
    }
    b.push(r_max);
    b
}

/// Mean of f over the circle of radius r, with the node count doubled until
/// two successive rules agree.
fn circle_mean(f: &impl Fn(C) -> C, r: f64, m0: usize, tol: f64, max_refine: usize) -> Result<C> {
    let rule = |m: usize, offset: usize, stride: usize| -> C {
        let mut s = C::new(0.0, 0.0);
        let mut j = offset;
        while j < m {
            let t = std::f64::consts::TAU * j as f64 / m as f64;
            s += f(C::from_polar(r, t));
            j += stride;
        }
        s
    };
    let mut m = m0.max(4);
    let mut sum = rule(m, 0, 1);
    for _ in 0..max_refine {
        // The 2m rule reuses the m nodes at even positions.
        let odd = rule(2 * m, 1, 2);
        let coarse = sum / m as f64;
        sum += odd;
        m *= 2;
        let fine = sum / m as f64;
        if (fine - coarse).norm() <= tol {
            return Ok(fine);
        }
    }
    Err(OverlapError::NoConvergence { op: "circle_mean", iters: max_refine })
}

/// ∫ f dA with dA = d²z/π over the disk |z| ≤ r_max.
pub fn quad_plane(f: impl Fn(C) -> C, spec: &QuadratureSpec) -> Result<C> {
    if !(spec.r_max > 0.0 && spec.tol > 0.0) {
        return Err(domain("quad_plane", "r_max and tol must be positive"));
    }
    let ang_tol = 0.1 * spec.tol / spec.r_max.powi(2);
    let err = std::cell::RefCell::new(None);
    let g = |r: f64| -> C {
        if r == 0.0 {
            return C::new(0.0, 0.0);
        }
        match circle_mean(&f, r, spec.angular_nodes, ang_tol, 8) {
            Ok(v) => v * (2.0 * r),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                C::new(f64::NAN, f64::NAN)
            }
        }
    };
    let res = integrate_1d(g, &radial_breaks(spec.r_max), spec.tol, spec.max_refine);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    res.map(|x| x.0)
}

/// ∫_0^{r_max} 2r f(r) dr, the plane integral of a radial function.
pub fn quad_radial(f: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64> {
    let g = |r: f64| C::new(2.0 * r * f(r), 0.0);
    integrate_1d(g, &radial_breaks(spec.r_max), spec.tol, spec.max_refine).map(|x| x.0.re)
}

// ------------------------------------------------------------- weights

/// e^{-NQ(z)} = |z|^{2L}(1+|z|²)^{-(n+L+1)}.
pub fn weight(z: C, p: &Params) -> f64 {
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        return if p.l == 0.0 { 1.0 } else { 0.0 };
    }
    (p.l * r2.ln() - (p.n + p.l + 1.0) * r2.ln_1p()).exp()
}

/// Radial moment ∫|z|^{2k} e^{-NQ} dA from the Beta integral.
pub fn radial_moment(k: usize, p: &Params) -> Result<f64> {
    let kf = k as f64;
    Ok((log_gamma(kf + p.l + 1.0)? + log_gamma(p.n - kf)? - log_gamma(p.n + p.l + 1.0)?).exp())
}

/// ω̃(z|a, ā) = |z−a|² + (1+|a|²)(1+|z|²)/(n+L).
fn deform(z: C, a: C, p: &Params) -> f64 {
    (z - a).norm_sqr() + (1.0 + a.norm_sqr()) * (1.0 + z.norm_sqr()) / p.m()
}

// --------------------------------------------------------- Gram-Schmidt

/// M_ij = ∫ z^i z̄^j ω(z|a, ā) dA, assembled from radial moments.
pub fn deformed_moment_matrix(size: usize, p: &Params, a: C) -> Result<Vec<Vec<C>>> {
    let mk: Vec<f64> = (0..=size).map(|k| radial_moment(k, p)).collect::<Result<_>>()?;
    let c = (1.0 + a.norm_sqr()) / p.m();
    let mut m = vec![vec![C::new(0.0, 0.0); size]; size];
    for i in 0..size {
        m[i][i] = C::new(mk[i + 1] + a.norm_sqr() * mk[i] + c * (mk[i] + mk[i + 1]), 0.0);
        if i + 1 < size {
            // ∫ z^{i+1} z̄^i (−a z̄) w and its conjugate.
            m[i + 1][i] = -a * mk[i + 1];
            m[i][i + 1] = -a.conj() * mk[i + 1];
        }
    }
    Ok(m)
}

/// Monic orthogonal polynomials for ⟨f, g⟩ = ∫ f ḡ ω(z|a, ā) dA by
/// classical Gram-Schmidt on 1, z, …, z^maxdeg.
pub fn gram_schmidt_reference(maxdeg: usize, p: &Params, a: C) -> Result<PolyFamily<f64>> {
    if maxdeg > 6 {
        return Err(domain("gram_schmidt_reference", "maxdeg above 6 is ill-conditioned"));
    }
    if maxdeg as f64 > p.n - 2.0 {
        return Err(domain("gram_schmidt_reference", "moments diverge for maxdeg > n - 2"));
    }
    let size = maxdeg + 1;
    let m = deformed_moment_matrix(size, p, a)?;
    let ip = |f: &[C], g: &[C]| -> C {
        let mut s = C::new(0.0, 0.0);
        for (i, fi) in f.iter().enumerate() {
            for (j, gj) in g.iter().enumerate() {
                s += fi * gj.conj() * m[i][j];
            }
        }
        s
    };
    let mut coeffs: Vec<Vec<C>> = Vec::with_capacity(size);
    let mut norms = Vec::with_capacity(size);
    for k in 0..size {
        let mut c = vec![C::new(0.0, 0.0); k + 1];
        c[k] = C::new(1.0, 0.0);
        for (j, pj) in coeffs.iter().enumerate() {
            let proj = ip(&c, pj) / norms[j];
            for (i, v) in pj.iter().enumerate() {
                c[i] -= proj * v;
            }
        }
        let h = ip(&c, &c).re;
        let scale = m[k][k].re;
        if !(h > 1e-13 * scale) {
            return Err(OverlapError::Breakdown { op: "gram_schmidt_reference", msg: format!("h_{k} = {h}") });
        }
        coeffs.push(c);
        norms.push(h);
    }
    Ok(PolyFamily { base_point: a, degree: maxdeg, coeffs, norms })
}

/// Gram matrix ∫ P_j conj(P_k) ω dA of a family by plane quadrature.
pub fn quadrature_gram(fam: &PolyFamily<f64>, p: &Params, spec: &QuadratureSpec) -> Result<Vec<Vec<C>>> {
    let size = fam.degree + 1;
    let a = fam.base_point;
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|j| (j..size).map(move |k| (j, k))).collect();
    let vals: Vec<C> = pairs
        .par_iter()
        .map(|&(j, k)| quad_plane(|z| fam.eval_p(j, z) * fam.eval_p(k, z).conj() * (deform(z, a, p) * weight(z, p)), spec))
        .collect::<Result<_>>()?;
    let mut g = vec![vec![C::new(0.0, 0.0); size]; size];
    for (&(j, k), v) in pairs.iter().zip(vals) {
        g[j][k] = v;
        g[k][j] = v.conj();
    }
    Ok(g)
}

// ------------------------------------------------------------ D brute force

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DKind {
    D11,
    D12,
}

/// ln Z_N = ln N! + Σ_{j<N} ln m_j, with the moments from quadrature.
fn ln_partition(p: &Params, spec: &QuadratureSpec) -> Result<f64> {
    let mut s = log_gamma(p.nf() + 1.0)?;
    for j in 0..p.big_n {
        let mj = quad_radial(|r| r.powi(2 * j as i32) * weight(C::new(r, 0.0), p), spec)?;
        s += mj.ln();
    }
    Ok(s)
}

/// Integrand of the D definition on the full configuration, with the
/// 1/|z₁ − z_j|² singularities cancelled against |Δ_N|².
fn d_integrand(kind: DKind, z: &[C], p: &Params) -> C {
    let nn = z.len();
    let m = p.m();
    let mut v = C::new(1.0, 0.0);
    for &zj in z {
        v *= weight(zj, p);
    }
    let z1 = z[0];
    match kind {
        DKind::D11 => {
            for j in 1..nn {
                v *= (z1 - z[j]).norm_sqr() + (1.0 + z1.norm_sqr()) * (1.0 + z[j].norm_sqr()) / m;
                for k in j + 1..nn {
                    v *= (z[j] - z[k]).norm_sqr();
                }
            }
            v
        }
        DKind::D12 => {
            let z2 = z[1];
            v *= -1.0 / m;
            for j in 2..nn {
                let zj = z[j];
                let a = (z1 - zj) * (z2 - zj).conj();
                let f = a + (1.0 + z1 * z2.conj()) * (1.0 + zj.norm_sqr()) / m;
                v *= f * a.conj();
                for k in j + 1..nn {
                    v *= (zj - z[k]).norm_sqr();
                }
            }
            v
        }
    }
}

/// D₁,₁^{(N,k)} or D₁,₂^{(N,k)} at the k fixed points by direct plane
/// quadrature over the remaining N − k ≤ 2 points.
pub fn brute_force_D(points: &[C], p: &Params, kind: DKind, spec: &QuadratureSpec) -> Result<C> {
    let nn = p.big_n;
    let k = points.len();
    if k == 0 || k > nn || nn - k > 2 {
        return Err(domain("brute_force_D", format!("need 1 <= k <= N and N - k <= 2, got N={nn}, k={k}")));
    }
    if kind == DKind::D12 && k < 2 {
        return Err(domain("brute_force_D", "D12 needs k >= 2"));
    }
    let lnz = ln_partition(p, spec)?;
    let pre = (log_gamma(nn as f64 + 1.0)? - log_gamma((nn - k) as f64 + 1.0)? - lnz).exp();
    let free = nn - k;
    let eval = |extra: &[C]| {
        let mut z = points.to_vec();
        z.extend_from_slice(extra);
        d_integrand(kind, &z, p)
    };
    let val = match free {
        0 => eval(&[]),
        1 => quad_plane(|u| eval(&[u]), spec)?,
        _ => {
            let inner = QuadratureSpec { tol: spec.tol * 0.1, ..*spec };
            let err = std::sync::Mutex::new(None);
            let v = quad_plane(
                |u| match quad_plane(|w| eval(&[u, w]), &inner) {
                    Ok(x) => x,
                    Err(e) => {
                        err.lock().unwrap().get_or_insert(e);
                        C::new(f64::NAN, f64::NAN)
                    }
                },
                spec,
            );
            if let Some(e) = err.into_inner().unwrap() {
                return Err(e);
            }
            v?
        }
    };
    Ok(val * pre)
}

// ------------------------------------------------- q̂ asymptotics

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QhatRow {
    pub big_n: usize,
    /// Sup over the grid and k ∈ {0, 1, 2}.
    pub sup_err: f64,
}

/// Limit of q̂_{N+k−1}(z̄w|λλ̄)(z̄w)^L/(1+z̄w)^{n+L}, the q̂ω̂ product with its
/// Gaussian envelope divided out.
fn ratio_limit(spec: &RegimeSpec<f64>, zeta: C, eta: C, chi: C) -> Result<C> {
    let s = zeta.conj() + eta;
    let tail = |shift: f64| (-(s + shift) * (s + shift) * 0.5).exp() / SQRT_2PI;
    match spec.kind {
        RegimeKind::StrongBulk => Ok(C::new(1.0, 0.0)),
        RegimeKind::StrongEdge => match spec.edge_side {
            EdgeSide::Outer => F(s),
            EdgeSide::Inner => Ok(F(s)? - tail(0.0) / (chi + chi.conj())),
        },
        RegimeKind::Weak => {
            let r = spec.rho / std::f64::consts::SQRT_2;
            Ok(L_rho(s, spec.rho)? + tail(r) / (chi + chi.conj() + r))
        }
        RegimeKind::Singular => Err(domain("ratio_limit", "singular regime is compared in modulus")),
    }
}

fn qhat_error(spec: &RegimeSpec<f64>, p: &Params, k: usize, zeta: C, eta: C, chi: C) -> Result<f64> {
    let z = map_point(spec, p, zeta);
    let w = map_point(spec, p, eta);
    let lam = map_point(spec, p, chi);
    let y = z.conj() * w;
    let q = qhat_scaled(p.big_n + k - 1, p, y, C::new(lam.norm_sqr(), 0.0))?;
    if spec.kind == RegimeKind::Singular {
        let env = Scaled::from_log(
            p.l * y.ln().re - 0.5 * (p.n + p.l + 1.0) * (z.norm_sqr().ln_1p() + w.norm_sqr().ln_1p()),
            p.l * y.arg(),
        );
        let fin = (q * env).to_c().ok_or(OverlapError::Overflow { op: "asymptotic_qhat_check" })?;
        let zb_eta = zeta.conj() * eta;
        let cc = chi.norm_sqr();
        let lim = zb_eta.powf(p.l) * calE(p.l, zb_eta, C::new(cc, 0.0))? / (cc - p.l)
            * (-(zeta.norm_sqr() + eta.norm_sqr()) * 0.5).exp();
        return Ok((fin.norm() - lim.norm()).abs());
    }
    let env = Scaled::exp_c(y.ln() * p.l - (C::new(1.0, 0.0) + y).ln() * p.m());
    let fin = (q * env).to_c().ok_or(OverlapError::Overflow { op: "asymptotic_qhat_check" })?;
    Ok((fin - ratio_limit(spec, zeta, eta, chi)?).norm())
}

/// Sup error of the q̂ asymptotics over `grid` of (ζ, η, χ) for each N.
pub fn asymptotic_qhat_check(spec: &RegimeSpec<f64>, ladder: &[usize], grid: &[(C, C, C)]) -> Result<Vec<QhatRow>> {
    ladder
        .iter()
        .map(|&nn| {
            let p = regime_to_params(spec, nn)?;
            let errs: Vec<f64> = grid
                .par_iter()
                .flat_map(|&(z, e, c)| (0..3).into_par_iter().map(move |k| (k, z, e, c)))
                .map(|(k, z, e, c)| qhat_error(spec, &p, k, z, e, c))
                .collect::<Result<_>>()?;
            Ok(QhatRow { big_n: nn, sup_err: errs.into_iter().fold(0.0, f64::max) })
        })
        .collect()
}

/// Default (ζ, η, χ) grid for the q̂ check.
pub fn default_qhat_grid(kind: RegimeKind) -> Vec<(C, C, C)> {
    let c = C::new;
    let chi = match kind {
        RegimeKind::StrongBulk => c(0.1, 0.2),
        RegimeKind::StrongEdge => c(0.6, 0.3),
        RegimeKind::Weak => c(0.2, 0.1),
        RegimeKind::Singular => c(0.6, 0.3),
    };
    let pts = [c(0.3, 0.2), c(-0.2, 0.4), c(0.1, -0.3)];
    let mut g = Vec::new();
    for &z in &pts {
        for &e in &pts {
            g.push((z, e, chi));
        }
    }
    g
}
