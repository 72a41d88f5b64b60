//! Finite-N overlap kernels K₁,₁ and K₁,₂, the overlap densities D₁,₁ and
//! D₁,₂, and the conditional expectations built from them.
//!
//! A point carries an independent pair (z, z̄). Physical points have
//! `zbar == conj(z)`; the decoupling identity needs the general case.

use crate::error::{domain, OverlapError, Result};
use crate::finite_structures::{g_scaled, ghat_scaled, phi_terms, pivots, q_scaled, qhat_scaled, EnsembleParams};
use crate::linalg::det_scaled;
use crate::scalar::{re, Cx, Real};
use crate::scaled::Scaled;
use crate::special_functions::lgam;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedPoint<T: Real> {
    pub z: Cx<T>,
    pub zbar: Cx<T>,
}

impl<T: Real> WeightedPoint<T> {
    pub fn new(z: Cx<T>, zbar: Cx<T>) -> Self {
        WeightedPoint { z, zbar }
    }

    pub fn physical(z: Cx<T>) -> Self {
        WeightedPoint { z, zbar: z.conj() }
    }

    pub fn is_physical(&self) -> bool {
        self.zbar == self.z.conj()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMethod {
    Direct,
    Simplified,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEval<T: Real> {
    pub value: Cx<T>,
    pub method: KernelMethod,
    /// True when the simplified route fell back to the direct sum near its
    /// removable singularity.
    pub regularized: bool,
}

/// A configuration z₁..z_k of distinct physical points.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigPoint<T: Real> {
    pub points: Vec<Cx<T>>,
}

impl<T: Real> ConfigPoint<T> {
    pub fn new(points: Vec<Cx<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("ConfigPoint", "empty configuration"));
        }
        for i in 0..points.len() {
            if !(points[i].re.is_finite() && points[i].im.is_finite()) {
                return Err(domain("ConfigPoint", "non-finite point"));
            }
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(OverlapError::Degenerate {
                        op: "ConfigPoint",
                        msg: format!("points {j} and {i} coincide"),
                    });
                }
            }
        }
        Ok(ConfigPoint { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn out<T: Real>(s: Scaled<T>, op: &'static str) -> Result<Cx<T>> {
    s.to_c().ok_or(OverlapError::Overflow { op })
}

fn lnc<T: Real>(v: T) -> Scaled<T> {
    Scaled::from_log(v, T::zero())
}

// ---------------------------------------------------------------- weights

/// ŵ(z, z̄) = (z z̄)^L (1 + z z̄)^{-(n+L+1)}, principal branch. Equals
/// e^{-NQ(z)} on physical points.
pub fn holo_weight<T: Real>(pt: WeightedPoint<T>, p: &EnsembleParams<T>) -> Scaled<T> {
    let u = pt.z * pt.zbar;
    let one = re(T::one());
    let tail = (one + u).ln() * (-(p.n + p.l + T::one()));
    if u.norm() == T::zero() {
        return if p.l == T::zero() { Scaled::exp_c(tail) } else { Scaled::zero() };
    }
    Scaled::exp_c(u.ln() * p.l + tail)
}

/// e^{-NQ(z)} = |z|^{2L} (1 + |z|²)^{-(n+L+1)}.
pub fn gaussian_free_weight<T: Real>(z: Cx<T>, p: &EnsembleParams<T>) -> T {
    let r2 = z.norm_sqr();
    if r2 == T::zero() {
        return if p.l == T::zero() { T::one() } else { T::zero() };
    }
    (p.l * r2.ln() - (p.n + p.l + T::one()) * r2.ln_1p()).exp()
}

/// ω̃(z|u, v) = (z − u)(z̄ − v) + (1 + uv)(1 + z z̄)/(n + L).
pub fn omega_tilde<T: Real>(pt: WeightedPoint<T>, u: Cx<T>, v: Cx<T>, p: &EnsembleParams<T>) -> Cx<T> {
    let one = re(T::one());
    (pt.z - u) * (pt.zbar - v) + (one + u * v) * (one + pt.z * pt.zbar) / p.m()
}

/// ω(z|u, v) = ω̃(z|u, v) e^{-NQ(z)}.
pub fn weight_omega<T: Real>(pt: WeightedPoint<T>, u: Cx<T>, v: Cx<T>, p: &EnsembleParams<T>) -> Result<Cx<T>> {
    out(holo_weight(pt, p).scale_c(omega_tilde(pt, u, v, p)), "weight_omega")
}

/// ω̂(u, v) = (uv)^L / ((1 + |u|²)(1 + |v|²))^{(n+L+1)/2}.
pub fn omega_hat<T: Real>(u: Cx<T>, v: Cx<T>, p: &EnsembleParams<T>) -> Result<Cx<T>> {
    let uv = u * v;
    let half = (p.n + p.l + T::one()) * T::c(0.5);
    let tail = -half * (u.norm_sqr().ln_1p() + v.norm_sqr().ln_1p());
    if uv.norm() == T::zero() {
        return Ok(if p.l == T::zero() { re(tail.exp()) } else { re(T::zero()) });
    }
    if uv.im == T::zero() && uv.re < T::zero() && p.l.fract() != T::zero() {
        log::warn!("omega_hat: uv on the branch cut of (uv)^L");
    }
    out(Scaled::exp_c(uv.ln() * p.l + re(tail)), "omega_hat")
}

/// ϖ(z, w|u, v) = √ω̃(z|u, v) · √ω̃(w|u, v).
pub fn varpi<T: Real>(z: WeightedPoint<T>, w: WeightedPoint<T>, u: Cx<T>, v: Cx<T>, p: &EnsembleParams<T>) -> Cx<T> {
    omega_tilde(z, u, v, p).sqrt() * omega_tilde(w, u, v, p).sqrt()
}

fn kn_sum<T: Real>(p: &EnsembleParams<T>, y: Cx<T>) -> Scaled<T> {
    let (n, l) = (p.n, p.l);
    let mut term = lnc(lgam(n + l + T::one()) - lgam(n) - lgam(l + T::one()));
    let mut acc = Scaled::zero();
    for k in 0..p.big_n {
        acc = acc + term;
        let kf = T::from_usize_(k);
        term = term.scale_c(y * ((n - kf - T::one()) / (kf + l + T::one())));
    }
    acc
}

/// Eigenvalue correlation kernel K_N(z, w) of the ensemble.
pub fn kernel_KN<T: Real>(z: Cx<T>, w: Cx<T>, p: &EnsembleParams<T>) -> Result<Cx<T>> {
    let wz = holo_weight(WeightedPoint::physical(z), p);
    let ww = holo_weight(WeightedPoint::physical(w), p);
    out((wz * ww).sqrt() * kn_sum(p, z.conj() * w), "kernel_KN")
}

// ---------------------------------------------------------- reduced kernel

/// 𝒦^{(M)}(z̄, w|λ, λ̄) = Σ_{j<M} P̄_j(z̄) P_j(w)/h_j with the polynomials of
/// the deformed weight at base point (λ, λ̄).
pub fn reduced_kernel<T: Real>(
    m: usize,
    p: &EnsembleParams<T>,
    zbar: Cx<T>,
    w: Cx<T>,
    lam: Cx<T>,
    lambar: Cx<T>,
) -> Scaled<T> {
    let l = p.l;
    let x = lam * lambar;
    let d = pivots(p, x, m);
    let (sz, sw) = (Scaled::from_c(zbar), Scaled::from_c(w));
    let (mut zp, mut wp) = (Scaled::one(), Scaled::one());
    let (mut pz, mut pw) = (Scaled::one(), Scaled::one());
    let mut acc = Scaled::zero();
    for j in 0..m {
        let jf = T::from_usize_(j);
        if j > 0 {
            let rho = re(l + jf) / d[j - 1];
            zp = zp * sz;
            wp = wp * sw;
            pz = pz.scale_c(lambar * rho) + zp;
            pw = pw.scale_c(lam * rho) + wp;
        }
        let inv_h = lnc(-p.ln_moment(jf + T::one())).scale_c(re(l + jf + T::one()) / d[j]);
        acc = acc + pz * pw * inv_h;
    }
    acc
}

/// G_N(x|y, z) by the double sum Σ g_s y^s g_t z^t Σ_{k≥max(s,t)} φ_k. Pairs
/// (s, t) and (t, s) are added together so the result is exactly symmetric
/// in y and z.
pub fn gn_direct<T: Real>(p: &EnsembleParams<T>, x: Cx<T>, y: Cx<T>, z: Cx<T>) -> Scaled<T> {
    let nn = p.big_n;
    let phi = phi_terms(nn, p, x);
    let mut tail = vec![Scaled::zero(); nn + 1];
    for k in (0..nn).rev() {
        tail[k] = tail[k + 1] + phi[k];
    }
    let g = crate::finite_structures::g_all_scaled(nn, p, x);
    let (ys, zs) = (Scaled::from_c(y), Scaled::from_c(z));
    let mut a = Vec::with_capacity(nn);
    let mut b = Vec::with_capacity(nn);
    let (mut yp, mut zp) = (Scaled::one(), Scaled::one());
    for gs in g.iter().take(nn) {
        a.push(*gs * yp);
        b.push(*gs * zp);
        yp = yp * ys;
        zp = zp * zs;
    }
    let mut acc = Scaled::zero();
    for s in 0..nn {
        acc = acc + a[s] * b[s] * tail[s];
        for t in s + 1..nn {
            acc = acc + (a[s] * b[t] + a[t] * b[s]) * tail[t];
        }
    }
    acc
}

/// G_N in closed form through q̂ and ĝ. Singular where z̄ = λ̄ or w = λ.
pub fn gn_simplified<T: Real>(
    p: &EnsembleParams<T>,
    zbar: Cx<T>,
    w: Cx<T>,
    lam: Cx<T>,
    lambar: Cx<T>,
) -> Result<Scaled<T>> {
    let (n, l) = (p.n, p.l);
    let nn = p.big_n;
    if T::from_usize_(nn) > n - T::c(2.0) {
        return Err(domain("gn_simplified", "need N <= n - 2"));
    }
    let nf = T::from_usize_(nn);
    let one = re(T::one());
    let x = lam * lambar;
    let s = zbar - lambar;
    let t = w - lam;
    let xx = zbar * w;
    let qh = |m: usize, y: Cx<T>| qhat_scaled(m, p, y, x);
    let wm = |m: usize| -> Result<Scaled<T>> {
        Ok(qh(m, lam * zbar)? * qh(m, lambar * w)? - (qh(m, x)? * qh(m, xx)?).scale_c(one - s * t / (one + x)))
    };
    let c0 = if l == T::zero() {
        Scaled::zero()
    } else {
        lnc(lgam(n + l + T::one()) - lgam(n + T::one()) - lgam(l))
    };
    let gh = ghat_scaled(nn, p, x)?;
    let bracket = q_scaled(nn, p, xx).scale_c(re(l + nf)) - q_scaled(nn - 1, p, xx).scale_c(xx * (n - nf))
        - c0
        - c0.scale_c((one + xx) * (n - nf) / (x * n - l));
    let r = qh(nn - 1, xx)?.scale_c(x * (n - nf - T::one())) + bracket.scale_c(x / (one + xx));
    let lg = lgam(l + n + T::one()) - lgam(l + nf + T::one());
    let a1 = lnc(lg - lgam(n - nf));
    let a2 = lnc(lg - lgam(n - nf + T::one()));
    let xn = Scaled::from_c(xx).powi(nn as i32);
    let (qm1, q0, qp1) = (qh(nn - 1, x)?, qh(nn, x)?, qh(nn + 1, x)?);
    let big_r = gh * r - (a1 * xn * qm1).scale_c(x * x * (n - nf - T::one()))
        + (a2 * xn * q0).scale_c(x * x * (n - nf - T::one()))
        - (a1 * xn * qp1).scale_c(x * xx)
        + (a2 * xn * q0).scale_c(x * (l + nf + T::one()) * (n - nf - T::one()));
    let st = Scaled::from_c(s * t);
    let first = (wm(nn + 1)?.scale_c(re(l + nf + T::one())) - wm(nn)?.scale_c(x * (n - nf - T::one())))
        .scale_c(one + x)
        / (st * st * gh);
    let second = big_r / (st * gh).scale_c(x);
    Ok(first + second)
}

fn check_kernel_args<T: Real>(p: &EnsembleParams<T>, lam: Cx<T>, op: &'static str) -> Result<()> {
    if T::from_usize_(p.big_n) > p.n - T::c(2.0) {
        return Err(domain(op, "need N <= n - 2"));
    }
    let x = lam.norm_sqr();
    if x < T::c(1e-12) {
        return Err(crate::error::singular(op, "|λ|² = 0"));
    }
    if (x - p.l / p.n).abs() < T::c(1e-12) {
        return Err(crate::error::singular(op, "|λ|² = L/n"));
    }
    Ok(())
}

/// Overlap kernel K₁,₁^{(N)}(z, w|λ) for physical z, w, λ.
pub fn k11_finite<T: Real>(
    z: Cx<T>,
    w: Cx<T>,
    lam: Cx<T>,
    p: &EnsembleParams<T>,
    method: KernelMethod,
) -> Result<KernelEval<T>> {
    check_kernel_args(p, lam, "k11_finite")?;
    let (zp, wp) = (WeightedPoint::physical(z), WeightedPoint::physical(w));
    let lamb = lam.conj();
    let x = lam * lamb;
    let mut regularized = false;
    let g = match method {
        KernelMethod::Direct => gn_direct(p, x, z.conj() / lamb, w / lam),
        KernelMethod::Simplified => {
            let scale = (T::one() + lam.norm()).powi(2);
            if (z - lam).norm() * (w - lam).norm() < T::c(1e-4) * scale {
                regularized = true;
                gn_direct(p, x, z.conj() / lamb, w / lam)
            } else {
                gn_simplified(p, z.conj(), w, lam, lamb)?
            }
        }
    };
    let weight = (holo_weight(zp, p) * holo_weight(wp, p)).sqrt();
    let value = out((g * weight).scale_c(varpi(zp, wp, lam, lamb, p)), "k11_finite")?;
    Ok(KernelEval { value, method, regularized })
}

/// K₁,₁ built from the reduced kernel of size `m` (the D formulas use
/// m = N − 1).
pub fn k11_reduced<T: Real>(m: usize, z: Cx<T>, w: Cx<T>, lam: Cx<T>, p: &EnsembleParams<T>) -> Result<Cx<T>> {
    let (zp, wp) = (WeightedPoint::physical(z), WeightedPoint::physical(w));
    let lamb = lam.conj();
    let weight = (holo_weight(zp, p) * holo_weight(wp, p)).sqrt();
    let k = reduced_kernel(m, p, z.conj(), w, lam, lamb);
    out((k * weight).scale_c(varpi(zp, wp, lam, lamb, p)), "k11_reduced")
}

/// Overlap kernel K₁,₂^{(N)}(z, w|u, v) for physical points.
pub fn k12_finite<T: Real>(z: Cx<T>, w: Cx<T>, u: Cx<T>, v: Cx<T>, p: &EnsembleParams<T>) -> Result<Cx<T>> {
    if T::from_usize_(p.big_n) > p.n - T::c(2.0) {
        return Err(domain("k12_finite", "need N <= n - 2"));
    }
    let nn = p.big_n;
    let vb = v.conj();
    let k = |a: Cx<T>, b: Cx<T>| reduced_kernel(nn, p, a, b, u, vb);
    let k_uv = k(u.conj(), v);
    if k_uv.is_zero() {
        return Err(crate::error::singular("k12_finite", "𝒦(ū, v) = 0"));
    }
    let det = k_uv * k(z.conj(), w) - k(u.conj(), w) * k(z.conj(), v);
    let (zp, wp) = (WeightedPoint::physical(z), WeightedPoint::physical(w));
    let weight = (holo_weight(zp, p) * holo_weight(wp, p)).sqrt();
    out((det / k_uv * weight).scale_c(varpi(zp, wp, u, vb, p)), "k12_finite")
}

// ------------------------------------------------------------ densities

fn check_config<T: Real>(k: usize, p: &EnsembleParams<T>, op: &'static str, min: usize) -> Result<()> {
    if k < min || k > p.big_n {
        return Err(domain(op, format!("need {min} <= k <= N, got k = {k}")));
    }
    if p.big_n < 2 {
        return Err(domain(op, "need N >= 2"));
    }
    if T::from_usize_(p.big_n) > p.n - T::one() {
        return Err(domain(op, "need N <= n - 1"));
    }
    Ok(())
}

/// D₁,₁ for points with independent (z, z̄), scaled.
fn d11_general<T: Real>(pts: &[WeightedPoint<T>], p: &EnsembleParams<T>) -> Scaled<T> {
    let m = p.big_n - 1;
    let (u, v) = (pts[0].z, pts[0].zbar);
    let mut acc = g_scaled(m, p, u * v).scale_c(re(p.n)) * holo_weight(pts[0], p);
    let k = pts.len() - 1;
    if k == 0 {
        return acc;
    }
    for pt in &pts[1..] {
        acc = acc * holo_weight(*pt, p).scale_c(omega_tilde(*pt, u, v, p));
    }
    let mut a = Vec::with_capacity(k * k);
    for i in 1..=k {
        for j in 1..=k {
            a.push(reduced_kernel(m, p, pts[i].zbar, pts[j].z, u, v));
        }
    }
    acc * det_scaled(&a, k)
}

/// Overlap density D₁,₁^{(N,k)}(z₁, …, z_k), real.
pub fn d11_finite<T: Real>(cfg: &ConfigPoint<T>, p: &EnsembleParams<T>) -> Result<T> {
    check_config(cfg.len(), p, "d11_finite", 1)?;
    let pts: Vec<_> = cfg.points.iter().map(|&z| WeightedPoint::physical(z)).collect();
    let v = out(d11_general(&pts, p), "d11_finite")?;
    let tol = T::c(1e-9) * (T::one() + v.re.abs());
    if v.im.abs() > tol {
        return Err(OverlapError::Consistency { op: "d11_finite", msg: format!("imaginary part {}", v.im) });
    }
    Ok(v.re)
}

fn d12_scaled<T: Real>(cfg: &ConfigPoint<T>, p: &EnsembleParams<T>) -> Scaled<T> {
    let m = p.big_n - 1;
    let z = &cfg.points;
    let (u, v) = (z[0], z[1].conj());
    let kk = |i: usize, j: usize| reduced_kernel(m, p, z[i].conj(), z[j], u, v);
    let k12 = kk(0, 1);
    let w1 = holo_weight(WeightedPoint::physical(z[0]), p);
    let w2 = holo_weight(WeightedPoint::physical(z[1]), p);
    let mut acc = -(g_scaled(m, p, u * v) * w1 * w2 * k12).scale_c(re(p.n / p.m()));
    let k = z.len();
    if k == 2 {
        return acc;
    }
    for &zi in &z[2..] {
        let pt = WeightedPoint::physical(zi);
        acc = acc * holo_weight(pt, p).scale_c(omega_tilde(pt, u, v, p));
    }
    let mut a = Vec::with_capacity((k - 2) * (k - 2));
    for i in 2..k {
        let ki2 = kk(i, 1);
        for j in 2..k {
            a.push((kk(i, j) * k12 - ki2 * kk(0, j)) / k12);
        }
    }
    acc * det_scaled(&a, k - 2)
}

/// Off-diagonal overlap density D₁,₂^{(N,k)}(z₁, …, z_k), complex.
pub fn d12_finite<T: Real>(cfg: &ConfigPoint<T>, p: &EnsembleParams<T>) -> Result<Cx<T>> {
    check_config(cfg.len(), p, "d12_finite", 2)?;
    out(d12_scaled(cfg, p), "d12_finite")
}

/// D₁,₂ through the decoupling identity: D₁,₁ on holomorphic points with z̄₁
/// and z̄₂ exchanged, times the explicit factor.
pub fn d12_decoupled<T: Real>(cfg: &ConfigPoint<T>, p: &EnsembleParams<T>) -> Result<Cx<T>> {
    check_config(cfg.len(), p, "d12_decoupled", 2)?;
    let z = &cfg.points;
    let (z1, z2) = (z[0], z[1]);
    let mut pts: Vec<_> = z.iter().map(|&q| WeightedPoint::physical(q)).collect();
    pts[0].zbar = z2.conj();
    pts[1].zbar = z1.conj();
    let td11 = d11_general(&pts, p);
    let one = T::one();
    let c = (re(one) + z1 * z2.conj()).norm_sqr();
    let ln_pref = (p.n + p.l + one) * (c.ln() - z1.norm_sqr().ln_1p() - z2.norm_sqr().ln_1p());
    let den = c / p.m() - (z1 - z2).norm_sqr();
    if den == T::zero() {
        return Err(crate::error::singular("d12_decoupled", "vanishing denominator"));
    }
    out((lnc(ln_pref) * td11).scale_c(re(-one / (p.m() * den))), "d12_decoupled")
}

/// Relative deviation between the two D₁,₂ routes.
pub fn decouple_check<T: Real>(cfg: &ConfigPoint<T>, p: &EnsembleParams<T>) -> Result<T> {
    let a = d12_finite(cfg, p)?;
    let b = d12_decoupled(cfg, p)?;
    let s = a.norm().max(b.norm());
    if s == T::zero() {
        return Ok(T::zero());
    }
    Ok((a - b).norm() / s)
}

// ------------------------------------------------- conditional expectations

/// E[O₁₁ | λ₁ = z] = D₁,₁^{(N,1)}(z)/R_{N,1}(z).
pub fn cond_exp_o11<T: Real>(z: Cx<T>, p: &EnsembleParams<T>) -> Result<T> {
    check_config(1, p, "cond_exp_o11", 1)?;
    let x = re(z.norm_sqr());
    let v = g_scaled(p.big_n - 1, p, x).scale_c(re(p.n)) / kn_sum(p, x);
    Ok(out(v, "cond_exp_o11")?.re)
}

/// E[O₁₂ | λ₁ = z₁, λ₂ = z₂] = D₁,₂^{(N,2)}/R_{N,2}.
pub fn cond_exp_o12<T: Real>(z1: Cx<T>, z2: Cx<T>, p: &EnsembleParams<T>) -> Result<Cx<T>> {
    ConfigPoint::new(vec![z1, z2])?;
    check_config(2, p, "cond_exp_o12", 2)?;
    let m = p.big_n - 1;
    let (u, v) = (z1, z2.conj());
    let num = -(g_scaled(m, p, u * v) * reduced_kernel(m, p, z1.conj(), z2, u, v)).scale_c(re(p.n / p.m()));
    let s = |a: Cx<T>, b: Cx<T>| kn_sum(p, a.conj() * b);
    let r2 = s(z1, z1) * s(z2, z2) - s(z1, z2) * s(z2, z1);
    if r2.is_zero() {
        return Err(crate::error::singular("cond_exp_o12", "vanishing two-point density"));
    }
    out(num / r2, "cond_exp_o12")
}

fn check_lams<T: Real>(lams: &[Cx<T>], min: usize, op: &'static str) -> Result<()> {
    if lams.len() < min {
        return Err(domain(op, format!("need at least {min} eigenvalues")));
    }
    Ok(())
}

/// Quenched E[O₁₁ | λ₁, …, λ_N].
pub fn quenched_o11<T: Real>(lams: &[Cx<T>], p: &EnsembleParams<T>) -> Result<T> {
    check_lams(lams, 1, "quenched_o11")?;
    let l1 = lams[0];
    let mut prod = T::one();
    for (k, &lk) in lams.iter().enumerate().skip(1) {
        let d = (l1 - lk).norm_sqr();
        if d == T::zero() {
            return Err(OverlapError::Degenerate { op: "quenched_o11", msg: format!("λ₁ = λ_{}", k + 1) });
        }
        prod = prod * (T::one() + (T::one() + l1.norm_sqr()) * (T::one() + lk.norm_sqr()) / (p.m() * d));
    }
    Ok(prod)
}

/// Quenched E[O₁₂ | λ₁, …, λ_N] in its product form.
pub fn quenched_o12<T: Real>(lams: &[Cx<T>], p: &EnsembleParams<T>) -> Result<Cx<T>> {
    check_lams(lams, 2, "quenched_o12")?;
    let (l1, l2) = (lams[0], lams[1]);
    let one = re(T::one());
    let d12 = (l1 - l2).norm_sqr();
    if d12 == T::zero() {
        return Err(OverlapError::Degenerate { op: "quenched_o12", msg: "λ₁ = λ₂".into() });
    }
    let mut prod = re(-T::one() / (p.m() * d12));
    for (k, &lk) in lams.iter().enumerate().skip(2) {
        let den = (l1 - lk) * (l2 - lk).conj() * p.m();
        if den.norm() == T::zero() {
            return Err(OverlapError::Degenerate { op: "quenched_o12", msg: format!("λ_{} repeats", k + 1) });
        }
        prod = prod * (one + (one + l1 * l2.conj()) * (T::one() + lk.norm_sqr()) / den);
    }
    Ok(prod)
}

/// E[O₁₂ | λ₁, …, λ_N] for O_jk = (L_j†L_k)(R_j†R_k) as sampled:
/// (1+|λ₁|²)(1+|λ₂|²) times the complex conjugate of [`quenched_o12`].
pub fn quenched_o12_chordal<T: Real>(lams: &[Cx<T>], p: &EnsembleParams<T>) -> Result<Cx<T>> {
    let q = quenched_o12(lams, p)?;
    Ok(q.conj() * ((T::one() + lams[0].norm_sqr()) * (T::one() + lams[1].norm_sqr())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(a: f64, b: f64) -> Complex<f64> {
        Complex::new(a, b)
    }

    #[test]
    fn reduced_kernel_matches_double_sum() {
        let p = EnsembleParams::new(6, 15.0, 2.5).unwrap();
        let (z, w, lam) = (c(0.4, 0.3), c(-0.2, 0.7), c(0.6, -0.1));
        let a = reduced_kernel(6, &p, z.conj(), w, lam, lam.conj()).to_c().unwrap();
        let b = gn_direct(&p, c(lam.norm_sqr(), 0.0), z.conj() / lam.conj(), w / lam).to_c().unwrap();
        assert!((a - b).norm() / b.norm() < 1e-12);
    }

    #[test]
    fn routes_agree() {
        let p = EnsembleParams::new(8, 20.0, 3.0).unwrap();
        let (z, w, lam) = (c(0.4, 0.3), c(-0.2, 0.7), c(0.6, -0.1));
        let a = k11_finite(z, w, lam, &p, KernelMethod::Direct).unwrap().value;
        let b = k11_finite(z, w, lam, &p, KernelMethod::Simplified).unwrap();
        assert!(!b.regularized);
        assert!((a - b.value).norm() / a.norm() < 1e-10);
    }

    #[test]
    fn decoupling_small() {
        let p = EnsembleParams::new(5, 9.0, 1.5).unwrap();
        let cfg = ConfigPoint::new(vec![c(0.3, 0.2), c(-0.4, 0.5), c(0.1, -0.6)]).unwrap();
        assert!(decouple_check(&cfg, &p).unwrap() < 1e-10);
    }
}
