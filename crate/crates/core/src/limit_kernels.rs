//! Scaling limits of the overlap kernels in the four regimes, the limiting
//! overlap densities, the Ψ functions of the conditional expectations and
//! finite-N convergence scans.
//!
//! Limit kernels take the conditioning pair (χ, χ̄) as two independent
//! values so that the off-diagonal structure (χ, χ̄) = (ζ₁, ζ̄₂) can reuse
//! them. Removable singularities at ζ̄ = χ̄ or η = χ are handled by Cauchy
//! averages over circles in the affected variable.

use crate::error::{domain, singular, OverlapError, Result};
use crate::finite_kernels::{d11_finite, k11_reduced, ConfigPoint};
use crate::finite_structures::EnsembleParams;
use crate::linalg::det;
use crate::scalar::{cx, re, Cx, Real};
use crate::special_functions::{calE, calF, calL_rho, mittag_leffler, L_rho, F};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeKind {
    StrongBulk,
    StrongEdge,
    Weak,
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeSide {
    Outer,
    Inner,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeSpec<T: Real> {
    pub kind: RegimeKind,
    pub a: T,
    pub b: T,
    pub edge_side: EdgeSide,
    pub theta: T,
    pub rho: T,
    pub l_fixed: T,
    pub p: T,
}

impl<T: Real> RegimeSpec<T> {
    fn blank(kind: RegimeKind) -> Self {
        RegimeSpec {
            kind,
            a: T::zero(),
            b: T::one(),
            edge_side: EdgeSide::Outer,
            theta: T::zero(),
            rho: T::one(),
            l_fixed: T::one(),
            p: T::zero(),
        }
    }

    pub fn bulk(a: T, b: T, p: T) -> Result<Self> {
        let s = RegimeSpec { a, b, p, ..Self::blank(RegimeKind::StrongBulk) };
        s.validate()?;
        Ok(s)
    }

    pub fn edge(a: T, b: T, side: EdgeSide) -> Result<Self> {
        let mut s = RegimeSpec { a, b, edge_side: side, ..Self::blank(RegimeKind::StrongEdge) };
        s.p = match side {
            EdgeSide::Outer => ((a + T::one()) / b).sqrt(),
            EdgeSide::Inner => (a / (b + T::one())).sqrt(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn weak(rho: T) -> Result<Self> {
        let s = RegimeSpec { rho, p: T::one(), ..Self::blank(RegimeKind::Weak) };
        s.validate()?;
        Ok(s)
    }

    pub fn singular(b: T, l: T) -> Result<Self> {
        let s = RegimeSpec { b, l_fixed: l, ..Self::blank(RegimeKind::Singular) };
        s.validate()?;
        Ok(s)
    }

    pub fn with_theta(mut self, theta: T) -> Self {
        self.theta = theta;
        self
    }

    /// Edge orientation 𝔰.
    pub fn sign(&self) -> T {
        if self.kind == RegimeKind::StrongEdge && self.edge_side == EdgeSide::Inner {
            -T::one()
        } else {
            T::one()
        }
    }

    /// Power of N separating the scaled D₁,₁ from its limit.
    pub fn q_exponent(&self) -> T {
        match self.kind {
            RegimeKind::StrongBulk | RegimeKind::Singular => T::one(),
            RegimeKind::StrongEdge => T::c(0.5),
            RegimeKind::Weak => T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let op = "RegimeSpec";
        match self.kind {
            RegimeKind::StrongBulk | RegimeKind::StrongEdge => {
                if !(self.a >= T::zero()) || !(self.b > T::zero()) {
                    return Err(domain(op, "need a >= 0, b > 0"));
                }
                if self.a > self.b + T::one() {
                    return Err(domain(op, "need a <= b + 1 so that n >= L"));
                }
                let r1 = (self.a / (self.b + T::one())).sqrt();
                let r2 = ((self.a + T::one()) / self.b).sqrt();
                if self.kind == RegimeKind::StrongBulk {
                    if !(self.p > r1 && self.p < r2) {
                        return Err(domain(op, format!("p = {} outside the open droplet ({r1}, {r2})", self.p)));
                    }
                } else if self.edge_side == EdgeSide::Inner && self.a == T::zero() {
                    return Err(domain(op, "no inner edge at a = 0"));
                }
            }
            RegimeKind::Weak => {
                if !(self.rho > T::zero()) {
                    return Err(domain(op, "rho must be positive"));
                }
            }
            RegimeKind::Singular => {
                if !(self.l_fixed > T::zero()) || !(self.b > T::zero()) {
                    return Err(domain(op, "need L > 0, b > 0"));
                }
            }
        }
        Ok(())
    }
}

/// (n, L) of the regime at matrix size N.
pub fn regime_to_params<T: Real>(spec: &RegimeSpec<T>, big_n: usize) -> Result<EnsembleParams<T>> {
    spec.validate()?;
    let nf = T::from_usize_(big_n);
    let (n, l) = match spec.kind {
        RegimeKind::StrongBulk | RegimeKind::StrongEdge => ((spec.b + T::one()) * nf, spec.a * nf),
        RegimeKind::Weak => {
            let n = nf * nf / (spec.rho * spec.rho);
            if n < nf {
                return Err(domain("regime_to_params", format!("weak regime needs N >= rho², got N = {big_n}")));
            }
            (n, n - nf)
        }
        RegimeKind::Singular => ((spec.b + T::one()) * nf, spec.l_fixed),
    };
    EnsembleParams::new(big_n, n, l)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DropletSpec<T: Real> {
    pub r1: T,
    pub r2: T,
    /// (n + L + 1)/N.
    pub density_scale: T,
}

impl<T: Real> DropletSpec<T> {
    /// δ_N(p).
    pub fn density_at(&self, p: T) -> T {
        self.density_scale / (T::one() + p * p).powi(2)
    }
}

pub fn droplet<T: Real>(params: &EnsembleParams<T>) -> DropletSpec<T> {
    let nf = params.nf();
    DropletSpec {
        r1: (params.l / params.n).sqrt(),
        r2: ((nf + params.l) / (params.n - nf)).sqrt(),
        density_scale: (params.n + params.l + T::one()) / nf,
    }
}

/// δ_N(p) = (n + L + 1)/N · (1 + p²)^{-2}.
pub fn delta_N<T: Real>(p: T, params: &EnsembleParams<T>) -> T {
    droplet(params).density_at(p)
}

/// z = e^{iθ}(p + 𝔰ζ/√(Nδ_N(p))).
pub fn map_point<T: Real>(spec: &RegimeSpec<T>, params: &EnsembleParams<T>, zeta: Cx<T>) -> Cx<T> {
    let s = (params.nf() * delta_N(spec.p, params)).sqrt();
    let rot = Cx::from_polar(T::one(), spec.theta);
    rot * (re(spec.p) + zeta * (spec.sign() / s))
}

/// ϖ(ζ, η|χ, χ̄) = √(1 + (ζ̄ − χ̄)(ζ − χ)) · √(1 + (η̄ − χ̄)(η − χ)).
pub fn varpi_limit<T: Real>(zeta: Cx<T>, eta: Cx<T>, chi: Cx<T>) -> Cx<T> {
    let one = re(T::one());
    let a = one + (zeta - chi).conj() * (zeta - chi);
    let b = one + (eta - chi).conj() * (eta - chi);
    a.sqrt() * b.sqrt()
}

// ------------------------------------------------------- building blocks

fn s2pi<T: Real>() -> T {
    (T::c(2.0) * T::PI()).sqrt()
}

fn gauss<T: Real>(x: Cx<T>) -> Cx<T> {
    (-(x * x) * T::c(0.5)).exp()
}

/// 𝔠_𝔰.
pub fn c_s<T: Real>(a: T, b: T, side: EdgeSide) -> T {
    let num = a + b + T::one();
    let den = match side {
        EdgeSide::Outer => T::c(2.0) * T::PI() * (a + T::one()) * b,
        EdgeSide::Inner => T::c(2.0) * T::PI() * a * (b + T::one()),
    };
    (num / den).sqrt()
}

/// Bulk front factor b(b+1)/(a+b+1) · (p² − a/(b+1))((a+1)/b − p²)/p².
pub fn bulk_prefactor<T: Real>(a: T, b: T, p: T) -> T {
    let p2 = p * p;
    b * (b + T::one()) / (a + b + T::one()) * (p2 - a / (b + T::one())) * ((a + T::one()) / b - p2) / p2
}

/// H(a, b, c, d, f), with the derivative in x expanded analytically.
pub fn edge_H<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>, f: Cx<T>) -> Result<Cx<T>> {
    let cf = calF(a)?;
    if cf.norm() < T::min_positive_value().sqrt() {
        return Err(singular("edge_H", "𝓕(a) = 0"));
    }
    let ef = (-f).exp();
    let (fa, fb, fc, fd) = (F(a)?, F(b)?, F(c)?, F(d)?);
    let first = a * (ef * fb * fc - fd * fa + f * fd * fa) * s2pi::<T>();
    let second = ef * gauss(b) * fc + ef * gauss(c) * fb - gauss(d) * fa - gauss(a) * fd + f * gauss(a) * fd;
    Ok(-(first - second) / cf)
}

/// 𝓐_ρ(a, b, c, d, f).
pub fn weak_A<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>, f: Cx<T>, rho: T) -> Result<Cx<T>> {
    let r = re(rho / T::SQRT_2());
    let one = re(T::one());
    Ok((r + a) * (r - a) * (f.exp() * (f - one) * L_rho(a, rho)? * L_rho(d, rho)? + L_rho(b, rho)? * L_rho(c, rho)?))
}

/// 𝓑_ρ(a, b, c).
pub fn weak_B<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, rho: T) -> Result<Cx<T>> {
    let r = re(rho / T::SQRT_2());
    Ok(L_rho(b, rho)? * ((a + r) * gauss(c - r) - (a - r) * gauss(c + r)) / s2pi::<T>())
}

/// 𝓒_ρ(a, b).
pub fn weak_C<T: Real>(a: Cx<T>, b: Cx<T>, rho: T) -> Result<Cx<T>> {
    let r = re(rho / T::SQRT_2());
    let tp = T::c(2.0) * T::PI();
    Ok((gauss(a - r) * gauss(b + r) + gauss(a + r) * gauss(b - r)) / tp)
}

/// 𝓗_ρ(a, b, c, d, f).
pub fn weak_H<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>, f: Cx<T>, rho: T) -> Result<Cx<T>> {
    let ef = f.exp();
    let bda = weak_B(a, d, a, rho)?;
    Ok(weak_A(a, b, c, d, f, rho)? + weak_B(a, b, c, rho)? + weak_B(a, c, b, rho)? + f * ef * bda - ef * bda
        - ef * weak_B(a, a, d, rho)?
        + weak_C(b, c, rho)?
        - ef * weak_C(a, d, rho)?)
}

/// 𝓢_L(a, b, c, d, f) with a = ζ̄χ, b = χ̄η, c = ζ̄η, d = χ̄χ and
/// f = (ζ̄ − χ̄)(η − χ). The f-linear term pairs with E_{1,L+1}(c).
pub fn singular_S<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>, f: Cx<T>, l: T) -> Result<Cx<T>> {
    let e = |u: Cx<T>| mittag_leffler(T::one(), l + T::one(), u);
    let (ea, eb, ec, ed) = (e(a)?, e(b)?, e(c)?, e(d)?);
    let one = re(T::one());
    let rg = crate::special_functions::rgam(l);
    Ok((d - l) * (ea * eb - (one - f) * ec * ed) + (ea + eb - ec - ed + f * ec) * rg)
}

// ------------------------------------------------------- reduced kernels

fn bulk_reduced<T: Real>(f: Cx<T>) -> Cx<T> {
    let one = re(T::one());
    if f.norm() < T::c(0.5) {
        // Σ (k+1) f^k/(k+2)!
        let mut term = re(T::c(0.5));
        let mut acc = term;
        for k in 1..40 {
            let kf = T::from_usize_(k);
            term = term * f * (kf + T::one()) / (kf * (kf + T::c(2.0)));
            acc = acc + term;
            if term.norm() < T::epsilon() * acc.norm() {
                break;
            }
        }
        acc
    } else {
        ((f - one) * f.exp() + one) / (f * f)
    }
}

const REG_RADIUS: f64 = 0.1;
const CIRCLE_R: f64 = 0.5;
const CIRCLE_NODES: usize = 48;

/// Evaluates g(s, t) where s = ζ̄ − χ̄, t = η − χ, replacing either variable
/// by its Cauchy mean over a circle when it is small.
fn cauchy_regular<T: Real, G>(s: Cx<T>, t: Cx<T>, g: &G) -> Result<(Cx<T>, bool)>
where
    G: Fn(Cx<T>, Cx<T>) -> Result<Cx<T>>,
{
    let small = T::c(REG_RADIUS);
    let nodes: Vec<Cx<T>> = (0..CIRCLE_NODES)
        .map(|k| {
            let th = T::c(2.0) * T::PI() * T::from_usize_(k) / T::from_usize_(CIRCLE_NODES);
            Cx::from_polar(T::c(CIRCLE_R), th)
        })
        .collect();
    let ns = T::from_usize_(CIRCLE_NODES);
    let s_list: Vec<Cx<T>> = if s.norm() < small { nodes.iter().map(|&e| s + e).collect() } else { vec![s] };
    let t_list: Vec<Cx<T>> = if t.norm() < small { nodes.iter().map(|&e| t + e).collect() } else { vec![t] };
    let reg = s_list.len() > 1 || t_list.len() > 1;
    let mut acc = re(T::zero());
    for &ss in &s_list {
        for &tt in &t_list {
            acc = acc + g(ss, tt)?;
        }
    }
    let count = (if s_list.len() > 1 { ns } else { T::one() }) * (if t_list.len() > 1 { ns } else { T::one() });
    Ok((acc / count, reg))
}

/// Reduced limit kernel 𝒦^{(∗)}(ζ̄, η|χ, χ̄) of the regime.
pub fn reduced_limit<T: Real>(spec: &RegimeSpec<T>, zb: Cx<T>, eta: Cx<T>, chi: Cx<T>, chib: Cx<T>) -> Result<Cx<T>> {
    let s = zb - chib;
    let t = eta - chi;
    match spec.kind {
        RegimeKind::StrongBulk => Ok(bulk_reduced(s * t)),
        RegimeKind::StrongEdge => {
            let a = chib + chi;
            let g = |s: Cx<T>, t: Cx<T>| {
                let (zb, eta) = (chib + s, chi + t);
                let f = s * t;
                Ok((zb * eta).exp() * edge_H(a, zb + chi, chib + eta, zb + eta, f)? / (f * f))
            };
            Ok(cauchy_regular(s, t, &g)?.0)
        }
        RegimeKind::Weak => {
            let rho = spec.rho;
            let a = chib + chi;
            let la = calL_rho(a, rho)?;
            if la.norm() == T::zero() {
                return Err(singular("reduced_limit", "𝓛_ρ(χ + χ̄) = 0"));
            }
            let g = |s: Cx<T>, t: Cx<T>| {
                let (zb, eta) = (chib + s, chi + t);
                let f = s * t;
                Ok(weak_H(a, zb + chi, chib + eta, zb + eta, f, rho)? / (f * f * la))
            };
            Ok(cauchy_regular(s, t, &g)?.0)
        }
        RegimeKind::Singular => {
            let l = spec.l_fixed;
            let x = chib * chi;
            let den = calE(l, x, x)?;
            if den.norm() == T::zero() {
                return Err(singular("reduced_limit", "𝓔(χ̄χ|χ̄χ) = 0"));
            }
            let g = |s: Cx<T>, t: Cx<T>| {
                let (zb, eta) = (chib + s, chi + t);
                let f = s * t;
                Ok(singular_S(zb * chi, chib * eta, zb * eta, x, f, l)? / (f * f * den))
            };
            Ok(cauchy_regular(s, t, &g)?.0)
        }
    }
}

/// Diagonal weight factor of a point ζ in the limit kernels, relative to the
/// conditioning (χ, χ̄): ϖ-part times the regime's Gaussian weight.
fn point_factor<T: Real>(spec: &RegimeSpec<T>, zeta: Cx<T>, chi: Cx<T>, chib: Cx<T>) -> Cx<T> {
    let one = re(T::one());
    let f = (zeta.conj() - chib) * (zeta - chi);
    let r2 = zeta.norm_sqr();
    let w = match spec.kind {
        RegimeKind::StrongBulk | RegimeKind::Weak => (-f).exp(),
        RegimeKind::StrongEdge => re((-r2).exp()),
        RegimeKind::Singular => re(sing_radial(r2, spec.l_fixed) * (-r2).exp()),
    };
    (one + f) * w
}

fn sing_radial<T: Real>(r2: T, l: T) -> T {
    if r2 == T::zero() {
        if l == T::zero() {
            T::one()
        } else {
            T::zero()
        }
    } else {
        r2.powf(l)
    }
}

/// K₁,₁ limit at physical ζ, η, χ in the regime's natural weight.
pub fn K11_limit<T: Real>(spec: &RegimeSpec<T>, zeta: Cx<T>, eta: Cx<T>, chi: Cx<T>) -> Result<Cx<T>> {
    let k = reduced_limit(spec, zeta.conj(), eta, chi, chi.conj())?;
    let vp = varpi_limit(zeta, eta, chi);
    let h = T::c(0.5);
    let w = match spec.kind {
        RegimeKind::StrongBulk | RegimeKind::Weak => re((-((zeta - chi).norm_sqr() + (eta - chi).norm_sqr()) * h).exp()),
        RegimeKind::StrongEdge => re((-(zeta.norm_sqr() + eta.norm_sqr()) * h).exp()),
        RegimeKind::Singular => {
            let u = zeta.conj() * eta;
            let pw = if u.norm() == T::zero() { re(T::zero()) } else { (u.ln() * spec.l_fixed).exp() };
            pw * (-(zeta.norm_sqr() + eta.norm_sqr()) * h).exp()
        }
    };
    Ok(k * vp * w)
}

pub fn K11_bulk<T: Real>(zeta: Cx<T>, eta: Cx<T>, chi: Cx<T>) -> Result<Cx<T>> {
    let spec = RegimeSpec { ..RegimeSpec::blank(RegimeKind::StrongBulk) };
    K11_limit(&spec, zeta, eta, chi)
}

pub fn K11_edge<T: Real>(zeta: Cx<T>, eta: Cx<T>, chi: Cx<T>) -> Result<Cx<T>> {
    K11_limit(&RegimeSpec::blank(RegimeKind::StrongEdge), zeta, eta, chi)
}

pub fn K11_weak<T: Real>(zeta: Cx<T>, eta: Cx<T>, chi: Cx<T>, rho: T) -> Result<Cx<T>> {
    K11_limit(&RegimeSpec::weak(rho)?, zeta, eta, chi)
}

pub fn K11_singular<T: Real>(zeta: Cx<T>, eta: Cx<T>, chi: Cx<T>, l: T) -> Result<Cx<T>> {
    K11_limit(&RegimeSpec::singular(T::one(), l)?, zeta, eta, chi)
}

// ------------------------------------------------------------ D limits

fn check_cfg<T: Real>(cfg: &ConfigPoint<T>, min: usize, op: &'static str) -> Result<()> {
    if cfg.len() < min {
        return Err(domain(op, format!("need at least {min} points")));
    }
    Ok(())
}

/// Limit of D₁,₁^{(N,k)}/((Nδ_N)^k N^q).
pub fn D11_limit<T: Real>(spec: &RegimeSpec<T>, cfg: &ConfigPoint<T>) -> Result<T> {
    check_cfg(cfg, 1, "D11_limit")?;
    let z = &cfg.points;
    let (chi, chib) = (z[0], z[0].conj());
    let z2 = z[0].norm_sqr();
    let pref = match spec.kind {
        RegimeKind::StrongBulk => re(bulk_prefactor(spec.a, spec.b, spec.p)),
        RegimeKind::StrongEdge => calF(chi + chib)? * c_s(spec.a, spec.b, spec.edge_side),
        RegimeKind::Weak => calL_rho(chi + chib, spec.rho)?,
        RegimeKind::Singular => {
            let l = spec.l_fixed;
            if z2 == T::zero() {
                return Err(singular("D11_limit", "ζ₁ = 0 in the singular regime"));
            }
            calE(l, re(z2), re(z2))? * (z2.powf(l - T::one()) * (-z2).exp())
        }
    };
    let k = z.len() - 1;
    let mut v = pref;
    if k > 0 {
        let mut a = Vec::with_capacity(k * k);
        for i in 1..=k {
            let gi = point_factor(spec, z[i], chi, chib);
            v = v * gi;
            for j in 1..=k {
                a.push(reduced_limit(spec, z[i].conj(), z[j], chi, chib)?);
            }
        }
        v = v * det(a, k);
    }
    if v.im.abs() > T::c(1e-8) * (T::one() + v.re.abs()) {
        return Err(OverlapError::Consistency { op: "D11_limit", msg: format!("imaginary part {}", v.im) });
    }
    Ok(v.re)
}

/// Limit of D₁,₂^{(N,k)}/((Nδ_N)^k N^q).
pub fn D12_limit<T: Real>(spec: &RegimeSpec<T>, cfg: &ConfigPoint<T>) -> Result<Cx<T>> {
    check_cfg(cfg, 2, "D12_limit")?;
    let z = &cfg.points;
    let (chi, chib) = (z[0], z[1].conj());
    let kk = |i: usize, j: usize| reduced_limit(spec, z[i].conj(), z[j], chi, chib);
    let k12 = kk(0, 1)?;
    let one = T::one();
    let pp = (one + spec.p * spec.p).powi(2);
    let pref = match spec.kind {
        RegimeKind::StrongBulk => -k12 * (bulk_prefactor(spec.a, spec.b, spec.p) / pp),
        RegimeKind::StrongEdge => {
            let d2 = (z[0] - z[1]).norm_sqr();
            -calF(chi + chib)? * (-(z[0].conj() * z[1])).exp() * k12 * ((-d2).exp() * c_s(spec.a, spec.b, spec.edge_side) / pp)
        }
        RegimeKind::Weak => -calL_rho(chi + chib, spec.rho)? * k12 / pp,
        RegimeKind::Singular => {
            let l = spec.l_fixed;
            let x = chi * chib;
            if x.norm() == T::zero() {
                return Err(singular("D12_limit", "ζ₁ζ̄₂ = 0 in the singular regime"));
            }
            let (a2, b2) = (z[0].norm_sqr(), z[1].norm_sqr());
            -calE(l, x, x)? / x * k12 * (a2.powf(l) * b2.powf(l) * (-(a2 + b2)).exp())
        }
    };
    let m = z.len() - 2;
    if m == 0 {
        return Ok(pref);
    }
    if k12.norm() == T::zero() {
        return Err(singular("D12_limit", "𝒦(ζ̄₁, ζ₂) = 0"));
    }
    let mut v = pref;
    let mut a = Vec::with_capacity(m * m);
    for i in 2..z.len() {
        v = v * point_factor(spec, z[i], chi, chib);
        let ki2 = kk(i, 1)?;
        for j in 2..z.len() {
            a.push((kk(i, j)? * k12 - ki2 * kk(0, j)?) / k12);
        }
    }
    Ok(v * det(a, m))
}

pub fn D11_bulk<T: Real>(cfg: &ConfigPoint<T>, a: T, b: T, p: T) -> Result<T> {
    D11_limit(&RegimeSpec::bulk(a, b, p)?, cfg)
}

pub fn D12_bulk<T: Real>(cfg: &ConfigPoint<T>, a: T, b: T, p: T) -> Result<Cx<T>> {
    D12_limit(&RegimeSpec::bulk(a, b, p)?, cfg)
}

pub fn D11_edge<T: Real>(cfg: &ConfigPoint<T>, spec: &RegimeSpec<T>) -> Result<T> {
    if spec.kind != RegimeKind::StrongEdge {
        return Err(domain("D11_edge", "spec must be StrongEdge"));
    }
    D11_limit(spec, cfg)
}

pub fn D12_edge<T: Real>(cfg: &ConfigPoint<T>, spec: &RegimeSpec<T>) -> Result<Cx<T>> {
    if spec.kind != RegimeKind::StrongEdge {
        return Err(domain("D12_edge", "spec must be StrongEdge"));
    }
    D12_limit(spec, cfg)
}

pub fn D11_weak<T: Real>(cfg: &ConfigPoint<T>, rho: T) -> Result<T> {
    D11_limit(&RegimeSpec::weak(rho)?, cfg)
}

pub fn D12_weak<T: Real>(cfg: &ConfigPoint<T>, rho: T) -> Result<Cx<T>> {
    D12_limit(&RegimeSpec::weak(rho)?, cfg)
}

pub fn D11_singular<T: Real>(cfg: &ConfigPoint<T>, l: T) -> Result<T> {
    D11_limit(&RegimeSpec::singular(T::one(), l)?, cfg)
}

pub fn D12_singular<T: Real>(cfg: &ConfigPoint<T>, l: T) -> Result<Cx<T>> {
    D12_limit(&RegimeSpec::singular(T::one(), l)?, cfg)
}

// ------------------------------------------------------------------ Ψ

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiKind {
    Bulk12,
    Edge11,
    Edge12,
    Weak11,
    Weak12,
    Sing11,
    Sing12,
}

/// Limit functions of the conditional overlap expectations. Single-argument
/// kinds take `[z]`; the two-point kinds take `[a, b, c, d, f]`. `rho` and
/// `l` are read only by the weak and singular kinds.
pub fn psi<T: Real>(kind: PsiKind, args: &[Cx<T>], rho: T, l: T) -> Result<Cx<T>> {
    let need = match kind {
        PsiKind::Bulk12 | PsiKind::Edge11 | PsiKind::Weak11 | PsiKind::Sing11 => 1,
        _ => 5,
    };
    if args.len() != need {
        return Err(domain("psi", format!("{kind:?} takes {need} arguments")));
    }
    let one = re(T::one());
    match kind {
        PsiKind::Bulk12 => {
            let s = args[0].norm_sqr();
            if s == T::zero() {
                return Err(singular("psi", "Ψ₁,₂ᵇ at z = 0"));
            }
            let ratio = if s < T::c(0.1) {
                // (1 − (1+s)e^{-s})/(1 − e^{-s}) by series
                let mut num = T::zero();
                let mut den = T::zero();
                let mut t = T::one();
                for k in 1..30 {
                    let kf = T::from_usize_(k);
                    t = t * (-s) / kf;
                    den = den - t;
                    if k >= 2 {
                        num = num + t * (kf - T::one());
                    }
                }
                num / den
            } else {
                let e = (-s).exp();
                (T::one() - (T::one() + s) * e) / (T::one() - e)
            };
            Ok(re(ratio / (s * s)))
        }
        PsiKind::Edge11 => Ok(calF(args[0])? / F(args[0])?),
        PsiKind::Weak11 => Ok(calL_rho(args[0], rho)? / L_rho(args[0], rho)?),
        PsiKind::Sing11 => {
            let x = re(args[0].norm_sqr());
            let e = mittag_leffler(T::one(), T::one() + l, x)?;
            Ok(calE(l, x, x)? / (x * e))
        }
        PsiKind::Edge12 => {
            let [a, b, c, d, f] = [args[0], args[1], args[2], args[3], args[4]];
            let f2 = f.norm_sqr();
            let e = (-f2).exp();
            let h = edge_H(a, b, c, d, re(-f2))?;
            Ok(-(h * e * calF(a)?) / ((F(b)? * F(c)? - F(a)? * F(d)? * e) * (f2 * f2)))
        }
        PsiKind::Weak12 => {
            let [a, b, c, d, f] = [args[0], args[1], args[2], args[3], args[4]];
            let f2 = f.norm_sqr();
            let e = (-f2).exp();
            let h = weak_H(a, b, c, d, re(-f2), rho)?;
            let lr = |u| L_rho(u, rho);
            Ok(-h / ((lr(b)? * lr(c)? - lr(a)? * lr(d)? * e) * (f2 * f2)))
        }
        PsiKind::Sing12 => {
            let [a, b, c, d, f] = [args[0], args[1], args[2], args[3], args[4]];
            let f2 = f.norm_sqr();
            let s = singular_S(a, b, c, d, re(-f2), l)?;
            let e = |u| mittag_leffler(T::one(), T::one() + l, u);
            let _ = one;
            Ok(-s / (a * f2 * (e(b)? * e(c)? - e(a)? * e(d)?)))
        }
    }
}

// --------------------------------------------------------------- scans

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow<T: Real> {
    pub big_n: usize,
    pub sup_err: T,
}

/// Five sample points used by the default kernel scans.
pub fn default_grid<T: Real>() -> Vec<Cx<T>> {
    [(-0.5, 0.2), (-0.25, -0.3), (0.0, 0.1), (0.25, 0.35), (0.5, -0.15)]
        .iter()
        .map(|&(x, y)| cx(T::c(0.5 * x), T::c(0.5 * y)))
        .collect()
}

/// Default conditioning point χ for the kernel scan of a regime.
pub fn default_chi<T: Real>(kind: RegimeKind) -> Cx<T> {
    match kind {
        RegimeKind::StrongBulk => cx(T::zero(), T::zero()),
        RegimeKind::StrongEdge => cx(T::c(-0.3), T::c(0.2)),
        RegimeKind::Weak => cx(T::c(0.2), T::c(0.1)),
        RegimeKind::Singular => cx(T::c(0.6), T::c(0.3)),
    }
}

/// sup over ζ, η ∈ grid of | |K₁,₁^{(N)}(z, w|λ)|/(Nδ_N) − |K₁,₁^{lim}(ζ, η|χ)| |
/// at the mapped points, for each N in the ladder. Moduli are compared since
/// the finite kernel carries a phase cocycle.
pub fn kernel_scan<T: Real>(spec: &RegimeSpec<T>, ns: &[usize], grid: &[Cx<T>], chi: Cx<T>) -> Result<Vec<ScanRow<T>>> {
    let mut lim = Vec::with_capacity(grid.len() * grid.len());
    for &ze in grid {
        for &et in grid {
            lim.push(K11_limit(spec, ze, et, chi)?.norm());
        }
    }
    ns.iter()
        .map(|&big_n| {
            let params = regime_to_params(spec, big_n)?;
            let nd = params.nf() * delta_N(spec.p, &params);
            let lam = map_point(spec, &params, chi);
            let errs: Vec<Result<T>> = (0..grid.len() * grid.len())
                .into_par_iter()
                .map(|idx| {
                    let (i, j) = (idx / grid.len(), idx % grid.len());
                    let z = map_point(spec, &params, grid[i]);
                    let w = map_point(spec, &params, grid[j]);
                    let k = k11_reduced(big_n - 1, z, w, lam, &params)?;
                    Ok((k.norm() / nd - lim[idx]).abs())
                })
                .collect();
            let mut sup = T::zero();
            for e in errs {
                sup = sup.max(e?);
            }
            Ok(ScanRow { big_n, sup_err: sup })
        })
        .collect()
}

/// sup over ζ ∈ points of |D₁,₁^{(N,1)}/(Nδ_N N^q) − D₁,₁^{lim}(ζ)|.
pub fn d11_scan<T: Real>(spec: &RegimeSpec<T>, ns: &[usize], points: &[Cx<T>]) -> Result<Vec<ScanRow<T>>> {
    let mut lim = Vec::with_capacity(points.len());
    for &ze in points {
        lim.push(D11_limit(spec, &ConfigPoint::new(vec![ze])?)?);
    }
    ns.iter()
        .map(|&big_n| {
            let params = regime_to_params(spec, big_n)?;
            let nd = params.nf() * delta_N(spec.p, &params);
            let scale = nd * params.nf().powf(spec.q_exponent());
            let mut sup = T::zero();
            for (i, &ze) in points.iter().enumerate() {
                let z = map_point(spec, &params, ze);
                let d = d11_finite(&ConfigPoint::new(vec![z])?, &params)?;
                sup = sup.max((d / scale - lim[i]).abs());
            }
            Ok(ScanRow { big_n, sup_err: sup })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn parameter_maps() {
        let p = regime_to_params(&RegimeSpec::bulk(1.0, 1.0, 1.0).unwrap(), 10).unwrap();
        assert_eq!((p.n, p.l), (20.0, 10.0));
        let p = regime_to_params(&RegimeSpec::weak(2.0).unwrap(), 8).unwrap();
        assert_eq!((p.n, p.l), (16.0, 8.0));
        let p = regime_to_params(&RegimeSpec::singular(1.0, 2.5).unwrap(), 10).unwrap();
        assert_eq!((p.n, p.l), (20.0, 2.5));
        assert!(regime_to_params(&RegimeSpec::weak(4.0).unwrap(), 8).is_err());
    }

    #[test]
    fn front_factors() {
        assert!((bulk_prefactor(0.0f64, 1.0, 0.5f64.sqrt()) - 0.5).abs() < 1e-15);
        assert!((c_s(0.0f64, 1.0, EdgeSide::Outer) - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
        let psi0 = psi(PsiKind::Edge11, &[Complex::new(0.0f64, 0.0)], 1.0, 1.0).unwrap();
        assert!((psi0.re - 2.0).abs() < 1e-14);
    }
}
