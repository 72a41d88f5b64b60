//! Deformed-weight orthogonal polynomials and the auxiliary families g, q,
//! q̂ and ĝ.

use crate::error::{domain, singular, OverlapError, Result};
use crate::scalar::{re, Cx, Real};
use crate::scaled::Scaled;
use crate::special_functions::lgam;

/// Matrix size N together with the real parameters n and L.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleParams<T: Real> {
    pub big_n: usize,
    pub n: T,
    pub l: T,
}

impl<T: Real> EnsembleParams<T> {
    pub fn new(big_n: usize, n: T, l: T) -> Result<Self> {
        if big_n == 0 {
            return Err(domain("EnsembleParams", "N must be positive"));
        }
        if !(l >= T::zero()) || !(n >= l) || !(n >= T::from_usize_(big_n)) {
            return Err(domain(
                "EnsembleParams",
                format!("need n >= N, n >= L, L >= 0; got N={big_n}, n={n}, L={l}"),
            ));
        }
        Ok(EnsembleParams { big_n, n, l })
    }

    pub fn nf(&self) -> T {
        T::from_usize_(self.big_n)
    }

    /// n + L.
    pub fn m(&self) -> T {
        self.n + self.l
    }

    /// ln C(n+L, L) = ln g_0.
    pub fn ln_g0(&self) -> T {
        lgam(self.n + self.l + T::one()) - lgam(self.l + T::one()) - lgam(self.n + T::one())
    }

    /// ln of the radial moment ∫|z|^{2k} e^{-NQ} dA.
    pub fn ln_moment(&self, k: T) -> T {
        lgam(k + self.l + T::one()) + lgam(self.n - k) - lgam(self.n + self.l + T::one())
    }

    /// Γ(L+n+1)/(Γ(n+1)Γ(L)), zero at L = 0.
    pub fn c0(&self) -> T {
        if self.l == T::zero() {
            T::zero()
        } else {
            (lgam(self.n + self.l + T::one()) - lgam(self.n + T::one()) - lgam(self.l)).exp()
        }
    }
}

/// Pivots of the tridiagonal moment matrix, LDU factors stored as the
/// coefficients of a (superdiagonal) and ā (subdiagonal).
#[derive(Clone, Debug, PartialEq)]
pub struct LduFactors<T: Real> {
    pub d: Vec<T>,
    pub ell: Vec<T>,
    pub u: Vec<T>,
    pub x: T,
}

/// Monic polynomials P_k(z|a, ā) with norms h_k.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFamily<T: Real> {
    pub base_point: Cx<T>,
    pub degree: usize,
    /// `coeffs[k][j]` is the coefficient of z^j in P_k.
    pub coeffs: Vec<Vec<Cx<T>>>,
    pub norms: Vec<T>,
}

impl<T: Real> PolyFamily<T> {
    pub fn eval_p(&self, k: usize, z: Cx<T>) -> Cx<T> {
        self.coeffs[k].iter().rev().fold(re(T::zero()), |acc, &c| acc * z + c)
    }

    /// Coefficients of Q_k, i.e. P_k with a and ā exchanged.
    pub fn q_coeffs(&self, k: usize) -> Vec<Cx<T>> {
        let a = self.base_point;
        let ac = a.conj();
        self.coeffs[k]
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let p = (k - j) as i32;
                if a.norm() == T::zero() {
                    c
                } else {
                    c / a.powi(p) * ac.powi(p)
                }
            })
            .collect()
    }

    /// Q_k evaluated at the antiholomorphic variable z̄.
    pub fn eval_q(&self, k: usize, zbar: Cx<T>) -> Cx<T> {
        self.q_coeffs(k).iter().rev().fold(re(T::zero()), |acc, &c| acc * zbar + c)
    }
}

/// Pivot sequence d_0..d_{count-1} for complex x = aā.
pub fn pivots<T: Real>(p: &EnsembleParams<T>, x: Cx<T>, count: usize) -> Vec<Cx<T>> {
    let (n, l) = (p.n, p.l);
    let mut d: Vec<Cx<T>> = Vec::with_capacity(count);
    for q in 0..count {
        let qf = T::from_usize_(q);
        let v = if q == 0 {
            x * n + l + T::c(2.0)
        } else {
            -x * ((qf + l) * (n - qf - T::one())) / d[q - 1] + qf + l + T::c(2.0) + x * (n - qf)
        };
        d.push(v);
    }
    d
}

/// g_m(x) through the pivot product g_{p+1} = g_p d_p/(L+p+1). Regular at
/// x = 0 and x = L/n.
pub fn g_scaled<T: Real>(m: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Scaled<T> {
    let d = pivots(p, x, m);
    let mut g = Scaled::from_log(p.ln_g0(), T::zero());
    for (q, dq) in d.iter().enumerate() {
        g = g.scale_c(*dq / (p.l + T::from_usize_(q) + T::one()));
    }
    g
}

/// All of g_0..g_m via pivots.
pub fn g_all_scaled<T: Real>(m: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Vec<Scaled<T>> {
    let d = pivots(p, x, m);
    let mut g = Scaled::from_log(p.ln_g0(), T::zero());
    let mut out = vec![g];
    for (q, dq) in d.iter().enumerate() {
        g = g.scale_c(*dq / (p.l + T::from_usize_(q) + T::one()));
        out.push(g);
    }
    out
}

fn to_c<T: Real>(s: Scaled<T>, op: &'static str) -> Result<Cx<T>> {
    s.to_c().ok_or(OverlapError::Overflow { op })
}

/// Σ_{k<=deg} C_k y^k with C_k = Γ(n+L+1)/(Γ(k+L+1)Γ(n+1-k)), scaled.
pub fn q_scaled<T: Real>(deg: usize, p: &EnsembleParams<T>, y: Cx<T>) -> Scaled<T> {
    let (n, l) = (p.n, p.l);
    let mut term = Scaled::from_log(p.ln_g0(), T::zero());
    let mut acc = Scaled::zero();
    for k in 0..=deg {
        acc = acc + term;
        if k == deg {
            break;
        }
        let kf = T::from_usize_(k);
        term = term.scale_c(y * ((n - kf) / (kf + l + T::one())));
    }
    acc
}

/// Pivot-based g_m evaluated in plain arithmetic.
pub fn g_pivot<T: Real>(m: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Result<Cx<T>> {
    to_c(g_scaled(m, p, x), "g_pivot")
}

/// g_m(x) by its defining finite sum. Singular at x = 0.
pub fn eval_g<T: Real>(m: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Result<Cx<T>> {
    if x.norm() == T::zero() {
        return Err(singular("eval_g", "x = 0"));
    }
    let (n, l) = (p.n, p.l);
    let mf = T::from_usize_(m);
    // Σ (m+1-k) C(L+n, L+k) x^k, term ratio x (n-k)/(k+L+1).
    let c0 = Scaled::from_log(p.ln_g0(), T::zero());
    let mut t = Scaled::one();
    let mut s = Scaled::zero();
    for k in 0..=m {
        let kf = T::from_usize_(k);
        s = s + t.scale_c(re(mf + T::one() - kf));
        t = t.scale_c(x * ((n - kf) / (kf + l + T::one())));
    }
    let s = s * c0;
    let first = s.scale_c((x - l / n) / x);
    let second = c0.scale_c(re(l * (mf + T::one())) / (x * n));
    to_c(first + second, "eval_g")
}

/// q_deg(x).
pub fn eval_q<T: Real>(deg: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Result<Cx<T>> {
    if T::from_usize_(deg) > p.n {
        return Err(domain("eval_q", format!("degree {deg} exceeds n = {}", p.n)));
    }
    to_c(q_scaled(deg, p, x), "eval_q")
}

/// q̂_deg(y|x), scaled.
pub fn qhat_scaled<T: Real>(deg: usize, p: &EnsembleParams<T>, y: Cx<T>, x: Cx<T>) -> Result<Scaled<T>> {
    let q = q_scaled(deg, p, y);
    if p.l == T::zero() {
        return Ok(q);
    }
    let den = x * p.n - p.l;
    if den.norm() < T::c(1e-12) {
        return Err(singular("eval_qhat", "nx = L"));
    }
    let corr = Scaled::from_log(lgam(p.n + p.l + T::one()) - lgam(p.n + T::one()) - lgam(p.l), T::zero());
    Ok(q + corr.scale_c(re(T::one()) / den))
}

/// q̂_deg(y|x) = q_deg(y) + Γ(L+n+1)/((nx−L)Γ(n+1)Γ(L)).
pub fn eval_qhat<T: Real>(deg: usize, p: &EnsembleParams<T>, y: Cx<T>, x: Cx<T>) -> Result<Cx<T>> {
    if T::from_usize_(deg) > p.n {
        return Err(domain("eval_qhat", format!("degree {deg} exceeds n = {}", p.n)));
    }
    to_c(qhat_scaled(deg, p, y, x)?, "eval_qhat")
}

/// ĝ_deg(x), scaled.
pub fn ghat_scaled<T: Real>(deg: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Result<Scaled<T>> {
    let df = T::from_usize_(deg);
    let a = qhat_scaled(deg + 1, p, x, x)?.scale_c(re(p.l + df + T::one()));
    let b = qhat_scaled(deg, p, x, x)?.scale_c(x * (p.n - df - T::one()));
    Ok(a - b)
}

/// ĝ_deg(x) = (L+deg+1) q̂_{deg+1}(x|x) − x(n−deg−1) q̂_deg(x|x).
pub fn eval_ghat<T: Real>(deg: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Result<Cx<T>> {
    to_c(ghat_scaled(deg, p, x)?, "eval_ghat")
}

/// Entry (i, j) of the moment matrix of the deformed weight at base point a.
pub fn moment_entry<T: Real>(i: usize, j: usize, p: &EnsembleParams<T>, a: Cx<T>) -> Result<Cx<T>> {
    let (n, l) = (p.n, p.l);
    let fi = T::from_usize_(i);
    if fi > n - T::c(2.0) {
        return Err(domain("moment_entry", format!("row {i} outside the index band")));
    }
    let pre = (lgam(n - fi - T::one()) + lgam(fi + l + T::one()) - lgam(n + l + T::one())).exp();
    let x = a.norm_sqr();
    let mu = if i == j {
        re(fi + l + T::c(2.0) + (n - fi) * x)
    } else if j == i + 1 {
        -a * (fi + l + T::one())
    } else if i == j + 1 {
        -a.conj() * (n - fi - T::one())
    } else {
        re(T::zero())
    };
    Ok(mu * pre)
}

/// LDU factors of the tridiagonal moment matrix for x = |a|².
pub fn ldu_decompose<T: Real>(depth: usize, p: &EnsembleParams<T>, x: T) -> Result<LduFactors<T>> {
    if T::from_usize_(depth) > p.n - T::c(2.0) + T::one() {
        return Err(domain("ldu_decompose", format!("depth {depth} exceeds n-1")));
    }
    let d: Vec<T> = pivots(p, re(x), depth).into_iter().map(|z| z.re).collect();
    let mut ell = Vec::with_capacity(depth);
    let mut u = Vec::with_capacity(depth);
    for (q, &dq) in d.iter().enumerate() {
        if !(dq > T::zero()) {
            return Err(OverlapError::Breakdown { op: "ldu_decompose", msg: format!("pivot d_{q} = {dq}") });
        }
        let qf = T::from_usize_(q);
        u.push(-(qf + p.l + T::one()) / dq);
        ell.push(-(p.n - qf - T::c(2.0)) / dq);
    }
    Ok(LduFactors { d, ell, u, x })
}

/// Monic orthogonal family up to degree `maxdeg` at base point a.
pub fn build_poly_family<T: Real>(maxdeg: usize, p: &EnsembleParams<T>, a: Cx<T>) -> Result<PolyFamily<T>> {
    if T::from_usize_(maxdeg) > p.n - T::c(2.0) {
        return Err(domain("build_poly_family", format!("maxdeg {maxdeg} exceeds n-2")));
    }
    let x = a.norm_sqr();
    let d = pivots(p, re(x), maxdeg + 1);
    // rho_j = g_{j-1}/g_j = (L+j)/d_{j-1}
    let rho: Vec<T> = (0..=maxdeg)
        .map(|j| if j == 0 { T::one() } else { (p.l + T::from_usize_(j)) / d[j - 1].re })
        .collect();
    let mut coeffs: Vec<Vec<Cx<T>>> = Vec::with_capacity(maxdeg + 1);
    for k in 0..=maxdeg {
        let mut c = vec![re(T::zero()); k + 1];
        c[k] = re(T::one());
        // coefficient of z^j: a^{k-j} g_j/g_k
        let mut ratio = T::one();
        let mut apow = re(T::one());
        for j in (0..k).rev() {
            ratio = ratio * rho[j + 1];
            apow = apow * a;
            c[j] = apow * ratio;
        }
        coeffs.push(c);
    }
    let norms = (0..=maxdeg)
        .map(|k| {
            let kf = T::from_usize_(k);
            (p.ln_moment(kf + T::one())).exp() * d[k].re / (p.l + kf + T::one())
        })
        .collect();
    Ok(PolyFamily { base_point: a, degree: maxdeg, coeffs, norms })
}

/// zP_k − P_{k+1} − b_k P_k − z c_k P_{k−1}.
pub fn three_term_residual<T: Real>(k: usize, p: &EnsembleParams<T>, a: Cx<T>, z: Cx<T>) -> Result<Cx<T>> {
    if k == 0 {
        return Err(domain("three_term_residual", "k must be at least 1"));
    }
    let fam = build_poly_family(k + 1, p, a)?;
    let x = re(a.norm_sqr());
    let g = g_all_scaled(k + 1, p, x);
    let r = |i: usize, j: usize| (g[i] / g[j]).to_c().unwrap_or(re(T::nan()));
    let bk = -a * r(k, k + 1);
    let ck = a * r(k - 1, k);
    let pk = fam.eval_p(k, z);
    Ok(z * pk - fam.eval_p(k + 1, z) - bk * pk - z * ck * fam.eval_p(k - 1, z))
}

fn check_phi_point<T: Real>(p: &EnsembleParams<T>, x: Cx<T>, op: &'static str) -> Result<()> {
    let tol = T::c(1e-12);
    if x.norm() < tol {
        return Err(singular(op, "x = 0"));
    }
    if (x - p.l / p.n).norm() < tol {
        return Err(singular(op, "x = L/n"));
    }
    Ok(())
}

/// Φ_q via the closed form.
pub fn phi_closed<T: Real>(q: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Result<Cx<T>> {
    check_phi_point(p, x, "phi_closed")?;
    let (n, l) = (p.n, p.l);
    let qf = T::from_usize_(q);
    let den = x * (x - l / n);
    let pre = (lgam(n + T::one()) + lgam(l + T::one()) - lgam(n + l + T::one())).exp();
    let first = (x * (n - T::one()) - (l + T::one())) * pre / den;
    let gq1 = eval_g(q + 1, p, x)?;
    let second = (-x * (n - qf - T::c(2.0)) + l + qf + T::c(2.0)) / (den * gq1);
    Ok(first + second)
}

/// Summand φ_j = Γ(n+L+1)/(Γ(j+L+2)Γ(n−j−1)) x^j/(g_{j+1} g_j), scaled, for
/// j = 0..count-1.
pub(crate) fn phi_terms<T: Real>(count: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Vec<Scaled<T>> {
    let (n, l) = (p.n, p.l);
    let g = g_all_scaled(count, p, x);
    let xs = Scaled::from_c(x);
    let mut xp = Scaled::one();
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let jf = T::from_usize_(j);
        let lc = lgam(n + l + T::one()) - lgam(jf + l + T::c(2.0)) - lgam(n - jf - T::one());
        out.push(Scaled::from_log(lc, T::zero()) * xp / (g[j + 1] * g[j]));
        xp = xp * xs;
    }
    out
}

/// Φ_q via the defining sum over j <= q.
pub fn phi_direct<T: Real>(q: usize, p: &EnsembleParams<T>, x: Cx<T>) -> Result<Cx<T>> {
    check_phi_point(p, x, "phi_direct")?;
    let s = phi_terms(q + 1, p, x).into_iter().fold(Scaled::zero(), |a, b| a + b);
    to_c(s, "phi_direct")
}

/// Closed form of α_m(x, ω) = Σ_{s<=m} g_s(x) ω^s.
pub fn alpha_closed<T: Real>(m: usize, p: &EnsembleParams<T>, x: Cx<T>, w: Cx<T>) -> Result<Cx<T>> {
    check_phi_point(p, x, "alpha_closed")?;
    let one = re(T::one());
    if (one - w).norm() < T::c(1e-14) {
        return Err(singular("alpha_closed", "w = 1"));
    }
    let (n, l) = (p.n, p.l);
    let mf = T::from_usize_(m);
    let om = one - w;
    let qxx = qhat_scaled(m, p, x, x)?;
    let t1 = qhat_scaled(m, p, x * w, x)?.scale_c(one / (om * om));
    let lg = lgam(l + n + T::one()) - lgam(l + mf + T::one()) - lgam(n - mf);
    let xw = Scaled::from_c(x * w).powi(m as i32 + 1);
    let t2 = (xw * Scaled::from_log(lg, T::zero())).scale_c(one / (om * (one + x)));
    let wp = Scaled::from_c(w).powi(m as i32 + 1);
    let t3 = (wp * qxx).scale_c((-x * (n - mf - T::one()) + l + mf + T::one()) / ((one + x) * om));
    let t4 = (wp * qxx).scale_c(one / (om * om));
    let s = (t1 - t2 - t3 - t4).scale_c((x - l / n) / x);
    to_c(s, "alpha_closed")
}

/// Σ_{s<=m} g_s(x) ω^s by direct summation with pivot-based g.
pub fn alpha_direct<T: Real>(m: usize, p: &EnsembleParams<T>, x: Cx<T>, w: Cx<T>) -> Result<Cx<T>> {
    let g = g_all_scaled(m, p, x);
    let ws = Scaled::from_c(w);
    let mut wp = Scaled::one();
    let mut s = Scaled::zero();
    for gs in g {
        s = s + gs * wp;
        wp = wp * ws;
    }
    to_c(s, "alpha_direct")
}

