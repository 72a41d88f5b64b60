#![allow(non_snake_case)]

use overlap_core::finite_kernels::{d11_finite, varpi, ConfigPoint, WeightedPoint};
use overlap_core::limit_kernels::*;
use overlap_core::special_functions::{calE, calF, calL_rho, mittag_leffler, F, L_rho};
use overlap_core::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn strictly_decreasing(rows: &[ScanRow<f64>]) -> bool {
    rows.windows(2).all(|w| w[1].sup_err < w[0].sup_err)
}

#[test]
fn droplet_examples() {
    let spec = RegimeSpec::bulk(1.0, 1.0, 1.0).unwrap();
    let p = regime_to_params(&spec, 30).unwrap();
    let d = droplet(&p);
    assert!((d.r1 - 0.5f64.sqrt()).abs() < 1e-15 && (d.r2 - 2f64.sqrt()).abs() < 1e-15);
    for pp in [0.8, 1.0, 1.3] {
        let nd = p.nf() * delta_N(pp, &p);
        let lead = 30.0 * 3.0 / (1.0f64 + pp * pp).powi(2);
        assert!((nd - lead).abs() <= 1.0 + 1e-12);
    }
    let weak = RegimeSpec::weak(1.0).unwrap();
    let mut prev = f64::INFINITY;
    for nn in [20, 40, 80, 160] {
        let d = droplet(&regime_to_params(&weak, nn).unwrap());
        let err = (nn as f64 * (d.r2 - d.r1) - 1.0).abs();
        assert!(err < prev);
        prev = err;
    }
    assert!(prev < 0.02);
}

fn varpi_error(spec: &RegimeSpec<f64>, nn: usize, chi: C64) -> f64 {
    let p = regime_to_params(spec, nn).unwrap();
    let nd = p.nf() * delta_N(spec.p, &p);
    let lam = map_point(spec, &p, chi);
    let mut e: f64 = 0.0;
    for (ze, et) in [(c(0.1, 0.2), c(-0.3, 0.1)), (c(0.5, -0.4), c(0.2, 0.6))] {
        let z = WeightedPoint::physical(map_point(spec, &p, ze));
        let w = WeightedPoint::physical(map_point(spec, &p, et));
        let fin = varpi(z, w, lam, lam.conj(), &p) * nd;
        e = e.max((fin - varpi_limit(ze, et, chi)).norm());
    }
    e
}

#[test]
fn varpi_limit_examples() {
    let chi = c(0.3, -0.2);
    assert!((varpi_limit(chi, chi, chi) - c(1.0, 0.0)).norm() < 1e-15);
    // at p = 0 the mapped weight converges like 1/N
    let sing = RegimeSpec::singular(1.0, 2.0).unwrap();
    assert!(varpi_error(&sing, 200, chi) < 2.0 / 200.0);
    // at p > 0, |λ|² − p² is of order N^{-1/2}
    let bulk = RegimeSpec::bulk(1.0, 1.0, 1.0).unwrap();
    let e: Vec<f64> = [50, 100, 200, 400].iter().map(|&n| varpi_error(&bulk, n, chi)).collect();
    for w in e.windows(2) {
        assert!((w[1] / w[0] - 0.5f64.sqrt()).abs() < 0.05, "{e:?}");
    }
}

#[test]
fn bulk_kernel_at_coincidence() {
    let spec = RegimeSpec::bulk(1.0, 1.0, 1.0).unwrap();
    let chi = c(0.2, 0.1);
    let k = reduced_limit(&spec, chi.conj() + c(1e-9, 0.0), chi, chi, chi.conj()).unwrap();
    assert!((k - c(0.5, 0.0)).norm() < 1e-9);
    let k = K11_bulk(chi, chi, chi).unwrap();
    assert!((k - c(0.5, 0.0)).norm() < 1e-15);
}

fn edge_bracket(a: C64, b: C64, cc: C64, d: C64, f: C64, x: f64) -> C64 {
    let g = ((a + x) * (a + x) * 0.5).exp();
    g * ((-f).exp() * F(b + x).unwrap() * F(cc + x).unwrap() - F(d + x).unwrap() * F(a + x).unwrap()
        + f * F(d).unwrap() * F(a + x).unwrap())
}

#[test]
fn edge_H_examples() {
    let (a, b) = (c(0.4, 0.1), c(-0.2, 0.3));
    assert!(edge_H(a, b, a, b, c(0.0, 0.0)).unwrap().norm() < 1e-15);
    let h = 1e-5;
    let s2pi = (2.0 * std::f64::consts::PI).sqrt();
    for args in [
        [c(0.4, 0.0), c(0.1, 0.3), c(0.5, -0.2), c(-0.3, 0.1), c(0.2, 0.1)],
        [c(-0.6, 0.2), c(0.8, 0.0), c(0.0, 0.4), c(0.3, -0.5), c(-0.4, 0.3)],
    ] {
        let [a, b, cc, d, f] = args;
        let der = (edge_bracket(a, b, cc, d, f, h) - edge_bracket(a, b, cc, d, f, -h)) / (2.0 * h);
        let fd = -s2pi * der / ((a * a * 0.5).exp() * calF(a).unwrap());
        let an = edge_H(a, b, cc, d, f).unwrap();
        assert!((an - fd).norm() < 1e-7 * (1.0 + an.norm()), "{an} vs {fd}");
    }
    // diagonal of physical arguments is real
    let (ze, chi) = (c(0.3, -0.4), c(0.1, 0.2));
    let f = (ze.conj() - chi.conj()) * (ze - chi);
    let v = edge_H(chi.conj() + chi, ze.conj() + chi, chi.conj() + ze, ze.conj() + ze, f).unwrap();
    assert!(v.im.abs() < 1e-13 * v.norm());
}

#[test]
fn edge_constants() {
    assert!((c_s(0.0, 1.0, EdgeSide::Outer) - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
    let r: f64 = c_s(1.0, 1.0, EdgeSide::Inner) / c_s(1.0, 1.0, EdgeSide::Outer);
    assert!((r - 1.0).abs() < 1e-15);
    let (a, b) = (0.5f64, 2.0f64);
    let r = c_s(a, b, EdgeSide::Inner) / c_s(a, b, EdgeSide::Outer);
    assert!((r - ((a + 1.0) * b / (a * (b + 1.0))).sqrt()).abs() < 1e-14);
    assert!((bulk_prefactor(0.0, 1.0, 0.5f64.sqrt()) - 0.5).abs() < 1e-15);
}

#[test]
fn weak_pieces() {
    let rho = 1.5;
    let (a, b) = (c(0.3, 0.2), c(-0.5, 0.4));
    assert!((weak_C(a, b, rho).unwrap() - weak_C(b, a, rho).unwrap()).norm() < 1e-15);
    let k = weak_H(a, b, a, b, c(0.0, 0.0), rho).unwrap();
    assert!(k.is_finite());
}

#[test]
fn weak_recovers_bulk_at_large_rho() {
    let rho = 50.0;
    let bulk = RegimeSpec::bulk(1.0, 1.0, 1.0).unwrap();
    let weak = RegimeSpec::weak(rho).unwrap();
    for ze in [c(0.0, 0.0), c(0.3, 0.2), c(-0.45, 0.1), c(0.5, -0.3)] {
        let d = D11_weak(&ConfigPoint::new(vec![ze]).unwrap(), rho).unwrap();
        assert!((2.0 / (rho * rho) * d - 1.0).abs() < 1e-3);
        for et in [c(0.1, -0.2), c(-0.3, 0.4)] {
            let kw = K11_limit(&weak, ze, et, c(0.05, 0.1)).unwrap();
            let kb = K11_limit(&bulk, ze, et, c(0.05, 0.1)).unwrap();
            assert!((kw - kb).norm() < 1e-3, "{kw} vs {kb}");
        }
    }
}

#[test]
fn singular_pieces() {
    let l = 2.0;
    let x = c(0.5, 0.2);
    let s = singular_S(x, x, x, x, c(0.0, 0.0), l).unwrap();
    assert!(s.norm() < 1e-14);
    // L = 1 with E_{1,2}(z) = (e^z − 1)/z
    let e = |z: C64| (z.exp() - 1.0) / z;
    let (a, b, cc, d) = (c(0.3, 0.4), c(-0.2, 0.5), c(0.6, -0.1), c(0.45, 0.0));
    let f = c(0.1, -0.3);
    let want = (d - 1.0) * (e(a) * e(b) - (1.0 - f) * e(cc) * e(d)) + (e(a) + e(b) - e(cc) - e(d) + f * e(cc));
    let got = singular_S(a, b, cc, d, f, 1.0).unwrap();
    assert!((got - want).norm() < 1e-12 * want.norm());
    let _ = mittag_leffler(1.0, 2.0, a).unwrap();
}

#[test]
fn coincidence_limits_are_smooth() {
    let chi = c(0.2, 0.1);
    let (s, t) = (c(1e-3, 0.0), c(0.3, -0.2));
    let (zb, eta) = (chi.conj() + s, chi + t);
    let f = s * t;
    // edge
    let spec = RegimeSpec::edge(1.0, 1.0, EdgeSide::Outer).unwrap();
    let a = chi.conj() + chi;
    let gen = (zb * eta).exp() * edge_H(a, zb + chi, chi.conj() + eta, zb + eta, f).unwrap() / (f * f);
    let reg = reduced_limit(&spec, zb, eta, chi, chi.conj()).unwrap();
    assert!((gen - reg).norm() < 1e-6 * reg.norm(), "edge {gen} vs {reg}");
    // weak
    let rho = 1.5;
    let spec = RegimeSpec::weak(rho).unwrap();
    let gen = weak_H(a, zb + chi, chi.conj() + eta, zb + eta, f, rho).unwrap() / (f * f * calL_rho(a, rho).unwrap());
    let reg = reduced_limit(&spec, zb, eta, chi, chi.conj()).unwrap();
    assert!((gen - reg).norm() < 1e-6 * reg.norm(), "weak {gen} vs {reg}");
    // singular
    let l = 2.0;
    let spec = RegimeSpec::singular(1.0, l).unwrap();
    let x = chi.conj() * chi;
    let gen = singular_S(zb * chi, chi.conj() * eta, zb * eta, x, f, l).unwrap() / (f * f * calE(l, x, x).unwrap());
    let reg = reduced_limit(&spec, zb, eta, chi, chi.conj()).unwrap();
    assert!((gen - reg).norm() < 1e-6 * reg.norm(), "singular {gen} vs {reg}");
    // both variables at the conditioning point stay finite
    for spec in [RegimeSpec::edge(1.0, 1.0, EdgeSide::Inner).unwrap(), RegimeSpec::weak(rho).unwrap()] {
        assert!(reduced_limit(&spec, chi.conj(), chi, chi, chi.conj()).unwrap().is_finite());
    }
}

#[test]
fn d_limits_reduce_to_prefactors() {
    let ze = c(0.3, -0.2);
    let one = ConfigPoint::new(vec![ze]).unwrap();
    let x = ze + ze.conj();
    assert_eq!(D11_bulk(&one, 1.0, 1.0, 1.1).unwrap(), bulk_prefactor(1.0, 1.0, 1.1));
    let spec = RegimeSpec::edge(1.0, 2.0, EdgeSide::Outer).unwrap();
    let want = calF(x).unwrap().re * c_s(1.0, 2.0, EdgeSide::Outer);
    assert!((D11_edge(&one, &spec).unwrap() - want).abs() < 1e-14);
    assert!((D11_weak(&one, 1.5).unwrap() - calL_rho(x, 1.5).unwrap().re).abs() < 1e-14);
    let r2 = ze.norm_sqr();
    let want = calE(2.0, c(r2, 0.0), c(r2, 0.0)).unwrap().re * r2 * (-r2).exp();
    assert!((D11_singular(&one, 2.0).unwrap() - want).abs() < 1e-14);
    assert!(D11_edge(&one, &RegimeSpec::weak(1.0).unwrap()).is_err());
}

#[test]
fn psi_examples() {
    let z = c(1e-4, 0.0);
    let v = psi(PsiKind::Bulk12, &[z], 1.0, 1.0).unwrap().re;
    assert!((v * z.norm_sqr() - 0.5).abs() < 1e-6);
    assert!((psi(PsiKind::Edge11, &[c(0.0, 0.0)], 1.0, 1.0).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
    let x = c(0.3, 0.0);
    let w = psi(PsiKind::Weak11, &[x], 1.5, 1.0).unwrap();
    assert!((w - calL_rho(x, 1.5).unwrap() / L_rho(x, 1.5).unwrap()).norm() < 1e-15);
    assert!(psi(PsiKind::Edge12, &[x], 1.0, 1.0).is_err());
    // series and closed form agree across the switch
    let a = psi(PsiKind::Bulk12, &[c(0.0999f64.sqrt(), 0.0)], 1.0, 1.0).unwrap().re;
    let b = psi(PsiKind::Bulk12, &[c(0.1001f64.sqrt(), 0.0)], 1.0, 1.0).unwrap().re;
    assert!((a - b).abs() / a < 5e-3);
}

#[test]
fn bulk_kernel_scan() {
    let spec = RegimeSpec::bulk(1.0, 1.0, 1.0).unwrap();
    let rows = kernel_scan(&spec, &[25, 50, 100], &default_grid(), default_chi(RegimeKind::StrongBulk)).unwrap();
    assert!(strictly_decreasing(&rows), "{rows:?}");
    assert!(rows[2].sup_err < 0.05);
}

#[test]
fn other_regime_kernel_scans() {
    for (spec, ladder) in [
        (RegimeSpec::edge(1.0, 1.0, EdgeSide::Outer).unwrap(), vec![50, 100, 200]),
        (RegimeSpec::edge(1.0, 1.0, EdgeSide::Inner).unwrap(), vec![50, 100, 200]),
        (RegimeSpec::weak(1.5).unwrap(), vec![20, 40, 80]),
        (RegimeSpec::singular(1.0, 2.0).unwrap(), vec![20, 40, 80]),
    ] {
        let rows = kernel_scan(&spec, &ladder, &default_grid(), default_chi(spec.kind)).unwrap();
        assert!(strictly_decreasing(&rows), "{:?}: {rows:?}", spec.kind);
    }
}

#[test]
fn d11_scans() {
    let pts = [c(0.1, 0.2), c(-0.3, 0.1), c(0.25, -0.35)];
    for (spec, ladder) in [
        (RegimeSpec::edge(1.0, 1.0, EdgeSide::Outer).unwrap(), vec![50, 100, 200]),
        (RegimeSpec::weak(1.5).unwrap(), vec![20, 40, 80]),
        (RegimeSpec::singular(1.0, 2.0).unwrap(), vec![20, 40, 80]),
    ] {
        let rows = d11_scan(&spec, &ladder, &pts).unwrap();
        assert!(strictly_decreasing(&rows), "{:?}: {rows:?}", spec.kind);
    }
}

#[test]
fn multi_point_densities_converge() {
    let spec = RegimeSpec::bulk(1.0, 1.0, 1.0).unwrap();
    let z = [c(0.2, 0.1), c(-0.3, 0.4), c(0.1, -0.35)];
    let cfg = ConfigPoint::new(z.to_vec()).unwrap();
    let lim = D11_limit(&spec, &cfg).unwrap();
    let mut prev = f64::INFINITY;
    for nn in [25, 50, 100, 200] {
        let p = regime_to_params(&spec, nn).unwrap();
        let nd = p.nf() * delta_N(spec.p, &p);
        let scale = nd.powi(3) * p.nf().powf(spec.q_exponent());
        let mapped = ConfigPoint::new(z.iter().map(|&q| map_point(&spec, &p, q)).collect()).unwrap();
        let err = (d11_finite(&mapped, &p).unwrap() / scale / lim - 1.0).abs();
        assert!(err < prev);
        prev = err;
    }
    assert!(prev < 0.05);
}
