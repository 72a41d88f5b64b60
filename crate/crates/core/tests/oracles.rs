use overlap_core::finite_kernels::{cond_exp_o11, d11_finite, d12_finite, kernel_KN, ConfigPoint};
use overlap_core::finite_structures::build_poly_family;
use overlap_core::limit_kernels::{EdgeSide, RegimeKind, RegimeSpec};
use overlap_core::oracles::*;
use overlap_core::special_functions::gamma_log_ratio;
use overlap_core::{EnsembleParams64, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn params(nn: usize, n: f64, l: f64) -> EnsembleParams64 {
    EnsembleParams64::new(nn, n, l).unwrap()
}

#[test]
fn plane_quadrature_examples() {
    let p = params(1, 6.0, 1.5);
    let spec = QuadratureSpec::for_weight(&p, 1, 1e-11).unwrap();
    let mass = quad_plane(|z| c(weight(z, &p), 0.0), &spec).unwrap();
    let want = gamma_log_ratio(&[p.l + 1.0, p.n], &[p.l + p.n + 1.0]).unwrap().exp();
    assert!((mass - want).norm() < 1e-11);
    let odd = quad_plane(|z| z * weight(z, &p), &spec).unwrap();
    assert!(odd.norm() < 1e-11);
    let rad = quad_radial(|r| weight(c(r, 0.0), &p) * (1.0 + r * r), &spec).unwrap();
    let pl = quad_plane(|z| c(weight(z, &p) * (1.0 + z.norm_sqr()), 0.0), &spec).unwrap();
    assert!((rad - pl.re).abs() < 1e-11 && pl.im.abs() < 1e-14);
}

#[test]
fn tail_cutoff_respects_tolerance() {
    let p = params(2, 8.0, 2.0);
    let spec = QuadratureSpec::for_weight(&p, 3, 1e-9).unwrap();
    let wide = QuadratureSpec { r_max: spec.r_max * 4.0, ..spec };
    let f = |r: f64| r.powi(6) * weight(c(r, 0.0), &p);
    let a = quad_radial(f, &spec).unwrap();
    let b = quad_radial(f, &wide).unwrap();
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn orthogonality_of_two_and_three() {
    let p = params(6, 10.0, 2.0);
    let a = c(0.7, 0.3);
    let fam = build_poly_family(5, &p, a).unwrap();
    let spec = QuadratureSpec::for_weight(&p, 6, 1e-10).unwrap();
    let v = quad_plane(
        |z| {
            let om = (z - a) * (z.conj() - a.conj()) + (1.0 + a.norm_sqr()) * (1.0 + z.norm_sqr()) / p.m();
            fam.eval_p(2, z) * fam.eval_q(3, z.conj()) * om * weight(z, &p)
        },
        &spec,
    )
    .unwrap();
    assert!(v.norm() < 1e-6);
}

#[test]
fn gram_schmidt_reference_examples() {
    let p = params(2, 10.0, 2.0);
    let fam = gram_schmidt_reference(5, &p, c(0.0, 0.0)).unwrap();
    for k in 0..=5 {
        for j in 0..k {
            assert!(fam.coeffs[k][j].norm() < 1e-15);
        }
    }
    let a = c(0.7, 0.3);
    let gs = gram_schmidt_reference(5, &p, a).unwrap();
    let ldu = build_poly_family(5, &p, a).unwrap();
    for k in 0..=5 {
        for j in 0..=k {
            assert!((gs.coeffs[k][j] - ldu.coeffs[k][j]).norm() < 1e-9);
        }
        assert!((gs.norms[k] - ldu.norms[k]).abs() < 1e-9 * ldu.norms[k]);
    }
    assert!(gram_schmidt_reference(7, &p, a).is_err());
}

#[test]
fn brute_force_one_free_point() {
    let p = params(2, 5.0, 1.0);
    let z1 = c(0.3, 0.2);
    let spec = QuadratureSpec::for_weight(&p, 2, 1e-9).unwrap();
    let bf = brute_force_D(&[z1], &p, DKind::D11, &spec).unwrap();
    let lib = d11_finite(&ConfigPoint::new(vec![z1]).unwrap(), &p).unwrap();
    assert!((bf.re - lib).abs() < 1e-6 * lib && bf.im.abs() < 1e-6 * lib);
    // conditional expectation as a ratio of quadratures
    let r = kernel_KN(z1, z1, &p).unwrap().re;
    assert!((bf.re / r - cond_exp_o11(z1, &p).unwrap()).abs() < 1e-6);

    let p = params(3, 6.0, 1.5);
    let spec = QuadratureSpec::for_weight(&p, 3, 1e-9).unwrap();
    let pts = [c(0.3, 0.2), c(-0.4, 0.5)];
    let bf = brute_force_D(&pts, &p, DKind::D12, &spec).unwrap();
    let lib = d12_finite(&ConfigPoint::new(pts.to_vec()).unwrap(), &p).unwrap();
    assert!((bf - lib).norm() < 1e-5 * lib.norm(), "{bf} vs {lib}");
}

#[test]
fn brute_force_without_integration() {
    let p = params(3, 6.0, 1.5);
    let spec = QuadratureSpec::for_weight(&p, 3, 1e-11).unwrap();
    let pts = [c(0.3, 0.2), c(-0.4, 0.5), c(0.1, -0.6)];
    let cfg = ConfigPoint::new(pts.to_vec()).unwrap();
    let bf = brute_force_D(&pts, &p, DKind::D11, &spec).unwrap();
    let lib = d11_finite(&cfg, &p).unwrap();
    assert!((bf.re - lib).abs() < 1e-9 * lib);
    let bf = brute_force_D(&pts, &p, DKind::D12, &spec).unwrap();
    let lib = d12_finite(&cfg, &p).unwrap();
    assert!((bf - lib).norm() < 1e-9 * lib.norm());
    assert!(brute_force_D(&pts[..1], &params(4, 8.0, 1.0), DKind::D11, &spec).is_err());
}

#[test]
fn qhat_bulk_rate() {
    let spec = RegimeSpec::bulk(1.0, 1.0, 1.0).unwrap();
    let rows = asymptotic_qhat_check(&spec, &[25, 50, 100, 200], &default_qhat_grid(RegimeKind::StrongBulk)).unwrap();
    assert!(rows.windows(2).all(|w| w[1].sup_err < w[0].sup_err), "{rows:?}");
    assert!(rows[3].sup_err < 1e-6);
}

#[test]
fn qhat_outer_edge_rate() {
    let spec = RegimeSpec::edge(1.0, 1.0, EdgeSide::Outer).unwrap();
    let rows = asymptotic_qhat_check(&spec, &[50, 100, 200, 400], &default_qhat_grid(RegimeKind::StrongEdge)).unwrap();
    let target = 0.5f64.sqrt();
    for w in rows.windows(2) {
        let r = w[1].sup_err / w[0].sup_err;
        assert!((r - target).abs() < 0.3 * target, "ratio {r}");
    }
}

#[test]
fn qhat_other_regimes_decrease() {
    for (spec, ladder) in [
        (RegimeSpec::edge(1.0, 1.0, EdgeSide::Inner).unwrap(), vec![50, 100, 200]),
        (RegimeSpec::weak(1.5).unwrap(), vec![20, 40, 80]),
        (RegimeSpec::singular(1.0, 2.0).unwrap(), vec![20, 40, 80]),
    ] {
        let rows = asymptotic_qhat_check(&spec, &ladder, &default_qhat_grid(spec.kind)).unwrap();
        assert!(rows.windows(2).all(|w| w[1].sup_err < w[0].sup_err), "{:?}: {rows:?}", spec.kind);
    }
}
