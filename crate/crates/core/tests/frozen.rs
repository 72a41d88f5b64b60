//! Comparisons against values frozen from an extended-precision generator
//! (tools/oracles/gen_frozen.py). The JSON is checked in; regenerate only if
//! the generator itself changes.

use overlap_core::finite_kernels::*;
use overlap_core::finite_structures::*;
use overlap_core::special_functions::*;
use overlap_core::{EnsembleParams64, C64};
use serde_json::Value;

fn data() -> Value {
    let raw = include_str!("data/frozen.json");
    serde_json::from_str(raw).expect("frozen.json parses")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn c(v: &Value) -> C64 {
    C64::new(f(&v[0]), f(&v[1]))
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn rows<'a>(d: &'a Value, group: &str, key: &str) -> &'a Vec<Value> {
    d[group][key].as_array().unwrap()
}

#[test]
fn log_gamma_matches_frozen() {
    let d = data();
    for r in rows(&d, "special", "log_gamma") {
        let (x, want) = (f(&r[0]), f(&r[1]));
        let got = log_gamma(x).unwrap();
        let err = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
        assert!(err < 1e-13, "log_gamma({x}) = {got}, want {want}");
    }
    let r = &rows(&d, "special", "gamma_log_ratio")[0];
    let num: Vec<f64> = r[0].as_array().unwrap().iter().map(f).collect();
    let den: Vec<f64> = r[1].as_array().unwrap().iter().map(f).collect();
    let got = gamma_log_ratio(&num, &den).unwrap();
    assert!(((got - f(&r[2])) / f(&r[2])).abs() < 1e-10);
}

#[test]
fn erfc_matches_frozen() {
    let d = data();
    for r in rows(&d, "special", "erfc") {
        let (z, want) = (c(&r[0]), c(&r[1]));
        let got = erfc_complex(z).unwrap();
        assert!(rel(got, want) < 1e-12, "erfc({z}) = {got}, want {want}");
    }
    let q = f(&d["special"]["erfc_quad_1"]);
    assert!((erfc_complex(C64::new(1.0, 0.0)).unwrap().re - q).abs() < 1e-12 * q);
}

#[test]
fn edge_and_weak_functions_match_frozen() {
    let d = data();
    for r in rows(&d, "special", "F") {
        assert!(rel(F(c(&r[0])).unwrap(), c(&r[1])) < 1e-12);
    }
    for r in rows(&d, "special", "calF") {
        assert!(rel(calF(c(&r[0])).unwrap(), c(&r[1])) < 1e-12);
    }
    for r in rows(&d, "special", "L_rho") {
        let got = L_rho(c(&r[0]), f(&r[1])).unwrap();
        assert!(rel(got, c(&r[2])) < 1e-12, "L_rho {got} vs {}", c(&r[2]));
    }
}

#[test]
fn mittag_leffler_matches_frozen() {
    let d = data();
    for r in rows(&d, "special", "mittag_leffler") {
        let got = mittag_leffler(f(&r[0]), f(&r[1]), c(&r[2])).unwrap();
        assert!(rel(got, c(&r[3])) < 1e-12, "E({}, {}) = {got}", f(&r[0]), f(&r[1]));
    }
    for r in rows(&d, "special", "calE") {
        let got = calE(f(&r[0]), c(&r[1]), c(&r[2])).unwrap();
        assert!(rel(got, c(&r[3])) < 1e-12);
    }
}

#[test]
fn incomplete_functions_match_frozen() {
    let d = data();
    for r in rows(&d, "special", "inc_gamma_P") {
        let got = reg_incomplete_gamma_P(f(&r[0]), f(&r[1])).unwrap();
        assert!((got - f(&r[2])).abs() < 1e-13 * f(&r[2]).max(1e-3));
    }
    for r in rows(&d, "special", "inc_beta_I") {
        let got = reg_incomplete_beta(f(&r[0]), f(&r[1]), f(&r[2])).unwrap();
        assert!((got - f(&r[3])).abs() < 1e-12 * f(&r[3]).max(1e-3));
    }
}

fn params(nn: usize, n: f64, l: f64) -> EnsembleParams64 {
    EnsembleParams64::new(nn, n, l).unwrap()
}

#[test]
fn g_and_q_match_direct_sums() {
    let d = data();
    for r in rows(&d, "finite", "g_def") {
        let m = r[0].as_u64().unwrap() as usize;
        let p = params(1, f(&r[1]), f(&r[2]));
        let x = C64::new(f(&r[3]), 0.0);
        let want = f(&r[4]);
        assert!(((eval_g(m, &p, x).unwrap().re - want) / want).abs() < 1e-12);
        assert!(((g_pivot(m, &p, x).unwrap().re - want) / want).abs() < 1e-12);
    }
    for r in rows(&d, "finite", "q_def") {
        let deg = r[0].as_u64().unwrap() as usize;
        let p = params(1, f(&r[1]), f(&r[2]));
        let want = f(&r[4]);
        let got = eval_q(deg, &p, C64::new(f(&r[3]), 0.0)).unwrap().re;
        assert!(((got - want) / want).abs() < 1e-12);
    }
    let p = params(1, 8.0, 2.0);
    let want = f(&d["finite"]["qhat_y0"]);
    let got = eval_qhat(3, &p, C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap();
    assert!(((got.re - want) / want).abs() < 1e-13 && got.im == 0.0);
}

#[test]
fn poly_family_matches_gram_schmidt() {
    let d = data();
    let pf = &d["finite"]["poly_family"];
    let p = params(2, f(&pf["n"]), f(&pf["l"]));
    let fam = build_poly_family(5, &p, c(&pf["a"])).unwrap();
    for (k, coeffs) in pf["coeffs"].as_array().unwrap().iter().enumerate() {
        for (j, want) in coeffs.as_array().unwrap().iter().enumerate() {
            let err = (fam.coeffs[k][j] - c(want)).norm();
            assert!(err < 1e-12 * (1.0 + c(want).norm()), "P_{k} coefficient {j}");
        }
        let h = f(&pf["norms"][k]);
        assert!(((fam.norms[k] - h) / h).abs() < 1e-12);
    }
}

#[test]
fn kernels_match_gram_schmidt_sums() {
    let d = data();
    for r in d["finite"]["kernels"].as_array().unwrap() {
        let nn = r["N"].as_u64().unwrap() as usize;
        let p = params(nn, f(&r["n"]), f(&r["l"]));
        let (lam, z, w) = (c(&r["lam"]), c(&r["z"]), c(&r["w"]));
        let red = reduced_kernel(nn, &p, z.conj(), w, lam, lam.conj()).to_c().unwrap();
        assert!(rel(red, c(&r["reduced"])) < 1e-11, "reduced kernel N={nn}");
        let k = k11_reduced(nn, z, w, lam, &p).unwrap();
        assert!(rel(k, c(&r["k11"])) < 1e-11);
        for method in [KernelMethod::Direct, KernelMethod::Simplified] {
            let k = k11_finite(z, w, lam, &p, method).unwrap().value;
            assert!(rel(k, c(&r["k11"])) < 1e-10, "{method:?} N={nn}");
        }
        assert!(rel(kernel_KN(z, w, &p).unwrap(), c(&r["kn"])) < 1e-12);
    }
}

#[test]
fn full_configuration_densities_match_algebra() {
    let d = data();
    for r in d["finite"]["d_full"].as_array().unwrap() {
        let nn = r["N"].as_u64().unwrap() as usize;
        let p = params(nn, f(&r["n"]), f(&r["l"]));
        let zs: Vec<C64> = r["z"].as_array().unwrap().iter().map(c).collect();
        let cfg = ConfigPoint::new(zs).unwrap();
        let want = f(&r["d11"]);
        let got = d11_finite(&cfg, &p).unwrap();
        assert!(((got - want) / want).abs() < 1e-9, "D11 N={nn}: {got} vs {want}");
        let got = d12_finite(&cfg, &p).unwrap();
        assert!(rel(got, c(&r["d12"])) < 1e-9, "D12 N={nn}: {got} vs {}", c(&r["d12"]));
    }
}
