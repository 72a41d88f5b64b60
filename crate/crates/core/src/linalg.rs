//! Small dense determinants.

use crate::scalar::{Cx, Real};
use crate::scaled::Scaled;
use num_complex::Complex;

/// Determinant by LU with partial pivoting. `a` is row-major, `k × k`.
pub fn det<T: Real>(mut a: Vec<Cx<T>>, k: usize) -> Cx<T> {
    let mut d = Complex::new(T::one(), T::zero());
    for c in 0..k {
        let mut p = c;
        let mut best = a[c * k + c].norm();
        for r in c + 1..k {
            let v = a[r * k + c].norm();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        if p != c {
            for j in 0..k {
                a.swap(c * k + j, p * k + j);
            }
            d = -d;
        }
        let piv = a[c * k + c];
        d = d * piv;
        for r in c + 1..k {
            let f = a[r * k + c] / piv;
            if f.norm() == T::zero() {
                continue;
            }
            for j in c + 1..k {
                let v = a[c * k + j];
                a[r * k + j] = a[r * k + j] - f * v;
            }
        }
    }
    d
}

/// Determinant of a matrix whose entries carry their own exponents. Each row
/// is rescaled to unit size before factoring.
pub fn det_scaled<T: Real>(a: &[Scaled<T>], k: usize) -> Scaled<T> {
    if k == 0 {
        return Scaled::one();
    }
    let mut total_e = 0i64;
    let mut plain = Vec::with_capacity(k * k);
    for r in 0..k {
        let row = &a[r * k..(r + 1) * k];
        let emax = row.iter().filter(|s| !s.is_zero()).map(|s| s.e).max();
        let emax = match emax {
            Some(e) => e,
            None => return Scaled::zero(),
        };
        total_e += emax;
        for s in row {
            let shifted = Scaled { m: s.m, e: s.e - emax };
            plain.push(shifted.to_c().unwrap_or(Complex::new(T::nan(), T::nan())));
        }
    }
    let d = det(plain, k);
    let mut out = Scaled::from_c(d);
    out.e += total_e;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        let c = |x: f64, y: f64| Complex::new(x, y);
        let a = vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.5)];
        let d = det(a, 2);
        let want = c(1.0, 0.0) * c(3.0, 0.5) - c(2.0, 1.0) * c(0.0, -1.0);
        assert!((d - want).norm() < 1e-14);
        let b = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        assert!((det(b, 3) - c(-2.0, 0.0)).norm() < 1e-14);
    }
}
