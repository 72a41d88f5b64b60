"""Extended-precision reference values for the integration tests.

Writes crates/core/tests/data/frozen.json. Every value is computed from the
defining formula (series, integral or monomial Gram-Schmidt) with mpmath at
50 digits; nothing here reuses the closed forms implemented in the crate.

    python3 tools/oracles/gen_frozen.py
"""

import json
import pathlib

import mpmath as mp

mp.mp.dps = 50
OUT = pathlib.Path(__file__).resolve().parents[2] / "crates/core/tests/data/frozen.json"


def c2(z):
    z = mp.mpc(z)
    return [float(z.real), float(z.imag)]


def cx(pair):
    return mp.mpc(pair[0], pair[1])


# ---------------------------------------------------------------- scalars

def special():
    out = {}
    out["log_gamma"] = [[x, float(mp.loggamma(x))] for x in [0.5, 1.0, 5.0, 12.3, 171.5, 1000.25, 1e6]]
    n, l, k = 400, 100, 200
    out["gamma_log_ratio"] = [[[n + l + 1], [k + l + 1, n + 1 - k],
                               float(mp.loggamma(n + l + 1) - mp.loggamma(k + l + 1) - mp.loggamma(n + 1 - k))]]
    pts = [[0.0, 0.0], [1.0, 0.0], [-1.5, 0.0], [0.3, 0.4], [2.0, -1.0], [-0.7, 2.5],
           [4.0, 3.0], [-3.0, -5.0], [0.1, 12.0], [5.5, 0.0], [-2.2, 0.9], [0.0, 25.0], [1.0, 25.0]]
    out["erfc"] = []
    for p in pts:
        v = mp.erfc(cx(p))
        out["erfc"].append([p, c2(v)])
    # erfc(1) by quadrature of the defining integral
    out["erfc_quad_1"] = float(2 / mp.sqrt(mp.pi) * mp.quad(lambda t: mp.exp(-t * t), [1, mp.inf]))

    def F(x):
        return mp.erfc(x / mp.sqrt(2)) / 2

    def Lrho_quad(z, rho):
        r = rho / mp.sqrt(2)
        return mp.quad(lambda xi: mp.exp(-(z - xi) ** 2 / 2), [-r, 0, r]) / mp.sqrt(2 * mp.pi)

    out["F"] = [[p, c2(F(cx(p)))] for p in [[0.0, 0.0], [0.5, 0.2], [-1.2, 0.7], [2.0, -0.4]]]
    out["calF"] = [[p, c2(mp.exp(-cx(p) ** 2 / 2) - mp.sqrt(2 * mp.pi) * cx(p) * F(cx(p)))]
                   for p in [[0.0, 0.0], [0.5, 0.2], [-1.2, 0.7], [2.0, -0.4]]]
    out["L_rho"] = [[p, rho, c2(Lrho_quad(cx(p), rho))]
                    for p, rho in [([0.0, 0.0], 2.0), ([0.3, 0.1], 1.5), ([-0.8, 0.4], 3.0), ([0.2, -0.5], 0.7)]]

    def ml(a, b, z, terms=400):
        return mp.nsum(lambda k: z ** k / mp.gamma(a * k + b), [0, mp.inf]) if terms is None else \
            mp.fsum(z ** k / mp.gamma(a * k + b) for k in range(terms))

    out["mittag_leffler"] = [[a, b, p, c2(ml(a, b, cx(p)))]
                             for a, b, p in [(1.0, 3.5, [3.0, 0.0]), (1.0, 1.0, [0.7, 0.2]), (1.0, 2.0, [1.3, 0.0]),
                                             (1.0, 4.0, [-2.0, 1.5]), (2.0, 1.5, [1.0, -0.5]), (1.0, 3.0, [6.0, 2.0])]]
    out["calE"] = [[c, p, x, c2((cx(x) - c) * ml(1, c + 1, cx(p)) + 1 / mp.gamma(c))]
                   for c, p, x in [(2.0, [1.5, 0.0], [0.5, 0.0]), (2.5, [0.4, 0.3], [1.2, -0.2]), (1.0, [0.0, 0.0], [3.0, 0.0])]]
    out["inc_gamma_P"] = [[c, z, float(mp.gammainc(c, 0, z, regularized=True))]
                          for c, z in [(2.5, 4.0), (0.5, 0.3), (7.0, 10.0), (1.0, 2.0), (3.2, 0.01)]]
    out["inc_beta_I"] = [[a, b, x, float(mp.betainc(a, b, 0, x, regularized=True))]
                         for a, b, x in [(3.0, 10.0, 0.2), (12.5, 4.0, 0.7), (1.0, 1.0, 0.3), (21.0, 11.0, 0.66)]]
    return out


# ------------------------------------------------------- finite structures

def binom(a, b):
    return mp.gamma(a + 1) / (mp.gamma(b + 1) * mp.gamma(a - b + 1))


def g_def(m, n, l, x):
    s = mp.fsum((m + 1 - k) * binom(l + n, l + k) * x ** k for k in range(m + 1))
    return (x - mp.mpf(l) / n) / x * s + l * (m + 1) / (n * x) * binom(l + n, l)


def q_def(deg, n, l, x):
    return mp.fsum(mp.gamma(n + l + 1) / (mp.gamma(k + l + 1) * mp.gamma(n + 1 - k)) * x ** k for k in range(deg + 1))


def moment(k, n, l):
    return mp.gamma(k + l + 1) * mp.gamma(n - k) / mp.gamma(n + l + 1)


def gram_schmidt(size, n, l, a):
    """Monic orthogonal polynomials against |z-a|^2 + (1+|a|^2)(1+|z|^2)/(n+L)."""
    m = [moment(k, n, l) for k in range(size + 2)]
    c = (1 + abs(a) ** 2) / (n + l)
    M = [[mp.mpc(0)] * size for _ in range(size)]
    for i in range(size):
        M[i][i] = m[i + 1] + abs(a) ** 2 * m[i] + c * (m[i] + m[i + 1])
        if i + 1 < size:
            M[i + 1][i] = -a * m[i + 1]
            M[i][i + 1] = -mp.conj(a) * m[i + 1]

    def ip(f, g):
        return mp.fsum(f[i] * mp.conj(g[j]) * M[i][j] for i in range(len(f)) for j in range(len(g)))

    polys, norms = [], []
    for k in range(size):
        p = [mp.mpc(0)] * k + [mp.mpc(1)]
        for j, q in enumerate(polys):
            pr = ip(p, q) / norms[j]
            for i, v in enumerate(q):
                p[i] -= pr * v
        polys.append(p)
        norms.append(ip(p, p).real)
    return polys, norms


def peval(p, z):
    return mp.fsum(c * z ** j for j, c in enumerate(p))


def weight(z, n, l):
    r2 = abs(z) ** 2
    return r2 ** l * (1 + r2) ** (-(n + l + 1))


def omega_t(z, u, v, n, l):
    return (z - u) * (mp.conj(z) - v) + (1 + u * v) * (1 + z * mp.conj(z)) / (n + l)


def finite():
    out = {}
    out["g_def"] = [[m, n, l, x, float(g_def(m, n, l, mp.mpf(x)))]
                    for m, n, l, x in [(5, 12.0, 3.0, 0.8), (3, 9.0, 2.0, 1.7), (8, 15.0, 4.5, 0.35)]]
    out["q_def"] = [[deg, n, l, x, float(q_def(deg, n, l, mp.mpf(x)))]
                    for deg, n, l, x in [(12, 12.0, 3.0, 1.0), (4, 7.5, 1.5, 2.3), (10, 20.0, 10.0, 0.9)]]
    n, l = 8.0, 2.0
    out["qhat_y0"] = float(binom(10, 2) + mp.gamma(11) / ((n * 1 - l) * mp.gamma(9) * mp.gamma(2)))

    # polynomial family
    n, l, a = 10.0, 2.0, mp.mpc(0.7, 0.3)
    polys, norms = gram_schmidt(6, n, l, a)
    out["poly_family"] = {
        "n": n, "l": l, "a": c2(a),
        "coeffs": [[c2(c) for c in p] for p in polys],
        "norms": [float(h) for h in norms],
    }

    # reduced and full overlap kernels from Gram-Schmidt
    rows = []
    for nn, n, l, lam, z, w in [
        (4, 9.0, 1.5, (0.4, 0.3), (0.2, -0.5), (-0.6, 0.1)),
        (6, 14.0, 3.0, (0.8, -0.2), (1.1, 0.4), (0.5, 0.9)),
        (3, 6.5, 0.0, (0.3, 0.6), (-0.2, 0.2), (0.7, -0.3)),
    ]:
        lam, z, w = mp.mpc(*lam), mp.mpc(*z), mp.mpc(*w)
        polys, norms = gram_schmidt(nn, n, l, lam)
        red = mp.fsum(mp.conj(peval(polys[j], z)) * peval(polys[j], w) / norms[j] for j in range(nn))
        lb = mp.conj(lam)
        varpi = mp.sqrt(omega_t(z, lam, lb, n, l)) * mp.sqrt(omega_t(w, lam, lb, n, l))
        full = red * varpi * mp.sqrt(weight(z, n, l) * weight(w, n, l))
        kn = mp.sqrt(weight(z, n, l) * weight(w, n, l)) * mp.fsum(
            (mp.conj(z) * w) ** k / moment(k, n, l) for k in range(nn))
        rows.append({"N": nn, "n": n, "l": l, "lam": c2(lam), "z": c2(z), "w": c2(w),
                     "reduced": c2(red), "k11": c2(full), "kn": c2(kn)})
    out["kernels"] = rows

    # D functions with k = N: no integration, Z_N = N! prod m_j
    drows = []
    for nn, n, l, zs in [
        (3, 6.0, 1.5, [(0.3, 0.2), (-0.4, 0.5), (0.1, -0.6)]),
        (4, 9.0, 2.0, [(0.5, 0.1), (-0.3, 0.7), (0.9, -0.4), (-0.8, -0.2)]),
    ]:
        zs = [mp.mpc(*p) for p in zs]
        zn = mp.factorial(nn) * mp.fprod(moment(j, n, l) for j in range(nn))
        pre = mp.factorial(nn) / zn
        w = mp.fprod(weight(z, n, l) for z in zs)
        vd = mp.fprod(abs(zs[i] - zs[j]) ** 2 for i in range(nn) for j in range(i + 1, nn))
        m = n + l
        z1, z2 = zs[0], zs[1]
        d11 = pre * w * vd * mp.fprod(1 + (1 + abs(z1) ** 2) * (1 + abs(zj) ** 2) / (m * abs(z1 - zj) ** 2)
                                      for zj in zs[1:])
        d12 = -pre * w * vd / (m * abs(z1 - z2) ** 2) * mp.fprod(
            1 + (1 + z1 * mp.conj(z2)) * (1 + abs(zj) ** 2) / (m * (z1 - zj) * mp.conj(z2 - zj)) for zj in zs[2:])
        drows.append({"N": nn, "n": n, "l": l, "z": [c2(z) for z in zs], "d11": float(d11.real), "d12": c2(d12)})
    out["d_full"] = drows
    return out


def main():
    data = {"special": special(), "finite": finite()}
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
