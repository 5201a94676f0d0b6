"""Independent oracles for frozen test values.

Computes Fisher metric, Amari-Chentsov tensor, Weyl one-form and Christoffel
quantities for the Gaussian families with sympy (univariate, closed form) and
numpy Gauss-Hermite quadrature (bivariate, vech chart). Run with python3.
"""
import itertools
import math

import numpy as np
import sympy as sp


def univariate():
    mu, s = sp.symbols("mu s2", positive=True)
    th = [mu, s]
    g = sp.Matrix([[1 / s, 0], [0, 1 / (2 * s**2)]])
    gi = g.inv()
    def lc(i, j, k):
        return sp.simplify(sum(gi[i, l] * (sp.diff(g[l, k], th[j]) + sp.diff(g[j, l], th[k])
                                            - sp.diff(g[j, k], th[l])) for l in range(2)) / 2)
    G = [[[lc(i, j, k) for k in range(2)] for j in range(2)] for i in range(2)]
    ric = sp.zeros(2, 2)
    for j in range(2):
        for k in range(2):
            ric[j, k] = sp.simplify(sum(sp.diff(G[i][j][k], th[i]) - sp.diff(G[i][i][k], th[j])
                                        + sum(G[i][i][p] * G[p][j][k] - G[i][j][p] * G[p][i][k]
                                              for p in range(2)) for i in range(2)))
    at = {mu: 0, s: 1}
    print("LC Gamma^s2_mumu(0,1) =", G[1][0][0].subs(at))
    print("LC Gamma^mu_mus2(0,1) =", G[0][0][1].subs(at))
    print("Ricci(0,1) =", ric.subs(at), " ratio to g:", sp.simplify(ric[0, 0] / g[0, 0]))
    print("alpha=2 prior at (0,4):", math.exp(-(2 / 2) * 1.5 * math.log(4)) / (math.sqrt(2) * 8))
    # Weyl and (-m) traces
    phi = [0, sp.Rational(3, 2) / s]
    C = {}
    print("weyl Gamma^mu_mus2 =", (G[0][0][1] + sp.Rational(1, 2) * (phi[1])).subs(at))


def bivariate_vech(sigma, mu=np.zeros(2), nodes=12):
    n = 2
    t, w = np.polynomial.hermite.hermgauss(nodes)
    z1 = np.sqrt(2) * t
    w1 = w / np.sqrt(np.pi)
    L = np.linalg.cholesky(sigma)
    Si = np.linalg.inv(sigma)
    pairs = [(0, 0), (0, 1), (1, 1)]
    m = 5
    g = np.zeros((m, m))
    C = np.zeros((m, m, m))
    for a, b in itertools.product(range(nodes), repeat=2):
        x = mu + L @ np.array([z1[a], z1[b]])
        r = x - mu
        u = Si @ r
        G = 0.5 * (np.outer(u, u) - Si)
        s = np.concatenate([u, [G[0, 0], 2 * G[0, 1], G[1, 1]]])
        ww = w1[a] * w1[b]
        g += ww * np.outer(s, s)
        C += ww * np.einsum("i,j,k->ijk", s, s, s)
    gi = np.linalg.inv(g)
    phi = 0.5 * np.einsum("ijk,jk->i", C, gi)
    return g, C, phi


def bivariate():
    g, C, phi = bivariate_vech(np.eye(2))
    print("mv g(I) diag:", np.round(np.diag(g), 12))
    print("mv phi(I):", np.round(phi, 12))
    # potential along straight path I -> diag(a,b) with Richardson midpoint, then fit p
    def omega(a, b, N=64):
        def mid(N):
            tot = 0.0
            for k in range(N):
                tt = (k + 0.5) / N
                sa, sb = 1 + tt * (a - 1), 1 + tt * (b - 1)
                _, _, ph = bivariate_vech(np.diag([sa, sb]), nodes=6)
                tot += (ph[2] * (a - 1) + ph[4] * (b - 1)) / N
            return tot
        return (4 * mid(2 * N) - mid(N)) / 3
    for a, b in [(2.0, 1.0), (0.5, 3.0)]:
        print("Omega(diag(%g,%g)) = %.10f  vs 2 ln det = %.10f" % (a, b, omega(a, b), 2 * math.log(a * b)))
    logs, vals = [], []
    for a, b in [(0.5, 0.5), (1.0, 2.0), (4.0, 4.0), (0.7, 3.0)]:
        g, _, _ = bivariate_vech(np.diag([a, b]), nodes=6)
        w = math.exp(2.5 * 2 * math.log(a * b)) * math.sqrt(np.linalg.det(g))
        logs.append(math.log(a * b)); vals.append(math.log(w))
    p = np.polyfit(logs, vals, 1)
    print("fitted exponent p (vech chart):", p[0])


if __name__ == "__main__":
    univariate()
    bivariate()
