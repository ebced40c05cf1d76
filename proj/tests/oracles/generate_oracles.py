"""Independent reference values for the unit tests.

Ground states come from a finite-difference Newton relaxation of the radial
equation with Richardson extrapolation in h, unrelated to the shooting solver
under test. Bessel values come from mpmath. The interaction integral is a
brute-force Cartesian trapezoid sum. Run once; the printed header is frozen
in tests/unit/oracle_values.hpp.
"""

import mpmath as mp
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline


def relax(dim, p, h, s_max=40.0):
    n = int(round(s_max / h))
    s = np.arange(n + 1) * h
    # start from the exact one-dimensional profile, raised towards the N-d peak
    u = 1.5 * (p / 2.0) ** (1.0 / (p - 2.0)) / np.cosh(0.5 * (p - 2.0) * s) ** (2.0 / (p - 2.0))
    for _ in range(200):
        main = np.full(n + 1, -2.0 / h**2)
        lower = np.full(n, 1.0 / h**2)
        upper = np.full(n, 1.0 / h**2)
        # first-derivative term (N-1)/s u'
        c = (dim - 1) / (2.0 * h * np.where(s > 0, s, 1.0))
        upper[1:] += c[1:n]
        lower[:-1] -= c[1:n]
        # origin: u'' + (N-1)/s u' -> N u''(0), ghost u_{-1} = u_1
        main[0] = -2.0 * dim / h**2
        upper[0] = 2.0 * dim / h**2
        A = sp.diags([lower, main, upper], [-1, 0, 1], format="lil")
        A[n, :] = 0.0
        A[n, n] = 1.0
        A = A.tocsr()
        F = A @ u - u + np.abs(u) ** (p - 1.0)
        F[n] = u[n]
        J = A - sp.diags(np.r_[np.ones(n) - (p - 1.0) * np.abs(u[:n]) ** (p - 2.0), 0.0])
        J = J.tolil()
        J[n, :] = 0.0
        J[n, n] = 1.0
        du = spla.spsolve(J.tocsr(), -F)
        step = 1.0
        while step > 1e-4:
            trial = u + step * du
            Ft = A @ trial - trial + np.abs(trial) ** (p - 1.0)
            Ft[n] = trial[n]
            if np.linalg.norm(Ft) < np.linalg.norm(F) or step * np.max(np.abs(du)) < 1e-12:
                break
            step *= 0.5
        u = u + step * du
        if np.max(np.abs(step * du)) < 1e-13:
            break
    return s, u


def profile(dim, p):
    s1, u1 = relax(dim, p, 0.01)
    s2, u2 = relax(dim, p, 0.005)
    # Richardson on the coarse nodes
    u = (4.0 * u2[::2] - u1) / 3.0
    return s1, u


def tail_amplitude(dim, s, u, lo=10.0, hi=16.0):
    m = (s >= lo) & (s <= hi)
    if dim == 3:
        shape = np.exp(-s[m]) / s[m]
    else:
        shape = np.array([float(mp.sqrt(2 / mp.pi) * mp.besselk(0, x)) for x in s[m]])
    return float(np.mean(u[m] / shape))


def interaction_bruteforce(s, u, p, y, h=0.04, L=22.0):
    spline = CubicSpline(s, u)
    xs = np.arange(-L, L + h / 2, h)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    r0 = np.hypot(X, Y)
    r1 = np.hypot(X + y, Y)
    f0 = np.where(r0 < s[-1], spline(np.minimum(r0, s[-1])), 0.0)
    f1 = np.where(r1 < s[-1], spline(np.minimum(r1, s[-1])), 0.0)
    return float(np.sum(f1 * np.abs(f0) ** (p - 1.0)) * h * h)


def h1_norm_squared(dim, s, u, p):
    # ||Phi||^2 = int Phi^p for the ground state
    area = 2 * np.pi if dim == 2 else 4 * np.pi
    w = np.abs(u) ** p * s ** (dim - 1)
    return float(area * simpson(w, x=s))


def main():
    mp.mp.dps = 30
    print("// Generated by tests/oracles/generate_oracles.py")
    print("#pragma once\n\nnamespace oracle {\n")
    print(f"inline constexpr double bessel_k0_1 = {mp.nstr(mp.besselk(0, 1), 20)};")
    print(f"inline constexpr double bessel_k1_1 = {mp.nstr(mp.besselk(1, 1), 20)};")
    print(f"inline constexpr double bessel_k0_0p01 = {mp.nstr(mp.besselk(0, mp.mpf('0.01')), 20)};")
    v = mp.besselk(0, 50) * mp.e**50 * mp.sqrt(2 * 50 / mp.pi)
    print(f"inline constexpr double scaled_k0_50_ratio = {mp.nstr(v, 20)};")
    for dim, p, tag in [(2, 3.0, "n2_p3"), (3, 2.6, "n3_p26"), (2, 2.7, "n2_p27")]:
        s, u = profile(dim, p)
        a = tail_amplitude(dim, s, u)
        print(f"inline constexpr double phi0_{tag} = {u[0]:.15g};")
        print(f"inline constexpr double tail_{tag} = {a:.10g};")
        print(f"inline constexpr double h1sq_{tag} = {h1_norm_squared(dim, s, u, p):.12g};")
        if dim == 2:
            print(f"inline constexpr double interaction12_{tag} = "
                  f"{interaction_bruteforce(s, u, p, 12.0):.12g};")
    print("\n}  // namespace oracle")


if __name__ == "__main__":
    main()
