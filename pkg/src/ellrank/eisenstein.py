"""Real-analytic Eisenstein (Epstein) series.

Three evaluators with disjoint machinery, used as mutual oracles:

  epstein_lattice_raw   the bare truncated double sum (s > 1 only,
                        slowly convergent; loose-tolerance oracle)
  epstein_lattice       theta-split lattice sum: with Q(v) = |mz+n|^2/y
                        (a unimodular, self-dual binary form),

          E*(z,s) = 1/(s-1) - 1/s
                  + sum'_v [ g(s, pi Q(v)) + g(1-s, pi Q(v)) ],

                        g(a,x) = x^-a Gamma(a,x); terms decay like
                        e^{-pi Q(v)}, the cutoff comes from an explicit
                        tail bound.  Valid at any s, but the public op
                        keeps the s > 1 contract of the raw sum.
  epstein_completed     Fourier expansion (production evaluator):

          E*(z,s) = 2 xi(2s) y^s + 2 xi(2s-1) y^{1-s}
                  + 8 sqrt(y) sum_{n>=1} n^{s-1/2} sigma_{1-2s}(n)
                        K_{s-1/2}(2 pi n y) cos(2 pi n x),

                        xi(v) = pi^{-v/2} Gamma(v/2) zeta(v); points are
                        SL2(Z)-reduced first (the lattice sum is fully
                        modular), so y >= sqrt(3)/2 and roughly ten
                        Bessel terms reach 1e-15.

E* has simple poles at s = 0, 1 with residues -1, +1 and satisfies
E*(z,s) = E*(z,1-s) termwise in the Fourier form.
"""

from __future__ import annotations

import math

import numpy as np

from .arith import divisors, moebius
from .halfplane import UHPoint, sl2z_reduce
from .specialfn import (
    EvalResult,
    PoleError,
    _gamma_raw,
    bessel_k_array,
    completed_zeta,
    upper_gamma,
    zeta_depleted,
)


def _check_s_not_pole(s: float):
    if s in (0.0, 1.0):
        raise PoleError("E* has simple poles at s = 0 and s = 1")
    if abs(s - 0.5) < 1e-4:
        raise ValueError("constant terms cancel a removable pair at s = 1/2; "
                         "evaluate at |s - 1/2| >= 1e-4")


def _sigma_table(nmax: int, power: float) -> np.ndarray:
    out = np.zeros(nmax + 1)
    for n in range(1, nmax + 1):
        out[n] = sum(float(d) ** power for d in divisors(n))
    return out


def epstein_star_array(x, y, s: float) -> np.ndarray:
    """Completed Epstein series E*(z,s) on arrays of points (Fourier form)."""
    _check_s_not_pole(s)
    xr, yr, _, _ = sl2z_reduce(np.asarray(x, float), np.asarray(y, float))
    c = 2.0 * completed_zeta(2.0 * s) * yr**s + 2.0 * completed_zeta(2.0 * s - 1.0) * yr ** (1.0 - s)
    nu = s - 0.5
    # truncation: K_nu(2 pi n y) < sqrt(pi/(4 pi n y)) e^{-2 pi n y + nu^2/(4 pi n y)}
    ymin = float(np.min(yr))
    nmax = 1
    while 2.0 * math.pi * nmax * ymin - nu * nu / (4.0 * math.pi * nmax * ymin) < 40.0 + abs(nu) * math.log(nmax + 1.0):
        nmax += 1
        if nmax > 64:
            break
    sig = _sigma_table(nmax, 1.0 - 2.0 * s)
    acc = np.zeros_like(yr)
    for n in range(1, nmax + 1):
        kv = bessel_k_array(nu, 2.0 * math.pi * n * yr)
        acc += float(n) ** (s - 0.5) * sig[n] * kv * np.cos(2.0 * math.pi * n * xr)
    return c + 8.0 * np.sqrt(yr) * acc


def epstein_star_theta(x: float, y: float, s: float, tol: float = 1e-13) -> tuple[float, float]:
    """E*(z,s) through the incomplete-gamma (theta-split) lattice sum.

    Returns (value, tail_bound).  Tail bound: terms with pi Q(v) > X
    contribute at most (4 + 2 sqrt(X)) e^{-X} (two incomplete-gamma
    weights <= 2 e^{-x} each for x >= 8, ellipse-rim count ~ sqrt(X)).
    """
    _check_s_not_pole(s)
    X = max(12.0, math.log(1.0 / tol) + 6.0)
    while (4.0 + 2.0 * math.sqrt(X)) * math.exp(-X) > tol:
        X += 2.0
    R = X / math.pi
    # enumerate Q(m,n) = |mz+n|^2 / y <= R
    M = int(math.floor(math.sqrt(R / y))) + 1
    qs = []
    for m in range(-M, M + 1):
        # (mx+n)^2 <= R y - m^2 y^2
        rem = R * y - m * m * y * y
        if rem < 0:
            continue
        half = math.sqrt(rem)
        nlo = math.ceil(-m * x - half)
        nhi = math.floor(-m * x + half)
        for n in range(nlo, nhi + 1):
            if m == 0 and n == 0:
                continue
            qs.append(((m * x + n) ** 2 + (m * y) ** 2) / y)
    q = np.array(qs)
    xq = math.pi * q
    val = (1.0 / (s - 1.0) - 1.0 / s
           + float(np.sum(xq ** (-s) * upper_gamma(s, xq)))
           + float(np.sum(xq ** (s - 1.0) * upper_gamma(1.0 - s, xq))))
    return val, (4.0 + 2.0 * math.sqrt(X)) * math.exp(-X)


def _star_to_plain(s: float) -> float:
    # E = pi^s / Gamma(s) * E*
    return math.pi**s / _gamma_raw(s)


def epstein_lattice(z: UHPoint, s: float, tol: float = 1e-12) -> EvalResult:
    """Lattice sum sum' y^s/|mz+n|^(2s) for s > 1, to absolute tol."""
    if s <= 1.0:
        raise ValueError("epstein_lattice needs s > 1 (no continuation here)")
    star, bound = epstein_star_theta(z.x, z.y, s, tol=tol * 0.5)
    f = _star_to_plain(s)
    return EvalResult(f * star, abs(f) * bound + 1e-13 * abs(f * star))


def epstein_lattice_raw(z: UHPoint, s: float, M: int) -> float:
    """Bare truncated sum over 0 < max(|m|,|n|) <= M (test oracle)."""
    if s <= 1.0:
        raise ValueError("raw lattice sum needs s > 1")
    ms = np.arange(-M, M + 1)
    acc = 0.0
    for m in ms:
        ns = np.arange(-M, M + 1)
        if m == 0:
            ns = ns[ns != 0]
        w2 = (m * z.x + ns) ** 2 + (m * z.y) ** 2
        acc += float(np.sum(w2 ** (-s)))
    return z.y**s * acc


def epstein_completed(z: UHPoint, s: float) -> EvalResult:
    """Completed E*(z,s), valid for all real |s| <= 10 off the poles."""
    if abs(s) > 10.0:
        raise ValueError("|s| <= 10 supported")
    _check_s_not_pole(s)
    v = float(epstein_star_array(np.array([z.x]), np.array([z.y]), s)[0])
    return EvalResult(v, 1e-12 * (1.0 + abs(v)))


def richardson_limit(f, h0: float, levels: int = 3, ratio: float = 2.0):
    """Extrapolate f(h) -> f(0) from the ladder h0, h0/r, ..., assuming
    an expansion f(h) = L + c1 h + c2 h^2 + ...; returns (L, spread)."""
    hs = [h0 / ratio**j for j in range(levels)]
    rows = [[f(h) for h in hs]]
    for k in range(1, levels):
        prev = rows[-1]
        rows.append([
            (ratio**k * prev[i + 1] - prev[i]) / (ratio**k - 1.0)
            for i in range(len(prev) - 1)
        ])
    last = rows[-1][0]
    spread = abs(rows[-2][-1] - last) if levels > 1 else float("nan")
    return last, spread


def epstein_residue(z: UHPoint) -> EvalResult:
    """Residue of E* at s = 1 by Richardson extrapolation of (s-1)E*."""
    def f(h):
        return h * float(epstein_star_array(np.array([z.x]), np.array([z.y]), 1.0 + h)[0])

    val, spread = richardson_limit(f, 0.01, levels=3)
    return EvalResult(val, 10.0 * spread + 1e-9)


def kronecker_limit_check(z: UHPoint) -> tuple[float, float, float]:
    """First limit formula: compare

        lhs = lim_{s->1} [E(z,s) - pi/(s-1)]       (numeric, Richardson)
        rhs = -pi log y + 2 pi (gamma - log 2) - 4 pi log|eta(z)|

    Returns (lhs, rhs, lhs - rhs)."""
    from .modular import log_abs_eta
    from .specialfn import EULER_GAMMA

    def f(h):
        s = 1.0 + h
        e_star = float(epstein_star_array(np.array([z.x]), np.array([z.y]), s)[0])
        return _star_to_plain(s) * e_star - math.pi / h

    lhs, _ = richardson_limit(f, 0.01, levels=4)
    rhs = (-math.pi * math.log(z.y)
           + 2.0 * math.pi * (EULER_GAMMA - math.log(2.0))
           - 4.0 * math.pi * log_abs_eta(z.x, z.y))
    return lhs, rhs, lhs - rhs


def level_eisenstein(z: UHPoint, s: float, N: int) -> EvalResult:
    """E^N(z,s) = sum over Gamma_infinity \\ Gamma_0(N) of Im(gamma z)^s,
    assembled from the full-lattice series by Moebius inversion:

        2 N^s zeta_N(2s) E^N(z,s) = sum_{d|N} mu(d) d^{-s} E(Nz/d, s).

    (The N^s normalization is pinned numerically against the direct
    coset sum; see level_eisenstein_direct.)
    """
    acc = 0.0
    err = 0.0
    for d in divisors(N):
        mu = moebius(d)
        if mu == 0:
            continue
        w = UHPoint(N * z.x / d, N * z.y / d)
        if s > 1.0:
            term = epstein_lattice(w, s, tol=1e-12)
        else:
            star = epstein_completed(w, s)
            f = _star_to_plain(s)
            term = EvalResult(f * star.value, abs(f) * star.abs_error_bound)
        acc += mu * float(d) ** (-s) * term.value
        err += float(d) ** (-s) * term.abs_error_bound
    zn = zeta_depleted(2.0 * s, N)
    denom = 2.0 * float(N) ** s * zn.value
    return EvalResult(acc / denom, err / abs(denom) + abs(acc / denom) * 1e-12)


def level_eisenstein_direct(z: UHPoint, s: float, N: int, m_max: int = 400,
                            n_width: int = 4000) -> float:
    """Direct truncation of 1 + sum_{m>0, gcd(mN,n)=1} y^s/|mNz+n|^(2s)
    (test oracle; s > 1.5 recommended)."""
    if s <= 1.0:
        raise ValueError("direct coset sum needs s > 1")
    acc = 1.0
    for m in range(1, m_max + 1):
        center = -m * N * z.x
        ns = np.arange(math.floor(center) - n_width, math.floor(center) + n_width + 1)
        mask = np.gcd(ns, m * N) == 1
        ns = ns[mask]
        w2 = (m * N * z.x + ns) ** 2 + (m * N * z.y) ** 2
        acc += float(np.sum(z.y**s * w2 ** (-s)))
    return acc
