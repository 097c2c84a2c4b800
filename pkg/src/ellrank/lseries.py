"""Rankin-Selberg convolution L-functions and their completions.

Series data:  L_{f,g}(s) = zeta_N(2s) sum a_n b_n n^{-(s+1)} is
repackaged as Phi(s) = G(s) sum_k C_k k^{-s} with

    G(s) = (4 pi^2 / N)^{-s} Gamma(s) Gamma(s+1),
    C_k  = sum_{d^2 m = k, (d,N)=1} a_m b_m / m     (k C_k exact integer).

Analytic continuation (approximate functional equation): G is the
Mellin transform of phi(u) = 2 sqrt(u) K_1(2 sqrt(u)), so with
w_s(k,T) = Int_T^inf phi(A k x) x^{s-1} dx (A = 4 pi^2/N) and a split
parameter X,

    Phi(s) = sum_k C_k [w_s(k, 1/X) + w_{1-s}(k, X)]
             - R1 [X^{1-s}/(1-s) + X^{-s}/s],

R1 the residue at s = 1 (zero unless f = g).  For f = g the functional
equation holds for Phi+ = Phi * A with A(s) = prod_{p|N}(1-p^-s)^-1;
the same sum with the A-convolved coefficients then has the unknown R1+
eliminated by solving the two-split linear system (X = 1, 2).  Weights
for integer s reduce to the closed forms int_x^inf t^m K_1 = recursion
in (K_0, K_1); otherwise panel Gauss-Legendre quadrature on the doubly
exponentially decaying v-integral phi(A k T e^v) e^{s v} is used.

Weight decay e^{-4 pi sqrt(k T / N)} pins the coefficient cutoff:
k_max ~ (42/(4 pi))^2 N / T, e.g. ~3500 for N = 154 at T = 1/2, well
inside the 4e4 cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import is_squarefree, prime_divisors
from .curves import CoefficientTable
from .modular import CuspFormEval
from .specialfn import PoleError, _gamma_raw, _zeta_raw, bessel_k_array, zeta_depleted


@dataclass(frozen=True)
class LValueResult:
    value: float
    error: float
    pipeline: str

    def __post_init__(self):
        if not math.isfinite(self.error):
            raise ValueError("error must be finite")


@dataclass
class RankinSeries:
    af: CoefficientTable
    bg: CoefficientTable
    N1: int
    N2: int
    N: int
    M: int
    U: np.ndarray              # U_k = k C_k, exact (int64)
    k_max: int
    isogenous: bool

    @classmethod
    def build(cls, fe: CuspFormEval, ge: CuspFormEval, k_max: int | None = None):
        af, bg = fe.table, ge.table
        N1, N2 = fe.level, ge.level
        N, M = math.lcm(N1, N2), math.gcd(N1, N2)
        if k_max is None:
            k_max = min(af.nmax, bg.nmax)
        if k_max > min(af.nmax, bg.nmax):
            raise ValueError("coefficient tables shorter than requested k_max")
        a = af.coefficients
        b = bg.coefficients
        U = np.zeros(k_max + 1, dtype=np.int64)
        d = 1
        while d * d <= k_max:
            if math.gcd(d, N) == 1:
                dd = d * d
                ms = np.arange(1, k_max // dd + 1)
                U[dd * ms] += dd * a[ms] * b[ms]
            d += 1
        nlim = min(af.nmax, bg.nmax) + 1
        iso = N1 == N2 and np.array_equal(a[:nlim], b[:nlim])
        return cls(af, bg, N1, N2, N, M, U, k_max, iso)

    @property
    def A_const(self) -> float:
        return 4.0 * math.pi**2 / self.N


def G_factor(rs: RankinSeries, s: float) -> float:
    return rs.A_const ** (-s) * _gamma_raw(s) * _gamma_raw(s + 1.0)


def L_direct(rs: RankinSeries, s: float, n_max: int | None = None,
             tol: float | None = None) -> LValueResult:
    """zeta_N(2s) sum_{n<=n_max} a_n b_n n^{-(s+1)}; certified tail from
    |a_n b_n| <= 4 n^{5/4} (needs s > 5/4 for the bound to converge)."""
    if s < 1.2:
        raise ValueError("direct series needs s >= 1.2")
    if n_max is None:
        n_max = min(rs.af.nmax, rs.bg.nmax)
    ns = np.arange(1, n_max + 1, dtype=float)
    ab = rs.af.coefficients[1 : n_max + 1].astype(float) * rs.bg.coefficients[1 : n_max + 1].astype(float)
    zn = zeta_depleted(2.0 * s, rs.N)
    val = zn.value * float(np.sum(ab * ns ** (-(s + 1.0))))
    if s > 1.3:
        tail = abs(zn.value) * 4.0 * n_max ** (1.25 - s) / (s - 1.25)
    else:
        tail = float("inf")
    if tol is not None and tail > tol:
        need = (tol / (4.0 * abs(zn.value)) * (s - 1.25)) ** (1.0 / (1.25 - s)) if s > 1.3 else float("inf")
        raise ValueError(f"insufficient n_max for tol={tol:g}: need about {need:.3g}")
    if not math.isfinite(tail):
        raise ValueError("no finite tail certificate below s = 1.3; use the AFE pipeline")
    return LValueResult(val, tail + 1e-13 * abs(val), "direct-series")


# ------------------------------------------------------------ AFE weights

def _weights_integer_sigma(sigma: int, beta: np.ndarray) -> np.ndarray:
    """w_sigma(k,T) for integer sigma >= 0 via the closed recursion

        I(m;x) = Int_x^inf t^m K_1 dt,  J(m;x) = Int_x^inf t^m K_0 dt,
        I(m) = m J(m-1) + x^m K_0(x),   J(m) = (m-1) I(m-1) + x^m K_1(x),
        I(0) = K_0(x),

    where x = 2 sqrt(beta) and w = (Ak)^{-sigma} 4^{1/2-sigma} I(2 sigma; x)
    with beta = A k T.  (The (Ak)^{-sigma} factor is applied by caller.)
    """
    x = 2.0 * np.sqrt(beta)
    k0 = bessel_k_array(0.0, x)
    k1 = bessel_k_array(1.0, x)
    I = k0.copy()                      # I(0)
    J = None
    xm = np.ones_like(x)
    for m in range(1, 2 * sigma + 1):
        xm = xm * x
        if m % 2 == 1:
            J = (m - 1) * I + xm * k1   # J(m) from I(m-1)
        else:
            I = m * J + xm * k0         # I(m) from J(m-1)
    return 4.0 ** (0.5 - sigma) * I


_V_PANELS = (0.0, 0.5, 1.0, 1.75, 2.75, 4.0, 5.5, 7.25, 9.25, 11.5, 14.0)
_V_GL = 18


def _weights_numeric_sigma(sigma: float, beta: np.ndarray) -> np.ndarray:
    """w-integral in the form Int_0^vmax phi(beta e^v) e^{sigma v} dv by
    Gauss-Legendre panels (the integrand is analytic with doubly
    exponential decay, but does not vanish at v = 0)."""
    from .specialfn import xk1_fast

    gx, gw = np.polynomial.legendre.leggauss(_V_GL)
    vs, ws = [], []
    for lo, hi in zip(_V_PANELS[:-1], _V_PANELS[1:]):
        m, hh = 0.5 * (hi + lo), 0.5 * (hi - lo)
        vs.append(m + hh * gx)
        ws.append(hh * gw)
    v = np.concatenate(vs)
    w = np.concatenate(ws)
    u = beta[:, None] * np.exp(v)[None, :]
    x = 2.0 * np.sqrt(u)
    phi = xk1_fast(x)
    integrand = phi * np.exp(sigma * v)[None, :]
    return integrand @ w


_WEIGHT_CACHE: dict = {}


def _k_effective(rs: RankinSeries, T: float) -> int:
    """Largest k whose weight envelope exceeds 1e-17 (beyond: zeros)."""
    k = 16
    while k < rs.k_max and 128.0 * k**0.75 * math.exp(-4.0 * math.pi * math.sqrt(k * T / rs.N)) > 1e-17:
        k *= 2
    return min(rs.k_max, k)


def afe_weight(rs: RankinSeries, sigma: float, T: float) -> np.ndarray:
    """w_sigma(k, T) = Int_T^inf phi(A k x) x^{sigma-1} dx for k = 1..k_max."""
    key = (rs.N, rs.k_max, round(sigma, 12), round(T, 12))
    if key in _WEIGHT_CACHE:
        return _WEIGHT_CACHE[key]
    keff = _k_effective(rs, T)
    ks = np.arange(1, keff + 1, dtype=float)
    beta = rs.A_const * ks * T
    if abs(sigma - round(sigma)) < 1e-13 and round(sigma) >= 0:
        m = int(round(sigma))
        core = _weights_integer_sigma(m, beta)
        w = (rs.A_const * ks) ** (-float(m)) * core
    else:
        w = T**sigma * _weights_numeric_sigma(sigma, beta)
    if keff < rs.k_max:
        w = np.concatenate([w, np.zeros(rs.k_max - keff)])
    _WEIGHT_CACHE[key] = w
    return w


def _smooth_support(N: int, k_max: int) -> list[int]:
    out = [1]
    for p in prime_divisors(N):
        new = []
        for j in out:
            v = j * p
            while v <= k_max:
                new.append(v)
                v *= p
        out.extend(new)
    return sorted(out)


def _plus_coefficients(rs: RankinSeries) -> np.ndarray:
    """U+_k = k C+_k for Phi+ = Phi * prod (1 - p^-s)^{-1} (f = g case)."""
    U = rs.U
    out = np.zeros_like(U)
    for j in _smooth_support(rs.N, rs.k_max):
        ks = np.arange(j, rs.k_max + 1, j)
        out[ks] += j * U[ks // j]
    return out


def _afe_sum(rs: RankinSeries, s: float, X: float, coeffs: np.ndarray) -> float:
    w1 = afe_weight(rs, s, 1.0 / X)
    w2 = afe_weight(rs, 1.0 - s, X)
    ks = np.arange(1, rs.k_max + 1, dtype=float)
    C = coeffs[1:].astype(float) / ks
    return float(np.sum(C * (w1 + w2)))


def _afe_tail_ok(rs: RankinSeries, Tmin: float) -> float:
    """Bound the dropped k > k_max mass: |C_k| <= 4 k^(1/4) d(k) and the
    weight is below 2 e^{-4 pi sqrt(k T/N)}; returns the bound."""
    k = rs.k_max
    envelope = 128.0 * k ** 0.75 * math.exp(-4.0 * math.pi * math.sqrt(k * Tmin / rs.N))
    return envelope


def pole_term(s: float, X: float) -> float:
    return X ** (1.0 - s) / (1.0 - s) + X ** (-s) / s


def afe_eval(rs: RankinSeries, s: float, split: float = 1.0) -> LValueResult:
    """Phi(s) by the smoothed two-sided sum.

    Certified band s in [-0.5, 1.5]; accepted up to 2.75 for the
    mandatory overlap gate against the direct pipeline.  Coprime levels
    (M = 1, entire Phi) or f = g (Phi+ machinery with the residue
    eliminated through splits X and 2X) are supported.
    """
    if not -0.5 <= s <= 2.75:
        raise ValueError("afe_eval supports s in [-0.5, 2.75]")
    tail = _afe_tail_ok(rs, min(1.0 / split, split) * 0.5)
    if tail > 3e-8:
        raise ValueError(f"k_max={rs.k_max} too small for the AFE tail ({tail:.2g})")
    if rs.isogenous:
        if s in (0.0, 1.0):
            raise PoleError("Phi has a pole at s in {0,1} for f = g")
        plus = _plus_coefficients(rs)
        X1, X2 = split, 2.0 * split
        V1 = _afe_sum(rs, s, X1, plus)
        V2 = _afe_sum(rs, s, X2, plus)
        g1, g2 = pole_term(s, X1), pole_term(s, X2)
        Rplus = (V1 - V2) / (g1 - g2)
        phi_plus = V1 - Rplus * g1
        A = 1.0
        for p in prime_divisors(rs.N):
            A /= 1.0 - float(p) ** (-s)
        val = phi_plus / A
        return LValueResult(val, tail + 1e-11 * (abs(val) + abs(Rplus)), "afe")
    if rs.M != 1:
        raise ValueError("AFE supports coprime levels or f = g only")
    val = _afe_sum(rs, s, split, rs.U)
    return LValueResult(val, tail + 1e-12 * abs(val), "afe")


def residue_at_1(rs: RankinSeries, s_probe: float = 0.5) -> dict:
    """Res_{s=1} Phi for f = g, from the split-dependence of the AFE sum
    (the sum itself is entire; only the pole terms carry X)."""
    if not rs.isogenous:
        raise ValueError("residue extraction applies to f = g")
    plus = _plus_coefficients(rs)
    vals = {}
    for X1, X2 in ((1.0, 2.0), (1.0, 4.0), (1.5, 3.0)):
        V1 = _afe_sum(rs, s_probe, X1, plus)
        V2 = _afe_sum(rs, s_probe, X2, plus)
        R = (V1 - V2) / (pole_term(s_probe, X1) - pole_term(s_probe, X2))
        vals[(X1, X2)] = R
    Rplus = vals[(1.0, 4.0)]
    spread = max(abs(v - Rplus) for v in vals.values())
    A1 = 1.0
    for p in prime_divisors(rs.N):
        A1 /= 1.0 - 1.0 / p
    return {"residue_plus": Rplus, "residue": Rplus / A1, "spread": spread}


def Phi(rs: RankinSeries, s: float) -> LValueResult:
    """Completed Phi(s): direct pipeline above the strip, AFE inside."""
    if rs.isogenous and s == 1.0:
        raise PoleError("Phi has a simple pole at s = 1 (f = g, (f,f) != 0)")
    if s > 1.5:
        L = L_direct(rs, s)
        g = G_factor(rs, s)
        return LValueResult(g * L.value, abs(g) * L.error, "direct-series")
    return afe_eval(rs, s)


def phi_functional_check(rs: RankinSeries, s: float, split: float = 1.6) -> float:
    """|Phi+(s) - Phi+(1-s)| with Phi+ = Phi A (A = 1 when M = 1).

    An asymmetric split keeps the two sides genuinely different sums
    (at split = 1 the AFE is symmetric in s <-> 1-s by construction)."""
    def plus(u):
        v = afe_eval(rs, u, split=split).value
        for p in prime_divisors(rs.M):
            v /= 1.0 - float(p) ** (-u)
        return v

    return abs(plus(s) - plus(1.0 - s))


def L_derivative_at_0(rs: RankinSeries) -> LValueResult:
    """L'_{f,g}(0) = Phi(0) for non-isogenous, coprime square-free levels."""
    if rs.isogenous:
        raise ValueError("L'(0) = Phi(0) needs a non-isogenous pair")
    if rs.M != 1:
        raise ValueError("coprime levels required")
    r = afe_eval(rs, 0.0)
    return LValueResult(r.value, r.error, "afe")


def bad_factor_H(rs: RankinSeries, s: float, reduction: dict | None = None) -> float:
    """Ogg's ad hoc bad Euler factor H(s):

        p | M:                 1/((1 - c_p p^-s)(1 - c_p p^-(s+1))),
                               c_p = a_p b_p = +-1,
        p | one level only:    1/(1 - a_p b_p p^-(s+1) + p^(-1-2s)).
    """
    if not (is_squarefree(rs.N1) and is_squarefree(rs.N2)):
        raise ValueError("square-free levels required")
    ap = reduction or {}
    out = 1.0
    for p in prime_divisors(rs.N):
        a_p = ap.get(("f", p), rs.af.a(p))
        b_p = ap.get(("g", p), rs.bg.a(p))
        if rs.M % p == 0:
            c = a_p * b_p
            if abs(c) != 1:
                raise ValueError(f"c_p must be +-1 at p={p}")
            if c == 1 and s == 0.0:
                raise PoleError(f"H(s) pole at s=0 from p={p}, c_p=+1")
            out /= (1.0 - c * float(p) ** (-s)) * (1.0 - c * float(p) ** (-(s + 1.0)))
        else:
            out /= 1.0 - a_p * b_p * float(p) ** (-(s + 1.0)) + float(p) ** (-1.0 - 2.0 * s)
    return out


def assemble_LH2(rs: RankinSeries, s: float) -> float:
    """L(H^2(E x E'), s) = zeta(s-1)^2 H(s-1) L_{f,g}(s-1)."""
    u = s - 1.0
    phi = Phi(rs, u)
    L = phi.value / G_factor(rs, u)
    return _zeta_raw(u) ** 2 * bad_factor_H(rs, u) * L


def order_of_vanishing(F, s0: float, h0: float = 0.32, levels: int = 4) -> dict:
    """Estimate ord_{s0} F as the slope of log|F| against log|s - s0|
    on the geometric ladder s0 + h0 2^-j; negative = pole order."""
    hs = [h0 * 0.5**j for j in range(levels)]
    logs = [math.log(abs(F(s0 + h))) for h in hs]
    slopes = [
        (logs[i + 1] - logs[i]) / (math.log(hs[i + 1]) - math.log(hs[i]))
        for i in range(levels - 1)
    ]
    # the slope sequence converges linearly in h; extrapolate once
    extr = 2.0 * slopes[-1] - slopes[-2]
    order = round(extr)
    residual = abs(extr - order)
    return {
        "order": int(order),
        "slope": extr,
        "residual": residual,
        "inconclusive": residual > 0.2,
    }


def sym2_report(curve, fe: CuspFormEval, depth: int = 2, y_cut: float = 12.0,
                workers: int = 1, deg_phi: int | None = None,
                manin_c: int = 1) -> dict:
    """Symmetric-square bookkeeping for one curve (square-free conductor):

      residue_ratio   Res_{s=1} Phi / (2 pi psi(N) (f,f)), rationally
                      recognized (expected sum_{d|N} mu(d)/d)
      sym2_edge       H(1) * Res_{s=1} L_{f,f}  (the following ratio to
                      the period area/pi is reported, never asserted)

    deg_phi and manin_c are report-only config inputs.
    """
    from .arith import recognize_rational, best_rational
    from .curves import period_lattice
    from .domain import index_psi, petersson

    if not is_squarefree(curve.conductor):
        raise ValueError("square-free conductor required")
    N = curve.conductor
    rs = RankinSeries.build(fe, fe)
    res = residue_at_1(rs)
    pet = petersson(fe, fe, N, depth=depth, y_cut=y_cut, workers=workers)
    if not pet.value.real > 0:
        raise ValueError("(f,f) must be positive")
    psi = index_psi(N)
    ratio1 = res["residue"] / (2.0 * math.pi * psi * pet.value.real)
    rec1 = recognize_rational(ratio1, 576, 1e-4)
    best1 = best_rational(ratio1, 576)
    lat = period_lattice(curve)
    resL = res["residue"] / G_factor(rs, 1.0)
    H1 = bad_factor_H(rs, 1.0)
    sym2_edge = H1 * resL
    ratio2 = sym2_edge / (lat.area / math.pi)
    best2 = best_rational(ratio2, 576)
    deg_estimate = 4.0 * math.pi**2 * manin_c**2 * pet.value.real * psi / lat.area
    return {
        "level": N,
        "petersson_ff": pet.value.real,
        "petersson_err": pet.abs_error_bound,
        "residue_phi": res["residue"],
        "residue_spread": res["spread"],
        "residue_ratio": ratio1,
        "residue_ratio_recognized": None if rec1 is None else (rec1.numerator, rec1.denominator),
        "residue_ratio_residual": best1.residual,
        "sym2_edge": sym2_edge,
        "period_area": lat.area,
        "area_ratio": ratio2,
        "area_ratio_best_rational": (best2.numerator, best2.denominator, best2.residual),
        "deg_estimate": deg_estimate,
        "deg_phi_config": deg_phi,
    }
