"""Weight-2 cusp forms from q-expansions, Dedekind eta, the modular
unit Delta_N, the q-logarithm, and Atkin-Lehner height boosting.

Evaluation strategy for f(z) = sum a_n q^n: push z to the top of its
Gamma_0(level)+Atkin-Lehner orbit (guaranteed height sqrt(3)/(2 level)
for square-free level), run the truncated q-series there, transport
back through the weight-2 automorphy factor and the numerically
determined eigen-sign.  Truncation uses |a_n| <= 2n (Hasse plus divisor
slack), so the tail after M terms is below
2 e^{-2 pi y (M+1)} ((M+1)/(1-r) + r/(1-r)^2), r = e^{-2 pi y}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .arith import divisors, is_squarefree, moebius, prime_divisors, totient, cyclotomic
from .curves import CoefficientTable, CurveModel, an_table, ap_table
from .halfplane import UHPoint, boost_array, ext_gcd_array, sl2z_reduce
from .specialfn import EvalResult

TWO_PI = 2.0 * math.pi


def series_length(y: float, tol: float) -> int:
    """Smallest M with the |a_n| <= 2n tail bound below tol at height y."""
    r = math.exp(-TWO_PI * y)
    M = max(1, int(35.0 / (TWO_PI * y)))
    while M < 10_000_000:
        tail = 2.0 * r ** (M + 1) * ((M + 1) / (1 - r) + r / (1 - r) ** 2)
        if tail < tol:
            return M
        M = M + max(1, M // 8)
    raise ValueError("requested tolerance unreachable")


def _qseries(coeffs: np.ndarray, x, y, tol: float) -> np.ndarray:
    """sum_{n>=1} a_n e^{2 pi i n z} on arrays; points are bucketed by
    octaves of y so each bucket runs one Horner loop of the length its
    lowest point needs."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    out = np.zeros(x.shape, dtype=complex)
    nmax_have = len(coeffs) - 1
    q = np.exp(TWO_PI * (1j * x - y))
    octs = np.floor(np.log2(y)).astype(int)
    for o in np.unique(octs):
        m = octs == o
        L = series_length(float(y[m].min()), tol)
        if L > nmax_have:
            raise ValueError(f"coefficient table too short: need n_max >= {L}")
        qm = q[m]
        acc = np.zeros_like(qm)
        for n in range(L, 0, -1):
            acc = acc * qm + coeffs[n]
        out[m] = acc * qm
    return out


# ------------------------------------------------------------------- eta

def log_abs_eta_array(x, y) -> np.ndarray:
    """log|eta(z)| for arbitrary points, via SL2(Z) reduction:
    log|eta| = -pi y/12 + sum log|1 - q^n| at the reduced point, minus
    half the accumulated log|w| from the inversion steps."""
    xr, yr, _, loghalf = sl2z_reduce(np.asarray(x, float), np.asarray(y, float))
    q = np.exp(TWO_PI * (1j * xr - yr))
    acc = np.zeros(xr.shape)
    qk = np.ones_like(q)
    for _ in range(26):  # |q| <= e^{-pi sqrt 3}: 22 terms reach 1e-16
        qk = qk * q
        acc += np.log(np.abs(1.0 - qk))
    return -math.pi * yr / 12.0 + acc - 0.5 * loghalf


def log_abs_eta(x: float, y: float) -> float:
    return float(log_abs_eta_array(np.array([x]), np.array([y]))[0])


def eta(z: UHPoint) -> EvalResult:
    """Complex eta by the raw product; requires y >= 1e-3 (reduce first
    below that).  Only |eta| is consumed downstream."""
    if z.y < 1e-3:
        raise ValueError("eta product needs y >= 1e-3; reduce the point first")
    q24 = cmath.exp(TWO_PI * 1j * z.z)
    acc = cmath.exp(TWO_PI * 1j * z.z / 24.0)   # q^{1/24}, principal branch
    qk = 1.0 + 0.0j
    n = 0
    while True:
        n += 1
        qk *= q24
        acc *= 1.0 - qk
        if abs(qk) < 1e-17 or n > 200_000:
            break
    return EvalResult(acc, 1e-14 * abs(acc) + abs(qk) * abs(acc))


def delta(z: UHPoint) -> EvalResult:
    e = eta(z)
    return EvalResult(e.value**24, 24 * abs(e.value) ** 23 * e.abs_error_bound)


def delta_qseries(z: UHPoint, n_terms: int = 60) -> complex:
    """Independent Delta oracle: tau(n) coefficients generated from the
    recursive expansion of q prod (1-q^n)^24 by repeated polynomial
    multiplication (exact integers)."""
    coeffs = [0] * (n_terms + 1)
    coeffs[0] = 1
    for m in range(1, n_terms + 1):
        # multiply by (1 - q^m)^24
        for _ in range(24):
            for k in range(n_terms, m - 1, -1):
                coeffs[k] -= coeffs[k - m]
    q = cmath.exp(TWO_PI * 1j * z.z)
    acc = 0.0 + 0.0j
    for k in range(n_terms, -1, -1):
        acc = acc * q + coeffs[k]
    return q * acc


def log_abs_delta_array(x, y) -> np.ndarray:
    return 24.0 * log_abs_eta_array(x, y)


def log_abs_delta_N_array(x, y, N: int) -> np.ndarray:
    """log|Delta_N(z)| = sum_{d|N} mu(d) log|Delta(N z/d)|, each factor
    SL2(Z)-reduced; Gamma_0(N)-invariant for square-free N."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    acc = np.zeros(x.shape)
    for d in divisors(N):
        mu = moebius(d)
        if mu == 0:
            continue
        acc += mu * log_abs_delta_array(N * x / d, N * y / d)
    return acc


def log_abs_delta_N(z: UHPoint, N: int) -> EvalResult:
    if not is_squarefree(N):
        raise ValueError("Delta_N is used for square-free N only")
    v = float(log_abs_delta_N_array(np.array([z.x]), np.array([z.y]), N)[0])
    return EvalResult(v, 1e-11 * (1.0 + abs(v)))


def qlog(z: UHPoint, t: complex) -> float:
    """q-logarithm (1/24) log|q t| + sum_{n>=1} log|1 - q^n t| for t on
    the unit circle, geometric tail below 1e-12."""
    if abs(abs(t) - 1.0) > 1e-12:
        raise ValueError("t must lie on the unit circle")
    q = cmath.exp(TWO_PI * 1j * z.z)
    M = series_length(z.y, 1e-13)
    acc = math.log(abs(q * t)) / 24.0
    qk = 1.0 + 0.0j
    for _ in range(M):
        qk *= q
        u = 1.0 - qk * t
        au = abs(u)
        if au < 1e-300:
            raise ValueError("1 - q^n t vanished to machine precision")
        acc += math.log(au)
    return acc


def cyclotomic_qlog_sum_array(x, y, N: int, head: int = 48,
                              deep_threshold: float = 0.0025):
    """sum over primitive k mod N of qlog(z, xi^k), evaluated pointwise:

        phi(N)/24 * log|q| + sum_{n>=1} log|Phi_N(q^n)|

    with the first `head` terms through the exact cyclotomic polynomial
    (Horner) and the remainder through the closed geometric form of
    log Phi_N(X) = sum_{d|N} mu(d) log(1 - X^{N/d}).  Points should be
    Gamma_0(N)-reduced by the caller (the function is an invariant);
    points with y below deep_threshold take the eta-product route
    instead (reported via the returned mask).  Points are processed in
    octaves of y so the geometric-tail length is set per bucket.

    Returns (values, deep_mask).
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    out = np.empty(x.shape)
    deep = y < deep_threshold
    if deep.any():
        out[deep] = log_abs_delta_N_array(x[deep], y[deep], N) / 24.0
    coeffs = np.array(cyclotomic(N).coefficients, dtype=float)
    phiN = totient(N)
    octs = np.where(deep, 99, np.floor(np.log2(y)).astype(int))
    for o in np.unique(octs):
        if o == 99:
            continue
        m = octs == o
        xm, ym = x[m], y[m]
        q = np.exp(TWO_PI * (1j * xm - ym))
        acc = -TWO_PI * ym * phiN / 24.0
        qn = np.ones_like(q)
        for _ in range(head):
            qn = qn * q
            val = np.zeros_like(q) + coeffs[-1]
            for c in coeffs[-2::-1]:
                val = val * qn + c
            acc = acc + np.log(np.abs(val))
        # geometric tails: sum_{n>head} log|1-(q^e)^n| per divisor e = N/d
        ymin = float(ym.min())
        for d in divisors(N):
            mu = moebius(d)
            if mu == 0:
                continue
            e = N // d
            u = q**e
            jmax = max(2, int(40.0 / (TWO_PI * ymin * e * (head + 1))) + 2)
            t = np.zeros_like(acc)
            uj = np.ones_like(q)
            ujh = u**head
            upow = np.ones_like(q)
            for j in range(1, jmax + 1):
                uj = uj * u          # u^j
                upow = upow * ujh    # u^{j*head}
                num = uj * upow      # u^{j(head+1)}
                t -= np.real(num / (1.0 - uj)) / j
                if np.all(np.abs(num) < 1e-17):
                    break
            acc = acc + mu * t
        out[m] = acc
    return out, deep


# --------------------------------------------------- Atkin-Lehner boosting

@dataclass(frozen=True)
class BoostedPoint:
    original: UHPoint
    boosted: UHPoint
    matrix: tuple[int, int, int, int]
    det: int                 # exact divisor Q of the level

    @property
    def jfactor(self) -> complex:
        _, _, c, d = self.matrix
        return c * self.original.z + d


def al_boost(level: int, z: UHPoint) -> BoostedPoint:
    """Maximize Im over the Gamma_0(level)+Atkin-Lehner orbit of z."""
    xb, yb, (A, B, C, D), Q = boost_array(level, np.array([z.x]), np.array([z.y]))
    return BoostedPoint(
        original=z,
        boosted=UHPoint(float(xb[0]), float(yb[0])),
        matrix=(int(A[0]), int(B[0]), int(C[0]), int(D[0])),
        det=int(Q[0]),
    )


@dataclass
class CuspFormEval:
    """Evaluator for a weight-2 newform given by its coefficient table.

    al_signs maps each prime divisor of the level to the numerically
    determined Atkin-Lehner eigenvalue; the sign of any exact divisor
    Q is the product over p | Q.
    """

    table: CoefficientTable
    level: int
    al_signs: dict[int, int]

    _coeffs_f: np.ndarray = None

    def __post_init__(self):
        if not is_squarefree(self.level):
            raise ValueError("square-free level required")
        missing = [p for p in prime_divisors(self.level) if p not in self.al_signs]
        if missing:
            raise ValueError(f"al_signs missing primes {missing}")
        self._coeffs_f = self.table.coefficients.astype(float)

    @classmethod
    def from_curve(cls, curve: CurveModel, n_max: int = 4000,
                   ap: dict | None = None) -> "CuspFormEval":
        if ap is None:
            ap = ap_table(curve, n_max)
        table = an_table(curve.conductor, ap, n_max)
        form = cls(table=table, level=curve.conductor, al_signs={p: 1 for p in prime_divisors(curve.conductor)})
        signs = {p: _determine_al_sign(form, p) for p in prime_divisors(curve.conductor)}
        form.al_signs = signs
        return form

    def sign_for(self, Q: int) -> int:
        s = 1
        for p in prime_divisors(Q) if Q > 1 else []:
            s *= self.al_signs[p]
        return s


def _al_matrix(level: int, Q: int) -> tuple[int, int, int, int]:
    """A representative [Q, b; level, Q d] with determinant Q.

    Needs Q u + (level/Q) v = 1; then det(Q, -v; level, Q u) = Q."""
    g, s, t = ext_gcd_array(np.array([Q]), np.array([level // Q]))
    if int(g[0]) != 1:
        raise ValueError("Q must exactly divide the level")
    u, v = int(s[0]), int(t[0])
    return Q, -v, level, Q * u


def _direct_series(form: CuspFormEval, x, y, tol=1e-12):
    return _qseries(form._coeffs_f, x, y, tol)


def _determine_al_sign(form: CuspFormEval, Q: int) -> int:
    """Eigen-sign of w_Q from three independent test points: the ratio
    f(w_Q z) * Q / ((c z + d)^2 f(z)) must be the same +-1 at all three."""
    L = form.level
    a, b, c, d = _al_matrix(L, Q)
    assert a * d - b * c == Q, (a, b, c, d, Q)
    x0 = -d / c
    signs = []
    for tscale in (0.85, 1.0, 1.22):
        y0 = tscale * math.sqrt(Q) / L
        z = complex(x0 + 0.031 * tscale, y0)
        w = (a * z + b) / (c * z + d)
        fz = complex(_direct_series(form, np.array([z.real]), np.array([z.imag]), 1e-12)[0])
        fw = complex(_direct_series(form, np.array([w.real]), np.array([w.imag]), 1e-12)[0])
        ratio = fw * Q / ((c * z + d) ** 2 * fz)
        if abs(ratio.imag) > 1e-6 or abs(abs(ratio.real) - 1.0) > 1e-6:
            raise ValueError(f"AL sign determination unstable at Q={Q}: ratio {ratio}")
        signs.append(1 if ratio.real > 0 else -1)
    if len(set(signs)) != 1:
        raise ValueError(f"AL sign disagrees across test points for Q={Q}")
    return signs[0]


def eval_form_array(form: CuspFormEval, x, y, tol: float = 1e-11) -> np.ndarray:
    """f at arbitrary points: boost to the orbit top, evaluate the
    q-series, transport back:  f(z) = eps(Q) * Q * j^{-2} * f(z_boost),
    j = c z + d for the boosting matrix [a,b;c,d] of determinant Q."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    xb, yb, (A, B, C, D), Q = boost_array(form.level, x, y)
    fb = _qseries(form._coeffs_f, xb, yb, tol)
    j = C * (x + 1j * y) + D
    eps = np.array([form.sign_for(int(q)) for q in Q], dtype=float)
    return eps * Q * fb / (j * j)


def eval_form(form: CuspFormEval, z: UHPoint, tol: float = 1e-11) -> EvalResult:
    v = complex(eval_form_array(form, np.array([z.x]), np.array([z.y]), tol)[0])
    return EvalResult(v, tol + 1e-13 * abs(v))


def al_sign(form: CuspFormEval, Q: int) -> int:
    """Public accessor; Q must exactly divide the level."""
    if Q == 1:
        return 1
    if form.level % Q != 0 or math.gcd(Q, form.level // Q) != 1:
        raise ValueError("Q must exactly divide the level")
    return form.sign_for(Q)
