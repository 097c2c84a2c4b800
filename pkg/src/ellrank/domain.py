"""Gamma_0(N) coset decomposition and hyperbolic quadrature over X_0(N).

The integration domain is the standard fundamental domain F of the full
modular group, truncated at y_cut, swept through the psi(N) coset
representatives:  Int_{X_0(N)} H dmu = sum_j Int_F H(gamma_j z) dmu.

Quadrature: tensor Gauss-Legendre panels in x, geometric panel
subdivision in y starting at the arc |z| = 1; node weights carry the
hyperbolic measure dx dy / y^2.  Cusp truncation tail: every pair
integrand decays like C e^{-2 pi y (1/w_f + 1/w_g)} into each cusp
(w = cusp width <= the form's level), so the neglected mass beyond
y_cut = 12 is below 1e-7 for the levels used here; the reported error
bound is the depth-doubling difference plus that tail estimate.

Summation: per-rep partial sums in fixed rep order, combined with
math.fsum; identical results for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import divisors, moebius
from .halfplane import apply_moebius
from .modular import (
    CuspFormEval,
    cyclotomic_qlog_sum_array,
    eval_form_array,
    log_abs_delta_N_array,
)
from .specialfn import EvalResult, _gamma_raw


@dataclass(frozen=True)
class CosetRep:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant must be 1")

    @property
    def row(self):
        return (self.c, self.d)


@lru_cache(maxsize=None)
def _p1_classes(N: int) -> tuple:
    """Canonical representatives of P^1(Z/N): orbits of unit scaling."""
    units = [u for u in range(1, N) if math.gcd(u, N) == 1] or [1]
    seen = set()
    classes = []
    for c in range(N):
        for d in range(N):
            if math.gcd(math.gcd(c, d), N) != 1:
                continue
            if (c, d) in seen:
                continue
            orbit = {((u * c) % N, (u * d) % N) for u in units}
            canon = min(orbit)
            seen.update(orbit)
            classes.append(canon)
    return tuple(sorted(classes))


def _class_of(c: int, d: int, N: int) -> tuple[int, int]:
    units = [u for u in range(1, N) if math.gcd(u, N) == 1] or [1]
    return min(((u * c) % N, (u * d) % N) for u in units)


@lru_cache(maxsize=None)
def coset_reps(N: int) -> tuple[CosetRep, ...]:
    """Representatives of Gamma_0(N) \\ SL2(Z), exactly psi(N) of them,
    one per class of the bottom row in P^1(Z/N)."""
    reps = []
    for c0, d0 in _p1_classes(N):
        lift = None
        if c0 == 0:
            lift = (0, 1)
        else:
            for k in range(N + 1):
                for dd in (d0 + k * N, d0 - k * N):
                    if math.gcd(c0, dd) == 1:
                        lift = (c0, dd)
                        break
                if lift:
                    break
        c, d = lift
        # a d - b c = 1
        g, a, negb = _ext_gcd(d, c)
        assert g == 1
        reps.append(CosetRep(a, -negb, c, d))
    assert len(reps) == index_psi(N)
    return tuple(reps)


def _ext_gcd(p: int, q: int):
    if q == 0:
        return (p, 1, 0) if p >= 0 else (-p, -1, 0)
    g, s, t = _ext_gcd(q, p % q)
    return g, t, s - (p // q) * t


def _isprime(p: int) -> bool:
    return p > 1 and all(p % k for k in range(2, int(math.isqrt(p)) + 1))


def index_psi(N: int) -> int:
    """[SL2(Z) : Gamma_0(N)] = N prod_{p|N} (1 + 1/p)."""
    psi = N
    for p in {p for p in range(2, N + 1) if N % p == 0 and _isprime(p)}:
        psi = psi // p * (p + 1)
    return psi


@lru_cache(maxsize=None)
def _class_to_rep(N: int) -> dict:
    return {_class_of(rep.c % N, rep.d % N, N): rep for rep in coset_reps(N)}


def reduce_to_rep(N: int, mat: tuple[int, int, int, int]) -> CosetRep:
    """The unique coset representative equivalent to the given matrix."""
    a, b, c, d = mat
    if a * d - b * c != 1:
        raise ValueError("not unimodular")
    return _class_to_rep(N)[_class_of(c % N, d % N, N)]


# ------------------------------------------------------------------ grid

@dataclass
class QuadratureGrid:
    level: int
    reps: tuple
    xs: np.ndarray
    ys: np.ndarray
    ws: np.ndarray            # includes the 1/y^2 hyperbolic density
    y_cut: float
    depth: int


def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def build_grid(level: int, depth: int = 2, y_cut: float = 12.0,
               nx_base: int = 4, gl_order: int = 6) -> QuadratureGrid:
    """Tensor panel grid on F intersected with {y <= y_cut}."""
    gx, gw = _gauss_legendre(gl_order)
    n_panels = max(1, round(nx_base * 2.0**depth))
    edges = np.linspace(-0.5, 0.5, n_panels + 1)
    xs_all, ys_all, ws_all = [], [], []
    rho = 2.0 ** (2.0 ** (1 - depth))
    for i in range(n_panels):
        x0, x1 = edges[i], edges[i + 1]
        xm, xh = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
        xn = xm + xh * gx
        wxn = xh * gw
        for x, wx in zip(xn, wxn):
            ylow = math.sqrt(max(1.0 - x * x, 0.0))
            b = ylow
            while b < y_cut - 1e-12:
                t = min(b * rho, y_cut)
                ym, yh = 0.5 * (b + t), 0.5 * (t - b)
                yn = ym + yh * gx
                wyn = yh * gw
                xs_all.append(np.full_like(yn, x))
                ys_all.append(yn)
                ws_all.append(wx * wyn / yn**2)
                b = t
    return QuadratureGrid(
        level=level,
        reps=coset_reps(level),
        xs=np.concatenate(xs_all),
        ys=np.concatenate(ys_all),
        ws=np.concatenate(ws_all),
        y_cut=y_cut,
        depth=depth,
    )


def dump_grid(grid: QuadratureGrid, path: str):
    with open(path, "w") as fh:
        for x, y, w in zip(grid.xs, grid.ys, grid.ws):
            fh.write(f"{float(x)!r} {float(y)!r} {float(w)!r}\n")


def load_grid(path: str, level: int, y_cut: float = 12.0, depth: int = -1) -> QuadratureGrid:
    xs, ys, ws = [], [], []
    with open(path) as fh:
        for line in fh:
            x, y, w = (float(t) for t in line.split())
            xs.append(x); ys.append(y); ws.append(w)
    return QuadratureGrid(level, coset_reps(level), np.array(xs), np.array(ys),
                          np.array(ws), y_cut, depth)


def random_gamma0_elements(N: int, count: int, seed: int = 7,
                           max_entry: int = 4000) -> list[tuple]:
    """Random words in Gamma_0(N) with bounded entries.  The bound keeps
    image points representable in double precision: an element moves a
    point down to height y/|cz+d|^2 and any evaluation there carries a
    relative error ~eps |cz+d|^2 / y, so 1e-8 invariance checks need
    entries of a few thousand at most."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a, b, c, d = 1, 0, 0, 1
        for _ in range(3):
            k = int(rng.integers(-2, 3))
            a, b = a + k * c, b + k * d              # T^k
            m = int(rng.integers(-1, 2))
            c, d = c + m * N * a, d + m * N * b      # V^m
        if max(abs(a), abs(b), abs(c), abs(d)) <= max_entry:
            out.append((a, b, c, d))
    return out


class InvarianceError(ValueError):
    pass


def check_invariance(N: int, H, tol: float = 1e-7, seed: int = 7):
    """Stochastic Gamma_0(N)-invariance gate: 5 random group elements."""
    pts_x = np.array([0.07, -0.31, 0.42])
    pts_y = np.array([0.83, 1.21, 0.95])
    base = H(pts_x, pts_y)
    scale = float(np.max(np.abs(base))) or 1.0
    for g in random_gamma0_elements(N, 5, seed=seed):
        a, b, c, d = g
        gx, gy = apply_moebius(np.full(3, a), np.full(3, b), np.full(3, c),
                               np.full(3, d), pts_x, pts_y)
        moved = H(gx, gy)
        if np.max(np.abs(moved - base)) > tol * scale:
            raise InvarianceError(f"integrand not Gamma_0({N})-invariant at element {g}")


def _sweep(grid: QuadratureGrid, H, workers: int = 1) -> complex:
    def one(rep):
        wx, wy = apply_moebius(rep.a, rep.b, rep.c, rep.d, grid.xs, grid.ys)
        vals = H(wx, wy)
        return complex(np.sum(vals * grid.ws))

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            partials = list(ex.map(one, grid.reps))
    else:
        partials = [one(rep) for rep in grid.reps]
    return complex(math.fsum(p.real for p in partials),
                   math.fsum(p.imag for p in partials))


_GRID_CACHE: dict = {}


def _grid_pair(N: int, depth: int, y_cut: float):
    key = (N, depth, y_cut)
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = build_grid(N, depth, y_cut)
    return _GRID_CACHE[key]


def pair_tail_bound(fe: CuspFormEval, ge: CuspFormEval, N: int, y_cut: float,
                    extra_linear: float = 0.0) -> float:
    """Cusp-truncation bound for integrands f conj(g) y^2 * (weight):
    the slowest decay over the cusps of X_0(N) is
    exp(-2 pi y (1/level_f + 1/level_g)) with leading coefficients
    <= 1/level each; extra_linear adds a factor (1 + extra_linear*y)
    for logarithmically/linearly growing weights (log|Delta_N|)."""
    # leading local Fourier mass at the slowest cusp family integrates to
    # ~(1/4 pi) e^{-rate y}; one family per divisor of N, factor 4 slack
    # (empirically ~25x above the measured tail for the 11a/14a pairs)
    rate = 2.0 * math.pi * (1.0 / fe.level + 1.0 / ge.level)
    return (len(divisors(N)) * (1.0 + extra_linear * y_cut)
            * math.exp(-rate * y_cut))


def integrate_invariant(N: int, H, grid: QuadratureGrid | None = None,
                        depth: int = 2, y_cut: float = 12.0,
                        check: bool = True, workers: int = 1) -> EvalResult:
    """Int_{X_0(N)} H dmu by coset sweep.

    Error estimate: depth-doubling difference.  The cusp-truncation tail
    beyond y_cut is integrand specific and not included here; the pair
    operations add pair_tail_bound."""
    if grid is None:
        grid = _grid_pair(N, depth, y_cut)
    if check:
        check_invariance(N, H)
    fine = _sweep(grid, H, workers=workers)
    coarse_grid = _grid_pair(N, grid.depth - 1, grid.y_cut)
    coarse = _sweep(coarse_grid, H, workers=workers)
    return EvalResult(fine, abs(fine - coarse))


def pair_integrand(fe: CuspFormEval, ge: CuspFormEval, tol: float = 1e-11):
    """H(z) = f(z) conj(g(z)) y^2, Gamma_0(lcm)-invariant."""
    def H(x, y):
        F = eval_form_array(fe, x, y, tol)
        G = eval_form_array(ge, x, y, tol)
        return F * np.conj(G) * np.asarray(y) ** 2

    return H


def petersson(fe: CuspFormEval, ge: CuspFormEval, N: int,
              grid: QuadratureGrid | None = None, depth: int = 2,
              y_cut: float = 12.0, workers: int = 1) -> EvalResult:
    """(f, g) = (1/psi(N)) Int_{X_0(N)} f conj(g) y^2 dmu."""
    if N % fe.level or N % ge.level:
        raise ValueError("both levels must divide N")
    res = integrate_invariant(N, pair_integrand(fe, ge), grid=grid, depth=depth,
                              y_cut=y_cut, workers=workers)
    psi = index_psi(N)
    ycut = grid.y_cut if grid is not None else y_cut
    tail = pair_tail_bound(fe, ge, N, ycut)
    return EvalResult(res.value / psi, (res.abs_error_bound + tail) / psi)


# ------------------------------------------------- multi-integrand sweep

def sweep_pair_family(fe: CuspFormEval, ge: CuspFormEval, N: int,
                      grid: QuadratureGrid, s_values: tuple = (),
                      want_regulator: bool = False, want_cnf: bool = False,
                      want_norms: bool = False, workers: int = 1,
                      tol: float = 1e-11) -> dict:
    """One pass over the coset sweep computing, simultaneously:

      'pet_fg'             Int f conj(g) y^2 dmu
      'pet_ff', 'pet_gg'   the two norms (want_norms)
      ('eis', s, d)        Int f conj(g) y^2 E*(N z / d, s) dmu per d | N
      'regulator'          Int log|Delta_N| f conj(g) y^2 dmu
      'cnf'                Int [sum_k qlog(., xi^k)] f conj(g) y^2 dmu
      'cnf_deep_measure'   hyperbolic measure of nodes on the eta fallback

    Values are plain complex integrals over X_0(N) (no 1/psi).
    """
    from .eisenstein import epstein_star_array
    from .halfplane import boost_array

    divs = [d for d in divisors(N)] if s_values else []

    def one(rep):
        out = {}
        wx, wy = apply_moebius(rep.a, rep.b, rep.c, rep.d, grid.xs, grid.ys)
        F = eval_form_array(fe, wx, wy, tol)
        G = eval_form_array(ge, wx, wy, tol)
        base = F * np.conj(G) * wy**2 * grid.ws
        out["pet_fg"] = complex(np.sum(base))
        if want_norms:
            out["pet_ff"] = complex(np.sum(F * np.conj(F) * wy**2 * grid.ws))
            out["pet_gg"] = complex(np.sum(G * np.conj(G) * wy**2 * grid.ws))
        for s in s_values:
            for d in divs:
                estar = epstein_star_array(N * wx / d, N * wy / d, s)
                out[("eis", s, d)] = complex(np.sum(base * estar))
        if want_regulator:
            out["regulator"] = complex(np.sum(base * log_abs_delta_N_array(wx, wy, N)))
        if want_cnf:
            rx, ry, _, _ = boost_array(N, wx, wy, allowed_q=[1])
            vals, deep = cyclotomic_qlog_sum_array(rx, ry, N)
            out["cnf"] = complex(np.sum(base * vals))
            out["cnf_deep_measure"] = complex(np.sum(grid.ws * deep))
        return out

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            partials = list(ex.map(one, grid.reps))
    else:
        partials = [one(rep) for rep in grid.reps]
    keys = partials[0].keys()
    return {
        k: complex(math.fsum(p[k].real for p in partials),
                   math.fsum(p[k].imag for p in partials))
        for k in keys
    }


def rs_identity_check(fe: CuspFormEval, ge: CuspFormEval, N: int, s: float,
                      depth: int = 2, y_cut: float = 12.0, workers: int = 1,
                      rs=None) -> dict:
    """Rankin-Selberg unfolding identity at s > 1:

        lhs = 2 (4 pi)^{-s-1} Gamma(s+1) L_{f,g}(s)         (series side)
        rhs = N^{-s} sum_{d|N} mu(d) d^{-s} J_d,            (quadrature)
              J_d = Int_{X_0(N)} f conj(g) y^2 E(N z/d, s) dmu

    The two printed exponent conventions (d^{-2s}, and d^{-s} with no
    N^{-s}) are evaluated alongside; the dict reports all three and
    which one closes.
    """
    from .lseries import L_direct, RankinSeries

    if not 1.2 < s <= 3.0:
        raise ValueError("rs identity checked for s in (1.2, 3]")
    if rs is None:
        rs = RankinSeries.build(fe, ge)
    grid = _grid_pair(N, depth, y_cut)
    fam = sweep_pair_family(fe, ge, N, grid, s_values=(s,), workers=workers)
    conv = math.pi**s / _gamma_raw(s)     # E = pi^s/Gamma(s) E*
    J = {d: conv * fam[("eis", s, d)] for d in divisors(N)}
    lhs = 2.0 * (4.0 * math.pi) ** (-s - 1.0) * _gamma_raw(s + 1.0) * L_direct(rs, s).value
    variants = {
        "N^-s d^-s": float(N) ** (-s) * sum(moebius(d) * float(d) ** (-s) * J[d].real for d in divisors(N)),
        "d^-s": sum(moebius(d) * float(d) ** (-s) * J[d].real for d in divisors(N)),
        "d^-2s": sum(moebius(d) * float(d) ** (-2.0 * s) * J[d].real for d in divisors(N)),
    }
    diffs = {k: abs(lhs - v) / max(abs(lhs), 1e-300) for k, v in variants.items()}
    resolved = min(diffs, key=diffs.get)
    return {
        "s": s,
        "lhs": lhs,
        "rhs": variants,
        "rel_diffs": diffs,
        "resolved_exponent": resolved,
        "diff": diffs[resolved],
    }


def regulator_integral(fe: CuspFormEval, ge: CuspFormEval, N: int,
                       depth: int = 2, y_cut: float = 12.0,
                       workers: int = 1) -> EvalResult:
    """-(pi/3) Int_{X_0(N)} log|Delta_N(z)| f conj(g) y^2 dmu  (= Phi(0)
    for coprime square-free levels with at least two primes dividing N)."""
    grid = _grid_pair(N, depth, y_cut)
    fam = sweep_pair_family(fe, ge, N, grid, want_regulator=True, workers=workers)
    coarse = sweep_pair_family(fe, ge, N, _grid_pair(N, depth - 1, y_cut),
                               want_regulator=True, workers=workers)
    val = -(math.pi / 3.0) * fam["regulator"]
    err = abs(val - (-(math.pi / 3.0) * coarse["regulator"]))
    return EvalResult(val, err + 1e-12 * abs(val))


def cnf_rhs(fe: CuspFormEval, ge: CuspFormEval, N: int, depth: int = 2,
            y_cut: float = 12.0, workers: int = 1) -> dict:
    """Cyclotomic q-logarithm side of the class-number formula, without
    the H(0) prefactor:

        sum_{(k,N)=1} (1/2 pi i) Int log_q(xi^k) f conj(g) dq/q dqbar/qbar
          = -4 pi Int_{X_0(N)} [sum_k qlog(z, xi^k)] f conj(g) y^2 dmu,

    the k-sum evaluated through cyclotomic polynomials (head) plus the
    closed geometric tail; 'deep_fraction' reports how much hyperbolic
    measure fell back to the eta route near the cusps.
    """
    if N <= 1:
        raise ValueError("cnf_rhs needs N > 1 (no primitive residues otherwise)")
    grid = _grid_pair(N, depth, y_cut)
    fam = sweep_pair_family(fe, ge, N, grid, want_cnf=True, workers=workers)
    coarse = sweep_pair_family(fe, ge, N, _grid_pair(N, depth - 1, y_cut),
                               want_cnf=True, workers=workers)
    val = -4.0 * math.pi * fam["cnf"]
    err = abs(val - (-4.0 * math.pi * coarse["cnf"]))
    total_measure = len(grid.reps) * (math.pi / 3.0 - 1.0 / y_cut)
    return {
        "value": val,
        "error": err,
        "deep_fraction": fam["cnf_deep_measure"].real / total_measure,
    }


def unfolding_check(fe: CuspFormEval, ge: CuspFormEval, s: float,
                    n_terms: int = 400) -> dict:
    """Pure series identity behind the unfolding (no coset machinery):

        Int_0^inf y^s [sum_{n <= M} a_n b_n e^{-4 pi n y}] dy
          = (4 pi)^{-s-1} Gamma(s+1) sum_{n <= M} a_n b_n n^{-(s+1)},

    the left side by panel Gauss-Legendre quadrature."""
    a = fe.table.coefficients[: n_terms + 1].astype(float)
    b = ge.table.coefficients[: n_terms + 1].astype(float)
    ns = np.arange(1, n_terms + 1, dtype=float)
    ab = a[1:] * b[1:]
    gx, gw = _gauss_legendre(24)
    # panels refined geometrically toward 0: the truncated exponential
    # sum varies on the scale 1/(4 pi n_terms) there
    y0 = 1.0 / (8.0 * math.pi * n_terms)
    edges = [0.0] + [y0 * 2.0**k for k in range(0, 22) if y0 * 2.0**k < 40.0] + [40.0]
    lhs = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        ym, yh = 0.5 * (hi + lo), 0.5 * (hi - lo)
        yn = ym + yh * gx
        wn = yh * gw
        vals = yn**s * np.sum(ab[:, None] * np.exp(-4.0 * math.pi * ns[:, None] * yn), axis=0)
        lhs += float(np.sum(vals * wn))
    rhs = (4.0 * math.pi) ** (-s - 1.0) * _gamma_raw(s + 1.0) * float(np.sum(ab * ns ** (-(s + 1.0))))
    return {"lhs": lhs, "rhs": rhs, "rel_diff": abs(lhs - rhs) / abs(rhs)}
