import math

import numpy as np
import pytest

from ellrank.eisenstein import (epstein_completed, epstein_lattice,
                                epstein_lattice_raw, epstein_residue,
                                epstein_star_array, epstein_star_theta,
                                kronecker_limit_check, level_eisenstein,
                                level_eisenstein_direct, richardson_limit)
from ellrank.halfplane import UHPoint
from ellrank.specialfn import PoleError


def test_lattice_at_i_closed_form():
    # sum' 1/(m^2+n^2)^2 = 4 zeta(2) beta(2)
    beta2 = 0.915965594177219015  # Catalan
    want = 4.0 * (math.pi**2 / 6.0) * beta2
    got = epstein_lattice(UHPoint(0.0, 1.0), 2.0, tol=1e-12)
    assert abs(got.value - want) < 1e-11
    # and the bare truncated sum approaches it slowly
    raw = epstein_lattice_raw(UHPoint(0.0, 1.0), 2.0, 800)
    assert abs(raw - want) < 1e-5
    assert abs(raw - want) > 1e-8  # genuinely different accuracy class


def test_lattice_translation_and_modular_invariance():
    z = UHPoint(0.37, 1.21)
    a = epstein_lattice(z, 1.5, tol=1e-12).value
    b = epstein_lattice(UHPoint(z.x + 1.0, z.y), 1.5, tol=1e-12).value
    assert abs(a - b) < 1e-12 * abs(a)
    # z -> -1/z
    w = -1.0 / complex(z.x, z.y)
    c = epstein_lattice(UHPoint(w.real, w.imag), 1.5, tol=1e-12).value
    assert abs(a - c) < 1e-10 * abs(a)


def test_lattice_rejects_s_below_1():
    with pytest.raises(ValueError):
        epstein_lattice(UHPoint(0.0, 1.0), 0.9)


def test_mutual_oracle_grid(rng):
    worst = 0.0
    for _ in range(20):
        x = float(rng.uniform(-0.45, 0.45))
        y = float(rng.uniform(0.6, 3.0))
        s = float(rng.uniform(1.2, 3.0))
        bessel = float(epstein_star_array(np.array([x]), np.array([y]), s)[0])
        theta, bound = epstein_star_theta(x, y, s)
        worst = max(worst, abs(bessel / theta - 1.0))
    assert worst < 1e-9


def test_mutual_oracle_at_s_three_halves():
    # pi^{-1.5} Gamma(1.5) * lattice(i, 1.5) against the Fourier form
    b = float(epstein_star_array(np.array([0.0]), np.array([1.0]), 1.5)[0])
    t, _ = epstein_star_theta(0.0, 1.0, 1.5)
    assert abs(b / t - 1.0) < 1e-9


def test_functional_equation_continued_region():
    pts = [(0.0, 1.0), (0.3, 1.7), (-0.2, 0.9), (0.45, 2.4), (0.1, 1.2)]
    for s in (-0.5, 0.25, 0.3, 0.4):
        for x, y in pts:
            a = epstein_completed(UHPoint(x, y), s).value
            b = epstein_completed(UHPoint(x, y), 1.0 - s).value
            assert abs(a - b) < 1e-9


def test_translation_invariance_continued():
    a = epstein_completed(UHPoint(0.2, 1.3), -0.5).value
    b = epstein_completed(UHPoint(1.2, 1.3), -0.5).value
    assert abs(a - b) < 1e-10 * max(1.0, abs(a))


def test_pole_rejection():
    with pytest.raises(PoleError):
        epstein_completed(UHPoint(0.0, 1.0), 1.0)
    with pytest.raises(PoleError):
        epstein_completed(UHPoint(0.0, 1.0), 0.0)


def test_residue_is_one_independent_of_z():
    vals = []
    for x, y in ((0.0, 1.0), (0.5, 3.0), (0.23, 0.9)):
        r = epstein_residue(UHPoint(x, y))
        vals.append(r.value)
        assert abs(r.value - 1.0) < 1e-6
    assert abs(vals[0] - vals[1]) < 1e-6
    # Richardson orders 2 and 3 agree (fine ladder), as do 3 and 4
    def f(h):
        return h * float(epstein_star_array(np.array([0.0]), np.array([1.0]), 1.0 + h)[0])

    r2, _ = richardson_limit(f, 0.001, levels=2)
    r3, _ = richardson_limit(f, 0.001, levels=3)
    assert abs(r2 - r3) < 1e-6
    r3b, _ = richardson_limit(f, 0.01, levels=3)
    r4, _ = richardson_limit(f, 0.01, levels=4)
    assert abs(r3b - r4) < 1e-6


def test_laurent_structure_at_both_poles():
    # residue at 0: s E*(z, s) -> -1, probed from s = -h
    def f0(h):
        s = -h
        return s * float(epstein_star_array(np.array([0.2]), np.array([1.1]), s)[0])

    r0, _ = richardson_limit(f0, 0.01, levels=3)
    assert abs(r0 + 1.0) < 1e-6


def test_kronecker_limit_formula():
    for x, y in ((0.0, 1.0), (0.0, 2.0), (0.3, 1.4)):
        lhs, rhs, diff = kronecker_limit_check(UHPoint(x, y))
        assert abs(diff) < 1e-6, (x, y, lhs, rhs)


def test_kronecker_periodicity():
    l1, _, _ = kronecker_limit_check(UHPoint(0.2, 1.5))
    l2, _, _ = kronecker_limit_check(UHPoint(1.2, 1.5))
    assert abs(l1 - l2) < 1e-8 * max(1.0, abs(l1))


def test_level_eisenstein_against_direct_coset_sum():
    le = level_eisenstein(UHPoint(0.0, 1.0), 2.0, 11)
    ld = level_eisenstein_direct(UHPoint(0.0, 1.0), 2.0, 11, m_max=600, n_width=8000)
    assert abs(le.value / ld - 1.0) < 1e-8
    # N = 1 reduces to E/2 zeta(2s)
    le1 = level_eisenstein(UHPoint(0.3, 1.2), 2.0, 1)
    from ellrank.specialfn import _zeta_raw

    full = epstein_lattice(UHPoint(0.3, 1.2), 2.0, tol=1e-13).value
    assert abs(le1.value - full / (2.0 * _zeta_raw(4.0))) < 1e-11


def test_level_eisenstein_gamma0_invariance():
    # value at z and at z/(11 z + 1) agree (element [1,0;11,1])
    z = complex(0.13, 0.9)
    w = z / (11 * z + 1.0)
    a = level_eisenstein(UHPoint(z.real, z.imag), 2.0, 11).value
    b = level_eisenstein(UHPoint(w.real, w.imag), 2.0, 11).value
    assert abs(a - b) < 1e-8 * abs(a)
