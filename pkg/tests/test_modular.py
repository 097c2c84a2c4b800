import cmath
import math

import numpy as np
import pytest

from ellrank.curves import curve_by_label
from ellrank.halfplane import UHPoint, apply_moebius
from ellrank.modular import (al_boost, al_sign, cyclotomic_qlog_sum_array, delta,
                             delta_qseries, eta, eval_form, eval_form_array,
                             log_abs_delta_N, log_abs_delta_N_array, log_abs_eta,
                             qlog, series_length)


def eta_product_oracle(z, terms=100):
    """100-term raw product at 50-digit precision (mpmath)."""
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 50
    q = mp.e ** (2j * mp.pi * mp.mpc(z.x, z.y))
    acc = q ** (mp.mpf(1) / 24)
    for n in range(1, terms + 1):
        acc *= 1 - q**n
    return complex(acc)


def test_eta_at_i():
    v = eta(UHPoint(0.0, 1.0)).value
    assert abs(abs(v) - 0.7682254223260566) < 1e-12
    assert abs(v - eta_product_oracle(UHPoint(0.0, 1.0))) < 1e-13


def test_eta_translation_multiplier():
    z = UHPoint(0.13, 0.77)
    ratio = eta(UHPoint(z.x + 1.0, z.y)).value / eta(z).value
    assert abs(ratio - cmath.exp(1j * math.pi / 12.0)) < 1e-12


def test_delta_against_qseries_oracle():
    z = UHPoint(0.21, 0.83)
    assert abs(delta(z).value - delta_qseries(z, 50)) < 1e-14


def test_eta_nonvanishing(rng):
    for _ in range(25):
        z = UHPoint(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(0.05, 4.0)))
        assert abs(eta(z).value) > 0


def test_log_abs_eta_transport():
    # deep point: reduce and compare against the direct product at the
    # equivalent high point
    z = UHPoint(0.123456, 3e-4)
    v = log_abs_eta(z.x, z.y)
    assert math.isfinite(v)
    # weight-1/2 consistency: |eta(-1/z)| = |z|^(1/2) |eta(z)|
    z2 = UHPoint(0.2, 0.7)
    w = -1.0 / z2.z
    lhs = log_abs_eta(w.real, w.imag)
    rhs = 0.5 * math.log(abs(z2.z)) + log_abs_eta(z2.x, z2.y)
    assert abs(lhs - rhs) < 1e-12


def test_form_values_and_modularity(form_11a):
    # tail at z = 5i: |q| = e^{-10 pi}; 30 terms are overkill
    z = UHPoint(0.0, 5.0)
    v = eval_form(form_11a, z).value
    q = cmath.exp(2j * math.pi * z.z)
    partial = sum(form_11a.table.a(n) * q**n for n in range(1, 31))
    assert abs(v - partial) < 1e-14
    # periodicity
    a = eval_form(form_11a, UHPoint(0.3, 1.1)).value
    b = eval_form(form_11a, UHPoint(-0.7, 1.1)).value
    assert abs(a - b) < 1e-12
    # weight-2 modularity for [4,1;11,3] at z = 0.2 + 0.8i
    z0 = complex(0.2, 0.8)
    w = (4 * z0 + 1) / (11 * z0 + 3)
    fz = eval_form(form_11a, UHPoint(z0.real, z0.imag)).value
    fw = eval_form(form_11a, UHPoint(w.real, w.imag)).value
    assert abs(fw - (11 * z0 + 3) ** 2 * fz) < 1e-8 * abs(fw)


def test_eval_form_requires_table_length(form_11a):
    from ellrank.curves import an_table, ap_table

    short = type(form_11a)(
        table=an_table(11, ap_table(curve_by_label("11a"), 4), 4),
        level=11,
        al_signs={11: -1},
    )
    with pytest.raises(ValueError, match="n_max"):
        eval_form(short, UHPoint(0.2, 0.9), tol=1e-14)


def test_al_boost_examples(form_11a):
    bp = al_boost(11, UHPoint(0.0, 10.0))
    assert bp.boosted.y == 10.0 and bp.det == 1       # already maximal
    bp = al_boost(11, UHPoint(0.0, 1.0 / 11.0))
    assert bp.boosted.y >= math.sqrt(3.0) / 22.0
    # idempotence
    bp2 = al_boost(11, bp.boosted)
    assert abs(bp2.boosted.y - bp.boosted.y) < 1e-12
    # transport reproduces the boosted point
    a, b, c, d = bp.matrix
    xn, yn = apply_moebius(a, b, c, d, np.array([0.0]), np.array([1.0 / 11.0]))
    assert abs(xn[0] - bp.boosted.x) < 1e-12
    assert abs(yn[0] - bp.boosted.y) < 1e-12 * bp.boosted.y


def test_boost_floor_guarantee(rng):
    from ellrank.halfplane import boost_array

    for N in (11, 14, 154):
        x = rng.uniform(-0.5, 0.5, 1000)
        y = np.exp(rng.uniform(math.log(1e-4), 0.0, 1000))
        _, yb, _, _ = boost_array(N, x, y)
        assert yb.min() >= math.sqrt(3.0) / (2.0 * N) * (1.0 - 1e-9), N


def test_al_signs(form_11a, form_14a):
    # involution: applying w_Q twice returns the original values
    assert al_sign(form_11a, 11) in (-1, 1)
    # for p || N the eigenvalue is -a_p; verified numerically
    assert al_sign(form_11a, 11) == -form_11a.table.a(11)
    assert al_sign(form_14a, 2) == -form_14a.table.a(2)
    assert al_sign(form_14a, 7) == -form_14a.table.a(7)
    # Fricke sign = product over Q || N
    assert al_sign(form_14a, 14) == al_sign(form_14a, 2) * al_sign(form_14a, 7)
    with pytest.raises(ValueError):
        al_sign(form_14a, 4)


def test_fricke_involution_numerically(form_14a):
    # f(w_N z) = eps_N (N z)^2 / N f(z) with w_N = [0,-1;N,0]
    N = 14
    z = complex(0.05, 0.35)
    w = -1.0 / (N * z)
    fz = eval_form(form_14a, UHPoint(z.real, z.imag)).value
    fw = eval_form(form_14a, UHPoint(w.real, w.imag)).value
    eps = al_sign(form_14a, 14)
    assert abs(fw - eps * (N * z**2) * fz) < 1e-8 * abs(fw)


def test_log_abs_delta_N_examples():
    z = UHPoint(0.21, 0.53)
    # N = 1 reduces to log|Delta|
    from ellrank.modular import log_abs_delta_array

    v1 = log_abs_delta_N(z, 1).value
    v2 = float(log_abs_delta_array(np.array([z.x]), np.array([z.y]))[0])
    assert abs(v1 - v2) < 1e-12
    # Gamma_0(14) invariance via [3,1;14,5]
    w = (3 * z.z + 1) / (14 * z.z + 5)
    a = log_abs_delta_N(z, 14).value
    b = log_abs_delta_N(UHPoint(w.real, w.imag), 14).value
    assert abs(a - b) < 1e-9


def test_asai_product_form():
    # log|Delta_N(z)| = log|q^phi(N) prod Phi_N(q^n)^24| at z = 0.1+0.9i, N = 6
    from ellrank.arith import cyclotomic, totient

    z = UHPoint(0.1, 0.9)
    N = 6
    q = cmath.exp(2j * math.pi * z.z)
    poly = cyclotomic(N)
    rhs = totient(N) * math.log(abs(q))
    for n in range(1, 60):
        rhs += 24.0 * math.log(abs(poly(q**n)))
    assert abs(log_abs_delta_N(z, N).value - rhs) < 1e-9


def test_qlog_definitions():
    z = UHPoint(0.3, 1.2)
    assert abs(qlog(z, 1.0) - log_abs_eta(z.x, z.y)) < 1e-12
    # partial-sum oracle at q real, t = -1
    zi = UHPoint(0.0, 0.9)
    q = math.exp(-2.0 * math.pi * 0.9)
    acc = math.log(abs(q * -1.0)) / 24.0
    for n in range(1, 10_001):
        acc += math.log(abs(1.0 - q**n * -1.0))
    assert abs(qlog(zi, -1.0) - acc) < 1e-10


def test_qlog_bridge_to_delta_N():
    # sum over primitive k mod N of qlog(z, xi^k) = (1/24) log|Delta_N|
    N = 6
    z = UHPoint(0.1, 0.9)
    s = sum(qlog(z, cmath.exp(2j * math.pi * k / N))
            for k in range(1, N + 1) if math.gcd(k, N) == 1)
    assert abs(s - log_abs_delta_N(z, N).value / 24.0) < 1e-9


def test_cyclotomic_qlog_sum_matches_eta_route(rng):
    xs = rng.uniform(-0.5, 0.5, 200)
    ys = np.exp(rng.uniform(math.log(3e-3), math.log(2.0), 200))
    for N in (6, 14, 154):
        v1, deep = cyclotomic_qlog_sum_array(xs, ys, N)
        v2 = log_abs_delta_N_array(xs, ys, N) / 24.0
        assert not deep.any()
        assert np.max(np.abs(v1 - v2)) < 1e-9, N


def test_assembled_integrand_invariance(form_11a, form_14a, rng):
    from ellrank.domain import random_gamma0_elements

    N = 154
    x = rng.uniform(-0.4, 0.4, 6)
    y = rng.uniform(0.7, 1.4, 6)
    F = eval_form_array(form_11a, x, y)
    G = eval_form_array(form_14a, x, y)
    base = F * np.conj(G) * y**2
    for g in random_gamma0_elements(N, 20, seed=3):
        a, b, c, d = g
        gx, gy = apply_moebius(np.full(6, a), np.full(6, b), np.full(6, c),
                               np.full(6, d), x, y)
        F2 = eval_form_array(form_11a, gx, gy)
        G2 = eval_form_array(form_14a, gx, gy)
        moved = F2 * np.conj(G2) * gy**2
        assert np.max(np.abs(moved - base)) < 1e-8 * max(1e-30, np.max(np.abs(base)))


def test_cyclotomic_qlog_head_doubling(rng):
    # doubling the truncation head changes nothing above 1e-9
    xs = rng.uniform(-0.5, 0.5, 60)
    ys = np.exp(rng.uniform(math.log(4e-3), math.log(1.5), 60))
    a, _ = cyclotomic_qlog_sum_array(xs, ys, 154, head=48)
    b, _ = cyclotomic_qlog_sum_array(xs, ys, 154, head=96)
    assert np.max(np.abs(a - b)) < 1e-9


def test_series_length_monotone():
    assert series_length(0.5, 1e-12) < series_length(0.05, 1e-12)
    with pytest.raises(ValueError):
        series_length(1e-9, 1e-300)
