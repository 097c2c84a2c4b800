import math

import numpy as np
import pytest

from ellrank.domain import (InvarianceError, build_grid, check_invariance,
                            coset_reps, dump_grid, index_psi,
                            integrate_invariant, load_grid, petersson,
                            reduce_to_rep, rs_identity_check, unfolding_check)


def test_coset_counts():
    assert len(coset_reps(1)) == 1
    assert len(coset_reps(11)) == 12
    assert len(coset_reps(154)) == 288
    assert index_psi(154) == 288
    assert index_psi(210) == 576


def test_coset_reps_pairwise_inequivalent():
    for N in (11, 14):
        reps = coset_reps(N)
        for i, r in enumerate(reps):
            for s in reps[i + 1:]:
                # r s^-1 in Gamma_0(N) iff lower-left entry = 0 mod N
                c = r.c * s.d - r.d * s.c
                assert c % N != 0, (N, r, s)


def test_coset_covering(rng):
    # 1000 random modular-group elements each reduce to exactly one rep
    for N in (11, 14, 154):
        reps = coset_reps(N)
        for _ in range(1000):
            a, b, c, d = 1, 0, 0, 1
            for _ in range(4):
                k = int(rng.integers(-3, 4))
                a, b = a + k * c, b + k * d
                a, b, c, d = -c, -d, a, b       # S
            rep = reduce_to_rep(N, (a, b, c, d))
            matches = [
                r for r in reps
                if (r.c * d - r.d * c) % N == 0
            ]
            assert len(matches) == 1 and matches[0] == rep


def test_grid_nodes_in_domain():
    g = build_grid(1, depth=2, y_cut=12.0)
    assert np.all(np.abs(g.xs) <= 0.5 + 1e-12)
    assert np.all(g.xs**2 + g.ys**2 >= 1.0 - 1e-12)
    assert np.all(g.ys <= 12.0 + 1e-12)
    # weights sum to the truncated hyperbolic area
    assert abs(g.ws.sum() - (math.pi / 3.0 - 1.0 / 12.0)) < 1e-10


def test_area_constant_integrand():
    one = lambda x, y: np.ones_like(np.asarray(x))
    r = integrate_invariant(1, one, depth=2, check=False)
    assert abs(r.value.real - (math.pi / 3.0 - 1.0 / 12.0)) < 1e-9
    r11 = integrate_invariant(11, one, depth=2, check=False)
    assert abs(r11.value.real - 12.0 * (math.pi / 3.0 - 1.0 / 12.0)) < 1e-8


def test_invariance_gate_catches_bad_integrand():
    bad = lambda x, y: np.asarray(x) + 1j * np.asarray(y)
    with pytest.raises(InvarianceError):
        check_invariance(11, bad)


def test_grid_dump_restore(tmp_path):
    g = build_grid(11, depth=1, y_cut=8.0)
    path = tmp_path / "grid.txt"
    dump_grid(g, str(path))
    g2 = load_grid(str(path), 11, y_cut=8.0)
    assert np.array_equal(g.xs, g2.xs)
    assert np.array_equal(g.ys, g2.ys)
    assert np.array_equal(g.ws, g2.ws)


def test_petersson_positivity_and_hermitian(form_11a):
    p = petersson(form_11a, form_11a, 11, depth=2)
    assert p.value.real > 0
    assert abs(p.value.imag) < 1e-10
    # converged value (residue law pins the same number independently)
    assert abs(p.value.real - 0.0039083) < 2e-6


def test_petersson_depth_stability(form_11a):
    p2 = petersson(form_11a, form_11a, 11, depth=2)
    p3 = petersson(form_11a, form_11a, 11, depth=3)
    assert abs(p2.value.real - p3.value.real) < 1e-6 * p3.value.real


def test_truncation_tail_honesty(form_11a):
    # raising y_cut from 8 to 16 moves the value by less than the
    # reported bound at y_cut = 8
    p8 = petersson(form_11a, form_11a, 11, depth=3, y_cut=8.0)
    p16 = petersson(form_11a, form_11a, 11, depth=3, y_cut=16.0)
    assert abs(p8.value.real - p16.value.real) <= p8.abs_error_bound


def test_levels_must_divide(form_11a, form_14a):
    with pytest.raises(ValueError):
        petersson(form_11a, form_14a, 11)


def test_unfolding_identity(form_11a, form_14a):
    u = unfolding_check(form_11a, form_11a, 2.0)
    assert u["rel_diff"] < 1e-10
    u = unfolding_check(form_11a, form_14a, 2.0)
    assert u["rel_diff"] < 1e-10
    u = unfolding_check(form_11a, form_11a, 2.5)
    assert u["rel_diff"] < 1e-10


def test_rs_identity_N11(form_11a, rs_11_11):
    chk = rs_identity_check(form_11a, form_11a, 11, 2.0, depth=2, rs=rs_11_11)
    assert chk["resolved_exponent"] == "N^-s d^-s"
    assert chk["diff"] < 1e-4
    # the two printed conventions are far off
    assert chk["rel_diffs"]["d^-2s"] > 1.0


def test_rs_identity_degenerate_s25(form_11a, rs_11_11):
    chk = rs_identity_check(form_11a, form_11a, 11, 2.5, depth=2, rs=rs_11_11)
    assert chk["diff"] < 1e-4


def test_rs_identity_rejects_bad_s(form_11a, rs_11_11):
    with pytest.raises(ValueError):
        rs_identity_check(form_11a, form_11a, 11, 1.1, rs=rs_11_11)


def test_regulator_plumbing(form_11a):
    from ellrank.domain import regulator_integral

    r = regulator_integral(form_11a, form_11a, 11, depth=1)
    assert abs(r.value.imag) < 1e-8 * abs(r.value.real)
    r2 = regulator_integral(form_11a, form_11a, 11, depth=2)
    assert abs(r.value.real - r2.value.real) < 1e-3 * abs(r2.value.real)


def test_cnf_guard_N1(form_11a):
    from ellrank.domain import cnf_rhs

    with pytest.raises(ValueError):
        cnf_rhs(form_11a, form_11a, 1)


def test_regulator_conjugate_symmetry(form_11a, form_14a):
    # value(f, g) = conj(value(g, f)) on the same sweep
    from ellrank.domain import sweep_pair_family, build_grid

    grid = build_grid(154, depth=0, y_cut=8.0)
    a = sweep_pair_family(form_11a, form_14a, 154, grid, want_regulator=True)
    b = sweep_pair_family(form_14a, form_11a, 154, grid, want_regulator=True)
    assert abs(a["regulator"] - b["regulator"].conjugate()) < 1e-8 * abs(a["regulator"])
