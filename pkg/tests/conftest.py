import numpy as np
import pytest

from ellrank.curves import curve_by_label
from ellrank.modular import CuspFormEval


@pytest.fixture(scope="session")
def form_11a():
    return CuspFormEval.from_curve(curve_by_label("11a"), n_max=4200)


@pytest.fixture(scope="session")
def form_14a():
    return CuspFormEval.from_curve(curve_by_label("14a"), n_max=4200)


@pytest.fixture(scope="session")
def form_15a():
    return CuspFormEval.from_curve(curve_by_label("15a"), n_max=4200)


@pytest.fixture(scope="session")
def rs_11_14(form_11a, form_14a):
    from ellrank.lseries import RankinSeries

    return RankinSeries.build(form_11a, form_14a)


@pytest.fixture(scope="session")
def rs_11_11(form_11a):
    from ellrank.lseries import RankinSeries

    return RankinSeries.build(form_11a, form_11a)


@pytest.fixture(scope="session")
def big_tables():
    """Coefficient tables to n_max = 120000 for the pipeline-agreement
    tests (enumeration to 1e4, BSGS beyond; ~20 s, built once)."""
    from ellrank.curves import an_table, ap_table

    n_max = 120_000
    out = {}
    for label in ("11a", "14a"):
        curve = curve_by_label(label)
        ap = ap_table(curve, n_max, workers=4)
        out[label] = an_table(curve.conductor, ap, n_max)
    return out


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
