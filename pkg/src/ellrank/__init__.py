"""Numerical verification of Rankin-Selberg, Eisenstein-series and
regulator identities for pairs of elliptic curves over Q.

Everything is double precision numpy; exact integer arithmetic is used
where exactness matters (Hecke eigenvalues, cyclotomic polynomials,
coset representatives).
"""

from .arith import moebius, totient, divisors, cyclotomic, recognize_rational
from .curves import (CurveModel, curve_by_label, reduce_mod_p, ap_table, an_table,
                     period_lattice, check_ogg_pm1)
from .specialfn import EvalResult, PoleError, gamma, zeta, zeta_depleted, bessel_k
from .halfplane import UHPoint
from .eisenstein import (
    epstein_lattice,
    epstein_completed,
    epstein_residue,
    kronecker_limit_check,
    level_eisenstein,
)
from .modular import (CuspFormEval, BoostedPoint, eval_form, al_boost, al_sign, eta,
                      log_abs_delta_N, qlog)
from .domain import (CosetRep, QuadratureGrid, coset_reps, build_grid,
                     integrate_invariant, petersson, rs_identity_check,
                     regulator_integral, cnf_rhs, unfolding_check, index_psi)
from .lseries import (RankinSeries, LValueResult, L_direct, Phi, afe_eval,
                      L_derivative_at_0, bad_factor_H, assemble_LH2,
                      order_of_vanishing, residue_at_1, sym2_report)

__all__ = [
    "moebius", "totient", "divisors", "cyclotomic", "recognize_rational",
    "CurveModel", "curve_by_label", "reduce_mod_p", "ap_table", "an_table",
    "period_lattice", "check_ogg_pm1",
    "EvalResult", "PoleError", "gamma", "zeta", "zeta_depleted", "bessel_k",
    "UHPoint",
    "epstein_lattice", "epstein_completed", "epstein_residue",
    "kronecker_limit_check", "level_eisenstein",
    "CuspFormEval", "BoostedPoint", "eval_form", "al_boost", "al_sign", "eta",
    "log_abs_delta_N", "qlog",
    "CosetRep", "QuadratureGrid", "coset_reps", "build_grid",
    "integrate_invariant", "petersson", "rs_identity_check",
    "regulator_integral", "cnf_rhs", "unfolding_check", "index_psi",
    "RankinSeries", "LValueResult", "L_direct", "Phi", "afe_eval",
    "L_derivative_at_0", "bad_factor_H", "assemble_LH2",
    "order_of_vanishing", "residue_at_1", "sym2_report",
]
