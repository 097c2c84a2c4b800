"""Rankin-Selberg convolution: unfolding, the L-function and its poles.

The strip-unfolding identity is a pure series identity; the full
Rankin-Selberg identity compares the Dirichlet series side against
hyperbolic quadrature of f conj(g) y^2 against Epstein series over
X_0(N).  The analytic continuation (approximate functional equation)
gives values inside the critical strip, residues and pole orders.
"""

from ellrank import (RankinSeries, assemble_LH2, curve_by_label, order_of_vanishing,
                     residue_at_1, rs_identity_check, unfolding_check)
from ellrank.lseries import L_direct, afe_eval
from ellrank.modular import CuspFormEval

f11 = CuspFormEval.from_curve(curve_by_label("11a"), n_max=4200)
f14 = CuspFormEval.from_curve(curve_by_label("14a"), n_max=4200)
rs = RankinSeries.build(f11, f14)
rs_iso = RankinSeries.build(f11, f11)

u = unfolding_check(f11, f11, 2.0)
print(f"strip unfolding at s=2: rel diff {u['rel_diff']:.2e}")

print("\nRankin-Selberg identity at s=2, N=11 (series vs quadrature):")
chk = rs_identity_check(f11, f11, 11, 2.0, depth=2, rs=rs_iso)
for k, v in chk["rel_diffs"].items():
    print(f"  exponent {k:10s}: rel diff {v:.2e}")
print(f"  resolved exponent: {chk['resolved_exponent']}")

print("\nL_{f,g} values (11a x 14a):")
print(f"  L(2)  direct  = {L_direct(rs, 2.0).value:.12f}")
print(f"  Phi(0) = L'(0) = {afe_eval(rs, 0.0).value:.12f}   (AFE)")

res = residue_at_1(rs_iso)
print(f"\nresidue of Phi at s=1 for 11a x 11a: {res['residue']:.10f} "
      f"(split spread {res['spread']:.1e})")

print("\npole orders of L(H^2(E x E'), s) at s = 2 (Tate):")
for name, r in (("11a x 11a", rs_iso), ("11a x 14a", rs)):
    o = order_of_vanishing(lambda s: assemble_LH2(r, s), 2.0)
    print(f"  {name}: order {o['order']} (slope residual {o['residual']:.3f})")
