"""Traces of Frobenius, Hecke eigenvalues and periods for a few curves.

Counts points on y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_p
(exhaustively below 1e4, baby-step/giant-step with the quadratic-twist
constraint above), assembles the Hecke eigenvalue table, and computes
the period lattice by complex AGM.
"""

from ellrank import an_table, ap_table, check_ogg_pm1, curve_by_label, period_lattice

for label in ("11a", "14a", "15a"):
    curve = curve_by_label(label)
    print(f"curve {label}: a-invariants {curve.ainvs}, conductor {curve.conductor}, "
          f"discriminant {curve.discriminant}")

curve = curve_by_label("11a")
table = ap_table(curve, 60)
print("\na_p for 11a up to 60 (Hasse bound |a_p| <= 2 sqrt p):")
for p, info in table.items():
    print(f"  p={p:3d}  a_p={info.ap:4d}  {info.kind}")

print("\nOgg: at p | N (square-free N) the eigenvalue is +-1:")
for label in ("11a", "14a"):
    rep = check_ogg_pm1(curve_by_label(label))
    print(f"  {label}: {rep['primes']}  all +-1: {rep['all_pm1']}")

an = an_table(11, ap_table(curve, 2000), 2000)
print("\nHecke recursion (a_4 = a_2^2 - 2, a_6 = a_2 a_3, multiplicative):")
print("  a_1..a_10 =", [an.a(n) for n in range(1, 11)])

lat = period_lattice(curve)
print(f"\nperiod lattice of 11a: omega1 = {lat.omega1:.12f}")
print(f"  omega2 = {lat.omega2:.12f}")
print(f"  area = {lat.area:.12f}, Legendre residual = {lat.legendre_residual:.2e}")
print(f"  (the Legendre relation eta1 w2 - eta2 w1 = 2 pi i gates the AGM code)")
