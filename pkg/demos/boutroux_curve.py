"""Find the real cubic whose differential Y dE has purely real periods.

The free parameter is g3 at fixed g2.  For each sign convention of the
cubic we scan g3 for a sign change of Im of the surviving period, refine
it, and compare the resulting shape parameter with h = 3.24638...
"""

from rncurves import crit

print("residual of Y dE along monic_plus (E^3 + E - p):")
fam = crit.FAMILIES["monic_plus"]
for p in (0.1, 0.25, 0.35, 0.45, 0.6):
    rA, rB = crit.boutroux_residual(fam.curve(1.0, p))
    print(f"  p = {p:4.2f}   Im A = {rA:+.3e}   Im B = {rB:+.3e}")

sol = crit.solve_boutroux("monic_plus")
print(f"\nsolution p = {sol.g3:.15f}, roots:")
for r in sol.curve.roots:
    print(f"  {r.real:+.12f} {r.imag:+.12f}i")

print("\nall conventions, sorted by distance to the target h:")
for row in crit.convention_scan():
    h = "-" if row["implied_h"] is None else f"{row['implied_h']:.12f}"
    print(f"  {row['family']:18s} {row['status']:20s} h = {h}")
