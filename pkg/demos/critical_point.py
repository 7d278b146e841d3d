"""The Boutroux curve is a critical point of Re H3 on the level set of H_{-1}.

Curves are charted by (Re g2, Im g2, Re g3, Im g3).  Fixing the complex
value of H_{-1} cuts out a two-dimensional leaf; we project the gradient of
Re H3 onto its tangent plane.
"""

from rncurves import crit
from rncurves.curve import from_cubic

sol = crit.solve_boutroux("monic_plus")
for name, cv in (("Boutroux curve", sol.curve), ("lemniscatic curve", from_cubic((0, -1, 0)))):
    g = crit.constrained_gradient(crit.chart_point(cv))
    print(f"{name:18s} |grad| = {g.raw_norm:.3e}  |projected| = {g.projected_norm:.3e}  ratio = {g.relative:.2e}")
