"""Three routes to the KdV integrals of an elliptic potential.

u solves u'' = 3u^2 - g2.  Its Hill operator -d^2/dx^2 + u has three band
edges; the spectral curve through them carries the same integrals as the
time averages of u, and the Floquet quasimomentum encodes them asymptotically.
"""

import numpy as np

from rncurves import hill
from rncurves.curve import from_roots
from rncurves.series import kdv_hamiltonians

pot = hill.make_potential(4.0, 0.5)
edges = hill.band_edges(pot)
print("period", pot.period)
print("band edges", np.round(edges, 12))

quad = hill.pn_integrals(pot)
fit = hill.quasimomentum_fit(pot).H
series = [h.real for h in kdv_hamiltonians(from_roots(edges))]
for name, row in (("quadrature", quad), ("Floquet fit", fit), ("curve series", series)):
    print(f"{name:13s}", "  ".join(f"{x:+.12f}" for x in row))
