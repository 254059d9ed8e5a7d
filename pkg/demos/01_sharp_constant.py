# How the sharp constant mu_q(alpha) responds to the flux alpha.
#
# Below the threshold (q+2) alpha^2 = 1 the constant function wins and
# mu = (2 pi)^(1/2 - 1/q) |alpha|.  Above it the minimizer has a modulated
# modulus and mu drops strictly below that line.

import math

import numpy as np

from magsobolev import sharp_constant, threshold_flux

q = 4.0
a_star = threshold_flux(q)
print(f"q = {q}, threshold flux 1/sqrt(q+2) = {a_star:.12f}")

line = (2 * math.pi) ** (0.5 - 1 / q)
print(f"{'alpha':>8} {'regime':>16} {'mu':>16} {'constant line':>16} {'gap':>10}")
for alpha in np.r_[np.linspace(0.05, 0.4, 8), a_star, np.linspace(0.41, 0.4999, 8)]:
    res = sharp_constant(q, alpha)
    print(f"{alpha:8.4f} {res.regime.value:>16} {res.mu:16.12f} {line * alpha:16.12f} "
          f"{line * alpha - res.mu:10.2e}")

# |alpha| = 1/2 is the edge of the oval family; the limit is extrapolated
edge = sharp_constant(q, 0.5, extrapolate=True)
print(f"\nalpha = 1/2 (extrapolated): mu = {edge.mu:.12f}")

# the flux only matters modulo integers and up to sign
for alpha in (0.45, -0.45, 1.45, -2.55):
    print(f"mu(4, {alpha:+.2f}) = {sharp_constant(q, alpha).mu:.14f}")
