# Why the constant function stops being a minimizer: along the mode
# h = sin x the second variation is proportional to 1 - alpha^2 (q+2).
# The analytic value is checked against the smallest eigenvalue of the
# discretized form on zero-mean grid functions, and the sign is compared
# with what direct minimization actually finds.

import math

from magsobolev import minimize_rayleigh, second_order_margin, OracleConfig
from magsobolev.oracle import discrete_second_order_margin
from magsobolev.solver import mu_constant, threshold_flux

q = 4.0
print(f"{'alpha':>8} {'margin':>10} {'discrete':>10} {'oracle mu':>14} {'constant mu':>14}")
for alpha in (0.2, 0.3, 0.38, 0.40, threshold_flux(q), 0.42, 0.45, 0.49):
    m = second_order_margin(q, alpha)
    d = discrete_second_order_margin(q, alpha)
    orc = minimize_rayleigh(q, alpha, OracleConfig(n=128))
    c = (2 * math.pi) ** (0.5 - 1 / q) * alpha
    print(f"{alpha:8.4f} {m:10.5f} {d:10.5f} {orc.mu_est:14.10f} {c:14.10f}")
