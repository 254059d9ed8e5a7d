# The flux integral M(gamma) over the oval family of t' ^2 = f(t),
# f(t) = t - gamma t^(q/2+1) - 1.  It is strictly decreasing from pi
# (huge ovals, gamma -> 0) to 2 pi / sqrt(q+2) (the oval shrinks to a point),
# which is exactly why the symmetry-breaking threshold sits at (q+2) alpha^2 = 1.

import math

from magsobolev import M, M_prime_analytic, P, gamma_max, oval_shape
from magsobolev.lemma_verify import fd_derivative, limit_check

# The FD column drifts at both ends: near gamma = 0 M' blows up and the step
# is clipped to gamma/2, near gamma_max the step is clipped to the distance
# from gamma_max.  Monotonicity scans compare the two only on the interior.
for q in (3.0, 4.0, 10.0):
    gmax = gamma_max(q)
    print(f"\nq = {q}: gamma_max = {gmax:.12g}, 2 pi/sqrt(q+2) = {2 * math.pi / math.sqrt(q + 2):.12f}")
    print(f"{'gamma/gmax':>12} {'t1':>12} {'t2':>14} {'M':>16} {'P':>14} {'dM analytic':>14} {'dM FD':>14}")
    for frac in (1e-12, 1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999, 1 - 1e-9):
        g = frac * gmax
        s = oval_shape(g, q)
        print(f"{frac:12.3g} {s.t1:12.8f} {s.t2:14.6g} {M(g, q):16.12f} {P(g, q):14.8f} "
              f"{M_prime_analytic(g, q):14.6e} {fd_derivative(g, q):14.6e}")
    lim = limit_check(q)
    print(f"extrapolated limit {lim.measured:.12f}, relative error {lim.rel_err:.1e}")

# pi - M closes slowly, like gamma^(1/q): the outer root t2 ~ gamma^(-2/q)
q = 4.0
for frac in (1e-8, 1e-16, 1e-24, 1e-32):
    gap = math.pi - M(frac * gamma_max(q), q)
    print(f"gamma/gmax = {frac:6.0e}: pi - M = {gap:.4e}, ratio to (gamma/gmax)^(1/q) = {gap / frac ** 0.25:.4f}")
