"""Truncated lambda-series against exact one-dimensional answers.

The limiting block variance in one dimension is exp(2 lambda) and the
nearest-neighbour correlation is tanh(lambda). The series reports two
tails: a rigorous one from the convergence constants (infinite here, since
those constants only cover couplings below ~1e-13) and a geometric
extrapolation of the last terms.

Run: python3 demos/03_variance_series.py
"""

import math

from isingclt.gibbs import GibbsSpec, exact_semi_invariant
from isingclt.series import cylinder_probability, semi_invariant_series, variance_series

for lam in (0.02, 0.05, 0.1):
    r = variance_series(1, lam, 4)
    print(f"lambda={lam}: series {r.partial_sum:.10f}  exp(2 lambda) {math.exp(2 * lam):.10f}  "
          f"empirical tail {r.empirical_tail:.1e}  rigorous tail {r.rigorous_tail}")

b = [(0,), (1,)]
for lam in (0.02, 0.05):
    s = semi_invariant_series(b, lam, 6)
    exact = exact_semi_invariant(GibbsSpec(1, 8, lam), b)
    print(f"pair at lambda={lam}: series {s.partial_sum:.12f}  exact N=8 {exact:.12f}  "
          f"tanh {math.tanh(lam):.12f}")

print("coefficients:", [str(c) for _, c, _ in semi_invariant_series(b, 0.05, 6).terms])

# cylinder probabilities of three consecutive spins
for A in [(1, 1, 1), (1, -1, 1), (-1, -1, 1)]:
    p = cylinder_probability([(0,), (1,), (2,)], list(A), 0.05, 4)
    print(f"P(Q = {A}) = {p:.6f}")
