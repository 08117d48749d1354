"""Connected edge families and the exact block-variance coefficients.

The lambda^n coefficient of the limiting block variance is a finite sum
over edge families of length n touching the origin. In one dimension the
answer is known in closed form (2^n / n!), which makes a good sanity check.

Run: python3 demos/02_cluster_families.py
"""

import math
import time
from fractions import Fraction

from isingclt.families import dumps_families, enumerate_connected
from isingclt.series import coefficient_Vn

print("families of length 2 touching the origin of Z:")
print(dumps_families(enumerate_connected([(0,)], 2)))

for nu in (1, 2):
    for n in range(1, 5 if nu == 1 else 3):
        t = time.perf_counter()
        count = len(enumerate_connected([(0,) * nu], n))
        v = coefficient_Vn(nu, n)
        note = f"(2^n/n! = {Fraction(2**n, math.factorial(n))})" if nu == 1 else ""
        print(f"nu={nu} n={n}: {count:>5} families, V_n = {v} {note} "
              f"[{time.perf_counter() - t:.2f}s]")
