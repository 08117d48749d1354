"""Cumulants as partition sums, and why a fair sign is not Gaussian.

Run: python3 demos/01_cumulants.py
"""

from fractions import Fraction

from isingclt.cumulants import bell_number, cumulant, cumulant_by_partitions, gaussian_moment_oracle

# Any joint moment oracle will do. Start with a single fair +-1 spin placed
# in every slot: odd moments vanish and even moments are 1.
def sign(S):
    return Fraction(1 - len(S) % 2)

print("order  Bell(m)  fair sign  Gaussian(var 1)")
for m in range(1, 9):
    print(f"{m:>5}  {bell_number(m):>7}  {str(cumulant(sign, m)):>9}  "
          f"{str(cumulant(gaussian_moment_oracle(), m)):>15}")

# The fast subset recursion and the explicit partition walk agree exactly.
assert cumulant(sign, 8) == cumulant_by_partitions(sign, 8)

# A sum of k independent signs divided by sqrt(k) has 4th cumulant -2/k:
# cumulants add over independent terms and scale as k^(-r/2).
for k in (1, 4, 16, 64):
    print(f"k={k:>3}: 4th cumulant of the normalised sum = {Fraction(-2, k)}")
