"""
Complex coefficients and the polytope volume
============================================

With complex Gaussian coefficients and integer exponents, the expected
number of roots in a fundamental imaginary strip is exactly n! times the
Euclidean volume of the Newton polytope.  The package verifies this by
integrating a complex-case density and comparing with the hull volume.
"""

import math

from sparse_kacrice import ComplexExpSum, bkk_density, bkk_total, n_factorial_volume

# One variable: exponents {0..d} give a polytope of length d, so the
# expected root count is d — matching the degree of the polynomial the
# sum becomes under w = e^z.
for d in (1, 2, 3, 4):
    C = ComplexExpSum([[float(k)] for k in range(d + 1)])
    r = bkk_total(C)
    print(f"degree {d}: density route {r.value:.8f}  "
          f"volume route {n_factorial_volume(C):.1f}")

# Two variables: the unit square has area 1, so the count is 2! * 1 = 2.
square = ComplexExpSum([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
r = bkk_total(square)
print(f"unit square: density route {r.value:.8f}  "
      f"volume route {n_factorial_volume(square):.1f}")

# The density itself has closed-form values at the origin.
seg = ComplexExpSum([[0.0], [1.0]])
print(f"segment density at 0: {bkk_density(seg, [0.0]):.10f}  "
      f"(exact 1/(4 pi) = {1/(4*math.pi):.10f})")
print(f"square density at 0:  {bkk_density(square, [0.0, 0.0]):.10f}  "
      f"(exact 1/(8 pi^2) = {1/(8*math.pi**2):.10f})")

# Coefficients are irrelevant — only the support polytope matters.
skewed = ComplexExpSum([[0.0], [1.0], [2.0]], [0.3, 5.0, 1.2])
print(f"skewed coefficients, same support: {bkk_total(skewed).value:.8f}")
