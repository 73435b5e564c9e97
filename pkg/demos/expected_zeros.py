"""
Expected zero counts of Gaussian exponential sums
=================================================

A Gaussian exponential sum draws independent standard normals xi_a and
forms E(x) = sum_a xi_a alpha_a e^{<a, x>}.  The expected number of real
zeros is the integral of a closed-form density built from the softmax
geometry of the exponents.
"""

import math

import numpy as np

from sparse_kacrice import ExpSum, esol_total, evaluate, kostlan

# The simplest sum: exponents {0, 1} with unit weights.  A draw is
# xi_0 + xi_1 e^x, which has one zero when the signs differ and none
# otherwise, so the expected count is exactly 1/2.
two_term = ExpSum([[0.0], [1.0]])
result = esol_total(two_term)
print(f"two-term expected zeros: {result.value:.10f}  (exact 0.5)")

# evaluate() exposes the pointwise data behind that integral: the variance
# K, the softmax weights over exponents, the moment map mu, the metric g,
# and the zero density itself.
bundle = evaluate(two_term, [0.0])
print(f"at x=0: K={bundle.K}, mu={bundle.mu[0]}, g={bundle.g.entries[0, 0]},")
print(f"        density={bundle.density:.10f}  (exact 1/(2 pi) = {1/(2*math.pi):.10f})")

# kostlan(1, d) weights the exponents {0..d} by square-root binomials.
# Its expected count follows the square-root law sqrt(d)/2.
for d in (1, 2, 3, 4, 5):
    r = esol_total(kostlan(1, d))
    print(f"binomial degree {d}: {r.value:.8f}  (exact {math.sqrt(d)/2:.8f})")

# In two variables the binomial family factors across coordinates and the
# expected count of the 2x2 system picks up a factor pi/8 per degree.
for d in (1, 2):
    r = esol_total(kostlan(2, d))
    print(f"two-variable degree {d}: {r.value:.8f}  (exact {math.pi/8*d:.8f})")

# Arbitrary supports work the same way; nothing requires integer exponents.
irregular = ExpSum([[0.0], [0.5], [1.7]], [1.0, 2.0, 1.0])
r = esol_total(irregular)
print(f"irregular support {{0, 0.5, 1.7}}: {r.value:.8f} "
      f"(+- {r.error:.1e}, {r.cells} cells)")

# The error field is a conservative estimate; the count is stable under
# reasonable translations of the support because only gaps matter.
shifted = ExpSum(np.asarray([[0.0], [0.5], [1.7]]) + 4.0, [1.0, 2.0, 1.0])
print(f"same support shifted by 4:    {esol_total(shifted).value:.8f}")
