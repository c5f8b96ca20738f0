"""Vertices of the polytope and the index conventions behind them.

The polytope lives in the space of symmetric n^2 x n^2 matrices.  Each
permutation sigma of [n] gives one vertex: the rank-1 matrix whose
(ij, kl) entry is 1 exactly when sigma(i) = j and sigma(k) = l.
"""

import numpy as np

from qappoly import (
    Permutation,
    apply_transposition,
    enumerate_permutations,
    flat_index,
    vertex_from_permutation,
)

n = 4
sigma = Permutation((2, 4, 1, 3))
print(f"permutation in one-line notation: {sigma.one_line()}")
print(f"its sign (parity): {sigma.sign():+d}")
print(f"flat index of position pair (3, 1) at n={n}: {flat_index(n, 3, 1)}")

vertex = vertex_from_permutation(sigma)
print(f"\nvertex has {len(vertex.entries)} stored entries "
      f"({n} diagonal + {n*(n-1)//2} off-diagonal canonical pairs)")
print(f"as nonzero cells of the full symmetric matrix: {vertex.nonzero_cell_count()}"
      f" (= n^2)")
print("entry (1,2),(2,4):", vertex.value_at(1, 2, 2, 4), " <- sigma(1)=2 and sigma(2)=4")
print("entry (1,2),(2,3):", vertex.value_at(1, 2, 2, 3), " <- sigma(2) != 3")

# the sparse vertex agrees with the dense outer product of the vectorization
p = np.zeros((n, n), dtype=int)
for i in range(1, n + 1):
    p[i - 1, sigma(i) - 1] = 1
dense = np.outer(p.reshape(-1), p.reshape(-1))
agree = all(
    vertex.value_at(i, j, k, l) == dense[flat_index(n, i, j) - 1,
                                         flat_index(n, k, l) - 1]
    for i in range(1, n + 1) for j in range(1, n + 1)
    for k in range(1, n + 1) for l in range(1, n + 1)
)
print(f"\nsparse vertex == vec(P) vec(P)^T dense oracle: {agree}")

tau = apply_transposition(sigma, 1, 3)
print(f"\nswapping positions 1 and 3: {sigma.one_line()}  ->  {tau.one_line()}")
print(f"swapping again returns the original: "
      f"{apply_transposition(tau, 1, 3) == sigma}")

count = sum(1 for _ in enumerate_permutations(5))
print(f"\nenumeration is lexicographic and complete: {count} permutations at n=5")
