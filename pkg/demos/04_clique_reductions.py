"""Clique numbers extracted through membership oracles.

Each reduction maps a graph to a rational candidate point whose membership
in one family's relaxation encodes "no clique larger than t".  Sweeping t
and watching the feasibility threshold recovers the clique number without
ever running a clique algorithm; an independent branch-and-bound solver
confirms every answer.
"""

from qappoly import (
    Graph,
    brute_force_membership,
    build_point_qap2,
    build_point_qap4,
    clique_via_membership_oracle,
    max_clique_bruteforce,
)

triangle = Graph.from_edges(7, [(1, 2), (2, 3), (1, 3)])
print("unique triangle on 7 vertices, qap2 reduction:")
for t in (1, 2, 3):
    verdict = brute_force_membership(build_point_qap2(triangle, t), "qap2")
    note = ""
    if verdict.witness is not None:
        note = f"  (witness: form #{verdict.witness_index})"
    print(f"  t={t}: {'member' if verdict.member else 'NON-member'}{note}")
report = clique_via_membership_oracle(triangle, "qap2")
exact, witness = max_clique_bruteforce(triangle)
print(f"  oracle says clique number {report.clique_size} [{report.mode}]; "
      f"exact solver says {exact} via {witness}")

k7_plus_isolated = Graph.from_edges(8, list(Graph.complete(7).edges))
print("\nK7 plus an isolated vertex, qap4 reduction:")
for t in (6, 7):
    verdict = brute_force_membership(build_point_qap4(k7_plus_isolated, t), "qap4")
    print(f"  t={t}: {'member' if verdict.member else 'NON-member'}")
report = clique_via_membership_oracle(k7_plus_isolated, "qap4")
print(f"  oracle: {report.clique_size}, "
      f"exact: {max_clique_bruteforce(k7_plus_isolated)[0]}")

c5_isolated = Graph.from_edges(6, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])
print("\n5-cycle plus an isolated vertex, qap1 reduction "
      "(sweeps the special cell over all rows):")
report = clique_via_membership_oracle(c5_isolated, "qap1")
print(f"  oracle: {report.clique_size} after {len(report.queries)} membership "
      f"queries; exact: {max_clique_bruteforce(c5_isolated)[0]}")
