"""The five inequality families and their closed-form slacks.

Families qap1-qap4 are finite at fixed n and all valid for the polytope;
qap5 generalizes them all (integer coefficients n_ij and an integer shift).
At any vertex, each family's slack reduces to a small polynomial in the
number of matched index pairs, which this demo checks against direct
evaluation.
"""

from qappoly import (
    Permutation,
    Qap1Params,
    Qap2Params,
    Qap4Params,
    Qap5Params,
    build_qap1,
    build_qap2,
    build_qap4,
    build_qap5,
    closed_form_slack,
    enumerate_family,
    evaluate,
    vertex_from_permutation,
)
from qappoly.inequalities import slack_table_csv

# --- qap1: m matched pairs played against one special cell (k, l)
params = Qap1Params(n=6, i_set=(1, 2, 3), j_set=(1, 2, 3), k=4, l=4)
form = build_qap1(params)
identity = vertex_from_permutation(Permutation.identity(6))
res = evaluate(form, identity)
print("qap1 at the identity vertex:")
print(f"  lhs = {res.lhs} <= {res.rhs}  (satisfied: {res.satisfied})")
print(f"  slack = {res.slack}, closed form gives "
      f"{closed_form_slack('qap1', params, Permutation.identity(6))}")

# --- qap2: a P x Q block with threshold beta; rhs carries the only
# half-integer, so forms are stored cleared by 2
q2 = build_qap2(Qap2Params(n=7, p_set=(1, 2, 3), q_set=(1, 2, 3), beta=2))
print(f"\nqap2 stored denominator-cleared: scale={q2.scale}, rhs={q2.rhs}")

# --- qap4 is the qap5 member with beta=2 and 0/1 coefficients on a
# partial permutation; the maps agree exactly after the -1/2 rescaling
i_set = tuple(range(1, 8))
q4 = build_qap4(Qap4Params(n=7, i_set=i_set, j_set=i_set))
q5 = build_qap5(Qap5Params(n=7, beta=2, coeffs={(r, r): 1 for r in i_set}))
match = (q5.diag == {f: -2 * c for f, c in q4.diag.items()}
         and q5.offdiag == {k: -2 * c for k, c in q4.offdiag.items()})
print(f"\nqap4 coefficients == -1/2 x qap5(beta=2, indicator coefficients): {match}")

# --- family enumeration is deterministic and duplicate-free
for family, n in (("qap1", 6), ("qap2", 7), ("qap3", 7), ("qap4", 7)):
    count = sum(1 for _ in enumerate_family(n, family))
    print(f"family {family} at n={n}: {count} forms")

# --- slack tables: the external CSV format
forms = [form]
perms = [Permutation.identity(6), Permutation((2, 1, 3, 4, 5, 6)),
         Permutation((2, 3, 1, 5, 6, 4))]
print("\nslack table sample:")
print(slack_table_csv("qap1", forms, perms))
