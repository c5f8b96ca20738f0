"""Exact affine dimensions and what makes an inequality facet-defining.

All ranks are computed modulo at least three 31-bit primes and accepted
only on consensus; a Fraction-based rational elimination can certify the
small cases.  A valid inequality is facet-defining when its tight vertices
span an affine subspace of dimension exactly one less than the polytope's.

The full n=7 runs take a few minutes; this demo works at n<=5 and prints
the commands for the big ones.
"""

from qappoly import LinearForm, affine_dim, enumerate_permutations, polytope_affine_dim, verify_facet
from qappoly.inequalities import Qap5Params, build_qap5

for n in (3, 4, 5):
    report = polytope_affine_dim(n)
    print(f"polytope affine dimension at n={n}: {report.consensus_rank} "
          f"(ambient {report.column_dimension}, primes {report.primes})")

certified = affine_dim(list(enumerate_permutations(4)), certify=True)
print(f"\nn=4 dimension re-checked by rational elimination: "
      f"{certified.consensus_rank} [{certified.status}]")

# a generic qap5 form is valid but usually NOT facet-defining: its tight
# set is too small
form = build_qap5(Qap5Params(n=5, beta=0, coeffs={(1, 1): 1, (2, 2): -1}))
report = verify_facet(form, 5)
print(f"\ngeneric qap5 form at n=5: verdict '{report.verdict}' "
      f"(tight dim {report.tight_dim} vs polytope dim {report.polytope_dim})")

trivial = LinearForm(n=4, diag={}, offdiag={}, rhs=1, sense="<=")
report = verify_facet(trivial, 4)
print(f"the trivially valid form 0.Y <= 1: verdict '{report.verdict}' "
      f"(empty tight set)")

print("\nfull-scale runs (a few minutes each):")
print("  qappoly verify-facet --family qap4 --n 7 --m 7")
print("  qappoly verify-facet --family qap2 --n 7 --beta 2 --P 1,2,3 --Q 1,2,3")
print("  qappoly verify-lemmas --which all --n 7 --samples 200")
