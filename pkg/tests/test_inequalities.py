import itertools
import json
import math
import random
from fractions import Fraction

import pytest

from qappoly.errors import (
    CapExceededError,
    DimensionMismatchError,
    InvalidParameterError,
)
from qappoly.geometry import vertex_space
from qappoly.inequalities import (
    Qap1Params,
    Qap2Params,
    Qap3Params,
    Qap4Params,
    Qap5Bounds,
    Qap5Params,
    YPoint,
    binom2,
    build_qap1,
    build_qap2,
    build_qap3,
    build_qap4,
    build_qap5,
    closed_form_slack,
    closed_form_slack_on_match_rows,
    enumerate_family,
    evaluate,
)
from qappoly.perms import Permutation, enumerate_permutations, vertex_from_permutation


def test_binom2_convention():
    assert binom2(7) == 21
    assert binom2(0) == 0
    assert binom2(-1) == 1  # the value the slack algebra needs at q = 0


# ---------------------------------------------------------------------------
# builders


def test_qap1_term_structure():
    form = build_qap1(Qap1Params(n=6, i_set=(1, 2, 3), j_set=(1, 2, 3), k=4, l=4))
    diag, off = form.term_counts()
    assert (diag, off) == (1, 6)  # one -1 diagonal, 3 positive + 3 negative cross terms
    assert sum(1 for c in form.offdiag.values() if c == 1) == 3
    assert sum(1 for c in form.offdiag.values() if c == -1) == 3
    assert form.rhs == 0 and form.sense == "<=" and form.scale == 1


def test_qap1_rejections():
    with pytest.raises(InvalidParameterError, match="n >= 6"):
        build_qap1(Qap1Params(n=5, i_set=(1, 2, 3), j_set=(1, 2, 3), k=4, l=4))
    with pytest.raises(InvalidParameterError, match="m >= 3"):
        build_qap1(Qap1Params(n=6, i_set=(1, 2), j_set=(1, 2), k=4, l=4))
    with pytest.raises(InvalidParameterError, match="distinct"):
        build_qap1(Qap1Params(n=6, i_set=(1, 2, 4), j_set=(1, 2, 3), k=4, l=5))


def test_qap1_identity_evaluation():
    form = build_qap1(Qap1Params(n=6, i_set=(1, 2, 3), j_set=(1, 2, 3), k=4, l=4))
    ident = vertex_from_permutation(Permutation.identity(6))
    assert form.lhs_at_vertex(ident) == -1  # q=3 matches, P(4,4)=1: 3 - 1 - 3
    assert form.slack_at_vertex(ident) == 1


def test_qap2_term_structure():
    form = build_qap2(Qap2Params(n=7, p_set=(1, 2, 3), q_set=(1, 2, 3), beta=2))
    assert all(c == 2 for c in form.diag.values()) and len(form.diag) == 9
    assert all(c == -2 for c in form.offdiag.values())
    # off-diagonal runs over cell pairs with distinct rows: C(3,2)*3*3
    assert len(form.offdiag) == 27
    assert form.rhs == 2 and form.scale == 2 and form.sense == "<="


def test_qap2_rejections():
    with pytest.raises(InvalidParameterError, match="beta >= 2"):
        build_qap2(Qap2Params(n=7, p_set=(1, 2, 3), q_set=(1, 2, 3), beta=1))
    with pytest.raises(InvalidParameterError, match=r"\|P\|\+\|Q\|"):
        build_qap2(Qap2Params(n=7, p_set=(1, 2, 3, 4), q_set=(1, 2, 3, 4), beta=2))


def test_qap3_accepts_spec_example():
    params = Qap3Params(n=13, p1_set=(4, 5, 6), p2_set=(7,), q_set=(1, 2, 3), beta=2)
    form = build_qap3(params)
    from qappoly.indexing import flat_index

    assert form.diag[flat_index(13, 4, 1)] == -2   # -(beta-1), scaled by 2
    assert form.diag[flat_index(13, 7, 2)] == 4    # +beta, scaled by 2
    assert form.sense == ">=" and form.scale == 2 and form.rhs == 2 - 4


def test_qap3_rejections():
    with pytest.raises(InvalidParameterError, match="disjoint"):
        Qap3Params(n=13, p1_set=(4, 5), p2_set=(5,), q_set=(1, 2, 3), beta=2).validate()
    with pytest.raises(InvalidParameterError, match=r"\|Q\|"):
        Qap3Params(n=13, p1_set=(4, 5, 6), p2_set=(7,), q_set=(1, 2), beta=2).validate()


def test_qap4_term_structure():
    form = build_qap4(Qap4Params(n=7, i_set=tuple(range(1, 8)), j_set=tuple(range(1, 8))))
    assert sorted(form.diag.values()) == [1] * 7
    assert sorted(form.offdiag.values()) == [-1] * 21
    assert form.rhs == 1


def test_qap4_rejections():
    with pytest.raises(InvalidParameterError, match="m >= 7"):
        build_qap4(Qap4Params(n=7, i_set=tuple(range(1, 7)), j_set=tuple(range(1, 7))))
    with pytest.raises(InvalidParameterError, match="n >= 7"):
        build_qap4(Qap4Params(n=6, i_set=tuple(range(1, 8)), j_set=tuple(range(1, 8))))


def test_qap4_is_qap5_special_case():
    # beta=2 with 0/1 coefficients on a partial permutation support: the
    # qap5 form is exactly -2 times the qap4 form (sense flipped)
    i_set = (1, 2, 3, 4, 5, 6, 7)
    q4 = build_qap4(Qap4Params(n=7, i_set=i_set, j_set=i_set))
    q5 = build_qap5(Qap5Params(n=7, beta=2, coeffs={(r, r): 1 for r in i_set}))
    assert q5.diag == {f: -2 * c for f, c in q4.diag.items()}
    assert q5.offdiag == {k: -2 * c for k, c in q4.offdiag.items()}
    assert q5.rhs == -2 * q4.rhs
    assert (q4.sense, q5.sense) == ("<=", ">=")


def test_qap5_degenerate_examples():
    # single coefficient: diagonal 1 - (2*2-1) = -2, rhs beta - beta^2 = -2
    form = build_qap5(Qap5Params(n=4, beta=2, coeffs={(1, 1): 1}))
    assert list(form.diag.values()) == [-2] and form.rhs == -2
    for sigma in enumerate_permutations(4):
        lhs = form.lhs_at_vertex(vertex_from_permutation(sigma))
        assert lhs in (-2, 0)
    # all-zero coefficients with beta=1: 0 >= 0, tight everywhere
    zero = build_qap5(Qap5Params(n=4, beta=1, coeffs={}))
    assert zero.rhs == 0
    for sigma in enumerate_permutations(4):
        assert zero.slack_at_vertex(vertex_from_permutation(sigma)) == 0


def test_qap5_slack_identity_random():
    rng = random.Random(3)
    perms = list(enumerate_permutations(5))
    for _ in range(30):
        coeffs = {(i, j): rng.randint(-2, 2) for i in range(1, 6) for j in range(1, 6)}
        beta = rng.randint(-2, 3)
        params = Qap5Params(n=5, beta=beta, coeffs=coeffs)
        form = build_qap5(params)
        lookup = params.coeff_map()
        for sigma in perms:
            s = sum(lookup.get((i, sigma(i)), 0) for i in range(1, 6))
            assert form.slack_at_vertex(vertex_from_permutation(sigma)) \
                == (s - beta) * (s - beta + 1) \
                == closed_form_slack("qap5", params, sigma)


def test_qap2_qap3_match_qap5_at_vertices():
    # indicator coefficients reproduce the forms up to same-row terms that
    # vanish at vertices: the denominator-cleared slack (scale 2) equals the
    # qap5 slack exactly
    p3 = Qap3Params(n=7, p1_set=(1, 2), p2_set=(3,), q_set=(4, 5, 6), beta=1)
    f3 = build_qap3(p3)
    coeffs = {(i, j): 1 for i in p3.p1_set for j in p3.q_set}
    coeffs.update({(i, j): -1 for i in p3.p2_set for j in p3.q_set})
    f5 = build_qap5(Qap5Params(n=7, beta=1, coeffs=coeffs))
    p2 = Qap2Params(n=7, p_set=(1, 2, 3), q_set=(4, 5, 6), beta=2)
    f2 = build_qap2(p2)
    g5 = build_qap5(Qap5Params(n=7, beta=2,
                               coeffs={(i, j): 1 for i in p2.p_set for j in p2.q_set}))
    rng = random.Random(5)
    for _ in range(200):
        sigma = Permutation(tuple(rng.sample(range(1, 8), 7)))
        v = vertex_from_permutation(sigma)
        assert f3.scaled_slack_at_vertex(v) == f5.slack_at_vertex(v)
        assert f2.scaled_slack_at_vertex(v) == g5.slack_at_vertex(v)


# ---------------------------------------------------------------------------
# evaluation


def test_evaluate_zero_point():
    form = build_qap1(Qap1Params(n=6, i_set=(1, 2, 3), j_set=(1, 2, 3), k=4, l=4))
    res = evaluate(form, YPoint.zero(6))
    assert res.lhs == 0 and res.satisfied


def test_evaluate_dimension_mismatch():
    form = build_qap1(Qap1Params(n=6, i_set=(1, 2, 3), j_set=(1, 2, 3), k=4, l=4))
    with pytest.raises(DimensionMismatchError):
        evaluate(form, YPoint.zero(7))


def test_evaluate_qap4_on_three_match_vertex():
    form = build_qap4(Qap4Params(n=7, i_set=tuple(range(1, 8)), j_set=tuple(range(1, 8))))
    sigma = Permutation((1, 2, 3, 5, 4, 7, 6))  # exactly 3 fixed points
    res = evaluate(form, vertex_from_permutation(sigma))
    assert res.lhs == 0 and res.satisfied  # 3 - C(3,2) = 0 <= 1


def test_evaluate_matches_dense_dot_product():
    # dense rational oracle for an arbitrary reduction-style point
    from qappoly.graphs import Graph
    from qappoly.reductions import build_point_qap2

    g = Graph.from_edges(7, [(1, 2), (2, 3), (1, 3), (4, 5)])
    point = build_point_qap2(g, 2)
    form = build_qap2(Qap2Params(n=7, p_set=(1, 2, 3), q_set=(1, 2, 3), beta=2))
    n2 = 49
    dense = [[Fraction(0)] * n2 for _ in range(n2)]
    for (f1, f2), val in point.values.items():
        dense[f1 - 1][f2 - 1] = val
        dense[f2 - 1][f1 - 1] = val
    lhs = Fraction(0)
    for f, c in form.diag.items():
        lhs += c * dense[f - 1][f - 1]
    for (f1, f2), c in form.offdiag.items():
        lhs += c * dense[f1 - 1][f2 - 1]
    assert evaluate(form, point).lhs == lhs


# ---------------------------------------------------------------------------
# closed-form slacks


def test_closed_form_examples():
    q4 = Qap4Params(n=9, i_set=tuple(range(1, 8)), j_set=tuple(range(1, 8)))
    assert closed_form_slack("qap4", q4, Permutation.identity(9)) == 15  # q=7 -> C(6,2)

    p2 = Qap2Params(n=8, p_set=(1, 2, 3), q_set=(1, 2, 3), beta=2)
    tight1 = Permutation((1, 4, 5, 2, 3, 6, 7, 8))   # q = 1 = beta - 1
    tight2 = Permutation((1, 2, 4, 3, 5, 6, 7, 8))   # q = 2 = beta
    assert closed_form_slack("qap2", p2, tight1) == 0
    assert closed_form_slack("qap2", p2, tight2) == 0

    p3 = Qap3Params(n=13, p1_set=(4, 5, 6), p2_set=(7,), q_set=(1, 2, 3), beta=2)
    sigma = Permutation((4, 5, 8, 1, 2, 9, 10, 3, 6, 7, 11, 12, 13))
    # q1 = 2 = beta with q2 = 0: slack 0
    assert sum(1 for i in p3.p1_set if sigma(i) in p3.q_set) == 2
    assert sum(1 for i in p3.p2_set if sigma(i) in p3.q_set) == 0
    assert closed_form_slack("qap3", p3, sigma) == 0


def test_closed_form_vectorized_agrees_with_scalar():
    space = vertex_space(5)
    rng = random.Random(9)
    p1 = Qap1Params(n=5, i_set=(1, 2, 3), j_set=(2, 3, 4), k=4, l=5)
    p5 = Qap5Params(n=5, beta=1, coeffs={(1, 2): 2, (3, 3): -1})
    for family, params in (("qap1", p1), ("qap5", p5)):
        vec = closed_form_slack_on_match_rows(family, params, space.zt)
        for idx in rng.sample(range(len(space.perms)), 30):
            assert vec[idx] == closed_form_slack(family, params, space.perms[idx],
                                                 check=False)


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_qap1_n6_double_count():
    forms = list(enumerate_family(6, "qap1"))
    keys = {f.key() for f in forms}
    assert len(forms) == len(keys)  # canonicalization leaves no duplicates
    expected = 36 * sum(math.comb(5, m) ** 2 * math.factorial(m) for m in range(3, 6))
    assert len(forms) == expected == 47520


def test_enumerate_qap4_n7():
    keys = set()
    count = 0
    for form in enumerate_family(7, "qap4"):
        keys.add(form.key())
        count += 1
    assert count == len(keys) == math.factorial(7)


def test_enumerate_qap2():
    assert sum(1 for _ in enumerate_family(6, "qap2")) == 0  # conditions unsatisfiable
    forms = list(enumerate_family(7, "qap2"))
    assert len(forms) == math.comb(7, 3) ** 2  # beta=2, |P|=|Q|=3 forced at n=7


def test_enumerate_qap3_n7_count():
    # at n=7 condition (v) forces |Q|=3 and beta = |P1|-|P2|
    count = sum(1 for _ in enumerate_family(7, "qap3"))
    expected = math.comb(7, 3) * (7 * 6 + 21 * 5 + 35 * 4 + 21 * 10 + 7 * 15 + 7 * 20)
    assert count == expected == 25970


def test_enumerate_qap5_requires_bounds():
    with pytest.raises(InvalidParameterError, match="bounds"):
        next(enumerate_family(4, "qap5"))
    bounds = Qap5Bounds(support=((1, 1), (2, 2)), coeff_min=0, coeff_max=1,
                        beta_min=1, beta_max=2)
    forms = list(enumerate_family(4, "qap5", bounds=bounds))
    assert len(forms) == 8  # 2 beta values x 4 assignments


def test_enumerate_cap():
    with pytest.raises(CapExceededError):
        next(enumerate_family(10, "qap1"))


def test_validity_exhaustive_small_qap1():
    # every qap1 form at n=6 is satisfied by every vertex (spot: first 400)
    space = vertex_space(6)
    for form in itertools.islice(enumerate_family(6, "qap1"), 400):
        assert (form.scaled_slack_on_match_rows(space.zt) >= 0).all()


def test_form_json_round_trip_fields():
    form = build_qap2(Qap2Params(n=7, p_set=(1, 2, 3), q_set=(1, 2, 3), beta=2))
    blob = json.loads(form.to_json())
    assert blob["family"] == "qap2" and blob["scale"] == 2 and blob["sense"] == "<="
    assert len(blob["diag"]) == 9 and len(blob["offdiag"]) == 27


def test_ypoint_json_uses_fraction_strings():
    point = YPoint(n=3, values={(1, 1): Fraction(1, 3), (2, 5): Fraction(2)})
    blob = json.loads(point.to_json())
    assert ["1/3" in str(entry) for entry in blob["entries"]]
    flat = json.dumps(blob)
    assert "1/3" in flat and "0.33" not in flat
