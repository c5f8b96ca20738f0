import random

import pytest

from qappoly.errors import QappolyError
from qappoly.geometry import (
    MatchPattern,
    affine_dim,
    check_identity1,
    check_identity2,
    check_s0_connectivity,
    check_span_membership,
    classify_vertex,
    make_identity1_family,
    make_identity2_chain,
    s_k_sets,
)
from qappoly.inequalities import Qap2Params, build_qap2
from qappoly.perms import Permutation, enumerate_permutations, vertex_from_permutation


# ---------------------------------------------------------------------------
# classification


def test_classify_identity_pattern():
    pattern = MatchPattern.diagonal(7)
    assert classify_vertex(Permutation.identity(7), pattern) == 7
    derangement = Permutation((2, 3, 4, 5, 6, 7, 1))
    assert classify_vertex(derangement, pattern) == 0


def test_classification_partitions_everything():
    pattern = MatchPattern.diagonal(6)
    sets = s_k_sets(6, pattern)
    assert sum(len(v) for v in sets.values()) == 720
    # fixed-point census: C(6,k) * derangements(6-k)
    assert [len(sets[k]) for k in range(7)] == [265, 264, 135, 40, 15, 0, 1]


def test_vertex_shapes_exhaustive_n6_n7():
    # every vertex has n + C(n,2) stored entries and each permutation
    # matches exactly n position pairs
    from qappoly.geometry import vertex_space

    for n in (6, 7):
        space = vertex_space(n)
        assert (space.vmatrix.sum(axis=1) == n + n * (n - 1) // 2).all()
        assert (space.zt.sum(axis=0) == n).all()


def test_parallel_rank_workers_agree():
    from qappoly.geometry import vertex_space
    from qappoly.modrank import ModularSpanBasis, rank_consensus

    space = vertex_space(4)
    serial = rank_consensus(space.vmatrix.astype("int64"), workers=1)
    threaded = rank_consensus(space.vmatrix.astype("int64"), workers=3)
    assert serial.consensus_rank == threaded.consensus_rank == 23  # affine 22 + 1
    basis = ModularSpanBasis(space.vmatrix[:6].astype("int64"), workers=2)
    member, votes = basis.contains(space.vmatrix[3].astype("int64"))
    assert member and len(votes) >= 3


def test_malformed_pattern_rejected():
    with pytest.raises(QappolyError, match="distinct"):
        MatchPattern(((1, 1), (1, 2)))


# ---------------------------------------------------------------------------
# affine dimension


def test_affine_dim_trivial_cases():
    single = [vertex_from_permutation(Permutation.identity(4))]
    assert affine_dim(single).consensus_rank == 0
    two = [Permutation.identity(4), Permutation((2, 1, 3, 4))]
    assert affine_dim(two).consensus_rank == 1


def test_affine_dim_empty_rejected():
    with pytest.raises(QappolyError, match="empty"):
        affine_dim([])


@pytest.mark.parametrize("n,dim", [(3, 5), (4, 22), (5, 77)])
def test_affine_dim_regression_constants(n, dim):
    report = affine_dim(list(enumerate_permutations(n)))
    assert report.consensus_rank == dim
    assert len(report.ranks) >= 3
    assert report.column_dimension == (n**4 + n**2) // 2


def test_affine_dim_certified_rationally():
    report = affine_dim(list(enumerate_permutations(4)), certify=True)
    assert report.consensus_rank == 22
    assert "certified" in report.status


def test_affine_dim_monotone_under_inclusion():
    perms = list(enumerate_permutations(4))
    rng = random.Random(1)
    subset = rng.sample(perms, 8)
    small = affine_dim(subset).consensus_rank
    assert small <= affine_dim(perms).consensus_rank


# ---------------------------------------------------------------------------
# identity 1


def _random_identity1_config(rng, n):
    positions = rng.sample(range(1, n + 1), 5)
    base = Permutation(tuple(rng.sample(range(1, n + 1), n)))
    return make_identity1_family(base, *positions[:3]), positions[3], positions[4]


def test_identity1_zero_sum():
    rng = random.Random(13)
    for _ in range(60):
        family, x, y = _random_identity1_config(rng, rng.choice([6, 7, 8]))
        assert check_identity1(family, x, y).is_zero


def test_identity1_arity_check():
    family, x, y = _random_identity1_config(random.Random(0), 7)
    with pytest.raises(QappolyError, match="6 permutations"):
        check_identity1(family[:5], x, y)


def test_identity1_sign_sensitivity():
    # the 12-term sum vanishes, but flipping any one sign leaves -2x that
    # vertex, so the mutated sum must be nonzero
    from qappoly.perms import apply_transposition, vertex_from_permutation

    rng = random.Random(5)
    family, x, y = _random_identity1_config(rng, 7)
    assert check_identity1(family, x, y).is_zero
    total = {}
    terms = family + [apply_transposition(s, x, y) for s in family]
    for pos, sigma in enumerate(terms):
        sign = sigma.sign() if pos else -sigma.sign()
        for key in vertex_from_permutation(sigma).entries:
            total[key] = total.get(key, 0) + sign
    assert any(v != 0 for v in total.values())


def test_identity1_rejects_overlapping_transposition_indices():
    family, _, _ = _random_identity1_config(random.Random(2), 7)
    disagree = tuple(i for i in range(1, 8)
                     if len({s(i) for s in family}) > 1)
    with pytest.raises(QappolyError, match="disjoint"):
        check_identity1(family, disagree[0], disagree[1])


# ---------------------------------------------------------------------------
# identity 2


def test_identity2_census():
    rng = random.Random(21)
    for _ in range(60):
        i, j, ip, jp = rng.sample(range(1, 9), 4)
        base = Permutation(tuple(rng.sample(range(1, 9), 8)))
        chain = make_identity2_chain(base, i, j, ip, jp)
        report = check_identity2(*chain, i, j, ip, jp)
        assert report.nonzero_count == 32
        assert report.plus_count == 16 and report.minus_count == 16


def test_identity2_pattern_independent_of_n():
    i, j, ip, jp = 2, 5, 3, 7
    base8 = Permutation((4, 8, 1, 6, 2, 3, 7, 5))
    r8 = check_identity2(*make_identity2_chain(base8, i, j, ip, jp), i, j, ip, jp)
    base12 = Permutation(base8.image + tuple(range(9, 13)))
    r12 = check_identity2(*make_identity2_chain(base12, i, j, ip, jp), i, j, ip, jp)
    assert r8.affected_entries == r12.affected_entries
    assert r12.nonzero_count == 32


def test_identity2_chain_preconditions():
    base = Permutation.identity(8)
    chain = make_identity2_chain(base, 1, 2, 3, 4)
    with pytest.raises(QappolyError, match="disjoint"):
        check_identity2(*chain, 1, 2, 2, 4)
    broken = (chain[0], chain[1], chain[2], chain[1])
    with pytest.raises(QappolyError, match="chain"):
        check_identity2(*broken, 1, 2, 3, 4)


# ---------------------------------------------------------------------------
# S_0 connectivity


def test_s0_two_elements():
    report = check_s0_connectivity(2, MatchPattern(((1, 1), (2, 2))))
    assert report.size == 1 and report.connected  # only the swap remains


def test_s0_n3_single_pair_pattern():
    report = check_s0_connectivity(3, MatchPattern(((1, 1),)))
    assert report.size == 4  # permutations with sigma(1) != 1
    assert report.connected and report.status == "ok"


def test_s0_vacuous():
    report = check_s0_connectivity(1, MatchPattern(((1, 1),)))
    assert report.status == "vacuous" and report.size == 0


# ---------------------------------------------------------------------------
# span membership


def test_span_membership_of_generator():
    gens = [Permutation.identity(5), Permutation((2, 1, 3, 4, 5)),
            Permutation((1, 3, 2, 4, 5))]
    report = check_span_membership(gens[1], gens)
    assert report.member
    assert len(report.votes) >= 3 and all(report.votes.values())


def test_span_membership_negative():
    gens = [Permutation.identity(5)]
    target = Permutation((2, 1, 3, 4, 5))
    assert not check_span_membership(target, gens).member


def test_equality_set_requires_qap4():
    from qappoly.geometry import check_equality_set

    form = build_qap2(Qap2Params(n=7, p_set=(1, 2, 3), q_set=(1, 2, 3), beta=2))
    with pytest.raises(QappolyError, match="qap4"):
        check_equality_set(form, 7)
