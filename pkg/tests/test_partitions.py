import itertools

import pytest

from qperm import partitions as P
from qperm.errors import BoundsError


def bell_triangle(m):
    """Bell numbers B_1..B_m from the Bell triangle."""
    row, out = [1], []
    for _ in range(m):
        out.append(row[-1])
        new = [row[-1]]
        for x in row:
            new.append(new[-1] + x)
        row = new
    return out


def catalan_recurrence(m):
    c = [1]
    for k in range(m):
        c.append(sum(c[i] * c[k - i] for i in range(k + 1)))
    return c[1:]


def brute_force_partitions(k):
    """All equivalence relations on k points, as frozensets of frozensets."""
    out = set()
    for labels in itertools.product(range(k), repeat=k):
        blocks = {}
        for pos, lab in enumerate(labels, start=1):
            blocks.setdefault(lab, set()).add(pos)
        out.add(frozenset(frozenset(b) for b in blocks.values()))
    return out


def as_set(p):
    return frozenset(frozenset(b) for b in p.blocks)


def crosses(blocks):
    for A, B in itertools.permutations(blocks, 2):
        for a, b, c, d in itertools.combinations(sorted(A | B), 4):
            if a in A and c in A and b in B and d in B:
                return True
    return False


def test_counts_match_recurrences():
    bells = bell_triangle(10)
    cats = catalan_recurrence(10)
    assert bells[:4] == [1, 2, 5, 15]
    for k in range(1, 11):
        assert len(P.enumerate_partitions(k)) == bells[k - 1]
        assert len(P.enumerate_noncrossing(k)) == cats[k - 1]
        assert P.bell_number(k) == bells[k - 1]
        assert P.catalan_number(k) == cats[k - 1]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_enumeration_matches_brute_force(k):
    got = [as_set(p) for p in P.enumerate_partitions(k)]
    assert len(set(got)) == len(got)
    assert set(got) == brute_force_partitions(k)
    nc = {as_set(p) for p in P.enumerate_noncrossing(k)}
    assert nc == {s for s in brute_force_partitions(k) if not crosses(s)}


def test_noncrossing_is_sublist_in_order():
    allp = P.enumerate_partitions(6)
    nc = P.enumerate_noncrossing(6)
    positions = [allp.index(p) for p in nc]
    assert positions == sorted(positions)


def test_small_k_families_agree():
    for k in (1, 2, 3):
        assert set(P.enumerate_partitions(k)) == set(P.enumerate_noncrossing(k))
    assert len(P.enumerate_noncrossing(4)) == 14


def test_canonical_storage():
    a = P.SetPartition.from_blocks([[3, 1], [2]])
    b = P.SetPartition.from_blocks([[2], [1, 3]])
    assert a == b and hash(a) == hash(b)
    assert a.blocks == ((1, 3), (2,))
    assert str(a) == "{1,3}{2}"


@pytest.mark.parametrize(
    "blocks",
    [[[1, 2], [2, 3]], [[1], []], [[1, 3]], [[0, 1]]],
)
def test_invalid_partitions_rejected(blocks):
    with pytest.raises(ValueError):
        P.SetPartition.from_blocks(blocks, k=3 if blocks == [[1, 3]] else None)


def test_bounds():
    with pytest.raises(BoundsError):
        P.enumerate_partitions(0)
    with pytest.raises(BoundsError):
        P.enumerate_noncrossing(P.MAX_K + 1)


def test_is_noncrossing_examples():
    fb = P.SetPartition.from_blocks
    assert not P.is_noncrossing(fb([[1, 3], [2, 4]]))
    assert P.is_noncrossing(fb([[1, 4], [2, 3]]))
    assert P.is_noncrossing(fb([[1, 2, 3]]))


def test_join_examples():
    fb = P.SetPartition.from_blocks
    for p in P.enumerate_partitions(3):
        assert P.join(P.discrete(3), p) == p
    assert P.join(fb([[1, 2], [3]]), fb([[1], [2, 3]])) == fb([[1, 2, 3]])
    assert P.join(fb([[1, 3], [2], [4]]), fb([[1], [2, 4], [3]])) == fb([[1, 3], [2, 4]])
    with pytest.raises(ValueError):
        P.join(P.discrete(2), P.discrete(3))


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_join_lattice_laws(k):
    ps = P.enumerate_partitions(k)
    top, bottom = P.one_block(k), P.discrete(k)
    for p in ps:
        assert P.join(p, p) == p
        assert P.join(p, bottom) == p
        assert P.join(p, top) == top
        for q in ps:
            pq = P.join(p, q)
            assert pq == P.join(q, p)
            assert p.refines(pq) and q.refines(pq)
    if k <= 4:
        for p, q, r in itertools.product(ps, repeat=3):
            assert P.join(P.join(p, q), r) == P.join(p, P.join(q, r))


def test_num_blocks_and_kernel():
    fb = P.SetPartition.from_blocks
    assert P.num_blocks(P.discrete(3)) == 3
    assert P.num_blocks(P.one_block(3)) == 1
    assert P.num_blocks(P.kernel((1, 2, 1))) == 2
    assert P.kernel((1, 2, 1)) == fb([[1, 3], [2]])
    assert P.kernel((5, 5, 5)) == fb([[1, 2, 3]])
    assert P.kernel((7, 1, 4)) == P.discrete(3)
    with pytest.raises(ValueError):
        P.kernel(())


def test_delta_examples():
    fb = P.SetPartition.from_blocks
    assert P.delta(fb([[1, 2]]), (3, 3)) == 1
    assert P.delta(fb([[1, 2]]), (3, 4)) == 0
    assert P.delta(fb([[1], [2]]), (3, 3)) == 1
    with pytest.raises(ValueError):
        P.delta(fb([[1, 2]]), (1, 2, 3))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_delta_is_refinement_of_kernel(k):
    for t in itertools.product((1, 2, 3), repeat=k):
        kt = P.kernel(t)
        for p in P.enumerate_partitions(k):
            assert P.delta(p, t) == int(P.join(p, kt) == kt)


def test_rgs_round_trip():
    for p in P.enumerate_partitions(5):
        assert P.SetPartition.from_rgs(p.labels) == p


def test_enumeration_order_starts_discrete():
    ps = P.enumerate_partitions(3)
    assert ps[0] == P.discrete(3)
    assert ps[-1] == P.one_block(3)


# -- properties at larger k -------------------------------------------------

from hypothesis import given, settings  # noqa: E402
from hypothesis import strategies as st  # noqa: E402


@st.composite
def partitions_of(draw, k):
    rgs = [0]
    for _ in range(k - 1):
        rgs.append(draw(st.integers(0, max(rgs) + 1)))
    return P.SetPartition.from_rgs(rgs)


@st.composite
def partition_triples(draw):
    k = draw(st.integers(1, 9))
    return draw(partitions_of(k)), draw(partitions_of(k)), draw(partitions_of(k))


@settings(max_examples=200, deadline=None)
@given(partition_triples())
def test_join_laws_random(pqr):
    p, q, r = pqr
    assert P.join(p, q) == P.join(q, p)
    assert P.join(P.join(p, q), r) == P.join(p, P.join(q, r))
    assert p.refines(P.join(p, q))
    assert P.num_blocks(P.join(p, q)) <= min(P.num_blocks(p), P.num_blocks(q))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=9), st.data())
def test_delta_random(t, data):
    p = data.draw(partitions_of(len(t)))
    kt = P.kernel(t)
    assert P.delta(p, t) == int(P.join(p, kt) == kt)
    assert P.delta(kt, t) == 1
    assert P.is_noncrossing(P.discrete(len(t)))
