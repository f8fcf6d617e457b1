import itertools
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
import sympy

from qperm import partitions as P
from qperm import weingarten as W
from qperm.errors import BoundsError, SingularGramError


def identity_check(k, n, family):
    G = W.gram(k, n, family)
    Wm = W.weingarten(k, n, family)
    d = Wm.denominator
    prod = Wm.numerators.dot(G.entries)
    assert (prod == d * np.eye(G.size, dtype=object)).all()
    assert (Wm.numerators == Wm.numerators.T).all()


def test_gram_examples():
    for fam in ("all", "nc"):
        assert W.gram(1, 7, fam).entries.tolist() == [[7]]
    G = W.gram(2, 5, "all")
    assert [str(p) for p in G.partitions] == ["{1}{2}", "{1,2}"]
    assert G.entries.tolist() == [[25, 5], [5, 5]]
    G3 = W.gram(3, 4, "nc")
    assert [G3.entries[a, a] for a in range(5)] == [64, 16, 16, 16, 4]


@pytest.mark.parametrize("n", [3, 4, 5, 9])
def test_gram_diagonal_dominates_rows(n):
    for fam in ("all", "nc"):
        G = W.gram(3, n, fam)
        for a in range(G.size):
            assert G.entries[a, a] == max(G.entries[a])
        assert (G.entries == G.entries.T).all()


def test_two_by_two_inverse():
    Wm = W.weingarten(2, 5, "all")
    assert Wm.entries.tolist() == [
        [Fraction(1, 20), Fraction(-1, 20)],
        [Fraction(-1, 20), Fraction(1, 4)],
    ]
    assert W.weingarten(1, 7).entries.tolist() == [[Fraction(1, 7)]]


def test_singular_gram():
    with pytest.raises(SingularGramError) as exc:
        W.weingarten(3, 2, "all")
    assert (exc.value.k, exc.value.n) == (3, 2)


def test_bounds():
    with pytest.raises(BoundsError):
        W.gram(0, 4)
    with pytest.raises(BoundsError):
        W.gram(2, 0)
    with pytest.raises(ValueError):
        W.Family.parse("crossing")


def test_exact_inverse_random_matrices():
    rng = np.random.default_rng(0)
    for _ in range(200):
        m = int(rng.integers(1, 7))
        A = rng.integers(-5, 6, size=(m, m))
        det = sympy.Matrix(A.tolist()).det()
        if det == 0:
            with pytest.raises(ZeroDivisionError):
                W.exact_inverse(A)
            continue
        X, d = W.exact_inverse(A)
        assert d > 0
        assert (np.asarray(A, dtype=object).dot(X) == d * np.eye(m, dtype=object)).all()


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9])
def test_inverse_identity_small(k, n):
    for fam in ("all", "nc"):
        try:
            identity_check(k, n, fam)
        except SingularGramError:
            assert fam == "all" and n < k


@pytest.mark.slow
@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9])
def test_inverse_identity_k6(n):
    identity_check(6, n, "nc")
    if n >= 6:
        identity_check(6, n, "all")
    else:
        with pytest.raises(SingularGramError):
            W.weingarten(6, n, "all")


def test_closed_form_examples():
    for n in (3, 5, 8):
        assert W.integrate_sn_closed((1,), (1,), n) == Fraction(1, n)
    assert W.integrate_sn_closed((1, 2), (3, 4), 4) == Fraction(1, 12)
    assert W.integrate_sn_closed((1, 1), (1, 2), 6) == 0
    with pytest.raises(ValueError):
        W.integrate_sn_closed((1, 2), (1,), 4)
    with pytest.raises(ValueError):
        W.integrate_sn_closed((1, 5), (1, 2), 4)


def test_weingarten_route_examples():
    assert W.integrate_sn_weingarten((1, 2), (1, 2), 4) == Fraction(1, 12)
    assert W.integrate_sn_weingarten((1, 1), (2, 2), 5) == Fraction(1, 5)
    with pytest.raises(SingularGramError):
        W.integrate_sn_weingarten((1, 2, 1), (1, 2, 1), 2)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_sn_weingarten_matches_closed_form(n):
    for k in range(1, 5):
        tuples = list(itertools.product(range(1, 5), repeat=k))
        for i in tuples:
            for j in tuples:
                assert W.integrate_sn_weingarten(i, j, n) == W.integrate_sn_closed(i, j, n)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_snplus_agrees_with_sn_up_to_degree_three(n):
    for k in range(1, 4):
        tuples = list(itertools.product(range(1, n + 1), repeat=k))
        kernels = {t: P.kernel(t) for t in tuples}
        for i in tuples:
            for j in tuples:
                if kernels[i] == kernels[j] or k == 1:
                    assert W.integrate_snplus(i, j, n) == W.integrate_sn_closed(i, j, n)
                else:
                    assert W.integrate_snplus(i, j, n) == 0


def test_snplus_examples():
    assert W.integrate_snplus((1, 1, 1, 1), (1, 1, 1, 1), 4) == Fraction(1, 4)
    assert W.integrate_snplus((1, 2, 3), (2, 3, 4), 4) == Fraction(1, 24)
    assert W.snplus_3transitive_value(4) == Fraction(1, 24)
    assert W.snplus_3transitive_value(5) == Fraction(1, 60)
    with pytest.raises(ValueError):
        W.snplus_3transitive_value(2)


def independent_nc_gram(k, n):
    """Noncrossing partitions and their Gram matrix, built without the library."""
    from sympy.utilities.iterables import multiset_partitions

    def crossing(blocks):
        for A, B in itertools.permutations(blocks, 2):
            for a, b, c, d in itertools.combinations(sorted(A | B), 4):
                if a in A and c in A and b in B and d in B:
                    return True
        return False

    parts = [
        [set(b) for b in p]
        for p in multiset_partitions(list(range(1, k + 1)))
        if not crossing([set(b) for b in p])
    ]

    def join_blocks(p, q):
        comps = [set(b) for b in p]
        for b in q:
            hit = [c for c in comps if c & set(b)]
            merged = set(b).union(*hit)
            comps = [c for c in comps if not (c & set(b))] + [merged]
        return len(comps)

    G = [[n ** join_blocks(p, q) for q in parts] for p in parts]
    return parts, G


def test_quantum_integral_independent_oracle():
    i = j = (1, 2, 1, 2)
    n = 5
    parts, G = independent_nc_gram(4, n)
    assert len(parts) == 14

    def constant_on_blocks(p, t):
        return int(all(len({t[x - 1] for x in b}) == 1 for b in p))

    di = sympy.Matrix([constant_on_blocks(p, i) for p in parts])
    dj = sympy.Matrix([constant_on_blocks(p, j) for p in parts])
    x = sympy.Matrix(G).LUsolve(dj)
    exact = (di.T * x)[0]
    xf = np.linalg.solve(np.array(G, dtype=float), np.array(dj, dtype=float).ravel())
    approx = float(np.array(di, dtype=float).ravel() @ xf)

    got = W.integrate_snplus(i, j, n)
    assert got == Fraction(int(exact.p), int(exact.q))
    assert abs(float(got) - approx) <= 1e-9 * abs(approx)
    assert got == Fraction(1, 44)
    # differs from the classical value, which is 1/20
    assert W.integrate_sn_closed(i, j, n) == Fraction(1, 20)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_row_sum_recursion(k):
    n = 5
    for i in itertools.product(range(1, n + 1), repeat=k):
        for head in itertools.product(range(1, n + 1), repeat=k - 1):
            total = sum(W.integrate_snplus(i, head + (jk,), n) for jk in range(1, n + 1))
            if k == 1:
                assert total == 1
            else:
                assert total == W.integrate_snplus(i[:-1], head, n)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_character_moments_are_catalan(n):
    # sum over all diagonal tuples of the integral of u_{i1 i1} ... u_{ik ik}
    for k in range(1, 5):
        index, Z, d = W.kernel_integral_table(k, n, "nc")
        total = Fraction(0)
        for kap, a in index.items():
            b = P.num_blocks(kap)
            count = factorial(n) // factorial(n - b) if b <= n else 0
            total += count * Fraction(int(Z[a, a]), d)
        assert total == P.catalan_number(k)


def test_kernel_table_depends_only_on_kernels():
    n = 5
    for i, j in [((1, 2, 1), (3, 3, 4)), ((2, 2, 5, 1), (1, 3, 1, 2))]:
        relabel = {1: 4, 2: 5, 3: 1, 4: 2, 5: 3}
        i2 = tuple(relabel[x] for x in i)
        assert W.integrate_snplus(i, j, n) == W.integrate_snplus(i2, j, n)


def test_weingarten_cache_is_shared_across_threads():
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(4) as ex:
        results = list(ex.map(lambda _: W.weingarten(4, 7, "all"), range(8)))
    assert all(r is results[0] for r in results)
