import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from curvlink.coxeter import (
    COMMUTATOR_IMAGE_WORD,
    CoxeterMatrix,
    ReflectionRep,
    coxeter_abc_infinite,
    element_order,
    parse_word,
    spectral_radius,
    word_matrix,
)
from curvlink.errors import DomainError


def perm_order(word, gens):
    """Order of a product of permutations of range(n), composed left to right."""
    n = len(next(iter(gens.values())))
    p = list(range(n))
    for ch in word:
        g = gens[ch]
        p = [g[i] for i in p]
    q, k = p, 1
    while q != list(range(n)):
        q = [p[i] for i in q]
        k += 1
    return k


def test_generators_are_involutive_isometries():
    rep = ReflectionRep.triangle(5, 3, 7)
    B = rep.form
    for S in rep.generators:
        assert np.allclose(S @ S, np.eye(3), atol=1e-12)
        assert np.allclose(S.T @ B @ S, B, atol=1e-12)


@pytest.mark.parametrize("m,n,p", [(3, 3, 2), (5, 3, 2), (4, 4, 4), (7, 2, 3)])
def test_pairwise_relations(m, n, p):
    rep = ReflectionRep.triangle(m, n, p)
    a, b, c = rep.generators
    for X, Y, k in ((a, b, m), (b, c, n), (a, c, p)):
        assert np.allclose(np.linalg.matrix_power(X @ Y, k), np.eye(3), atol=1e-9)
        if k > 2:
            assert not np.allclose(np.linalg.matrix_power(X @ Y, k - 1), np.eye(3), atol=1e-6)


def test_w332_is_s4():
    # a = (12), b = (23), c = (34) satisfy the relations of W(3, 3, 2)
    gens = {"a": [1, 0, 2, 3], "b": [0, 2, 1, 3], "c": [0, 1, 3, 2]}
    rep = ReflectionRep.triangle(3, 3, 2)
    for word in ("abc", "ab", "ac", "abcb", "abac", COMMUTATOR_IMAGE_WORD):
        assert element_order(rep, word).order == perm_order(word, gens)
    assert element_order(rep, "abc").order == 4


def test_small_cases():
    assert element_order(ReflectionRep.triangle(2, 2, 2), "abc").order == 2
    inf, res = coxeter_abc_infinite(3, 3, 3)
    assert inf and res.certificate == "norm-growth"
    inf, res = coxeter_abc_infinite(7, 3, 2)
    assert inf and res.certificate == "spectral" and res.spectral_radius > 1


def test_order_invariant_under_cyclic_rotation():
    rep = ReflectionRep.triangle(5, 3, 2)
    for w in ("abc", "bca", "cab"):
        assert element_order(rep, w).order == 10


def test_commutator_image():
    # (abc)^2 has infinite order exactly when abc does
    for m, n in ((7, 3), (4, 4), (3, 3), (5, 3)):
        res = element_order(ReflectionRep.triangle(m, n, 2), COMMUTATOR_IMAGE_WORD)
        assert res.infinite == (Fraction(1, m) + Fraction(1, n) <= Fraction(1, 2))


def test_agrees_with_angle_sum_small():
    for m, n, p in itertools.product(range(2, 7), repeat=3):
        inf, _ = coxeter_abc_infinite(m, n, p)
        assert inf == (Fraction(1, m) + Fraction(1, n) + Fraction(1, p) <= 1)


def test_infinite_index_entries():
    cm = CoxeterMatrix(((1, math.inf), (math.inf, 1)))
    rep = ReflectionRep(cm)
    assert rep.form[0, 1] == -1.0
    assert element_order(rep, "ab").infinite


def test_undetermined_when_cap_small():
    res = element_order(ReflectionRep.triangle(3, 3, 3), "abc", cap=50)
    assert res.order is None and res.certificate == "undetermined"


def test_word_matrix_and_parse():
    rep = ReflectionRep.triangle(3, 4, 5)
    assert parse_word("cab", 3) == [2, 0, 1]
    assert parse_word([0, 2], 3) == [0, 2]
    assert np.allclose(word_matrix(rep, "ab"), rep.generators[0] @ rep.generators[1])
    assert np.allclose(word_matrix(rep, ""), np.eye(3))
    with pytest.raises(DomainError):
        parse_word("abd", 3)
    assert spectral_radius(np.eye(2)) == pytest.approx(1.0)


def test_validation():
    with pytest.raises(DomainError):
        CoxeterMatrix(((1, 3), (4, 1)))
    with pytest.raises(DomainError):
        CoxeterMatrix(((1, 1), (1, 1)))
    with pytest.raises(DomainError):
        coxeter_abc_infinite(1, 3, 3)
    with pytest.raises(DomainError):
        element_order(ReflectionRep.triangle(3, 3, 3), "abc", cap=0)
