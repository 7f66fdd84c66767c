import itertools

import numpy as np
import pytest

from roabpit.algebra import (
    Projector,
    ch_idempotent,
    coefficient_generators,
    corner_rank_descent,
    fullness_witness,
    matrix_units,
    newton_lift,
    pairing_gram,
    radical_trace_form,
    rank_one_projector,
    span_closure,
    specialized_generators,
)
from roabpit.errors import (
    CharacteristicTooSmall,
    DegenerateSelector,
    GridExhausted,
    NonSplitSpectrum,
    NotFullAlgebra,
    NotIdempotentModRadical,
    RankAlreadyOne,
    WordCountMismatch,
    ZeroIdempotent,
)
from roabpit.field import FieldMatrix
from roabpit.roabp import generate

P = 101


def E(i, j, w=2, p=P):
    return FieldMatrix.unit(i, j, w, p)


def I(w=2, p=P):
    return FieldMatrix.identity(w, p)


def units2():
    return [E(i, j) for i in range(2) for j in range(2)]


def brute_span_dim(gens, w, p, length=4):
    """Rank of all words of length <= ``length`` (independent of the closure loop)."""
    words = [np.eye(w, dtype=object)]
    frontier = [np.eye(w, dtype=object)]
    for _ in range(length):
        frontier = [(X.dot(g.a.astype(object))) % p for X in frontier for g in gens]
        words.extend(frontier)
    return FieldMatrix.from_array(np.stack([x.ravel() for x in words]), p).rank()


# span_closure


def test_closure_examples():
    assert span_closure([E(0, 0), E(0, 1), E(1, 0)]).dim == 4
    assert span_closure([I()]).dim == 1
    tri = span_closure([E(0, 0), E(0, 1), E(1, 1)])
    assert tri.dim == 3
    assert all(b.a[1, 0] == 0 for b in tri.basis)


def test_closure_idempotent_and_closed():
    rng = np.random.default_rng(1)
    for _ in range(30):
        w = int(rng.integers(1, 4))
        gens = [FieldMatrix.from_array(rng.integers(0, 3, (w, w)) * rng.integers(0, 2, (w, w)), P)
                for _ in range(int(rng.integers(1, 3)))]
        alg = span_closure(gens)
        assert 1 <= alg.dim <= w * w
        assert alg.dim == brute_span_dim(gens, w, P, length=w * w)
        assert span_closure(alg.basis).dim == alg.dim
        for X, Y in itertools.product(alg.basis, repeat=2):
            assert alg.contains(X @ Y)


def test_generation_log_reproduces_basis():
    gens = [E(0, 0), E(0, 1), E(1, 0)]
    alg = span_closure(gens)
    for X, word in zip(alg.basis, alg.generation_log):
        Y = I()
        for k in word:
            Y = Y @ gens[k]
        assert X == Y


# radical


def test_radical_examples():
    tri = span_closure([E(0, 0), E(0, 1), E(1, 1)])
    rad = radical_trace_form(tri)
    assert len(rad) == 1 and rad[0].a[0, 1] != 0 and rad[0].rank() == 1 and (rad[0] @ rad[0]) == FieldMatrix.zeros(2, 2, P)
    assert radical_trace_form(span_closure(units2())) == []
    rad = radical_trace_form(span_closure([I(), E(0, 1)]))
    assert len(rad) == 1 and rad[0].a[1, 0] == 0 and rad[0].a[0, 0] == 0 and rad[0].a[1, 1] == 0


def test_radical_needs_large_characteristic():
    with pytest.raises(CharacteristicTooSmall):
        radical_trace_form(span_closure([FieldMatrix.identity(3, 3)]))


def test_radical_products_vanish():
    # block upper-triangular algebras of width 3 have nonzero radicals
    for seed in range(20):
        prog = generate("upper_triangular", seed, 3, 2, 1, P)
        alg = span_closure(coefficient_generators(prog))
        rad = alg.radical_basis
        zero = FieldMatrix.zeros(3, 3, P)
        for X in rad:
            assert X.power(3) == zero
        if len(rad) <= 3:
            for tup in itertools.product(rad, repeat=3):
                assert tup[0] @ tup[1] @ tup[2] == zero


# fullness witness


def test_fullness_examples():
    alg = span_closure(units2())
    gram, delta = fullness_witness(alg, units2(), units2(), 0, 1)
    assert delta == 0
    for a in range(4):
        for b in range(4):
            i, j = divmod(a, 2)
            k, l = divmod(b, 2)
            assert gram.a[a, b] == int(i == 0 and j == k and l == 1)
    one = span_closure([I(1)])
    assert fullness_witness(one, [I(1)], [I(1)], 0, 0)[1] == 1
    rep = [I(), I(), E(0, 1), E(1, 0)]
    assert fullness_witness(alg, rep, units2(), 0, 1)[1] == 0


def test_fullness_word_count():
    with pytest.raises(WordCountMismatch):
        fullness_witness(span_closure(units2()), units2()[:3], units2(), 0, 1)


def test_fullness_soundness_random():
    rng = np.random.default_rng(2)
    nonzero = 0
    for _ in range(60):
        w = int(rng.integers(1, 3))
        gens = [FieldMatrix.from_array(rng.integers(0, P, (w, w)), P) for _ in range(2)]
        alg = span_closure(gens)
        left = [FieldMatrix.from_array(rng.integers(0, P, (w, w)), P) for _ in range(w * w)]
        right = [FieldMatrix.from_array(rng.integers(0, P, (w, w)), P) for _ in range(w * w)]
        _, delta = fullness_witness(alg, left, right, 0, w - 1)
        if delta != 0:
            nonzero += 1
            assert FieldMatrix.from_array(np.stack([x.a.ravel() for x in left]), P).rank() == w * w
    assert nonzero > 0


# ch_idempotent and newton_lift


def test_ch_idempotent_examples():
    D = FieldMatrix.diag([1, 2], 7)
    pi = ch_idempotent(D)
    assert pi.matrix == FieldMatrix.diag([1, 0], 7)
    assert pi.matrix == FieldMatrix.identity(2, 7).scale(2) - D
    assert ch_idempotent(FieldMatrix.identity(2, 7)).matrix == FieldMatrix.identity(2, 7)
    with pytest.raises(NonSplitSpectrum):
        ch_idempotent(FieldMatrix([[0, 6], [1, 0]], 7))


def test_ch_idempotent_random_is_idempotent_and_commutes():
    rng = np.random.default_rng(3)
    for _ in range(100):
        w = int(rng.integers(1, 5))
        M = FieldMatrix.from_array(rng.integers(0, 5, (w, w)), P)
        try:
            pi = ch_idempotent(M)
        except NonSplitSpectrum:
            continue
        assert pi.matrix @ pi.matrix == pi.matrix
        assert pi.matrix @ M == M @ pi.matrix


def test_newton_lift_examples():
    tri = span_closure([E(0, 0), E(0, 1), E(1, 1)])
    e = FieldMatrix([[1, 1], [0, 0]], P)
    assert newton_lift(e, tri).matrix == e
    assert newton_lift(I() + E(0, 1), tri).matrix == I()
    with pytest.raises(ZeroIdempotent):
        newton_lift(FieldMatrix.zeros(2, 2, P), tri)
    with pytest.raises(NotIdempotentModRadical):
        newton_lift(I().scale(2), tri)


# corner descent and the pipeline


def test_corner_descent_examples():
    out = corner_rank_descent(Projector(I(2, 7)), FieldMatrix.diag([1, 2], 7), FieldMatrix.zeros(2, 2, 7), [0])
    assert out.matrix == FieldMatrix.diag([1, 0], 7)
    assert out.rank == 1
    with pytest.raises(RankAlreadyOne):
        corner_rank_descent(Projector(E(0, 0)), I(), I(), [0])
    with pytest.raises(GridExhausted):
        corner_rank_descent(Projector(I()), I(), FieldMatrix.zeros(2, 2, P), range(5))


def test_rank_one_projector_examples():
    pi = rank_one_projector(span_closure(units2()))
    assert pi.rank == 1 and pi.matrix @ pi.matrix == pi.matrix
    assert rank_one_projector(span_closure([I(1)])).matrix == I(1)
    with pytest.raises(NotFullAlgebra):
        rank_one_projector(span_closure([E(0, 0), E(0, 1), E(1, 1)]))


@pytest.mark.parametrize("w", [2, 3, 4])
def test_rank_one_projector_random_algebras(w):
    rng = np.random.default_rng(w)
    for _ in range(8):
        gens = [FieldMatrix.from_array(rng.integers(0, P, (w, w)), P) for _ in range(2)]
        alg = span_closure(gens)
        if not alg.is_full():
            continue
        pi = rank_one_projector(alg)
        assert pi.rank == 1
        assert pi.matrix @ pi.matrix == pi.matrix
        assert pi.descents <= w - 1
        assert alg.contains(pi.matrix)


def test_matrix_units_examples():
    alg = span_closure(units2())
    pi = Projector(E(0, 0))
    mu = matrix_units(alg, pi)
    for i in range(2):
        assert mu.U[i] @ FieldMatrix.from_array(np.array([[1], [0]]), P) == FieldMatrix.from_array(
            np.array([[int(i == 0)], [int(i == 1)]]), P)
        for j in range(2):
            assert mu[i, j] == E(i, j)
    one = matrix_units(span_closure([I(1)]), Projector(I(1)))
    assert one[0, 0] == I(1)
    with pytest.raises(DegenerateSelector):
        matrix_units(alg, pi, s=0, t=1)


def test_matrix_unit_relations_exhaustive():
    rng = np.random.default_rng(9)
    for w in (2, 3):
        gens = [FieldMatrix.from_array(rng.integers(0, P, (w, w)), P) for _ in range(2)]
        alg = span_closure(gens)
        mu = matrix_units(alg, rank_one_projector(alg))
        zero = FieldMatrix.zeros(w, w, P)
        for i, j, k, l in itertools.product(range(w), repeat=4):
            assert mu[i, j] @ mu[k, l] == (mu[i, l] if j == k else zero)


def test_pairing_gram_rank_at_most_one():
    rng = np.random.default_rng(10)
    w = 3
    gens = [FieldMatrix.from_array(rng.integers(0, P, (w, w)), P) for _ in range(2)]
    alg = span_closure(gens)
    pi = rank_one_projector(alg)
    G, rank = pairing_gram(matrix_units(alg, pi), pi, 0, w - 1)
    assert rank <= 1


def test_specialized_generators_match_layers():
    prog = generate("random", 0, 2, 3, 2, P)
    gens = specialized_generators(prog, [1, 2, 3])
    M = gens[0] @ gens[1] @ gens[2]
    assert M.a[prog.s, prog.t] == prog(1, 2, 3)


def test_adjugate_rank_one_at_simple_eigenvalue():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 50:
        w = int(rng.integers(2, 5))
        M = FieldMatrix.from_array(rng.integers(0, P, (w, w)), P)
        chi = M.charpoly()
        for mu in range(P):
            if chi(mu) == 0 and chi.derivative()(mu) != 0:
                adj = (I(w).scale(mu) - M).adjugate()
                assert adj.rank() == 1
                checked += 1
                break
