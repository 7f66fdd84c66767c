import numpy as np
import pytest

from roabpit.cyclic import (
    CyclicRingElement,
    ring_arith,
    ring_is_zero,
    ring_monomial,
    ring_mul,
    root_of_unity,
    transform_prime,
)
from roabpit.errors import InvalidParams, RingMismatch
from roabpit.field import DEFAULT_P

P = 1009


def convolve_oracle(a, b, r, p):
    out = [0] * r
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[(i + j) % r] = (out[(i + j) % r] + int(x) * int(y)) % p
    return out


def rand_elem(rng, r, p):
    return CyclicRingElement(rng.integers(0, min(p, 1 << 62), r), r, p)


def test_monomial_examples():
    assert ring_monomial(9, 7, P).support() == [2]
    one = ring_monomial(0, 7, P)
    x = rand_elem(np.random.default_rng(0), 7, P)
    assert one * x == x
    assert ring_monomial(-1, 5, P).support() == [4]


def test_arith_examples():
    assert (ring_monomial(3, 5, P) * ring_monomial(4, 5, P)).support() == [2]
    for g in range(1, 7):
        prod = ring_monomial(g, 7, P) * ring_monomial(g * g, 7, P)
        assert prod == ring_monomial(g + g * g, 7, P)
    a = CyclicRingElement([1, 1, 0], 3, P)
    assert list(ring_arith(a, a, "mul").coeffs) == [1, 2, 1]


def test_is_zero_examples():
    r = 7
    lam_r = ring_monomial(r, r, P)  # lambda^r reduces to 1
    assert ring_is_zero(lam_r - ring_monomial(0, r, P))
    assert not ring_is_zero(ring_monomial(5, 7, P))
    assert ring_is_zero(ring_monomial(3, 7, P) - ring_monomial(10, 7, P))


def test_ring_validation():
    with pytest.raises(InvalidParams):
        CyclicRingElement([0] * 4, 4, P)  # r not prime
    with pytest.raises(InvalidParams):
        CyclicRingElement([0] * 7, 7, 7)  # r = p
    with pytest.raises(InvalidParams):
        CyclicRingElement([0] * 3, 5, P)  # wrong length
    with pytest.raises(RingMismatch):
        ring_monomial(1, 5, P) + ring_monomial(1, 7, P)


def test_ring_laws_random_triples():
    rng = np.random.default_rng(1)
    for k in range(1000):
        r = [2, 3, 5, 7, 11, 13][k % 6]
        p = [P, DEFAULT_P][k % 2]
        a, b, c = (rand_elem(rng, r, p) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


def test_naive_matches_oracle():
    rng = np.random.default_rng(2)
    for _ in range(100):
        r = int(rng.choice([3, 5, 7, 11, 101]))
        a, b = rand_elem(rng, r, P), rand_elem(rng, r, P)
        assert list(ring_mul(a, b, "naive").coeffs) == convolve_oracle(a.coeffs, b.coeffs, r, P)


def test_transform_matches_naive():
    rng = np.random.default_rng(3)
    for r in (5, 101, 1009):
        p, omega = transform_prime(r)
        assert (p - 1) % r == 0 and pow(omega, r, p) == 1 and omega != 1
        for _ in range(1000 if r == 5 else 100):
            a, b = rand_elem(rng, r, p), rand_elem(rng, r, p)
            assert ring_mul(a, b, "transform") == ring_mul(a, b, "naive")


def test_transform_requires_root_of_unity():
    assert root_of_unity(5, P) is None  # 5 does not divide 1008
    assert root_of_unity(7, P) is not None
    a = ring_monomial(1, 5, P) + ring_monomial(2, 5, P)
    with pytest.raises(InvalidParams):
        ring_mul(a, a, "transform")


def test_monomial_sweep_r11():
    r = 11
    for j in range(-r, 2 * r):
        for k in range(-r, 2 * r):
            assert ring_monomial(j, r, P) * ring_monomial(k, r, P) == ring_monomial(j + k, r, P)


def test_rotation_path_keeps_scalar():
    x = ring_monomial(2, 7, P, coeff=5)
    y = CyclicRingElement([1, 2, 3, 0, 0, 0, 4], 7, P)
    assert ring_mul(x, y, "rotate") == ring_mul(x, y, "naive")
