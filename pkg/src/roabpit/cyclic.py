"""The hashing ring R_r = F_p[lambda] / (lambda^r - 1).

Elements are dense length-r coefficient vectors.  Multiplication has three
paths: index rotation when one factor is a monomial, a naive cyclic
convolution, and an evaluation transform at the r-th roots of unity when
r divides p - 1.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels as K
from .errors import InvalidParams, RingMismatch
from .field import DEFAULT_P, inv, is_prime

TRANSFORM_MIN = 64  # below this size the naive convolution is as fast


@lru_cache(maxsize=None)
def _check_ring(r, p):
    if r < 2 or not is_prime(r):
        raise InvalidParams(f"ring modulus r={r} must be prime")
    if r == p:
        raise InvalidParams(f"r={r} must be coprime to the characteristic p={p}")
    return True


@lru_cache(maxsize=None)
def root_of_unity(r, p):
    """A primitive r-th root of unity in F_p, or None when r does not divide p-1."""
    if (p - 1) % r:
        return None
    e = (p - 1) // r
    a = 2
    while True:
        w = pow(a, e, p)
        if w != 1:
            return w
        a += 1


def transform_prime(r, lo=1 << 30, hi=1 << 31):
    """Smallest prime p = k*r + 1 with lo < p < hi, plus a primitive r-th root."""
    k = lo // r + 1
    while True:
        p = k * r + 1
        if p >= hi:
            raise InvalidParams(f"no prime of the form k*{r}+1 in ({lo}, {hi})")
        if is_prime(p):
            return p, root_of_unity(r, p)
        k += 1


@lru_cache(maxsize=64)
def _points(r, p):
    """omega^k for k = 0..r-1 together with omega^-k."""
    w = root_of_unity(r, p)
    wi = inv(w, p)
    fwd = [1] * r
    bwd = [1] * r
    for k in range(1, r):
        fwd[k] = fwd[k - 1] * w % p
        bwd[k] = bwd[k - 1] * wi % p
    return K.as_residues(fwd, p), K.as_residues(bwd, p)


def evaluate_at_roots(coeffs, r, p):
    """Values of the coefficient vector at omega^0..omega^(r-1) (Horner, vectorised)."""
    pts, _ = _points(r, p)
    acc = np.zeros(r, dtype=K.dtype_for(p))
    for c in coeffs[::-1]:
        acc = (acc * pts + c) % p
    return acc


def interpolate_from_roots(values, r, p):
    """Inverse of :func:`evaluate_at_roots`."""
    _, ipts = _points(r, p)
    acc = np.zeros(r, dtype=K.dtype_for(p))
    for c in values[::-1]:
        acc = (acc * ipts + c) % p
    return (acc * inv(r, p)) % p


class CyclicRingElement:
    """Residue in F_p[lambda]/(lambda^r - 1); ``coeffs[k]`` multiplies lambda^k."""

    __slots__ = ("coeffs", "r", "p", "monomial")

    def __init__(self, coeffs, r, p=DEFAULT_P, monomial=None):
        _check_ring(r, p)
        arr = np.array(coeffs, dtype=K.dtype_for(p))
        if arr.shape != (r,):
            raise InvalidParams(f"expected {r} coefficients, got shape {arr.shape}")
        arr = arr % p
        arr.setflags(write=False)
        self.coeffs = arr
        self.r = r
        self.p = p
        self.monomial = monomial  # (exponent, scalar) when known to be c*lambda^k

    @classmethod
    def zero(cls, r, p=DEFAULT_P):
        return cls(np.zeros(r, dtype=np.int64), r, p)

    @classmethod
    def scalar(cls, c, r, p=DEFAULT_P):
        z = np.zeros(r, dtype=K.dtype_for(p))
        z[0] = int(c) % p
        return cls(z, r, p, monomial=(0, int(c) % p))

    def __repr__(self):
        terms = [f"{int(c)}*l^{k}" for k, c in enumerate(self.coeffs) if c]
        return "R_{}({})".format(self.r, " + ".join(terms) or "0")

    def is_zero(self):
        return not np.any(self.coeffs)

    def support(self):
        return [int(k) for k in np.nonzero(self.coeffs)[0]]

    def _check(self, other):
        if not isinstance(other, CyclicRingElement) or other.r != self.r or other.p != self.p:
            raise RingMismatch("operands live in different rings")

    def __eq__(self, other):
        return (
            isinstance(other, CyclicRingElement)
            and other.r == self.r
            and other.p == self.p
            and bool(np.all(self.coeffs == other.coeffs))
        )

    def __hash__(self):
        return hash((self.r, self.p, tuple(int(c) for c in self.coeffs)))

    def __add__(self, other):
        self._check(other)
        return CyclicRingElement(self.coeffs + other.coeffs, self.r, self.p)

    def __sub__(self, other):
        self._check(other)
        return CyclicRingElement(self.coeffs - other.coeffs, self.r, self.p)

    def __neg__(self):
        return CyclicRingElement(-self.coeffs, self.r, self.p)

    def scale(self, c):
        c = int(c) % self.p
        mono = None
        if self.monomial is not None:
            mono = (self.monomial[0], self.monomial[1] * c % self.p)
        return CyclicRingElement(self.coeffs * c, self.r, self.p, monomial=mono)

    def __mul__(self, other):
        if not isinstance(other, CyclicRingElement):
            return self.scale(other)
        return ring_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = CyclicRingElement.scalar(1, self.r, self.p)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def rotate(self, k):
        """Multiply by lambda^k (a cyclic shift of the coefficients)."""
        k %= self.r
        mono = None
        if self.monomial is not None:
            mono = ((self.monomial[0] + k) % self.r, self.monomial[1])
        return CyclicRingElement(np.roll(self.coeffs, k), self.r, self.p, monomial=mono)


def ring_monomial(k, r, p=DEFAULT_P, coeff=1):
    z = np.zeros(r, dtype=K.dtype_for(p))
    k %= r
    z[k] = coeff % p
    return CyclicRingElement(z, r, p, monomial=(k, coeff % p))


def _mul_naive(a, b):
    p = a.p
    out = np.zeros(a.r, dtype=a.coeffs.dtype)
    for k in np.nonzero(a.coeffs)[0]:
        out = (out + np.roll((b.coeffs * a.coeffs[k]) % p, int(k))) % p
    return out


def _mul_transform(a, b):
    fa = evaluate_at_roots(a.coeffs, a.r, a.p)
    fb = evaluate_at_roots(b.coeffs, a.r, a.p)
    return interpolate_from_roots((fa * fb) % a.p, a.r, a.p)


def ring_mul(a, b, path="auto"):
    """Product in R_r.  ``path`` is one of auto, rotate, naive, transform."""
    a._check(b)
    if path == "auto":
        if a.monomial is not None or b.monomial is not None:
            path = "rotate"
        elif a.r >= TRANSFORM_MIN and root_of_unity(a.r, a.p) is not None:
            path = "transform"
        else:
            path = "naive"
    if path == "rotate":
        if a.monomial is None:
            a, b = b, a
        if a.monomial is None:
            raise InvalidParams("rotation path needs a monomial operand")
        k, c = a.monomial
        return b.scale(c).rotate(k)
    if path == "naive":
        return CyclicRingElement(_mul_naive(a, b), a.r, a.p)
    if path == "transform":
        if root_of_unity(a.r, a.p) is None:
            raise InvalidParams(f"transform path needs r | p-1 (r={a.r}, p={a.p})")
        return CyclicRingElement(_mul_transform(a, b), a.r, a.p)
    raise InvalidParams(f"unknown multiplication path {path!r}")


def ring_arith(a, b, op):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return ring_mul(a, b)
    raise InvalidParams(f"unknown op {op!r}")


def ring_is_zero(a):
    return a.is_zero()
