"""Vectorised modular kernels.

Residues modulo p < 2**31 live in int64 arrays: a single product stays below
2**62, so every product is reduced before anything is summed.  Larger moduli
are stored in object arrays of Python ints.  For p < 2**62 the hot loops can
switch to the "wide" kernels below, which keep int64 residues and compute
a*b mod p with an extended-precision quotient estimate.
"""

import functools

import numpy as np

SMALL_MODULUS = 1 << 31
WIDE_MODULUS = 1 << 62
_EXTENDED = np.finfo(np.longdouble).nmant >= 63


def dtype_for(p):
    return np.int64 if p < SMALL_MODULUS else object


def as_residues(values, p):
    arr = np.array(values, dtype=dtype_for(p))
    return arr % p


def vecmat(V, A, p):
    """Rows of ``V`` (P x w) times the matrix ``A`` (w x w), mod p."""
    if V.dtype == object or A.dtype == object:
        return V.dot(A) % p
    out = np.zeros((V.shape[0], A.shape[1]), dtype=np.int64)
    for a in range(V.shape[1]):
        out += (V[:, a:a + 1] * A[a]) % p
    return out % p


def batched_vecmat(V, A, p):
    """Per-point products: V is (P x w), A is (P x w x w)."""
    if V.dtype == object or A.dtype == object:
        return np.einsum("pa,pab->pb", V, A) % p
    out = np.zeros((V.shape[0], A.shape[2]), dtype=np.int64)
    for a in range(V.shape[1]):
        out += (V[:, a:a + 1] * A[:, a, :]) % p
    return out % p


def matmul(A, B, p):
    if A.dtype == object or B.dtype == object:
        return A.dot(B) % p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        out += (A[:, k:k + 1] * B[k:k + 1, :]) % p
    return out % p


def is_wide(p):
    """Whether the int64 wide kernels are exact for this modulus."""
    return _EXTENDED and SMALL_MODULUS <= p < WIDE_MODULUS


def to_wide(arr):
    return np.asarray(arr).astype(np.int64)


@functools.lru_cache(maxsize=None)
def _reciprocal(p):
    return np.longdouble(1) / np.longdouble(p)


def mulmod(a, b, p):
    """Elementwise a*b mod p for int64 residues and p < 2**62.

    The quotient floor(ab/p) is estimated as a * b * (1/p) in 64-bit-mantissa
    long double (three roundings, relative error below 2**-62, so the
    estimate is off by at most one), hence ab - qp (computed with wrap-around)
    lies in [-p, 2p) and two corrections finish the reduction.  Multiplying by
    the reciprocal instead of dividing keeps the cost independent of the data.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    q = (a.astype(np.longdouble) * b.astype(np.longdouble) * _reciprocal(p)).astype(np.int64)
    with np.errstate(over="ignore"):
        r = (a.astype(np.uint64) * b.astype(np.uint64) - q.astype(np.uint64) * np.uint64(p)).view(np.int64)
    r = np.where(r < 0, r + p, r)
    return np.where(r >= p, r - p, r)


def addmod(a, b, p):
    s = a + b
    return np.where(s >= p, s - p, s)


LIMB_BITS = 21
_LIMB_MASK = (1 << LIMB_BITS) - 1
MAX_INNER = 512  # 3 * 512 * 2**42 < 2**53: limb dot products stay exact in float64


def _limbs(X):
    return [((X >> (LIMB_BITS * k)) & _LIMB_MASK).astype(np.float64) for k in range(3)]


def limb_products(A, B):
    """The five limb diagonals of A @ B as int64 arrays (unreduced).

    Entry k is sum_{i+j=k} a_i @ b_j, where a_i, b_j are the 21-bit limbs;
    A @ B = sum_k parts[k] * 2**(21k).  Each part is below 3 * inner * 2**42,
    and ``inner`` must not exceed 512.
    """
    rows, cols = A.shape[0], B.shape[1]
    stacked = np.vstack(_limbs(A)) @ np.hstack(_limbs(B))  # block (i, j) = a_i @ b_j
    parts = []
    for k in range(5):
        diag = np.zeros((rows, cols), dtype=np.int64)
        for i in range(max(0, k - 2), min(k, 2) + 1):
            j = k - i
            diag += stacked[i * rows:(i + 1) * rows, j * cols:(j + 1) * cols].astype(np.int64)
        parts.append(diag)
    return parts


def recombine(parts, p):
    """sum_k parts[k] * 2**(21k) mod p; every part must be nonnegative and below 2**62."""
    out = parts[0] % p
    for k in range(1, len(parts)):
        out = addmod(out, mulmod_const(parts[k], pow(2, LIMB_BITS * k, p), p), p)
    return out


def mulmod_const(a, c, p):
    """a * c mod p for an int64 array a in [0, 2**62) and a residue c."""
    a = np.asarray(a, dtype=np.int64)
    q = (a.astype(np.longdouble) * (np.longdouble(c) * _reciprocal(p))).astype(np.int64)
    with np.errstate(over="ignore"):
        r = (a.astype(np.uint64) * np.uint64(c) - q.astype(np.uint64) * np.uint64(p)).view(np.int64)
    r = np.where(r < 0, r + p, r)
    return np.where(r >= p, r - p, r)


def matmul_wide(A, B, p):
    """A @ B mod p for int64 residues below 2**62.

    Both operands are split into three 21-bit limbs; the nine limb products
    are float64 matrix products that stay exact, so BLAS does the bulk of the
    work, and the diagonals are recombined with weights 2**(21k) mod p.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for start in range(0, A.shape[1], MAX_INNER):
        parts = limb_products(A[:, start:start + MAX_INNER], B[start:start + MAX_INNER])
        out = addmod(out, recombine(parts, p), p)
    return out


def powmod(base, exponent, p):
    """Elementwise base**exponent mod p for an array base and integer exponent."""
    result = np.ones_like(base)
    if result.dtype != object:
        result = result % p
    b = base % p
    e = int(exponent)
    while e:
        if e & 1:
            result = (result * b) % p
        b = (b * b) % p
        e >>= 1
    return result
