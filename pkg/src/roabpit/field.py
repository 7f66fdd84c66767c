"""Exact arithmetic over a prime field F_p.

Scalars are plain Python ints reduced mod p; :class:`PrimeFieldElement` wraps
one for callers that want operator syntax and modulus checking.  Univariate
polynomials are :class:`Poly` (lowest degree first), polynomials in a second
variable ``mu`` with ``Poly`` coefficients are :class:`BivariatePoly`, and
dense matrices are :class:`FieldMatrix` backed by numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations

import numpy as np
from sympy import isprime, nextprime

from . import _kernels as K
from .errors import (
    CharacteristicTooSmall,
    DegreeTooLow,
    DegreeZeroInput,
    InvalidParams,
    ModulusMismatch,
    NonSquare,
    ZeroInverse,
)

DEFAULT_P = (1 << 61) - 1
DEFAULT_ROOT_SCAN_BUDGET = 10**6


def is_prime(n):
    return bool(isprime(int(n)))


def next_prime(n):
    """Smallest prime >= n."""
    n = int(n)
    if n <= 2:
        return 2
    return n if isprime(n) else int(nextprime(n))


def inv(a, p):
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


# ---------------------------------------------------------------------------
# scalars


@dataclass(frozen=True)
class PrimeFieldElement:
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _other(self, other):
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise ModulusMismatch(f"F_{self.p} vs F_{other.p}")
            return other.value
        return int(other) % self.p

    def __add__(self, other):
        return PrimeFieldElement(self.value + self._other(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return PrimeFieldElement(self.value - self._other(other), self.p)

    def __rsub__(self, other):
        return PrimeFieldElement(self._other(other) - self.value, self.p)

    def __mul__(self, other):
        return PrimeFieldElement(self.value * self._other(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElement(-self.value, self.p)

    def inverse(self):
        return PrimeFieldElement(inv(self.value, self.p), self.p)

    def __truediv__(self, other):
        return self * PrimeFieldElement(self._other(other), self.p).inverse()

    def __pow__(self, e):
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        return PrimeFieldElement(pow(self.value, e, self.p), self.p)

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


def ff_arith(a, b, op):
    """Apply ``op`` in {add, sub, mul, inv, pow} to field elements.

    For ``pow`` the second argument is a plain integer exponent; for ``inv``
    it is ignored.
    """
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a ** int(b)
    if not isinstance(b, PrimeFieldElement) or b.p != a.p:
        raise ModulusMismatch("both operands must share a modulus")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise InvalidParams(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# univariate polynomials


def _strip(coeffs):
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Univariate polynomial over F_p; ``coeffs[k]`` multiplies t**k."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs, p):
        self.p = p
        self.coeffs = _strip([int(c) % p for c in coeffs])

    @classmethod
    def _raw(cls, coeffs, p):
        obj = cls.__new__(cls)
        obj.p = p
        obj.coeffs = _strip(coeffs)
        return obj

    @classmethod
    def zero(cls, p):
        return cls._raw((), p)

    @classmethod
    def const(cls, c, p):
        return cls([c], p)

    @classmethod
    def t(cls, p):
        return cls._raw((0, 1), p)

    @classmethod
    def from_roots(cls, roots, p):
        out = cls.const(1, p)
        for r in roots:
            out = out * cls([-r, 1], p)
        return out

    @property
    def deg(self):
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(other, self.p)
        return isinstance(other, Poly) and self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.p))

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*t^{k}")
        return "Poly(" + " + ".join(terms) + f"; p={self.p})"

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ModulusMismatch(f"F_{self.p}[t] vs F_{other.p}[t]")
            return other
        return Poly.const(int(other), self.p)

    def __add__(self, other):
        other = self._coerce(other)
        a, b, p = self.coeffs, other.coeffs, self.p
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % p
        return Poly._raw(out, p)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw([(-c) % self.p for c in self.coeffs], self.p)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = int(other) % self.p
            return Poly._raw([(c * x) % self.p for x in self.coeffs], self.p)
        other = self._coerce(other)
        a, b, p = self.coeffs, other.coeffs, self.p
        if not a or not b:
            return Poly.zero(p)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly._raw([c % p for c in out], p)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = Poly.const(1, self.p)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroInverse("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        db = other.deg
        if len(rem) <= db:
            return Poly.zero(p), self
        inv_lc = inv(other.lc, p)
        quot = [0] * (len(rem) - db)
        b = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] % p
            if c == 0:
                continue
            q = c * inv_lc % p
            quot[k - db] = q
            for j in range(db + 1):
                rem[k - db + j] -= q * b[j]
        return Poly._raw(quot, p), Poly._raw([c % p for c in rem[:db]], p)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def monic(self):
        if not self.coeffs:
            return self
        return self * inv(self.lc, self.p)

    def derivative(self):
        return Poly._raw([(k * c) % self.p for k, c in enumerate(self.coeffs)][1:], self.p)

    def __call__(self, x):
        acc = 0
        p = self.p
        x = int(x) % p
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    def eval_many(self, xs):
        xs = K.as_residues(xs, self.p)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = (acc * xs + c) % self.p
        return acc

    def powmod(self, e, modulus):
        out = Poly.const(1, self.p)
        base = self % modulus
        while e:
            if e & 1:
                out = (out * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return out


def poly_gcd_bezout(f, g):
    """Extended Euclid: returns ``(gcd, a, b)`` with ``a*f + b*g == gcd`` and gcd monic."""
    if f.is_zero() and g.is_zero():
        raise InvalidParams("gcd(0, 0) is undefined")
    p = f.p
    r0, r1 = f, g
    s0, s1 = Poly.const(1, p), Poly.zero(p)
    t0, t1 = Poly.zero(p), Poly.const(1, p)
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    c = inv(r0.lc, p)
    return r0 * c, s0 * c, t0 * c


def poly_gcd(f, g):
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    while g:
        f, g = g, f % g
    return f.monic()


def poly_lcm(f, g):
    return (f * g // poly_gcd(f, g)).monic()


def poly_squarefree(f):
    """Yun's squarefree decomposition: ``[(factor, multiplicity), ...]``.

    Factors are monic, squarefree and pairwise coprime; the product of
    ``factor**multiplicity`` equals ``f`` up to its leading coefficient.
    """
    if f.is_zero():
        raise InvalidParams("squarefree decomposition of 0")
    if f.p <= f.deg:
        raise CharacteristicTooSmall(f"p={f.p} must exceed deg f={f.deg}")
    f = f.monic()
    if f.deg == 0:
        return []
    out = []
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f // a
    c = df // a
    d = c - b.derivative()
    i = 1
    while b.deg > 0:
        a = poly_gcd(b, d)
        b = b // a
        c = d // a
        if a.deg > 0:
            out.append((a, i))
        i += 1
        d = c - b.derivative()
    return out


def _split_linear(h, out):
    """Split a squarefree product of distinct linear factors into its roots."""
    p = h.p
    if h.deg == 0:
        return
    if h.deg == 1:
        out.append((-h.coeffs[0] * inv(h.coeffs[1], p)) % p)
        return
    if p == 2:
        out.extend(x for x in (0, 1) if h(x) == 0)
        return
    half = (p - 1) // 2
    for a in range(p):
        shifted = Poly([a, 1], p)
        probe = shifted.powmod(half, h) - 1
        g = poly_gcd(h, probe)
        if 0 < g.deg < h.deg:
            _split_linear(g, out)
            _split_linear(h // g, out)
            return
    raise ArithmeticError("linear-factor splitting failed")


def poly_roots(f, scan_budget=DEFAULT_ROOT_SCAN_BUDGET):
    """Sorted list of the distinct F_p-rational roots of ``f``.

    Small fields are scanned exhaustively.  When p exceeds ``scan_budget`` the
    rational part gcd(f, t^p - t) is split deterministically by trying shifts
    a = 0, 1, 2, ... in order.
    """
    if f.is_zero():
        raise InvalidParams("every element is a root of the zero polynomial")
    p = f.p
    if f.deg <= 0:
        return []
    if p <= scan_budget:
        vals = f.eval_many(np.arange(p, dtype=object if p >= K.SMALL_MODULUS else np.int64))
        return [int(x) for x in np.nonzero(vals == 0)[0]]
    f = f.monic()
    t = Poly.t(p)
    h = poly_gcd(f, t.powmod(p, f) - t)
    roots = []
    if h.deg > 0 and h.coeffs[0] == 0:
        roots.append(0)
        h = h // t
    _split_linear(h, roots)
    return sorted(roots)


def interpolate(xs, ys, p):
    """Lagrange interpolation through distinct points (Newton form)."""
    xs = [int(x) % p for x in xs]
    coef = [int(y) % p for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * inv(xs[i] - xs[i - j], p) % p
    out = Poly.const(coef[-1], p) if n else Poly.zero(p)
    for i in range(n - 2, -1, -1):
        out = out * Poly([-xs[i], 1], p) + coef[i]
    return out


# ---------------------------------------------------------------------------
# polynomials in mu with coefficients in F_p[lambda]


class BivariatePoly:
    """Polynomial in ``mu`` whose coefficients are :class:`Poly` in lambda."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs, p):
        self.p = p
        cs = [c if isinstance(c, Poly) else Poly.const(int(c), p) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c, p):
        return cls([c], p)

    @property
    def deg_mu(self):
        return len(self.coeffs) - 1

    @property
    def deg_lambda(self):
        return max((c.deg for c in self.coeffs), default=-1)

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return BivariatePoly(out, self.p)

    def __neg__(self):
        return BivariatePoly([-c for c in self.coeffs], self.p)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return BivariatePoly([c * other for c in self.coeffs], self.p)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return BivariatePoly([], self.p)
        out = [Poly.zero(self.p)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = out[i + j] + x * y
        return BivariatePoly(out, self.p)

    def derivative_mu(self):
        return BivariatePoly([c * k for k, c in enumerate(self.coeffs)][1:], self.p)

    def at_lambda(self, lam):
        """Specialise lambda, giving a Poly in mu."""
        return Poly([c(lam) for c in self.coeffs], self.p)

    def __eq__(self, other):
        return isinstance(other, BivariatePoly) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"BivariatePoly({list(self.coeffs)})"


def _as_bivariate(f, p=None):
    if isinstance(f, BivariatePoly):
        return f
    if isinstance(f, Poly):
        return BivariatePoly([Poly.const(c, f.p) for c in f.coeffs], f.p)
    return BivariatePoly(list(f), p)


def _bareiss_det(rows, p):
    """Fraction-free determinant of a square matrix with Poly entries."""
    n = len(rows)
    if n == 0:
        return Poly.const(1, p)
    M = [list(r) for r in rows]
    sign = 1
    prev = Poly.const(1, p)
    for k in range(n - 1):
        if M[k][k].is_zero():
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return Poly.zero(p)
        piv = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * piv - mik * M[k][j]).exact_div(prev)
            M[i][k] = Poly.zero(p)
        prev = piv
    return M[n - 1][n - 1] * sign


def sylvester_matrix(f, g):
    m, n = f.deg_mu, g.deg_mu
    size = m + n
    zero = Poly.zero(f.p)
    rows = []
    fr = list(reversed(f.coeffs))
    gr = list(reversed(g.coeffs))
    for i in range(n):
        rows.append([zero] * i + fr + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gr + [zero] * (size - n - 1 - i))
    return rows


def sylvester_resultant(f, g, p=None):
    """Res_mu(f, g) as a Poly in lambda, via the Sylvester determinant."""
    f = _as_bivariate(f, p)
    g = _as_bivariate(g, p if p is not None else f.p)
    if f.is_zero() or g.is_zero():
        raise InvalidParams("resultant with the zero polynomial")
    m, n = f.deg_mu, g.deg_mu
    if m == 0 and n == 0:
        raise DegreeZeroInput("both inputs are constant in mu")
    if m == 0:
        return f.coeffs[0] ** n
    if n == 0:
        return g.coeffs[0] ** m
    return _bareiss_det(sylvester_matrix(f, g), f.p)


def discriminant(f, p=None):
    """Disc_mu(f) = (-1)^(m(m-1)/2) Res_mu(f, df/dmu) / lc_mu(f)."""
    f = _as_bivariate(f, p)
    m = f.deg_mu
    if m < 2:
        raise DegreeTooLow(f"discriminant needs deg_mu >= 2, got {m}")
    res = sylvester_resultant(f, f.derivative_mu())
    out = res.exact_div(f.coeffs[-1])
    return -out if (m * (m - 1) // 2) % 2 else out


def ring_det(entries, zero, one):
    """Division-free determinant over any commutative ring (Laplace with memo)."""
    n = len(entries)
    if n == 0:
        return one
    # minors[mask] = det of rows k.. of the columns in mask, where k = n - |mask|
    minors = {0: one}
    for k in range(n - 1, -1, -1):
        size = n - k
        nxt = {}
        for cols in combinations(range(n), size):
            mask = 0
            for c in cols:
                mask |= 1 << c
            acc = zero
            for idx, c in enumerate(cols):
                a = entries[k][c]
                if _is_zero(a):
                    continue
                term = a * minors[mask & ~(1 << c)]
                acc = acc + term if idx % 2 == 0 else acc - term
            nxt[mask] = acc
        minors = nxt
    return minors[(1 << n) - 1]


def _is_zero(a):
    if isinstance(a, int):
        return a == 0
    return a.is_zero()


# ---------------------------------------------------------------------------
# matrices


class FieldMatrix:
    """Dense matrix over F_p; immutable once constructed."""

    __slots__ = ("a", "p")

    def __init__(self, entries, p):
        arr = np.array(entries, dtype=object)
        if arr.ndim != 2:
            raise InvalidParams("matrix entries must be two-dimensional")
        arr = np.array([[int(x) % p for x in row] for row in arr], dtype=K.dtype_for(p))
        if arr.ndim != 2:
            arr = arr.reshape(len(entries), -1)
        arr.setflags(write=False)
        self.a = arr
        self.p = p

    @classmethod
    def from_array(cls, arr, p):
        obj = cls.__new__(cls)
        arr = np.array(arr, dtype=K.dtype_for(p)) % p
        arr.setflags(write=False)
        obj.a = arr
        obj.p = p
        return obj

    @classmethod
    def identity(cls, n, p):
        return cls.from_array(np.eye(n, dtype=np.int64), p)

    @classmethod
    def zeros(cls, rows, cols, p):
        return cls.from_array(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def unit(cls, i, j, n, p):
        """Matrix unit E_ij (0-based indices)."""
        z = np.zeros((n, n), dtype=np.int64)
        z[i, j] = 1
        return cls.from_array(z, p)

    @classmethod
    def diag(cls, values, p):
        return cls.from_array(np.diag([int(v) % p for v in values]), p)

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def tolist(self):
        return [[int(x) for x in row] for row in self.a]

    def __repr__(self):
        return f"FieldMatrix({self.tolist()}, p={self.p})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and self.p == other.p
            and self.shape == other.shape
            and bool(np.all(self.a == other.a))
        )

    def __hash__(self):
        return hash((self.p, tuple(int(x) for x in self.a.ravel())))

    def _check(self, other):
        if other.p != self.p:
            raise ModulusMismatch(f"F_{self.p} vs F_{other.p}")

    def __add__(self, other):
        self._check(other)
        return FieldMatrix.from_array((self.a + other.a) % self.p, self.p)

    def __sub__(self, other):
        self._check(other)
        return FieldMatrix.from_array((self.a - other.a) % self.p, self.p)

    def __neg__(self):
        return FieldMatrix.from_array((-self.a) % self.p, self.p)

    def __matmul__(self, other):
        self._check(other)
        return FieldMatrix.from_array(K.matmul(self.a, other.a, self.p), self.p)

    def scale(self, c):
        c = int(c) % self.p
        return FieldMatrix.from_array((self.a * c) % self.p, self.p)

    def is_zero(self):
        return not np.any(self.a)

    def trace(self):
        return int(sum(int(x) for x in np.diag(self.a))) % self.p

    def transpose(self):
        return FieldMatrix.from_array(self.a.T, self.p)

    def flatten(self):
        return self.a.ravel()

    def power(self, k):
        if self.rows != self.cols:
            raise NonSquare("power of a non-square matrix")
        out = FieldMatrix.identity(self.rows, self.p)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def poly_eval(self, f):
        """f(M) by Horner's rule."""
        if self.rows != self.cols:
            raise NonSquare("polynomial of a non-square matrix")
        n = self.rows
        out = FieldMatrix.zeros(n, n, self.p)
        eye = FieldMatrix.identity(n, self.p)
        for c in reversed(f.coeffs):
            out = out @ self + eye.scale(c)
        return out

    # -- elimination ---------------------------------------------------

    def rref(self):
        """Reduced row echelon form and the list of pivot columns."""
        p = self.p
        A = np.array(self.a, dtype=self.a.dtype)
        rows, cols = A.shape
        pivots = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(A[r:, c])[0]
            if len(nz) == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                A[[r, i]] = A[[i, r]]
            A[r] = (A[r] * inv(int(A[r, c]), p)) % p
            col = A[:, c].copy()
            col[r] = 0
            if np.any(col):
                A = (A - (col[:, None] * A[r][None, :]) % p) % p
            pivots.append(c)
            r += 1
        return FieldMatrix.from_array(A, p), pivots

    def rank(self):
        return len(self.rref()[1])

    def det(self):
        if self.rows != self.cols:
            raise NonSquare("determinant of a non-square matrix")
        p = self.p
        A = [[int(x) for x in row] for row in self.a]
        n = len(A)
        det = 1
        for c in range(n):
            piv = next((i for i in range(c, n) if A[i][c]), None)
            if piv is None:
                return 0
            if piv != c:
                A[c], A[piv] = A[piv], A[c]
                det = -det
            det = det * A[c][c] % p
            ic = inv(A[c][c], p)
            for i in range(c + 1, n):
                if A[i][c]:
                    f = A[i][c] * ic % p
                    A[i] = [(x - f * y) % p for x, y in zip(A[i], A[c])]
        return det % p

    def inverse(self):
        if self.rows != self.cols:
            raise NonSquare("inverse of a non-square matrix")
        n = self.rows
        aug = FieldMatrix.from_array(np.hstack([self.a, np.eye(n, dtype=np.int64) % self.p]), self.p)
        R, piv = aug.rref()
        if piv[:n] != list(range(n)):
            raise ZeroInverse("matrix is singular")
        return FieldMatrix.from_array(R.a[:, n:], self.p)

    def nullspace(self):
        """Basis (list of 1-D arrays) of the right kernel {x : M x = 0}."""
        R, pivots = self.rref()
        cols = self.cols
        free = [c for c in range(cols) if c not in pivots]
        basis = []
        for f in free:
            v = np.zeros(cols, dtype=self.a.dtype)
            v[f] = 1
            for i, pc in enumerate(pivots):
                v[pc] = (-R.a[i, f]) % self.p
            basis.append(v)
        return basis

    def solve(self, b):
        """One solution x of M x = b, or None when inconsistent (free vars = 0)."""
        b = np.array([int(x) % self.p for x in b], dtype=self.a.dtype)
        aug = FieldMatrix.from_array(np.hstack([self.a, b[:, None]]), self.p)
        R, pivots = aug.rref()
        if pivots and pivots[-1] == self.cols:
            return None
        x = np.zeros(self.cols, dtype=self.a.dtype)
        for i, pc in enumerate(pivots):
            x[pc] = R.a[i, self.cols]
        return x

    # -- polynomials of a matrix --------------------------------------

    def charpoly(self):
        """det(tI - M) via reduction to upper Hessenberg form."""
        if self.rows != self.cols:
            raise NonSquare("characteristic polynomial of a non-square matrix")
        return _hessenberg_charpoly([[int(x) for x in row] for row in self.a], self.p)

    def minpoly(self):
        """Minimal polynomial: lcm of the Krylov annihilators of e_1..e_n."""
        if self.rows != self.cols:
            raise NonSquare("minimal polynomial of a non-square matrix")
        n, p = self.rows, self.p
        out = Poly.const(1, p)
        for i in range(n):
            e = np.zeros(n, dtype=self.a.dtype)
            e[i] = 1
            out = poly_lcm(out, _krylov_annihilator(self, e))
        return out

    def adjugate(self):
        """adj(M) = (-1)^(n+1) * sum_{k>=1} c_k M^(k-1), c_k from det(tI - M)."""
        if self.rows != self.cols:
            raise NonSquare("adjugate of a non-square matrix")
        n = self.rows
        chi = self.charpoly()
        cs = list(chi.coeffs) + [0] * (n + 1 - len(chi.coeffs))
        acc = FieldMatrix.zeros(n, n, self.p)
        eye = FieldMatrix.identity(n, self.p)
        for k in range(n, 0, -1):
            acc = acc @ self + eye.scale(cs[k])
        return acc if n % 2 == 1 else -acc


def _krylov_annihilator(M, e):
    p = M.p
    basis = []  # (pivot, vector normalised at pivot, poly)
    vec = e.copy()
    k = 0
    while True:
        cur = vec.copy()
        poly = Poly._raw([0] * k + [1], p)
        for pc, bv, bp in basis:
            c = int(cur[pc])
            if c:
                cur = (cur - (bv * c) % p) % p
                poly = poly - bp * c
        nz = np.nonzero(cur)[0]
        if len(nz) == 0:
            return poly.monic()
        pc = int(nz[0])
        s = inv(int(cur[pc]), p)
        basis.append((pc, (cur * s) % p, poly * s))
        vec = K.matmul(M.a, vec[:, None], p)[:, 0]
        k += 1


def _hessenberg_charpoly(H, p):
    n = len(H)
    H = [row[:] for row in H]
    for m in range(1, n - 1):
        i = next((i for i in range(m, n) if H[i][m - 1] % p), None)
        if i is None:
            continue
        if i != m:
            H[i], H[m] = H[m], H[i]
            for row in H:
                row[i], row[m] = row[m], row[i]
        ip = inv(H[m][m - 1], p)
        for j in range(m + 1, n):
            u = H[j][m - 1] * ip % p
            if u == 0:
                continue
            H[j] = [(x - u * y) % p for x, y in zip(H[j], H[m])]
            for row in H:
                row[m] = (row[m] + u * row[j]) % p
    polys = [Poly.const(1, p)]
    t = Poly.t(p)
    for m in range(1, n + 1):
        cur = (t - H[m - 1][m - 1]) * polys[m - 1]
        prod = 1
        for i in range(m - 1, 0, -1):
            prod = prod * H[i][i - 1] % p
            if prod == 0:
                break
            cur = cur - polys[i - 1] * (H[i - 1][m - 1] * prod)
        polys.append(cur)
    return polys[n]


def matrix_min_char_poly(M):
    return M.minpoly(), M.charpoly()


def adjugate(M):
    return M.adjugate()


class SpanBasis:
    """Incrementally maintained echelon basis for membership tests in F_p^N."""

    def __init__(self, length, p):
        self.length = length
        self.p = p
        self.rows = []  # (pivot, normalised vector)

    def __len__(self):
        return len(self.rows)

    def reduce(self, v):
        p = self.p
        cur = np.array(v, dtype=K.dtype_for(p)) % p
        for pc, row in self.rows:
            c = cur[pc]
            if c:
                cur = (cur - (row * int(c)) % p) % p
        return cur

    def contains(self, v):
        return not np.any(self.reduce(v))

    def add(self, v):
        """Insert ``v``; returns False when it already lies in the span."""
        cur = self.reduce(v)
        nz = np.nonzero(cur)[0]
        if len(nz) == 0:
            return False
        pc = int(nz[0])
        cur = (cur * inv(int(cur[pc]), self.p)) % self.p
        self.rows.append((pc, cur))
        return True


def reduce_mod(values, p):
    return reduce(lambda acc, x: (acc + int(x)) % p, values, 0)
