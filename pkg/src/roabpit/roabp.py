"""Read-once oblivious ABPs: the data model, evaluation, generators and file format.

A program of width w over n variables computes

    C(x_1, ..., x_n) = e_s^T A_1(x_1) A_2(x_2) ... A_n(x_n) e_t,
    A_i(x) = sum_j A_{i,j} x^j,

where every A_{i,j} is a w x w matrix over F_p.  Selectors ``s`` and ``t`` are
stored 0-based; the text format writes them 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .cyclic import CyclicRingElement
from .errors import ArityMismatch, BudgetExceeded, InvalidParams, ParseError, RingMismatch
from .field import DEFAULT_P, FieldMatrix, PrimeFieldElement

EXPAND_BUDGET = 10**6
FAMILIES = ("random", "diagonal", "upper_triangular", "path_controlled", "zero_difference", "two_monomial")


@dataclass(frozen=True, eq=False)
class Roabp:
    coeffs: np.ndarray  # shape (n, d+1, w, w)
    p: int = DEFAULT_P
    s: int = 0
    t: int | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=object)
        if arr.ndim != 4 or arr.shape[2] != arr.shape[3]:
            raise InvalidParams(f"layer coefficients must have shape (n, d+1, w, w), got {arr.shape}")
        n, d1, w, _ = arr.shape
        if n < 1 or d1 < 1 or w < 1:
            raise InvalidParams("need n >= 1, d >= 0 and w >= 1")
        if any(int(x) < 0 or int(x) >= self.p for x in arr.ravel()):
            raise InvalidParams("coefficients must be residues in [0, p)")
        arr = arr.astype(K.dtype_for(self.p))
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        t = w - 1 if self.t is None else self.t
        object.__setattr__(self, "t", t)
        if not (0 <= self.s < w and 0 <= t < w):
            raise InvalidParams(f"selectors s={self.s}, t={t} out of range for width {w}")

    @property
    def n(self):
        return self.coeffs.shape[0]

    @property
    def d(self):
        return self.coeffs.shape[1] - 1

    @property
    def w(self):
        return self.coeffs.shape[2]

    def __eq__(self, other):
        return (
            isinstance(other, Roabp)
            and self.p == other.p
            and (self.s, self.t) == (other.s, other.t)
            and self.coeffs.shape == other.coeffs.shape
            and bool(np.all(self.coeffs == other.coeffs))
        )

    def __hash__(self):
        return hash((self.p, self.s, self.t, self.coeffs.shape))

    def __repr__(self):
        return f"Roabp(w={self.w}, n={self.n}, d={self.d}, p={self.p}, s={self.s}, t={self.t})"

    def coefficient(self, i, j):
        """A_{i,j} as a FieldMatrix (0-based layer index)."""
        return FieldMatrix.from_array(self.coeffs[i, j], self.p)

    def layer_at(self, i, x):
        """A_i(x) for a scalar x."""
        p = self.p
        x = int(x) % p
        acc = np.zeros((self.w, self.w), dtype=self.coeffs.dtype)
        for j in range(self.d, -1, -1):
            acc = (acc * x + self.coeffs[i, j]) % p
        return acc

    def __call__(self, *xs):
        return eval_field_batch(self, [xs])[0]


@dataclass
class MonomialMap:
    """Sparse coefficient map of a polynomial: exponent tuple -> nonzero residue."""

    terms: dict
    n: int
    p: int

    def __len__(self):
        return len(self.terms)

    def is_zero(self):
        return not self.terms

    def evaluate(self, point):
        p = self.p
        total = 0
        for exps, c in self.terms.items():
            term = c
            for x, e in zip(point, exps):
                term = term * pow(int(x), e, p) % p
            total += term
        return total % p

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)


# ---------------------------------------------------------------------------
# evaluation


def eval_field_batch(program, points):
    """Evaluate at many points of F_p^n at once; returns an array of P residues."""
    p = program.p
    pts = K.as_residues(points, p)
    if pts.ndim != 2 or pts.shape[1] != program.n:
        raise ArityMismatch(f"points must have {program.n} coordinates")
    if K.is_wide(p):
        return _eval_wide(program, K.to_wide(pts)).astype(object)
    P, w = pts.shape[0], program.w
    V = np.zeros((P, w), dtype=K.dtype_for(p))
    V[:, program.s] = 1
    for i in range(program.n):
        x = pts[:, i:i + 1]
        acc = K.vecmat(V, program.coeffs[i, program.d], p)
        for j in range(program.d - 1, -1, -1):
            acc = ((acc * x) % p + K.vecmat(V, program.coeffs[i, j], p)) % p
        V = acc
    return V[:, program.t]


def _eval_wide(program, pts):
    p, w = program.p, program.w
    coeffs = K.to_wide(program.coeffs)
    V = np.zeros((pts.shape[0], w), dtype=np.int64)
    V[:, program.s] = 1
    for i in range(program.n):
        x = pts[:, i:i + 1]
        acc = K.matmul_wide(V, coeffs[i, program.d], p)
        for j in range(program.d - 1, -1, -1):
            acc = K.addmod(K.mulmod(acc, x, p), K.matmul_wide(V, coeffs[i, j], p), p)
        V = acc
    return V[:, program.t]


def _ring_of(assignment, p):
    kinds = {type(a) for a in assignment}
    if len(kinds) > 1:
        raise RingMismatch("assignment mixes element types")
    kind = kinds.pop()
    if kind is CyclicRingElement:
        rings = {(a.r, a.p) for a in assignment}
        if len(rings) > 1:
            raise RingMismatch("assignment mixes cyclic rings")
        r, q = rings.pop()
        if q != p:
            raise RingMismatch(f"ring over F_{q} but program over F_{p}")
        return "cyclic", r
    if kind is PrimeFieldElement:
        if any(a.p != p for a in assignment):
            raise RingMismatch("field element modulus differs from the program's")
        return "element", None
    if issubclass(kind, (int, np.integer)):
        return "int", None
    raise RingMismatch(f"unsupported ring element type {kind.__name__}")


def eval_in_ring(program, assignment):
    """s^T prod A_i(x_i) t as a row-vector chain over any supported ring.

    ``assignment`` holds plain ints, :class:`PrimeFieldElement` or
    :class:`CyclicRingElement`; the result has the same kind.
    """
    if len(assignment) != program.n:
        raise ArityMismatch(f"expected {program.n} values, got {len(assignment)}")
    kind, r = _ring_of(list(assignment), program.p)
    if kind != "cyclic":
        val = int(eval_field_batch(program, [[int(a) for a in assignment]])[0])
        return PrimeFieldElement(val, program.p) if kind == "element" else val
    p, w = program.p, program.w
    u = [None] * w
    u[program.s] = CyclicRingElement.scalar(1, r, p)
    for i, x in enumerate(assignment):
        powers = [CyclicRingElement.scalar(1, r, p)]
        for _ in range(program.d):
            powers.append(powers[-1] * x)
        coeffs = program.coeffs[i]
        new = [None] * w
        for b in range(w):
            acc = None
            for a in range(w):
                if u[a] is None:
                    continue
                entry = None
                for j in range(program.d + 1):
                    c = int(coeffs[j, a, b])
                    if c:
                        term = powers[j].scale(c)
                        entry = term if entry is None else entry + term
                if entry is None:
                    continue
                prod = u[a] * entry
                acc = prod if acc is None else acc + prod
            new[b] = acc
        u = new
    out = u[program.t]
    return out if out is not None else CyclicRingElement.zero(r, p)


def brute_force_expand(program, budget=EXPAND_BUDGET):
    """Exact coefficient map of the computed polynomial (independent oracle)."""
    n, d, w, p = program.n, program.d, program.w, program.p
    if (d + 1) ** n > budget:
        raise BudgetExceeded(f"(d+1)^n = {(d + 1) ** n} exceeds the expansion budget {budget}")
    # state[a, m]: coefficient of monomial m (mixed radix, x_1 most significant) in entry a
    state = np.zeros((w, 1), dtype=K.dtype_for(p))
    state[program.s, 0] = 1
    for i in range(n):
        cols = state.shape[1]
        nxt = np.zeros((w, cols, d + 1), dtype=state.dtype)
        for j in range(d + 1):
            nxt[:, :, j] = K.matmul(program.coeffs[i, j].T, state, p)
        state = nxt.reshape(w, cols * (d + 1))
    row = state[program.t]
    terms = {}
    for m in np.nonzero(row)[0]:
        c = int(row[m])
        m = int(m)
        exps = []
        for _ in range(n):
            m, e = divmod(m, d + 1)
            exps.append(e)
        terms[tuple(reversed(exps))] = c
    return MonomialMap(terms, n, p)


# ---------------------------------------------------------------------------
# composition


def _pad_degree(arr, d):
    n, d0, w, _ = arr.shape
    if d0 == d + 1:
        return arr
    out = np.zeros((n, d + 1, w, w), dtype=arr.dtype)
    out[:, :d0] = arr
    return out


def roabp_sum(P, Q, sign=1):
    """Program computing C_P + sign * C_Q on width w_P + w_Q."""
    if P.n != Q.n or P.p != Q.p:
        raise InvalidParams("sum needs matching n and p")
    p, n = P.p, P.n
    d = max(P.d, Q.d)
    A = _pad_degree(P.coeffs, d).astype(object)
    B = _pad_degree(Q.coeffs, d).astype(object)
    w1, w2 = P.w, Q.w
    W = w1 + w2
    L = np.zeros((n, d + 1, W, W), dtype=object)
    L[:, :, :w1, :w1] = A
    L[:, :, w1:, w1:] = B
    s, t = P.s, P.t
    if n == 1:
        L[0, :, s, t] = (A[0, :, s, t] + sign * B[0, :, Q.s, Q.t]) % p
    else:
        L[0, :, s, w1:] = (sign * B[0, :, Q.s, :]) % p
        L[n - 1, :, w1:, t] = B[n - 1, :, :, Q.t]
    return Roabp(L % p, p, s, t)


def roabp_product(P, Q):
    """Program computing C_P * C_Q (layerwise Kronecker product)."""
    if P.n != Q.n or P.p != Q.p:
        raise InvalidParams("product needs matching n and p")
    p, n = P.p, P.n
    d = P.d + Q.d
    W = P.w * Q.w
    L = np.zeros((n, d + 1, W, W), dtype=object)
    for i in range(n):
        for j in range(P.d + 1):
            for k in range(Q.d + 1):
                L[i, j + k] = (L[i, j + k] + np.kron(P.coeffs[i, j].astype(object), Q.coeffs[i, k].astype(object))) % p
    return Roabp(L, p, P.s * Q.w + Q.s, P.t * Q.w + Q.t)


# ---------------------------------------------------------------------------
# generators


def two_monomial(S, S2, n, p=DEFAULT_P):
    """Width-2 program for prod_{i in S} x_i - prod_{i in S2} x_i (1-based indices)."""
    S, S2 = set(S), set(S2)
    if not (S | S2) <= set(range(1, n + 1)):
        raise InvalidParams("subset indices must lie in 1..n")
    L = np.zeros((n, 2, 2, 2), dtype=object)

    def uni(i, sub):  # coefficient vector (c0, c1) of x_i or 1
        return (0, 1) if i in sub else (1, 0)

    if n == 1:
        f, g = uni(1, S), uni(1, S2)
        for j in range(2):
            L[0, j, 0, 1] = (f[j] - g[j]) % p
        return Roabp(L, p, 0, 1)
    for i in range(1, n + 1):
        f, g = uni(i, S), uni(i, S2)
        for j in range(2):
            if i == 1:
                L[0, j, 0, 0] = f[j]
                L[0, j, 0, 1] = (-g[j]) % p
            elif i == n:
                L[i - 1, j, 0, 1] = f[j]
                L[i - 1, j, 1, 1] = g[j]
            else:
                L[i - 1, j, 0, 0] = f[j]
                L[i - 1, j, 1, 1] = g[j]
    return Roabp(L, p, 0, 1)


def worked_example(p=DEFAULT_P):
    """Width 2, two variables: A_1 = [[0, x1], [0, 0]], A_2 = [[0, 0], [0, x2]], C = x1*x2."""
    L = np.zeros((2, 2, 2, 2), dtype=object)
    L[0, 1, 0, 1] = 1
    L[1, 1, 1, 1] = 1
    return Roabp(L, p, 0, 1, name="worked_example")


def worked_example_diagonal(p=DEFAULT_P):
    """The diagonal layout diag(x1, 1), diag(1, x2) read with e_1, e_2; computes 0."""
    L = np.zeros((2, 2, 2, 2), dtype=object)
    L[0, 1, 0, 0] = 1
    L[0, 0, 1, 1] = 1
    L[1, 0, 0, 0] = 1
    L[1, 1, 1, 1] = 1
    return Roabp(L, p, 0, 1, name="worked_example_diagonal")


def monomial_program(exponents, p=DEFAULT_P):
    """Width-1 program for prod x_i^{e_i}."""
    n, d = len(exponents), max(max(exponents), 0)
    L = np.zeros((n, d + 1, 1, 1), dtype=object)
    for i, e in enumerate(exponents):
        L[i, e, 0, 0] = 1
    return Roabp(L, p, 0, 0)


def _rand(rng, shape, p):
    if p < (1 << 62):
        return rng.integers(0, p, size=shape, dtype=np.int64).astype(object)
    return np.vectorize(lambda _: int(rng.integers(0, 1 << 62)) % p, otypes=[object])(np.empty(shape))


def generate(family, seed, w, n, d, p=DEFAULT_P, S=None, S2=None):
    """Deterministic instance of a named family.

    ``zero_difference`` returns width 2w (two sign-opposed copies of a random
    width-w program).  ``two_monomial`` ignores w and d and uses the subsets
    S, S2 (1-based), drawing them from the seed when omitted.  ``diagonal``
    reads entry (1, 1) so that it computes a product of univariates.
    """
    if family not in FAMILIES:
        raise InvalidParams(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if w < 1 or n < 1 or d < 0:
        raise InvalidParams("need w >= 1, n >= 1, d >= 0")
    rng = np.random.default_rng(seed)
    name = f"{family}_s{seed}"
    if family == "random":
        return Roabp(_rand(rng, (n, d + 1, w, w), p), p, 0, w - 1, name=name)
    if family == "diagonal":
        L = np.zeros((n, d + 1, w, w), dtype=object)
        diag = _rand(rng, (n, d + 1, w), p)
        for a in range(w):
            L[:, :, a, a] = diag[:, :, a]
        return Roabp(L, p, 0, 0, name=name)
    if family == "upper_triangular":
        mask = np.triu(np.ones((w, w), dtype=bool))
        L = _rand(rng, (n, d + 1, w, w), p) * mask
        return Roabp(L, p, 0, w - 1, name=name)
    if family == "path_controlled":
        L = np.zeros((n, d + 1, w, w), dtype=object)
        pos = 0
        for i in range(n):
            perm = rng.permutation(w)
            if i == n - 1:
                # route the live coordinate to the end selector
                j = int(np.nonzero(perm == w - 1)[0][0])
                perm[j], perm[pos] = perm[pos], perm[j]
            uni = _rand(rng, (d + 1, w), p)
            uni[d] = (uni[d] % (p - 1)) + 1  # nonzero leading coefficients
            for a in range(w):
                L[i, :, a, perm[a]] = uni[:, a]
            pos = int(perm[pos])
        return Roabp(L, p, 0, w - 1, name=name)
    if family == "zero_difference":
        base = Roabp(_rand(rng, (n, d + 1, w, w), p), p, 0, w - 1)
        out = roabp_sum(base, base, -1)
        return Roabp(out.coeffs, p, out.s, out.t, name=name)
    # two_monomial
    if S is None or S2 is None:
        while True:
            S = {i + 1 for i in range(n) if rng.integers(0, 2)}
            S2 = {i + 1 for i in range(n) if rng.integers(0, 2)}
            if S != S2:
                break
    out = two_monomial(S, S2, n, p)
    return Roabp(out.coeffs, p, out.s, out.t, name=name)


# ---------------------------------------------------------------------------
# text format


def serialize(program):
    lines = [
        f"p = {program.p}",
        f"w = {program.w}",
        f"n = {program.n}",
        f"d = {program.d}",
        f"s = {program.s + 1}",
        f"t = {program.t + 1}",
    ]
    for i in range(program.n):
        for j in range(program.d + 1):
            lines.append(f"layer {i + 1}, coeff {j}:")
            for row in program.coeffs[i, j]:
                lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


HEADER_KEYS = ("p", "w", "n", "d", "s", "t")


def parse(text):
    header = {}
    blocks = {}
    lines = [(k + 1, ln.split("#", 1)[0].strip()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, ln) for k, ln in lines if ln]
    pos = 0
    while pos < len(lines) and not lines[pos][1].startswith("layer"):
        lineno, ln = lines[pos]
        if "=" not in ln:
            raise ParseError("expected 'key = value'", line=lineno)
        key, val = (x.strip() for x in ln.split("=", 1))
        if key not in HEADER_KEYS:
            raise ParseError("unknown header key", line=lineno, field=key)
        if key in header:
            raise ParseError("duplicate header key", line=lineno, field=key)
        try:
            header[key] = int(val)
        except ValueError:
            raise ParseError(f"not an integer: {val!r}", line=lineno, field=key) from None
        pos += 1
    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise ParseError(f"missing header fields: {', '.join(missing)}", field=missing[0])
    p, w, n, d = header["p"], header["w"], header["n"], header["d"]
    if p < 2 or w < 1 or n < 1 or d < 0:
        raise ParseError("header values out of range")
    for key in ("s", "t"):
        if not 1 <= header[key] <= w:
            raise ParseError(f"selector must be in 1..{w}", field=key)
    while pos < len(lines):
        lineno, ln = lines[pos]
        head = ln.rstrip(":").replace(",", " ").split()
        if len(head) != 4 or head[0] != "layer" or head[2] != "coeff" or not ln.endswith(":"):
            raise ParseError("expected 'layer i, coeff j:'", line=lineno)
        try:
            i, j = int(head[1]), int(head[3])
        except ValueError:
            raise ParseError("layer and coeff indices must be integers", line=lineno) from None
        if not (1 <= i <= n and 0 <= j <= d):
            raise ParseError(f"block index out of range (layer {i}, coeff {j})", line=lineno)
        if (i, j) in blocks:
            raise ParseError(f"duplicate block (layer {i}, coeff {j})", line=lineno)
        rows = []
        for r in range(w):
            pos += 1
            if pos >= len(lines) or lines[pos][1].startswith("layer"):
                raise ParseError(f"block has {r} rows, expected {w}", line=lineno)
            rl, row = lines[pos]
            try:
                vals = [int(x) for x in row.split()]
            except ValueError:
                raise ParseError("non-integer entry", line=rl) from None
            if len(vals) != w:
                raise ParseError(f"row has {len(vals)} entries, expected {w}", line=rl)
            for v in vals:
                if not 0 <= v < p:
                    raise ParseError(f"residue {v} not in [0, {p})", line=rl)
            rows.append(vals)
        blocks[(i, j)] = rows
        pos += 1
    L = np.zeros((n, d + 1, w, w), dtype=object)
    for i in range(1, n + 1):
        for j in range(d + 1):
            if (i, j) not in blocks:
                raise ParseError(f"missing block (layer {i}, coeff {j})")
            L[i - 1, j] = np.array(blocks[(i, j)], dtype=object)
    return Roabp(L, p, header["s"] - 1, header["t"] - 1)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def save(program, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(program))
