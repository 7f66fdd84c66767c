"""Matrix word algebras and the idempotent machinery built on them.

The algebra generated by a set of w x w matrices is computed as the span of
all words in the generators.  On top of it sit the radical (via the trace
form), Cayley-Hamilton idempotents, Newton lifting, corner rank descent, the
rank-one projector pipeline and matrix units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CharacteristicTooSmall,
    DegenerateSelector,
    ExtractionFailed,
    GridExhausted,
    InvalidParams,
    NonSplitSpectrum,
    NotFullAlgebra,
    NotIdempotentModRadical,
    RankAlreadyOne,
    WordCountMismatch,
    ZeroIdempotent,
)
from .field import FieldMatrix, Poly, SpanBasis, inv, poly_gcd_bezout, poly_roots, poly_squarefree


@dataclass
class WordAlgebraBasis:
    generators: list
    basis: list
    generation_log: list  # word (tuple of generator indices) for each basis element
    p: int
    w: int
    _radical: list | None = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.basis)

    def is_full(self):
        return self.dim == self.w * self.w

    @property
    def radical_basis(self):
        if self._radical is None:
            self._radical = radical_trace_form(self)
        return self._radical

    def coordinates(self, X):
        """Coefficients c with X = sum c_k basis[k], or None when X is outside the span."""
        M = FieldMatrix.from_array(np.stack([b.a.ravel() for b in self.basis], axis=1), self.p)
        return M.solve(X.a.ravel())

    def contains(self, X):
        return self.coordinates(X) is not None


@dataclass
class Projector:
    matrix: FieldMatrix
    rank: int = 0
    construction_trace: list = field(default_factory=list)

    def __post_init__(self):
        M = self.matrix
        if M @ M != M:
            raise ArithmeticError("projector matrix is not idempotent")
        self.rank = M.rank()
        if self.rank == 0:
            raise ZeroIdempotent("the idempotent is zero")

    @property
    def descents(self):
        return sum(1 for step in self.construction_trace if step.get("step") == "corner")


def span_closure(generators):
    """Unital algebra generated by ``generators``: the span of all their words.

    Words are grown by right multiplication from the identity; a word is kept
    when it leaves the current span, so the basis consists of actual words.
    """
    generators = list(generators)
    if not generators:
        raise InvalidParams("need at least one generator")
    p, w = generators[0].p, generators[0].rows
    ident = FieldMatrix.identity(w, p)
    span = SpanBasis(w * w, p)
    basis, log = [], []

    def offer(X, word):
        if span.add(X.a.ravel()):
            basis.append(X)
            log.append(word)

    offer(ident, ())
    for k, g in enumerate(generators):
        offer(g, (k,))
    pos = 0
    while pos < len(basis) and len(basis) < w * w:
        X, word = basis[pos], log[pos]
        for k, g in enumerate(generators):
            offer(X @ g, word + (k,))
        pos += 1
    return WordAlgebraBasis(generators, basis, log, p, w)


def radical_trace_form(algebra):
    """Basis of {X in A : Tr(X B) = 0 for all B in A}, the radical when p > w."""
    p, w = algebra.p, algebra.w
    if p <= w:
        raise CharacteristicTooSmall(f"trace-form radical needs p > w (p={p}, w={w})")
    B = algebra.basis
    gram = [[(B[i] @ B[j]).trace() for j in range(len(B))] for i in range(len(B))]
    out = []
    for c in FieldMatrix(gram, p).nullspace():
        X = FieldMatrix.zeros(w, w, p)
        for k, ck in enumerate(c):
            if ck:
                X = X + B[k].scale(int(ck))
        if not X.power(w).is_zero():
            raise ArithmeticError("trace-form kernel element is not nilpotent")
        out.append(X)
    return out


def fullness_witness(algebra, left_words, right_words, s=0, t=None):
    """Gram matrix K_ab = e_s^T L_a R_b e_t and its determinant.

    A nonzero determinant certifies that the left words are linearly
    independent, hence span all of Mat_w.  A zero determinant proves nothing.
    """
    w, p = algebra.w, algebra.p
    t = w - 1 if t is None else t
    if len(left_words) != w * w or len(right_words) != w * w:
        raise WordCountMismatch(f"need {w * w} left and right words")
    rows = [[int((L @ R).a[s, t]) for R in right_words] for L in left_words]
    gram = FieldMatrix(rows, p)
    return gram, gram.det()


def ch_idempotent(M):
    """Idempotent polynomial in M for the primary component of its smallest rational eigenvalue."""
    p, w = M.p, M.rows
    m = M.minpoly()
    parts = poly_squarefree(m)
    radical = Poly.const(1, p)
    for f, _ in parts:
        radical = radical * f
    roots = poly_roots(radical) if radical.deg > 0 else []
    if not roots:
        raise NonSplitSpectrum("minimal polynomial has no F_p-rational root")
    mu = roots[0]
    lin = Poly([-mu, 1], p)
    e = next(k for f, k in parts if (f % lin).is_zero())
    primary = lin ** e
    comp = m // primary
    if comp.deg == 0:
        poly = Poly.const(1, p)
        E = FieldMatrix.identity(w, p)
    else:
        _, _, b = poly_gcd_bezout(primary, comp)
        poly = (b * comp) % m
        E = M.poly_eval(poly)
    return Projector(E, construction_trace=[{"step": "cayley-hamilton", "mu": mu, "poly": list(poly.coeffs)}])


def newton_lift(E, algebra):
    """Lift an idempotent modulo the radical to an exact idempotent.

    Uses X <- 3X^2 - 2X^3: if X^2 - X lies in J^k then the new defect lies in
    J^(2k), so ceil(log2 w) steps reach J^w = 0.
    """
    p, w = E.p, E.rows
    defect = E @ E - E
    if not defect.is_zero():
        rad = SpanBasis(w * w, p)
        for X in algebra.radical_basis:
            rad.add(X.a.ravel())
        if not rad.contains(defect.a.ravel()):
            raise NotIdempotentModRadical("E^2 - E does not lie in the radical")
    X = E
    steps = 0
    limit = max(1, (w - 1).bit_length())
    while X @ X != X:
        if steps >= limit:
            raise ArithmeticError("Newton lifting did not converge")
        X2 = X @ X
        X = X2.scale(3) - (X2 @ X).scale(2)
        steps += 1
    if X.is_zero():
        raise ZeroIdempotent("lifted idempotent is zero")
    return Projector(X, construction_trace=[{"step": "newton", "iterations": steps}])


def _corner_frame(E):
    """E = P Q with P the pivot columns of E and Q the nonzero rows of rref(E)."""
    R, piv = E.rref()
    P = FieldMatrix.from_array(E.a[:, piv], E.p)
    Q = FieldMatrix.from_array(R.a[: len(piv)], E.p)
    return P, Q


def _simple_rational_roots(chi):
    """(smallest simple F_p-root or None, whether a simple non-rational factor exists)."""
    simple = next((f for f, k in poly_squarefree(chi) if k == 1), None)
    if simple is None:
        return None, False
    roots = poly_roots(simple)
    if roots:
        return roots[0], False
    return None, True


def corner_rank_descent(E, A, B, grid):
    """One rank-descent step inside the corner algebra E Mat_w E.

    For each lambda in ``grid`` (in order) the corner T = E (A + lambda B) E is
    examined; at the first lambda whose corner characteristic polynomial has a
    simple rational root mu, the eigenprojector adj(mu - T) / Tr adj(mu - T)
    of the corner is returned.  It has rank one.  Grids with more than
    4r^2 - 4r points (r = rank E) contain such a lambda whenever one exists.
    """
    if E.rank < 2:
        raise RankAlreadyOne("projector already has rank one")
    P, Q = _corner_frame(E.matrix)
    r = P.cols
    PA, PB = Q @ A @ P, Q @ B @ P
    saw_nonsplit = False
    for lam in grid:
        Tc = PA + PB.scale(lam)
        mu, nonsplit = _simple_rational_roots(Tc.charpoly())
        saw_nonsplit |= nonsplit
        if mu is None:
            continue
        adj = (FieldMatrix.identity(r, E.matrix.p).scale(mu) - Tc).adjugate()
        tr = adj.trace()
        if tr == 0:
            continue
        Pi_c = adj.scale(inv(tr, E.matrix.p))
        out = P @ Pi_c @ Q
        step = {"step": "corner", "lambda": int(lam), "mu": int(mu), "from_rank": E.rank}
        return Projector(out, construction_trace=E.construction_trace + [step])
    if saw_nonsplit:
        raise NonSplitSpectrum("corner spectra were simple but not F_p-rational on the grid")
    raise GridExhausted("no grid point gives a simple corner eigenvalue")


def default_grid(w, p):
    size = 4 * w * w - 4 * w + 1
    return range(min(size, p))


def _invertible_candidates(algebra, grid):
    basis, ident = algebra.basis, FieldMatrix.identity(algebra.w, algebra.p)
    singles = [(k,) for k, b in enumerate(basis) if b != ident]
    for k in singles:
        yield basis[k[0]], {"combination": [(k[0], 1)]}
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            for c in grid:
                if c:
                    yield basis[i] + basis[j].scale(c), {"combination": [(i, 1), (j, int(c))]}
    yield ident, {"combination": [(0, 1)]}


def rank_one_projector(algebra, grid=None):
    """Rank-one idempotent of a full algebra, built without eigenvalue oracles.

    Step 1 picks an invertible element, step 2 takes its Cayley-Hamilton
    idempotent, and steps 3-4 apply corner descent with (A, B) drawn from the
    basis in generation order until the rank is one.
    """
    w, p = algebra.w, algebra.p
    if not algebra.is_full():
        raise NotFullAlgebra(f"algebra has dimension {algebra.dim} < {w * w}")
    if grid is None:
        grid = default_grid(w, p)
    grid = list(grid)
    if w == 1:
        return Projector(FieldMatrix.identity(1, p), construction_trace=[{"step": "trivial"}])
    basis = algebra.basis
    for M, how in _invertible_candidates(algebra, grid):
        if M.det() == 0:
            continue
        try:
            E = ch_idempotent(M)
        except NonSplitSpectrum:
            continue
        E.construction_trace.insert(0, {"step": "invertible", **how})
        while E.rank > 1:
            E = _descend(E, basis, grid)
            if E is None:
                break
        if E is not None:
            return E
    raise ExtractionFailed("no invertible element and basis pair produced a rank-one projector")


def _descend(E, basis, grid):
    for i in range(len(basis)):
        for j in range(len(basis)):
            try:
                return corner_rank_descent(E, basis[i], basis[j], grid)
            except (GridExhausted, NonSplitSpectrum):
                continue
    return None


def rank_one_factors(M):
    """u, v with M = u v^T for a rank-one M (v scaled so that u is a column of M)."""
    p = M.p
    col = next(j for j in range(M.cols) if np.any(M.a[:, j]))
    u = M.a[:, col].copy()
    i = int(np.nonzero(u)[0][0])
    v = (M.a[i] * inv(int(u[i]), p)) % p
    return u, v


@dataclass
class MatrixUnits:
    units: list  # units[i][j] = e_i e_j^T
    U: list
    V: list
    u: np.ndarray
    v: np.ndarray

    def __getitem__(self, ij):
        i, j = ij
        return self.units[i][j]


def matrix_units(algebra, pi, s=None, t=None):
    """Transport a rank-one projector Pi = u v^T to a full system of matrix units.

    Solves U_i u = e_i and v^T V_j = e_j^T inside the algebra and returns
    W_ij = U_i Pi V_j.  When selectors are given, s^T u and v^T t must be
    nonzero.
    """
    w, p = algebra.w, algebra.p
    if not algebra.is_full():
        raise NotFullAlgebra(f"algebra has dimension {algebra.dim} < {w * w}")
    if pi.rank != 1:
        raise InvalidParams("matrix units need a rank-one projector")
    u, v = rank_one_factors(pi.matrix)
    if t is not None and v[t] == 0:
        raise DegenerateSelector("v^T e_t = 0")
    if s is not None and u[s] == 0:
        raise DegenerateSelector("e_s^T u = 0")
    basis = algebra.basis
    left = FieldMatrix.from_array(np.stack([(b.a.dot(u)) % p for b in basis], axis=1), p)
    right = FieldMatrix.from_array(np.stack([(v.dot(b.a)) % p for b in basis], axis=1), p)
    U, V = [], []
    for i in range(w):
        e = [1 if k == i else 0 for k in range(w)]
        cu, cv = left.solve(e), right.solve(e)
        if cu is None or cv is None:
            raise NotFullAlgebra("transport system is inconsistent")
        U.append(_combine(basis, cu, w, p))
        V.append(_combine(basis, cv, w, p))
    units = [[U[i] @ pi.matrix @ V[j] for j in range(w)] for i in range(w)]
    for i in range(w):
        for j in range(w):
            if units[i][j] != FieldMatrix.unit(i, j, w, p):
                raise ArithmeticError("matrix unit check failed")
    return MatrixUnits(units, U, V, u, v)


def _combine(basis, coeffs, w, p):
    X = FieldMatrix.zeros(w, w, p)
    for b, c in zip(basis, coeffs):
        if c:
            X = X + b.scale(int(c))
    return X


def pairing_gram(units, pi, s=0, t=None):
    """G_ij = e_s^T W_ij Pi e_t and its rank (at most one, since Pi has rank one)."""
    w = len(units.units)
    t = w - 1 if t is None else t
    p = pi.matrix.p
    G = FieldMatrix([[int((units[i, j] @ pi.matrix).a[s, t]) for j in range(w)] for i in range(w)], p)
    return G, G.rank()


def coefficient_generators(program):
    """All coefficient matrices A_{i,j} of a program."""
    return [program.coefficient(i, j) for i in range(program.n) for j in range(program.d + 1)]


def specialized_generators(program, chi):
    """Layer matrices A_i(chi_i) at a point chi."""
    return [FieldMatrix.from_array(program.layer_at(i, x), program.p) for i, x in enumerate(chi)]
