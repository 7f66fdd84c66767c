"""Kronecker-curve hitting sets and the constraint polynomials behind them.

Every variable is placed on the curve x_i = (lambda + alpha_i)^B and lambda
runs over the grid {0, ..., M}.  The module also computes the constraint
polynomials used for finite avoidance, the prefix-space reduction, and a
sampled version of the determinant witness H(lambda).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .algebra import matrix_units
from .errors import (
    AllRoots,
    BaseTooSmall,
    BudgetExceeded,
    DegreeBudgetExceeded,
    FieldTooSmall,
    InvalidParams,
)
from .field import (
    BivariatePoly,
    FieldMatrix,
    Poly,
    SpanBasis,
    discriminant,
    interpolate,
    ring_det,
    sylvester_resultant,
)
from .modular import Verdict
from .roabp import eval_field_batch

CURVE_BUDGET = 10**7
INTERPOLATION_LIMIT = 600


def select_base(w, d, deg_C, K=8):
    """B = 2 (K w^3 d + deg_C + 1) (d+1)^(w^2) + 1."""
    if min(w, d, K) < 1 or deg_C < 0:
        raise InvalidParams("select_base needs positive w, d, K")
    return 2 * (K * w**3 * d + deg_C + 1) * (d + 1) ** (w * w) + 1


def grid_bound(w, d):
    """M = 9 w^4 + 2 d^2 w^8 + 1."""
    return 9 * w**4 + 2 * d * d * w**8 + 1


def kronecker_phi(e, B, d=None):
    """Phi(e) = sum_j e_j B^(j-1)."""
    d = max(e, default=0) if d is None else d
    if B < d + 1:
        raise BaseTooSmall(f"base B={B} must be at least d+1={d + 1}")
    if any(x < 0 or x > d for x in e):
        raise InvalidParams(f"exponents must lie in [0, {d}]")
    out = 0
    for x in reversed(e):
        out = out * B + x
    return out


@dataclass(frozen=True)
class CurveConfig:
    """Curve x_i = (lambda + alpha_i)^B with the weights used by the witness.

    ``B`` defaults to :func:`select_base`; ``alphas`` to 0, 1, ..., n-1; the
    weights to a_k = k-1 and b_l = w(l-1) + 1.
    """

    w: int
    d: int
    n: int
    p: int
    K: int = 8
    deg_C: int | None = None
    B: int | None = None
    alphas: tuple | None = None
    a_weights: tuple | None = None
    b_weights: tuple | None = None
    check_bound: bool = True

    def __post_init__(self):
        deg = self.n * self.d if self.deg_C is None else self.deg_C
        object.__setattr__(self, "deg_C", deg)
        base = select_base(self.w, self.d, deg, self.K)
        if self.B is None:
            object.__setattr__(self, "B", base)
        elif self.check_bound and self.B < base:
            raise BaseTooSmall(f"B={self.B} does not exceed the bound {base - 1}")
        alphas = tuple(range(self.n)) if self.alphas is None else tuple(int(a) % self.p for a in self.alphas)
        if len(alphas) != self.n or len(set(alphas)) != self.n:
            raise InvalidParams("need n pairwise distinct shifts")
        object.__setattr__(self, "alphas", alphas)
        w = self.w
        a = tuple(range(w)) if self.a_weights is None else tuple(self.a_weights)
        b = tuple(w * l + 1 for l in range(w)) if self.b_weights is None else tuple(self.b_weights)
        for name, seq in (("a", a), ("b", b)):
            if len(seq) != w or any(x >= y for x, y in zip(seq, seq[1:])):
                raise InvalidParams(f"{name} weights must be {w} strictly increasing integers")
        object.__setattr__(self, "a_weights", a)
        object.__setattr__(self, "b_weights", b)

    @property
    def M(self):
        return grid_bound(self.w, self.d)

    def reduced_exponent(self):
        """An exponent e with x^e = x^B for every x in F_p (including 0)."""
        e = self.B % (self.p - 1)
        return e if e else self.p - 1


def curve_assign(config, lam):
    """x_i^* = (lambda^* + alpha_i)^B."""
    p = config.p
    return [pow((int(lam) + a) % p, config.B, p) for a in config.alphas]


def curve_points(config, lams):
    """Curve points for many lambdas at once: array of shape (len(lams), n)."""
    p = config.p
    lam = K.as_residues(list(lams), p)
    base = (lam[:, None] + K.as_residues(config.alphas, p)[None, :]) % p
    return K.powmod(base, config.reduced_exponent(), p)


def build_hitting_set(w, d, p=None):
    """L = {0, ..., M}; the field must be strictly larger than |L|."""
    M = grid_bound(w, d)
    if p is not None and p <= M + 1:
        raise FieldTooSmall(f"|F_p| = {p} must exceed |L| = {M + 1}")
    return range(M + 1)


# ---------------------------------------------------------------------------
# prefix spaces


@dataclass
class ReductionMap:
    m: int
    basis: list  # FieldMatrix spanning the union of all prefix spaces
    layer_dims: list  # dim of each prefix space V_0 .. V_n
    beta: list  # beta[k] = coordinates of the V_k basis in ``basis``

    def certify(self, w):
        return self.m <= w * w


def _coords(vectors, target, p):
    A = FieldMatrix.from_array(np.stack(vectors, axis=1), p)
    return A.solve(target)


def prefix_space_reduce(program, probe_grid=None):
    """Prefix coefficient spaces V_k = span{V A_{k,j} : V in V_{k-1}}, V_0 = span{I}.

    Returns the saturated span of all V_k.  When a probe grid is given, every
    specialised prefix V A_k(chi) at a probe chi is checked to lie in V_k.
    """
    p, w = program.p, program.w
    if probe_grid is not None and len(probe_grid) < program.d + 1:
        raise InvalidParams(f"probe grid needs at least d+1 = {program.d + 1} points")
    ident = FieldMatrix.identity(w, p)
    layer = [ident]
    union = SpanBasis(w * w, p)
    saturated = []
    dims = [1]
    spaces = [[ident]]

    def absorb(mats):
        for X in mats:
            if union.add(X.a.ravel()):
                saturated.append(X)

    absorb(layer)
    for i in range(program.n):
        span = SpanBasis(w * w, p)
        nxt = []
        for V in layer:
            for j in range(program.d + 1):
                X = V @ program.coefficient(i, j)
                if span.add(X.a.ravel()):
                    nxt.append(X)
        if probe_grid is not None:
            for chi in probe_grid:
                A = FieldMatrix.from_array(program.layer_at(i, chi), p)
                for V in layer:
                    if not span.contains((V @ A).a.ravel()):
                        raise ArithmeticError("specialised prefix left its coefficient space")
        layer = nxt
        dims.append(len(layer))
        spaces.append(layer)
        absorb(layer)
    beta = []
    vecs = [X.a.ravel() for X in saturated]
    for mats in spaces:
        rows = []
        for X in mats:
            c = _coords(vecs, X.a.ravel(), p)
            if c is None:
                raise ArithmeticError("prefix space element outside the saturated basis")
            rows.append([int(v) for v in c])
        beta.append(rows)
    out = ReductionMap(len(saturated), saturated, dims, beta)
    if not out.certify(w):
        raise ArithmeticError("effective dimension exceeds w^2")
    return out


# ---------------------------------------------------------------------------
# constraint polynomials


@dataclass
class ConstraintSet:
    entries: list = field(default_factory=list)  # (name, Poly)
    budgets: dict = field(default_factory=dict)  # name -> degree budget
    vanishing: list = field(default_factory=list)  # names of identically zero constraints
    F_univ: Poly | None = None

    def get(self, name):
        return next(poly for key, poly in self.entries if key == name)

    def degrees(self):
        return {name: poly.deg for name, poly in self.entries}


def _pencil_charpoly(X0, X1, r):
    """det(mu I - Y(lambda)) for the leading r x r block Y of X0 + lambda X1."""
    p = X0.p
    one = BivariatePoly.const(1, p)
    zero = BivariatePoly([], p)
    entries = _pencil_entries(X0, X1, range(r), range(r))
    return ring_det(entries, zero, one)


def _pencil_entries(X0, X1, rows, cols):
    """Entries of mu I - (X0 + lambda X1) restricted to the given rows/cols."""
    p = X0.p
    out = []
    for a in rows:
        row = []
        for b in cols:
            lin = Poly([-int(X0.a[a, b]), -int(X1.a[a, b])], p)
            row.append(BivariatePoly([lin, Poly.const(1 if a == b else 0, p)], p))
        out.append(row)
    return out


def _adj_entry(X0, X1, r, s, t):
    """(s, t) entry of adj(mu I - Y(lambda)): (-1)^(s+t) times the (t, s) minor."""
    p = X0.p
    rows = [k for k in range(r) if k != t]
    cols = [k for k in range(r) if k != s]
    minor = ring_det(_pencil_entries(X0, X1, rows, cols), BivariatePoly([], p), BivariatePoly.const(1, p))
    return -minor if (s + t) % 2 else minor


def constraint_polys(X0, X1, ranks, s=0, t=None):
    """F_disc, F_proj, F_pair, F_tri for each rank r of the pencil X(lambda) = X0 + lambda X1.

    For rank r the leading r x r principal block Y(lambda) is used:
      F_disc = Disc_mu det(mu - Y),   F_proj = Res_mu(det(mu - Y), det(mu - Y'))
      F_pair = Res_mu(det(mu - Y), e_s^T adj(mu - Y) e_t),   F_tri = det Y
    with Y' the leading (r-1) block.  Degrees are checked against the budgets
    2w^2, 2w^2, 2w^3, 2w^3 and 8w^3 for the per-rank product; identically
    zero constraints are reported in ``vanishing`` and left out of F_univ.
    """
    p, w = X0.p, X0.rows
    if isinstance(ranks, int):
        ranks = [ranks]
    out = ConstraintSet()
    univ = Poly.const(1, p)
    for r in ranks:
        if not 1 <= r <= w:
            raise InvalidParams(f"rank {r} out of range 1..{w}")
        tt = r - 1 if t is None else min(t, r - 1)
        ss = min(s, r - 1)
        chi = _pencil_charpoly(X0, X1, r)
        one = Poly.const(1, p)
        if r >= 2:
            f_disc = discriminant(chi)
            f_proj = sylvester_resultant(chi, _pencil_charpoly(X0, X1, r - 1))
        else:
            f_disc = f_proj = one
        adj = _adj_entry(X0, X1, r, ss, tt) if r >= 2 else BivariatePoly.const(1, p)
        f_pair = sylvester_resultant(chi, adj) if not adj.is_zero() else Poly.zero(p)
        f_tri = _det_affine(X0, X1, r)
        product = f_disc * f_proj * f_pair * f_tri
        parts = [
            ("F_disc", f_disc, 2 * w * w),
            ("F_proj", f_proj, 2 * w * w),
            ("F_pair", f_pair, 2 * w**3),
            ("F_tri", f_tri, 2 * w**3),
            ("F_rank", product, 8 * w**3),
        ]
        for name, poly, budget in parts:
            key = f"{name}[r={r}]"
            if poly.deg > budget:
                raise DegreeBudgetExceeded(f"{key} has degree {poly.deg} > {budget}")
            out.entries.append((key, poly))
            out.budgets[key] = budget
            if poly.is_zero():
                out.vanishing.append(key)
            elif name != "F_rank":
                univ = univ * poly
    out.F_univ = univ
    return out


def _det_affine(X0, X1, r):
    """det(X0 + lambda X1) on the leading r x r block, as a Poly in lambda."""
    p = X0.p
    entries = [[Poly([int(X0.a[a, b]), int(X1.a[a, b])], p) for b in range(r)] for a in range(r)]
    return ring_det(entries, Poly.zero(p), Poly.const(1, p))


def finite_avoid(F, L):
    """First lambda in L (in order) at which every factor of F is nonzero."""
    factors = [F] if isinstance(F, Poly) else list(F)
    if not factors:
        return next(iter(L))
    if any(f.is_zero() for f in factors):
        raise AllRoots("a constraint polynomial is identically zero")
    p = factors[0].p
    L = list(L)
    ok = np.ones(len(L), dtype=bool)
    for f in factors:
        ok &= f.eval_many(L) != 0
    hits = np.nonzero(ok)[0]
    if len(hits) == 0:
        raise AllRoots(f"all {len(L)} grid points are roots (deg {sum(f.deg for f in factors)})")
    return int(L[int(hits[0])]) % p


# ---------------------------------------------------------------------------
# witness and the curve test


def program_matrix(program, point):
    """The full product A_1(x_1) ... A_n(x_n) at one point."""
    p = program.p
    M = np.eye(program.w, dtype=program.coeffs.dtype)
    for i, x in enumerate(point):
        M = K.matmul(M, program.layer_at(i, x), p)
    return FieldMatrix.from_array(M, p)


@dataclass
class WitnessReport:
    delta_values: list
    all_zero: bool
    max_rank: int
    rank_one_factorization: bool
    observed_degree: int | None
    leading_coefficient: int | None
    bound_stated: int
    bound_curve: int
    samples: list


def tri_witness(program, algebra, pi, config, sample_points, units=None):
    """Sample Delta(lambda) = det H(lambda) along the curve.

    H_kl = e_s^T U_k M^(a_k) Pi M^(b_l) V_l e_t, where M is the program's full
    matrix product at the curve point and U_k, V_l come from the matrix units
    of ``pi``.  Nothing is asserted about nonvanishing; the report records
    the sampled values, the largest rank of H seen, and (for small bounds) the
    interpolated degree of Delta.
    """
    w, p = program.w, program.p
    if units is None:
        units = matrix_units(algebra, pi)
    a, b = config.a_weights, config.b_weights
    lams = list(sample_points)
    deltas, max_rank = [], 0
    for lam in lams:
        M = program_matrix(program, curve_assign(config, lam))
        left = [units.U[k] @ M.power(a[k]) @ pi.matrix for k in range(w)]
        right = [M.power(b[l]) @ units.V[l] for l in range(w)]
        H = FieldMatrix(
            [[int((left[k] @ right[l]).a[program.s, program.t]) for l in range(w)] for k in range(w)], p
        )
        deltas.append(H.det())
        max_rank = max(max_rank, H.rank())
    bound_curve = w * (a[-1] + b[-1]) * program.n * program.d * config.B
    degree = lead = None
    if bound_curve + 1 <= min(INTERPOLATION_LIMIT, p - 1) and len(lams) >= bound_curve + 1:
        poly = interpolate(lams[: bound_curve + 1], deltas[: bound_curve + 1], p)
        degree, lead = poly.deg, poly.lc
    return WitnessReport(
        delta_values=deltas,
        all_zero=not any(deltas),
        max_rank=max_rank,
        rank_one_factorization=w >= 2 and max_rank <= 1,
        observed_degree=degree,
        leading_coefficient=lead,
        bound_stated=2 * program.d**2 * w**8,
        bound_curve=bound_curve,
        samples=lams,
    )


def hitting_pit(program, config=None, budget=CURVE_BUDGET, chunk=256):
    """Evaluate along the curve for lambda = 0..M; NONZERO at the first nonzero value."""
    w, d, n, p = program.w, program.d, program.n, program.p
    if (d + 1) ** (w * w) > budget:
        raise BudgetExceeded(f"(d+1)^(w^2) = {(d + 1) ** (w * w)} exceeds {budget}")
    d = max(d, 1)  # constant layers are handled as degree at most one
    L = build_hitting_set(w, d, p)
    if config is None:
        prefix_space_reduce(program)
        config = CurveConfig(w, d, n, p, deg_C=n * d)
    tested = 0
    for start in range(0, len(L), chunk):
        lams = L[start:start + chunk]
        vals = eval_field_batch(program, curve_points(config, lams))
        nz = np.nonzero(vals)[0]
        if len(nz):
            k = int(nz[0])
            return Verdict("NONZERO", int(lams[k]), False, tested + k + 1, "curve")
        tested += len(lams)
    return Verdict("ZERO", None, False, tested, "curve")


def export_lines(config, L):
    """Header and body lines of the hitting-set export."""
    head = [
        f"# p = {config.p}",
        f"# w = {config.w}",
        f"# d = {config.d}",
        f"# n = {config.n}",
        f"# B = {config.B}",
        f"# M = {config.M}",
        "# alphas = " + ",".join(str(a) for a in config.alphas),
        "# a_weights = " + ",".join(str(a) for a in config.a_weights),
        "# b_weights = " + ",".join(str(b) for b in config.b_weights),
    ]
    pts = curve_points(config, L)
    body = [", ".join([str(int(lam))] + [str(int(x)) for x in row]) for lam, row in zip(L, pts)]
    return head, body


def export_hitting_set(config, path, L=None):
    L = build_hitting_set(config.w, config.d, config.p) if L is None else L
    head, body = export_lines(config, L)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(head + body) + "\n")
    return len(body)
