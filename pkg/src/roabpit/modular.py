"""Modular hashing identity test and the bad-set scanner.

The hash Gamma_g sends x_i to lambda^(g^i mod r) in R_r = F_p[lambda]/(lambda^r - 1).
A nonzero image certifies that the program computes a nonzero polynomial;
a ZERO verdict after every g is only as good as the modular stability
conjecture, and reports say so.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels as K
from .cyclic import CyclicRingElement, _points, evaluate_at_roots, interpolate_from_roots, ring_monomial, root_of_unity
from .errors import BudgetExceeded, InvalidParams, NoCollisionFound, ThresholdOverflow
from .field import DEFAULT_P, is_prime, next_prime
from .roabp import brute_force_expand, eval_field_batch, eval_in_ring, two_monomial

CSV_HEADER = "r,n,d,w,params_tested,bad_count,bad_values,conditional,wall_ms"
CONDITIONAL = "modular-stability"
PROBES = 4  # root-of-unity points tried per g before a full evaluation


def default_workers():
    try:
        return max(1, int(os.environ.get("ROABPIT_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SubstitutionParams:
    r: int
    g: int
    n: int
    p: int = DEFAULT_P

    def __post_init__(self):
        if not is_prime(self.r):
            raise InvalidParams(f"r={self.r} is not prime")
        if self.r == self.p:
            raise InvalidParams("r must be coprime to p")
        if not 1 <= self.g <= self.r - 1:
            raise InvalidParams(f"g must lie in 1..{self.r - 1}")

    @property
    def v(self):
        out, x = [], 1
        for _ in range(self.n):
            x = x * self.g % self.r
            out.append(x)
        return tuple(out)


def choose_modulus(w, d, p=DEFAULT_P, c=2, threshold=None):
    """Smallest prime r >= threshold (default (w d)^c) with r != p."""
    thr = (w * d) ** c if threshold is None else threshold
    if thr > (1 << 61):
        raise ThresholdOverflow(f"threshold {thr} exceeds 2^61")
    r = next_prime(max(int(thr), 2))
    while r == p:
        r = next_prime(r + 1)
    return r


def _exponent_table(gs, n, r):
    """v[k, i] = g_k^(i+1) mod r for an array of g values."""
    gs = np.asarray(gs, dtype=np.int64)
    out = np.empty((len(gs), n), dtype=np.int64)
    cur = gs % r
    for i in range(n):
        out[:, i] = cur
        cur = (cur * gs) % r
    return out


def _gamma_naive(program, params):
    p, r, w = program.p, params.r, program.w
    if K.is_wide(p) and w <= K.MAX_INNER and 3 * (program.d + 1) * w < 1 << 19:
        return _gamma_wide(program, params)
    W = np.zeros((w, r), dtype=K.dtype_for(p))
    W[program.s, 0] = 1
    for i, v in enumerate(params.v):
        new = np.zeros_like(W)
        for j in range(program.d + 1):
            A = program.coeffs[i, j]
            if not np.any(A):
                continue
            Y = K.matmul(np.ascontiguousarray(A.T), W, p)
            new = (new + np.roll(Y, (j * v) % r, axis=1)) % p
        W = new
    return W[program.t]


def _gamma_wide(program, params):
    """The same chain for 2**31 <= p < 2**62 with limb products.

    Rolling commutes with the limb split, so the unreduced limb parts of all
    d+1 terms of a layer are summed first and reduced once per layer.
    """
    p, r, w = program.p, params.r, program.w
    coeffs = K.to_wide(program.coeffs)
    W = np.zeros((w, r), dtype=np.int64)
    W[program.s, 0] = 1
    for i, v in enumerate(params.v):
        acc = [np.zeros((w, r), dtype=np.int64) for _ in range(5)]
        for j in range(program.d + 1):
            A = coeffs[i, j]
            if not np.any(A):
                continue
            shift = (j * v) % r
            for k, part in enumerate(K.limb_products(np.ascontiguousarray(A.T), W)):
                acc[k] += np.roll(part, shift, axis=1)
        W = K.recombine(acc, p)
    return W[program.t].astype(object)


def _eval_at_powers(program, vtab, ks, r):
    """C at x_i = omega^(k * v_i) for every (row of vtab, k) pair; shape (rows, len(ks))."""
    pts, _ = _points(r, program.p)
    ks = np.asarray(ks, dtype=np.int64)
    expo = (vtab[:, None, :] * ks[None, :, None]) % r
    X = pts[expo.reshape(-1, vtab.shape[1])]
    return eval_field_batch(program, X).reshape(len(vtab), len(ks))


def substitute_gamma(program, params, path="auto"):
    """C_g(lambda) = C(Gamma_g) in R_r.

    ``path`` is ``naive`` (coefficient-vector chain with rotations),
    ``transform`` (evaluate at all r-th roots of unity, then interpolate,
    needs r | p-1), ``ring`` (generic ring-element chain) or ``auto``.
    """
    if params.p != program.p:
        raise InvalidParams("substitution and program use different fields")
    r, p = params.r, program.p
    if params.n != program.n:
        params = SubstitutionParams(r, params.g, program.n, p)
    if path == "auto":
        path = "transform" if root_of_unity(r, p) is not None else "naive"
    if path == "ring":
        return eval_in_ring(program, [ring_monomial(v, r, p) for v in params.v])
    if path == "naive":
        return CyclicRingElement(_gamma_naive(program, params), r, p)
    if path == "transform":
        if root_of_unity(r, p) is None:
            raise InvalidParams(f"transform path needs r | p-1 (r={r}, p={p})")
        vtab = np.array([params.v], dtype=np.int64)
        vals = _eval_at_powers(program, vtab, np.arange(r), r)[0]
        return CyclicRingElement(interpolate_from_roots(vals, r, p), r, p)
    raise InvalidParams(f"unknown path {path!r}")


def bad_parameters(program, r, gs, path="auto"):
    """Sorted list of the g in ``gs`` with C_g = 0 in R_r."""
    gs = [int(g) for g in gs]
    if not gs:
        return []
    p = program.p
    if path == "auto":
        path = "transform" if root_of_unity(r, p) is not None else "naive"
    if path != "transform":
        return [g for g in gs if substitute_gamma(program, SubstitutionParams(r, g, program.n, p), path).is_zero()]
    vtab = _exponent_table(gs, program.n, r)
    probe = _eval_at_powers(program, vtab, np.arange(1, min(PROBES, r - 1) + 1), r)
    survivors = np.nonzero(~np.any(probe, axis=1))[0]
    bad = []
    for k in survivors:
        vals = _eval_at_powers(program, vtab[k:k + 1], np.arange(r), r)
        if not np.any(vals):
            bad.append(gs[k])
    return bad


@dataclass
class Verdict:
    verdict: str  # NONZERO or ZERO
    witness: int | None
    conditional: bool
    tested: int
    method: str = "modular"
    r: int | None = None

    def line(self):
        if self.verdict == "NONZERO":
            key = "g" if self.method == "modular" else "lambda"
            return f"NONZERO {key}={self.witness}"
        return "ZERO (conditional)" if self.conditional else "ZERO (curve)"

    def __str__(self):
        return self.line()


def _schedule(r, g_schedule):
    if g_schedule in (None, "all"):
        return range(1, r)
    k = int(g_schedule)
    return range(1, min(k, r - 1) + 1)


def pit_modular(program, r=None, g_schedule="all", path="auto", block=256):
    """Modular test: NONZERO at the first g (ascending) with C_g != 0, else ZERO."""
    if r is None:
        r = choose_modulus(program.w, program.d, program.p)
    SubstitutionParams(r, 1, program.n, program.p)
    gs = list(_schedule(r, g_schedule))
    tested = 0
    for start in range(0, len(gs), block):
        chunk = gs[start:start + block]
        bad = set(bad_parameters(program, r, chunk, path))
        for g in chunk:
            tested += 1
            if g not in bad:
                return Verdict("NONZERO", g, False, tested, "modular", r)
    return Verdict("ZERO", None, True, tested, "modular", r)


# ---------------------------------------------------------------------------
# collisions


def _half_table(v, r):
    """All ternary vectors on the given exponents: (vectors, sums mod r, weights)."""
    m = len(v)
    count = 3 ** m
    digits = np.zeros((count, m), dtype=np.int8)
    idx = np.arange(count)
    for i in range(m):
        digits[:, i] = (idx // 3 ** i) % 3
    eps = np.where(digits == 2, -1, digits).astype(np.int64)
    sums = (eps @ np.asarray(v, dtype=np.int64)) % r if m else np.zeros(1, dtype=np.int64)
    weights = np.count_nonzero(eps, axis=1)
    return eps, sums, weights


def _canonical(eps):
    S = {i + 1 for i, e in enumerate(eps) if e == 1}
    S2 = {i + 1 for i, e in enumerate(eps) if e == -1}
    if len(S) > len(S2) or (len(S) == len(S2) and min(S | S2) not in S):
        S, S2 = S2, S
    return tuple(sorted(S)), tuple(sorted(S2))


def find_collision(v, r):
    """Disjoint S != S2 with equal v-sums mod r and |S| + |S2| minimal, or None.

    Meet in the middle over ternary vectors eps with sum eps_i v_i = 0 mod r.
    """
    n = len(v)
    h = n // 2
    eL, sL, wL = _half_table(v[:h], r)
    eR, sR, wR = _half_table(v[h:], r)
    # best right vector per residue; a separate best nonzero one for residue 0
    order = np.lexsort((np.arange(len(sR)), wR, sR))
    first = np.ones(len(order), dtype=bool)
    first[1:] = sR[order][1:] != sR[order][:-1]
    best_idx = np.full(r, -1, dtype=np.int64)
    best_idx[sR[order][first]] = order[first]
    nz0 = np.nonzero((sR == 0) & (wR > 0))[0]
    best_nz0 = int(nz0[np.lexsort((nz0, wR[nz0]))[0]]) if len(nz0) else -1

    need = (-sL) % r
    ridx = best_idx[need]
    ok = ridx >= 0
    total = np.where(ok, wL + np.where(ok, wR[np.maximum(ridx, 0)], 0), 1 << 30)
    zero_left = wL == 0
    # the all-zero left vector must pair with a nonzero right vector
    total[zero_left] = (wR[best_nz0] if best_nz0 >= 0 else 1 << 30)
    ridx = ridx.copy()
    ridx[zero_left] = best_nz0
    total[total == 0] = 1 << 30
    k = int(np.argmin(total))
    if total[k] >= 1 << 30:
        return None
    eps = np.concatenate([eL[k], eR[int(ridx[k])]])
    return _canonical(eps)


@dataclass
class CollisionInstance:
    S: tuple
    S2: tuple
    program: object
    params: SubstitutionParams


def collision_instance(r, g, n=None, p=DEFAULT_P, verify=True):
    """Two-monomial program prod_S x_i - prod_S2 x_i that Gamma_g sends to zero.

    The default n is the smallest value with 2^n > r, where pigeonhole
    guarantees a collision.
    """
    if n is None:
        n = r.bit_length()
    if n > 24:
        raise BudgetExceeded(f"n={n} exceeds the subset enumeration budget (24)")
    params = SubstitutionParams(r, g, n, p)
    found = find_collision(params.v, r)
    if found is None:
        raise NoCollisionFound(f"no colliding subsets for r={r}, g={g}, n={n}")
    S, S2 = found
    prog = two_monomial(S, S2, n, p)
    if verify:
        if not substitute_gamma(prog, params).is_zero():
            raise ArithmeticError("collision program does not vanish under the hash")
        if brute_force_expand(prog).is_zero():
            raise ArithmeticError("collision program is identically zero")
    return CollisionInstance(S, S2, prog, params)


# ---------------------------------------------------------------------------
# scanning


@dataclass
class ScanReport:
    r: int
    n: int
    d: int
    w: int
    params_tested: int
    bad_values: list
    instance: str = ""
    wall_ms: float = 0.0
    eps: float = 0.1
    oracle_nonzero: bool | None = None
    tested_values: list = field(default_factory=list, repr=False)

    @property
    def bad_count(self):
        return len(self.bad_values)

    @property
    def bound(self):
        return self.r ** (1 - self.eps)

    @property
    def within_bound(self):
        return self.bad_count <= self.bound

    @property
    def conditional(self):
        """Whether a verdict from this scan would rest on the stability conjecture."""
        return CONDITIONAL if self.bad_count == self.params_tested else "unconditional"

    def csv_row(self, timing=True):
        bad = ";".join(str(g) for g in self.bad_values)
        ms = f"{self.wall_ms:.1f}" if timing else "0"
        return f"{self.r},{self.n},{self.d},{self.w},{self.params_tested},{self.bad_count},{bad},{self.conditional},{ms}"

    def to_dict(self, timing=True):
        out = asdict(self)
        out.pop("tested_values")
        out.update(bad_count=self.bad_count, bound=self.bound, within_bound=self.within_bound,
                   conditional=self.conditional)
        if not timing:
            out["wall_ms"] = 0
        return out


def _scan_chunk(args):
    program, r, gs, path = args
    return bad_parameters(program, r, gs, path)


def scan_bad_set(program, r, g_budget=None, eps=0.1, workers=None, path="auto", oracle=True, instance=""):
    """Test g = 1 .. min(g_budget, r-1) and record every g with C_g = 0."""
    t0 = time.perf_counter()
    SubstitutionParams(r, 1, program.n, program.p)
    top = r - 1 if g_budget is None else min(int(g_budget), r - 1)
    gs = list(range(1, top + 1))
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(gs) > 1:
        size = -(-len(gs) // workers)
        chunks = [(program, r, gs[k:k + size], path) for k in range(0, len(gs), size)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            bad = sorted(g for part in ex.map(_scan_chunk, chunks) for g in part)
    else:
        bad = bad_parameters(program, r, gs, path)
    verdict = None
    if oracle:
        try:
            verdict = not brute_force_expand(program).is_zero()
        except BudgetExceeded:
            verdict = None
    ms = (time.perf_counter() - t0) * 1000.0
    return ScanReport(r, program.n, program.d, program.w, len(gs), bad, instance or program.name, ms, eps,
                      verdict, gs)


def replay(program, report, path="naive"):
    """Re-check every reported bad g independently; True when all re-verify."""
    return all(
        substitute_gamma(program, SubstitutionParams(report.r, g, program.n, program.p), path).is_zero()
        for g in report.bad_values
    )


def evaluate_ring_values(program, r, g, path="auto"):
    """Values of C_g at the r-th roots of unity (transform path only)."""
    params = SubstitutionParams(r, g, program.n, program.p)
    return evaluate_at_roots(substitute_gamma(program, params, path).coeffs, r, program.p)
