"""Acceptance suite: one test per criterion, at the stated scales and time limits.

Each test name starts with ``test_criterion_NN``; the hook in conftest.py
prints one PASS/FAIL line per criterion at the end of the run.
"""

import itertools
import time

import numpy as np
import pytest

from roabpit.algebra import (
    Projector,
    ch_idempotent,
    coefficient_generators,
    fullness_witness,
    matrix_units,
    rank_one_projector,
    span_closure,
)
from roabpit.curve import (
    CurveConfig,
    build_hitting_set,
    constraint_polys,
    curve_assign,
    finite_avoid,
    hitting_pit,
    kronecker_phi,
    tri_witness,
)
from roabpit.cyclic import ring_monomial, transform_prime
from roabpit.errors import NonSplitSpectrum
from roabpit.field import DEFAULT_P, FieldMatrix, Poly
from roabpit.modular import (
    SubstitutionParams,
    bad_parameters,
    choose_modulus,
    collision_instance,
    pit_modular,
    replay,
    scan_bad_set,
    substitute_gamma,
)
from roabpit.roabp import FAMILIES, Roabp, brute_force_expand, generate, worked_example

pytestmark = pytest.mark.acceptance


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def test_criterion_01_worked_example_reproduction():
    with Timer() as tm:
        prog = worked_example(DEFAULT_P)
        r = 7
        for g in range(1, r):
            img = substitute_gamma(prog, SubstitutionParams(r, g, 2, DEFAULT_P))
            expected = ring_monomial((g + g * g) % r, r, DEFAULT_P)
            assert [int(c) for c in img.coeffs] == [int(c) for c in expected.coeffs]
        rep = scan_bad_set(prog, r)
        verdict = pit_modular(prog, r)
    assert rep.bad_values == []
    assert verdict.line() == "NONZERO g=1"
    print(f"criterion 1: exponents {[(g + g * g) % 7 for g in range(1, 7)]}, {tm.seconds:.3f}s")
    assert tm.seconds < 1.0


COLLISION_PAIRS = {
    7: [1, 2, 3, 6],
    11: [2, 3, 5, 7, 10],
    101: [2, 3, 5, 50, 100],
    10007: [2, 3, 5, 17, 5003, 10006],
}


def test_criterion_02_collision_obstruction():
    pairs = [(r, g) for r, gs in COLLISION_PAIRS.items() for g in gs]
    assert len(pairs) == 20
    with Timer() as tm:
        for r, g in pairs:
            p, _ = transform_prime(r)
            inst = collision_instance(r, g, p=p, verify=False)
            assert not brute_force_expand(inst.program).is_zero()
            assert substitute_gamma(inst.program, inst.params, "naive").is_zero()
            rep = scan_bad_set(inst.program, r, workers=1)
            assert g in rep.bad_values, (r, g, rep.bad_values)
            assert replay(inst.program, rep)
    print(f"criterion 2: 20 planted collisions found and scanned in {tm.seconds:.2f}s")
    assert tm.seconds < 30.0


def _soundness_corpus():
    rng = np.random.default_rng(2024)
    k = 0
    while k < 500:
        family = FAMILIES[k % len(FAMILIES)]
        d = int(rng.integers(0, 3))
        n = int(rng.integers(1, 5))
        w = int(rng.integers(1, 4))
        if family == "zero_difference":
            w = 1
        if (d + 1) ** n > 10**4:
            continue
        yield generate(family, 10_000 + k, w, n, d, 1000003)
        k += 1


def test_criterion_03_unconditional_soundness():
    mismatches, counts = [], {"modular_nonzero": 0, "curve_nonzero": 0, "instances": 0, "zero": 0}
    for prog in _soundness_corpus():
        counts["instances"] += 1
        oracle_nonzero = not brute_force_expand(prog).is_zero()
        counts["zero"] += not oracle_nonzero
        r = choose_modulus(prog.w, prog.d, prog.p)
        mv = pit_modular(prog, r)
        if mv.verdict == "NONZERO":
            counts["modular_nonzero"] += 1
            if not oracle_nonzero:
                mismatches.append(("modular", prog.name))
        cv = hitting_pit(prog)
        if cv.verdict == "NONZERO":
            counts["curve_nonzero"] += 1
            if not oracle_nonzero:
                mismatches.append(("curve", prog.name))
            d = max(prog.d, 1)
            cfg = CurveConfig(prog.w, d, prog.n, prog.p, deg_C=prog.n * d)
            assert prog(*curve_assign(cfg, cv.witness)) != 0
    print(f"criterion 3: {counts}, mismatches {mismatches}")
    assert counts["instances"] >= 500
    assert mismatches == []


def test_criterion_04_completeness_census():
    r = 10007
    p, _ = transform_prime(r)
    findings = []
    with Timer() as tm:
        for seed in range(5):
            prog = generate("random", seed, 10, 20, 2, p)
            rep = scan_bad_set(prog, r, g_budget=600, oracle=False, instance=prog.name)
            assert rep.params_tested == 600
            if rep.bad_values:
                # a bad g is a finding about the stability conjecture, so it is re-verified and logged
                assert replay(prog, rep)
                findings.append((prog.name, rep.bad_values))
            print(f"criterion 4: {rep.csv_row(timing=True)}")
    print(f"criterion 4: bad findings {findings or 'none'}, {tm.seconds:.1f}s")
    assert tm.seconds < 600.0


def _units_identities(mu, w, p):
    zero = FieldMatrix.zeros(w, w, p)
    for i, j, k, l in itertools.product(range(w), repeat=4):
        expect = mu[i, l] if j == k else zero
        if mu[i, j] @ mu[k, l] != expect:
            return False
    return True


def _radical_checks(alg, rng):
    w, p = alg.w, alg.p
    zero = FieldMatrix.zeros(w, w, p)
    rad = alg.radical_basis
    for X in rad:
        if X.power(w) != zero:
            return False
    if not rad:
        return True
    tuples = (itertools.product(rad, repeat=w) if len(rad) ** w <= 4096
              else ([rad[int(k)] for k in rng.integers(0, len(rad), w)] for _ in range(200)))
    for tup in tuples:
        prod = tup[0]
        for Y in tup[1:]:
            prod = prod @ Y
        if prod != zero:
            return False
    return True


def test_criterion_05_word_algebra_properties():
    p = 10007
    rng = np.random.default_rng(5)
    stats = {"full": 0, "radical": 0, "max_descents": {}}
    with Timer() as tm:
        for case in range(1000):
            w = 1 + case % 6
            if case % 2 == 0:
                gens = [FieldMatrix.from_array(rng.integers(0, p, (w, w)), p) for _ in range(2)]
            else:
                # block upper triangular generators: a proper algebra with a nonzero radical
                k = int(rng.integers(1, w + 1))
                gens = []
                for _ in range(2):
                    A = rng.integers(0, p, (w, w))
                    A[k:, :k] = 0
                    gens.append(FieldMatrix.from_array(A, p))
            alg = span_closure(gens)
            if alg.is_full():
                stats["full"] += 1
                pi = rank_one_projector(alg)
                assert pi.matrix @ pi.matrix == pi.matrix
                assert pi.rank == 1
                assert pi.descents <= w - 1
                stats["max_descents"][w] = max(stats["max_descents"].get(w, 0), pi.descents)
                if case % 10 < 2 or w <= 3:
                    assert _units_identities(matrix_units(alg, pi), w, p)
            else:
                stats["radical"] += 1
                assert _radical_checks(alg, rng)
                for X in alg.basis[:3]:
                    try:
                        E = ch_idempotent(X)
                    except NonSplitSpectrum:
                        continue
                    assert E.matrix @ E.matrix == E.matrix
        checked = 0
        while checked < 200:
            w = int(rng.integers(2, 6))
            M = FieldMatrix.from_array(rng.integers(0, 101, (w, w)), 101)
            chi = M.charpoly()
            dchi = chi.derivative()
            mu = next((x for x in range(101) if chi(x) == 0 and dchi(x) != 0), None)
            if mu is None:
                continue
            adj = (FieldMatrix.identity(w, 101).scale(mu) - M).adjugate()
            assert adj.rank() == 1
            checked += 1
    print(f"criterion 5: {stats}, {tm.seconds:.1f}s")
    assert tm.seconds < 120.0


def test_criterion_06_degree_budgets():
    p = 10007
    rng = np.random.default_rng(6)
    worst = {}
    with Timer() as tm:
        for w in (2, 3, 4):
            for _ in range(200):
                X0 = FieldMatrix.from_array(rng.integers(0, p, (w, w)), p)
                X1 = FieldMatrix.from_array(rng.integers(0, p, (w, w)), p)
                cs = constraint_polys(X0, X1, range(1, w + 1))
                for name, deg in cs.degrees().items():
                    assert deg <= cs.budgets[name], (name, deg)
                    key = (w, name.split("[")[0])
                    worst[key] = max(worst.get(key, -1), deg)
    print(f"criterion 6: max degrees {worst}, {tm.seconds:.1f}s")
    assert tm.seconds < 300.0


def test_criterion_07_kronecker_and_avoidance():
    with Timer() as tm:
        for m in (1, 2, 3):
            for d in range(5):
                box = list(itertools.product(range(d + 1), repeat=m))
                assert len({kronecker_phi(e, d + 1) for e in box}) == len(box)
        rng = np.random.default_rng(7)
        p = 1000003
        for _ in range(500):
            deg = int(rng.integers(0, 51))
            roots = [int(x) for x in rng.integers(0, deg + 1, deg)]
            F = Poly.from_roots(roots, p) * Poly.const(int(rng.integers(1, p)), p)
            lam = finite_avoid(F, range(deg + 1))
            assert F(lam) != 0
        sizes = {}
        for w, d in itertools.product((1, 2), (1, 2)):
            sizes[(w, d)] = len(build_hitting_set(w, d))
            assert sizes[(w, d)] == 9 * w**4 + 2 * d * d * w**8 + 2
        assert sizes[(2, 1)] == 658
    print(f"criterion 7: hitting-set sizes {sizes}, {tm.seconds:.2f}s")
    assert tm.seconds < 60.0


def test_criterion_08_curve_end_to_end():
    p = 1000003
    rng = np.random.default_rng(8)
    instances = []
    for k in range(20):
        instances.append(generate("zero_difference", 500 + k, 1, int(rng.integers(1, 4)), 1, p))
    nonzero_families = ["random", "upper_triangular", "path_controlled", "diagonal", "two_monomial"]
    for k in range(80):
        fam = nonzero_families[k % 5]
        instances.append(generate(fam, 600 + k, int(rng.integers(1, 3)), int(rng.integers(1, 4)), 1, p))
    agree, zero_runs = 0, []
    with Timer() as tm:
        for prog in instances:
            assert prog.w <= 2 and prog.d <= 1 and prog.n <= 3
            v = hitting_pit(prog)
            oracle = not brute_force_expand(prog).is_zero()
            assert (v.verdict == "NONZERO") == oracle, prog.name
            agree += 1
            if v.verdict == "ZERO":
                zero_runs.append(v.tested)
    assert agree == 100
    assert len(zero_runs) >= 20 and all(t == 658 for t in zero_runs[:20])
    print(f"criterion 8: 100/100 verdicts agree, {len(zero_runs)} ZERO runs of 658 evaluations, {tm.seconds:.1f}s")
    assert tm.seconds < 120.0


def test_criterion_09_degeneracy_findings():
    p = 1000003
    degenerate = 0
    for seed in range(10):
        prog = generate("random", seed, 2, 2, 1, p)
        alg = span_closure(coefficient_generators(prog))
        assert alg.is_full()
        pi = rank_one_projector(alg)
        rep = tri_witness(prog, alg, pi, CurveConfig(2, 1, 2, p), range(10))
        assert rep.all_zero and rep.rank_one_factorization
        degenerate += 1
    for seed in range(10):
        prog = generate("random", seed, 1, 3, 1, p)
        alg = span_closure(coefficient_generators(prog))
        cfg = CurveConfig(1, 1, 3, p)
        rep = tri_witness(prog, alg, rank_one_projector(alg), cfg, range(13))
        expect = [prog(*[int(x) for x in pt]) for pt in (
            [pow(lam + a, cfg.B, p) for a in cfg.alphas] for lam in range(13))]
        assert [int(x) for x in rep.delta_values] == expect

    rng = np.random.default_rng(9)
    nonzero_delta, zero_delta = 0, 0
    for case in range(200):
        w = 1 + case % 3
        gens = [FieldMatrix.from_array(rng.integers(0, 101, (w, w)), 101) for _ in range(int(rng.integers(1, 3)))]
        alg = span_closure(gens)
        words = (alg.basis * (w * w))[: w * w]
        _, delta = fullness_witness(alg, words, words, 0, w - 1)
        if delta != 0:
            nonzero_delta += 1
            assert alg.dim == w * w
        else:
            zero_delta += 1
    print(f"criterion 9: {degenerate} width-2 witnesses vanish identically; scalar case exact; "
          f"fullness witness nonzero {nonzero_delta}, zero {zero_delta} (sound direction holds)")
    assert nonzero_delta > 0


def test_criterion_10_linear_scaling():
    w, r, d = 4, 1009, 2
    ns = [8, 16, 32, 64]
    gs = (2, 3, 5)
    cases = {}
    for n in ns:
        prog = generate("random", n, w, n, d, DEFAULT_P)
        cases[n] = (prog, [SubstitutionParams(r, g, n, DEFAULT_P) for g in gs])
        for params in cases[n][1]:
            substitute_gamma(prog, params, "naive")
    best = {n: float("inf") for n in ns}
    # interleave the sizes so that drift in machine load affects all of them alike
    for _ in range(9):
        for n in ns:
            prog, plist = cases[n]
            t0 = time.perf_counter()
            for params in plist:
                substitute_gamma(prog, params, "naive")
            best[n] = min(best[n], time.perf_counter() - t0)
    times = [best[n] for n in ns]
    slope, intercept = np.polyfit(ns, times, 1)
    fit = [slope * n + intercept for n in ns]
    rel = [abs(t - f) / f for t, f in zip(times, fit)]
    print("criterion 10: " + ", ".join(f"n={n}: {t * 1000:.1f}ms (fit {f * 1000:.1f}ms)"
                                       for n, t, f in zip(ns, times, fit))
          + f", max deviation {max(rel):.1%}")
    assert slope > 0
    assert max(rel) <= 0.25, rel
