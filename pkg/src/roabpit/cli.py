"""Command-line front end: ``roabpit {pit,scan,hitset,demo,algebra,gen}``.

Exit codes: 0 when a verdict or report was produced, 2 for input errors,
3 for field-size, budget and file-system problems.  Progress goes to
stderr, results to stdout and files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import roabp as R
from .algebra import coefficient_generators, matrix_units, pairing_gram, rank_one_projector, span_closure
from .cyclic import transform_prime
from .curve import CurveConfig, build_hitting_set, export_hitting_set, hitting_pit
from .errors import BudgetExceeded, FieldTooSmall, RoabpError, ThresholdOverflow
from .field import DEFAULT_P
from .modular import CSV_HEADER, SubstitutionParams, choose_modulus, collision_instance, pit_modular, scan_bad_set, substitute_gamma

EXIT_OK, EXIT_INPUT, EXIT_ENV = 0, 2, 3


@dataclass
class RunConfig:
    command: str
    instances: list = field(default_factory=list)
    p: int | None = None
    r: int | None = None
    c: int = 2
    g_budget: int | None = None
    eps: float = 0.1
    workers: int | None = None
    out: str | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def _progress(msg):
    print(msg, file=sys.stderr, flush=True)


def _load(path):
    try:
        return R.load(path)
    except OSError as exc:
        raise ValueError(f"cannot read instance {path}: {exc.strerror}") from None


def _params(value):
    return None if value == "all" else int(value)


# ---------------------------------------------------------------------------


def cmd_pit(cfg):
    prog = _load(cfg.instances[0])
    ex = cfg.extra
    for key in ("w", "d"):
        if ex.get(key) is not None and ex[key] != getattr(prog, key):
            raise ValueError(f"--{key} {ex[key]} does not match the instance ({getattr(prog, key)})")
    if ex.get("mode") == "curve":
        verdict = hitting_pit(prog)
    else:
        r = cfg.r or choose_modulus(prog.w, prog.d, prog.p, cfg.c)
        _progress(f"modular test with r={r}")
        verdict = pit_modular(prog, r, "all" if cfg.g_budget is None else cfg.g_budget)
    print(verdict.line())
    return EXIT_OK


def _scan_programs(cfg):
    ex = cfg.extra
    if cfg.instances:
        for path in cfg.instances:
            prog = _load(path)
            yield Path(path).stem, prog
        return
    p = cfg.p or DEFAULT_P
    for k in range(ex.get("count", 1)):
        seed = cfg.seed + k
        prog = R.generate(ex["family"], seed, ex["w"], ex["n"], ex["d"], p)
        yield f"{ex['family']}_s{seed}", prog


def cmd_scan(cfg):
    ex = cfg.extra
    timing = not ex.get("no_timing", False)
    if not cfg.instances and not ex.get("family"):
        raise ValueError("scan needs --family or --instance")
    if not cfg.instances and cfg.p is None and ex.get("transform"):
        if cfg.r is None:
            raise ValueError("--transform needs --r")
        cfg.p, _ = transform_prime(cfg.r)
        _progress(f"transform prime p={cfg.p}")
    reports = []
    if cfg.g_budget != 0:
        for name, prog in _scan_programs(cfg):
            r = cfg.r or choose_modulus(prog.w, prog.d, prog.p, cfg.c)
            _progress(f"scanning {name} (r={r})")
            rep = scan_bad_set(prog, r, cfg.g_budget, cfg.eps, cfg.workers, instance=name)
            reports.append(rep)
    lines = [CSV_HEADER] + [rep.csv_row(timing) for rep in reports]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if cfg.out:
        out = Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        conf = asdict(cfg)
        conf.pop("workers")  # reports must not depend on the worker count
        detail = {"config": conf, "reports": [rep.to_dict(timing) for rep in reports]}
        out.with_suffix(".json").write_text(json.dumps(detail, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        if reports:
            from .plotting import plot_scan

            plot_scan(reports, out.with_suffix(".png"))
        _progress(f"wrote {out}")
    return EXIT_OK


def cmd_hitset(cfg):
    ex = cfg.extra
    p = cfg.p or DEFAULT_P
    w, d, n = ex["w"], ex["d"], ex["n"]
    L = build_hitting_set(w, d, p)
    conf = CurveConfig(w, d, n, p)
    out = cfg.out or f"hitset_w{w}_d{d}_n{n}.txt"
    count = export_hitting_set(conf, out, L)
    print(f"|L| = {count}")
    print(f"B = {conf.B}")
    print(f"wrote {out}")
    return EXIT_OK


def demo_lines(p=DEFAULT_P):
    prog = R.worked_example(p)
    lines = [
        "Worked example: C(x1, x2) = x1*x2 hashed into F_p[l]/(l^7 - 1), x_i -> l^(g^i mod 7)",
        "layers A1 = [[0, x1], [0, 0]], A2 = [[0, 0], [0, x2]], read with e1 and e2",
        "g  exponent  C_g",
    ]
    ok = True
    for g in range(1, 7):
        img = substitute_gamma(prog, SubstitutionParams(7, g, 2, p))
        support = img.support()
        ok &= not img.is_zero()
        expo = (g + g * g) % 7
        shown = "1" if support == [0] else f"l^{support[0]}"
        lines.append(f"{g}  {expo}  {shown}")
    lines.append("all C_g nonzero: " + ("yes" if ok else "no"))
    lines.append(
        "note: the diagonal layout diag(x1, 1), diag(1, x2) read with e1, e2 computes 0, "
        "so the off-diagonal layout above is used to obtain x1*x2"
    )
    return lines


def cmd_demo(cfg):
    print("\n".join(demo_lines(cfg.p or DEFAULT_P)))
    return EXIT_OK


def cmd_algebra(cfg):
    prog = _load(cfg.instances[0])
    alg = span_closure(coefficient_generators(prog))
    info = {"w": prog.w, "dim": alg.dim, "full": alg.is_full()}
    if prog.p > prog.w:
        info["radical_dim"] = len(alg.radical_basis)
    if alg.is_full():
        pi = rank_one_projector(alg)
        units = matrix_units(alg, pi)
        _, grank = pairing_gram(units, pi, prog.s, prog.t)
        info.update(projector=pi.matrix.tolist(), projector_trace=pi.construction_trace, pairing_rank=grank)
    print(json.dumps(info, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_gen(cfg):
    ex = cfg.extra
    p = cfg.p or DEFAULT_P
    if ex.get("collision"):
        r, g = ex["collision"]
        inst = collision_instance(r, g, ex.get("n"), p)
        prog = inst.program
        _progress(f"S={list(inst.S)} S'={list(inst.S2)}")
    elif ex.get("family") == "worked_example":
        prog = R.worked_example(p)
    else:
        prog = R.generate(ex["family"], cfg.seed, ex["w"], ex["n"], ex["d"], p)
    text = R.serialize(prog)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
        _progress(f"wrote {cfg.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"pit": cmd_pit, "scan": cmd_scan, "hitset": cmd_hitset, "demo": cmd_demo,
            "algebra": cmd_algebra, "gen": cmd_gen}


def build_parser():
    ap = argparse.ArgumentParser(prog="roabpit", description="Identity testing for read-once oblivious ABPs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pit", help="test whether an instance computes the zero polynomial")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["modular", "curve"], default="modular")
    p.add_argument("--r", type=int)
    p.add_argument("--c", type=int, default=2, help="threshold power for choosing r")
    p.add_argument("--g-budget", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--d", type=int)

    s = sub.add_parser("scan", help="census of bad hash parameters")
    s.add_argument("--instance", action="append", default=[])
    s.add_argument("--family", choices=R.FAMILIES)
    s.add_argument("--w", type=int, default=2)
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--count", type=int, default=1, help="number of generated instances")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--p", type=int)
    s.add_argument("--r", type=int)
    s.add_argument("--c", type=int, default=2)
    s.add_argument("--params", type=_params, default=None, help="number of g values, or 'all'")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--workers", type=int)
    s.add_argument("--transform", action="store_true", help="pick p = k*r + 1 for the transform path")
    s.add_argument("--out")
    s.add_argument("--no-timing", action="store_true", help="write wall_ms = 0 for reproducible output")

    h = sub.add_parser("hitset", help="export the curve hitting set")
    h.add_argument("--w", type=int, required=True)
    h.add_argument("--d", type=int, required=True)
    h.add_argument("--n", type=int, default=1)
    h.add_argument("--p", type=int)
    h.add_argument("--out")

    dm = sub.add_parser("demo", help="print the worked modular-hashing example")
    dm.add_argument("--p", type=int)

    a = sub.add_parser("algebra", help="word-algebra summary of an instance")
    a.add_argument("instance")

    g = sub.add_parser("gen", help="write an instance file")
    g.add_argument("--family", choices=R.FAMILIES + ("worked_example",))
    g.add_argument("--collision", type=int, nargs=2, metavar=("R", "G"))
    g.add_argument("--w", type=int, default=2)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--p", type=int)
    g.add_argument("--out")
    return ap


def config_from_args(args):
    cfg = RunConfig(command=args.command)
    ns = vars(args)
    if ns.get("instance"):
        cfg.instances = ns["instance"] if isinstance(ns["instance"], list) else [ns["instance"]]
    for key in ("p", "r", "c", "eps", "workers", "out", "seed"):
        if ns.get(key) is not None:
            setattr(cfg, key, ns[key])
    if args.command == "pit":
        cfg.g_budget = args.g_budget
        cfg.extra = {"mode": args.mode, "w": args.w, "d": args.d}
    elif args.command == "scan":
        cfg.g_budget = args.params
        cfg.extra = {"family": args.family, "w": args.w, "n": args.n, "d": args.d, "count": args.count,
                     "transform": args.transform, "no_timing": args.no_timing}
    elif args.command == "hitset":
        cfg.extra = {"w": args.w, "d": args.d, "n": args.n}
    elif args.command == "gen":
        if not args.collision and not args.family:
            raise ValueError("gen needs --family or --collision")
        cfg.extra = {"family": args.family, "collision": args.collision, "w": args.w,
                     "n": args.n if args.n is not None else (None if args.collision else 4), "d": args.d}
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (FieldTooSmall, ThresholdOverflow, BudgetExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except (RoabpError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
