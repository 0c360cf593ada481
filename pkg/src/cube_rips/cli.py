"""Batch command-line frontend.

Exit codes: 0 success, 2 verification failure, 3 budget exceeded, 4 invalid config.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import signal
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import __version__
from .collapse import (STRATEGIES, FacetOrdering, certify_collapsibility, d_prec,
                       greedy_collapse, mes, class_ordering, reduce_A_family, write_schedule)
from .complex import (Complex, CoverFamily, ResourceLimitExceeded, budget_faces, format_simplex,
                      mask_of, subcube_complex, vr_complex, write_facets)
from .facets import class_counts, facet_size_histogram, generate_facets, oracle_equal
from .homology import ENGINES, reduced_homology
from .homology.nerve import InvalidFamily, check_W_vanishing, nerve
from .hypercube import SubcubeSpec, all_subcubes, bits_from_string, bits_to_string

EXIT_OK, EXIT_VERIFY, EXIT_BUDGET, EXIT_CONFIG = 0, 2, 3, 4


class ConfigError(Exception):
    pass


class BudgetExceeded(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    r: int | None = None
    engine: str = "coreduce"
    ordering: str = "paper"
    max_faces: int = 0
    budget_mb: float | None = None
    max_seconds: float | None = None
    seed: int = 0
    out: str | None = None
    format: str = "json"
    threads: int = 1
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.max_faces <= 0:
            raise ConfigError("face budget must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ConfigError("wall-clock budget must be positive")
        if self.threads <= 0:
            raise ConfigError("--threads must be positive")
        if self.n is not None and not 1 <= self.n <= 6:
            raise ConfigError("complex-level commands support 1 <= n <= 6")
        if self.r is not None and self.r < 0:
            raise ConfigError("r must be nonnegative")

    def canonical(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k not in ("out", "threads")}
        return json.loads(json.dumps(d, sort_keys=True, default=str))


def _status(msg: str) -> None:
    print(f"[cube-rips] {msg}", file=sys.stderr, flush=True)


def _content_hash(cfg: RunConfig, inputs: list[str]) -> str:
    h = hashlib.sha256(json.dumps(cfg.canonical(), sort_keys=True).encode())
    for path in inputs:
        with open(path, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()


def _versions() -> dict:
    return {"cube_rips": __version__, "python": platform.python_version(), "numpy": np.__version__}


def _emit(cfg: RunConfig, result: dict, timings: dict, inputs: list[str], csv_rows: list[str] | None = None) -> None:
    report = {
        "command": cfg.command,
        "config": cfg.canonical(),
        "content_hash": _content_hash(cfg, inputs),
        "result": result,
    }
    if cfg.format == "csv" and csv_rows is not None:
        text = "\n".join(csv_rows) + "\n"
    else:
        text = json.dumps({**report, "timings_ms": timings}, sort_keys=True, indent=2) + "\n"
    transcript = {
        "config": cfg.canonical(),
        "threads": cfg.threads,
        "versions": _versions(),
        "timings_ms": timings,
        "content_hash": report["content_hash"],
    }
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        with open(cfg.out + ".transcript.json", "w") as fh:
            json.dump(transcript, fh, sort_keys=True, indent=2)
            fh.write("\n")
    else:
        sys.stdout.write(text)
        _status("transcript " + json.dumps(transcript, sort_keys=True))


def _timed(timings: dict, key: str, fn: Callable, *a, **kw):
    t0 = time.perf_counter()
    out = fn(*a, **kw)
    timings[key] = round((time.perf_counter() - t0) * 1e3, 3)
    return out


def _need(cfg: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise ConfigError(f"--{name} is required")


def _read_ordered_facets(path: str) -> tuple[int, ...]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(mask_of(bits_from_string(t) for t in line.split()))
    return tuple(out)


def _ordering(cfg: RunConfig, target: Complex) -> FacetOrdering:
    if cfg.ordering == "paper":
        return class_ordering(target, cfg.r)
    path = cfg.extra.get("ordering_file")
    if not path:
        raise ConfigError("--ordering file needs --ordering-file")
    order = FacetOrdering(_read_ordered_facets(path))
    if not order.is_permutation_of(target):
        raise ConfigError("ordering file is not a permutation of the facets")
    return order


def _target(cfg: RunConfig, reduce: bool, timings: dict) -> tuple[Complex, int]:
    if cfg.r == 3 and cfg.n >= 5 and reduce:
        red = _timed(timings, "reduce", reduce_A_family, cfg.n)
        return red.complex, len(red.steps)
    return _timed(timings, "build", vr_complex, cfg.n, cfg.r, cfg.max_faces), 0


# ---------------------------------------------------------------------------
# subcommands


def cmd_facets(cfg: RunConfig) -> int:
    _need(cfg, "n", "r")
    timings: dict = {}
    pairs = _timed(timings, "generate", generate_facets, cfg.n, cfg.r)
    cx = vr_complex(cfg.n, cfg.r, cfg.max_faces)
    result = {
        "classes": class_counts(pairs),
        "sizes": {str(k): v for k, v in facet_size_histogram(cfg.n, cfg.r).items()},
        "facets": len(cx.facets),
    }
    code = EXIT_OK
    if cfg.extra.get("verify"):
        ok, info = _timed(timings, "verify", oracle_equal, cfg.n, cfg.r)
        result["verified"] = ok
        result["oracle"] = info
        code = EXIT_OK if ok else EXIT_VERIFY
    path = cfg.extra.get("facet_file")
    if path:
        with open(path, "w") as fh:
            write_facets(cx, fh)
    _emit(cfg, result, timings, [])
    return code


def cmd_homology(cfg: RunConfig) -> int:
    _need(cfg, "n", "r")
    timings: dict = {}
    cx = _timed(timings, "build", vr_complex, cfg.n, cfg.r, cfg.max_faces)
    max_dim = cfg.extra.get("max_dim")
    if max_dim is None:
        max_dim = 2 ** cfg.r if cfg.r >= 1 else 0
    rep = _timed(timings, "homology", reduced_homology, cx, max_dim, cfg.engine, cfg.max_faces)
    timings.update({f"homology.{k}": round(v, 3) for k, v in rep.timings_ms.items()})
    result = {k: v for k, v in rep.to_dict().items() if k != "timings_ms"}
    result["nonzero"] = rep.nonzero
    rows = ["i,betti,torsion"] + [f"{row.i},{row.betti},{';'.join(map(str, row.torsion))}" for row in rep.dims]
    _emit(cfg, result, timings, [], rows)
    return EXIT_OK


def cmd_collapse(cfg: RunConfig) -> int:
    _need(cfg, "n", "r")
    timings: dict = {}
    if cfg.extra.get("certify"):
        cert = _timed(timings, "certify", certify_collapsibility, cfg.n, cfg.r, cfg.engine, cfg.max_faces)
        result = {
            "upper": cert.upper,
            "lower": cert.lower,
            "target": 2 ** cfg.r,
            "certified": cert.ok,
            "reduction_steps": cert.reduction_steps,
            "reduced_facets_match": cert.reduced_ok,
            "max_face": format_simplex(cert.dprec.face, cfg.n),
            "max_face_mes": [bits_to_string(v, cfg.n) for v in cert.dprec.mes.sequence or ()],
            "homology": {k: v for k, v in cert.homology.to_dict().items() if k != "timings_ms"},
        }
        _emit(cfg, result, timings, [])
        return EXIT_OK if cert.ok else EXIT_VERIFY
    d = cfg.extra.get("d") or 2 ** cfg.r
    reduce = cfg.r == 3 and cfg.n >= 5
    target, pre_steps = _target(cfg, reduce, timings)
    pre = reduce_A_family(cfg.n).steps if pre_steps else []
    order = _ordering(cfg, target) if cfg.extra.get("strategy") == "by-covering-index" else None
    ok, schedule = _timed(timings, "collapse", greedy_collapse, target, d,
                          cfg.extra.get("strategy"), order)
    full = pre + schedule
    path = cfg.extra.get("emit_schedule")
    if path:
        with open(path, "w") as fh:
            write_schedule(full, cfg.n, fh)
    result = {"d": d, "reached_void": ok, "steps": len(full), "reduction_steps": len(pre),
              "strategy": cfg.extra.get("strategy")}
    _emit(cfg, result, timings, [])
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_mes(cfg: RunConfig) -> int:
    _need(cfg, "n", "r")
    timings: dict = {}
    target, steps = _target(cfg, not cfg.extra.get("unreduced"), timings)
    order = _ordering(cfg, target)
    dp = _timed(timings, "d_prec", d_prec, target, order, cfg.max_faces)
    seq = mes(target, order, dp.face).sequence or ()
    result = {
        "d_prec": dp.value,
        "faces": dp.faces,
        "reduced": bool(steps),
        "max_face": format_simplex(dp.face, cfg.n),
        "max_face_mes": [bits_to_string(v, cfg.n) for v in seq],
        "histogram": {str(k): v for k, v in dp.histogram.items()},
    }
    _emit(cfg, result, timings, [])
    return EXIT_OK


def cmd_nerve(cfg: RunConfig) -> int:
    _need(cfg, "n")
    r = 3 if cfg.r is None else cfg.r
    specs = [SubcubeSpec.parse(s, cfg.n) for s in cfg.extra.get("members") or []]
    if cfg.extra.get("boundary"):
        specs += all_subcubes(cfg.n, cfg.n - 1)
    if not specs:
        raise ConfigError("give --member specs or --boundary")
    try:
        family = CoverFamily(tuple(specs), cfg.n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    timings: dict = {}
    code = EXIT_OK
    extra: dict = {}
    if cfg.extra.get("vanishing"):
        try:
            vr = _timed(timings, "vanishing", check_W_vanishing, family, None,
                        not cfg.extra.get("lax"), cfg.engine)
        except InvalidFamily as exc:
            raise ConfigError(str(exc)) from exc
        extra = {"vanishing_dims": sorted(vr.dims), "vanishing_failures": vr.failures}
        code = EXIT_OK if vr.ok else EXIT_VERIFY
    N = _timed(timings, "nerve", nerve, [subcube_complex(s, r) for s in specs])
    rep = _timed(timings, "homology", reduced_homology, N, None, cfg.engine, cfg.max_faces)
    result = {
        "members": [str(s) for s in specs],
        "nerve_facets": [list(map(int, _bits(f))) for f in N.facets],
        "homology": {k: v for k, v in rep.to_dict().items() if k != "timings_ms"},
        "nonzero": rep.nonzero,
        **extra,
    }
    _emit(cfg, result, timings, [])
    return code


def _bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def expected_nonzero(n: int, r: int) -> list[int] | None:
    """Dimensions of nonvanishing reduced homology where the answer is known."""
    if r == 2 and n >= 3:
        return [3]
    if r == 3:
        if n <= 3:
            return []
        return [7] if n == 4 else [4, 7]
    if r >= n:
        return []
    return None


def cmd_verify(cfg: RunConfig) -> int:
    _need(cfg, "n", "r")
    n, r = cfg.n, cfg.r
    timings: dict = {}
    checks: list[dict] = []

    def record(code: str, ok: bool | None, **info) -> None:
        checks.append({"code": code, "status": "skip" if ok is None else ("pass" if ok else "fail"), **info})
        _status(f"{code}: {checks[-1]['status']}")

    classifiable = (r == 2 and n >= 3) or (r == 3 and n >= 4)
    if classifiable:
        ok, info = _timed(timings, "facets", oracle_equal, n, r)
        record("FACETS_ORACLE", ok, classes=info["classes"])
    else:
        record("FACETS_ORACLE", None, reason="no classification for this (n, r)")
    cx = vr_complex(n, r, cfg.max_faces)
    top = 2 ** r if r >= 1 else 0
    rep = _timed(timings, "homology", reduced_homology, cx, top, cfg.engine, cfg.max_faces)
    want = expected_nonzero(n, r)
    record("HOMOLOGY_PATTERN", None if want is None else rep.nonzero == want,
           nonzero=rep.nonzero, expected=want, torsion_free=rep.torsion_free)
    if sum(rep.f_vector.values()) <= 200_000:
        other = "plain" if cfg.engine == "coreduce" else "coreduce"
        rep2 = _timed(timings, "homology_cross", reduced_homology, cx, top, other, cfg.max_faces)
        record("ENGINE_AGREEMENT", rep.same_groups(rep2))
    else:
        record("ENGINE_AGREEMENT", None, reason="second engine skipped above 200000 faces")
    if rep.euler_ok is not None:
        record("EULER_POINCARE", rep.euler_ok)
    if classifiable:
        cert = _timed(timings, "certify", certify_collapsibility, n, r, cfg.engine, cfg.max_faces)
        ok = cert.upper == cert.lower == 2 ** r and cert.reduced_ok is not False
        record("COLLAPSE_CERT", ok, upper=cert.upper, lower=cert.lower)
    elif r == 3 and n <= 3:
        # a single simplex: collapsible through the empty face
        ok, _ = greedy_collapse(cx, 0)
        record("COLLAPSE_CERT", ok, upper=0, lower=0)
    result = {"checks": checks, "homology": {k: v for k, v in rep.to_dict().items() if k != "timings_ms"}}
    _emit(cfg, result, timings, [])
    return EXIT_OK if all(c["status"] != "fail" for c in checks) else EXIT_VERIFY


COMMANDS = {
    "facets": cmd_facets,
    "homology": cmd_homology,
    "collapse": cmd_collapse,
    "mes": cmd_mes,
    "nerve": cmd_nerve,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cube-rips", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp: argparse.ArgumentParser, need_r: bool = True) -> None:
        sp.add_argument("--n", type=int)
        sp.add_argument("--r", type=int)
        sp.add_argument("--engine", choices=ENGINES, default="coreduce")
        sp.add_argument("--max-faces", type=int, default=None)
        sp.add_argument("--max-seconds", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="report path; a .transcript.json is written next to it")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("facets")
    common(sp)
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--facet-file", default=None)

    sp = sub.add_parser("homology")
    common(sp)
    sp.add_argument("--max-dim", type=int, default=None)

    sp = sub.add_parser("collapse")
    common(sp)
    sp.add_argument("--certify", action="store_true")
    sp.add_argument("--ordering", choices=("paper", "file"), default="paper")
    sp.add_argument("--ordering-file", default=None)
    sp.add_argument("--strategy", choices=STRATEGIES, default="by-covering-index")
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--emit-schedule", default=None)

    sp = sub.add_parser("mes")
    common(sp)
    sp.add_argument("--ordering", choices=("paper", "file"), default="paper")
    sp.add_argument("--ordering-file", default=None)
    sp.add_argument("--unreduced", action="store_true",
                    help="for r=3, n>=5 evaluate on VR(I_n;3) itself instead of the collapsed complex")

    sp = sub.add_parser("nerve")
    common(sp)
    sp.add_argument("--member", action="append", dest="members", default=[],
                    help="subcube as comma-separated i=e pairs, e.g. 1=0")
    sp.add_argument("--boundary", action="store_true", help="use all codimension-one subcubes")
    sp.add_argument("--vanishing", action="store_true",
                    help="also check the low-dimensional vanishing of the union of the members")
    sp.add_argument("--lax", action="store_true",
                    help="accept repeated full-cube members when validating the family")

    sp = sub.add_parser("verify")
    common(sp)
    return p


_BASE_KEYS = {"command", "n", "r", "engine", "ordering", "max_faces", "max_seconds", "seed",
              "out", "format", "threads"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    args = vars(ns).copy()
    mb = os.environ.get("CUBE_RIPS_BUDGET_MB")
    max_faces = budget_faces() if args.get("max_faces") is None else args["max_faces"]
    cfg = RunConfig(
        command=args["command"], n=args.get("n"), r=args.get("r"),
        engine=args.get("engine", "coreduce"), ordering=args.get("ordering", "paper"),
        max_faces=max_faces, budget_mb=float(mb) if mb else None,
        max_seconds=args.get("max_seconds"), seed=args.get("seed", 0), out=args.get("out"),
        format=args.get("format", "json"), threads=args["threads"],
        extra={k: v for k, v in sorted(args.items()) if k not in _BASE_KEYS},
    )
    cfg.validate()
    return cfg


def _alarm(signum, frame):
    raise BudgetExceeded("wall-clock budget exceeded")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (ConfigError, ValueError) as exc:
        print(f"cube-rips: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.max_seconds:
        signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, cfg.max_seconds)
    try:
        _status(f"{cfg.command} n={cfg.n} r={cfg.r}")
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"cube-rips: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceLimitExceeded, BudgetExceeded, MemoryError) as exc:
        print(f"cube-rips: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"cube-rips: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    finally:
        if cfg.max_seconds:
            signal.setitimer(signal.ITIMER_REAL, 0)


if __name__ == "__main__":
    sys.exit(main())
