"""Command-line front end.

Exit codes: 0 pass, 1 check failed, 2 usage/parse error, 3 singular Gram
matrix, 4 construction integrity, 5 Cesaro non-convergence.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from dataclasses import asdict, dataclass, fields
from typing import Optional, Sequence

import numpy as np

from . import generators as Gn
from . import models as M
from . import permgroup as PG
from . import weingarten as W
from .errors import (
    ConstructionError,
    ConvergenceError,
    QPermError,
    ResourceError,
    SingularGramError,
    StructuralError,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SINGULAR, EXIT_CONSTRUCTION, EXIT_CONVERGENCE = range(6)

CHECKS = ("magic", "flat", "double-flat", "triple-flat", "orbits", "orbitals", "transitivity", "stationary")


@dataclass
class RunConfig:
    tol: float = M.DEFAULT_TOL
    orbit_threshold: float = M.ORBIT_THRESHOLD
    tol_conv: float = M.TOL_CONV
    max_iter: int = M.MAX_ITER
    max_dim: int = M.MAX_TRANSFER_DIM
    max_order: int = PG.MAX_ORDER
    format: str = "json"
    seed: Optional[int] = None

    def validate(self):
        for name in ("tol", "orbit_threshold", "tol_conv"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_iter", "max_dim", "max_order"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.format not in ("json", "text"):
            raise ValueError(f"unknown format {self.format!r}")


class UsageError(Exception):
    pass


def _config_from_args(args) -> RunConfig:
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(cfg) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            cfg[f.name] = v
    conf = RunConfig(**cfg)
    try:
        conf.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return conf


def _frac(x):
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _emit(doc, conf: RunConfig, args, out=None):
    if not getattr(args, "no_timestamp", False):
        doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    doc = _jsonable(doc)
    if conf.format == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = _render_text(doc)
    target = out or getattr(args, "output", None)
    if target and target != "-":
        with open(target, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_text(doc, indent=0):
    pad = "  " * indent
    lines = []
    for key in sorted(doc):
        v = doc[key]
        if isinstance(v, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_render_text(v, indent + 1).rstrip("\n"))
        else:
            lines.append(f"{pad}{key}: {json.dumps(v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# weingarten


def cmd_weingarten(args, conf: RunConfig) -> int:
    family = W.Family.parse(args.family)
    G = W.gram(args.k, args.n, family)
    Wm = W.weingarten(args.k, args.n, family)
    labels = [str(p) for p in G.partitions]
    ent = Wm.entries
    doc = {
        "command": "weingarten",
        "k": args.k,
        "n": args.n,
        "family": family.value,
        "partitions": labels,
        "gram": [[str(int(x)) for x in row] for row in G.entries],
        "weingarten": [[_frac(x) for x in row] for row in ent],
    }
    if args.sweep:
        index, Z, d = W.kernel_integral_table(args.k, args.n, family)
        from fractions import Fraction

        doc["integrals"] = [
            {"ker_i": str(p), "ker_j": str(q), "value": _frac(Fraction(int(Z[a, b]), d))}
            for p, a in index.items()
            for q, b in index.items()
        ]
    _emit(doc, conf, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# generate


def _group_from_args(args, conf, degree=None) -> PG.PermutationGroup:
    if args.group:
        return PG.named_group(args.group, degree)
    if args.degree is None:
        raise UsageError("group needs --group NAME or --degree N with --gens")
    gens = [g for spec in (args.gens or []) for g in spec.split(";") if g.strip()]
    return PG.generate_group(args.degree, gens, max_order=conf.max_order)


def cmd_generate(args, conf: RunConfig) -> int:
    kind = args.kind
    if kind == "fourier":
        if args.n is None:
            raise UsageError("fourier needs --n")
        model = Gn.hadamard_model(Gn.fourier_matrix(args.n), conf.tol)
    elif kind == "hadamard-file":
        if not args.input:
            raise UsageError("hadamard-file needs --input")
        H = _load_hadamard(args.input, args.dephase)
        model = Gn.hadamard_model(H, conf.tol)
    elif kind == "weyl":
        if args.n is None:
            raise UsageError("weyl needs --n")
        model = Gn.weyl_model(args.n, None if args.twirl == "none" else "clifford", conf.tol)
    elif kind == "s3":
        model = Gn.s3_minimal_model(seed=conf.seed, tol=conf.tol)
    elif kind == "group":
        model = PG.group_model(_group_from_args(args, conf))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown kind {kind}")
    if not args.output:
        raise UsageError("generate needs -o/--output")
    M.save_model(model, args.output)
    print(f"wrote {args.output}: n={model.n} k_dim={model.kdim} fibers={model.num_fibers}")
    return EXIT_OK


def _load_hadamard(path, dephase=False):
    try:
        return Gn.load_hadamard(path, dephase)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_model(path):
    try:
        return M.load_model(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args, conf: RunConfig) -> int:
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    bad = [c for c in checks if c not in CHECKS]
    if bad or not checks:
        raise UsageError(f"unknown checks {bad}; choose from {', '.join(CHECKS)}")
    model = _load_model(args.model)
    results = {}
    passed = {}
    kw = dict(tol_conv=conf.tol_conv, max_iter=conf.max_iter, max_dim=conf.max_dim)
    for c in checks:
        if c == "magic":
            r = M.verify_magic(model, conf.tol)
            results[c], passed[c] = r.as_dict(), r.passed
        elif c == "flat":
            r = M.flatness_profile(model, conf.tol)
            results[c] = {
                "is_flat": r.is_flat,
                "common_rank": r.common_rank,
                "ranks": r.ranks,
                "max_trace_defect": r.max_trace_defect,
            }
            passed[c] = r.is_flat
        elif c == "double-flat":
            r = M.check_double_flat(model, conf.tol)
            results[c], passed[c] = r.as_dict(), r.passed
        elif c == "triple-flat":
            r = M.check_triple_flat(model, conf.tol, max_dim=conf.max_dim)
            results[c], passed[c] = r.as_dict(), r.passed
        elif c in ("orbits", "orbitals"):
            k = 1 if c == "orbits" else 2
            r = M.orbital_structure(model, k, conf.orbit_threshold)
            results[c] = r.as_dict()
            passed[c] = r.num_classes == k
        elif c == "transitivity":
            fd = [M.fixed_dim(model, k, **kw) for k in (1, 2, 3)]
            dims = [f.dim for f in fd]
            order = 3 if dims == [1, 2, 5] else 2 if dims[:2] == [1, 2] else 1 if dims[0] == 1 else 0
            results[c] = {
                "fixed_dims": dims,
                "transitive": dims[0] == 1,
                "doubly": dims[1] == 2,
                "triply": dims[2] == 5,
                "convergence": [f.as_dict() for f in fd],
            }
            passed[c] = order >= args.require_order
        elif c == "stationary":
            if not args.group:
                raise UsageError("stationary check needs --group")
            G = PG.named_group(args.group, model.n)
            r = Gn.check_stationary(model, G, args.max_k, conf.tol)
            results[c], passed[c] = r.as_dict(), r.stationary
    doc = {
        "command": "analyze",
        "model": {"n": model.n, "k_dim": model.kdim, "fibers": model.num_fibers},
        "results": results,
        "passed": passed,
        "all_passed": all(passed.values()),
    }
    _emit(doc, conf, args)
    return EXIT_OK if all(passed.values()) else EXIT_FAIL


# ---------------------------------------------------------------------------
# graph


def cmd_graph(args, conf: RunConfig) -> int:
    try:
        with open(args.file) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from exc
    if "entries" in doc:
        model = Gn.hadamard_model(Gn.hadamard_from_dict(doc, args.dephase), conf.tol)
    else:
        model = M.model_from_dict(doc)
    if args.kind == "profile":
        g = Gn.profile_graph_of_model(model, conf.orbit_threshold)
        dot, ncomp = g.to_dot(), len(g.components)
    else:
        k = 1 if args.kind == "orbits" else 2
        s = M.orbital_structure(model, k, conf.orbit_threshold)
        dot, ncomp = M.graph_to_dot(s.points, s.edges, args.kind), s.num_classes
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(dot)
    else:
        sys.stdout.write(dot)
    print(f"components: {ncomp}", file=sys.stderr if not args.output or args.output == "-" else sys.stdout)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--tol", type=float, default=None, help="verification tolerance")
    common.add_argument("--orbit-threshold", dest="orbit_threshold", type=float, default=None)
    common.add_argument("--tol-conv", dest="tol_conv", type=float, default=None)
    common.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    common.add_argument("--max-dim", dest="max_dim", type=int, default=None)
    common.add_argument("--max-order", dest="max_order", type=int, default=None)
    common.add_argument("--format", choices=("json", "text"), default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    p = argparse.ArgumentParser(prog="qperm", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    w = sub.add_parser("weingarten", parents=[common], help="Gram and Weingarten tables")
    w.add_argument("-k", type=int, required=True)
    w.add_argument("-n", type=int, required=True)
    w.add_argument("--family", choices=("all", "nc"), default="nc")
    w.add_argument("--sweep", action="store_true", help="also list integrals for all kernel pairs")
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_weingarten)

    g = sub.add_parser("generate", parents=[common], help="write a JSON model")
    g.add_argument("kind", choices=("fourier", "hadamard-file", "weyl", "s3", "group"))
    g.add_argument("--n", type=int)
    g.add_argument("--input", help="Hadamard JSON file")
    g.add_argument("--dephase", action="store_true")
    g.add_argument("--twirl", choices=("clifford", "none"), default="clifford")
    g.add_argument("--degree", type=int)
    g.add_argument("--gens", action="append", help="generator, cycle notation or images; repeatable")
    g.add_argument("--group", help="named group: S3, S4, A4, A5, Z(n), D(n)")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", parents=[common], help="run checks on a model file")
    a.add_argument("model")
    a.add_argument("--checks", required=True, help="comma list of " + ",".join(CHECKS))
    a.add_argument("--group", help="target group for the stationary check")
    a.add_argument("--max-k", dest="max_k", type=int, default=4)
    a.add_argument("--require-order", dest="require_order", type=int, default=1, choices=(1, 2, 3),
                   help="transitivity order the transitivity check must reach")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_analyze)

    gr = sub.add_parser("graph", parents=[common], help="export orbit/orbital/profile graphs as DOT")
    gr.add_argument("file", help="model or Hadamard JSON file")
    gr.add_argument("--kind", choices=("orbits", "orbitals", "profile"), required=True)
    gr.add_argument("--dephase", action="store_true")
    gr.add_argument("-o", "--output")
    gr.set_defaults(func=cmd_graph)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        conf = _config_from_args(args)
        return args.func(args, conf)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SingularGramError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (StructuralError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceError, QPermError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
