"""Command-line front end: ``tropex <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 numeric or precision failure,
3 verification failure.  With ``--threads 1`` (the default) identical
arguments give byte-identical output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from . import __version__
from .errors import DomainError, NotConcaveError, PrecisionError
from .support import PolygonSupport, SupportFunction, default_precision, parse_domain

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
COMMANDS = ("sum", "fseries", "caustic", "levelset", "cfrac", "verify", "render")
FORMATS = ("json", "csv", "svg")
DEFAULT_FORMAT = {"render": "svg", "verify": "table"}


class UsageError(Exception):
    """Bad command-line input; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    command: str
    domain: Optional[str] = None
    threshold: float = 1e-6
    max_nodes: int = 10**7
    precision_bits: int = 128
    s: complex = 1 + 0j
    output_format: str = "json"
    output_path: Optional[str] = None
    threads: int = 1
    options: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.threshold > 0:
            raise UsageError(f"threshold must be positive, got {self.threshold}")
        if self.precision_bits < 64:
            raise UsageError(f"precision must be at least 64 bits, got {self.precision_bits}")
        if self.max_nodes < 1:
            raise UsageError("max-nodes must be positive")
        if self.threads < 1:
            raise UsageError("threads must be positive")
        if self.output_format not in FORMATS + ("table",):
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.domain is not None:
            try:
                parse_domain(self.domain, self.precision_bits)
            except DomainError as exc:
                raise UsageError(f"--domain {self.domain!r}: {exc}") from exc
        return self

    def support(self) -> SupportFunction:
        return parse_domain(self.domain, self.precision_bits)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="working precision in bits (default: $TROPEX_PRECISION or 128)")
    common.add_argument("--format", dest="output_format", choices=FORMATS, default=None)
    common.add_argument("--output", "-o", dest="output_path", default=None, help="write here instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="parallel summation workers (default 1)")

    parser = _Parser(prog="tropex", description="Tropical series, caustics and lattice sums of convex domains.")
    parser.add_argument("--version", action="version", version=f"tropex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sum", parents=[common], help="threshold sum of f^s over the basis tree with exact tail")
    p.add_argument("--domain", required=True, help="disk | lmu:<mu> | parabola:<mu> | polygon:x1,y1;x2,y2;...")
    p.add_argument("--s", type=_complex, default=1 + 0j)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--max-nodes", type=int, default=10**7)

    p = sub.add_parser("fseries", parents=[common], help="partial sums of F(s) and a convergence verdict")
    p.add_argument("--domain", default="disk")
    p.add_argument("--s", type=_complex, required=True)
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--order", choices=("defect", "generation"), default="defect")

    p = sub.add_parser("caustic", parents=[common], help="tropical caustic of a rational polygon")
    p.add_argument("--domain", required=True)
    p.add_argument("--render", default=None, metavar="SVG", help="also write an SVG drawing")

    p = sub.add_parser("levelset", parents=[common], help="level set {F >= t} of a rational polygon")
    p.add_argument("--domain", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--t", type=_fraction, help="a single level")
    g.add_argument("--levels", type=int, help="this many equally spaced levels strictly between 0 and the maximum")

    p = sub.add_parser("cfrac", parents=[common], help="continued fraction of alpha and its two identities")
    p.add_argument("--alpha", required=True, help="expression: integers, decimals, + - * / **, sqrt, phi, pi, e")
    p.add_argument("--terms", type=int, default=30)

    p = sub.add_parser("verify", parents=[common], help="run the identity suite and print a pass/fail table")
    p.add_argument("--suite", choices=("paper",), default="paper")
    p.add_argument("--fast", action="store_true", help="smaller budgets, same tolerances")
    p.add_argument("--only", type=int, nargs="+", metavar="N", help="criterion numbers to run")

    p = sub.add_parser("render", parents=[common], help="SVG of a polygon and its caustic")
    p.add_argument("--domain", required=True)
    p.add_argument("--size", type=int, default=400)
    return parser


def parse_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    try:
        bits = ns.precision if ns.precision is not None else default_precision()
    except (DomainError, ValueError) as exc:
        raise UsageError(f"TROPEX_PRECISION: {exc}") from exc
    options = {k: v for k, v in vars(ns).items()
               if k not in ("command", "domain", "threshold", "max_nodes", "precision", "s",
                            "output_format", "output_path", "threads")}
    cfg = RunConfig(
        command=ns.command,
        domain=getattr(ns, "domain", None),
        threshold=getattr(ns, "threshold", 1e-6),
        max_nodes=getattr(ns, "max_nodes", 10**7),
        precision_bits=bits,
        s=getattr(ns, "s", 1 + 0j),
        output_format=ns.output_format or DEFAULT_FORMAT.get(ns.command, "json"),
        output_path=ns.output_path,
        threads=ns.threads,
        options=options,
    )
    return cfg.validate()


# serialization ---------------------------------------------------------------

def encode(x):
    """JSON-ready form: rationals as num/den strings, floats as decimal strings tagged with their bits."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return {"num": str(x.numerator), "den": str(x.denominator)}
    if isinstance(x, float):
        return {"decimal": repr(x), "bits": 53}
    if isinstance(x, mpmath.mpf) or type(x).__name__ == "mpf":
        bits = x.context.prec
        digits = int(math.ceil(bits * math.log10(2))) + 1
        return {"decimal": x.context.nstr(x, digits, min_fixed=-math.inf, max_fixed=math.inf), "bits": bits}
    if isinstance(x, complex):
        if x.imag == 0:
            return encode(x.real)
        return {"re": encode(x.real), "im": encode(x.imag)}
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if hasattr(x, "item"):  # numpy scalar
        return encode(x.item())
    return str(x)


def _json(obj) -> str:
    return json.dumps(encode(obj), sort_keys=True, indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _unsupported(cfg: RunConfig):
    raise UsageError(f"{cfg.command} does not support --format {cfg.output_format}")


# commands --------------------------------------------------------------------

def _cmd_sum(cfg: RunConfig) -> tuple[str, int]:
    from .exhaust import UNAVAILABLE, sum_powers

    s = cfg.s.real if cfg.s.imag == 0 else cfg.s
    if isinstance(s, float) and s.is_integer():
        s = int(s)
    res = sum_powers(cfg.support(), s, cfg.threshold, cfg.max_nodes, threads=cfg.threads)
    tail = None if res.tail_exact is UNAVAILABLE else res.tail_exact
    record = {
        "s": s, "partial": res.partial, "tail": tail if tail is not None else UNAVAILABLE,
        "total": res.total, "node_count": res.node_count, "frontier_size": res.frontier_size,
        "exponent_estimate": res.exponent, "truncated": res.truncated,
    }
    if cfg.output_format == "json":
        return _json(record), EXIT_OK
    if cfg.output_format == "csv":
        keys = sorted(record)
        return _csv(keys, [[json.dumps(encode(record[k])) if isinstance(encode(record[k]), dict)
                            else encode(record[k]) for k in keys]]), EXIT_OK
    _unsupported(cfg)


def _verdict_word(v: str) -> str:
    return {"converge": "converges", "diverge": "diverges"}.get(v, v)


def _cmd_fseries(cfg: RunConfig) -> tuple[str, int]:
    from .exhaust import fseries

    sf = cfg.support()
    if sf.kernel is None:
        raise UsageError(f"fseries needs a smooth domain (disk, lmu, parabola), not {cfg.domain!r}")
    budget = cfg.options["budget"]
    if budget < 10:
        raise UsageError("budget must be at least 10")
    r = fseries(cfg.s, budget, cfg.options["order"], sf)
    verdict = _verdict_word(r.verdict)
    if cfg.output_format == "csv":
        rows = [[n, p.real, p.imag, r.exponent, verdict] for n, p in
                ((n, complex(p)) for n, p in r.checkpoints)]
        return _csv(["n", "partial_real", "partial_imag", "exponent", "verdict"], rows), EXIT_OK
    if cfg.output_format == "json":
        total = r.partial + r.heuristic_tail if r.heuristic_tail is not None else None
        record = {
            "s": r.s, "partial": r.partial, "tail": r.heuristic_tail, "total": total,
            "node_count": budget, "frontier_size": None, "exponent_estimate": r.exponent,
            "verdict": verdict, "order": r.order, "tail_rigorous": False,
            "checkpoints": [{"n": n, "partial": p} for n, p in r.checkpoints],
        }
        return _json(record), EXIT_OK
    _unsupported(cfg)


def _polygon(cfg: RunConfig):
    sf = cfg.support()
    if not isinstance(sf, PolygonSupport):
        raise UsageError(f"{cfg.command} needs a polygon domain, got {cfg.domain!r}")
    return sf.polygon


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_caustic(cfg: RunConfig) -> tuple[str, int]:
    from .caustic import compute_caustic, render_svg
    from .caustic.io import curve_to_dict

    curve = compute_caustic(_polygon(cfg))
    if cfg.options.get("render"):
        _write(cfg.options["render"], render_svg(curve))
    if cfg.output_format == "json":
        return json.dumps(curve_to_dict(curve), sort_keys=True, indent=2) + "\n", EXIT_OK
    if cfg.output_format == "svg":
        return render_svg(curve), EXIT_OK
    if cfg.output_format == "csv":
        pos = {v.id: v.position for v in curve.vertices}
        rows = [[str(pos[e.source][0]), str(pos[e.source][1]), str(pos[e.target][0]), str(pos[e.target][1]),
                 e.weight, str(e.lattice_length), int(e.maximal)] for e in curve.edges]
        return _csv(["x0", "y0", "x1", "y1", "weight", "lattice_length", "maximal"], rows), EXIT_OK


def _cmd_levelset(cfg: RunConfig) -> tuple[str, int]:
    from .caustic import level_set, max_locus
    from .caustic.io import point

    poly = _polygon(cfg)
    m, _ = max_locus(poly)
    if cfg.options.get("t") is not None:
        levels = [cfg.options["t"]]
    else:
        k = cfg.options["levels"]
        if k < 1:
            raise UsageError("levels must be positive")
        levels = [m * Fraction(i, k + 1) for i in range(1, k + 1)]
    out = []
    for t in levels:
        lvl = level_set(poly, t)
        kind = getattr(lvl, "kind", "polygon")
        pts = lvl.points if kind != "polygon" else lvl.vertices
        out.append((t, kind, pts))
    if cfg.output_format == "json":
        return json.dumps({"max": {"num": str(m.numerator), "den": str(m.denominator)},
                           "levels": [{"t": encode(t), "kind": kind, "vertices": [point(p) for p in pts]}
                                      for t, kind, pts in out]}, sort_keys=True, indent=2) + "\n", EXIT_OK
    if cfg.output_format == "csv":
        rows = [[str(t), kind, i, str(p[0]), str(p[1])] for t, kind, pts in out for i, p in enumerate(pts)]
        return _csv(["t", "kind", "index", "x", "y"], rows), EXIT_OK
    _unsupported(cfg)


def _cmd_cfrac(cfg: RunConfig) -> tuple[str, int]:
    from .cfrac import expand, verify_identities

    n = cfg.options["terms"]
    if n < 1:
        raise UsageError("terms must be positive")
    exp = expand(cfg.options["alpha"], n, cfg.precision_bits)
    rep = verify_identities(cfg.options["alpha"], n, cfg.precision_bits)
    if cfg.output_format == "json":
        record = {
            "alpha": str(cfg.options["alpha"]), "exact": exp.exact, "terminated": exp.terminated,
            "terms": exp.terms, "convergents": [[str(p), str(q)] for p, q in exp.convergents],
            "partial_sums": rep.partial_sums, "residuals": rep.residuals, "targets": rep.targets,
            "quadratic_variant": rep.quadratic_variant, "linear_variant": rep.linear_variant,
        }
        return _json(record), EXIT_OK
    if cfg.output_format == "csv":
        rows = []
        quad = rep.partial_sums[rep.quadratic_variant]
        lin = rep.partial_sums[rep.linear_variant]
        for k, (a, (p, q)) in enumerate(zip(exp.terms, exp.convergents)):
            rows.append([k, a, p, q, quad[k] if k < len(quad) else None, lin[k] if k < len(lin) else None])
        return _csv(["k", "term", "p", "q", rep.quadratic_variant, rep.linear_variant], rows), EXIT_OK
    _unsupported(cfg)


def _cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    from .verify import run_suite

    only = set(cfg.options["only"]) if cfg.options.get("only") else None
    results = run_suite(fast=cfg.options["fast"], only=only)
    code = EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY
    if cfg.output_format == "json":
        return _json([{"criterion": r.criterion, "name": r.name, "passed": r.passed, "detail": r.detail}
                      for r in results]), code
    if cfg.output_format == "csv":
        return _csv(["criterion", "name", "passed", "detail"],
                    [[r.criterion, r.name, r.passed, r.detail] for r in results]), code
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", code


def _cmd_render(cfg: RunConfig) -> tuple[str, int]:
    from .caustic import compute_caustic, render_svg

    if cfg.output_format != "svg":
        _unsupported(cfg)
    return render_svg(compute_caustic(_polygon(cfg)), size=cfg.options["size"]), EXIT_OK


HANDLERS = {"sum": _cmd_sum, "fseries": _cmd_fseries, "caustic": _cmd_caustic, "levelset": _cmd_levelset,
            "cfrac": _cmd_cfrac, "verify": _cmd_verify, "render": _cmd_render}


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    text, code = HANDLERS[cfg.command](cfg)
    if cfg.output_path:
        _write(cfg.output_path, text)
    else:
        stdout.write(text)
    return code


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotConcaveError, PrecisionError, OverflowError, ArithmeticError) as exc:
        extra = f" (last trusted term {exc.last_trusted})" if getattr(exc, "last_trusted", None) is not None else ""
        print(f"numeric error: {type(exc).__name__}: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
