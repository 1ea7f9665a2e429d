"""Command-line interface.

    pdspace dist     [--space S] [--p P] a.json b.json
    pdspace match    [--space S] [--p P] a.json b.json
    pdspace cost     [--space S] [--p P] match.json
    pdspace geodesic [--space S] [--p P] [--t-grid T] a.json b.json
    pdspace diagnose [--space S] [--p P] --eps-schedule E family.json [more.json ...]
    pdspace embed    [--space S] [--p P] --n N a.json [b.json]
    pdspace gallery  --name NAME [--n N] [--p P]

Results go to stdout as JSON (or to ``--out``). Computed numbers are
rounded to 12 significant digits and infinity is written as ``"inf"``;
point payloads are written at full precision so they round-trip.

Exit codes: 0 success, 2 invalid input, 3 capability error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

from .analysis import (CIRCLES_LIMIT, circles_partial, circles_truncation, diagnose_set,
                       embed_symmetric, non_length_space, symmetric_dist)
from .diagram import Diagram, TruncatedDiagram, diagram_from_json, diagram_to_json
from .errors import CapabilityError, PDSpaceError, ValidationError
from .geodesic import distinct_geodesics, geodesic
from .matching import (cost_p, infimum_gap_demo, matching_from_json, matching_to_json,
                       solver_p, wasserstein, wasserstein_truncated)
from .spaces import INF, make_space, parse_p

EXIT_OK, EXIT_INVALID, EXIT_CAPABILITY = 0, 2, 3


def num(v: float) -> Any:
    """A computed value as emitted: 12 significant digits, ``"inf"`` for infinity."""
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        return v
    v = float(v)
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    if math.isnan(v):
        raise ValidationError("computation produced NaN")
    return float(f"{v:.12g}")


def _p_out(p: float) -> Any:
    return "inf" if p == INF else p


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


# --------------------------------------------------------------------------
# input
# --------------------------------------------------------------------------


def _load_json(path: str) -> Any:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        line = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ValidationError(
            f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}\n"
            f"    {line}\n    {' ' * (exc.colno - 1)}^") from None


def _load_diagram(path: str, space) -> Diagram | TruncatedDiagram:
    return diagram_from_json(_load_json(path), space)


def _head(d: Diagram | TruncatedDiagram) -> Diagram:
    if isinstance(d, TruncatedDiagram):
        if d.tail_bound:
            raise ValidationError("this command needs finite diagrams without a tail")
        return d.head
    return d


def _pair(args) -> tuple:
    a = _load_diagram(args.a, args.space)
    b = _load_diagram(args.b, args.space if args.space else _head_space(a))
    return a, b


def _head_space(d):
    return d.head.space if isinstance(d, TruncatedDiagram) else d.space


def _solve(a, b, p):
    if isinstance(a, TruncatedDiagram) or isinstance(b, TruncatedDiagram):
        return wasserstein_truncated(a, b, p)
    return wasserstein(a, b, p)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_dist(args) -> Any:
    a, b = _pair(args)
    res = _solve(a, b, args.p)
    return {"value": num(res.value), "error_bound": num(res.error_bound), "optimal": res.optimal}


def cmd_match(args) -> Any:
    a, b = _pair(args)
    res = _solve(a, b, args.p)
    return {
        "space": _head_space(a).name,
        "p": _p_out(args.p),
        "value": num(res.value),
        "error_bound": num(res.error_bound),
        "optimal": res.optimal,
        "matching": matching_to_json(res.matching),
    }


def cmd_cost(args) -> Any:
    obj = _load_json(args.a)
    space = args.space or (obj.get("space") if isinstance(obj, dict) else None)
    if space is None:
        raise ValidationError("matching JSON names no space and none was given")
    p = args.p
    if not args.p_given and isinstance(obj, dict) and "p" in obj:
        p = solver_p(obj["p"])
    sigma = matching_from_json(obj, space)
    return {"value": num(cost_p(sigma, p))}


def _t_grid(spec: str) -> list[float]:
    spec = spec.strip()
    if ":" not in spec and "," not in spec:
        try:
            k = int(spec)
        except ValueError:
            raise ValidationError(f"bad --t-grid {spec!r}") from None
        if k < 2:
            raise ValidationError("--t-grid needs at least 2 samples")
        return [i / (k - 1) for i in range(k)]
    try:
        ts = [float(t) for t in spec.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"bad --t-grid {spec!r}") from None
    if not ts or any(not 0.0 <= t <= 1.0 for t in ts):
        raise ValidationError("--t-grid values must lie in [0, 1]")
    return ts


def cmd_geodesic(args) -> list[Any]:
    a, b = _pair(args)
    g = geodesic(_head(a), _head(b), args.p)
    lines = []
    for t in _t_grid(args.t_grid):
        lines.append({"t": t, "diagram": diagram_to_json(g.eval(t))})
    return lines


def _schedule(spec: str) -> list[float]:
    try:
        eps = [float(e) for e in spec.split(",") if e.strip()]
    except ValueError:
        raise ValidationError(f"bad --eps-schedule {spec!r}") from None
    if not eps or any(not (e > 0 and math.isfinite(e)) for e in eps):
        raise ValidationError("--eps-schedule needs positive finite values")
    return eps


def _round_numbers(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _round_numbers(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_numbers(v) for v in obj]
    if isinstance(obj, float):
        return num(obj)
    return obj


def cmd_diagnose(args) -> Any:
    if args.eps_schedule is None:
        raise ValidationError("diagnose needs --eps-schedule")
    family = []
    space = args.space
    for path in args.files:
        obj = _load_json(path)
        items = obj.get("diagrams") if isinstance(obj, dict) and "diagrams" in obj else None
        if items is None and isinstance(obj, list) and obj and isinstance(obj[0], dict) \
                and "points" in obj[0]:
            items = obj
        for item in (items if items is not None else [obj]):
            d = diagram_from_json(item, space)
            space = space or _head_space(d).name
            family.append(d)
    if not family:
        raise ValidationError("diagnose needs at least one diagram")
    report = diagnose_set(family, args.p, _schedule(args.eps_schedule))
    out = report.to_json(_head_space(family[0]))
    scales = out.pop("scales")
    out = _round_numbers(out)
    out["eps_schedule"] = [num(e) for e in report.eps_schedule]
    for s in scales:
        centers = s.pop("net_centers")
        s = _round_numbers(s)
        s["net_centers"] = centers
        out.setdefault("scales", []).append(s)
    return out


def cmd_embed(args) -> Any:
    if args.n is None:
        raise ValidationError("embed needs --n")
    a = _head(_load_diagram(args.a, args.space))
    u = embed_symmetric(a, args.n)
    out: dict[str, Any] = {"space": a.space.name, "n": u.n,
                           "slots": [a.space.to_json(x) for x in u.slots]}
    if args.b is not None:
        b = _head(_load_diagram(args.b, args.space or a.space.name))
        v = embed_symmetric(b, args.n)
        out["p"] = _p_out(args.p)
        out["symmetric_dist"] = num(symmetric_dist(u, v, args.p))
        out["wasserstein"] = num(wasserstein(a, b, args.p).value)
    return out


def _gallery_wedge_intervals(args):
    return [[k, num(c)] for k, c in infimum_gap_demo(args.n or 10)]


def _gallery_circles(args):
    N = args.n or 100
    partial, tail = circles_partial(N, args.p if args.p_given else 1.0)
    trunc = circles_truncation(N)
    coarse = circles_truncation(max(1, N // 2))
    w = wasserstein_truncated(coarse, trunc, 1.0)
    return {
        "N": N,
        "partial": num(partial),
        "tail_bound": num(tail),
        "limit": num(CIRCLES_LIMIT),
        "brackets_limit": partial <= CIRCLES_LIMIT <= partial + tail,
        "truncation_step": {"from": coarse.head.cardinality, "to": N,
                            "w1": num(w.value), "error_bound": num(w.error_bound),
                            "within_tail": w.value <= coarse.tail_bound + 1e-12},
    }


def _gallery_non_length(args):
    out = non_length_space(args.n or 3, args.p if args.p_given else 1.0)
    return {k: (num(v) if isinstance(v, float) else v) for k, v in out.items()}


def _gallery_unique_geodesic(args):
    sp = make_space("halfplane:linf")
    alpha = Diagram.from_points(sp, [(0.0, 10.0), (2.0, 12.0)])
    beta = Diagram.from_points(sp, [(0.0, 12.0), (2.0, 10.0)])
    p = args.p if args.p_given else 1.0
    paths = distinct_geodesics(alpha, beta, p, k=2)
    mids = [p_.eval(0.5) for p_ in paths]
    return {
        "space": sp.name,
        "p": _p_out(p),
        "alpha": diagram_to_json(alpha),
        "beta": diagram_to_json(beta),
        "value": num(wasserstein(alpha, beta, p).value),
        "geodesics": len(paths),
        "midpoints": [diagram_to_json(m) for m in mids],
        "midpoints_differ": len(set(mids)) > 1,
    }


GALLERY = {
    "wedge_intervals": _gallery_wedge_intervals,
    "circles": _gallery_circles,
    "non_length_space": _gallery_non_length,
    "unique_geodesic": _gallery_unique_geodesic,
}


def cmd_gallery(args) -> Any:
    if args.n is not None and args.n < 1:
        raise ValidationError("--n must be positive")
    return GALLERY[args.name](args)


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--space", default=None, help="space spec, e.g. halfplane:l2 (default: read from input)")
    common.add_argument("--p", default=None, help="exponent: real >= 1 or 'inf' (default 1)")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = _Parser(prog="pdspace", description="Wasserstein geometry of persistence diagrams on metric pairs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_ in (("dist", "W_p distance between two diagrams"),
                        ("match", "optimal matching and its value")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("a")
        sp.add_argument("b")

    sp = sub.add_parser("cost", parents=[common], help="re-evaluate the cost of a matching JSON")
    sp.add_argument("a", metavar="matching")

    sp = sub.add_parser("geodesic", parents=[common], help="sample the geodesic as JSON lines")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--t-grid", default="11", help="comma-separated times in [0,1], or a sample count")

    sp = sub.add_parser("diagnose", parents=[common], help="compactness witnesses for a family")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--eps-schedule", default=None, help="comma-separated positive scales")

    sp = sub.add_parser("embed", parents=[common], help="symmetric-product embedding")
    sp.add_argument("a")
    sp.add_argument("b", nargs="?", default=None)
    sp.add_argument("--n", type=int, default=None)

    sp = sub.add_parser("gallery", parents=[common], help="worked examples")
    sp.add_argument("--name", required=True, choices=sorted(GALLERY))
    sp.add_argument("--n", type=int, default=None)
    return parser


COMMANDS = {
    "dist": cmd_dist, "match": cmd_match, "cost": cmd_cost, "geodesic": cmd_geodesic,
    "diagnose": cmd_diagnose, "embed": cmd_embed, "gallery": cmd_gallery,
}


def _dump(obj: Any) -> str:
    return json.dumps(obj, allow_nan=False)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.p_given = args.p is not None
        args.p = solver_p(parse_p(args.p if args.p_given else 1.0))
        if args.space is not None:
            args.space = make_space(args.space).name
        result = COMMANDS[args.command](args)
        if args.command == "geodesic":
            text = "".join(_dump(line) + "\n" for line in result)
        else:
            text = _dump(result) + "\n"
    except CapabilityError as exc:
        print(f"pdspace: capability error: {exc}", file=stderr)
        return EXIT_CAPABILITY
    except (ValidationError, PDSpaceError, ValueError) as exc:
        print(f"pdspace: invalid input: {exc}", file=stderr)
        return EXIT_INVALID
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"pdspace: cannot write {args.out}: {exc.strerror}", file=stderr)
            return EXIT_INVALID
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
