"""Command-line front end.

Exit codes: 0 when the tested property holds (or an evaluation succeeded),
1 when a violation or witness is reported, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from .check import CheckMode, check_monotone, check_submodular, verify_certificate
from .iou import (
    Case,
    CaseOutsideParams,
    closed_form_r_inside,
    closed_form_r_outside,
    enumerate_counterexamples,
    refute_property11,
)
from .lovasz import DEFAULT_TOL, lovasz_evaluate, probe_convexity
from .setfn import (
    SetFunction,
    SetFunctionError,
    cardinality,
    iou,
    load_function,
    neg_iou,
    negate,
    truncation,
)

EXIT_HOLDS = 0
EXIT_VIOLATED = 1
EXIT_ERROR = 2

BUILTINS = ("iou", "neg_iou", "cardinality", "truncation")

# Values under these keys are strings even when they look like JSON numbers.
_STRING_KEYS = {"lhs", "rhs", "gap", "r", "closed_form_r", "min_r", "max_r", "le_u", "le_v", "le_mid", "deficit", "value", "prefix_value"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------


def _flatten(obj: Any, prefix: str, out: list[tuple[str, Any]]) -> None:
    if isinstance(obj, dict) and obj and not (prefix.endswith("function") or prefix == "function"):
        for k, v in obj.items():
            _flatten(v, f"{prefix}.{k}" if prefix else k, out)
    elif isinstance(obj, list) and obj and all(isinstance(v, dict) for v in obj):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}.{i}", out)
    else:
        out.append((prefix, obj))


def render_text(report: dict[str, Any]) -> str:
    lines = []
    items: list[tuple[str, Any]] = []
    _flatten(report, "", items)
    for key, value in items:
        text = value if isinstance(value, str) else json.dumps(value, separators=(",", ":"))
        lines.append(f"{key}: {text}")
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> dict[str, Any]:
    """Inverse of :func:`render_text`."""
    root: dict[str, Any] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, raw = line.partition(": ")
        leaf = key.rsplit(".", 1)[-1]
        if leaf in _STRING_KEYS:
            value: Any = raw
        else:
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
        node = root
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return _listify(root)


def _listify(node: Any) -> Any:
    if not isinstance(node, dict):
        return node
    node = {k: _listify(v) for k, v in node.items()}
    if node and all(k.isdigit() for k in node):
        return [node[str(i)] for i in range(len(node))]
    return node


def render_json(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2) + "\n"


def _emit(report: dict[str, Any], as_json: bool) -> None:
    sys.stdout.write(render_json(report) if as_json else render_text(report))


# ---------------------------------------------------------------------------
# Function selection
# ---------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_function_args(p: argparse.ArgumentParser, negate_flag: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--function", metavar="FILE", help="JSON function description")
    src.add_argument("--builtin", choices=BUILTINS, help="built-in function family")
    p.add_argument("--m", type=int, help="ground set size for --builtin")
    p.add_argument("--y", type=_int_list, help="reference set for iou/neg_iou, e.g. 1,2")
    p.add_argument("--cap", type=int, help="cap for truncation")
    p.add_argument("--normalize", action="store_true", help="shift a table so that f(empty) = 0")
    if negate_flag:
        p.add_argument("--negate", action="store_true", help="use -f instead of f")


def _builtin(name: str, m: int | None, y: list[int] | None, cap: int | None) -> SetFunction:
    if m is None:
        raise UsageError("--builtin requires --m")
    if name in ("iou", "neg_iou"):
        if not y:
            raise UsageError(f"--builtin {name} requires a nonempty --y")
        return iou(m, y) if name == "iou" else neg_iou(m, y)
    if y is not None:
        raise UsageError(f"--y does not apply to --builtin {name}")
    if name == "cardinality":
        return cardinality(m)
    if cap is None:
        raise UsageError("--builtin truncation requires --cap")
    return truncation(m, cap)


def _load(args: argparse.Namespace) -> SetFunction:
    if args.function:
        if any(v is not None for v in (args.m, args.y, args.cap)):
            raise UsageError("--m/--y/--cap only apply to --builtin")
        f = load_function(args.function, normalize=args.normalize)
    else:
        if args.normalize:
            raise UsageError("--normalize only applies to --function")
        if args.cap is not None and args.builtin != "truncation":
            raise UsageError(f"--cap does not apply to --builtin {args.builtin}")
        f = _builtin(args.builtin, args.m, args.y, args.cap)
    if getattr(args, "negate", False):
        f = negate(f)
    return f


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    f = _load(args)
    mode = CheckMode.parse(args.mode)
    verdict = check_submodular(f, mode, workers=args.workers)
    report: dict[str, Any] = {"command": "check", "mode": mode.value, "function": f.describe()}
    if verdict.submodular:
        report["verdict"] = "submodular"
        _emit(report, args.json)
        return EXIT_HOLDS
    report["verdict"] = "violated"
    report["certificate"] = verdict.certificate.to_dict(f)
    _emit(report, args.json)
    return EXIT_VIOLATED


def cmd_monotone(args: argparse.Namespace) -> int:
    f = _load(args)
    verdict = check_monotone(f)
    report: dict[str, Any] = {"command": "monotone", "function": f.describe()}
    if verdict.monotone:
        report["verdict"] = "monotone"
        _emit(report, args.json)
        return EXIT_HOLDS
    report.update(verdict="violated", A=verdict.A.elements, x=verdict.x, gap=str(verdict.gap))
    _emit(report, args.json)
    return EXIT_VIOLATED


def cmd_extension(args: argparse.Namespace) -> int:
    f = _load(args)
    ev = lovasz_evaluate(f, args.point)
    report: dict[str, Any] = {
        "command": "extension",
        "function": f.describe(),
        "point": list(ev.point),
        "value": repr(ev.value),
    }
    if args.trace:
        report["chain"] = [
            {"element": s.element, "prefix": s.prefix.elements, "prefix_value": str(s.value)} for s in ev.chain
        ]
    _emit(report, args.json)
    return EXIT_HOLDS


def cmd_probe(args: argparse.Namespace) -> int:
    f = _load(args)
    witness = probe_convexity(f, samples=args.samples, seed=args.seed, tol=args.tol, workers=args.workers)
    report: dict[str, Any] = {
        "command": "probe",
        "function": f.describe(),
        "samples": args.samples,
        "seed": args.seed,
        "tol": args.tol,
    }
    if witness is None:
        report["verdict"] = "no-witness"
        _emit(report, args.json)
        return EXIT_HOLDS
    report["verdict"] = "witness"
    report["witness"] = witness.to_dict()
    _emit(report, args.json)
    return EXIT_VIOLATED


def _reproduce_case(m: int, case: Case, workers: int) -> dict[str, Any]:
    configs = list(enumerate_counterexamples(m, case))
    first = configs[0]
    f = first.function()
    n = (first.A.bits & first.Y.bits).bit_count()
    a_d = (first.A.bits | first.Y.bits).bit_count()
    b_d = (first.B.bits | first.Y.bits).bit_count()
    if case is Case.OUTSIDE_YB:
        closed = closed_form_r_outside(CaseOutsideParams(n, a_d, b_d))
        sign_ok = all(c.r < 0 for c in configs)
    else:
        closed = closed_form_r_inside(a_d, b_d)
        sign_ok = all(c.r > 0 for c in configs)
    verdict = check_submodular(f, CheckMode.STANDARD, workers=workers)
    cert = verdict.certificate
    return {
        "function": f.describe(),
        "example": first.to_dict(),
        "closed_form_r": str(closed),
        "configs": len(configs),
        "all_signs_hold": sign_ok,
        "min_r": str(min(c.r for c in configs)),
        "max_r": str(max(c.r for c in configs)),
        "verdict": "violated" if cert else "submodular",
        "certificate": cert.to_dict() if cert else None,
        "certificate_verified": bool(cert) and verify_certificate(f, cert),
    }


def cmd_reproduce(args: argparse.Namespace) -> int:
    if args.target != "paper":
        raise UsageError(f"unknown reproduction target {args.target!r}")
    m = args.m
    if not 3 <= m <= 12:
        raise UsageError(f"reproduce needs 3 <= --m <= 12, got {m}")
    p11 = refute_property11(m)
    report = {
        "command": "reproduce",
        "m": m,
        "iou_not_submodular": _reproduce_case(m, Case.OUTSIDE_YB, args.workers),
        "neg_iou_not_submodular": _reproduce_case(m, Case.INSIDE_Y, args.workers),
        "property11_refutation": p11.to_dict(),
    }
    _emit(report, args.json)
    return EXIT_VIOLATED


def cmd_scan(args: argparse.Namespace) -> int:
    if args.builtin not in ("iou", "neg_iou"):
        raise UsageError("scan supports --builtin iou or neg_iou")
    if not 3 <= args.max_m <= 20:
        raise UsageError(f"scan needs 3 <= --max-m <= 20, got {args.max_m}")
    make = iou if args.builtin == "iou" else neg_iou
    rows = []
    any_violation = False
    for m in range(3, args.max_m + 1):
        for k in range(1, m + 1):
            f = make(m, range(1, k + 1))
            cert = check_submodular(f, CheckMode.STANDARD, workers=args.workers).certificate
            any_violation |= cert is not None
            rows.append(
                {
                    "m": m,
                    "y_size": k,
                    "verdict": "violated" if cert else "submodular",
                    "certificate": cert.to_dict() if cert else None,
                }
            )
    _emit({"command": "scan", "builtin": args.builtin, "max_m": args.max_m, "results": rows}, args.json)
    return EXIT_VIOLATED if any_violation else EXIT_HOLDS


def cmd_refute(args: argparse.Namespace) -> int:
    w = refute_property11(args.m)
    _emit({"command": "refute-p11", "m": args.m, "claim": "B subset of A implies n_B < n_A", **w.to_dict()}, args.json)
    return EXIT_VIOLATED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="submodcheck",
        description="Exhaustive submodularity checks, Lovász extension probes and IoU counterexamples.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser, workers: bool = False) -> None:
        p.add_argument("--json", action="store_true", help="emit JSON instead of key: value lines")
        if workers:
            p.add_argument("--workers", type=int, default=1, help="parallel workers (output is unaffected)")

    p = sub.add_parser("check", help="decide submodularity")
    _add_function_args(p)
    p.add_argument("--mode", choices=[c.value for c in CheckMode], default=CheckMode.STANDARD.value)
    common(p, workers=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("monotone", help="decide monotonicity")
    _add_function_args(p)
    common(p)
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("extension", help="evaluate the Lovász extension at a point")
    _add_function_args(p)
    p.add_argument("--point", type=_float_list, required=True, help="coordinates C1,C2,...,Cm")
    p.add_argument("--trace", action="store_true", help="include the sorted prefix chain")
    common(p)
    p.set_defaults(func=cmd_extension)

    p = sub.add_parser("probe", help="search for midpoint-convexity violations of the extension")
    _add_function_args(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common(p, workers=True)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("reproduce", help="reproduce the IoU non-submodularity results")
    p.add_argument("target", choices=["paper"])
    p.add_argument("--m", type=int, default=3)
    common(p, workers=True)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("scan", help="check IoU over a range of ground sets, Y up to symmetry")
    p.add_argument("--builtin", choices=["iou", "neg_iou"], required=True)
    p.add_argument("--max-m", type=int, required=True)
    common(p, workers=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("refute-p11", help="counterexample to n_B < n_A for B subset of A")
    p.add_argument("--m", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_refute)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_HOLDS
    if getattr(args, "workers", 1) < 1:
        print("submodcheck: error: --workers must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (UsageError, SetFunctionError, ValueError, OSError) as exc:
        print(f"submodcheck: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
