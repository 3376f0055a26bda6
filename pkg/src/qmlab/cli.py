"""Command-line front end: ``qmlab eval|integrate|verify|counterexample``.

JSON goes to stdout (or ``--json PATH``); human-readable lines go to stderr.
Exit codes: 0 ok, 1 a check failed, 2 the scene or a name did not resolve,
3 an internal invariant was violated.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter

from .errors import InvariantViolation, SceneError
from .integral import integrate
from .reports import FAIL, render_value
from .scene import default_scene, load_scene
from .search import find_nonsubadditive_witness
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_LOAD, EXIT_INVARIANT = 0, 1, 2, 3


def _odd(text: str) -> int:
    n = int(text)
    if n < 3 or n % 2 == 0:
        raise argparse.ArgumentTypeError("grid size must be an odd integer >= 3")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", help="scene JSON file (default: built-in scene)")
    common.add_argument("--n", type=_odd, help="override the grid size")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled families and searches")
    common.add_argument("--json", dest="json_path", help="write the JSON document here instead of stdout")

    parser = argparse.ArgumentParser(prog="qmlab", description="Quasi-measures on discretized spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="value of a measure on an image")
    p.add_argument("measure")
    p.add_argument("image")

    p = sub.add_parser("integrate", parents=[common], help="quasi-integral of a function")
    p.add_argument("measure")
    p.add_argument("function")

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", default="all", choices=(*SUITES, "all"))

    p = sub.add_parser("counterexample", parents=[common], help="search for a non-subadditive open pair")
    p.add_argument("measure")
    p.add_argument("--budget", type=int, default=10_000)
    return parser


def _emit(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _eval(scene, args) -> tuple[dict, int]:
    m = scene.measure(args.measure)
    value = m(scene.image(args.image))
    print(f"{args.measure}({args.image}) = {render_value(value)}", file=sys.stderr)
    return {"command": "eval", "measure": args.measure, "image": args.image, "value": render_value(value)}, EXIT_OK


def _integrate(scene, args) -> tuple[dict, int]:
    m = scene.measure(args.measure)
    value = integrate(m, scene.function(args.function))
    print(f"integral of {args.function} against {args.measure} = {render_value(value)}", file=sys.stderr)
    return {"command": "integrate", "measure": args.measure, "function": args.function,
            "value": render_value(value)}, EXIT_OK


def _verify(scene, args) -> tuple[dict, int]:
    reports = run_suite(scene, args.suite, args.seed)
    counts = Counter(r.status for r in reports)
    width = max((len(r.check) for r in reports), default=0)
    for r in reports:
        print(f"{r.check:<{width}}  {r.status}", file=sys.stderr)
    print(f"{counts['pass']} pass, {counts['fail']} fail, {counts['inconclusive']} inconclusive", file=sys.stderr)
    doc = {"command": "verify", "suite": args.suite, "seed": args.seed, "grid": str(scene.grid),
           "summary": {k: counts[k] for k in ("pass", "fail", "inconclusive")},
           "reports": [r.to_dict() for r in reports]}
    return doc, EXIT_FAIL if counts[FAIL] else EXIT_OK


def _counterexample(scene, args) -> tuple[dict, int]:
    m = scene.measure(args.measure)
    witness = find_nonsubadditive_witness(m, args.budget, args.seed)
    if witness is None:
        print("none", file=sys.stderr)
    else:
        vals = render_value(witness["values"])
        print(f"U:\n{witness['U']}V:\n{witness['V']}values U={vals['U']} V={vals['V']} union={vals['union']}",
              file=sys.stderr)
    doc = {"command": "counterexample", "measure": args.measure, "budget": args.budget, "seed": args.seed,
           "witness": render_value(witness) if witness is not None else "none"}
    return doc, EXIT_OK


COMMANDS = {"eval": _eval, "integrate": _integrate, "verify": _verify, "counterexample": _counterexample}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scene = load_scene(args.scene, args.n) if args.scene else default_scene(args.n)
        doc, code = COMMANDS[args.command](scene, args)
    except SceneError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_LOAD
    except InvariantViolation as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    _emit(doc, args.json_path)
    return code


if __name__ == "__main__":
    sys.exit(main())
