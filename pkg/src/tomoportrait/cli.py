"""Command-line front end.

Every command prints exactly one JSON document on stdout; diagnostics go to
stderr. Exit codes: 0 success, 2 usage or unreadable input, 3 invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from tomoportrait import bell, quantum
from tomoportrait.bell import bell_report, build_chsh_matrix, semigroup_separability_check
from tomoportrait.portrait import reduce_bipartite
from tomoportrait.probcore import InvariantError
from tomoportrait.quantum import DensityMatrix, Direction, bipartite_tomogram, tomogram
from tomoportrait.search import SearchConfig, maximize_bell

log = logging.getLogger("tomoportrait")

EXIT_USAGE = 2
EXIT_INVALID = 3

DEMOS = ("bell", "qubit-qutrit", "two-qutrit")


class StateFileError(Exception):
    """The state file cannot be read or parsed."""


def state_to_json(rho: DensityMatrix) -> dict:
    return {
        "dims": list(rho.dims),
        "entries": [[[z.real, z.imag] for z in row] for row in rho.data.tolist()],
    }


def write_state_file(rho: DensityMatrix, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_json(rho), indent=1) + "\n")


def parse_state(doc) -> DensityMatrix:
    """Build a DensityMatrix from a decoded state document.

    Raises StateFileError for structural problems and InvariantError when the
    matrix is not a valid state.
    """
    if not isinstance(doc, dict) or "entries" not in doc:
        raise StateFileError("state document must be an object with an 'entries' field")
    try:
        entries = np.array(doc["entries"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"entries are not numeric: {exc}") from None
    if entries.ndim != 3 or entries.shape[2] != 2 or entries.shape[0] != entries.shape[1]:
        raise StateFileError(f"entries must be a d x d array of [re, im] pairs, got shape {entries.shape}")
    rho = entries[..., 0] + 1j * entries[..., 1]
    if "dims" in doc:
        dims = doc["dims"]
    elif "dim" in doc:
        dims = [doc["dim"]]
    else:
        dims = [rho.shape[0]]
    if not isinstance(dims, list) or not dims or not all(isinstance(k, int) and k > 0 for k in dims):
        raise StateFileError(f"dims must be a list of positive integers, got {dims!r}")
    return DensityMatrix(rho, dims)


def read_state_file(path: str | Path) -> DensityMatrix:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path} is not valid JSON: {exc}") from None
    return parse_state(doc)


def _angle(text: str, degrees: bool) -> float:
    v = float(text)
    return math.radians(v) if degrees else v


def _direction(text: str, degrees: bool) -> Direction:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected '<theta>,<phi>', got {text!r}")
    return Direction(_angle(parts[0], degrees), _angle(parts[1], degrees))


def _pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected '<i>,<j>', got {text!r}")
    return int(parts[0]), int(parts[1])


def _write_csv(path: str | Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _figure_dir(args) -> Path | None:
    if not getattr(args, "figures", None):
        return None
    d = Path(args.figures)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _require_bipartite(rho: DensityMatrix) -> tuple[int, int]:
    if len(rho.dims) != 2:
        raise StateFileError(f"command needs a bipartite state; file declares dims {list(rho.dims)}")
    return rho.dims


def _directions_12(args) -> tuple[Direction, Direction]:
    deg = args.degrees
    return (
        Direction(_angle(args.theta1, deg), _angle(args.phi1, deg)),
        Direction(_angle(args.theta2, deg), _angle(args.phi2, deg)),
    )


def _quadruple(args) -> tuple[Direction, Direction, Direction, Direction]:
    return tuple(_direction(getattr(args, k), args.degrees) for k in "abcd")


def cmd_tomogram(args) -> dict:
    rho = read_state_file(args.state)
    d1, d2 = _directions_12(args)
    if len(rho.dims) == 1:
        w = tomogram(rho, quantum.local_unitary(d1, rho.dim, args.convention))
        out = {"outcome_dims": [rho.dim], "directions": [d1.as_list()], "probabilities": w.tolist()}
        rows = [[m, p] for m, p in enumerate(w)]
        header = ["m", "probability"]
    else:
        t = bipartite_tomogram(rho, d1, d2, _require_bipartite(rho), convention=args.convention)
        out = t.to_dict()
        db = t.outcome_dims[1]
        rows = [[k // db, k % db, p] for k, p in enumerate(t.probabilities)]
        header = ["m1", "m2", "probability"]
    if args.csv:
        _write_csv(args.csv, header, rows)
    return out


def cmd_portrait(args) -> dict:
    rho = read_state_file(args.state)
    d1, d2 = _directions_12(args)
    t = bipartite_tomogram(rho, d1, d2, _require_bipartite(rho), convention=args.convention)
    r = reduce_bipartite(t, args.isolate)
    if args.csv:
        _write_csv(args.csv, ["component", "probability"], enumerate(r.probabilities))
    return r.to_dict()


def _report_dict(report, figs: Path | None, stem: str) -> dict:
    out = report.to_dict()
    if figs is not None:
        from tomoportrait.plotting import plot_chsh_matrix

        out["figures"] = [str(plot_chsh_matrix(report.matrix, figs / f"{stem}_matrix.png", report.value))]
    return out


def _search_dict(result, figs: Path | None, stem: str) -> dict:
    out = result.to_dict()
    if figs is not None:
        from tomoportrait.plotting import plot_search_trace

        out["figures"] = [str(plot_search_trace(result.trace, figs / f"{stem}_trace.png", stem))]
    return out


def cmd_chsh(args) -> dict:
    rho = read_state_file(args.state)
    m = build_chsh_matrix(
        rho, _require_bipartite(rho), *_quadruple(args), convention=args.convention, isolate=args.isolate
    )
    report = bell_report(m)
    if args.csv:
        _write_csv(args.csv, ["row", "ab", "ac", "db", "dc"], [[i, *row] for i, row in enumerate(m.matrix)])
    return _report_dict(report, _figure_dir(args), "chsh")


def _config(args) -> SearchConfig:
    return SearchConfig(
        grid_resolution=args.grid,
        refine_iterations=args.iterations,
        seed=args.seed,
        tolerance=args.tolerance,
    )


def cmd_maximize(args) -> dict:
    rho = read_state_file(args.state)
    dims = _require_bipartite(rho)
    result = maximize_bell(rho, dims, _config(args), convention=args.convention, isolate=args.isolate)
    m = build_chsh_matrix(rho, dims, *result.best_angles, convention=args.convention, isolate=args.isolate)
    if args.csv:
        _write_csv(args.csv, ["iteration", "best_value"], result.trace)
    figs = _figure_dir(args)
    out = _search_dict(result, figs, "maximize")
    out["report"] = _report_dict(bell_report(m), figs, "maximize")
    return out


def cmd_semigroup_check(args) -> dict:
    rho = read_state_file(args.state)
    dims = _require_bipartite(rho)
    quads = []
    for text in args.quad or []:
        parts = text.split(";")
        if len(parts) != 4:
            raise argparse.ArgumentTypeError(f"--quad needs four ';'-separated directions, got {text!r}")
        quads.append(tuple(_direction(p, args.degrees) for p in parts))
    rng = np.random.default_rng(args.seed)
    while len(quads) < max(args.random, 2 if not quads else 0):
        quads.append(tuple(quantum.random_direction(rng) for _ in range(4)))
    if len(quads) < 2:
        raise argparse.ArgumentTypeError("need at least two quadruples (--quad or --random)")
    reports = semigroup_separability_check(
        rho, dims, quads, convention=args.convention, isolate=args.isolate
    )
    if args.csv:
        _write_csv(args.csv, ["factors", "value", "verdict"], [["x".join(map(str, r.factors)), r.value, r.verdict] for r in reports])
    witnessed = bell.any_witnessed(reports)
    return {
        "verdict": bell.WITNESSED if witnessed else bell.SEPARABLE,
        "max_value": max(r.value for r in reports),
        "reports": [r.to_dict() for r in reports],
    }


QUBIT_QUTRIT_ANGLES = (
    Direction(math.pi / 2, 0.0),
    Direction(math.pi / 2, math.pi / 4),
    Direction(math.pi / 2, math.pi / 8),
    Direction(math.pi / 2, -math.pi / 2),
)
BELL_ANGLES = (
    Direction(math.pi / 2, 0.0),
    Direction(math.pi / 2, math.pi / 4),
    Direction(math.pi / 2, -math.pi / 4),
    Direction(math.pi / 2, -math.pi / 2),
)
TWO_QUTRIT_REFERENCE = ((0.0, math.pi / 2, math.pi / 2, math.pi / 2), (2 * math.pi, -math.pi / 8, math.pi / 8, 0.0))


def demo_bell(config: SearchConfig, figs: Path | None) -> dict:
    rho = quantum.bell_state()
    t0 = time.perf_counter()
    fixed = bell_report(build_chsh_matrix(rho, (2, 2), *BELL_ANGLES))
    result = maximize_bell(rho, (2, 2), config)
    return {
        "demo": "bell",
        "state": state_to_json(rho),
        "report": _report_dict(fixed, figs, "bell"),
        "search": _search_dict(result, figs, "bell"),
        "expected": bell.TSIRELSON_BOUND,
        "seconds": time.perf_counter() - t0,
    }


def demo_qubit_qutrit(config: SearchConfig, figs: Path | None) -> dict:
    rho = quantum.qubit_qutrit_state()
    t0 = time.perf_counter()
    opts = {"convention": "zxz", "isolate": (0, 1)}
    fixed = bell_report(build_chsh_matrix(rho, (2, 3), *QUBIT_QUTRIT_ANGLES, **opts))
    theta = [d.theta for d in QUBIT_QUTRIT_ANGLES]
    closed = bell.qubit_qutrit_B(theta, *bell.combined_phases([d.phi for d in QUBIT_QUTRIT_ANGLES]))
    result = maximize_bell(rho, (2, 3), config, **opts)
    return {
        "demo": "qubit-qutrit",
        "state": state_to_json(rho),
        "convention": "zxz",
        "isolate": [0, 1],
        "report": _report_dict(fixed, figs, "qubit_qutrit"),
        "closed_form_B": closed,
        "search": _search_dict(result, figs, "qubit_qutrit"),
        "expected": 1 + math.sqrt(2),
        "seconds": time.perf_counter() - t0,
    }


def demo_two_qutrit(config: SearchConfig, figs: Path | None) -> dict:
    rho = quantum.two_qutrit_state()
    t0 = time.perf_counter()
    result = maximize_bell(rho, (3, 3), config)
    m = build_chsh_matrix(rho, (3, 3), *result.best_angles)
    theta, phi = TWO_QUTRIT_REFERENCE
    reference = tuple(Direction(t, p) for t, p in zip(theta, phi))
    return {
        "demo": "two-qutrit",
        "state": state_to_json(rho),
        "search": _search_dict(result, figs, "two_qutrit"),
        "report": _report_dict(bell_report(m), figs, "two_qutrit"),
        "best_value": result.best_value,
        "reference_angles": {
            "closed_form_B": bell.two_qutrit_B(theta, phi),
            "pipeline_value": bell.chsh_value(build_chsh_matrix(rho, (3, 3), *reference)),
        },
        "note": (
            "the closed form two_qutrit_B does not reproduce the tomogram pipeline and "
            "gives 1 at the reference angles; the violation is established by the optimizer instead"
        ),
        "seconds": time.perf_counter() - t0,
    }


def cmd_demo(args) -> dict:
    config = _config(args)
    figs = _figure_dir(args)
    out = {"bell": demo_bell, "qubit-qutrit": demo_qubit_qutrit, "two-qutrit": demo_two_qutrit}[args.name](
        config, figs
    )
    if args.save_state:
        write_state_file(parse_state(out["state"]), args.save_state)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomoportrait",
        description="Spin tomograms, qubit portraits and Bell-CHSH separability screening.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    common.add_argument("--convention", choices=quantum.CONVENTIONS, default="zyz", help="qubit rotation matrix")
    common.add_argument("--csv", metavar="PATH", help="also write a flat CSV table to PATH")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", required=True, metavar="PATH", help="JSON state file")

    binning = argparse.ArgumentParser(add_help=False)
    binning.add_argument(
        "--isolate", type=_pair, default=(0, 0), metavar="I,J",
        help="outcome kept by each party when binning to two outcomes (default 0,0)",
    )

    figures = argparse.ArgumentParser(add_help=False)
    figures.add_argument("--figures", metavar="DIR", help="render PNG figures into DIR")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--grid", type=int, default=8, help="grid points per angle axis")
    search.add_argument("--iterations", type=int, default=200, help="refinement iteration budget")
    search.add_argument("--tolerance", type=float, default=1e-7)

    angles = argparse.ArgumentParser(add_help=False)
    for name in ("theta1", "phi1", "theta2", "phi2"):
        angles.add_argument(f"--{name}", default="0")

    quad = argparse.ArgumentParser(add_help=False)
    for name in "abcd":
        quad.add_argument(f"--{name}", required=True, metavar="THETA,PHI")

    p = sub.add_parser("tomogram", parents=[state, common, angles], help="joint tomogram and marginals")
    p.set_defaults(func=cmd_tomogram)
    p = sub.add_parser("portrait", parents=[state, common, angles, binning], help="reduced two-qubit 4-vector")
    p.set_defaults(func=cmd_portrait)
    p = sub.add_parser("chsh", parents=[state, common, quad, binning, figures], help="CHSH report at fixed directions")
    p.set_defaults(func=cmd_chsh)
    p = sub.add_parser("maximize", parents=[state, common, binning, search, figures], help="search for a CHSH violation")
    p.set_defaults(func=cmd_maximize)
    p = sub.add_parser(
        "semigroup-check", parents=[state, common, binning], help="CHSH bound on products of CHSH matrices"
    )
    p.add_argument("--quad", action="append", metavar="T,P;T,P;T,P;T,P", help="direction quadruple (repeatable)")
    p.add_argument("--random", type=int, default=0, metavar="N", help="add random quadruples up to N total")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_semigroup_check)
    p = sub.add_parser("demo", parents=[search, figures], help="reproduce a worked example")
    p.add_argument("name", choices=DEMOS)
    p.add_argument("--save-state", metavar="PATH", help="write the example state as a state file")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        out = args.func(args)
    except (StateFileError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
