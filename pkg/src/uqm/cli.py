"""Command-line front end: figure tables, single computations and acceptance suites."""
from __future__ import annotations

import argparse
import io
import json
import sys
from importlib.metadata import PackageNotFoundError, version
from typing import Sequence

import numpy as np

from .figures import FIGURES, Table, build_figure
from .operators import default_tol

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0.0.0"


def fmt(x: float) -> str:
    """12 significant digits; negative zero prints as 0."""
    s = f"{float(x):.12g}"
    return "0" if s == "-0" else s


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    buf.write(",".join(table.columns) + "\n")
    for row in table.data:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(fmt(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def render_json(values: dict, seed: int) -> str:
    out = _jsonable(values)
    out["meta"] = {"seed": seed, "tolerance": default_tol(), "version": _version()}
    return json.dumps(out, indent=2, sort_keys=True) + "\n"


def table_json(table: Table) -> dict:
    """Flat object: one array per column (keyed by the bare column name) plus figure parameters."""
    out = {c.split(" [")[0]: table.data[:, i] for i, c in enumerate(table.columns)}
    out["units"] = {c.split(" [")[0]: c.split(" [")[1].rstrip("]") for c in table.columns}
    out.update(table.params)
    return out


def parse_range(text: str) -> tuple[float, float, float]:
    try:
        a, b, s = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected start:stop:step")
    if s <= 0 or b < a:
        raise UsageError("range needs start <= stop and a positive step")
    return a, b, s


def parse_ints(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad integer list {text!r}")
    if not vals or min(vals) < 1:
        raise UsageError("integer list entries must be positive")
    return vals


def parse_unitary(text: str, d: int | None = None) -> np.ndarray:
    """Named gate (I, X, Y, Z, H, S, T) or a JSON list of rows with [re, im] or real entries."""
    named = {"I": np.eye(2), "X": [[0, 1], [1, 0]], "Y": [[0, -1j], [1j, 0]], "Z": [[1, 0], [0, -1]],
             "H": np.array([[1, 1], [1, -1]]) / np.sqrt(2), "S": [[1, 0], [0, 1j]],
             "T": [[1, 0], [0, np.exp(1j * np.pi / 4)]]}
    if text in named:
        return np.asarray(named[text], dtype=complex)
    try:
        rows = json.loads(text)
        m = np.array([[complex(*e) if isinstance(e, list) else complex(e) for e in row] for row in rows])
    except (ValueError, TypeError):
        raise UsageError(f"cannot parse unitary {text!r}")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UsageError("unitary must be square")
    return m


# ---------------------------------------------------------------- commands

def cmd_figure(args) -> tuple[str, str]:
    if args.figure not in FIGURES:
        raise UsageError(f"unknown figure {args.figure!r}; choose from {', '.join(FIGURES)}")
    rng = parse_range(args.range) if args.range else None
    table = build_figure(args.figure, rng, rounds=parse_ints(args.rounds), N=parse_ints(args.N))
    if not np.all(np.isfinite(table.data)):
        raise FloatingPointError(f"figure {args.figure} produced non-finite values")
    if args.format == "json":
        return render_json({"figure": args.figure, **table_json(table)}, args.seed), "json"
    return render_csv(table), "csv"


def cmd_usd(args) -> dict:
    from .usd import idp_regime, idp_success
    lam, eta1 = args.lam, args.eta1
    if not 0 <= lam < 1 or not 0 < eta1 < 1:
        raise UsageError("need 0 <= lambda < 1 and 0 < eta1 < 1")
    return {"P_D": idp_success(lam, eta1), "P_fail": 1 - idp_success(lam, eta1),
            "regime": idp_regime(lam, eta1), "lambda": lam, "eta1": eta1}


def cmd_channels(args) -> dict:
    from . import channels as ch
    u, v = parse_unitary(args.U), parse_unitary(args.V)
    if u.shape != v.shape:
        raise UsageError("U and V must have equal size")
    if args.action == "fidelity":
        cb = ch.cb_fidelity_unitaries(u, v)
        res = ch.unitary_usd(u, v, args.eta1)
        return {"F": cb.value, "P_D": res.probability, "eta1": args.eta1,
                "xi_eigenvalues": np.sort(np.linalg.eigvalsh(res.xi))}
    d = u.shape[0]
    from .operators import antisymmetric_projector
    pa = antisymmetric_projector(d, 2)
    rho = pa / np.trace(pa).real
    return {"d": d, "p_diff": ch.comparator_conditional(u, v, rho), "haar_average": ch.comparator_average(d)}


def cmd_meas(args) -> dict:
    from . import measurements as ms
    if args.action == "compare-labeled":
        lc = ms.labeled_compare(args.d)
        out = {"d": args.d, "average": lc.average}
        if args.theta is not None:
            if args.d != 2:
                raise UsageError("--theta applies to qubits")
            th = args.theta
            rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
            out["q_same"] = lc.q_same(ms.SharpObservable.from_unitary(np.eye(2)),
                                      ms.SharpObservable.from_unitary(rot))
        return out
    if args.action == "compare-unlabeled":
        if args.d != 2:
            raise UsageError("unlabeled comparison is available for d = 2 only")
        _, avg = ms.unlabeled_compare(2)
        out = {"d": 2, "average": avg, "diffdiff_average": ms.diffdiff_strategy()[1]}
        if args.theta is not None:
            th = args.theta
            rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
            out["success"] = ms.unlabeled_success(np.eye(2), rot)
        return out
    audit = ms.appendix_e_audit()
    out = {k: int(v) for k, v in audit.checks.items()}
    out["passed"] = int(audit.passed)
    if not audit.passed:
        raise FloatingPointError("subspace audit failed: " + ", ".join(k for k, v in audit.checks.items() if not v))
    return out


def cmd_acceptance(args, stdout) -> int:
    from .acceptance import SUITES, run_suite
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    lines = []

    def echo(line):
        lines.append(line)
        stdout.write(line + "\n")
        stdout.flush()

    checks = run_suite(args.suite, args.seed, echo)
    failed = sum(not c.passed for c in checks)
    summary = f"{len(checks) - failed}/{len(checks)} checks passed"
    stdout.write(summary + "\n")
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write("\n".join(lines + [summary]) + "\n")
    return EXIT_OK if failed == 0 else EXIT_FAIL


# ---------------------------------------------------------------- entry point

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    def options(parser, defaults: bool):
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        parser.add_argument("--seed", type=int, default=d(42))
        parser.add_argument("--out", default=d(None), help="output file (default stdout)")
        parser.add_argument("--format", choices=("csv", "json"), default=d(None))

    # options may appear before or after the command; the subparser copy must not reset them
    common = _Parser(add_help=False)
    options(common, defaults=False)
    p = _Parser(prog="uqm", description="Unambiguous quantum measurement toolkit")
    options(p, defaults=True)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    f = sub.add_parser("figure", parents=[common], help="emit a figure's curve table")
    f.add_argument("figure")
    f.add_argument("--range", help="start:stop:step of the horizontal axis")
    f.add_argument("--rounds", help="comma-separated rounds (4.15)")
    f.add_argument("--N", help="comma-separated round counts (4.16)")

    u = sub.add_parser("usd", parents=[common], help="two-pure-state discrimination")
    u.add_argument("action", choices=("idp",))
    u.add_argument("--lambda", dest="lam", type=float, required=True)
    u.add_argument("--eta1", type=float, required=True)

    c = sub.add_parser("channels", parents=[common], help="unitary channel tests")
    c.add_argument("action", choices=("fidelity", "compare"))
    c.add_argument("--U", default="I")
    c.add_argument("--V", default="X")
    c.add_argument("--eta1", type=float, default=0.5)

    m = sub.add_parser("meas", parents=[common], help="measurement comparison")
    m.add_argument("action", choices=("compare-labeled", "compare-unlabeled", "audit-subspaces"))
    m.add_argument("--d", type=int, default=2)
    m.add_argument("--theta", type=float, default=None)

    a = sub.add_parser("acceptance", parents=[common], help="run an acceptance suite")
    a.add_argument("suite")
    return p


def _emit(text: str, path: str | None, stdout) -> None:
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        if args.command == "acceptance":
            return cmd_acceptance(args, stdout)
        if args.command == "figure":
            args.format = args.format or "csv"
            text, _ = cmd_figure(args)
        else:
            handler = {"usd": cmd_usd, "channels": cmd_channels, "meas": cmd_meas}[args.command]
            values = handler(args)
            if args.format == "csv":
                keys = [k for k, v in values.items() if np.ndim(v) == 0 and not isinstance(v, str)]
                text = ",".join(f"{k} [1]" for k in keys) + "\n" + ",".join(fmt(values[k]) for k in keys) + "\n"
            else:
                text = render_json(values, args.seed)
        _emit(text, args.out, stdout)
        return EXIT_OK
    except UsageError as e:
        stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except (FloatingPointError, np.linalg.LinAlgError, ArithmeticError) as e:
        stderr.write(f"numeric failure: {e}\n")
        return EXIT_NUMERIC
    except ValueError as e:
        stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
