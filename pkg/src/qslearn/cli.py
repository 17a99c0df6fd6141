"""Command-line experiment runner.

Every subcommand writes one CSV whose header block echoes the resolved
configuration as ``#`` lines. Output is a pure function of the flags and
seed; only the ``# wall_time`` line changes between runs.

Exit codes: 0 success, 1 a run check failed, 2 usage or data error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, hhl, qsplines, qsvm, vqc
from .datasets import TrainingSet, load_csv, toy_dataset
from .errors import DivergenceError, QSLearnError

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
HHL_SIZES = (2, 4, 8, 16)
WALL_TIME_PREFIX = "# wall_time"


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def parse_config_file(path) -> dict[str, str]:
    """``key = value`` per line; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def parse_qubit_range(text: str) -> list[int]:
    """``"2..8"``, ``"2,4,6"`` or a single integer."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = (int(s) for s in text.split(".."))
            values = list(range(lo, hi + 1))
        else:
            values = [int(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad qubit range {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"bad qubit range {text!r}")
    return values


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="output CSV path (required)")
    p.add_argument("--config", default=None, help="key = value file; flags override it")


def _data_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", default=None, help="CSV dataset (default: shipped 4-point toy set)")


def _kernel_args(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--kernel", choices=qsvm.KINDS, default=default)
    p.add_argument("--ridge", type=float, default=qsvm.DEFAULT_RIDGE)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--coef0", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qslearn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hhl", help="HHL fidelity against the classical solve on random systems")
    p.add_argument("--size", type=int, default=2)
    p.add_argument("--clock-qubits", type=int, default=hhl.DEFAULT_CLOCK_QUBITS)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--min-fidelity", type=float, default=0.0)
    _common(p)

    p = sub.add_parser("qspline", help="quantum spline against the classical piecewise fit")
    p.add_argument("--function", default="sigmoid")
    p.add_argument("--knots", type=int, default=20, help="number of intervals")
    p.add_argument("--range", type=float, nargs=2, default=(-10.0, 10.0), metavar=("LO", "HI"))
    p.add_argument("--probe", type=int, default=200)
    p.add_argument("--clock-qubits", type=int, default=qsplines.DEFAULT_CLOCK_QUBITS)
    p.add_argument("--tolerance", type=float, default=0.02)
    _common(p)

    p = sub.add_parser("qsvm", help="LS-SVM coefficients from the classical and/or HHL solver")
    _data_arg(p)
    _kernel_args(p, "quantum")
    p.add_argument("--solver", choices=("classical", "hhl", "both"), default="both")
    p.add_argument("--clock-qubits", type=int, default=qsvm.HHL_CLOCK_QUBITS)
    p.add_argument("--tolerance", type=float, default=0.02)
    _common(p)

    p = sub.add_parser("vqc-train", help="variational classifier training history")
    _data_arg(p)
    p.add_argument("--qubits", type=int, default=None, help="default: one per feature")
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--loss", choices=("mse", "logistic"), default="mse")
    p.add_argument("--init", choices=("uniform", "small"), default="uniform")
    p.add_argument("--theta-out", default=None, help="also save trained parameters here")
    _common(p)

    p = sub.add_parser("barren", help="gradient variance against qubit count")
    p.add_argument("--qubits", type=parse_qubit_range, default=parse_qubit_range("2..8"))
    p.add_argument("--layers", type=int, default=20)
    p.add_argument("--samples", type=int, default=200)
    _common(p)

    p = sub.add_parser("kernel-gram", help="export the full Gram matrix of a dataset")
    _data_arg(p)
    _kernel_args(p, "quantum")
    _common(p)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Parse once to find ``--config``, load it as defaults, then parse again."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        values = parse_config_file(args.config)
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
    except UsageError as exc:
        parser.error(str(exc))
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            parser.error(f"unknown config key {key!r} for {args.command}")
        try:
            if action.nargs is not None and action.nargs not in ("?",):
                conv = action.type or str
                defaults[key] = [conv(v) for v in raw.replace(",", " ").split()]
            else:
                value = action.type(raw) if action.type else raw
                if action.choices is not None and value not in action.choices:
                    raise ValueError(f"choose from {', '.join(map(str, action.choices))}")
                defaults[key] = value
        except (ValueError, argparse.ArgumentTypeError) as exc:
            parser.error(f"config key {key!r}: {exc}")
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _load_data(path) -> TrainingSet:
    return toy_dataset() if path is None else load_csv(path)


# each runner returns (column names, rows, check passed)

def run_hhl(args):
    if args.size not in HHL_SIZES:
        raise UsageError(f"--size must be one of {HHL_SIZES}")
    if args.trials < 1 or args.clock_qubits < 1:
        raise UsageError("--trials and --clock-qubits must be >= 1")
    rows = []
    for trial in range(args.trials):
        rng = np.random.default_rng([args.seed, trial])
        A, b = hhl.random_hermitian(args.size, rng)
        system = hhl.make_hermitian(A, b)
        sol = hhl.hhl_solve(system, hhl.choose_config(system, args.clock_qubits))
        rows.append((trial, args.size, args.clock_qubits, system.condition_number,
                     sol.fidelity_vs_classical, sol.success_probability))
    ok = all(r[4] >= args.min_fidelity for r in rows)
    return ("trial", "size", "clock_qubits", "kappa", "fidelity", "success_prob"), rows, ok


def run_qspline(args):
    if args.probe < 1:
        raise UsageError("--probe must be >= 1")
    if args.knots < 1:
        raise UsageError("--knots must be >= 1")
    if args.function not in qsplines.TARGETS:
        raise UsageError(f"unknown function {args.function!r}; choose from {', '.join(qsplines.TARGETS)}")
    lo, hi = args.range
    if not lo < hi:
        raise UsageError("--range needs LO < HI")
    f = qsplines.get_target(args.function)
    model = qsplines.fit(f, qsplines.build_grid(lo, hi, args.knots), args.clock_qubits, name=args.function)
    rows = []
    for x in np.linspace(lo, hi, args.probe):
        classical = float(model.codomain_scale.inverse(model.classical_scaled(x)))
        quantum = model.evaluate(x)
        rows.append((float(x), float(f(x)), classical, quantum, abs(quantum - classical)))
    ok = max(r[4] for r in rows) <= args.tolerance
    return ("x", "true_value", "classical_estimate", "quantum_estimate", "abs_err_quantum"), rows, ok


def _kernel_spec(args) -> qsvm.KernelSpec:
    return qsvm.KernelSpec(args.kernel, degree=args.degree, coef0=args.coef0, gamma=args.gamma, ridge=args.ridge)


def run_qsvm(args):
    data = _load_data(args.data)
    kernel = _kernel_spec(args)
    solvers = ("classical", "hhl") if args.solver == "both" else (args.solver,)
    models = {s: qsvm.train(data, kernel, s, args.clock_qubits) for s in solvers}
    rows = [(s, m.bias, *m.multipliers, m.training_error()) for s, m in models.items()]
    ok = True
    if "classical" in models:
        ref = models["classical"]
        ok = ref.training_error() == 0.0
        if "hhl" in models:
            c = ref.coefficients
            ok = ok and np.linalg.norm(models["hhl"].coefficients - c) <= args.tolerance * np.linalg.norm(c)
    header = ("solver", "w0", *(f"gamma_{i}" for i in range(1, len(data) + 1)), "train_error")
    return header, rows, ok


def run_vqc_train(args):
    data = _load_data(args.data)
    n = args.qubits or data.n_features
    scheme = "angle" if n == data.n_features else "repeated-angle"
    fmap = vqc.FeatureMap.fit(data.features, n, scheme)
    ansatz = vqc.Ansatz(n, args.layers)
    config = vqc.TrainConfig(args.lr, args.epochs, args.seed, args.loss, init=args.init)
    result = vqc.train(data, fmap, ansatz, config)
    if args.theta_out:
        vqc.save_theta(args.theta_out, result.theta, n, args.layers)
    rows = list(zip(range(args.epochs + 1), result.loss_history, result.error_history))
    return ("epoch", "loss", "train_error"), rows, True


def run_barren(args):
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    table = vqc.barren_diagnostic(args.qubits, args.layers, args.samples, args.seed)
    rows = [(n, args.layers, v) for n, v in table]
    by_n = dict(table)
    ok = len(by_n) < 2 or by_n[max(by_n)] < by_n[min(by_n)]
    return ("n_qubits", "layers", "grad_variance"), rows, ok


def run_kernel_gram(args):
    data = _load_data(args.data)
    G = qsvm.gram_matrix(data, _kernel_spec(args))
    ok = bool(np.linalg.eigvalsh(G).min() >= -qsvm.PSD_TOL)
    return tuple(f"k{j}" for j in range(len(data))), [tuple(r) for r in G], ok


RUNNERS = {
    "hhl": run_hhl,
    "qspline": run_qspline,
    "qsvm": run_qsvm,
    "vqc-train": run_vqc_train,
    "barren": run_barren,
    "kernel-gram": run_kernel_gram,
}


def _resolved(args) -> list[str]:
    items = sorted((k, v) for k, v in vars(args).items() if k != "config")
    lines = [f"# command = {args.command}"]
    for key, value in items:
        if key == "command":
            continue
        if isinstance(value, (list, tuple)):
            value = " ".join(_fmt(v) for v in value)
        lines.append(f"# {key} = {_fmt(value) if value is not None else 'none'}")
    return lines


def write_report(path, args, header, rows, wall_time: float) -> None:
    lines = _resolved(args)
    lines.append(f"{WALL_TIME_PREFIX} = {wall_time:.3f}")
    lines.append(",".join(header))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config_file(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.out:
        print(f"qslearn {args.command}: error: --out is required", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        header, rows, ok = RUNNERS[args.command](args)
    except UsageError as exc:
        print(f"qslearn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"qslearn {args.command}: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (QSLearnError, ValueError, OSError) as exc:
        print(f"qslearn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_report(args.out, args, header, rows, time.perf_counter() - start)
    print(f"wrote {len(rows)} rows to {args.out}")
    if not ok:
        print(f"qslearn {args.command}: check failed", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
