"""Command-line interface: ``verify``, ``simulate`` and ``convert``.

Exit codes: 0 success, 1 failed check, 2 usage or input error,
3 simulation reached the singular band, 4 chart singular.
"""
import argparse
import json
import logging
import math
import sys

import numpy as np

from . import canonicity
from .body import InertiaTensor, angular_momentum, inertia_tensor, load_body, omega_abs_from_euler, random_body
from .charts import (
    AndoyerState,
    andoyer_from_state,
    body_attitude,
    euler_angles_from_attitude,
    euler_attitude,
    euler_kinematic_matrix,
    momentum_vector_body,
)
from .dynamics import HamiltonianSpec, euler_oracle, integrate
from .errors import AndoyerError, ChartSingular, FixtureError, SingularBandReached, SingularInertia, StepTooSmall, ZeroMomentum

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BAND, EXIT_SINGULAR = 0, 1, 2, 3, 4

CSV_HEADER = ("t", "l", "g", "theta", "L", "G", "Theta", "Mx", "My", "Mz", "H")


class UsageError(Exception):
    pass


def fmt(x):
    """17 significant digits: lossless and byte-stable."""
    return format(float(x), ".17g")


def dumps(obj, indent=2, _level=0):
    """JSON text with every float written by :func:`fmt`."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        # JSON has no inf/nan; an uncertifiable residual is written as null
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _tolerance_override(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    if name not in canonicity.DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(f"unknown tolerance {name!r}; choose from {', '.join(canonicity.CHECK_NAMES)}")
    try:
        tol = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name} must be a number") from None
    if not tol > 0.0:
        raise argparse.ArgumentTypeError(f"tolerance {name} must be positive")
    return name, tol


def _add_body_source(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--body", metavar="FILE", help='JSON body file {"masses": [...], "positions": [[x, y, z], ...]}')
    group.add_argument("--random-body", nargs=2, metavar=("N", "SCALE"), help="random N-mass body in a ball of radius SCALE")


def _body_from_args(args, required=False):
    if args.body:
        try:
            return load_body(args.body)
        except (OSError, ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"cannot read body file {args.body}: {exc}") from None
    if args.random_body:
        try:
            n, scale = int(args.random_body[0]), float(args.random_body[1])
            return random_body(args.seed, n, scale)
        except ValueError as exc:
            raise UsageError(f"invalid --random-body: {exc}") from None
    if required:
        raise UsageError("a body source (--body or --random-body) is required")
    return None


def build_parser():
    parser = argparse.ArgumentParser(prog="andoyer", description="Andoyer-variable canonicity checks and free rigid-body simulation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the canonicity suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--directions", type=int, default=100, help="random tangents per fixture for the one-form check")
    p.add_argument("--tol", type=_tolerance_override, action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--workers", type=int, default=1)
    _add_body_source(p)

    p = sub.add_parser("simulate", help="integrate free rotation in Andoyer variables, write CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inertia", type=float, nargs="+", metavar="I",
                   help="3 (diagonal), 6 (Ixx Iyy Izz Ixy Ixz Iyz) or 9 (row-major) entries")
    for name in ("l", "g", "theta"):
        p.add_argument(f"--{name}", type=float, default=0.0)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--G", type=float, required=True)
    p.add_argument("--Theta", type=float, required=True)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--method", choices=("rk4", "midpoint"), default="rk4")
    p.add_argument("--oracle", action="store_true", help="append the deviation from the Euler-equation oracle")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("--output", "-o", default="-")
    _add_body_source(p)

    p = sub.add_parser("convert", help="convert a state between the Euler and Andoyer charts")
    p.add_argument("direction", choices=("euler-to-andoyer", "andoyer-to-euler"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--angles", type=float, nargs=3, metavar=("PHI", "THETA", "PSI"))
    p.add_argument("--rates", type=float, nargs=3, metavar=("PHIDOT", "THETADOT", "PSIDOT"))
    p.add_argument("--state", type=float, nargs=6, metavar=("l", "g", "theta", "L", "G", "Theta"))
    p.add_argument("--output", "-o", default="-")
    _add_body_source(p)
    return parser


def _open_output(path):
    return sys.stdout if path == "-" else open(path, "w", newline="")


def _write(path, text):
    out = _open_output(path)
    try:
        out.write(text)
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_verify(args):
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.directions < 1:
        raise UsageError("--directions must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    body = None
    n_masses, scale = 5, 1.0
    if args.random_body:
        try:
            n_masses, scale = int(args.random_body[0]), float(args.random_body[1])
        except ValueError as exc:
            raise UsageError(f"invalid --random-body: {exc}") from None
        if n_masses < 4:
            raise UsageError("--random-body needs N >= 4")
    else:
        body = _body_from_args(args)
    try:
        reports = canonicity.run_suite(args.seed, args.trials, dict(args.tol), n_masses, scale, body,
                                       args.directions, args.workers)
    except (StepTooSmall, FixtureError, ChartSingular) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "json":
        text = dumps([r.to_dict() for r in reports]) + "\n"
    else:
        fields = ("check_name", "max_residual", "tolerance", "trials", "seed", "passed")
        rows = [",".join(fields)]
        for r in reports:
            d = r.to_dict()
            rows.append(",".join([d["check_name"], fmt(d["max_residual"]), fmt(d["tolerance"]), str(d["trials"]),
                                  str(d["seed"]), "true" if d["passed"] else "false"]))
        text = "\n".join(rows) + "\n"
    _write(args.output, text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _inertia_from_args(args):
    if args.inertia is not None:
        v = args.inertia
        if len(v) == 3:
            I = np.diag(v)
        elif len(v) == 6:
            xx, yy, zz, xy, xz, yz = v
            I = np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])
        elif len(v) == 9:
            I = np.array(v).reshape(3, 3)
        else:
            raise UsageError("--inertia takes 3, 6 or 9 numbers")
        return I
    body = _body_from_args(args)
    if body is None:
        raise UsageError("simulate needs --inertia, --body or --random-body")
    return inertia_tensor(body)


def _trajectory_rows(traj, deviation=None):
    for k in range(len(traj)):
        values = [traj.t[k], *traj.states[k], *traj.M_body[k], traj.H[k]]
        if deviation is not None:
            values.append(deviation[k])
        yield ",".join(fmt(v) for v in values)


def cmd_simulate(args):
    if not args.dt > 0.0:
        raise UsageError("--dt must be positive")
    if not args.t_end >= 0.0:
        raise UsageError("--t-end must be non-negative")
    try:
        spec = HamiltonianSpec(InertiaTensor(_inertia_from_args(args)))
        a0 = AndoyerState(args.l, args.g, args.theta, args.L, args.G, args.Theta)
    except (ValueError, SingularInertia) as exc:
        raise UsageError(str(exc)) from None

    aborted = False
    try:
        traj = integrate(spec, a0, args.t_end, args.dt, args.method)
    except SingularBandReached as exc:
        aborted = True
        traj = exc.trajectory
        print(f"simulate: {exc}", file=sys.stderr)

    header = list(CSV_HEADER)
    deviation = None
    if args.oracle and traj is not None:
        header.append("oracle_dev")
        _, M_oracle = euler_oracle(spec, momentum_vector_body(a0), traj.t[-1], args.dt)
        deviation = np.linalg.norm(traj.M_body - M_oracle[: len(traj)], axis=1)

    lines = [",".join(header)]
    if traj is not None:
        lines.extend(_trajectory_rows(traj, deviation))
    if aborted:
        lines.append("# aborted: singular band")
    _write(args.output, "\n".join(lines) + "\n")
    return EXIT_BAND if aborted else EXIT_OK


def cmd_convert(args):
    if args.direction == "euler-to-andoyer":
        if args.angles is None or args.rates is None:
            raise UsageError("euler-to-andoyer needs --angles and --rates")
        body = _body_from_args(args, required=True)
        angles = np.array(args.angles)
        A = euler_attitude(angles)
        Gvec = angular_momentum(body, A, omega_abs_from_euler(angles, args.rates))
        a = andoyer_from_state(A, Gvec)
        result = {"l": a.l, "g": a.g, "theta": a.theta, "L": a.L, "G": a.G, "Theta": a.Theta}
    else:
        if args.state is None:
            raise UsageError("andoyer-to-euler needs --state l g theta L G Theta")
        try:
            a = AndoyerState(*args.state)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        body = _body_from_args(args)
        A = body_attitude(a)
        angles = euler_angles_from_attitude(A)
        M = momentum_vector_body(a)
        B = euler_kinematic_matrix(angles)
        result = {"angles": angles.tolist(), "momenta": (B.T @ M).tolist()}
        if body is not None:
            omega_body = np.linalg.solve(inertia_tensor(body), M)
            result["rates"] = np.linalg.solve(B, omega_body).tolist()
    _write(args.output, dumps(result) + "\n")
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "simulate": cmd_simulate, "convert": cmd_convert}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ChartSingular, ZeroMomentum) as exc:
        print(f"{args.command}: chart singular: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except np.linalg.LinAlgError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AndoyerError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
