"""Command-line front end.

Exit codes: 0 success, 1 input/parse error, 2 validation or singularity
error, 3 numerical divergence.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from .canonical import propagate_lambda1
from .errors import ArgumentError, DivergenceError, SingularityError, ValidationError
from .hamiltonian import hamiltonian_from_dict, spec_omega_squared
from .states import apply_ct, random_valid_state, state_from_dict
from .uncertainty import (
    MINIMALITY_TOL,
    analyze,
    characteristic_margins,
    robertson_margin,
    robertson_minimality,
    symplectic_sigma_test,
    williamson,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VALIDATION = 2
EXIT_DIVERGENCE = 3


class InvalidState(Exception):
    def __init__(self, report):
        super().__init__("invalid state")
        self.report = report


def fmt(x):
    return format(float(x), ".17g")


def _load_json(path, what):
    if path is None:
        raise ArgumentError(f"--{what} is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ArgumentError(f"cannot read {what} file {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"invalid JSON in {path!r}: {exc}") from None


def _load_hamiltonian(args):
    return hamiltonian_from_dict(_load_json(args.config, "config"))


def _load_state(args):
    report = state_from_dict(_load_json(args.state, "state"))
    if not report.ok:
        raise InvalidState(report)
    return report.state


def _window(args):
    if args.t0 is None or args.t1 is None:
        raise ArgumentError("--t0 and --t1 are required")
    if not args.t1 > args.t0:
        raise ArgumentError("--t1 must exceed --t0")
    if args.samples < 2:
        raise ArgumentError("--samples must be at least 2")
    return args.t0, args.t1


def _write(args, text):
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def cmd_omega(args):
    spec = _load_hamiltonian(args)
    t0, t1 = _window(args)
    rows = [(t, spec_omega_squared(spec, t)) for t in np.linspace(t0, t1, args.samples)]
    _write(args, _csv(["t", "omega2"], rows))


def cmd_propagate(args):
    spec = _load_hamiltonian(args)
    t0, t1 = _window(args)
    res = propagate_lambda1(spec, t0, t1, args.step, args.samples)
    dim = 2 * spec.modes
    header = ["t"] + [f"L[{i}][{j}]" for i in range(dim) for j in range(dim)] + ["defect"]
    rows = [
        [t, *L.matrix.ravel(), L.defect] for t, L in zip(res.times, res.lambdas)
    ]
    _write(args, _csv(header, rows))
    print(
        f"final defect {res.final.defect:.3e} (max raw {res.max_defect:.3e},"
        f" corrected={res.corrected})",
        file=sys.stderr,
    )


def cmd_evolve_state(args):
    spec = _load_hamiltonian(args)
    state = _load_state(args)
    if state.modes != spec.modes:
        raise ArgumentError(f"state has {state.modes} modes, Hamiltonian has {spec.modes}")
    t0, t1 = _window(args)
    res = propagate_lambda1(spec, t0, t1, args.step, args.samples)
    n = spec.modes
    header = (
        ["t"]
        + [f"s_{k + 1}" for k in range(2 * n)]
        + ["det_sigma", "robertson_margin"]
        + [f"nu_{k + 1}" for k in range(n)]
        + ["defect"]
    )
    rows = []
    for t, L in zip(res.times, res.lambdas):
        st = apply_ct(state, L)
        rows.append(
            [
                t,
                *np.diag(st.cov),
                np.linalg.det(st.cov),
                robertson_margin(st),
                *williamson(st).nu,
                L.defect,
            ]
        )
    _write(args, _csv(header, rows))


def cmd_analyze(args):
    state = _load_state(args)
    report = analyze(state)
    d = report.to_dict()
    if args.tol is not None:
        d["minimal"] = robertson_minimality(state, args.tol).minimal
    _write(args, _json(d))


def cmd_williamson(args):
    state = _load_state(args)
    w = williamson(state)
    out = {
        "nu": [float(x) for x in w.nu],
        "S": w.S.matrix.tolist(),
        "residual": w.residual(state),
        "defect": w.S.defect,
    }
    _write(args, _json(out))


def random_audit(modes, samples, seed, tol=1e-9, minimal_tol=MINIMALITY_TOL):
    """Audit the uncertainty hierarchy on random pure and mixed states.

    Even sample indices draw pure states, odd ones mixed. Each sample uses
    its own generator seeded by ``(seed, index)``.
    """
    if modes < 1 or samples < 1:
        raise ArgumentError("--modes and --samples must be positive")
    min_margins = np.full(2 * modes, np.inf)
    violations = 0
    worst_pure = 0.0
    for i in range(samples):
        purity = "pure" if i % 2 == 0 else "mixed"
        st = random_valid_state(modes, np.random.default_rng([seed, i]), purity)
        margins = characteristic_margins(st)
        min_margins = np.minimum(min_margins, margins)
        minimal = robertson_minimality(st, minimal_tol).minimal
        bad = bool(np.any(margins < -tol))
        bad |= minimal != (purity == "pure")
        if purity == "pure":
            defect = symplectic_sigma_test(st).defect
            worst_pure = max(worst_pure, defect)
            bad |= defect > minimal_tol
        violations += int(bad)
    return {
        "modes": modes,
        "samples": samples,
        "seed": seed,
        "min_margin_per_order": [float(x) for x in min_margins],
        "violations": violations,
        "worst_sympl_defect_pure": worst_pure,
    }


def cmd_random_audit(args):
    if args.seed is None:
        raise ArgumentError("--seed is required for random-audit")
    tol = 1e-9 if args.tol is None else args.tol
    _write(args, _json(random_audit(args.modes, args.samples, args.seed, tol)))


COMMANDS = {
    "omega": cmd_omega,
    "propagate": cmd_propagate,
    "evolve-state": cmd_evolve_state,
    "analyze": cmd_analyze,
    "williamson": cmd_williamson,
    "random-audit": cmd_random_audit,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Hamiltonian JSON file")
    common.add_argument("--state", help="state JSON file")
    common.add_argument("--t0", type=float, default=None)
    common.add_argument("--t1", type=float, default=None)
    common.add_argument("--step", type=float, default=None, help="RK4 step (default (t1-t0)/1e4)")
    common.add_argument("--samples", type=int, default=101)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--modes", type=int, default=1)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--tol", type=float, default=None)

    parser = argparse.ArgumentParser(
        prog="quadsym",
        description="Symplectic propagation and uncertainty audits for quadratic Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "omega": "tabulate the auxiliary-oscillator frequency squared (one mode)",
        "propagate": "integrate the canonical-transformation matrix, CSV trajectory",
        "evolve-state": "transport a state's covariance along the propagator",
        "analyze": "uncertainty report for a state",
        "williamson": "symplectic eigenvalues and diagonalizing matrix",
        "random-audit": "check the uncertainty hierarchy on random states",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        COMMANDS[args.command](args)
    except InvalidState as exc:
        print(json.dumps(exc.report.to_dict(), indent=2), file=sys.stderr)
        return EXIT_VALIDATION
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (SingularityError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
