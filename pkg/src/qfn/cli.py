"""Command-line front end.

Four subcommands over the JSON network description format:

* ``qfn validate <file>``  -- per-component parameter checks plus
  star-unitarity of the open-loop coefficient matrix;
* ``qfn reduce <file> --output <out.json>``  -- eliminate the wired internal
  channels and write the reduced model (same schema, no connections);
* ``qfn check [<file>] --seed S --trials N``  -- seeded random-instance
  verification of the embedding identities, feedback star-unitarity, the
  involution identity, and the Siegel factorizations;
* ``qfn simulate <model> --rho0 <state.json> --t T --dt DT``  -- propagate a
  density matrix under the model's master equation.

Every command prints a single JSON report to stdout.  Reports are built
deterministically (fixed key order, repr-round-trip floats), so identical
inputs and seeds give byte-identical output.  Exit codes: 0 pass,
1 validation failure, 2 algebraic loop / domain failure, 3 parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import netspec
from .belavkin import from_slh, is_star_unitary, validate_slh
from .dynamics import evolve, lindblad_generator
from .errors import (
    AlgebraicLoop,
    DimensionMismatch,
    InvalidPartition,
    InvalidState,
    NotHermitian,
    NotStarUnitary,
    NotUnitaryScattering,
    ParseError,
    QfnError,
)
from .network import Wiring, domain_check, feedback_reduce, involution_identity_defect, siegel_defects
from .opmatrix import norm_inf
from .belavkin import ito_correspondence_defects
from .sampling import make_rng, random_contraction, random_ito, random_slh, random_unitary

EXIT_PASS = 0
EXIT_VALIDATION = 1
EXIT_DOMAIN = 2
EXIT_PARSE = 3

# Conditioning floor used when drawing random gains for `check`: instances
# whose loop matrix is this ill-conditioned are resampled, since defect
# amplification there reflects floating point, not the identities.
CHECK_RCOND_FLOOR = 1e-4


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, indent=2) + "\n")


def _labels_json(labels) -> list:
    return [list(lab) if isinstance(lab, tuple) else lab for lab in labels]


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    spec = netspec.parse(args.file)
    tol = args.tol if args.tol is not None else spec.options.tol
    d = spec.initial_dim
    comp_reports = {}
    all_pass = True
    for c in spec.components:
        diag = validate_slh(c.S, c.L, c.H, d, tol=tol)
        comp_reports[c.name] = {
            "s_left": float(diag.s_left_defect),
            "s_right": float(diag.s_right_defect),
            "h_hermiticity": float(diag.h_defect),
            "pass": bool(diag.passed),
        }
        all_pass = all_pass and diag.passed
    open_loop, _ = netspec.build(spec, tol=tol, validate=False)
    rep = is_star_unitary(from_slh(open_loop, validate=False), tol)
    all_pass = all_pass and rep.passed
    report = {
        "command": "validate",
        "inputs": {"file": args.file, "tol": tol},
        "defects": {
            "components": comp_reports,
            "open_loop_star_left": float(rep.left_defect),
            "open_loop_star_right": float(rep.right_defect),
        },
        "rcond": None,
        "pass": bool(all_pass),
    }
    _emit(report)
    return EXIT_PASS if all_pass else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------


def cmd_reduce(args) -> int:
    spec = netspec.parse(args.file)
    tol = args.tol if args.tol is not None else spec.options.tol
    open_loop, wiring = netspec.build(spec, tol=tol)
    if wiring is None:
        raise InvalidPartition("the description declares no connections; nothing to reduce")
    v = from_slh(open_loop)
    model = feedback_reduce(v, wiring, tol)
    rep = model.report
    defects = {
        "star_left": float(rep.star_unitarity.left_defect),
        "star_right": float(rep.star_unitarity.right_defect),
        "involution": None if rep.involution_defect is None else float(rep.involution_defect),
    }
    passed = rep.star_unitarity.passed and (
        rep.involution_defect is None or rep.involution_defect <= tol * rep.star_unitarity.scale
    )
    written = None
    if model.slh_red is not None and args.output:
        out_spec = netspec.reduced_spec(model.slh_red, spec.initial_dim, spec.options)
        netspec.write(out_spec, args.output)
        written = args.output
    report = {
        "command": "reduce",
        "inputs": {"file": args.file, "tol": tol},
        "defects": defects,
        "rcond": float(rep.rcond),
        "gain_unitary": bool(rep.x_unitary),
        "output_pairs": [
            [_labels_json([a])[0], _labels_json([b])[0]] for a, b in rep.output_pairs
        ],
        "output": written,
        "pass": bool(passed and model.slh_red is not None),
    }
    _emit(report)
    return EXIT_PASS if report["pass"] else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _draw_wiring(rng, v, channels, n_internal, unitary):
    """Draw a symmetric wiring whose loop matrix is comfortably invertible."""
    for _ in range(200):
        picks = rng.choice(len(channels), size=n_internal, replace=False)
        internal = tuple(channels[int(k)] for k in sorted(picks))
        gain = random_unitary(rng, n_internal) if unitary else random_contraction(rng, n_internal)
        w = Wiring(internal, internal, gain)
        if domain_check(v, w).rcond >= CHECK_RCOND_FLOOR:
            return w
    raise AlgebraicLoop("could not draw a well-conditioned wiring in 200 attempts")


def _check_trial(rng, v, channels, n_internal, defects, rconds, trial):
    """One verification round on a fixed star-unitary matrix."""
    unitary_gain = trial % 2 == 0
    w = _draw_wiring(rng, v, channels, n_internal, unitary=True)
    model = feedback_reduce(v, w)
    defects["feedback_unitarity_left"].append(model.report.star_unitarity.left_defect)
    defects["feedback_unitarity_right"].append(model.report.star_unitarity.right_defect)
    rconds.append(model.report.rcond)
    w_inv = w if unitary_gain else _draw_wiring(rng, v, channels, n_internal, unitary=False)
    defects["involution"].append(involution_identity_defect(v, w_inv))
    x = random_contraction(rng, n_internal)
    y = random_contraction(rng, n_internal)
    s_left, s_right = siegel_defects(v, w, x, y)
    defects["siegel_left"].append(s_left)
    defects["siegel_right"].append(s_right)


def cmd_check(args) -> int:
    rng = make_rng(args.seed)
    defects = {
        "ito_product": [],
        "ito_plain": [],
        "ito_adjoint": [],
        "feedback_unitarity_left": [],
        "feedback_unitarity_right": [],
        "involution": [],
        "siegel_left": [],
        "siegel_right": [],
    }
    rconds = []
    fixed = None
    tol = args.tol
    if args.file is not None:
        spec = netspec.parse(args.file)
        tol = args.tol if args.tol is not None else spec.options.tol
        open_loop, wiring = netspec.build(spec, tol=tol)
        if wiring is None:
            raise InvalidPartition("check on a file needs connections to define the internal set")
        fixed = (from_slh(open_loop), open_loop.channels, wiring.n_internal)
        source = args.file
    else:
        source = "builtin"
    tol = 1e-9 if tol is None else tol

    for trial in range(args.trials):
        if fixed is None:
            n = int(rng.integers(2, 5))
            d = int(rng.integers(1, 4))
            g = random_slh(rng, n, d)
            v = from_slh(g)
            channels = g.channels
            n_internal = int(rng.integers(1, n))
        else:
            v, channels, n_internal = fixed
            n, d = len(channels), v.d
        d1, d2, d3 = ito_correspondence_defects(random_ito(rng, n, d), random_ito(rng, n, d))
        defects["ito_product"].append(d1)
        defects["ito_plain"].append(d2)
        defects["ito_adjoint"].append(d3)
        _check_trial(rng, v, channels, n_internal, defects, rconds, trial)

    max_defects = {k: float(max(vals)) for k, vals in defects.items()}
    passed = all(val <= tol for val in max_defects.values())
    report = {
        "command": "check",
        "inputs": {"source": source, "seed": args.seed, "trials": args.trials, "tol": tol},
        "defects": max_defects,
        "rcond": float(min(rconds)) if rconds else None,
        "pass": bool(passed),
    }
    _emit(report)
    return EXIT_PASS if passed else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    spec = netspec.parse(args.model)
    tol = args.tol if args.tol is not None else spec.options.tol
    open_loop, wiring = netspec.build(spec, tol=tol)
    if wiring is not None:
        from .network import reduced_slh

        model = reduced_slh(from_slh(open_loop), wiring, tol)
    else:
        model = open_loop
    rho0 = netspec.parse_state(args.rho0, spec.initial_dim)
    gen = lindblad_generator(model)
    result = evolve(rho0, gen, args.t, args.dt)
    herm = norm_inf(result.rho - result.rho.conj().T)
    passed = result.trace_drift <= max(tol, 1e-10) and herm <= max(tol, 1e-10)
    report = {
        "command": "simulate",
        "inputs": {"model": args.model, "rho0": args.rho0, "t": args.t, "dt": args.dt, "tol": tol},
        "defects": {
            "trace_drift": float(result.trace_drift),
            "hermiticity": float(herm),
        },
        "rcond": None,
        "steps": int(result.steps),
        "min_eigenvalue": float(result.min_eigenvalue),
        "final_state": netspec.matrix_pairs(result.rho),
        "pass": bool(passed),
    }
    _emit(report)
    return EXIT_PASS if passed else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qfn",
        description="Assemble, reduce, and verify quantum feedback network models.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("validate", help="check component parameters and open-loop star-unitarity")
    pv.add_argument("file")
    pv.add_argument("--tol", type=float, default=None, help="pass/fail tolerance (default: file options)")
    pv.set_defaults(func=cmd_validate)

    pr = sub.add_parser("reduce", help="eliminate wired internal channels and write the reduced model")
    pr.add_argument("file")
    pr.add_argument("--output", default=None, help="path for the reduced model file")
    pr.add_argument("--tol", type=float, default=None)
    pr.set_defaults(func=cmd_reduce)

    pc = sub.add_parser("check", help="seeded random verification of the structural identities")
    pc.add_argument("file", nargs="?", default=None, help="network file providing the fixed instance")
    pc.add_argument("--builtin", action="store_true", help="use internally generated instances")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--trials", type=int, default=100)
    pc.add_argument("--tol", type=float, default=None)
    pc.set_defaults(func=cmd_check)

    ps = sub.add_parser("simulate", help="propagate a density matrix under the model's master equation")
    ps.add_argument("model")
    ps.add_argument("--rho0", required=True, help="initial state file")
    ps.add_argument("--t", type=float, required=True)
    ps.add_argument("--dt", type=float, required=True)
    ps.add_argument("--tol", type=float, default=None)
    ps.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        _emit({"command": args.command, "error": str(exc), "pass": False})
        return EXIT_PARSE
    except AlgebraicLoop as exc:
        _emit({"command": args.command, "error": str(exc), "rcond": float(exc.rcond), "pass": False})
        return EXIT_DOMAIN
    except InvalidPartition as exc:
        _emit({"command": args.command, "error": str(exc), "pass": False})
        return EXIT_DOMAIN
    except (NotUnitaryScattering, NotHermitian, NotStarUnitary, InvalidState, DimensionMismatch) as exc:
        _emit({"command": args.command, "error": str(exc), "pass": False})
        return EXIT_VALIDATION
    except QfnError as exc:
        _emit({"command": args.command, "error": str(exc), "pass": False})
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
