"""Command-line front end; every document printed on stdout is JSON.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 parse
error, 3 constraint violation, 4 numeric event (blow-up, pole, budget).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .exactnum import ComplexRational, ParameterParseError
from .models import (
    BudgetExceededError,
    ConstraintError,
    Family,
    FamilyInstance,
    Related,
    SystemUnavailableError,
    coord_to_str,
    imp_slope_rhs,
    in_fundamental_region_p4,
    orbit_search,
    p2_second_order_rhs,
    parse_coord,
    reduce_to_fundamental_region_p4,
    riccati_curve,
    system_rhs,
    xc_first_integral,
)
from .numverify import (
    DEFAULT_BLOWUP_THRESHOLD,
    DEFAULT_REL_TOL,
    IntegrationSpec,
    PoleOnTrajectory,
    RegionViolation,
    SingularInitialState,
    export_csv,
    integrate,
    log_relation_drift,
)
from .strata import classify, classify_xc
from .symbolic import (
    Contained,
    Conserved,
    ExprSyntaxError,
    quotient_of_partials,
    rf,
    verify_first_integral,
    verify_subvariety,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_CONSTRAINT = 3
EXIT_NUMERIC = 4

STANDARD_WINDOW = (0.0, 0.3)
STANDARD_START = (1.0, 0.5)
DEFAULT_DRIFT_BOUND = 1e-6
DEFAULT_MAX_STEPS = 200


def _emit(obj) -> None:
    print(json.dumps(obj))


def _error(kind: str, message: str, line: int | None = None) -> dict:
    body = {"kind": kind, "message": message}
    if line is not None:
        body["line"] = line
    return {"error": body}


def _split_params(text: str) -> list:
    return [parse_coord(tok) for tok in text.split(",")]


def _split_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ParameterParseError(f"malformed float list {text!r}") from exc


def _params_json(params) -> list[str]:
    return [coord_to_str(p) for p in params]


def _event_json(events) -> list[dict]:
    return [{"kind": e.kind, "t": e.t} for e in events]


# --------------------------------------------------------------------------
# Subcommand handlers.
# --------------------------------------------------------------------------

def _classify_instance(inst: FamilyInstance) -> dict:
    if inst.family is Family.XC:
        return classify_xc(inst.params[0]).to_json_dict()
    return classify(inst).to_json_dict()


def cmd_classify(args) -> int:
    inst = FamilyInstance.from_strings(args.family, args.params.split(","))
    _emit(_classify_instance(inst))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.infile == "-":
        lines = sys.stdin.read().splitlines()
    else:
        with open(args.infile, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    for i, line in enumerate(lines, start=1):
        try:
            pieces = line.split()
            if len(pieces) != 2:
                raise ParameterParseError(
                    "expected '<family> <p1,p2,...>' on each line")
            inst = FamilyInstance.from_strings(pieces[0], pieces[1].split(","))
            _emit(_classify_instance(inst))
        except (ParameterParseError, ExprSyntaxError) as exc:
            _emit(_error("parse", str(exc), line=i))
        except (ConstraintError, SystemUnavailableError) as exc:
            _emit(_error("constraint", str(exc), line=i))
    return EXIT_OK


_RICCATI_FIBER = {"plus": Fraction(1, 2), "minus": Fraction(-1, 2)}


def cmd_verify_riccati(args) -> int:
    signs = ("plus", "minus") if args.sign == "both" else (args.sign,)
    results = []
    all_contained = True
    for sign in signs:
        curve = riccati_curve(sign)
        outcome = verify_subvariety(curve, p2_second_order_rhs(_RICCATI_FIBER[sign]))
        contained = isinstance(outcome, Contained)
        all_contained = all_contained and contained
        results.append({
            "sign": sign,
            "fiber": str(_RICCATI_FIBER[sign]),
            "verdict": "contained" if contained else "not_contained",
            "residual": "0" if contained else str(outcome.residual),
        })
    crossed = {}
    for sign, other in (("plus", "minus"), ("minus", "plus")):
        curve = riccati_curve(sign)
        outcome = verify_subvariety(curve, p2_second_order_rhs(_RICCATI_FIBER[other]))
        crossed[f"{sign}_curve_in_{other}_fiber"] = (
            "0" if isinstance(outcome, Contained) else str(outcome.residual))
    _emit({
        "check": "riccati",
        "verdict": "contained" if all_contained else "not_contained",
        "results": results,
        "crossed_residuals": crossed,
        "settings": {"signs": list(signs)},
    })
    return EXIT_OK if all_contained else EXIT_NEGATIVE


def cmd_verify_integral(args) -> int:
    convention = "one_minus_y" if args.convention == "1-y" else "y_minus_one"
    if args.expr is not None:
        candidate = rf(args.expr, variables=("x", "y"))
    else:
        candidate = xc_first_integral(args.c, convention)
    system = system_rhs(FamilyInstance(Family.XC, (ComplexRational(Fraction(args.c)),)))
    outcome = verify_first_integral(candidate, system.as_map())
    conserved = isinstance(outcome, Conserved)
    _emit({
        "check": "integral",
        "verdict": "conserved" if conserved else "not_conserved",
        "residual": "0" if conserved else str(outcome.residual),
        "settings": {"c": args.c, "convention": convention,
                     "candidate": str(candidate)},
    })
    return EXIT_OK if conserved else EXIT_NEGATIVE


def cmd_verify_qop(args) -> int:
    if args.expr is not None:
        candidate = rf(args.expr, variables=("x", "y"))
    else:
        candidate = xc_first_integral(args.c)
    slope = quotient_of_partials(candidate)
    expected = imp_slope_rhs(args.c)
    residual = slope - expected
    holds = residual.is_zero()
    _emit({
        "check": "qop",
        "verdict": "holds" if holds else "fails",
        "residual": str(residual),
        "settings": {"c": args.c, "candidate": str(candidate),
                     "expected_slope": str(expected)},
    })
    return EXIT_OK if holds else EXIT_NEGATIVE


def cmd_verify_log_relation(args) -> int:
    settings = {
        "c": args.c,
        "t0": args.t0,
        "t1": args.t1,
        "init": list(args.init),
        "rel_tol": args.tol,
        "abs_tol": args.tol,
        "max_drift_allowed": args.max_drift,
    }
    system = system_rhs(FamilyInstance(Family.XC, (ComplexRational(Fraction(args.c)),)))
    spec = IntegrationSpec(system, args.t0, args.t1, args.init,
                           rel_tol=args.tol, abs_tol=args.tol)
    traj = integrate(spec)
    if traj.events:
        _emit({
            "check": "log-relation",
            "verdict": "event",
            "events": _event_json(traj.events),
            "settings": settings,
        })
        return EXIT_NUMERIC
    drift = log_relation_drift(traj, args.c)
    within = drift < args.max_drift
    _emit({
        "check": "log-relation",
        "verdict": "within_tolerance" if within else "exceeds_tolerance",
        "residual": drift,
        "settings": settings,
    })
    return EXIT_OK if within else EXIT_NEGATIVE


def cmd_simulate(args) -> int:
    inst = FamilyInstance.from_strings(args.family, args.params.split(","))
    system = system_rhs(inst)
    spec = IntegrationSpec(system, args.t0, args.t1, args.init,
                           rel_tol=args.tol, abs_tol=args.tol,
                           blowup_threshold=args.blowup_threshold)
    traj = integrate(spec)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            export_csv(traj, fh)
    _emit({
        "family": inst.family.value,
        "params": _params_json(inst.params),
        "samples": len(traj.samples),
        "terminal_time": traj.terminal_time,
        "terminal_state": list(traj.terminal_state),
        "events": _event_json(traj.events),
        "error_estimate": traj.error_estimate,
        "csv": args.out,
        "settings": {"t0": args.t0, "t1": args.t1, "init": list(args.init),
                     "rel_tol": args.tol, "abs_tol": args.tol,
                     "blowup_threshold": args.blowup_threshold},
    })
    return EXIT_NUMERIC if traj.events else EXIT_OK


def cmd_reduce_p4(args) -> int:
    params = _split_params(args.params)
    reduced, word = reduce_to_fundamental_region_p4(params, args.max_steps)
    _emit({
        "input": _params_json(params),
        "output": _params_json(reduced),
        "word": word.names(),
        "steps": len(word),
        "in_region": in_fundamental_region_p4(reduced),
        "settings": {"max_steps": args.max_steps},
    })
    return EXIT_OK


def cmd_orbit(args) -> int:
    family = Family(args.family)
    a = _split_params(args.from_params)
    b = _split_params(args.to_params)
    outcome = orbit_search(a, b, family, args.max_len)
    related = isinstance(outcome, Related)
    _emit({
        "family": family.value,
        "from": _params_json(a),
        "to": _params_json(b),
        "verdict": "related" if related else "unknown",
        "word": outcome.word.names() if related else None,
        "settings": {"max_word_length": args.max_len},
    })
    return EXIT_OK if related else EXIT_NEGATIVE


# --------------------------------------------------------------------------
# Parser wiring.
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="painstrata",
        description="Classify parameter strata and verify the underlying "
                    "differential-algebraic identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify one parameter vector")
    p.add_argument("--family", required=True,
                   choices=[f.value for f in Family])
    p.add_argument("--params", required=True,
                   help="comma-separated parameter strings, e.g. 1/2,3/2 or "
                        "generic; values starting with a dash need the "
                        "--params=-1/2 form")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("sweep", help="classify a batch, one instance per line")
    p.add_argument("--in", dest="infile", required=True,
                   help="input file, or - for stdin; lines read "
                        "'<family> <p1,p2,...>'")
    p.set_defaults(handler=cmd_sweep)

    verify = sub.add_parser("verify", help="run one verification check")
    vsub = verify.add_subparsers(dest="check", required=True)

    p = vsub.add_parser("riccati", help="order-one curve containment in the "
                                        "half-integer second-family fibers")
    p.add_argument("--sign", choices=["plus", "minus", "both"], default="both")
    p.set_defaults(handler=cmd_verify_riccati)

    p = vsub.add_parser("integral", help="exact conservation of the shipped "
                                         "first integral")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--expr", help="candidate in x, y (defaults to the shipped "
                                  "first integral)")
    p.add_argument("--convention", choices=["y-1", "1-y"], default="y-1")
    p.set_defaults(handler=cmd_verify_integral)

    p = vsub.add_parser("qop", help="slope field as a quotient of partials")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--expr", help="candidate in x, y")
    p.set_defaults(handler=cmd_verify_qop)

    p = vsub.add_parser("log-relation", help="numeric log relation for "
                                             "arbitrary real coupling")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--t0", type=float, default=STANDARD_WINDOW[0])
    p.add_argument("--t1", type=float, default=STANDARD_WINDOW[1])
    p.add_argument("--init", type=_split_floats, default=STANDARD_START,
                   help="comma-separated x,y start (default 1,0.5)")
    p.add_argument("--tol", type=float, default=DEFAULT_REL_TOL)
    p.add_argument("--max-drift", type=float, default=DEFAULT_DRIFT_BOUND)
    p.set_defaults(handler=cmd_verify_log_relation)

    p = sub.add_parser("simulate", help="integrate a system and export CSV")
    p.add_argument("--family", required=True,
                   choices=[f.value for f in Family if f is not Family.PVI])
    p.add_argument("--params", required=True)
    p.add_argument("--init", type=_split_floats, required=True)
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_REL_TOL)
    p.add_argument("--blowup-threshold", type=float,
                   default=DEFAULT_BLOWUP_THRESHOLD)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("reduce-p4", help="reduce into the fundamental region")
    p.add_argument("--params", required=True)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(handler=cmd_reduce_p4)

    p = sub.add_parser("orbit", help="breadth-first orbit search")
    p.add_argument("--family", required=True, choices=["p3", "p4"])
    p.add_argument("--from", dest="from_params", required=True)
    p.add_argument("--to", dest="to_params", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(handler=cmd_orbit)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ParameterParseError, ExprSyntaxError) as exc:
        _emit(_error("parse", str(exc)))
        return EXIT_PARSE
    except (ConstraintError, SystemUnavailableError) as exc:
        _emit(_error("constraint", str(exc)))
        return EXIT_CONSTRAINT
    except BudgetExceededError as exc:
        _emit(_error("numeric", f"{exc}; partial word "
                                f"{exc.partial_word.names()}"))
        return EXIT_NUMERIC
    except (SingularInitialState, PoleOnTrajectory, RegionViolation) as exc:
        _emit(_error("numeric", str(exc)))
        return EXIT_NUMERIC
    except ValueError as exc:
        _emit(_error("constraint", str(exc)))
        return EXIT_CONSTRAINT


if __name__ == "__main__":
    sys.exit(main())
