#!/usr/bin/env python3
"""Run the full identity battery and print one line per check.

Covers: both signed order-one curves against their half-integer fibers (plus
the crossed pairings, whose residual is the constant 1), exact conservation
and the quotient-of-partials identity for integer coupling 0..5, the numeric
conservation drift, and the log relation for an irrational coupling.

Exits nonzero if any check fails.
"""

import math
import sys
from fractions import Fraction

from painstrata.exactnum import ComplexRational
from painstrata.models import (
    Family,
    FamilyInstance,
    SystemRHS,
    imp_slope_rhs,
    p2_second_order_rhs,
    riccati_curve,
    system_rhs,
    xc_first_integral,
)
from painstrata.numverify import (
    IntegrationSpec,
    conservation_drift,
    integrate,
    log_relation_drift,
    residual_second_order,
)
from painstrata.symbolic import (
    Contained,
    Conserved,
    quotient_of_partials,
    verify_first_integral,
    verify_subvariety,
)

STANDARD_WINDOW = (0.0, 0.3)
STANDARD_START = (1.0, 0.5)


def check(label: str, ok: bool, detail: str = "") -> bool:
    state = "ok  " if ok else "FAIL"
    print(f"[{state}] {label}" + (f"  ({detail})" if detail else ""))
    return ok


def main() -> int:
    ok = True

    for sign, alpha in (("plus", Fraction(1, 2)), ("minus", Fraction(-1, 2))):
        curve = riccati_curve(sign)
        outcome = verify_subvariety(curve, p2_second_order_rhs(alpha))
        ok &= check(f"curve {sign} contained in fiber {alpha}",
                    isinstance(outcome, Contained))
        crossed = verify_subvariety(curve, p2_second_order_rhs(-alpha))
        residual = "0" if isinstance(crossed, Contained) else str(crossed.residual)
        ok &= check(f"curve {sign} against fiber {-alpha} leaves residual",
                    residual in ("1", "-1"), f"residual {residual}")

        system = SystemRHS(Family.PII, ("y",), (curve.rhs,))
        traj = integrate(IntegrationSpec(system, 0.0, 0.5, (1.0,)))
        res = residual_second_order(traj, curve, p2_second_order_rhs(alpha))
        ok &= check(f"numeric residual for {sign} curve", res < 1e-8,
                    f"max {res:.2e}")

    for c in range(0, 6):
        F = xc_first_integral(c)
        field = system_rhs(FamilyInstance(Family.XC,
                                          (ComplexRational(Fraction(c)),)))
        conserved = verify_first_integral(F, field.as_map())
        ok &= check(f"c={c}: first integral conserved exactly",
                    isinstance(conserved, Conserved))
        ok &= check(f"c={c}: slope field is the quotient of partials",
                    quotient_of_partials(F) == imp_slope_rhs(c))

    sys2 = system_rhs(FamilyInstance(Family.XC, (ComplexRational(Fraction(2)),)))
    traj = integrate(IntegrationSpec(sys2, *STANDARD_WINDOW, STANDARD_START))
    drift = conservation_drift(traj, xc_first_integral(2))
    ok &= check("numeric conservation drift (c=2)", drift < 1e-6,
                f"max {drift:.2e}")

    root2 = math.sqrt(2)
    sys_r = system_rhs(FamilyInstance(Family.XC,
                                      (ComplexRational(Fraction(root2)),)))
    traj = integrate(IntegrationSpec(sys_r, *STANDARD_WINDOW, STANDARD_START))
    ldrift = log_relation_drift(traj, root2)
    ok &= check("log relation for c = sqrt(2)", ldrift < 1e-6,
                f"max {ldrift:.2e}")

    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
