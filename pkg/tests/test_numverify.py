"""Integrator accuracy, residual/drift checks, events and CSV export."""

import io
import math
from fractions import Fraction

import pytest

from painstrata.exactnum import ComplexRational
from painstrata.models import Family, FamilyInstance, SystemRHS, riccati_curve, \
    p2_second_order_rhs, system_rhs, xc_first_integral
from painstrata.numverify import (
    BLOWUP,
    IntegrationSpec,
    POLE_PROXIMITY,
    PoleOnTrajectory,
    RegionViolation,
    SingularInitialState,
    Trajectory,
    conservation_drift,
    export_csv,
    integrate,
    log_relation_drift,
    residual_second_order,
)
from painstrata.symbolic import DiffVar, rf

CR = ComplexRational


def one_dim(text: str) -> SystemRHS:
    return SystemRHS(Family.XC, ("y",), (rf(text, variables=("y",)),))


def xc_system(c) -> SystemRHS:
    return system_rhs(FamilyInstance(Family.XC, (CR(Fraction(c)),)))


class TestIntegrator:
    def test_exponential_oracle(self):
        traj = integrate(IntegrationSpec(one_dim("y"), 0.0, 1.0, (1.0,)))
        assert traj.completed
        assert abs(traj.terminal_state[0] - math.e) < 1e-8

    def test_logistic_style_oracle(self):
        # y' = -y^2 from y(0) = 1 solves to 1/(1+t)
        traj = integrate(IntegrationSpec(one_dim("-y^2"), 0.0, 0.5, (1.0,)))
        assert abs(traj.terminal_state[0] - 1 / 1.5) < 1e-9

    def test_xc_standard_window_completes(self):
        traj = integrate(IntegrationSpec(xc_system(2), 0.0, 0.3, (1.0, 0.5)))
        assert traj.completed
        assert traj.samples[0] == (0.0, (1.0, 0.5))
        ts = [t for t, _ in traj.samples]
        assert ts == sorted(ts)

    def test_riccati_window_completes(self):
        traj = integrate(IntegrationSpec(one_dim("-y^2 - t/2"), 0.0, 0.5, (1.0,)))
        assert traj.completed

    def test_p2_blowup_event(self):
        sys = system_rhs(FamilyInstance(Family.PII, (CR(Fraction(0)),)))
        traj = integrate(IntegrationSpec(sys, 0.0, 2.0, (2.0, 0.0)))
        assert traj.events and traj.events[-1].kind == BLOWUP
        assert traj.events[-1].t < 2.0

    def test_blowup_time_stable_under_tolerance_halving(self):
        sys = system_rhs(FamilyInstance(Family.PII, (CR(Fraction(0)),)))
        a = integrate(IntegrationSpec(sys, 0.0, 2.0, (2.0, 0.0)))
        b = integrate(IntegrationSpec(sys, 0.0, 2.0, (2.0, 0.0),
                                      rel_tol=5e-11, abs_tol=5e-11))
        assert abs(a.events[-1].t - b.events[-1].t) < 1e-3

    def test_self_consistency_estimate(self):
        spec = IntegrationSpec(one_dim("-y^2 - t/2"), 0.0, 0.5, (1.0,))
        traj = integrate(spec)
        half = integrate(IntegrationSpec(one_dim("-y^2 - t/2"), 0.0, 0.5, (1.0,),
                                         rel_tol=5e-11, abs_tol=5e-11))
        diff = abs(traj.terminal_state[0] - half.terminal_state[0])
        assert diff < 10 * traj.error_estimate

    def test_time_reversal_sanity(self):
        sys = xc_system(2)
        fwd = integrate(IntegrationSpec(sys, 0.0, 0.3, (1.0, 0.5)))
        back = integrate(IntegrationSpec(sys.reversed(), 0.0, 0.3,
                                         fwd.terminal_state))
        assert fwd.completed and back.completed
        assert max(abs(a - b) for a, b in
                   zip(back.terminal_state, (1.0, 0.5))) < 1e-7

    def test_pole_approach_is_event_not_error(self):
        # x' < 0 while y < 2/3 drives x toward 0 where y' blows up
        traj = integrate(IntegrationSpec(xc_system(2), 0.0, 2.0, (0.05, 0.5)))
        assert traj.events
        assert {e.kind for e in traj.events} <= {BLOWUP, POLE_PROXIMITY}

    def test_singular_initial_state(self):
        with pytest.raises(SingularInitialState):
            integrate(IntegrationSpec(xc_system(2), 0.0, 0.3, (0.0, 0.5)))

    def test_window_may_not_contain_fixed_singularity(self):
        sys = system_rhs(FamilyInstance(Family.PIII, (CR(Fraction(0)),) * 2))
        with pytest.raises(ValueError, match="singularity"):
            IntegrationSpec(sys, -1.0, 1.0, (1.0, 1.0))
        IntegrationSpec(sys, 0.5, 1.0, (1.0, 1.0))  # fine

    def test_free_parameters_rejected(self):
        from painstrata.models import SpecialValue
        sys = system_rhs(FamilyInstance(Family.PII, (SpecialValue.GENERIC,)))
        with pytest.raises(ValueError, match="symbolic parameters"):
            IntegrationSpec(sys, 0.0, 1.0, (1.0, 0.0))

    def test_tolerance_validation(self):
        with pytest.raises(ValueError):
            IntegrationSpec(one_dim("y"), 0.0, 1.0, (1.0,), rel_tol=0.0)
        with pytest.raises(ValueError):
            IntegrationSpec(one_dim("y"), 1.0, 0.0, (1.0,))


class TestResiduals:
    def run_riccati(self, sign: str):
        text = "y^2 + t/2" if sign == "plus" else "-y^2 - t/2"
        system = one_dim(text)
        if sign == "plus":
            # the growing branch blows up quickly; keep a short window
            return integrate(IntegrationSpec(system, 0.0, 0.2, (0.1,)))
        return integrate(IntegrationSpec(system, 0.0, 0.5, (1.0,)))

    def test_matched_residual_small(self):
        traj = self.run_riccati("minus")
        res = residual_second_order(traj, riccati_curve("minus"),
                                    p2_second_order_rhs(Fraction(-1, 2)))
        assert res < 1e-8
        assert traj.residuals is not None
        assert traj.max_residual == res

    def test_crossed_residual_is_one(self):
        traj = self.run_riccati("minus")
        res = residual_second_order(traj, riccati_curve("minus"),
                                    p2_second_order_rhs(Fraction(1, 2)))
        assert abs(res - 1.0) < 1e-9

    def test_plus_branch_matches_its_fiber(self):
        traj = self.run_riccati("plus")
        res = residual_second_order(traj, riccati_curve("plus"),
                                    p2_second_order_rhs(Fraction(1, 2)))
        assert res < 1e-8

    def test_trajectory_must_match_curve(self):
        traj = integrate(IntegrationSpec(xc_system(2), 0.0, 0.3, (1.0, 0.5)))
        with pytest.raises(ValueError):
            residual_second_order(traj, riccati_curve("minus"),
                                  p2_second_order_rhs(Fraction(-1, 2)))


class TestDrift:
    def test_conserved_candidate(self):
        traj = integrate(IntegrationSpec(xc_system(2), 0.0, 0.3, (1.0, 0.5)))
        F = xc_first_integral(2)
        env = {DiffVar("x", 0): Fraction(1), DiffVar("y", 0): Fraction(1, 2)}
        assert F.evaluate(env) == Fraction(-1, 8)
        assert conservation_drift(traj, F) < 1e-6

    def test_non_conserved_candidate(self):
        traj = integrate(IntegrationSpec(xc_system(2), 0.0, 0.3, (1.0, 0.5)))
        drift = conservation_drift(traj, rf("y", variables=("x", "y")))
        assert drift > 1e-3  # y moves away from 1/2 on this window

    def test_pole_on_trajectory(self):
        traj = Trajectory(("x", "y"), [(0.0, (1.0, 0.5)), (0.1, (0.0, 0.4))])
        with pytest.raises(PoleOnTrajectory):
            conservation_drift(traj, xc_first_integral(2))

    def test_log_relation_integer_agreement(self):
        for c in range(1, 6):
            sys = xc_system(c)
            t1 = integrate(IntegrationSpec(sys, 0.0, 0.3, (1.0, 0.5)))
            t2 = integrate(IntegrationSpec(sys, 0.0, 0.3, (1.0, 0.5)))
            assert conservation_drift(t1, xc_first_integral(c)) < 1e-6
            assert log_relation_drift(t2, float(c)) < 1e-6

    def test_log_relation_irrational(self):
        c = math.sqrt(2)
        traj = integrate(IntegrationSpec(xc_system(c), 0.0, 0.3, (1.0, 0.5)))
        assert log_relation_drift(traj, c) < 1e-6

    def test_region_violation(self):
        traj = Trajectory(("x", "y"), [(0.0, (1.0, 2.0))])
        with pytest.raises(RegionViolation):
            log_relation_drift(traj, 2.0)
        traj = Trajectory(("x", "y"), [(0.0, (-1.0, 0.5))])
        with pytest.raises(RegionViolation):
            log_relation_drift(traj, 2.0)


class TestExport:
    def test_csv_layout(self):
        traj = integrate(IntegrationSpec(xc_system(2), 0.0, 0.3, (1.0, 0.5)))
        conservation_drift(traj, xc_first_integral(2))
        buf = io.StringIO()
        export_csv(traj, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "t,x,y,residual,drift"
        assert len(lines) == 1 + len(traj.samples)
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == 1.0
        assert first[3] == ""  # residual never computed
        assert float(first[4]) == 0.0

    def test_csv_event_comment(self):
        sys = system_rhs(FamilyInstance(Family.PII, (CR(Fraction(0)),)))
        traj = integrate(IntegrationSpec(sys, 0.0, 2.0, (2.0, 0.0)))
        buf = io.StringIO()
        export_csv(traj, buf)
        tail = buf.getvalue().splitlines()[-1]
        assert tail.startswith("# event BlowUp t=")
