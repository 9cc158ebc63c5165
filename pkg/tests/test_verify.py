import math

import numpy as np
import pytest

from genvi import (
    AveragedConfig,
    OneStepMap,
    PhaseState,
    adjoint_defect,
    convergence_order,
    cubic_oscillator,
    cubic_perturbation,
    energy,
    energy_error_sweep,
    exact_dl_ho_map,
    ho_exact_flow,
    stormer_verlet,
    symmetric_compose,
    symmetry_defect,
    symplecticity_defect,
)
from genvi.averaged import averaged_right_hamiltonian, ho_exact_discrete_right_hamiltonian, ho_flow_map
from genvi.taylor_vi import euler_a, euler_a_right_hamiltonian, explicit_euler
from genvi.verify import sv_reference


H_LADDER = [0.1, 0.05, 0.025]


class TestConvergenceOrder:
    def test_euler_a_first_order(self, ho):
        res = convergence_order(euler_a(ho), ho_exact_flow, PhaseState(1.0, 0.0), 1.0, H_LADDER)
        assert res.slope == pytest.approx(1.0, abs=0.15)
        assert not res.degenerate

    def test_stormer_verlet_second_order(self, ho):
        res = convergence_order(stormer_verlet(ho), ho_exact_flow, PhaseState(1.0, 0.0), 1.0, H_LADDER)
        assert res.slope == pytest.approx(2.0, abs=0.15)

    def test_exact_method_degenerate(self):
        res = convergence_order(exact_dl_ho_map(), ho_exact_flow, PhaseState(1.0, 0.0), 1.0, H_LADDER)
        assert res.degenerate
        assert max(res.errors) <= 1e-12

    def test_slope_invariant_under_h_order(self, ho):
        fwd = convergence_order(euler_a(ho), ho_exact_flow, PhaseState(1.0, 0.0), 1.0, H_LADDER)
        rev = convergence_order(euler_a(ho), ho_exact_flow, PhaseState(1.0, 0.0), 1.0, H_LADDER[::-1])
        assert abs(fwd.slope - rev.slope) <= 1e-12

    def test_non_dividing_step_rejected(self, ho):
        with pytest.raises(ValueError, match="divide"):
            convergence_order(euler_a(ho), ho_exact_flow, PhaseState(1.0, 0.0), 1.0, [0.1, 0.05, 0.03])

    def test_needs_three_steps(self, ho):
        with pytest.raises(ValueError):
            convergence_order(euler_a(ho), ho_exact_flow, PhaseState(1.0, 0.0), 1.0, [0.1, 0.05])


class TestSymplecticityDefect:
    def test_euler_a(self, ho):
        assert symplecticity_defect(euler_a(ho), PhaseState(0.7, -0.2), 0.1) <= 1e-7

    def test_exact_rotation(self):
        assert symplecticity_defect(ho_flow_map(), PhaseState(0.7, -0.2), 0.1) <= 1e-9

    def test_explicit_euler_control(self, ho):
        assert symplecticity_defect(explicit_euler(ho), PhaseState(0.7, -0.2), 0.1) >= 1e-3


class TestSymmetryDefect:
    def test_stormer_verlet(self, cubic):
        assert symmetry_defect(stormer_verlet(cubic), PhaseState(1.0, 0.0), 0.1) <= 1e-10

    def test_euler_a_asymmetric(self, cubic):
        assert symmetry_defect(euler_a(cubic), PhaseState(1.0, 0.0), 0.1) >= 1e-4

    def test_symmetrized_euler_a(self, cubic):
        flow = symmetric_compose(euler_a(cubic))
        assert symmetry_defect(flow, PhaseState(1.0, 0.0), 0.2) <= 1e-9


class TestAdjointDefect:
    def test_euler_a_function(self, ho):
        assert adjoint_defect(euler_a_right_hamiltonian(ho), PhaseState(1.0, 0.0), 0.1) <= 1e-9

    def test_exact_right_hamiltonian(self):
        assert adjoint_defect(ho_exact_discrete_right_hamiltonian(), PhaseState(1.0, 0.0), 0.3) <= 1e-9

    def test_averaged_right_hamiltonian(self):
        genfn = averaged_right_hamiltonian(AveragedConfig(epsilon=0.1), cubic_perturbation())
        assert adjoint_defect(genfn, PhaseState(1.0, 0.0), 0.3) <= 1e-8


class TestEnergyErrorSweep:
    def test_exact_method_clean_off_resonance(self, ho):
        res = energy_error_sweep(
            exact_dl_ho_map(), lambda s: energy(ho, s), PhaseState(0.3, 0.7), 10000.0, [1.0])
        assert res.metric_at(1.0) <= 1e-9
        assert res.overflowed == (False,)

    def test_resonant_step_dwarfs_clean_one(self, ho):
        # at the float nearest pi the position-boundary method loses the
        # energy by O(1) per step from generic data
        res = energy_error_sweep(
            exact_dl_ho_map(), lambda s: energy(ho, s), PhaseState(0.3, 0.7), 50.0, [1.0, math.pi])
        assert res.metric_at(math.pi) >= 1e3 * max(res.metric_at(1.0), 1e-300)

    def test_overflow_substituted(self, ho):
        # explicit Euler at a growing step: energy reaches inf and the run
        # records the substitute value instead
        res = energy_error_sweep(
            explicit_euler(ho), lambda s: energy(ho, s), PhaseState(1.0, 0.0), 1000.0, [3.0])
        assert res.metrics == (1e6,)
        assert res.overflowed == (True,)

    def test_solver_failure_substituted(self, ho):
        def broken(state, h):
            raise ZeroDivisionError("forced failure")

        res = energy_error_sweep(
            OneStepMap(step=broken), lambda s: energy(ho, s), PhaseState(1.0, 0.0), 10.0, [0.5])
        assert res.metrics == (1e6,)
        assert res.overflowed == (True,)


class TestSvReference:
    def test_tracks_exact_flow(self, ho):
        ref = sv_reference(stormer_verlet(ho), 1e-4)
        s = PhaseState(1.0, 0.0)
        out = ref(s, 0.5)
        exact = ho_exact_flow(s, 0.5)
        assert np.max(np.abs(out.as_array() - exact.as_array())) <= 1e-7
