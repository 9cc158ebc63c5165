import math
import os
import subprocess
import sys

import numpy as np
import pytest

import genvi._pykernels as pyk
from genvi import (
    AveragedConfig,
    PhaseState,
    cubic_oscillator,
    cubic_perturbation,
    energy,
    h_tvi_trapezoid,
    step_type1,
    stormer_verlet,
)
from genvi.averaged import averaged_lagrangian, averaged_right_hamiltonian, step_type2
from genvi.fpu import FpuSystem, fpu_energy, imex_map, initial_state, oscillatory_energy
from genvi.kernels import (
    BACKEND,
    CHAIN_METHODS,
    HAVE_SPEEDUPS,
    RESONANCE_METHODS,
    chain_trajectory,
    resonance_energy_errors,
    step_count,
)
from genvi.rootfind import SolveSettings
from genvi.taylor_vi import gauss_legendre


BENCH = FpuSystem(omega=50.0, m=3)


def pure_resonance(method, eps, h_values, t_final, q0=1.0, p0=0.0):
    # mirror of the wrapper defaults, routed to the pure backend explicitly
    rule = gauss_legendre(4)
    st = SolveSettings()
    hs = [float(h) for h in h_values]
    return np.asarray(
        pyk.resonance_sweep(
            RESONANCE_METHODS[method], float(eps), q0, p0, hs,
            [step_count(t_final, h) for h in hs],
            1e6, list(rule.weights), list(rule.nodes),
            st.tol, st.max_iter, st.fd_step, 1e-8,
        ),
        dtype=float,
    )


class TestBackendSelection:
    def test_backend_name(self):
        assert BACKEND in ("compiled", "pure")
        assert BACKEND == ("compiled" if HAVE_SPEEDUPS else "pure")

    def test_env_var_forces_pure(self):
        env = dict(os.environ, GENVI_NO_SPEEDUPS="1")
        out = subprocess.run(
            [sys.executable, "-c", "from genvi.kernels import BACKEND; print(BACKEND)"],
            capture_output=True, text=True, env=env, check=True,
        )
        assert out.stdout.strip() == "pure"


@pytest.mark.skipif(not HAVE_SPEEDUPS, reason="compiled backend not built")
class TestBackendParity:
    # both backends must produce bit-identical floats, not merely close ones

    @pytest.mark.parametrize("method", sorted(RESONANCE_METHODS))
    def test_resonance_rows_identical(self, method):
        hs = [0.3, 0.7, 1.0, math.pi / 2, math.pi]
        compiled = resonance_energy_errors(method, 0.1, hs, 50.0)
        pure = pure_resonance(method, 0.1, hs, 50.0)
        assert np.array_equal(compiled, pure)

    @pytest.mark.parametrize("method", CHAIN_METHODS)
    def test_chain_rows_identical(self, method):
        compiled = chain_trajectory(method, BENCH, 0.01, 2.0, stride=10)
        base = initial_state(BENCH)
        if method == "sv":
            rows = pyk.fpu_sv_trajectory(50.0, 3, 1.0, base.q, base.p, 0.01, 200, 10)
        elif method == "imex":
            from genvi.fpu import _midpoint_matrices

            _, a_inv, b_mat = _midpoint_matrices(BENCH, 0.01)
            rows = pyk.fpu_imex_trajectory(50.0, 3, 1.0, base.q, base.p, 0.01, 200, 10, a_inv, b_mat)
        else:
            st = SolveSettings()
            rows = pyk.fpu_htvi_trajectory(
                50.0, 3, 1.0, base.q, base.p, 0.01, 200, 10, st.tol, st.max_iter, st.fd_step)
        for got, want in zip(
            (compiled.times, compiled.mode_energies, compiled.mode_totals, compiled.energies),
            rows,
        ):
            assert np.array_equal(got, np.asarray(want, dtype=float))


class TestAgainstLibrary:
    def test_exact_dl_matches_sweep_semantics(self, ho):
        # eps=0: kernel runs the pure oscillator, so its metric must agree
        # with stepping the library map and tracking max |H - H0|
        errs = resonance_energy_errors("exact_dl", 0.0, [1.0], 20.0)
        from genvi import energy_error_sweep, exact_dl_ho_map

        lib = energy_error_sweep(
            exact_dl_ho_map(), lambda s: energy(ho, s), PhaseState(1.0, 0.0), 20.0, [1.0])
        assert abs(errs[0] - lib.metric_at(1.0)) <= 1e-12

    def test_avg_l_single_step_matches_library(self):
        cfg = AveragedConfig(epsilon=0.1)
        genfn = averaged_lagrangian(cfg, cubic_perturbation())
        s1 = step_type1(genfn, PhaseState(1.0, 0.0), 0.3)
        sys = cubic_oscillator(0.1)
        h0 = energy(sys, PhaseState(1.0, 0.0))
        want = abs(energy(sys, s1) - h0)
        errs = resonance_energy_errors("avg_l", 0.1, [0.3], 0.3)
        assert abs(errs[0] - want) <= 1e-10

    def test_avg_h_single_step_matches_library(self):
        cfg = AveragedConfig(epsilon=0.1)
        genfn = averaged_right_hamiltonian(cfg, cubic_perturbation())
        s1 = step_type2(genfn, PhaseState(1.0, 0.0), 0.3)
        sys = cubic_oscillator(0.1)
        h0 = energy(sys, PhaseState(1.0, 0.0))
        want = abs(energy(sys, s1) - h0)
        errs = resonance_energy_errors("avg_h", 0.1, [0.3], 0.3)
        assert abs(errs[0] - want) <= 1e-10

    def test_sv_chain_matches_library_map(self):
        traj = chain_trajectory("sv", BENCH, 0.01, 0.2, stride=1)
        flow = stormer_verlet(BENCH.as_separable())
        s = initial_state(BENCH)
        for i in range(1, 21):
            s = flow(s, 0.01)
            assert abs(traj.energies[i] - fpu_energy(BENCH, s)) <= 1e-10
            assert abs(traj.mode_totals[i] - oscillatory_energy(BENCH, s).total) <= 1e-10

    def test_htvi_chain_matches_library_map(self):
        traj = chain_trajectory("htvi", BENCH, 0.01, 0.1, stride=1)
        flow = h_tvi_trapezoid(BENCH.as_separable())
        s = initial_state(BENCH)
        for i in range(1, 11):
            s = flow(s, 0.01)
            assert abs(traj.energies[i] - fpu_energy(BENCH, s)) <= 1e-8

    def test_imex_chain_matches_library_map(self):
        traj = chain_trajectory("imex", BENCH, 0.01, 0.1, stride=1)
        flow = imex_map(BENCH)
        s = initial_state(BENCH)
        for i in range(1, 11):
            s = flow(s, 0.01)
            assert abs(traj.energies[i] - fpu_energy(BENCH, s)) <= 1e-10

    def test_first_row_is_initial_state(self):
        traj = chain_trajectory("sv", BENCH, 0.01, 0.1, stride=5)
        s = initial_state(BENCH)
        assert traj.times[0] == 0.0
        assert abs(traj.energies[0] - fpu_energy(BENCH, s)) <= 1e-12
        assert abs(traj.mode_totals[0] - oscillatory_energy(BENCH, s).total) <= 1e-12


class TestResonanceGuard:
    # within 1e-8 of the method's singular step the sweep reports the
    # substitute instead of evaluating a formula that has lost its meaning

    def test_exact_dl_guard_at_pi(self):
        errs = resonance_energy_errors("exact_dl", 0.0, [1.0, math.pi], 10.0)
        assert errs[0] <= 1e-9
        assert errs[1] == 1e6

    def test_exact_dh_guard_at_half_pi(self):
        errs = resonance_energy_errors("exact_dh", 0.0, [1.0, math.pi / 2], 10.0)
        assert errs[0] <= 1e-9
        assert errs[1] == 1e6

    def test_avg_l_guard_at_pi(self):
        errs = resonance_energy_errors("avg_l", 0.1, [math.pi], 10.0)
        assert errs[0] == 1e6

    def test_avg_h_guard_at_half_pi(self):
        errs = resonance_energy_errors("avg_h", 0.1, [math.pi / 2], 10.0)
        assert errs[0] == 1e6

    def test_custom_substitute_honoured(self):
        errs = resonance_energy_errors("exact_dl", 0.0, [math.pi], 10.0, substitute=7.5)
        assert errs[0] == 7.5


class TestStepCount:
    def test_rounds_to_nearest(self):
        assert step_count(1000.0, 0.3) == 3333
        assert step_count(1.0, 0.1) == 10

    def test_never_below_one(self):
        assert step_count(0.05, 0.1) == 1
        assert step_count(1.0, 10.0) == 1


class TestChainRecording:
    def test_stride_includes_endpoints(self):
        traj = chain_trajectory("sv", BENCH, 0.01, 0.2, stride=7)
        # steps 0, 7, 14 and the final step 20
        assert np.allclose(traj.times, [0.0, 0.07, 0.14, 0.2], atol=1e-15)
        assert traj.mode_energies.shape == (4, 3)
        assert traj.mode_totals.shape == (4,)
        assert traj.energies.shape == (4,)

    def test_totals_sum_mode_rows(self):
        traj = chain_trajectory("sv", BENCH, 0.01, 0.5, stride=10)
        assert np.max(np.abs(traj.mode_energies.sum(axis=1) - traj.mode_totals)) <= 1e-12

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError, match="chain method"):
            chain_trajectory("leapfrog", BENCH, 0.01, 1.0)

    def test_bad_stride_rejected(self):
        with pytest.raises(ValueError, match="stride"):
            chain_trajectory("sv", BENCH, 0.01, 1.0, stride=0)


def test_unknown_resonance_method_rejected():
    with pytest.raises(ValueError, match="resonance method"):
        resonance_energy_errors("midpoint", 0.1, [0.3], 10.0)
