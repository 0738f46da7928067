import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irs_secrecy.manifold import (
    PhaseObjective,
    RetractionError,
    aligned_start,
    euclidean_gradient,
    from_phases,
    manifold_residual,
    phase_matrix,
    polak_ribiere,
    retract,
    riemannian_gradient,
    run_cg,
    tangency_residual,
    tangent_project,
    vector_transport,
)
from tests.conftest import random_channelset, random_solution, random_unit_modulus


def complex_vector(rng, m, scale=1.0):
    return scale * (rng.standard_normal(m) + 1j * rng.standard_normal(m))


class TestGeometry:
    @given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1),
           m=st.integers(min_value=1, max_value=8))
    @settings(max_examples=100, deadline=None)
    def test_projection_tangency_and_idempotence(self, seed, m):
        rng = np.random.default_rng(seed)
        u = random_unit_modulus(rng, m)
        v = complex_vector(rng, m, scale=3.0)
        t = tangent_project(u, v)
        assert tangency_residual(u, t) <= 1e-10
        t2 = tangent_project(u, t)
        assert np.max(np.abs(t2 - t)) <= 1e-12

    def test_projection_of_base_point_vanishes(self, rng):
        u = random_unit_modulus(rng, 5)
        assert np.max(np.abs(tangent_project(u, u))) <= 1e-12

    def test_projection_keeps_rotated_base(self, rng):
        u = random_unit_modulus(rng, 5)
        assert np.allclose(tangent_project(u, 1j * u), 1j * u, atol=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1),
           m=st.integers(min_value=1, max_value=8))
    @settings(max_examples=100, deadline=None)
    def test_transport_lands_tangent(self, seed, m):
        rng = np.random.default_rng(seed)
        u_from = random_unit_modulus(rng, m)
        u_to = random_unit_modulus(rng, m)
        mu = tangent_project(u_from, complex_vector(rng, m))
        out = vector_transport(u_from, u_to, mu)
        assert tangency_residual(u_to, out) <= 1e-10

    def test_transport_of_zero(self, rng):
        u = random_unit_modulus(rng, 4)
        assert np.all(vector_transport(u, u, np.zeros(4)) == 0)

    def test_transport_identity_on_own_tangent(self, rng):
        u = random_unit_modulus(rng, 4)
        mu = tangent_project(u, complex_vector(rng, 4))
        assert np.allclose(vector_transport(u, u, mu), mu, atol=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1),
           delta=st.floats(min_value=1e-6, max_value=10.0),
           m=st.integers(min_value=1, max_value=8))
    @settings(max_examples=100, deadline=None)
    def test_retraction_stays_on_manifold(self, seed, delta, m):
        rng = np.random.default_rng(seed)
        u = random_unit_modulus(rng, m)
        mu = tangent_project(u, complex_vector(rng, m))
        out = retract(u, delta, mu)
        assert manifold_residual(out) <= 1e-12

    def test_retraction_zero_step_exact(self, rng):
        u = random_unit_modulus(rng, 6)
        out = retract(u, 0.0, complex_vector(rng, 6))
        assert np.array_equal(out, u)

    def test_retraction_eighth_turn(self):
        out = retract(np.array([1.0 + 0j]), 1.0, np.array([1j]))
        assert out[0] == pytest.approx(np.exp(1j * np.pi / 4))

    def test_retraction_zero_element_raises(self):
        with pytest.raises(RetractionError):
            retract(np.array([1.0 + 0j]), 1.0, np.array([-1.0 + 0j]))


class TestPolakRibiere:
    def test_restart_when_gradients_match(self, rng):
        g = complex_vector(rng, 4)
        assert polak_ribiere(g, g, g) == 0.0

    def test_reduction_with_zero_transport(self, rng):
        g_new = complex_vector(rng, 4)
        g_old = complex_vector(rng, 4)
        expected = np.linalg.norm(g_new) ** 2 / np.linalg.norm(g_old) ** 2
        assert polak_ribiere(g_new, np.zeros(4), g_old) == pytest.approx(expected)

    def test_zero_old_gradient_rejected(self, rng):
        with pytest.raises(ValueError):
            polak_ribiere(complex_vector(rng, 3), np.zeros(3), np.zeros(3))

    @given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_never_negative(self, seed):
        rng = np.random.default_rng(seed)
        alpha = polak_ribiere(
            complex_vector(rng, 5), complex_vector(rng, 5), complex_vector(rng, 5)
        )
        assert alpha >= 0.0


class TestEuclideanGradient:
    def test_zero_covariances_zero_gradient(self, rng):
        ch = random_channelset(rng)
        n = ch.num_bs_antennas
        u = random_unit_modulus(rng, ch.num_irs_elements)
        g = euclidean_gradient(u, np.zeros((ch.num_users, n, n)), np.zeros((n, n)), ch)
        assert np.allclose(g, 0.0)

    def test_single_element_riemannian_gradient_zero(self, rng):
        ch = random_channelset(rng, num_irs=1)
        sol = random_solution(rng, ch)
        g = riemannian_gradient(sol.u, sol.W, sol.Z, ch)
        assert np.max(np.abs(g)) <= 1e-10

    def test_finite_difference_agreement(self, rng):
        # Wirtinger convention: gradient = d/dRe + 1j * d/dIm
        h = 1e-6
        for _ in range(25):
            ch = random_channelset(rng, num_users=int(rng.integers(1, 4)),
                                   num_irs=int(rng.integers(1, 6)),
                                   num_bs=int(rng.integers(1, 4)))
            sol = random_solution(rng, ch)
            obj = PhaseObjective(sol.W, sol.Z, ch)
            u = sol.u
            grad = obj.euclidean_grad(u)
            fd = np.zeros_like(grad)
            for m in range(u.shape[0]):
                e = np.zeros(u.shape[0])
                e[m] = 1.0
                fr = (obj.value(u + h * e) - obj.value(u - h * e)) / (2 * h)
                fi = (obj.value(u + 1j * h * e) - obj.value(u - 1j * h * e)) / (2 * h)
                fd[m] = fr + 1j * fi
            assert np.linalg.norm(fd - grad) <= 1e-5 * max(np.linalg.norm(fd), 1e-12)

    def test_global_phase_quotient(self, rng):
        ch = random_channelset(rng)
        sol = random_solution(rng, ch)
        obj = PhaseObjective(sol.W, sol.Z, ch)
        theta = 1.234
        assert obj.value(np.exp(1j * theta) * sol.u) == pytest.approx(
            obj.value(sol.u), abs=1e-10
        )
        g1 = riemannian_gradient(sol.u, sol.W, sol.Z, ch)
        g2 = riemannian_gradient(np.exp(1j * theta) * sol.u, sol.W, sol.Z, ch)
        assert np.linalg.norm(g2) == pytest.approx(np.linalg.norm(g1), abs=1e-10)

    def test_descent_along_negative_gradient(self, rng):
        for _ in range(10):
            ch = random_channelset(rng)
            sol = random_solution(rng, ch)
            g = riemannian_gradient(sol.u, sol.W, sol.Z, ch)
            if np.linalg.norm(g) < 1e-8:
                continue
            obj = PhaseObjective(sol.W, sol.Z, ch)
            f0 = obj.value(sol.u)
            f1 = obj.value(retract(sol.u, 1e-6 / np.linalg.norm(g), -g))
            assert f1 < f0


class TestArmijoDescent:
    def test_sufficient_decrease_on_gradient_steps(self, rng):
        # one steepest-descent Armijo step must satisfy the classic inequality
        from irs_secrecy.manifold import ARMIJO_C

        for _ in range(20):
            ch = random_channelset(rng)
            sol = random_solution(rng, ch)
            obj = PhaseObjective(sol.W, sol.Z, ch)
            u = sol.u
            g = tangent_project(u, obj.euclidean_grad(u))
            gnorm2 = float(np.vdot(g, g).real)
            if gnorm2 < 1e-12:
                continue
            f0 = obj.value(u)
            delta = 1.0
            for _ in range(50):
                trial = retract(u, delta, -g)
                if obj.value(trial) <= f0 - ARMIJO_C * delta * gnorm2:
                    break
                delta *= 0.5
            else:
                pytest.fail("no Armijo step accepted")
            assert obj.value(trial) <= f0 - ARMIJO_C * delta * gnorm2


class TestRunCg:
    def test_stationary_start_returns_immediately(self, rng):
        ch = random_channelset(rng)
        sol = random_solution(rng, ch)
        u_opt, hist = run_cg(sol.u, sol.W, sol.Z, ch, tol=1e-4, max_iters=500)
        u_again, hist2 = run_cg(u_opt, sol.W, sol.Z, ch, tol=1e-3)
        assert len(hist2.records) == 1
        assert np.array_equal(u_again, u_opt)

    def test_off_manifold_start_rejected(self, rng):
        ch = random_channelset(rng)
        sol = random_solution(rng, ch)
        with pytest.raises(ValueError, match="manifold"):
            run_cg(1.5 * sol.u, sol.W, sol.Z, ch)

    def test_monotone_trace_and_feasible_output(self, rng):
        for _ in range(50):
            ch = random_channelset(rng, num_users=int(rng.integers(1, 4)),
                                   num_irs=int(rng.integers(2, 6)))
            sol = random_solution(rng, ch)
            u_opt, hist = run_cg(sol.u, sol.W, sol.Z, ch)
            assert hist.is_monotone(slack=1e-9)
            assert manifold_residual(u_opt) <= 1e-12

    def test_two_element_grid_oracle(self, rng):
        for _ in range(5):
            ch = random_channelset(rng, num_users=1, num_irs=2, num_bs=2)
            sol = random_solution(rng, ch, power=3.0)
            obj = PhaseObjective(sol.W, sol.Z, ch)
            phi = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
            p1, p2 = np.meshgrid(phi, phi)
            grid = from_phases(np.stack([p1.ravel(), p2.ravel()], axis=1))
            f_grid = obj.value_batch(grid).min()
            u_opt, hist = run_cg(np.ones(2, dtype=complex), sol.W, sol.Z, ch)
            assert abs(hist.f_trace()[-1] - f_grid) <= 1e-3

    def test_improves_over_start(self, rng):
        ch = random_channelset(rng)
        sol = random_solution(rng, ch)
        u0 = np.ones(ch.num_irs_elements, dtype=complex)
        _, hist = run_cg(u0, sol.W, sol.Z, ch)
        assert hist.f_trace()[-1] <= hist.f_trace()[0]


class TestHelpers:
    def test_from_phases_convention(self):
        u = from_phases(np.array([0.0, np.pi / 2]))
        assert u[0] == pytest.approx(1.0)
        assert u[1] == pytest.approx(np.exp(-1j * np.pi / 2))

    def test_phase_matrix_matches_cascade(self, rng):
        # u^H G_k equals g_k^H Phi H with Phi = diag(conj(u))
        ch = random_channelset(rng, num_users=1)
        u = random_unit_modulus(rng, ch.num_irs_elements)
        lhs = np.conj(u) @ ch.G[0]
        rhs = np.conj(ch.g[0]) @ phase_matrix(u) @ ch.H
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_aligned_start_on_manifold_and_aligned(self, rng):
        ch = random_channelset(rng, num_users=2, num_irs=5)
        u = aligned_start(ch, 0)
        assert manifold_residual(u) <= 1e-12
        # the aligned start should beat the all-ones start for that user
        gain_aligned = np.linalg.norm(np.conj(u) @ ch.G[0])
        gain_ones = np.linalg.norm(np.ones(5) @ ch.G[0])
        assert gain_aligned >= gain_ones * 0.9
