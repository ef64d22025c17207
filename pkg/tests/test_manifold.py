import numpy as np
import pytest

from bdris import (ManifoldOptions, QuadraticReflectionObjective, assemble_objective,
                   euclidean_gradient, expm_skew_hermitian, lifted_gradient,
                   optimize_reflection, riemannian_gradient)
from bdris.channel import effective_channels
from bdris._linalg import anti_hermitianize, frob, haar_unitary, hermitianize, unitarity_residual

from conftest import complex_randn, make_variables
from oracles import (directional_derivative, expm_reference, linear_trace_minimum,
                     linear_trace_minimizer, mse_matrix_loops)


def random_objective(m, rng):
    a = complex_randn(rng, (m, m))
    a1 = hermitianize(a @ a.conj().T)
    b = complex_randn(rng, (m, m))
    a2 = hermitianize(b @ b.conj().T)
    return QuadraticReflectionObjective(a1, a2, complex_randn(rng, (m, m)),
                                        float(rng.standard_normal()))


def test_objective_validation():
    eye = np.eye(3)
    with pytest.raises(ValueError):
        QuadraticReflectionObjective(np.ones((3, 2)), eye, eye)
    skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(ValueError):
        QuadraticReflectionObjective(1j * np.eye(2) + skew, np.eye(2), np.eye(2))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    for m in (2, 3, 5):
        obj = random_objective(m, rng)
        phi = haar_unitary(m, rng)
        grad = euclidean_gradient(obj, phi)
        for _ in range(4):
            direction = complex_randn(rng, (m, m))
            fd = directional_derivative(obj.value, phi, direction)
            analytic = 2.0 * np.real(np.trace(direction.conj().T @ grad))
            assert fd == pytest.approx(analytic, rel=1e-6, abs=1e-9)


def test_assembled_objective_equals_weighted_mse(small_config, small_channels):
    """The quadratic form reproduces sum alpha*tr(W E(Phi)) for any unitary Phi."""
    rng = np.random.default_rng(1)
    vars_ = make_variables(small_config, rng)
    obj = assemble_objective(vars_, small_channels, small_config)
    alpha = small_config.weights_array
    for _ in range(4):
        phi = haar_unitary(small_config.ris_elements, rng)
        h_eff = effective_channels(small_channels, phi)
        expected = 0.0
        for l in range(small_config.num_cells):
            for k in range(small_config.users_per_cell):
                e = mse_matrix_loops(h_eff, vars_.beamformers, vars_.decoders,
                                     small_config.noise_mw, l, k)
                expected += alpha[l, k] * np.real(np.trace(vars_.weights[l, k] @ e))
        assert obj.value(phi) == pytest.approx(expected, rel=1e-9)


def test_assembled_gradient_matches_finite_differences(small_config, small_channels):
    rng = np.random.default_rng(2)
    vars_ = make_variables(small_config, rng)
    obj = assemble_objective(vars_, small_channels, small_config)
    phi = haar_unitary(small_config.ris_elements, rng)
    grad = euclidean_gradient(obj, phi)
    for _ in range(4):
        direction = complex_randn(rng, phi.shape)
        direction = direction / frob(direction)
        # g is quadratic in Phi, so a wide central difference is exact and
        # avoids the cancellation a tiny step suffers from
        fd = directional_derivative(obj.value, phi, direction, step=1e-3)
        analytic = 2.0 * np.real(np.trace(direction.conj().T @ grad))
        assert fd == pytest.approx(analytic, rel=1e-5, abs=1e-13)


def test_riemannian_gradient_is_tangent():
    rng = np.random.default_rng(3)
    m = 5
    obj = random_objective(m, rng)
    phi = haar_unitary(m, rng)
    r_grad = riemannian_gradient(euclidean_gradient(obj, phi), phi)
    omega = phi.conj().T @ r_grad
    assert frob(omega + omega.conj().T) <= 1e-12 * max(1.0, frob(omega))


def test_lifted_gradient_is_descent_direction():
    rng = np.random.default_rng(4)
    m = 4
    obj = random_objective(m, rng)
    phi = haar_unitary(m, rng)
    lift = lifted_gradient(euclidean_gradient(obj, phi), phi)
    assert frob(lift + lift.conj().T) <= 1e-12 * max(1.0, frob(lift))
    # moving along exp(-t S) Phi decreases g at rate ||S||_F^2
    t = 1e-6
    forward = obj.value(expm_skew_hermitian(-t * lift) @ phi)
    backward = obj.value(expm_skew_hermitian(t * lift) @ phi)
    slope = (forward - backward) / (2.0 * t)
    assert slope == pytest.approx(-frob(lift) ** 2, rel=1e-4)


def test_expm_matches_scipy():
    rng = np.random.default_rng(5)
    for m in (1, 2, 4, 7):
        for _ in range(5):
            s = anti_hermitianize(complex_randn(rng, (m, m)))
            got = expm_skew_hermitian(s)
            assert np.allclose(got, expm_reference(s), atol=1e-12)
            assert unitarity_residual(got) <= 1e-13


def test_expm_rejects_non_skew_input():
    with pytest.raises(ValueError):
        expm_skew_hermitian(np.eye(3))


def test_linear_objective_reaches_svd_optimum():
    rng = np.random.default_rng(6)
    opts = ManifoldOptions(max_iters=500, grad_tol=1e-9)
    for m in (2, 4, 6):
        zero = np.zeros((m, m))
        b = complex_randn(rng, (m, m))
        obj = QuadraticReflectionObjective(zero, zero, b)
        res = optimize_reflection(obj, haar_unitary(m, rng), opts)
        target = linear_trace_minimum(b)
        assert obj.value(res.reflection) == pytest.approx(target, rel=1e-6)
        assert unitarity_residual(res.reflection) <= 1e-8


def test_optimizer_never_increases_objective():
    rng = np.random.default_rng(7)
    m = 6
    obj = random_objective(m, rng)
    phi0 = haar_unitary(m, rng)
    res = optimize_reflection(obj, phi0)
    assert obj.value(res.reflection) <= obj.value(phi0) + 1e-12
    assert res.iterations <= ManifoldOptions().max_iters


def test_optimizer_stops_at_optimum():
    rng = np.random.default_rng(8)
    m = 4
    zero = np.zeros((m, m))
    b = complex_randn(rng, (m, m))
    obj = QuadraticReflectionObjective(zero, zero, b)
    res = optimize_reflection(obj, linear_trace_minimizer(b))
    assert res.iterations == 0
    assert not res.stalled


def test_optimizer_diagonal_blocks():
    rng = np.random.default_rng(9)
    m = 5
    obj = random_objective(m, rng)
    res = optimize_reflection(obj, np.eye(m, dtype=complex), blocks=(1,) * m)
    phi = res.reflection
    assert np.allclose(phi, np.diag(np.diag(phi)))
    assert np.allclose(np.abs(np.diag(phi)), 1.0, atol=1e-10)
    assert obj.value(phi) <= obj.value(np.eye(m)) + 1e-12


def test_optimizer_preserves_surface_blocks():
    rng = np.random.default_rng(10)
    m = 6
    obj = random_objective(m, rng)
    phi0 = np.zeros((m, m), dtype=complex)
    phi0[:2, :2] = haar_unitary(2, rng)
    phi0[2:, 2:] = haar_unitary(4, rng)
    res = optimize_reflection(obj, phi0, blocks=(2, 4))
    phi = res.reflection
    assert np.allclose(phi[:2, 2:], 0.0)
    assert np.allclose(phi[2:, :2], 0.0)
    assert unitarity_residual(phi) <= 1e-8


def test_optimizer_block_validation():
    rng = np.random.default_rng(11)
    m = 4
    obj = random_objective(m, rng)
    with pytest.raises(ValueError):
        optimize_reflection(obj, np.eye(m), blocks=(3, 2))
    with pytest.raises(ValueError):
        optimize_reflection(obj, haar_unitary(m, rng), blocks=(2, 2))
    with pytest.raises(ValueError):
        optimize_reflection(obj, 1.5 * np.eye(m))


def test_manifold_options_validation():
    with pytest.raises(ValueError):
        ManifoldOptions(max_iters=0)
    with pytest.raises(ValueError):
        ManifoldOptions(armijo_shrink=1.0)
    with pytest.raises(ValueError):
        ManifoldOptions(armijo_slope=0.0)
    with pytest.raises(ValueError):
        ManifoldOptions(grad_tol=-1.0)
    with pytest.raises(ValueError):
        ManifoldOptions(armijo_init_step=0.0)
