import math

import numpy as np
import pytest
import sympy as sp

from cartan_hartogs.errors import DegenerateMetric, DomainError
from cartan_hartogs.metrics import (
    HermitianForm, ball_bergman_form, ball_metrics, bergman_metric, bergman_vs_y_lambda,
    ch_type_i_spec, complex_hessian, equivalence_ratio, g_lambda_potential, lu_constant_ball,
    metric_ratio_bounds, sample_ch_points, y_lambda_metric,
)


def symbolic_origin_metric(n: int, K: int) -> list:
    """Diagonal of the Bergman metric of Y_I(1,1,n;K) at 0, from sympy.

    The diagonal kernel depends on x = |W|^2 and y = |z|^2 only, and for a
    function of |u|^2 the mixed derivative at u = 0 is the x-derivative.
    """
    x, y = sp.symbols("x y", nonnegative=True)
    Kk = sp.Integer(K)
    P = lambda s: (s + 1) * sp.prod([s + 1 + Kk * k for k in range(1, n + 1)])
    b = [sp.Integer(0)]
    for i in range(1, n + 2):
        b.append(sum((-1) ** j * P(-j - 1) / (sp.factorial(j) * sp.factorial(i - j))
                     for j in range(1, i + 1)))
    X = x * (1 - y) ** (-1 / Kk)
    Y = 1 / (1 - X)
    F = sum(b[i] * sp.factorial(i) * Y ** (i + 1) for i in range(n + 2))
    logk = sp.log(F * (1 - y) ** (-(1 + n + 1 / Kk)))
    return [sp.diff(logk, v).subs({x: 0, y: 0}) for v in (x, y)]


def disk_potential(p):
    z = complex(p[0])
    return math.log(1 / (math.pi * (1 - abs(z) ** 2) ** 2))


def test_constant_potential_gives_zero():
    T = complex_hessian(lambda p: 3.0, [0.1 + 0.2j, -0.3j], 1e-3)
    assert np.max(np.abs(T.matrix)) < 1e-9


def test_disk_hessian_examples():
    assert complex_hessian(disk_potential, [0.0], 1e-3).matrix[0, 0].real == pytest.approx(2.0, abs=1e-8)
    h = 5e-3 * 0.5
    T = complex_hessian(disk_potential, [0.5], h)
    assert T.matrix[0, 0].real == pytest.approx(32 / 9, abs=1e-6)


def test_disk_hessian_fd_matches_closed_form_at_50_points():
    rng = np.random.default_rng(7)
    for _ in range(50):
        z = 0.95 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        h = 5e-3 * (1 - abs(z))
        T = complex_hessian(disk_potential, [z], h).matrix[0, 0]
        exact = 2 / (1 - abs(z) ** 2) ** 2
        assert abs(T - exact) <= 1e-6 * exact


def test_ball_hessian_fd_matches_closed_form():
    rng = np.random.default_rng(8)
    for _ in range(20):
        z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        z *= 0.9 * rng.uniform() / np.linalg.norm(z)
        pot = lambda p: -4 * math.log(1 - np.vdot(p, p).real)
        T = complex_hessian(pot, z, 5e-3 * (1 - np.linalg.norm(z)))
        exact = ball_bergman_form(z).matrix
        assert np.max(np.abs(T.matrix - exact)) <= 1e-6 * np.max(np.abs(exact))
        assert T.asymmetry < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bergman_metric_ball_case_at_origin(n):
    T = bergman_metric(n, 1, np.zeros(n + 1))
    np.testing.assert_allclose(T.matrix, (n + 2) * np.eye(n + 1), atol=1e-6)


def test_bergman_metric_against_symbolic_oracle():
    expected = [float(v) for v in symbolic_origin_metric(1, 2)]
    assert expected == pytest.approx([8 / 3, 2.5])
    T = bergman_metric(1, 2, np.zeros(2))
    np.testing.assert_allclose(T.matrix, np.diag(expected), atol=1e-6)


def test_bergman_metric_symbolic_n2():
    expected = [float(v) for v in symbolic_origin_metric(2, 3)]
    T = bergman_metric(2, 3, np.zeros(3)).matrix
    assert T[0, 0].real == pytest.approx(expected[0], abs=1e-6)
    np.testing.assert_allclose(np.diag(T)[1:].real, [expected[1]] * 2, atol=1e-6)


def test_g_lambda_at_origin_is_one():
    spec = ch_type_i_spec(1, 2.0)
    assert g_lambda_potential([0.0], [0.0], 1.0, spec) == 1.0
    with pytest.raises(DomainError):
        g_lambda_potential([0.9], [0.9], 1.0, spec)


@pytest.mark.parametrize("lam,K", [(1.0, 2.0), (0.5, 1.0), (3.0, 0.7)])
def test_y_lambda_at_origin(lam, K):
    spec = ch_type_i_spec(1, K)
    T = y_lambda_metric([0.0], [0.0], lam, spec)
    np.testing.assert_allclose(T.matrix, np.diag([lam, 2 + 1 / K]), atol=1e-6)


def test_y_lambda_positive_definite_on_samples():
    spec = ch_type_i_spec(1, 2.0)
    rng = np.random.default_rng(9)
    for p in sample_ch_points(spec, 200, rng):
        assert y_lambda_metric(p[1:], p[:1], 1.0, spec).is_positive_definite()


def test_bergman_positive_definite_on_samples():
    spec = ch_type_i_spec(2, 0.6)
    rng = np.random.default_rng(10)
    for p in sample_ch_points(spec, 20, rng):
        assert bergman_metric(2, 0.6, p).is_positive_definite()


def test_ball_metric_examples():
    assert ball_metrics(2, [0, 0], [1, 0]) == pytest.approx((math.sqrt(3), 1.0))
    assert ball_metrics(1, [0], [1]) == pytest.approx((math.sqrt(2), 1.0))
    assert ball_metrics(3, [0.1, 0.2, 0], [0, 0, 0]) == (0.0, 0.0)


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_lu_constant(M):
    assert lu_constant_ball(M) == pytest.approx(1 / math.sqrt(M + 1), abs=1e-6)


def test_ratio_bounds_trivial_cases():
    A = HermitianForm(np.array([[2.0, 0.3j], [-0.3j, 1.0]]))
    assert metric_ratio_bounds(A, A) == pytest.approx((1.0, 1.0))
    A2 = HermitianForm(2 * A.matrix)
    assert metric_ratio_bounds(A2, A) == pytest.approx((math.sqrt(2), math.sqrt(2)))
    with pytest.raises(DegenerateMetric):
        metric_ratio_bounds(HermitianForm(np.diag([1.0, 0.0])), A)


def test_equivalence_ratio_identical_metrics():
    spec = ch_type_i_spec(1, 2.0)
    metric = lambda p: y_lambda_metric(p[1:], p[:1], 1.0, spec)
    r = equivalence_ratio(metric, metric, spec, 10)
    assert (r.min_ratio, r.max_ratio) == pytest.approx((1.0, 1.0))


def test_bergman_vs_y_lambda_is_bounded_and_contains_one():
    r = bergman_vs_y_lambda(1, 2.0, samples=60, seed=0)
    assert 0 < r.min_ratio <= r.max_ratio < 10
    assert r.contains(1.0) or r.min_ratio == pytest.approx(1.0, abs=1e-8)
    assert r.sample_count == 60


def test_ratio_report_is_seeded():
    a = bergman_vs_y_lambda(1, 2.0, samples=10, seed=3)
    b = bergman_vs_y_lambda(1, 2.0, samples=10, seed=3)
    assert a == b
