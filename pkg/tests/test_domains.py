import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cartan_hartogs.domains import (
    CartanSpec, CHSpec, GCHSpec, HuaSpec, as_point, cartan_contains, ch_contains, contains,
    distance_to_boundary, flatten_point, gch_contains, generic_norm, hua_contains,
    is_positive_definite, listed_gch_specs, random_cartan_point, reshape_coeffs,
    spec_from_json, spec_to_json,
)
from cartan_hartogs.errors import ShapeError, SymmetryError

SPECS = [
    CartanSpec("I", m=2, n=3),
    CartanSpec("II", p=3),
    CartanSpec("III", q=4),
    CartanSpec("IV", n=3),
]


def test_shapes_and_dims():
    assert [s.shape for s in SPECS] == [(2, 3), (3, 3), (4, 4), (3,)]
    assert [s.dim for s in SPECS] == [6, 6, 6, 3]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
def test_origin_is_member(spec):
    assert cartan_contains(spec, spec.zero())
    assert generic_norm(spec, spec.zero()) == pytest.approx(1.0)


def test_type_i_examples():
    s = CartanSpec("I", m=1, n=1)
    assert cartan_contains(s, [[0.5]])
    assert not cartan_contains(s, [[1.0]])


def test_type_iv_worked_example():
    s = CartanSpec("IV", n=2)
    Z = np.array([0.9, 0.0])
    # 1 + 0.6561 - 1.62 = 0.0361 > 0 and 1 - 0.6561 > 0
    assert generic_norm(s, Z) == pytest.approx(1 + 0.9**4 - 2 * 0.81)
    assert cartan_contains(s, Z)


def test_type_iv_bilinear_product():
    # Z = (a, i a) has Z Z^t = 0, so only |Z|^2 < 1/2 bites
    s = CartanSpec("IV", n=2)
    a = 0.7
    assert generic_norm(s, [a, 1j * a]) == pytest.approx(1 - 4 * a * a)
    assert not cartan_contains(s, [a, 1j * a])
    assert cartan_contains(s, [0.49, 0.49j])


def test_symmetry_and_shape_errors():
    with pytest.raises(ShapeError):
        as_point(CartanSpec("I", m=2, n=2), np.zeros((2, 3)))
    with pytest.raises(SymmetryError):
        as_point(CartanSpec("II", p=2), [[0, 0.1], [0.2, 0]])
    with pytest.raises(SymmetryError):
        as_point(CartanSpec("III", q=2), [[0, 0.1], [0.1, 0]])


def test_positive_definite_pivot():
    assert is_positive_definite(np.eye(3))
    assert not is_positive_definite(np.diag([1.0, 1e-14, 1.0]))
    assert not is_positive_definite(np.diag([1.0, -1.0]))


def test_ch_examples():
    base = CartanSpec("I", m=1, n=1)
    assert ch_contains(CHSpec(base, 1, 1.0), [0.0], [[0.0]])
    assert ch_contains(CHSpec(base, 1, 1.0), [0.5], [[0.5]])
    assert not ch_contains(CHSpec(base, 1, 2.0), [0.95], [[0.5]])


def test_hua_examples():
    base = CartanSpec("I", m=1, n=1)
    two = HuaSpec(base, ((1, 1.0, 1.0), (1, 1.0, 1.0)))
    assert hua_contains(two, [[0.5], [0.5]], [[0.0]])
    assert not hua_contains(two, [[0.75], [0.75]], [[0.0]])
    one = HuaSpec(base, ((1, 1.0, 1.0),))
    ch = CHSpec(base, 1, 1.0)
    rng = np.random.default_rng(1)
    for _ in range(200):
        W = rng.uniform(-1, 1, 1) + 1j * rng.uniform(-1, 1, 1)
        Z = rng.uniform(-1, 1, (1, 1)) + 1j * rng.uniform(-1, 1, (1, 1))
        assert hua_contains(one, [W], Z) == ch_contains(ch, W, Z)


def test_gch_examples():
    ball = CartanSpec("I", m=1, n=1)
    spec = GCHSpec(ball, ball, 1.0)
    assert gch_contains(spec, [0.5], [[0.5]])
    assert not gch_contains(spec, [0.5], [[1.2]])
    iv = CartanSpec("IV", n=2)
    spec = GCHSpec(CartanSpec("I", m=1, n=2), iv, 1.5)
    rng = np.random.default_rng(2)
    for _ in range(100):
        w = 0.8 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        assert gch_contains(spec, w, np.zeros((1, 2))) == cartan_contains(iv, w)


def test_sixteen_listed_domains_contain_origin():
    specs = listed_gch_specs(K=0.7)
    assert len(specs) == 16
    assert len({s.name for s in specs}) == 16
    for s in specs:
        assert gch_contains(s, np.zeros(s.fiber.dim), s.base.zero())


def test_gch_iv_fiber_matches_printed_inequalities():
    # Y(I,IV): with rho = det(I - z z^*)^{1/(2K)}, the fiber condition reads
    # |w w^t|^2 < rho^4 and 2 rho^2 |w|^2 - |w w^t|^2 < rho^4
    base = CartanSpec("I", m=1, n=2)
    K = 1.3
    spec = GCHSpec(base, CartanSpec("IV", n=2), K)
    rng = np.random.default_rng(3)
    for _ in range(500):
        z = 0.7 * (rng.standard_normal((1, 2)) + 1j * rng.standard_normal((1, 2))) / 2
        w = 0.8 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        det = np.linalg.det(np.eye(1) - z @ z.conj().T).real
        if det <= 0:
            continue
        r2 = det ** (1 / K)
        q = abs(np.sum(w**2)) ** 2
        printed = q < r2**2 and 2 * r2 * np.vdot(w, w).real - q < r2**2
        assert gch_contains(spec, w, z) == printed


@pytest.mark.parametrize("spec", SPECS[1:3], ids=lambda s: s.kind)
def test_reshape_round_trip(spec):
    rng = np.random.default_rng(4)
    w = rng.standard_normal(spec.dim) + 1j * rng.standard_normal(spec.dim)
    Z = reshape_coeffs(spec, w)
    np.testing.assert_array_equal(flatten_point(spec, Z), w)


def test_scaling_monotone_on_rays():
    rng = np.random.default_rng(5)
    spec = CHSpec(CartanSpec("I", m=2, n=2), 2, 0.8)
    for _ in range(200):
        Z = random_cartan_point(spec.base, rng, 0.95)
        W = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        W *= rng.uniform(0, 1) / np.linalg.norm(W)
        if ch_contains(spec, W, Z):
            for s in (0.9, 0.5, 0.1):
                assert ch_contains(spec, s * W, s * Z)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
def test_member_implies_positive_norm(spec):
    rng = np.random.default_rng(6)
    for _ in range(200):
        Z = random_cartan_point(spec, rng, 1.3)
        if cartan_contains(spec, Z):
            assert generic_norm(spec, Z) > 0


def test_distance_to_boundary_sign():
    spec = CHSpec(CartanSpec("I", m=1, n=1), 1, 2.0)
    assert distance_to_boundary(spec, [0.5], [[0.5]]) > 0
    assert distance_to_boundary(spec, [0.95], [[0.5]]) <= 0


def test_contains_dispatch():
    base = CartanSpec("I", m=1, n=1)
    assert contains(base, [[0.2]])
    assert contains(CHSpec(base), [0.2], [[0.2]])
    assert contains(HuaSpec(base), [[0.2]], [[0.2]])
    assert contains(GCHSpec(base, base), [0.2], [[0.2]])


@pytest.mark.parametrize("spec", [
    CartanSpec("II", p=2),
    CHSpec(CartanSpec("I", m=2, n=3), 2, 1.5),
    HuaSpec(CartanSpec("IV", n=3), ((1, 1.0, 2.0), (2, 0.5, 1.0))),
    GCHSpec(CartanSpec("III", q=3), CartanSpec("IV", n=2), 0.5),
], ids=lambda s: type(s).__name__)
def test_spec_json_round_trip(spec):
    assert spec_from_json(spec_to_json(spec)) == spec


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.0, 0.99), st.floats(0.0, 0.99))
def test_ch_matches_scalar_inequality(K, w, z):
    spec = CHSpec(CartanSpec("I", m=1, n=1), 1, K)
    assert ch_contains(spec, [w], [[z]]) == (w ** (2 * K) < 1 - z * z)
