import math

import numpy as np
import pytest

from cartan_hartogs.errors import DomainError, KernelZeroError
from cartan_hartogs.representative import (
    BallOracle, CartanHartogsOracle, NumericBallOracle, cayley_half_plane_oracle, centre_defect,
    centre_scan, corollary2_map, default_samples, disk_oracle, is_representative_centre,
    make_base, rep_coordinates, rep_jacobian, rep_jacobian_at_base,
)

DISK_POINTS = [0.0, 0.2 + 0.1j, -0.5j, 0.7 - 0.3j, -0.6 + 0.1j]


def test_disk_base_origin_is_identity():
    D = disk_oracle()
    base = make_base(D, [0.0])
    assert base.T[0, 0] == pytest.approx(2.0)
    for z in DISK_POINTS:
        assert rep_coordinates(D, base, [z])[0] == pytest.approx(z, abs=1e-15)


@pytest.mark.parametrize("oracle", [disk_oracle(), NumericBallOracle(M=1)],
                         ids=["analytic", "numeric"])
def test_disk_base_03_closed_form(oracle):
    base = make_base(oracle, [0.3])
    for z in DISK_POINTS:
        expected = 0.91 * (z - 0.3) / (1 - 0.3 * z)
        assert rep_coordinates(oracle, base, [z])[0] == pytest.approx(expected, abs=1e-9)


def test_mixed_hessian_disk():
    D = disk_oracle()
    for z in DISK_POINTS:
        assert D.mixed_hessian([z], [0.3])[0, 0] == pytest.approx(2 / (1 - 0.3 * z) ** 2)
        num = NumericBallOracle(M=1).mixed_hessian([z], [0.3])[0, 0]
        assert num == pytest.approx(2 / (1 - 0.3 * z) ** 2, rel=1e-7)


def test_ball_analytic_derivatives_match_fd():
    B, NB = BallOracle(M=2), NumericBallOracle(M=2)
    z, w = np.array([0.2 + 0.1j, -0.3j]), np.array([-0.1, 0.4 + 0.2j])
    np.testing.assert_allclose(B.dbar_log(z, w), NB.dbar_log(z, w), atol=1e-9)
    np.testing.assert_allclose(B.dbar_log_diag(w), NB.dbar_log_diag(w), atol=1e-9)
    np.testing.assert_allclose(B.mixed_hessian(z, w), NB.mixed_hessian(z, w), atol=1e-7)


@pytest.mark.parametrize("oracle,t0", [
    (disk_oracle(), [0.3]),
    (disk_oracle(), [-0.4 + 0.5j]),
    (BallOracle(M=2), [0.0, 0.0]),
    (BallOracle(M=3), [0.1, -0.2j, 0.3]),
    (NumericBallOracle(M=2), [0.2, 0.1j]),
    (CartanHartogsOracle(n=1, K=2.0), [0.2, 0.1 + 0.1j]),
    (CartanHartogsOracle(n=2, K=0.7), [0.1j, 0.2, -0.1]),
    (cayley_half_plane_oracle(), [0.3 + 1.2j]),
], ids=["disk", "disk2", "ball0", "ball3", "numball", "yi1", "yi2", "halfplane"])
def test_base_point_contracts(oracle, t0):
    base = make_base(oracle, t0)
    assert np.max(np.abs(rep_coordinates(oracle, base, t0))) < 1e-9
    J = rep_jacobian_at_base(oracle, base, method="fd")
    assert np.max(np.abs(J - np.eye(oracle.dim))) < 1e-6
    if oracle.analytic:
        Ja = rep_jacobian_at_base(oracle, base)
        assert np.max(np.abs(Ja - np.eye(oracle.dim))) < 1e-12


def test_target_point_and_jacobian_are_applied():
    D = BallOracle(M=2)
    A = np.array([[1.0, 0.5j], [0.0, 2.0]])
    s0 = np.array([0.1, -0.2j])
    base = make_base(D, [0.1, 0.2], A=A, s0=s0)
    np.testing.assert_allclose(rep_coordinates(D, base, [0.1, 0.2]), s0, atol=1e-14)
    # rep_jacobian is J[i, k] = df_i/dz_k; A is stored in the row-vector convention
    np.testing.assert_allclose(rep_jacobian_at_base(D, base), A.T, atol=1e-12)
    np.testing.assert_allclose(rep_jacobian_at_base(D, base, "fd"), A.T, atol=1e-6)


def test_analytic_jacobian_matches_fd_off_base():
    B = BallOracle(M=2)
    base = make_base(B, [0.2, -0.1j])
    z = np.array([-0.3 + 0.1j, 0.4])
    np.testing.assert_allclose(rep_jacobian(B, base, z, "analytic"), rep_jacobian(B, base, z, "fd"),
                               atol=1e-8)


def test_half_plane_matches_disk_up_to_linear_map():
    H, D = cayley_half_plane_oracle(), disk_oracle()
    phi = lambda z: (z - 1j) / (z + 1j)
    dphi = lambda z: 2j / (z + 1j) ** 2
    t0 = 0.3 + 1.2j
    hb, db = make_base(H, [t0]), make_base(D, [phi(t0)])
    for z in (0.5 + 0.7j, -1 + 2j, 0.1j + 0.02):
        a = rep_coordinates(H, hb, [z])[0]
        b = rep_coordinates(D, db, [phi(z)])[0] / dphi(t0)
        assert a == pytest.approx(b, rel=1e-7)


def test_domain_and_zero_errors():
    D = disk_oracle()
    base = make_base(D, [0.3])
    with pytest.raises(DomainError):
        rep_coordinates(D, base, [1.2])
    with pytest.raises(DomainError):
        make_base(D, [1.0])
    with pytest.raises(KernelZeroError):
        # the Y_I(1,1,2;1/4) kernel vanishes inside the domain
        _kernel_zero_pair()


def _kernel_zero_pair():
    from cartan_hartogs.luqikeng import is_lu_qikeng
    n, K = 2, 0.25
    (t,) = is_lu_qikeng(n, K).roots_in_disk
    # on the fiber axis X = W conj(zeta), so W conj(zeta) = t is a kernel zero
    r = math.sqrt(abs(t))
    oracle = CartanHartogsOracle(n=n, K=K)
    base = make_base(oracle, [r * np.sign(t.real), 0, 0])
    return rep_coordinates(oracle, base, [r, 0, 0])


def test_centre_examples():
    D = disk_oracle()
    samples = default_samples(D)
    assert is_representative_centre(D, [0.0], samples)
    assert not is_representative_centre(D, [0.3], samples)
    assert is_representative_centre(BallOracle(M=2), [0.0, 0.0], default_samples(BallOracle(M=2)))
    assert centre_defect(D, [0.0], samples) == 0.0


def test_centre_scan_flags_only_origin():
    from cartan_hartogs.cli import centre_grid
    D = disk_oracle()
    rows = centre_scan(D, centre_grid(1, 0.8, 9))
    flagged = [t for t, ok, _ in rows if ok]
    assert len(flagged) == 1 and abs(flagged[0][0]) < 1e-15


def test_centre_scan_numeric_oracle():
    NB = NumericBallOracle(M=1)
    rows = centre_scan(NB, [np.array([t]) for t in (0.0, 0.2, -0.3j)])
    assert [ok for _, ok, _ in rows] == [True, False, False]


def test_corollary2_map_disk():
    D = disk_oracle()
    f0 = corollary2_map(D, [0.0])
    for z in DISK_POINTS:
        assert f0([z])[0] == pytest.approx(z)
    f = corollary2_map(D, [0.3])
    assert abs(f([0.3])[0]) < 1e-15
    # not a disk automorphism: the boundary is sent to |f| = 1 - |t0|^2
    assert abs(f([0.999999])[0]) == pytest.approx(0.91, rel=1e-5)


def test_corollary2_map_requires_centre_at_origin():
    H = cayley_half_plane_oracle()
    with pytest.raises(DomainError):
        corollary2_map(H, [1j], sample_zs=[np.array([1j]), np.array([2j + 0.5])])
