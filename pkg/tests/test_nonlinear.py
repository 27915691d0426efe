import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gevrey_nse import _accel
from gevrey_nse.kernels import convolve
from gevrey_nse.nonlinear import bilinear, nonlinear_term_direct, nonlinear_term_fast, transform_size
from gevrey_nse.solver import velocity_rhs, vorticity_rhs
from gevrey_nse.spectral import SpectralField, curl, inner_product, make_grid, project_leray, shear_flow, stokes, taylor_green

from conftest import coeff_at, oracle_advection, random_field, raw_field


def test_convolution_matches_brute_force():
    u = random_field(2, 0)
    v = raw_field(2, 1)
    ref = oracle_advection(u, v)
    for backend in ("numba", "numpy"):
        out = convolve(u.coeff, v.coeff, 2, backend=backend)
        for k, vec in ref.items():
            assert np.allclose(out[:, k[0] + 2, k[1] + 2, k[2] + 2], vec, rtol=0, atol=1e-13)


@pytest.mark.skipif(not _accel.use_numba(), reason="numba disabled")
def test_kernel_backends_agree():
    u, v = random_field(5, 2), random_field(5, 3)
    a = convolve(u.coeff, v.coeff, 5, backend="numba")
    b = convolve(u.coeff, v.coeff, 5, backend="numpy")
    assert np.max(np.abs(a - b)) < 1e-13 * np.max(np.abs(a))


def test_kernel_backend_flag():
    assert _accel.use_numba() == (_accel.HAVE_NUMBA and _accel._FLAG not in ("0", "false", "no", "off"))
    with pytest.raises(ValueError):
        convolve(np.zeros((3, 3, 3, 3)), np.zeros((3, 3, 3, 3)), 1, backend="fortran")


@pytest.mark.parametrize("method", ["direct", "fast"])
def test_shear_flow_is_steady_for_advection(method):
    u = shear_flow(make_grid(4), 1.3)
    assert bilinear(u, method=method).l2() < 1e-13


@pytest.mark.parametrize("method", ["direct", "fast"])
def test_taylor_green_nonlinearity_is_gradient(method):
    u = taylor_green(make_grid(4))
    raw = convolve(u.coeff, u.coeff, 4)
    assert np.max(np.abs(raw)) > 0.1  # the unprojected term is nonzero
    assert bilinear(u, method=method).l2() < 1e-13


def test_orthogonality_random():
    u = random_field(6, 4)
    for method in ("direct", "fast"):
        b = bilinear(u, method=method)
        assert abs(inner_product(b, u)) < 1e-12 * u.l2() ** 3
        assert b.divergence_residual() < 1e-13 * max(b.l2(), 1.0)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_fast_matches_direct(N, seed):
    u, v = random_field(N, seed), random_field(N, seed + 1)
    for a, b in [
        (nonlinear_term_direct(u), nonlinear_term_fast(u)),
        (bilinear(u, v, method="direct"), bilinear(u, v, method="fast")),
    ]:
        assert (a - b).l2() <= 1e-12 * max(a.l2(), 1e-300)


def test_aliasing_sentinel():
    # modes at the cube edge: their products land at |k_i| = 2N and fold back without padding
    N = 4
    g = make_grid(N)
    u = project_leray(SpectralField.from_modes(g, {(N, 1, 0): (0.3, 1.0, 0.5), (N, 0, 1): (0.0, 0.4, 1.0)}))
    d = nonlinear_term_direct(u)
    on = nonlinear_term_fast(u, dealias=True)
    off = nonlinear_term_fast(u, dealias=False)
    assert (on - d).l2() < 1e-13 * max(d.l2(), 1.0)
    assert (off - d).l2() > 1e-3 * max(d.l2(), 1.0)
    assert transform_size(N, True) >= 3 * N + 1
    assert transform_size(N, False) == 2 * N + 2


def test_vorticity_rhs_shear_and_zero():
    g = make_grid(4)
    u = shear_flow(g, 0.8)
    w = curl(u)
    assert (vorticity_rhs(u, w) + stokes(w)).l2() < 1e-14
    z = SpectralField.zeros(g)
    assert vorticity_rhs(z, z).l2() == 0.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_vorticity_rhs_is_curl_of_velocity_rhs(seed):
    u = random_field(6, seed)
    lhs = curl(velocity_rhs(u))
    rhs = vorticity_rhs(u, curl(u))
    assert (lhs - rhs).l2() < 1e-10 * rhs.l2()


def test_vorticity_rhs_rejects_wrong_omega():
    u = random_field(4, 0)
    with pytest.raises(ValueError):
        vorticity_rhs(u, curl(u) * 1.01)
