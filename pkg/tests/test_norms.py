import numpy as np
import pytest
from hypothesis import given, strategies as st

import parastrip as ps
from parastrip.errors import ConfigurationError


def mode(grid, k, amplitude=1.0):
    x = grid.axis_nodes()
    return ps.ComplexField(grid, amplitude * np.exp(1j * k * x)[np.newaxis])


@pytest.fixture
def pi_grid():
    return ps.make_grid(1, np.pi, 256)


def test_norm_params_defaults_and_validation():
    params = ps.NormParams(p=4.0, m=1)
    assert params.s == pytest.approx(1.5)          # 2 m (1 - 1/p)
    assert params.dyadic_blocks == 4
    with pytest.raises(ConfigurationError):
        ps.NormParams(p=1.0)
    with pytest.raises(ConfigurationError):
        ps.NormParams(p=4.0, m=0)
    with pytest.raises(ConfigurationError):
        ps.NormParams(p=4.0, m=1, s=3.5)           # above 2m
    with pytest.raises(ConfigurationError):
        ps.NormParams(p=4.0, dyadic_blocks=2)


def test_standing_condition_depends_on_dimension():
    params = ps.NormParams(p=4.0, m=1)
    params.require_standing_condition(1)           # 4 > 2 + 1/1
    with pytest.raises(ConfigurationError, match="standing condition"):
        params.require_standing_condition(2)       # 4 > 2 + 2/1 fails


def test_lp_norm_constant_field():
    g = ps.make_grid(1, 5.0, 64)
    f = ps.ComplexField(g, np.full((1, 64), 2.0 + 0j))
    # (|2|^4 * box volume)^(1/4) = (16 * 10)^(1/4)
    assert ps.lp_norm(f, 4.0) == pytest.approx(160.0 ** 0.25, rel=1e-13)
    assert ps.lp_norm(f, 2.0) == pytest.approx(np.sqrt(40.0), rel=1e-13)


def test_lp_norm_sums_components():
    g = ps.make_grid(1, 1.0, 16)
    v = np.ones((2, 16), dtype=complex)
    f = ps.ComplexField(g, v)
    # two unit components double the p-th power mass
    assert ps.lp_norm(f, 2.0) == pytest.approx(np.sqrt(2.0) * 2.0 ** 0.5, rel=1e-13)


def test_sobolev_norm_single_mode(pi_grid):
    f = mode(pi_grid, 3)
    want = np.sqrt((1.0 + 9.0) * 2.0 * np.pi)
    assert ps.sobolev_hs_norm(f, 1.0) == pytest.approx(want, rel=1e-12)
    # s = 0 reduces to the L^2 norm
    assert ps.sobolev_hs_norm(f, 0.0) == pytest.approx(ps.lp_norm(f, 2.0), rel=1e-12)


def test_littlewood_paley_reconstruction(pi_grid):
    f = mode(pi_grid, 3, amplitude=1.5)
    pieces = ps.littlewood_paley_blocks(f, 4)
    assert len(pieces) == 5
    total = sum(p.values for p in pieces)
    np.testing.assert_allclose(total, f.values, atol=1e-12)


def test_littlewood_paley_nyquist_guard():
    g = ps.make_grid(1, 10.0, 64)                  # Nyquist ~ 10.05
    f = ps.ComplexField(g, np.ones((1, 64), dtype=complex))
    with pytest.raises(ConfigurationError, match="Nyquist"):
        ps.littlewood_paley_blocks(f, 4)


def test_besov_norm_dyadic_scaling(pi_grid):
    # modes 1, 2, 4 land exactly in S_0, block 1, block 2; each block
    # adds a factor 2^s to the norm of the same-amplitude mode
    params = ps.NormParams(p=4.0, m=1)
    base = (2.0 * np.pi) ** 0.25
    n1 = ps.besov_norm(mode(pi_grid, 1), params)
    n2 = ps.besov_norm(mode(pi_grid, 2), params)
    n4 = ps.besov_norm(mode(pi_grid, 4), params)
    assert n1 == pytest.approx(base, rel=1e-10)
    assert n2 / n1 == pytest.approx(2.0 ** params.s, rel=1e-10)
    assert n4 / n2 == pytest.approx(2.0 ** params.s, rel=1e-10)


@given(amp=st.floats(min_value=0.01, max_value=100.0))
def test_besov_norm_homogeneous(amp):
    g = ps.make_grid(1, np.pi, 64)
    x = g.axis_nodes()
    f = ps.ComplexField(g, (np.exp(1j * x) + 0.5 * np.exp(3j * x))[np.newaxis])
    scaled = ps.ComplexField(g, amp * f.values)
    params = ps.NormParams(p=4.0, m=1, dyadic_blocks=3)
    assert ps.besov_norm(scaled, params) == pytest.approx(
        amp * ps.besov_norm(f, params), rel=1e-10
    )


def test_strip_norm_takes_sup(pi_grid):
    params = ps.NormParams(p=4.0, m=1)
    small = mode(pi_grid, 2, amplitude=1.0)
    big = mode(pi_grid, 2, amplitude=3.0)
    samples = {0.0: small, 0.1: big}
    assert ps.strip_norm(samples, params) == pytest.approx(
        ps.besov_norm(big, params), rel=1e-13
    )
    pairs = [(np.array([0.0]), small), (np.array([0.1]), big)]
    assert ps.strip_norm(pairs, params) == ps.strip_norm(samples, params)
    with pytest.raises(ConfigurationError):
        ps.strip_norm({}, params)
