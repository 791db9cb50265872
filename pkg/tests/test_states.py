import numpy as np
import pytest

from reftoken import (
    GaussianSpec,
    GaussianToken,
    InvalidParameter,
    SuperpositionToken,
    SupportEscape,
    auto_grid,
    gaussian_wavefunction,
    make_grid,
    superposition_norm,
    token_overlap,
    token_wavefunction,
)


def test_auto_grid_clearance_rule():
    assert auto_grid(GaussianSpec(0.0, 0.0, 1.0)).half_width == pytest.approx(12.0)
    assert auto_grid(GaussianSpec(3.0, 0.0, 1.0)).half_width == pytest.approx(15.0)
    assert auto_grid(GaussianToken(0.5)).half_width == pytest.approx(6.0)
    # widest requirement wins
    assert auto_grid(GaussianToken(0.5), 2.0).half_width == pytest.approx(24.0)
    sup = SuperpositionToken(x_bar=2.0, p_bar=0.0, sigma=1.0)
    assert auto_grid(sup).half_width == pytest.approx(14.0)


def test_auto_grid_rejects_bad_inputs():
    with pytest.raises(InvalidParameter):
        auto_grid()
    with pytest.raises(InvalidParameter):
        auto_grid(-1.0)
    with pytest.raises(InvalidParameter):
        auto_grid("wide")


@pytest.mark.parametrize(
    "ctor, kwargs",
    [
        (GaussianSpec, {"mu_x": 0.0, "mu_p": 0.0, "width": 0.0}),
        (GaussianSpec, {"mu_x": np.nan, "mu_p": 0.0, "width": 1.0}),
        (GaussianToken, {"sigma": -1.0}),
        (SuperpositionToken, {"x_bar": 1.0, "p_bar": np.inf, "sigma": 1.0}),
        (SuperpositionToken, {"x_bar": 1.0, "p_bar": 0.0, "sigma": 0.0}),
    ],
)
def test_spec_validation(ctor, kwargs):
    with pytest.raises(InvalidParameter):
        ctor(**kwargs)


def test_gaussian_state_is_normalized_and_centered():
    grid = make_grid(14.0, 512)
    psi = gaussian_wavefunction(GaussianSpec(1.5, -0.5, 0.9), grid)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    assert psi.mean() == pytest.approx(1.5, abs=1e-10)


def test_support_escape_on_narrow_grid():
    grid = make_grid(4.0, 256)
    with pytest.raises(SupportEscape):
        gaussian_wavefunction(GaussianSpec(mu_x=3.5, mu_p=0.0, width=1.0), grid)


def test_momentum_headroom_guard():
    grid = make_grid(12.0, 64)  # momentum half-width ~ 8.4, too tight for mu_p = 20
    with pytest.raises(SupportEscape):
        gaussian_wavefunction(GaussianSpec(mu_x=0.0, mu_p=20.0, width=1.0), grid)


def test_superposition_norm_matches_closed_form():
    spec = SuperpositionToken(x_bar=1.2, p_bar=0.8, sigma=1.0)
    grid = auto_grid(spec, n_points=1024)
    closed = 2.0 * (
        1.0 + np.exp(-(spec.x_bar / spec.sigma) ** 2 - (spec.p_bar * spec.sigma) ** 2)
    )
    assert superposition_norm(spec, grid) == pytest.approx(closed, rel=1e-12)


def test_superposition_state_normalized_and_symmetric():
    spec = SuperpositionToken(x_bar=1.5, p_bar=1.0, sigma=1.0)
    grid = auto_grid(spec, n_points=1024)
    psi = token_wavefunction(spec, grid)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    # drop the unpaired leftmost node: the lattice spans [-L, L)
    dens = psi.probability_density()[1:]
    np.testing.assert_allclose(dens, dens[::-1], rtol=0, atol=1e-12)


def test_degenerate_superposition_equals_single_packet():
    spec = SuperpositionToken(x_bar=0.0, p_bar=0.0, sigma=0.7)
    grid = auto_grid(spec, n_points=512)
    psi = token_wavefunction(spec, grid)
    ref = gaussian_wavefunction(GaussianSpec(0.0, 0.0, 0.7), grid)
    np.testing.assert_allclose(psi.amplitudes, ref.amplitudes, rtol=0, atol=1e-12)


def test_gaussian_token_overlap_matches_closed_form():
    # <e(g)|e(g')> for a width-sigma packet depends only on v = g - g'
    sigma = 1.0
    grid = make_grid(16.0, 1024)
    for g, gp in [(0.0, 0.0), (1.0, 0.0), (2.5, -1.0)]:
        v = g - gp
        got = token_overlap(GaussianToken(sigma), g, gp, grid)
        assert abs(got) == pytest.approx(np.exp(-(v**2) / (4 * sigma**2)), abs=1e-10)


def test_token_overlap_hermitian_symmetry():
    spec = SuperpositionToken(x_bar=1.0, p_bar=0.5, sigma=1.0)
    grid = make_grid(20.0, 1024)
    a = token_overlap(spec, 1.3, -0.4, grid)
    b = token_overlap(spec, -0.4, 1.3, grid)
    assert a == pytest.approx(np.conj(b), abs=1e-12)
