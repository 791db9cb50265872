import numpy as np
import pytest

from reftoken import (
    Basis,
    DensityMatrix,
    GaussianSpec,
    InvalidParameter,
    InvalidState,
    WaveFunction,
    gaussian_wavefunction,
    in_basis,
    make_grid,
    purity,
    to_momentum_basis,
    to_position_basis,
)


def test_grid_lattice_relation():
    grid = make_grid(12.0, 1024)
    # dx * dp * n = 2 pi is what makes the centered FFT unitary on the lattice
    assert grid.dx * grid.dp * grid.n_points == pytest.approx(2 * np.pi, rel=1e-15)
    assert grid.positions[grid.n_points // 2] == 0.0
    assert grid.momenta[grid.n_points // 2] == 0.0
    assert grid.positions.shape == (1024,)


def test_grid_offset_lattice():
    grid = make_grid(8.0, 256)
    lattice = grid.offset_lattice()
    assert lattice.shape == (2 * 256 - 1,)
    np.testing.assert_allclose(np.diff(lattice), grid.dp, rtol=0, atol=1e-12)
    assert lattice[256 - 1] == 0.0


@pytest.mark.parametrize("bad", [(0.0, 64), (-3.0, 64), (5.0, 4), (5.0, 64.5)])
def test_grid_rejects_degenerate_shapes(bad):
    half_width, n = bad
    with pytest.raises(InvalidParameter):
        make_grid(half_width, n)


def test_fourier_round_trip_preserves_state():
    grid = make_grid(14.0, 512)
    psi = gaussian_wavefunction(GaussianSpec(mu_x=1.3, mu_p=-0.7, width=1.1), grid)
    back = to_position_basis(to_momentum_basis(psi))
    np.testing.assert_allclose(back.amplitudes, psi.amplitudes, rtol=0, atol=1e-13)
    assert to_momentum_basis(psi).norm() == pytest.approx(1.0, abs=1e-12)


def test_momentum_density_matches_analytic_gaussian():
    # |psi~(p)|^2 for a width-w packet is a Gaussian of variance 1/(2 w^2)
    grid = make_grid(16.0, 1024)
    w, mu_p = 0.8, 0.9
    psi = to_momentum_basis(gaussian_wavefunction(GaussianSpec(0.0, mu_p, w), grid))
    p = grid.momenta
    expected = (w / np.sqrt(np.pi)) * np.exp(-(w * (p - mu_p)) ** 2)
    np.testing.assert_allclose(psi.probability_density(), expected, rtol=0, atol=1e-12)


def test_wavefunction_moments():
    grid = make_grid(14.0, 1024)
    spec = GaussianSpec(mu_x=0.9, mu_p=-1.2, width=0.7)
    psi = gaussian_wavefunction(spec, grid)
    assert psi.mean() == pytest.approx(spec.mu_x, abs=1e-10)
    assert psi.variance() == pytest.approx(spec.width**2 / 2, abs=1e-10)
    phi = to_momentum_basis(psi)
    assert phi.mean() == pytest.approx(spec.mu_p, abs=1e-10)
    assert phi.variance() == pytest.approx(1 / (2 * spec.width**2), abs=1e-10)


def test_wavefunction_validation():
    grid = make_grid(10.0, 128)
    with pytest.raises(InvalidState):
        WaveFunction(grid=grid, basis=Basis.POSITION, amplitudes=np.ones(64, dtype=complex))
    amps = np.ones(128, dtype=complex)  # not normalized on this lattice
    with pytest.raises(InvalidState):
        WaveFunction(grid=grid, basis=Basis.POSITION, amplitudes=amps)


def test_density_matrix_basics():
    grid = make_grid(12.0, 256)
    psi = gaussian_wavefunction(GaussianSpec(0.5, 0.0, 1.0), grid)
    rho = psi.to_density_matrix()
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert purity(rho) == pytest.approx(1.0, abs=1e-10)
    assert rho.expectation(psi) == pytest.approx(1.0, abs=1e-10)
    assert rho.min_eigenvalue() >= -1e-10
    rho.validate_psd()
    np.testing.assert_allclose(
        rho.diagonal(), psi.probability_density(), rtol=0, atol=1e-12
    )


def test_density_matrix_rejects_unnormalized_and_nonhermitian():
    grid = make_grid(10.0, 128)
    psi = gaussian_wavefunction(GaussianSpec(0.0, 0.0, 1.0), grid)
    good = np.outer(psi.amplitudes, psi.amplitudes.conj()) * grid.dx
    with pytest.raises(InvalidState):
        DensityMatrix(grid=grid, basis=Basis.POSITION, entries=2.0 * good)
    bad = good.copy()
    bad[3, 7] += 1e-6
    with pytest.raises(InvalidState):
        DensityMatrix(grid=grid, basis=Basis.POSITION, entries=bad)


def test_density_matrix_basis_round_trip():
    grid = make_grid(12.0, 256)
    psi = gaussian_wavefunction(GaussianSpec(1.0, 0.5, 0.9), grid)
    rho = psi.to_density_matrix()
    back = to_position_basis(to_momentum_basis(rho))
    np.testing.assert_allclose(back.entries, rho.entries, rtol=0, atol=1e-12)
    # momentum diagonal of the pure state is the momentum density
    rho_p = to_momentum_basis(rho)
    phi = to_momentum_basis(psi)
    np.testing.assert_allclose(
        rho_p.diagonal(), phi.probability_density(), rtol=0, atol=1e-12
    )


def test_in_basis_is_idempotent():
    grid = make_grid(10.0, 128)
    psi = gaussian_wavefunction(GaussianSpec(0.0, 0.0, 1.0), grid)
    assert in_basis(psi, Basis.POSITION) is psi
    phi = in_basis(psi, Basis.MOMENTUM)
    assert phi.basis is Basis.MOMENTUM
    np.testing.assert_allclose(
        in_basis(phi, Basis.POSITION).amplitudes, psi.amplitudes, rtol=0, atol=1e-13
    )
