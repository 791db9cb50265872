import numpy as np
import pytest

from reftoken import (
    Basis,
    BasisMismatch,
    ChannelReport,
    GaussianSpec,
    GaussianToken,
    InvalidParameter,
    InvalidState,
    QuadratureGuard,
    Smearing,
    SuperpositionToken,
    SupportEscape,
    apply_by_convolution,
    apply_kernel,
    apply_translate_mixture,
    asymptotic_kernel,
    auto_grid,
    fidelity,
    finite_tau_kernel,
    gaussian_fidelity,
    gaussian_wavefunction,
    identity_kernel,
    in_basis,
    kernel_fidelity,
    kernel_report,
    make_grid,
    mc_protocol,
    numeric_fidelity,
    outcome_distribution,
    superposition_fidelity,
    translate,
    twirl_factor,
)


def _gaussian_setup(n=512):
    spec = GaussianSpec(0.0, 0.0, 1.0)
    grid = auto_grid(spec, n_points=n)
    psi = gaussian_wavefunction(spec, grid)
    return spec, grid, psi


def test_identity_kernel_is_exact():
    _, grid, psi = _gaussian_setup()
    kern = identity_kernel(grid)
    assert kern.kind == "identity"
    np.testing.assert_array_equal(kern.factor, np.ones(2 * grid.n_points - 1))
    assert kernel_fidelity(kern, psi) == pytest.approx(1.0, abs=1e-12)
    rho = in_basis(psi.to_density_matrix(), Basis.MOMENTUM)
    out = apply_kernel(rho, kern)
    np.testing.assert_array_equal(out.entries, rho.entries)


def test_asymptotic_kernel_matches_gaussian_transform():
    _, grid, _ = _gaussian_setup()
    sigma, delta = 1.0, 0.5
    s2 = sigma**2 + delta**2
    kern = asymptotic_kernel(outcome_distribution(GaussianToken(sigma), Smearing(delta)), grid)
    k = kern.offsets
    np.testing.assert_allclose(kern.factor, np.exp(-s2 * k**2 / 4.0), rtol=0, atol=1e-12)
    n = grid.n_points
    assert kern.factor[n - 1] == 1.0
    assert np.all(np.abs(kern.factor) <= 1.0 + 1e-10)
    assert kern.trace_defect <= 1e-10


def test_kernel_factor_matrix_indexing():
    grid = make_grid(12.0, 64)
    kern = asymptotic_kernel(outcome_distribution(GaussianToken(1.0)), grid)
    mat = kern.factor_matrix()
    n = grid.n_points
    rng = np.random.default_rng(0)
    for _ in range(16):
        i, j = rng.integers(0, n, 2)
        assert mat[i, j] == kern.factor[(i - j) + (n - 1)]


def test_apply_kernel_preserves_diagonal_and_trace():
    _, grid, psi = _gaussian_setup(n=256)
    rho = in_basis(psi.to_density_matrix(), Basis.MOMENTUM)
    kern = asymptotic_kernel(outcome_distribution(GaussianToken(1.0)), grid)
    out = apply_kernel(rho, kern)
    np.testing.assert_array_equal(out.diagonal(), rho.diagonal())
    assert out.trace() == pytest.approx(1.0, abs=1e-12)
    assert out.basis is Basis.MOMENTUM
    out.validate_psd()


def test_apply_kernel_rejects_foreign_grid():
    _, grid, psi = _gaussian_setup(n=256)
    other = make_grid(grid.half_width * 2, grid.n_points)
    kern = asymptotic_kernel(outcome_distribution(GaussianToken(1.0)), other)
    with pytest.raises(BasisMismatch):
        apply_kernel(psi.to_density_matrix(), kern)


def test_translate_mixture_point_mass_equals_translate():
    _, grid, psi = _gaussian_setup(n=256)
    rho = psi.to_density_matrix()
    g = 1.3
    mixed = apply_translate_mixture(rho, np.array([g]), np.array([1.0]))
    moved = in_basis(translate(rho, g), mixed.basis)
    np.testing.assert_allclose(mixed.entries, moved.entries, rtol=0, atol=1e-12)


def test_translate_mixture_validates_weights():
    _, grid, psi = _gaussian_setup(n=256)
    rho = psi.to_density_matrix()
    with pytest.raises(InvalidParameter):
        apply_translate_mixture(rho, np.array([0.0, 1.0]), np.array([0.7, 0.7]))
    with pytest.raises(InvalidParameter):
        apply_translate_mixture(rho, np.array([0.0, 1.0]), np.array([1.5, -0.5]))
    with pytest.raises(SupportEscape):
        apply_translate_mixture(rho, np.array([grid.half_width]), np.array([1.0]))


def test_convolution_path_matches_kernel_path():
    _, grid, psi = _gaussian_setup(n=256)
    rho = psi.to_density_matrix()
    dist = outcome_distribution(GaussianToken(1.0), Smearing(0.5))
    via_kernel = apply_kernel(rho, asymptotic_kernel(dist, grid))
    via_mixture = apply_by_convolution(rho, dist)
    assert via_mixture.basis == via_kernel.basis
    assert np.max(np.abs(via_kernel.entries - via_mixture.entries)) <= 1e-6


def test_convolution_guard_on_starved_quadrature():
    _, grid, psi = _gaussian_setup(n=256)
    rho = psi.to_density_matrix()
    dist = outcome_distribution(GaussianToken(1.0))
    with pytest.raises(QuadratureGuard):
        apply_by_convolution(rho, dist, n_nodes=5)


def test_finite_tau_kernel_small_window_limit():
    # tau far below the token scale: almost every trial lands in the remainder,
    # so the channel degenerates to the bare offset average sinc(tau k)
    _, grid, _ = _gaussian_setup(n=256)
    dist = outcome_distribution(GaussianToken(1.0))
    tau = 1e-3
    kern = finite_tau_kernel(dist, tau, grid)
    assert kern.kind == "finite_tau"
    assert kern.tau == pytest.approx(tau)
    expected = twirl_factor(tau, kern.offsets)
    assert np.max(np.abs(kern.factor - expected)) <= 1e-6


def test_finite_tau_kernel_approaches_asymptotic():
    _, grid, _ = _gaussian_setup(n=256)
    dist = outcome_distribution(GaussianToken(1.0))
    ref = asymptotic_kernel(dist, grid)
    dev = [
        float(np.max(np.abs(finite_tau_kernel(dist, tau, grid).factor - ref.factor)))
        for tau in (5.0, 20.0)
    ]
    assert dev[1] < dev[0]
    assert dev[1] <= 0.05


def test_finite_tau_kernel_node_guard():
    _, grid, _ = _gaussian_setup(n=256)
    dist = outcome_distribution(GaussianToken(1.0))
    with pytest.raises(QuadratureGuard):
        finite_tau_kernel(dist, 5.0, grid, n_nodes=11)


def test_fidelity_forms_agree():
    _, grid, psi = _gaussian_setup(n=256)
    rho = in_basis(psi.to_density_matrix(), Basis.MOMENTUM)
    kern = asymptotic_kernel(outcome_distribution(GaussianToken(1.0), Smearing(0.3)), grid)
    out = apply_kernel(rho, kern)
    assert fidelity(out, psi) == pytest.approx(kernel_fidelity(kern, psi), abs=1e-10)


def test_kernel_report_fields():
    _, grid, psi = _gaussian_setup(n=256)
    kern = asymptotic_kernel(outcome_distribution(GaussianToken(1.0)), grid)
    report = kernel_report(kern, psi)
    assert report.method == "kernel"
    assert report.purity_in == pytest.approx(1.0, abs=1e-10)
    assert report.purity_out < report.purity_in
    assert report.trace_error <= 1e-10
    assert set(report.as_dict()) == {
        "fidelity", "purity_in", "purity_out", "trace_error", "method", "n_samples", "std_err",
    }


def test_channel_report_validation():
    with pytest.raises(InvalidState):
        ChannelReport(fidelity=1.5, purity_in=1.0, purity_out=1.0, trace_error=0.0, method="kernel")
    with pytest.raises(InvalidState):
        ChannelReport(fidelity=0.5, purity_in=1.0, purity_out=1.0, trace_error=1e-3, method="kernel")
    # Monte Carlo runs do not estimate the trace, so no trace guard applies
    ChannelReport(
        fidelity=0.5, purity_in=1.0, purity_out=None, trace_error=0.0,
        method="monte_carlo", n_samples=1000, std_err=0.01,
    )


@pytest.mark.parametrize(
    "width, sigma, delta",
    [(1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (2.0, 1.0, 0.0), (0.5, 2.0, 1.0)],
)
def test_numeric_fidelity_matches_closed_form(width, sigma, delta):
    report = numeric_fidelity(GaussianSpec(0.0, 0.0, width), GaussianToken(sigma), Smearing(delta))
    assert report.fidelity == pytest.approx(gaussian_fidelity(width, sigma, delta), abs=1e-9)


def test_numeric_fidelity_superposition_token():
    token = SuperpositionToken(x_bar=1.0, p_bar=1.0, sigma=1.0)
    report = numeric_fidelity(GaussianSpec(0.0, 0.0, 1.0), token)
    assert report.fidelity == pytest.approx(
        superposition_fidelity(1.0, 1.0, 1.0, 1.0), abs=1e-9
    )


def test_numeric_fidelity_accepts_prebuilt_distribution():
    dist = outcome_distribution(GaussianToken(1.0))
    report = numeric_fidelity(GaussianSpec(0.0, 0.0, 1.0), dist)
    assert report.fidelity == pytest.approx(gaussian_fidelity(1.0, 1.0), abs=1e-9)


def test_mc_protocol_requires_seed_and_samples():
    spec = GaussianSpec(0.0, 0.0, 1.0)
    with pytest.raises(InvalidParameter):
        mc_protocol(spec, GaussianToken(1.0), tau=10.0, n_samples=2000)
    with pytest.raises(InvalidParameter):
        mc_protocol(spec, GaussianToken(1.0), tau=10.0, n_samples=10, seed=1)
    with pytest.raises(InvalidParameter):
        mc_protocol(spec, GaussianToken(1.0), tau=-1.0, n_samples=2000, seed=1)


def test_mc_protocol_is_reproducible_and_consistent():
    spec = GaussianSpec(0.0, 0.0, 1.0)
    kwargs = dict(tau=20.0, n_samples=4000, seed=99, compute_purity=False)
    a = mc_protocol(spec, GaussianToken(1.0), **kwargs)
    b = mc_protocol(spec, GaussianToken(1.0), **kwargs)
    assert a.fidelity == b.fidelity
    assert a.std_err == b.std_err
    assert a.method == "monte_carlo"
    assert a.n_samples == 4000
    assert a.purity_out is None
    grid = auto_grid(spec)
    dist = outcome_distribution(GaussianToken(1.0))
    f_ref = kernel_fidelity(finite_tau_kernel(dist, 20.0, grid), gaussian_wavefunction(spec, grid))
    assert abs(a.fidelity - f_ref) <= 5 * a.std_err


def test_mc_protocol_purity_stays_physical():
    spec = GaussianSpec(0.0, 0.0, 1.0)
    report = mc_protocol(spec, GaussianToken(1.0), tau=10.0, n_samples=2000, seed=5)
    assert report.purity_in == pytest.approx(1.0, abs=1e-10)
    assert 0.0 < report.purity_out <= 1.0 + 1e-9
