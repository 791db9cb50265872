import numpy as np
import pytest

from reftoken import (
    InvalidParameter,
    OptimizationError,
    beta,
    gaussian_fidelity,
    golden_section_max,
    maximize_fidelity,
    superposition_fidelity,
)


def test_beta_known_values():
    assert beta(1.0, 0.0) == pytest.approx(1.0)
    assert beta(1.0, 1.0) == pytest.approx(1.0 / np.sqrt(1.5), rel=1e-15)
    assert beta(2.0, 1.0) == pytest.approx(2.0 / np.sqrt(4.5), rel=1e-15)
    with pytest.raises(InvalidParameter):
        beta(0.0, 1.0)
    with pytest.raises(InvalidParameter):
        beta(1.0, -0.5)


def test_gaussian_fidelity_known_values():
    # sharp token, no smearing: recovery is perfect regardless of system width
    for width in (0.3, 1.0, 4.0):
        assert gaussian_fidelity(width, 0.0, 0.0) == pytest.approx(1.0)
    assert gaussian_fidelity(1.0, 1.0, 1.0) == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-15)
    assert gaussian_fidelity(2.0, 1.0, 0.0) == pytest.approx(2.0 / np.sqrt(4.5), rel=1e-15)


def test_gaussian_fidelity_combines_widths_in_quadrature():
    # smearing enters only through s^2 = sigma^2 + delta^2
    assert gaussian_fidelity(1.3, 0.6, 0.8) == pytest.approx(
        gaussian_fidelity(1.3, 1.0, 0.0), rel=1e-15
    )


def test_gaussian_fidelity_monotonicity():
    widths = np.linspace(0.2, 4.0, 20)
    f_up = [gaussian_fidelity(w, 1.0) for w in widths]
    assert np.all(np.diff(f_up) > 0)
    sigmas = np.linspace(0.0, 4.0, 20)
    f_down = [gaussian_fidelity(1.0, s) for s in sigmas]
    assert np.all(np.diff(f_down) < 0)


def test_superposition_fidelity_reduces_to_gaussian():
    for width, sigma in [(1.0, 1.0), (2.0, 0.7)]:
        assert superposition_fidelity(width, sigma, 0.0, 0.0) == pytest.approx(
            gaussian_fidelity(width, sigma), rel=1e-14
        )


def test_superposition_fidelity_oracle_value():
    # independently derived reference point for Delta = sigma = 1, x = 0, p = 1
    assert superposition_fidelity(1.0, 1.0, 0.0, 1.0) == pytest.approx(
        0.9033690148521832, abs=1e-14
    )


def test_superposition_fidelity_distant_packets_vanish():
    val = superposition_fidelity(1.0, 1.0, 20.0, 0.0)
    assert np.isfinite(val)
    assert 0.0 < val < 1e-50


def test_superposition_fidelity_monotone_in_separation():
    x = np.linspace(0.0, 3.0, 16)
    f = superposition_fidelity(1.0, 1.0, x, 0.7)
    assert f.shape == x.shape
    assert np.all(np.diff(f) < 0)


def test_superposition_fidelity_bounds():
    # separated packets can fall below the single-packet baseline, but a
    # momentum-only superposition never does
    b = beta(1.0, 1.0)
    for x_bar in (0.0, 0.5, 1.5):
        for p_bar in (0.0, 0.8, 2.0):
            val = superposition_fidelity(1.0, 1.0, x_bar, p_bar)
            assert 0.0 < val < 1.0
    for p_bar in (0.0, 0.5, 1.0, 3.0):
        assert superposition_fidelity(1.0, 1.0, 0.0, p_bar) >= b - 1e-12


def test_superposition_fidelity_rejects_negative_offsets():
    with pytest.raises(InvalidParameter):
        superposition_fidelity(1.0, 1.0, -1.0, 0.0)
    with pytest.raises(InvalidParameter):
        superposition_fidelity(1.0, 1.0, 0.0, -1.0)


def test_golden_section_recovers_quadratic_peak():
    arg = golden_section_max(lambda x: -((x - 1.234567) ** 2), 0.0, 3.0, arg_tol=1e-9)[0]
    assert arg == pytest.approx(1.234567, abs=1e-7)
    with pytest.raises(OptimizationError):
        golden_section_max(lambda x: x, 2.0, 2.0)


@pytest.mark.parametrize("ratio", [0.25, 1.0, 4.0])
def test_maximize_fidelity_matches_dense_grid(ratio):
    res = maximize_fidelity(ratio)
    t = np.linspace(0.0, 20.0, 10_001)
    dense = float(np.max(superposition_fidelity(ratio, 1.0, 0.0, t)))
    assert res.f_max == pytest.approx(dense, abs=1e-6)
    assert res.x_bar_max_sigma == 0.0
    assert 0.0 < res.p_bar_max_sigma < 20.0
    assert res.beta == pytest.approx(beta(ratio, 1.0), rel=1e-12)
    assert res.beta < res.f_max < 1.0


def test_maximize_fidelity_result_types():
    res = maximize_fidelity(1.0)
    for field in ("ratio", "f_max", "p_bar_max_sigma", "x_bar_max_sigma", "beta"):
        assert type(getattr(res, field)) is float


def test_maximize_fidelity_monotone_in_ratio():
    ladder = [maximize_fidelity(r).f_max for r in (0.25, 0.5, 1.0, 2.0, 4.0)]
    assert np.all(np.diff(ladder) > 0)


def test_maximize_fidelity_rejects_bad_ratio():
    with pytest.raises(InvalidParameter):
        maximize_fidelity(0.0)
    with pytest.raises(InvalidParameter):
        maximize_fidelity(np.inf)
