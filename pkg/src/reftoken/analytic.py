"""Closed-form channel fidelities for Gaussian message states.

With a Gaussian message of width Delta, the recovered fidelity is the outcome
density averaged against exp(-v^2 / 2 Delta^2), which evaluates in closed form
for both token families. The superposition-token expression is arranged so
every exponent is non-positive; the naive grouping overflows once x_bar
reaches tens of sigma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, OptimizationError

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
P_BAR_SIGMA_MAX = 20.0
BRACKET_POINTS = 256
ARG_TOL = 1e-8


def beta(system_width: float, sigma: float) -> float:
    """Fidelity baseline Delta / sqrt(Delta^2 + sigma^2 / 2) of the plain
    Gaussian token with sharp measurement."""
    if not (system_width > 0):
        raise InvalidParameter(f"system width must be positive, got {system_width}")
    if sigma < 0:
        raise InvalidParameter(f"sigma must be non-negative, got {sigma}")
    return system_width / np.sqrt(system_width**2 + sigma**2 / 2.0)


def gaussian_fidelity(system_width: float, sigma: float, smearing: float = 0.0) -> float:
    """Recovered fidelity with a Gaussian token of width sigma read out through
    Gaussian smearing of width delta; depends on them only through
    s^2 = sigma^2 + delta^2."""
    if smearing < 0:
        raise InvalidParameter(f"smearing must be non-negative, got {smearing}")
    return beta(system_width, np.hypot(sigma, smearing))


def superposition_fidelity(system_width, sigma, x_bar, p_bar):
    """Recovered fidelity with the two-packet token (packets at +-x_bar with
    momenta -+p_bar, each of width sigma), sharp measurement.

    Accepts scalars or broadcastable arrays in x_bar and p_bar.
    """
    if not (system_width > 0 and sigma > 0):
        raise InvalidParameter("system and token widths must be positive")
    x_bar = np.asarray(x_bar, dtype=float)
    p_bar = np.asarray(p_bar, dtype=float)
    if np.any(x_bar < 0) or np.any(p_bar < 0):
        raise InvalidParameter("x_bar and p_bar must be non-negative")
    b = beta(system_width, sigma)
    a = x_bar**2 / sigma**2
    u = p_bar**2 * sigma**2
    value = b * (np.exp(-a * (1.0 - b**2)) + np.exp(-a - b**2 * u)) / (1.0 + np.exp(-a - u))
    if value.ndim == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class MaxFidelityResult:
    """Best superposition-token fidelity at fixed width ratio."""

    ratio: float
    f_max: float
    p_bar_max_sigma: float
    x_bar_max_sigma: float
    beta: float


def golden_section_max(f, lo: float, hi: float, arg_tol: float = ARG_TOL, max_iter: int = 200):
    """Maximum of a unimodal f on [lo, hi]; returns (argmax, max)."""
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise OptimizationError(f"degenerate bracket [{lo}, {hi}]")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < arg_tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    else:
        raise OptimizationError(f"no convergence to {arg_tol} within {max_iter} iterations")
    x = (a + b) / 2.0
    fx = f(x)
    if not np.isfinite(fx):
        raise OptimizationError(f"objective is not finite at {x}")
    return x, fx


def _refine(f, grid: np.ndarray, best: int, arg_tol: float):
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    if hi <= lo:
        return float(grid[best]), float(f(grid[best]))
    return golden_section_max(f, lo, hi, arg_tol)


def maximize_fidelity(
    ratio: float,
    p_bar_sigma_max: float = P_BAR_SIGMA_MAX,
    scan_points: int = BRACKET_POINTS,
    arg_tol: float = ARG_TOL,
) -> MaxFidelityResult:
    """Maximize the superposition fidelity over the token parameters at fixed
    ratio = system width / token width.

    The fidelity depends only on (ratio, x_bar / sigma, p_bar * sigma), so the
    search runs at system_width = ratio, sigma = 1. A coarse 2-D scan locates
    the basin (checking that larger x_bar never helps); golden-section then
    refines along each coordinate whose optimum is interior.
    """
    if not (np.isfinite(ratio) and ratio > 0):
        raise InvalidParameter(f"ratio must be positive, got {ratio}")
    if scan_points < 8:
        raise InvalidParameter(f"need at least 8 scan points, got {scan_points}")
    width = float(ratio)

    t_grid = np.linspace(0.0, p_bar_sigma_max, scan_points)
    w_grid = np.linspace(0.0, 4.0, 65)
    surface = superposition_fidelity(width, 1.0, w_grid[:, None], t_grid[None, :])
    i_w, i_t = np.unravel_index(int(np.argmax(surface)), surface.shape)

    x_best = float(w_grid[i_w])
    t_best = float(t_grid[i_t])
    f_best = float(surface[i_w, i_t])
    for _ in range(3):
        t_best, f_best = _refine(
            lambda t: superposition_fidelity(width, 1.0, x_best, t),
            t_grid, int(np.searchsorted(t_grid, t_best).clip(0, len(t_grid) - 1)), arg_tol,
        )
        if i_w == 0:
            break
        x_best, f_best = _refine(
            lambda w: superposition_fidelity(width, 1.0, w, t_best),
            w_grid, int(np.searchsorted(w_grid, x_best).clip(0, len(w_grid) - 1)), arg_tol,
        )
    b = beta(width, 1.0)
    if f_best < b - 1e-12:
        raise OptimizationError(
            f"search returned {f_best!r} below the p_bar = 0 baseline {b!r}"
        )
    return MaxFidelityResult(
        ratio=float(ratio),
        f_max=float(f_best),
        p_bar_max_sigma=float(t_best),
        x_bar_max_sigma=float(x_best),
        beta=float(b),
    )
