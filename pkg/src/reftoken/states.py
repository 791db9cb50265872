"""Concrete state families: Gaussian message states and the two token shapes
(a single Gaussian packet, and a superposition of two packets displaced to
+-x_bar with momenta +-p_bar).

All Gaussians use the convention

    psi(x) = pi^(-1/4) * w^(-1/2) * exp(i mu_p x) * exp(-(x - mu_x)^2 / (2 w^2)),

whose position variance is w^2 / 2. Every closed form downstream assumes this
width convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, InvalidState, SupportEscape
from .grid import Basis, Grid, WaveFunction, make_grid

TAIL_TOL = 1e-12
DEFAULT_N_POINTS = 1024
_WIDTHS_OF_CLEARANCE = 12.0


@dataclass(frozen=True)
class GaussianSpec:
    """Single Gaussian packet: mean position mu_x, mean momentum mu_p, width."""

    mu_x: float = 0.0
    mu_p: float = 0.0
    width: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.width) and self.width > 0):
            raise InvalidParameter(f"gaussian width must be positive, got {self.width}")
        if not (np.isfinite(self.mu_x) and np.isfinite(self.mu_p)):
            raise InvalidParameter("gaussian means must be finite")


@dataclass(frozen=True)
class GaussianToken:
    """Token localized at the origin with width sigma."""

    sigma: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidParameter(f"token width must be positive, got {self.sigma}")


@dataclass(frozen=True)
class SuperpositionToken:
    """Equal superposition of packets at (+x_bar, +p_bar) and (-x_bar, -p_bar),
    each of width sigma."""

    x_bar: float
    p_bar: float
    sigma: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidParameter(f"token width must be positive, got {self.sigma}")
        if not (np.isfinite(self.x_bar) and np.isfinite(self.p_bar)):
            raise InvalidParameter("packet displacements must be finite")


TokenSpec = GaussianToken | SuperpositionToken


def _length_scale(spec) -> float:
    # Effective scale such that 12x of it clears the state's displaced center
    # by a full 12 widths: half_width = 12 * width + |center|.
    if isinstance(spec, GaussianSpec):
        return spec.width + abs(spec.mu_x) / _WIDTHS_OF_CLEARANCE
    if isinstance(spec, GaussianToken):
        return spec.sigma
    if isinstance(spec, SuperpositionToken):
        return spec.sigma + abs(spec.x_bar) / _WIDTHS_OF_CLEARANCE
    if isinstance(spec, (int, float)):
        if not (np.isfinite(spec) and spec > 0):
            raise InvalidParameter(f"length scale must be positive, got {spec}")
        return float(spec)
    raise InvalidParameter(f"cannot infer a length scale from {type(spec).__name__}")


def auto_grid(*specs, n_points: int = DEFAULT_N_POINTS) -> Grid:
    """Grid wide enough that every listed state (or bare length scale) keeps
    its tails far below TAIL_TOL: 12 widths of clearance beyond the farthest
    displaced packet center."""
    if not specs:
        raise InvalidParameter("auto_grid needs at least one spec or length scale")
    half_width = _WIDTHS_OF_CLEARANCE * max(_length_scale(s) for s in specs)
    return make_grid(half_width, n_points)


def check_position_support(amplitudes: np.ndarray, grid: Grid, label: str = "state") -> None:
    """Reject states whose outermost grid cells carry visible probability."""
    band = max(2, grid.n_points // 512)
    dens = np.abs(amplitudes) ** 2
    edge_mass = float((dens[:band].sum() + dens[-band:].sum()) * grid.dx)
    if edge_mass > TAIL_TOL:
        raise SupportEscape(
            f"{label} carries {edge_mass:.3e} probability at the grid edge; widen the grid"
        )


def _check_momentum_headroom(mu_p: float, width: float, grid: Grid, label: str) -> None:
    # Momentum-space tails sit at mu_p +- O(1/width); they must fit under the
    # lattice's momentum half width or the FFT aliases them silently.
    needed = abs(mu_p) + _WIDTHS_OF_CLEARANCE / width
    if needed > grid.momentum_half_width:
        raise SupportEscape(
            f"{label} needs momentum range {needed:.3g} but the lattice "
            f"only resolves |p| < {grid.momentum_half_width:.3g}; increase n_points"
        )


def _gaussian_amplitudes(x: np.ndarray, mu_x: float, mu_p: float, width: float) -> np.ndarray:
    envelope = np.exp(-((x - mu_x) ** 2) / (2.0 * width**2))
    return np.pi**-0.25 * width**-0.5 * np.exp(1j * mu_p * x) * envelope


def gaussian_wavefunction(spec: GaussianSpec, grid: Grid) -> WaveFunction:
    """Position-basis Gaussian, renormalized on the lattice."""
    amps = _gaussian_amplitudes(grid.positions, spec.mu_x, spec.mu_p, spec.width)
    check_position_support(amps, grid, "gaussian state")
    _check_momentum_headroom(spec.mu_p, spec.width, grid, "gaussian state")
    amps = amps / np.sqrt(np.sum(np.abs(amps) ** 2) * grid.dx)
    return WaveFunction(grid, Basis.POSITION, amps)


def superposition_norm(spec: SuperpositionToken, grid: Grid) -> float:
    """Squared norm of the unnormalized two-packet sum, by lattice quadrature."""
    x = grid.positions
    total = _gaussian_amplitudes(x, spec.x_bar, spec.p_bar, spec.sigma) + _gaussian_amplitudes(
        x, -spec.x_bar, -spec.p_bar, spec.sigma
    )
    return float(np.sum(np.abs(total) ** 2) * grid.dx)


def token_wavefunction(spec: TokenSpec, grid: Grid) -> WaveFunction:
    """Normalized token state on the given grid."""
    if isinstance(spec, GaussianToken):
        return gaussian_wavefunction(GaussianSpec(0.0, 0.0, spec.sigma), grid)
    x = grid.positions
    total = _gaussian_amplitudes(x, spec.x_bar, spec.p_bar, spec.sigma) + _gaussian_amplitudes(
        x, -spec.x_bar, -spec.p_bar, spec.sigma
    )
    norm_sq = float(np.sum(np.abs(total) ** 2) * grid.dx)
    if norm_sq <= 1e-14:
        raise InvalidState("the two packets cancel; the token norm is degenerate")
    amps = total / np.sqrt(norm_sq)
    check_position_support(amps, grid, "token state")
    _check_momentum_headroom(spec.p_bar, spec.sigma, grid, "token state")
    return WaveFunction(grid, Basis.POSITION, amps)


def token_overlap(spec: TokenSpec, g: float, g_prime: float, grid: Grid) -> complex:
    """<e(g)|e(g')> between two translates of the same token."""
    from .group import translate  # local import, group depends on grid only

    base = token_wavefunction(spec, grid)
    left = translate(base, g)
    right = translate(base, g_prime)
    return left.inner(right)
