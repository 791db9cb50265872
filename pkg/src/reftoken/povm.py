"""Covariant position measurement of the token.

The measurement of a token translated by g produces outcomes distributed with
density p(g' - g), where p is the token's position density convolved with a
Gaussian acceptance profile of width delta (delta = 0 is the sharp position
measurement). When outcomes are only accepted inside [-tau, tau], the leftover
probability is the remainder weight w_tau(g).

Closed erf-based forms cover both shipped token families; matrix-valued tokens
fall back to a lattice-tabulated density. Sampling inverts the tabulated
cumulative, so one code path serves unimodal and bimodal densities alike.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import erf

from .errors import InvalidParameter, InvalidState, QuadratureGuard
from .grid import Basis, DensityMatrix, Grid, State, WaveFunction, in_basis
from .group import translate
from .quadrature import odd_node_count, simpson_weights, trapezoid_weights
from .states import (
    DEFAULT_N_POINTS,
    GaussianToken,
    SuperpositionToken,
    TokenSpec,
    auto_grid,
    token_wavefunction,
)

NORMALIZATION_TOL = 1e-9
_SQRT_PI = float(np.sqrt(np.pi))


@dataclass(frozen=True)
class Smearing:
    """Gaussian acceptance width of the measurement; 0 means sharp."""

    delta: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.delta) and self.delta >= 0):
            raise InvalidParameter(f"smearing width must be non-negative, got {self.delta}")


def _as_smearing(smearing) -> Smearing:
    if isinstance(smearing, Smearing):
        return smearing
    return Smearing(float(smearing))


def _gaussian_token_density(sigma: float, delta: float):
    s = np.hypot(sigma, delta)

    def density(g):
        g = np.asarray(g, dtype=float)
        return np.exp(-(g**2) / s**2) / (_SQRT_PI * s)

    def cdf(g):
        g = np.asarray(g, dtype=float)
        return 0.5 * (1.0 + erf(g / s))

    return density, cdf, s


def _superposition_token_density(spec: SuperpositionToken, delta: float):
    sigma, x_bar, p_bar = spec.sigma, spec.x_bar, spec.p_bar
    s = np.hypot(sigma, delta)
    norm = 2.0 * (1.0 + np.exp(-(x_bar**2) / sigma**2 - p_bar**2 * sigma**2))
    cross_amp = 2.0 * np.exp(-(x_bar**2) / sigma**2 - p_bar**2 * sigma**2 * delta**2 / s**2)
    osc = 2.0 * p_bar * sigma**2 / s**2  # cosine rate the smearing leaves behind

    def density(g):
        g = np.asarray(g, dtype=float)
        packets = np.exp(-((g - x_bar) ** 2) / s**2) + np.exp(-((g + x_bar) ** 2) / s**2)
        cross = cross_amp * np.exp(-(g**2) / s**2) * np.cos(osc * g)
        return (packets + cross) / (norm * _SQRT_PI * s)

    def cdf(g):
        g = np.asarray(g, dtype=float)
        packets = 0.5 * (erf((g - x_bar) / s) + erf((g + x_bar) / s)) + 1.0
        # integral of exp(-u^2/s^2) cos(b u) up to g, via the complex erf
        shifted = erf(g / s - 0.5j * osc * s)
        cross = cross_amp * np.exp(-(osc * s) ** 2 / 4.0) * 0.5 * np.real(1.0 + shifted)
        return (packets + cross) / norm

    return density, cdf, s


def _closed_forms(spec: TokenSpec, delta: float):
    if isinstance(spec, GaussianToken):
        return _gaussian_token_density(spec.sigma, delta)
    return _superposition_token_density(spec, delta)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Measurement-outcome density of a token at the origin, tabulated on a
    grid, with closed forms attached when the token is a known family."""

    grid: Grid
    values: np.ndarray
    cumulative: np.ndarray
    delta: float
    token: TokenSpec | None
    symmetric: bool

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        cumulative = np.asarray(self.cumulative, dtype=float)
        n = self.grid.n_points
        if values.shape != (n,) or cumulative.shape != (n,):
            raise InvalidState("density and cumulative must match the grid size")
        if np.any(values < -1e-12):
            raise InvalidState("outcome density has negative entries")
        total = float(np.sum(trapezoid_weights(n, self.grid.dx) * values))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise QuadratureGuard(
                f"outcome density integrates to {total!r}; widen or refine the grid"
            )
        for name, arr in (("values", values), ("cumulative", cumulative)):
            arr = np.array(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def density(self, g):
        if self.token is not None:
            fn, _, _ = _closed_forms(self.token, self.delta)
            return fn(g)
        return np.interp(g, self.grid.positions, self.values, left=0.0, right=0.0)

    def cdf(self, g):
        if self.token is not None:
            _, fn, _ = _closed_forms(self.token, self.delta)
            return fn(g)
        return np.interp(g, self.grid.positions, self.cumulative, left=0.0, right=1.0)

    def decay_cutoff(self) -> float:
        """|k| beyond which the transform provably sits under ~1e-17.

        Both closed-form densities are Gaussian convolutions of scale
        s = hypot(sigma, delta), so their transforms carry the envelope
        2 exp(-s^2 k^2 / 4); a tabulated density inherits the envelope of its
        smearing only. Returns inf when no envelope is available.
        """
        if self.token is not None:
            scale = float(np.hypot(self.token.sigma, self.delta))
        elif self.delta > 0:
            scale = self.delta
        else:
            return np.inf
        return 2.0 * np.sqrt(40.0 + np.log(2.0)) / scale

    def _transform_lattice(self, k: np.ndarray, nodes: np.ndarray, f: np.ndarray):
        if self.symmetric:
            out = np.empty(k.shape)
            for i in range(0, len(k), 256):
                out[i : i + 256] = np.cos(np.outer(k[i : i + 256], nodes)) @ f
        else:
            out = np.empty(k.shape, dtype=complex)
            for i in range(0, len(k), 256):
                out[i : i + 256] = np.exp(-1j * np.outer(k[i : i + 256], nodes)) @ f
        return out

    def characteristic(self, k):
        """integral p(g) exp(-i g k) dg, with the phase convention of
        translate(); real for symmetric densities.

        Values beyond decay_cutoff() are returned as exact 0: quadrature noise
        there would exceed the true magnitude. Closed-form densities use their
        own fine Simpson nodes; tabulated ones sum over their lattice, valid
        while alias images at 2 pi / dx - |k| stay under the envelope.
        """
        k = np.atleast_1d(np.asarray(k, dtype=float))
        cutoff = self.decay_cutoff()
        live = np.abs(k) <= cutoff
        out = np.zeros(k.shape) if self.symmetric else np.zeros(k.shape, dtype=complex)
        if not np.any(live):
            return out
        if self.token is not None:
            density_fn, _, s = _closed_forms(self.token, self.delta)
            radius = self.quantile_radius(1e-16)
            step = self.resolution_scale() / 40.0
            count = odd_node_count(2.0 * radius, step, minimum=9)
            nodes = np.linspace(-radius, radius, count)
            f = density_fn(nodes) * simpson_weights(count, nodes[1] - nodes[0])
        else:
            k_top = float(np.max(np.abs(k[live])))
            if not np.isfinite(cutoff) and k_top > 0.5 * np.pi / self.grid.dx:
                raise QuadratureGuard(
                    f"tabulated density cannot resolve the transform at |k| = "
                    f"{k_top:.3g}; lattice aliases beyond {0.5 * np.pi / self.grid.dx:.3g}"
                )
            nodes = self.grid.positions
            f = self.values * trapezoid_weights(self.grid.n_points, self.grid.dx)
        out[live] = self._transform_lattice(k[live], nodes, f)
        return out

    def remainder_weight(self, g, tau: float):
        """Probability of no outcome in [-tau, tau] when the token sits at g."""
        if not (np.isfinite(tau) and tau > 0):
            raise InvalidParameter(f"tau must be positive, got {tau}")
        g = np.asarray(g, dtype=float)
        w = 1.0 - (self.cdf(tau - g) - self.cdf(-tau - g))
        return np.clip(w, 0.0, 1.0)

    def resolution_scale(self) -> float:
        """Width of the finest feature of the density; sets quadrature steps."""
        if isinstance(self.token, GaussianToken):
            return float(np.hypot(self.token.sigma, self.delta))
        if isinstance(self.token, SuperpositionToken):
            s = float(np.hypot(self.token.sigma, self.delta))
            if self.token.p_bar == 0:
                return s
            wavelength = np.pi * s**2 / (abs(self.token.p_bar) * self.token.sigma**2)
            return float(min(s, wavelength / 8.0))
        return 2.0 * self.grid.dx

    def support_radius(self) -> float:
        return self.grid.half_width

    def quantile_radius(self, eps: float = 1e-16) -> float:
        """Radius outside which the tabulated density holds mass below eps."""
        x = self.grid.positions
        inside = (self.cumulative > eps) & (self.cumulative < 1.0 - eps)
        if not np.any(inside):
            return self.grid.half_width
        sel = x[inside]
        pad = 2.0 * self.grid.dx
        return float(max(abs(sel[0]), abs(sel[-1])) + pad)


def _tabulated_from_state(token: State, delta: float) -> tuple[Grid, np.ndarray]:
    pos = in_basis(token, Basis.POSITION)
    grid = pos.grid
    if isinstance(pos, WaveFunction):
        dens = pos.probability_density()
    else:
        dens = np.clip(pos.diagonal(), 0.0, None)
    if delta > 0:
        # 4 cells keep the discrete smearing kernel honest and push transform
        # alias images under the smearing envelope.
        if delta < 4.0 * grid.dx:
            raise QuadratureGuard(
                f"smearing width {delta} is below four grid steps ({4 * grid.dx:.3g}); "
                "the discrete kernel cannot resolve it"
            )
        # odd-length kernel so mode="same" lands on the exact lattice centering
        reach = int(np.ceil(9.0 * delta / grid.dx))
        offsets = np.arange(-reach, reach + 1) * grid.dx
        kernel = np.exp(-((offsets / delta) ** 2))
        kernel /= kernel.sum() * grid.dx
        dens = fftconvolve(dens, kernel, mode="same") * grid.dx
        dens = np.clip(dens, 0.0, None)
    return grid, dens


def _cumulative_trapezoid(values: np.ndarray, step: float) -> np.ndarray:
    out = np.empty(len(values))
    out[0] = 0.0
    np.cumsum((values[1:] + values[:-1]) * (0.5 * step), out=out[1:])
    return out


def outcome_distribution(
    token: TokenSpec | State,
    smearing: Smearing | float = Smearing(),
    grid: Grid | None = None,
    n_points: int = DEFAULT_N_POINTS,
) -> OutcomeDistribution:
    """Build the outcome density of a token measured at the origin."""
    delta = _as_smearing(smearing).delta
    if isinstance(token, (GaussianToken, SuperpositionToken)):
        if grid is None:
            _, _, s = _closed_forms(token, delta)
            grid = auto_grid(token, float(s), n_points=n_points)
        density_fn, cdf_fn, _ = _closed_forms(token, delta)
        values = np.clip(density_fn(grid.positions), 0.0, None)
        cumulative = cdf_fn(grid.positions)
        symmetric = True
        spec = token
    else:
        if grid is not None and grid != token.grid:
            raise InvalidParameter("tabulated tokens keep their own grid; omit the grid argument")
        grid, values = _tabulated_from_state(token, delta)
        cumulative = _cumulative_trapezoid(values, grid.dx)
        mirrored = values[1:][::-1]
        symmetric = bool(np.max(np.abs(values[1:] - mirrored)) <= 1e-12 * max(values.max(), 1e-300))
        spec = None
    return OutcomeDistribution(
        grid=grid,
        values=values,
        cumulative=cumulative,
        delta=delta,
        token=spec,
        symmetric=symmetric,
    )


def outcome_density(token, smearing, g, grid: Grid | None = None):
    """Density value(s) of the measurement outcome at g."""
    return outcome_distribution(token, smearing, grid).density(g)


def remainder_weight(token, smearing, g, tau: float, grid: Grid | None = None):
    """Probability that a token translated by g yields no outcome in [-tau, tau]."""
    return outcome_distribution(token, smearing, grid).remainder_weight(g, tau)


def check_covariance(
    token: TokenSpec,
    smearing: Smearing | float,
    shift: float,
    grid: Grid | None = None,
    n_points: int = DEFAULT_N_POINTS,
) -> float:
    """Max deviation between the outcome density of the translated token and
    the untranslated density evaluated at shifted arguments."""
    delta = _as_smearing(smearing).delta
    if not isinstance(token, (GaussianToken, SuperpositionToken)):
        raise InvalidParameter("covariance checks need a token family with a closed-form density")
    density_fn, _, s = _closed_forms(token, delta)
    if grid is None:
        scale = 12.0 * max(
            s,
            token.sigma,
            (abs(token.x_bar) + 3 * token.sigma) if isinstance(token, SuperpositionToken) else 0.0,
        )
        grid = Grid(scale + abs(shift), n_points)
    moved = translate(token_wavefunction(token, grid), shift)
    numeric = outcome_distribution(moved, Smearing(delta)).values
    reference = density_fn(grid.positions - shift)
    return float(np.max(np.abs(numeric - reference)))


@dataclass(frozen=True)
class MeasurementOutcome:
    remainder: bool
    value: float | None


def sample_outcomes(
    dist: OutcomeDistribution,
    offsets,
    tau: float,
    rng,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized draw: for each token offset, either an accepted outcome in
    [-tau, tau] (returned value, mask False) or the remainder (NaN, mask True).

    rng is a seed or a numpy Generator; sequences are reproducible per seed,
    and every entry consumes the same number of draws regardless of branch.
    """
    if not (np.isfinite(tau) and tau > 0):
        raise InvalidParameter(f"tau must be positive, got {tau}")
    rng = np.random.default_rng(rng)
    offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
    w = dist.remainder_weight(offsets, tau)
    branch = rng.uniform(size=offsets.shape)
    u = rng.uniform(size=offsets.shape)
    is_remainder = branch < w
    lo = dist.cdf(-tau - offsets)
    hi = dist.cdf(tau - offsets)
    targets = lo + u * (hi - lo)
    drawn = np.interp(targets, dist.cumulative, dist.grid.positions)
    values = np.clip(offsets + drawn, -tau, tau)
    values[is_remainder] = np.nan
    return values, is_remainder


def sample_outcome(dist: OutcomeDistribution, offset: float, tau: float, rng) -> MeasurementOutcome:
    values, is_remainder = sample_outcomes(dist, [offset], tau, rng)
    if is_remainder[0]:
        return MeasurementOutcome(remainder=True, value=None)
    return MeasurementOutcome(remainder=False, value=float(values[0]))
