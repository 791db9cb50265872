"""Discretization substrate: a uniform position lattice, its discrete-Fourier
momentum lattice, and state containers tagged by the basis they live in.

Conventions (hbar = 1):

    x_j = (j - n//2) * dx,   dx = 2 L / n,
    p_m = (m - n//2) * dp,   dp = pi / L,

so that dx * dp * n = 2 pi exactly and the centered FFT realizes the unitary
continuum pair

    psi~(p) = (2 pi)^(-1/2) * integral dx exp(-i p x) psi(x),
    psi(x)  = (2 pi)^(-1/2) * integral dp exp(+i p x) psi~(p).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatch, InvalidParameter, InvalidState

NORM_TOL = 1e-10
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8

_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


class Basis(enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


@dataclass(frozen=True)
class Grid:
    """Uniform lattice on [-half_width, half_width) with conjugate momenta."""

    half_width: float
    n_points: int

    def __post_init__(self) -> None:
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise InvalidParameter(f"grid half width must be positive, got {self.half_width}")
        if int(self.n_points) != self.n_points or self.n_points < 8:
            raise InvalidParameter(f"grid needs at least 8 points, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @property
    def dp(self) -> float:
        return float(np.pi) / self.half_width

    @property
    def momentum_half_width(self) -> float:
        return float(np.pi) / self.dx

    @property
    def positions(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.dx

    @property
    def momenta(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.dp

    def axis(self, basis: Basis) -> np.ndarray:
        return self.positions if basis is Basis.POSITION else self.momenta

    def step(self, basis: Basis) -> float:
        return self.dx if basis is Basis.POSITION else self.dp

    def offset_lattice(self) -> np.ndarray:
        """All n**2 pairwise momentum differences collapse onto these 2n-1 values."""
        n = self.n_points
        return (np.arange(2 * n - 1) - (n - 1)) * self.dp


def make_grid(half_width: float, n_points: int) -> Grid:
    return Grid(float(half_width), n_points)


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WaveFunction:
    """Pure state sampled on a grid; amplitudes are continuum-normalized, so
    sum(|psi_j|^2) * step = 1 in the current basis."""

    grid: Grid
    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.amplitudes)
        if arr.shape != (self.grid.n_points,):
            raise InvalidState(f"expected {self.grid.n_points} amplitudes, got shape {arr.shape}")
        if not np.all(np.isfinite(arr.view(float))):
            raise InvalidState("amplitudes contain non-finite entries")
        object.__setattr__(self, "amplitudes", arr)
        norm = self.norm()
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"wavefunction norm {norm!r} deviates from 1 beyond {NORM_TOL}")

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.step(self.basis)))

    def inner(self, other: "WaveFunction") -> complex:
        _require_compatible(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.grid.step(self.basis))

    def probability_density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def mean(self) -> float:
        """First moment of |psi|^2 along the current axis."""
        dens = self.probability_density()
        return float(np.sum(self.grid.axis(self.basis) * dens) * self.grid.step(self.basis))

    def variance(self) -> float:
        dens = self.probability_density()
        axis = self.grid.axis(self.basis)
        step = self.grid.step(self.basis)
        mu = np.sum(axis * dens) * step
        return float(np.sum((axis - mu) ** 2 * dens) * step)

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.grid, self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state as a sampled kernel: entries[j, l] approximates the
    continuum <a_j| rho |a_l>, so trace(entries) * step = 1."""

    grid: Grid
    basis: Basis
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.entries)
        n = self.grid.n_points
        if arr.shape != (n, n):
            raise InvalidState(f"expected a {n}x{n} kernel, got shape {arr.shape}")
        if not np.all(np.isfinite(arr.view(float))):
            raise InvalidState("density matrix contains non-finite entries")
        object.__setattr__(self, "entries", arr)
        dev = float(np.max(np.abs(arr - arr.conj().T)))
        if dev > HERMITICITY_TOL:
            raise InvalidState(f"hermiticity violated by {dev:.3e}")
        tr = self.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace {tr!r} deviates from 1 beyond {TRACE_TOL}")

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)) * self.grid.step(self.basis))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.entries))

    def expectation(self, psi: WaveFunction) -> float:
        """<psi| rho |psi> for a wavefunction on the same grid and basis."""
        if psi.grid != self.grid or psi.basis != self.basis:
            raise BasisMismatch("wavefunction and density matrix must share grid and basis")
        step = self.grid.step(self.basis)
        val = np.vdot(psi.amplitudes, self.entries @ psi.amplitudes) * step**2
        return float(np.real(val))

    def min_eigenvalue(self) -> float:
        """Smallest spectral weight of the state; O(n^3), intended for checks."""
        vals = np.linalg.eigvalsh(self.entries)
        return float(vals[0] * self.grid.step(self.basis))

    def validate_psd(self, tol: float = PSD_TOL) -> float:
        lo = self.min_eigenvalue()
        if lo < -tol:
            raise InvalidState(f"smallest eigenvalue {lo:.3e} below -{tol}")
        return lo


State = WaveFunction | DensityMatrix


def _require_compatible(a, b) -> None:
    if a.grid != b.grid:
        raise BasisMismatch("states live on different grids")
    if a.basis != b.basis:
        raise BasisMismatch("states are expressed in different bases")


def _centered_fft(arr: np.ndarray, axis: int) -> np.ndarray:
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(arr, axes=axis), axis=axis), axes=axis)


def _centered_ifft(arr: np.ndarray, axis: int) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(arr, axes=axis), axis=axis), axes=axis)


def to_momentum_basis(state: State) -> State:
    """Unitary change to the momentum lattice; errors if already there."""
    if state.basis is not Basis.POSITION:
        raise BasisMismatch("state is already in the momentum basis")
    g = state.grid
    if isinstance(state, WaveFunction):
        amps = _centered_fft(state.amplitudes, 0) * (g.dx / _SQRT_2PI)
        return WaveFunction(g, Basis.MOMENTUM, amps)
    # Rows carry exp(-i p x) dx, columns the conjugate transform.
    ker = _centered_fft(state.entries, 0) * (g.dx / _SQRT_2PI)
    ker = _centered_ifft(ker, 1) * (g.n_points * g.dx / _SQRT_2PI)
    return DensityMatrix(g, Basis.MOMENTUM, ker)


def to_position_basis(state: State) -> State:
    """Inverse of to_momentum_basis."""
    if state.basis is not Basis.MOMENTUM:
        raise BasisMismatch("state is already in the position basis")
    g = state.grid
    if isinstance(state, WaveFunction):
        amps = _centered_ifft(state.amplitudes, 0) * (g.n_points * g.dp / _SQRT_2PI)
        return WaveFunction(g, Basis.POSITION, amps)
    ker = _centered_ifft(state.entries, 0) * (g.n_points * g.dp / _SQRT_2PI)
    ker = _centered_fft(ker, 1) * (g.dp / _SQRT_2PI)
    return DensityMatrix(g, Basis.POSITION, ker)


def in_basis(state: State, basis: Basis) -> State:
    if state.basis is basis:
        return state
    return to_momentum_basis(state) if basis is Basis.MOMENTUM else to_position_basis(state)


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2); equals 1 for projectors, smaller for proper mixtures."""
    step = rho.grid.step(rho.basis)
    return float(np.sum(np.abs(rho.entries) ** 2) * step**2)
