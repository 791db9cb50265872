"""The recovery channel.

Measuring the token and undoing the measured translation leaves the message
state almost intact; the residual error is a random translation distributed
like the measurement noise. Averaged over that noise, the channel multiplies
every momentum-basis off-diagonal rho(p, p') by a factor depending only on
k = p - p':

  * asymptotic (unbounded acceptance window): the characteristic function
    integral p(g) exp(-i g k) dg of the outcome density,
  * finite window [-tau, tau]: the same transform with a triangular overlap
    weight, plus the contribution of the remainder outcome, after which Bob
    corrects nothing and keeps the translated state.

Both reduce to multiplicative kernels, so the channel never materializes the
token-and-message joint state. A direct mixture-of-translates path and a
seeded Monte Carlo protocol estimator provide independent cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatch, InvalidParameter, InvalidState, QuadratureGuard, SupportEscape
from .grid import Basis, DensityMatrix, Grid, WaveFunction, in_basis, make_grid
from .povm import OutcomeDistribution, Smearing, outcome_distribution, sample_outcomes
from .quadrature import odd_node_count, simpson_weights
from .states import (
    DEFAULT_N_POINTS,
    GaussianSpec,
    GaussianToken,
    SuperpositionToken,
    auto_grid,
    gaussian_wavefunction,
)
from .states import TAIL_TOL

KERNEL_PIN_TOL = 1e-6      # raw |factor(0) - 1| beyond this signals bad quadrature
FACTOR_BOUND_TOL = 1e-10
MIN_MC_SAMPLES = 1000
_CHUNK = 2048


@dataclass(frozen=True)
class DecoherenceKernel:
    """Multiplicative factor on momentum off-diagonals, tabulated on the 2n-1
    offset values of a grid's momentum lattice. factor(0) is pinned to exactly
    1, so applying the kernel preserves the momentum diagonal bitwise;
    trace_defect records the raw quadrature deviation before pinning."""

    grid: Grid
    kind: str
    factor: np.ndarray
    trace_defect: float
    tau: float | None = None

    def __post_init__(self) -> None:
        factor = np.asarray(self.factor)
        n = self.grid.n_points
        if factor.shape != (2 * n - 1,):
            raise InvalidState(f"kernel needs {2 * n - 1} factor values, got {factor.shape}")
        center = n - 1
        if factor[center] != 1.0:
            raise InvalidState("kernel factor at k = 0 must be pinned to exactly 1")
        if float(np.max(np.abs(factor))) > 1.0 + FACTOR_BOUND_TOL:
            raise InvalidState("kernel factor exceeds 1 in magnitude")
        mirror_dev = float(np.max(np.abs(np.conj(factor[::-1]) - factor)))
        if mirror_dev > 1e-9:
            raise InvalidState(f"kernel breaks conjugate symmetry by {mirror_dev:.3e}")
        arr = np.array(factor)
        arr.setflags(write=False)
        object.__setattr__(self, "factor", arr)

    @property
    def offsets(self) -> np.ndarray:
        return self.grid.offset_lattice()

    def factor_matrix(self) -> np.ndarray:
        n = self.grid.n_points
        idx = np.add.outer(np.arange(n), -np.arange(n)) + (n - 1)
        return self.factor[idx]


def _mirror_half(half: np.ndarray, defect_guard: float = KERNEL_PIN_TOL) -> tuple[np.ndarray, float]:
    """Assemble the full conjugate-symmetric factor from values on k >= 0 and
    pin the k = 0 entry to 1."""
    c0 = half[0]
    defect = abs(float(np.real(c0)) - 1.0) + abs(float(np.imag(c0)))
    if defect > defect_guard:
        raise QuadratureGuard(
            f"kernel normalization off by {defect:.3e}; refine the quadrature"
        )
    half = half / np.real(c0)
    full = np.concatenate([np.conj(half[:0:-1]), half])
    full[len(half) - 1] = 1.0
    return full, defect


def identity_kernel(grid: Grid) -> DecoherenceKernel:
    """Kernel of the perfectly recovered channel (factor 1 everywhere)."""
    factor = np.ones(2 * grid.n_points - 1)
    return DecoherenceKernel(grid=grid, kind="identity", factor=factor, trace_defect=0.0)


def asymptotic_kernel(dist: OutcomeDistribution, grid: Grid) -> DecoherenceKernel:
    """Unbounded-window kernel: the characteristic function of p(g) on the
    offset lattice of `grid` (the message grid, not the token's)."""
    total = float(np.trapezoid(dist.values, dx=dist.grid.dx))
    if abs(total - 1.0) > 10 * KERNEL_PIN_TOL:
        raise QuadratureGuard(f"outcome density integrates to {total!r}, not 1")
    n = grid.n_points
    k_half = grid.offset_lattice()[n - 1 :]
    half = dist.characteristic(k_half)
    factor, defect = _mirror_half(half.astype(complex) if np.iscomplexobj(half) else half)
    if not np.iscomplexobj(half):
        factor = factor.real
    return DecoherenceKernel(grid=grid, kind="asymptotic", factor=factor, trace_defect=defect)


def _transform(k: np.ndarray, nodes: np.ndarray, f: np.ndarray, symmetric: bool) -> np.ndarray:
    """sum_j f_j exp(-i g_j k), chunked over k; cosine-only when the result is
    known to be the symmetric half of a real total."""
    if symmetric:
        out = np.empty(k.shape)
        for i in range(0, len(k), 256):
            out[i : i + 256] = np.cos(np.outer(k[i : i + 256], nodes)) @ f
    else:
        out = np.empty(k.shape, dtype=complex)
        for i in range(0, len(k), 256):
            out[i : i + 256] = np.exp(-1j * np.outer(k[i : i + 256], nodes)) @ f
    return out


def finite_tau_kernel(
    dist: OutcomeDistribution,
    tau: float,
    grid: Grid,
    n_nodes: int | None = None,
) -> DecoherenceKernel:
    """Finite-window kernel c_tau(k).

    The double average over the window [-tau, tau] reduces, via the outcome
    noise u = g' - g, to the density transform weighted by the triangular
    window overlap (1 - |u| / 2 tau); the |u| term is integrated on [0, U]
    separately so every Simpson integrand stays smooth. The remainder outcome
    adds the transform of w_tau(g) / 2 tau, supported near the window edges.
    """
    if not (np.isfinite(tau) and tau > 0):
        raise InvalidParameter(f"tau must be positive, got {tau}")
    n = grid.n_points
    k_half = grid.offset_lattice()[n - 1 :]
    k_max = max(float(k_half[-1]), 1.0)
    du_limit = np.pi / (4.0 * k_max)  # 8 nodes per fastest phase oscillation
    du = min(du_limit / 2.0, dist.resolution_scale() / 40.0, tau / 20.0)
    radius = dist.quantile_radius(1e-16)
    U = min(2.0 * tau, radius)
    if n_nodes is not None:
        du = 2.0 * U / (n_nodes - 1)
        if du > du_limit:
            raise QuadratureGuard(
                f"{n_nodes} nodes leave a step {du:.3e} coarser than the "
                f"oscillation limit {du_limit:.3e} at |k| = {k_max:.3g}"
            )
    sym = dist.symmetric

    nodes = np.linspace(-U, U, odd_node_count(2 * U, du, minimum=9))
    w = simpson_weights(len(nodes), nodes[1] - nodes[0])
    window_avg = _transform(k_half, nodes, dist.density(nodes) * w, sym)

    half_nodes = np.linspace(0.0, U, odd_node_count(U, du, minimum=9))
    wh = simpson_weights(len(half_nodes), half_nodes[1] - half_nodes[0])
    if sym:
        edge_loss = _transform(
            k_half, half_nodes, dist.density(half_nodes) * half_nodes * wh, True
        ) / tau
    else:
        right = _transform(k_half, half_nodes, dist.density(half_nodes) * half_nodes * wh, False)
        left = _transform(k_half, -half_nodes, dist.density(-half_nodes) * half_nodes * wh, False)
        edge_loss = (right + left) / (2.0 * tau)

    band = min(tau, radius)
    if tau <= 2.0 * band:
        segments = [np.linspace(-tau, tau, odd_node_count(2 * tau, du, minimum=9))]
    else:
        count = odd_node_count(band, du, minimum=9)
        segments = [
            np.linspace(-tau, -tau + band, count),
            np.linspace(tau - band, tau, count),
        ]
    remainder = np.zeros_like(window_avg)
    for seg in segments:
        ws = simpson_weights(len(seg), seg[1] - seg[0])
        remainder = remainder + _transform(
            k_half, seg, dist.remainder_weight(seg, tau) * ws, sym
        ) / (2.0 * tau)

    half = window_avg - edge_loss + remainder
    factor, defect = _mirror_half(half)
    if not np.iscomplexobj(half):
        factor = factor.real
    return DecoherenceKernel(
        grid=grid, kind="finite_tau", factor=factor, trace_defect=defect, tau=tau
    )


def apply_kernel(rho: DensityMatrix, kernel: DecoherenceKernel) -> DensityMatrix:
    """Multiply momentum off-diagonals by the kernel factor; the result is
    returned in the momentum basis, where the diagonal matches the input
    bitwise (the k = 0 factor is exactly 1)."""
    if rho.grid != kernel.grid:
        raise BasisMismatch("kernel and state were built for different grids")
    mom = in_basis(rho, Basis.MOMENTUM)
    return DensityMatrix(rho.grid, Basis.MOMENTUM, mom.entries * kernel.factor_matrix())


def _edge_mass_lookup(rho: DensityMatrix):
    """Returns f(margin) = probability within `margin` of the grid edge."""
    pos = in_basis(rho, Basis.POSITION)
    diag = np.clip(pos.diagonal(), 0.0, None) * rho.grid.dx
    x = np.abs(rho.grid.positions)
    order = np.argsort(x)
    sorted_x = x[order]
    suffix = np.concatenate([np.cumsum(diag[order][::-1])[::-1], [0.0]])

    def edge_mass(margin: float) -> float:
        cut = rho.grid.half_width - margin
        idx = np.searchsorted(sorted_x, cut, side="left")
        return float(suffix[idx])

    return edge_mass


def apply_translate_mixture(
    rho: DensityMatrix,
    shifts,
    weights,
    check_support: bool = True,
) -> DensityMatrix:
    """Explicit mixture sum_j w_j U(g_j) rho U(g_j)^dag, in the momentum basis."""
    shifts = np.asarray(shifts, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if shifts.shape != weights.shape or shifts.ndim != 1:
        raise InvalidParameter("shifts and weights must be matching 1-D arrays")
    if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > 1e-9:
        raise InvalidParameter("mixture weights must be non-negative and sum to 1")
    if check_support:
        edge_mass = _edge_mass_lookup(rho)
        escaped = sum(
            w * edge_mass(abs(g) + 2 * rho.grid.dx) for g, w in zip(shifts, weights)
        )
        if escaped > TAIL_TOL:
            raise SupportEscape(
                f"mixture would push {escaped:.3e} probability off the grid"
            )
    mom = in_basis(rho, Basis.MOMENTUM)
    p = rho.grid.momenta
    acc = np.zeros_like(mom.entries)
    for g, w in zip(shifts, weights):
        ph = np.exp(-1j * g * p)
        acc += w * (mom.entries * ph[:, None] * ph.conj()[None, :])
    return DensityMatrix(rho.grid, Basis.MOMENTUM, acc)


def apply_by_convolution(
    rho: DensityMatrix,
    dist: OutcomeDistribution,
    n_nodes: int | None = None,
) -> DensityMatrix:
    """Oracle for apply_kernel: quadrature mixture of translates weighted by
    the outcome density."""
    radius = dist.quantile_radius(1e-16)
    du = dist.resolution_scale() / 40.0
    cutoff = dist.decay_cutoff()
    if np.isfinite(cutoff):
        # quadrature alias images sit at pi / du - |k|; keep them past the
        # density's transform cutoff for every lattice offset
        k_max = max(float(rho.grid.offset_lattice()[-1]), 1.0)
        du = min(du, np.pi / (k_max + cutoff))
    count = n_nodes if n_nodes is not None else odd_node_count(2 * radius, du, minimum=9)
    shifts = np.linspace(-radius, radius, count)
    weights = simpson_weights(count, shifts[1] - shifts[0]) * dist.density(shifts)
    weights = np.clip(weights, 0.0, None)
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-9:
        raise QuadratureGuard(
            f"mixture weights integrate to {total!r}; increase n_nodes or the grid"
        )
    return apply_translate_mixture(rho, shifts, weights, check_support=True)


@dataclass(frozen=True)
class ChannelReport:
    """Outcome summary of one channel evaluation."""

    fidelity: float
    purity_in: float
    purity_out: float | None
    trace_error: float
    method: str
    n_samples: int | None = None
    std_err: float | None = None

    def __post_init__(self) -> None:
        if not (-1e-9 <= self.fidelity <= 1.0 + 1e-9):
            raise InvalidState(f"fidelity {self.fidelity!r} outside [0, 1]")
        if self.method != "monte_carlo" and self.trace_error > 1e-8:
            raise InvalidState(f"trace error {self.trace_error:.3e} beyond 1e-8")

    def as_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "purity_in": self.purity_in,
            "purity_out": self.purity_out,
            "trace_error": self.trace_error,
            "method": self.method,
            "n_samples": self.n_samples,
            "std_err": self.std_err,
        }


def fidelity(rho_out: DensityMatrix, psi_in: WaveFunction) -> float:
    """<psi| rho |psi> for a pure input state."""
    if rho_out.grid != psi_in.grid:
        raise BasisMismatch("state and density matrix live on different grids")
    psi = in_basis(psi_in, rho_out.basis)
    value = rho_out.expectation(psi)
    if not (-1e-9 <= value <= 1.0 + 1e-9):
        raise InvalidState(f"fidelity {value!r} outside [0, 1]")
    return value


def _momentum_weights(psi: WaveFunction) -> tuple[np.ndarray, float]:
    mom = in_basis(psi, Basis.MOMENTUM)
    return mom.probability_density(), psi.grid.dp


def kernel_fidelity(kernel: DecoherenceKernel, psi: WaveFunction) -> float:
    """Fidelity of the kernel channel on a pure input, evaluated as the double
    lattice sum of factor(p - p') |psi(p)|^2 |psi(p')|^2 collapsed onto the
    2n-1 distinct momentum differences."""
    if psi.grid != kernel.grid:
        raise BasisMismatch("kernel and state were built for different grids")
    q, dp = _momentum_weights(psi)
    corr = np.correlate(q, q, mode="full")
    return float(np.real(np.sum(kernel.factor * corr)) * dp**2)


def kernel_report(kernel: DecoherenceKernel, psi: WaveFunction) -> ChannelReport:
    q, dp = _momentum_weights(psi)
    corr = np.correlate(q, q, mode="full")
    fid = float(np.real(np.sum(kernel.factor * corr)) * dp**2)
    return ChannelReport(
        fidelity=fid,
        purity_in=float((q.sum() * dp) ** 2),
        purity_out=float(np.sum(np.abs(kernel.factor) ** 2 * corr) * dp**2),
        trace_error=kernel.trace_defect,
        method="kernel",
    )


def _system_grid_for(system: GaussianSpec, dist: OutcomeDistribution, n_points: int) -> Grid:
    """Message grid wide enough for the state and for the channel: the lattice
    fidelity sum wraps translations with period 2 * half_width, so the grid
    must also span the outcome density plus the overlap width."""
    base = auto_grid(system, n_points=n_points)
    reach = 0.5 * dist.quantile_radius(1e-16) + 4.5 * system.width
    if reach <= base.half_width:
        return base
    return make_grid(reach, n_points)


def numeric_fidelity(
    system: GaussianSpec | WaveFunction,
    token: GaussianToken | SuperpositionToken | OutcomeDistribution,
    smearing: Smearing | float = Smearing(),
    system_grid: Grid | None = None,
    n_points: int = DEFAULT_N_POINTS,
) -> ChannelReport:
    """End-to-end channel fidelity through the kernel pipeline."""
    if isinstance(token, OutcomeDistribution):
        dist = token
    else:
        dist = outcome_distribution(token, smearing, n_points=n_points)
    if isinstance(system, WaveFunction):
        psi = system
    elif system_grid is not None:
        psi = gaussian_wavefunction(system, system_grid)
    else:
        psi = gaussian_wavefunction(system, _system_grid_for(system, dist, n_points))
    return kernel_report(asymptotic_kernel(dist, psi.grid), psi)


def _translation_overlap_sq(v: np.ndarray, q: np.ndarray, p: np.ndarray, dp: float) -> np.ndarray:
    """|<psi| U(v) |psi>|^2 = |sum_m q_m exp(-i v p_m) dp|^2, chunked over v."""
    out = np.empty(len(v))
    weights = q * dp
    for i in range(0, len(v), _CHUNK):
        amp = np.exp(-1j * np.outer(v[i : i + _CHUNK], p)) @ weights
        out[i : i + _CHUNK] = np.abs(amp) ** 2
    return out


def mc_protocol(
    system: GaussianSpec | WaveFunction,
    token: GaussianToken | SuperpositionToken | OutcomeDistribution,
    smearing: Smearing | float = Smearing(),
    tau: float = 10.0,
    n_samples: int = 10_000,
    seed: int | np.random.Generator | None = None,
    system_grid: Grid | None = None,
    n_points: int = DEFAULT_N_POINTS,
    compute_purity: bool = True,
) -> ChannelReport:
    """Seeded protocol simulation: draw the unknown frame offset uniformly on
    [-tau, tau], measure the token, apply the measured correction (or nothing
    on the remainder outcome), and average the overlap with the input.

    The per-sample residual translation v enters only through the exact
    overlap |<psi|U(v)|psi>|^2, so no per-sample state is materialized.
    """
    if seed is None:
        raise InvalidParameter("stochastic runs need an explicit seed")
    if n_samples < MIN_MC_SAMPLES:
        raise InvalidParameter(f"need at least {MIN_MC_SAMPLES} samples, got {n_samples}")
    if not (np.isfinite(tau) and tau > 0):
        raise InvalidParameter(f"tau must be positive, got {tau}")
    if isinstance(system, WaveFunction):
        psi = system
    else:
        psi = gaussian_wavefunction(system, system_grid or auto_grid(system, n_points=n_points))
    if isinstance(token, OutcomeDistribution):
        dist = token
    else:
        dist = outcome_distribution(token, smearing, n_points=n_points)
    q, dp = _momentum_weights(psi)
    p = psi.grid.momenta

    rng = np.random.default_rng(seed)
    offsets = rng.uniform(-tau, tau, n_samples)
    measured, is_remainder = sample_outcomes(dist, offsets, tau, rng)
    residual = np.where(is_remainder, offsets, offsets - measured)

    overlaps = _translation_overlap_sq(residual, q, p, dp)
    fid = float(overlaps.mean())
    std_err = float(overlaps.std(ddof=1) / np.sqrt(n_samples))

    purity_out = None
    if compute_purity:
        k = psi.grid.offset_lattice()
        acc = np.zeros(len(k), dtype=complex)
        for i in range(0, n_samples, _CHUNK):
            acc += np.exp(-1j * np.outer(residual[i : i + _CHUNK], k)).sum(axis=0)
        empirical_char = acc / n_samples
        corr = np.correlate(q, q, mode="full")
        purity_out = float(np.sum(np.abs(empirical_char) ** 2 * corr) * dp**2)

    return ChannelReport(
        fidelity=fid,
        purity_in=float((q.sum() * dp) ** 2),
        purity_out=purity_out,
        trace_error=0.0,
        method="monte_carlo",
        n_samples=n_samples,
        std_err=std_err,
    )
