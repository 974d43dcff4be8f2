"""BGK relaxation and the fast spectral Boltzmann operator for Maxwell molecules.

The Boltzmann operator uses the Carleman representation of the 2D Maxwell
pseudo-molecule kernel with ``B = 1/(2 pi)``, so the loss term is ``rho f``.
Writing the gain integral over pairs of orthogonal segments of half-length
``R`` and discretizing the segment direction with ``n_angle`` uniform angles
in ``[0, pi)`` decouples each angle into a product of two line averages:

    Q(f)(v) = 1/M sum_p A_p f(v) A'_p f(v) - f(v) (1/M sum_p A_p A'_p) f(v)

where ``A_p`` integrates ``f`` along direction ``e_p`` and ``A'_p`` along the
orthogonal direction. In Fourier space each line integral is a multiplication
by ``2R sinc(R k.e / L)``. The grid values are zero-padded to a period ``2L``
satisfying the usual anti-aliasing bound for a support of radius ``V_max``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .errors import ConfigurationError, GridMismatchError, InvalidInputError
from .grid import (
    Distribution,
    FloatArray,
    VelocityGrid,
    conserved_quantities,
    maxwellian,
    moments,
)


ANTI_ALIASING_FACTOR = (3.0 + math.sqrt(2.0)) / 2.0
DEFAULT_N_ANGLE = 8


@dataclass(frozen=True)
class RelaxationRate:
    """Collision frequency ``mu`` and Knudsen number ``eps``."""

    mu: float
    eps: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise InvalidInputError(f"mu must be positive, got {self.mu}")
        if not (np.isfinite(self.eps) and self.eps > 0):
            raise InvalidInputError(f"eps must be positive, got {self.eps}")

    @property
    def frequency(self) -> float:
        """Effective relaxation frequency ``mu / eps``."""
        return self.mu / self.eps


def bgk_operator(f: Distribution, rate: RelaxationRate) -> Distribution:
    """Return ``mu (M[f] - f)``."""
    equilibrium = maxwellian(moments(f), f.grid, f.spatial)
    return f.with_values(rate.mu * (equilibrium.values - f.values))


@dataclass(frozen=True, eq=False)
class SpectralPlan:
    """Precomputed Fourier weights of the decoupled collision kernel.

    ``kernel_weights`` has shape ``(n_angle, 2, n_padded, n_padded)`` and holds
    the two line-integral multipliers per angle over the full FFT spectrum;
    ``loss_weights`` holds their angular average of products. Both are real
    and even in the wavenumber, hence hermitian-symmetric.
    """

    grid: VelocityGrid
    n_angle: int
    n_padded: int
    domain_period: float
    support_radius: float
    truncation_radius: float
    kernel_weights: FloatArray
    loss_weights: FloatArray
    _half_kernel: FloatArray = field(repr=False)
    _half_loss: FloatArray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.grid.n_per_dim

    @property
    def offset(self) -> int:
        """Number of padding cells on each side of the grid."""
        return (self.n_padded - self.grid.n_per_dim) // 2


def _padded_size(n_per_dim: int) -> int:
    n_padded = fft.next_fast_len(math.ceil(ANTI_ALIASING_FACTOR * n_per_dim), True)
    while n_padded % 2:
        n_padded = fft.next_fast_len(n_padded + 1, True)
    return n_padded


def build_spectral_plan(
    grid: VelocityGrid, n_angle: int = DEFAULT_N_ANGLE
) -> SpectralPlan:
    """Precompute the angular-quadrature convolution weights for ``grid``.

    Parameters
    ----------
    grid
        Velocity grid; ``n_per_dim`` must be even.
    n_angle
        Number of uniform angles in ``[0, pi)``, at least 4.

    Returns
    -------
    SpectralPlan
        Immutable plan, valid only for ``grid``.
    """
    if grid.n_per_dim % 2:
        raise ConfigurationError("spectral plan needs an even number of nodes")
    if n_angle < 4:
        raise ConfigurationError(f"n_angle must be >= 4, got {n_angle}")

    n_padded = _padded_size(grid.n_per_dim)
    half_period = 0.5 * n_padded * grid.spacing
    support = grid.extent
    truncation = 2.0 * support

    wavenumbers = np.fft.fftfreq(n_padded, d=1.0 / n_padded)
    kx, ky = np.meshgrid(wavenumbers, wavenumbers, indexing="ij")

    theta = np.pi * np.arange(n_angle) / n_angle
    cos_t = np.cos(theta)[:, None, None]
    sin_t = np.sin(theta)[:, None, None]
    along = kx * cos_t + ky * sin_t
    across = -kx * sin_t + ky * cos_t

    def _line_integral(s: FloatArray) -> FloatArray:
        return 2.0 * truncation * np.sinc(truncation * s / half_period)

    kernel_weights = np.stack([_line_integral(along), _line_integral(across)], 1)
    loss_weights = np.mean(kernel_weights[:, 0] * kernel_weights[:, 1], axis=0)

    n_half = n_padded // 2 + 1
    return SpectralPlan(
        grid=grid,
        n_angle=n_angle,
        n_padded=n_padded,
        domain_period=2.0 * half_period,
        support_radius=support,
        truncation_radius=truncation,
        kernel_weights=kernel_weights,
        loss_weights=loss_weights,
        _half_kernel=np.ascontiguousarray(kernel_weights[..., :n_half]),
        _half_loss=np.ascontiguousarray(loss_weights[..., :n_half]),
    )


def boltzmann_operator(
    f: Distribution, plan: SpectralPlan, workers: int | None = None
) -> Distribution:
    """Evaluate ``Q(f, f)`` for Maxwell molecules with unit loss frequency.

    Leading axes of ``f.values`` (cells, samples) are treated as a batch.

    Parameters
    ----------
    f
        Distribution on ``plan.grid``.
    plan
        Spectral plan built for the same grid.
    workers
        Threads used inside each FFT, forwarded to ``scipy.fft``.
    """
    if f.grid != plan.grid:
        raise GridMismatchError(
            f"plan was built for {plan.grid}, distribution lives on {f.grid}"
        )

    offset = plan.offset
    n = plan.grid.n_per_dim
    pad = [(0, 0)] * (f.values.ndim - 2) + [(offset, offset), (offset, offset)]
    padded = np.pad(f.values, pad)
    shape = (plan.n_padded, plan.n_padded)

    spectrum = fft.rfft2(padded, workers=workers)
    gain = np.zeros_like(padded)
    for weights in plan._half_kernel:
        along = fft.irfft2(weights[0] * spectrum, s=shape, workers=workers)
        across = fft.irfft2(weights[1] * spectrum, s=shape, workers=workers)
        gain += along * across
    gain /= plan.n_angle

    loss = padded * fft.irfft2(plan._half_loss * spectrum, s=shape, workers=workers)
    collision = (gain - loss)[..., offset : offset + n, offset : offset + n]
    return f.with_values(collision)


def loss_frequency_bound(f: Distribution) -> float:
    """Upper bound of the loss frequency ``rho`` over every state in ``f``."""
    return float(np.max(conserved_quantities(f)[..., 0]))
