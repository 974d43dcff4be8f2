"""Counter-based sampling of the uniform random input."""

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from numpy.typing import NDArray

from ..errors import ConfigurationError, InvalidInputError
from ..grid import FloatArray


@dataclass(frozen=True)
class RandomInputSpec:
    """Independent uniform components on a box.

    Parameters
    ----------
    box
        One ``(low, high)`` interval per component.
    """

    box: tuple[tuple[float, float], ...]
    distribution: Literal["uniform"] = "uniform"

    def __post_init__(self) -> None:
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if not box:
            raise ConfigurationError("random input needs at least one component")
        for lo, hi in box:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ConfigurationError(f"degenerate interval ({lo}, {hi})")
        if self.distribution != "uniform":
            raise ConfigurationError(
                f"only uniform inputs are supported, got {self.distribution}"
            )
        object.__setattr__(self, "box", box)

    @property
    def dim(self) -> int:
        return len(self.box)

    @property
    def lower(self) -> FloatArray:
        return np.array([lo for lo, _ in self.box])

    @property
    def upper(self) -> FloatArray:
        return np.array([hi for _, hi in self.box])

    @property
    def center(self) -> FloatArray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, z: Sequence[float] | FloatArray) -> bool:
        z = np.asarray(z, dtype=np.float64)
        return bool(np.all(z >= self.lower) and np.all(z <= self.upper))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Realizations of the random input with stable sample IDs."""

    spec: RandomInputSpec
    z_values: FloatArray
    master_seed: int
    indices: NDArray[np.int64]

    def __len__(self) -> int:
        return len(self.indices)

    def head(self, count: int) -> "SampleSet":
        """First ``count`` samples (same IDs and values)."""
        if not 1 <= count <= len(self):
            raise InvalidInputError(f"cannot take {count} of {len(self)} samples")
        return SampleSet(
            self.spec, self.z_values[:count], self.master_seed, self.indices[:count]
        )


def draw_samples(
    spec: RandomInputSpec, count: int, seed: int, start: int = 0
) -> SampleSet:
    """Draw samples ``start .. start + count - 1`` of the stream keyed by ``seed``.

    Sample ``i`` occupies positions ``[i d_z, (i + 1) d_z)`` of a Philox
    counter stream, so it depends only on ``(seed, i)``.
    """
    if count < 1:
        raise InvalidInputError(f"count must be positive, got {count}")
    if start < 0:
        raise InvalidInputError(f"start must be nonnegative, got {start}")

    generator = np.random.Generator(np.random.Philox(key=seed))
    uniforms = generator.random((start + count, spec.dim))[start:]
    z_values = spec.lower + (spec.upper - spec.lower) * uniforms
    indices = np.arange(start, start + count, dtype=np.int64)
    return SampleSet(spec, z_values, seed, indices)


def replication_seed(seed: int, replication: int) -> int:
    """Independent 64-bit key for replication ``replication`` of a study."""
    state = np.random.SeedSequence([seed, replication]).generate_state(1, np.uint64)
    return int(state[0])
