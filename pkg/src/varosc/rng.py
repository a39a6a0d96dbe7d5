"""Seeded randomness.

All random draws go through :class:`numpy.random.PCG64` (a documented 64-bit
permuted congruential generator) seeded with an explicit integer.  Normal
deviates are produced from its uniform doubles with the Box-Muller transform
rather than numpy's ziggurat, so the stream of complex Gaussians depends only
on the PCG64 output sequence.

Per-trial seeds are derived with one splitmix64 step applied to
``seed ^ trial_index``.
"""
import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 output step for state ``x`` (64-bit wraparound)."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(seed: int, trial: int) -> int:
    return splitmix64((seed & _MASK64) ^ trial)


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussians, E|z|^2 = 1, via Box-Muller.

    Each complex entry consumes two uniforms: ``u1`` sets the radius, ``u2``
    the angle.  ``u1`` is taken in (0, 1] to keep the logarithm finite.
    """
    size = int(np.prod(shape, dtype=np.int64))
    u = rng.random(2 * size)
    u1 = 1.0 - u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-np.log(u1))  # sqrt(-2 ln u1) / sqrt(2)
    z = r * np.cos(2.0 * np.pi * u2) + 1j * (r * np.sin(2.0 * np.pi * u2))
    return z.reshape(shape)


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = complex_gaussian(rng, (dim,))
    return v / np.linalg.norm(v)
