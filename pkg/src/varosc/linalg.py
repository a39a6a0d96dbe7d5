"""Dense complex linear algebra on finite-dimensional Hilbert spaces.

Vectors are plain one-dimensional ``complex128`` arrays (see :func:`as_vector`);
operators are wrapped in :class:`Operator`, which carries a role tag that is
checked on construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, InvalidArgument, NotPositiveSemidefinite
from .rng import complex_gaussian, generator

UNITARY, CONTRACTION, GENERAL = "unitary", "contraction", "general"
ROLES = (UNITARY, CONTRACTION, GENERAL)

CONTRACTION_TOL = 1e-9
PSD_CLIP_TOL = 1e-10
HERMITIAN_TOL = 1e-10

_NORM_RTOL = 1e-13
_NORM_MAXITER = 100_000


def unitary_tol(dim: int) -> float:
    return 1e-10 * dim


def as_vector(coords) -> np.ndarray:
    """Validate ``coords`` as an element of C^d and return it as complex128."""
    v = np.asarray(coords, dtype=np.complex128)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size == 0:
        raise InvalidArgument("a vector needs at least one coordinate and must be 1-D")
    if not np.all(np.isfinite(v)):
        raise InvalidArgument("vector coordinates must be finite")
    return v


def norm(v) -> float:
    return float(np.linalg.norm(v))


def _as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidArgument(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class Operator:
    """A square complex matrix with a role tag.

    ``role`` is one of ``"unitary"``, ``"contraction"`` or ``"general"``.
    Unless ``check=False`` the role is verified: unitaries against
    ``1e-10 * dim`` in max-entry residual of ``A*A - I``, contractions against
    ``operator_norm <= 1 + 1e-9``.
    """

    entries: np.ndarray
    role: str = GENERAL
    check: bool = True

    def __post_init__(self):
        m = _as_matrix(self.entries).copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        if self.role not in ROLES:
            raise InvalidArgument(f"unknown role {self.role!r}")
        if not self.check:
            return
        if self.role == UNITARY and not is_unitary(m, unitary_tol(self.dim)):
            raise ContractViolation("matrix is not unitary within tolerance")
        if self.role == CONTRACTION and operator_norm(m) > 1.0 + CONTRACTION_TOL:
            raise ContractViolation("matrix has operator norm above 1")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def H(self) -> np.ndarray:
        return self.entries.conj().T

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return self.entries @ other.entries
        return self.entries @ np.asarray(other)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"Operator(dim={self.dim}, role={self.role!r})"


def _entries(a) -> np.ndarray:
    return a.entries if isinstance(a, Operator) else _as_matrix(a)


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=np.complex128), UNITARY)


def make_diagonal_unitary(phases) -> Operator:
    """Diagonal operator ``diag(exp(i*theta_j))``."""
    ph = np.asarray(phases, dtype=float).ravel()
    if ph.size == 0:
        raise InvalidArgument("phases must be non-empty")
    if not np.all(np.isfinite(ph)):
        raise InvalidArgument("phases must be finite")
    return Operator(np.diag(np.exp(1j * ph)), UNITARY)


def _check_dim(dim) -> int:
    if int(dim) != dim or dim < 1:
        raise InvalidArgument(f"dim must be a positive integer, got {dim!r}")
    return int(dim)


def random_unitary(dim: int, seed: int) -> Operator:
    """Haar unitary from the QR factorization of a complex Gaussian matrix.

    The columns of Q are rephased by ``R_ii / |R_ii|`` so the result does not
    depend on the sign convention of the QR routine.
    """
    dim = _check_dim(dim)
    z = complex_gaussian(generator(seed), (dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return Operator(q, UNITARY)


def random_contraction(dim: int, seed: int, norm_cap: float = 1.0) -> Operator:
    """Complex Gaussian matrix rescaled to operator norm ``norm_cap``."""
    dim = _check_dim(dim)
    if not (0.0 < norm_cap <= 1.0):
        raise InvalidArgument(f"norm_cap must lie in (0, 1], got {norm_cap!r}")
    z = complex_gaussian(generator(seed), (dim, dim))
    s = operator_norm(z)
    return Operator(z * (norm_cap / s), CONTRACTION)


def _rayleigh_iterate(g: np.ndarray, x: np.ndarray) -> float:
    """Largest eigenvalue of the PSD matrix ``g`` by power iteration from ``x``."""
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return 0.0
    x = x / nx
    prev = None
    for _ in range(_NORM_MAXITER):
        y = g @ x
        lam = float(np.vdot(x, y).real)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if prev is not None and abs(lam - prev) <= _NORM_RTOL * abs(lam):
            return lam
        prev = lam
    return lam


def operator_norm(a) -> float:
    """Largest singular value by power iteration on ``A*A``.

    Starts from the normalized all-ones vector.  Power iteration can only
    under-estimate, and ``max_j |A e_j|`` is a lower bound for the norm; when
    the first run lands below that bound (start vector orthogonal to the top
    singular space) it restarts from the all-ones vector perturbed by the
    index-weighted vector ``(1, 2, ..., d)`` times ``i``.
    """
    m = _entries(a)
    g = m.conj().T @ m
    d = m.shape[0]
    lam = _rayleigh_iterate(g, np.ones(d, dtype=np.complex128))
    col_lb = float(np.max(np.real(np.diag(g))))
    if lam < col_lb * (1.0 - 1e-12):
        x = np.ones(d, dtype=np.complex128) + 1j * np.arange(1, d + 1)
        lam = max(lam, _rayleigh_iterate(g, x))
    return float(np.sqrt(max(lam, 0.0)))


def is_unitary(a, tol: float) -> bool:
    m = _entries(a)
    resid = m.conj().T @ m - np.eye(m.shape[0])
    return bool(np.max(np.abs(resid)) <= tol)


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = _entries(a)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def psd_sqrt(h, clip_tol: float = PSD_CLIP_TOL) -> Operator:
    """Hermitian positive semidefinite square root via ``eigh``.

    Eigenvalues in ``[-clip_tol, 0)`` are treated as rounding and clipped to
    zero; anything more negative raises :class:`NotPositiveSemidefinite`.
    """
    m = _entries(h)
    if not is_hermitian(m):
        raise InvalidArgument("psd_sqrt needs a Hermitian matrix")
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    if w.min() < -clip_tol:
        raise NotPositiveSemidefinite(f"eigenvalue {w.min():.3e} below -{clip_tol:g}")
    w = np.sqrt(np.clip(w, 0.0, None))
    s = (v * w) @ v.conj().T
    s = 0.5 * (s + s.conj().T)
    return Operator(s, GENERAL)
