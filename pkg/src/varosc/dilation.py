"""Finite-step unitary dilation of a contraction.

For a contraction T on C^d and N >= 1, :func:`build_dilation` returns a
unitary U on (N+1) copies of C^d with ``P U^j i f = T^j f`` for
``0 <= j <= N``, where ``i`` places C^d as block 0 and ``P`` reads block 0
back.  Block layout (rows, columns indexed by block)::

    (0, 0) = T      (0, N) = D_{T*}
    (1, 0) = D_T    (1, N) = -T*
    (i, i-1) = I    for i = 2..N

Column 0 and column N are orthonormal because ``T*T + D_T^2 = I``,
``TT* + D_{T*}^2 = I`` and ``T* D_{T*} = D_T T*``; the identity blocks shift
the orbit down one block per step, so nothing returns to block 0 before
step N+1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .averages import average_stream, make_plan, variation_sum
from .errors import ContractViolation, InvalidArgument, ResourceError
from .linalg import (
    CONTRACTION_TOL,
    UNITARY,
    Operator,
    as_vector,
    operator_norm,
)
from .rng import generator, random_unit_vector

DIM_BUDGET = 4096
RESIDUAL_TOL = 1e-8


def _entries(T) -> np.ndarray:
    return T.entries if isinstance(T, Operator) else np.atleast_2d(np.asarray(T, dtype=np.complex128))


def defects(T):
    """Defect operators ``D_T = (I - T*T)^{1/2}`` and ``D_{T*} = (I - TT*)^{1/2}``.

    Both come from one SVD ``T = W S V*``: ``D_T = V (1 - S^2)^{1/2} V*`` and
    ``D_{T*} = W (1 - S^2)^{1/2} W*``.  Separate square roots of ``I - T*T``
    and ``I - TT*`` disagree by ~sqrt(eps) when a singular value is 1, which
    breaks the unitarity of the dilation; the shared factorization keeps
    ``T D_T = D_{T*} T`` to rounding.
    """
    t = _entries(T)
    nrm = operator_norm(t)
    if nrm > 1.0 + CONTRACTION_TOL:
        raise ContractViolation(f"operator norm {nrm:.12g} exceeds 1")
    if not t.any():
        eye = np.eye(t.shape[0], dtype=np.complex128)
        return Operator(eye), Operator(eye)
    w, s, vh = np.linalg.svd(t)
    s = np.minimum(s, 1.0)
    r = np.sqrt((1.0 - s) * (1.0 + s))
    d_t = (vh.conj().T * r) @ vh
    d_ts = (w * r) @ w.conj().T
    return Operator(_hermitize(d_t)), Operator(_hermitize(d_ts))


def _hermitize(a):
    return 0.5 * (a + a.conj().T)


def intertwining_residual(T, d_t, d_ts) -> float:
    """``max |T D_T - D_{T*} T|``."""
    t = _entries(T)
    return float(np.max(np.abs(t @ d_t.entries - d_ts.entries @ t)))


@dataclass(frozen=True)
class DilationPack:
    U: Operator
    N: int
    d: int

    def embed(self, f) -> np.ndarray:
        f = as_vector(f)
        if f.size != self.d:
            raise InvalidArgument(f"expected a vector of length {self.d}")
        out = np.zeros((self.N + 1) * self.d, dtype=np.complex128)
        out[: self.d] = f
        return out

    def project(self, v) -> np.ndarray:
        return np.asarray(v)[..., : self.d]


def build_dilation(T, N: int, dim_budget: int = DIM_BUDGET, check: bool = True) -> DilationPack:
    if N < 1:
        raise InvalidArgument("N must be at least 1")
    t = _entries(T)
    d = t.shape[0]
    size = (N + 1) * d
    if size > dim_budget:
        raise ResourceError(f"dilation dimension {size} exceeds budget {dim_budget}", budget=dim_budget)
    d_t, d_ts = defects(t)
    u = np.zeros((size, size), dtype=np.complex128)

    def blk(i, j):
        return (slice(i * d, (i + 1) * d), slice(j * d, (j + 1) * d))

    u[blk(0, 0)] = t
    u[blk(0, N)] = d_ts.entries
    u[blk(1, 0)] = d_t.entries
    u[blk(1, N)] = -t.conj().T
    for i in range(2, N + 1):
        u[blk(i, i - 1)] = np.eye(d)
    return DilationPack(Operator(u, UNITARY, check=check), N, d)


def unitarity_residual(pack: DilationPack) -> float:
    u = pack.U.entries
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def power_errors(pack: DilationPack, T, f) -> np.ndarray:
    """``|P U^j i f - T^j f|`` for j = 0..N."""
    t = _entries(T)
    u = pack.U.entries
    x = pack.embed(f)
    y = as_vector(f).copy()
    errs = np.empty(pack.N + 1)
    for j in range(pack.N + 1):
        errs[j] = np.linalg.norm(pack.project(x) - y)
        x = u @ x
        y = t @ y
    return errs


def dilated_variation(pack: DilationPack, f, nk, p: float = 1.0, projected: bool = True) -> float:
    """Variation of ``P A_n(U) i f`` (or of ``A_n(U) i f`` with ``projected=False``).

    Computed by streaming U in the enlarged space.
    """
    terms = list(nk)
    tr = average_stream(pack.U, pack.embed(f), make_plan(terms))
    a = np.array([pack.project(tr[n]) if projected else tr[n] for n in terms])
    x = np.linalg.norm(np.diff(a, axis=0), axis=1)
    return float(x.sum()) if p == 1 else float((x**p).sum() ** (1.0 / p))


@dataclass
class DilationReport:
    dim: int
    N: int
    unitarity_residual: float
    max_power_error: float
    functional_gap: float | None
    intertwining_residual: float
    unitarity_tol: float
    projection_dominated: bool
    passed: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def verify_dilation(pack: DilationPack, T, trials: int = 20, seed: int = 0, nk=None) -> DilationReport:
    """Residual report; failures are recorded in the report, never raised.

    ``nk`` (all terms <= N) enables the functional comparison between the
    direct T-average variation and the one computed inside the dilation.
    When omitted, the powers of two up to N are used.
    """
    t = _entries(T)
    d_t, d_ts = defects(t)
    rng = generator(seed)
    if nk is None:
        nk = [1 << i for i in range(pack.N.bit_length()) if (1 << i) <= pack.N]
    nk = [n for n in nk if n <= pack.N]
    max_err = 0.0
    gap = 0.0 if len(nk) >= 2 else None
    dominated = True
    for _ in range(trials):
        f = random_unit_vector(rng, pack.d)
        max_err = max(max_err, float(power_errors(pack, t, f).max()))
        if gap is not None:
            direct = variation_sum(t, f, nk, 1.0, method="stream")
            gap = max(gap, abs(direct - dilated_variation(pack, f, nk)))
            # |P| <= 1: the T functional cannot exceed the unprojected U functional
            full = dilated_variation(pack, f, nk, projected=False)
            dominated = dominated and direct <= full * (1 + 1e-12) + 1e-15
    ures = unitarity_residual(pack)
    tol = 1e-10 * (pack.N + 1) * pack.d
    ires = intertwining_residual(t, d_t, d_ts)
    passed = (
        ures <= tol
        and max_err <= RESIDUAL_TOL
        and ires <= RESIDUAL_TOL
        and (gap is None or gap <= RESIDUAL_TOL)
        and dominated
    )
    return DilationReport(pack.d, pack.N, ures, max_err, gap, ires, tol, dominated, passed)


def corrupt(pack: DilationPack, scale: float = 1e-3) -> DilationPack:
    """Copy of ``pack`` with a perturbed defect block (negative control)."""
    u = pack.U.entries.copy()
    d = pack.d
    u[d : 2 * d, :d] *= 1.0 + scale
    return DilationPack(Operator(u, "general", check=False), pack.N, pack.d)
