"""Ergodic averages ``A_n f = (1/n) sum_{j=1}^n B^j f`` and their functionals.

Two engines produce the averages at a sorted set of checkpoints:

* :func:`average_stream` walks ``g_j = B g_{j-1}`` once up to ``n_max`` and
  keeps a running sum; it performs exactly ``n_max`` matrix-vector products.
* :func:`average_doubling` precomputes ``B^{2^i}`` and ``sum_{j=1}^{2^i} B^j``
  and jumps between checkpoints along the binary expansion of each gap, at
  ``O(log n_max)`` cost per checkpoint.  It is what makes sequences such as
  ``2^k`` with ``n_K = 2^29`` affordable at dimension 16.

``method="auto"`` streams while ``n_max * dim^2`` is small and switches to
doubling above that.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from ._fallback import real_divide
from .errors import ContractViolation, InvalidArgument, ResourceError
from .linalg import CONTRACTION_TOL, Operator, as_vector, operator_norm
from .sequences import LacunarySeq, window

DEFAULT_BUDGET = 2**34
AUTO_STREAM_LIMIT = 2**24
METHODS = ("auto", "stream", "doubling")


@dataclass(frozen=True)
class CheckpointPlan:
    indices: tuple

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if not idx or idx[0] < 1:
            raise InvalidArgument("checkpoints must be a non-empty set of positive integers")
        object.__setattr__(self, "indices", idx)

    @property
    def n_max(self) -> int:
        return self.indices[-1]


def make_plan(nk, M=None) -> CheckpointPlan:
    """Checkpoints for ``nk`` plus every ``m in M`` that falls in some window."""
    terms = list(nk)
    idx = set(terms)
    if M is not None:
        for lo, hi in zip(terms, terms[1:]):
            idx.update(window(M, lo, hi))
    return CheckpointPlan(tuple(idx))


@dataclass(frozen=True)
class AverageTrace:
    indices: np.ndarray
    averages: np.ndarray
    matvecs: int = 0

    def __post_init__(self):
        object.__setattr__(self, "_pos", {int(n): i for i, n in enumerate(self.indices)})

    def __getitem__(self, n) -> np.ndarray:
        return self.averages[self._pos[int(n)]]

    def __len__(self):
        return len(self.indices)

    def to_csv(self, path, coords: bool = True):
        """Rows ``n, re_0, im_0, re_1, im_1, ...`` (or ``n, norm`` without coords)."""
        d = self.averages.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            if coords:
                w.writerow(["n"] + [f"{p}_{i}" for i in range(d) for p in ("re", "im")])
            else:
                w.writerow(["n", "norm"])
            for n, row in zip(self.indices, self.averages):
                if coords:
                    vals = [f"{x:.17g}" for z in row for x in (z.real, z.imag)]
                else:
                    vals = [f"{np.linalg.norm(row):.17g}"]
                w.writerow([int(n)] + vals)


def _matrix(B) -> np.ndarray:
    if isinstance(B, Operator):
        return B.entries
    m = np.asarray(B, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    return m


def _setup(B, f, plan):
    m = _matrix(B)
    v = as_vector(f)
    if m.ndim != 2 or m.shape != (v.size, v.size):
        raise InvalidArgument(f"dimension mismatch: operator {m.shape}, vector {v.shape}")
    if not isinstance(plan, CheckpointPlan):
        plan = CheckpointPlan(tuple(plan))
    return m, v, plan


def average_stream(B, f, plan, budget: int = DEFAULT_BUDGET, compensated: bool = False) -> AverageTrace:
    """Single pass over ``j = 1..n_max`` emitting ``S_n / n`` at each checkpoint.

    Raises :class:`ResourceError` when ``n_max * dim^2`` exceeds ``budget``.
    ``compensated`` switches the running sum to Kahan summation.
    """
    m, v, plan = _setup(B, f, plan)
    work = plan.n_max * v.size * v.size
    if work > budget:
        raise ResourceError(
            f"stream work n_max*dim^2 = {work} exceeds budget {budget}", budget=budget
        )
    cps = np.asarray(plan.indices, dtype=np.int64)
    out = kernels.stream_averages(m, v, cps, compensated)
    return AverageTrace(cps, out, matvecs=plan.n_max)


def average_doubling(B, f, plan) -> AverageTrace:
    """Checkpoint averages from power-of-two tables of ``B^j`` and their sums."""
    m, v, plan = _setup(B, f, plan)
    n_max = plan.n_max
    powers, sums = [m], [m.copy()]  # B^{2^i}, sum_{j=1}^{2^i} B^j
    while (1 << len(powers)) <= n_max:
        p, s = powers[-1], sums[-1]
        sums.append(s + p @ s)
        powers.append(p @ p)
    g = v.copy()  # B^n f
    s = np.zeros_like(v)  # sum_{j=1}^n B^j f
    n = 0
    out = np.empty((len(plan.indices), v.size), dtype=np.complex128)
    matvecs = 0
    for r, target in enumerate(plan.indices):
        gap = target - n
        i = 0
        while gap:
            if gap & 1:
                s = s + sums[i] @ g
                g = powers[i] @ g
                matvecs += 2
            gap >>= 1
            i += 1
        n = target
        out[r] = real_divide(s, float(n))
    return AverageTrace(np.asarray(plan.indices, dtype=np.int64), out, matvecs=matvecs)


def averages(B, f, plan, method: str = "auto", budget: int = DEFAULT_BUDGET, compensated: bool = False) -> AverageTrace:
    if method not in METHODS:
        raise InvalidArgument(f"method must be one of {METHODS}")
    m, v, plan = _setup(B, f, plan)
    if method == "auto":
        work = plan.n_max * v.size * v.size
        method = "stream" if work <= min(budget, AUTO_STREAM_LIMIT) else "doubling"
    if method == "stream":
        return average_stream(m, v, plan, budget=budget, compensated=compensated)
    return average_doubling(m, v, plan)


def _terms(seq):
    return list(seq.terms if isinstance(seq, LacunarySeq) else seq)


def variation_terms(B, f, nk, **kw) -> np.ndarray:
    """``||A_{n_{k+1}} f - A_{n_k} f||`` for k = 1..K-1."""
    terms = _terms(nk)
    if len(terms) < 2:
        raise InvalidArgument("need at least two terms")
    tr = averages(B, f, make_plan(terms), **kw)
    a = np.array([tr[n] for n in terms])
    return np.linalg.norm(np.diff(a, axis=0), axis=1)


def _pnorm(x: np.ndarray, p: float) -> float:
    if p == 1:
        return float(x.sum())
    return float((x**p).sum() ** (1.0 / p))


def variation_sum(B, f, nk, p: float = 1.0, **kw) -> float:
    """``(sum_k ||A_{n_{k+1}} f - A_{n_k} f||^p)^{1/p}`` over the finite sequence."""
    if not p >= 1:
        raise InvalidArgument(f"p must be >= 1, got {p!r}")
    return _pnorm(variation_terms(B, f, nk, **kw), p)


def oscillation_terms(B, f, nk, M, **kw) -> np.ndarray:
    """Per-window ``max_m ||A_m f - A_{n_k} f||``; empty windows give 0."""
    terms = _terms(nk)
    if len(terms) < 2:
        raise InvalidArgument("need at least two terms")
    tr = averages(B, f, make_plan(terms, M), **kw)
    out = np.zeros(len(terms) - 1)
    for k, (lo, hi) in enumerate(zip(terms, terms[1:])):
        base = tr[lo]
        for m in window(M, lo, hi):
            out[k] = max(out[k], float(np.linalg.norm(tr[m] - base)))
    return out


def oscillation_sum(B, f, nk, M, **kw) -> float:
    return float(oscillation_terms(B, f, nk, M, **kw).sum())


def _require_contraction(T):
    nrm = operator_norm(_matrix(T))
    if nrm > 1.0 + CONTRACTION_TOL:
        raise ContractViolation(f"operator norm {nrm:.12g} exceeds 1 + {CONTRACTION_TOL:g}")


def contraction_variation(T, f, nk, p: float = 1.0, **kw) -> float:
    """Variation functional of ``A_n(T) f``; powers of T are used directly."""
    _require_contraction(T)
    return variation_sum(T, f, nk, p, **kw)


def contraction_oscillation(T, f, nk, M, **kw) -> float:
    _require_contraction(T)
    return oscillation_sum(T, f, nk, M, **kw)
