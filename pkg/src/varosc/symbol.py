"""The scalar side: a_n(e^{i theta}) and its variation/oscillation sums.

``symbol(n, theta)`` is the Cesaro mean ``(1/n) sum_{j=1}^n e^{i j theta}``
evaluated through the Dirichlet-kernel ratio
``e^{i theta (n+1)/2} sin(n theta/2) / (n sin(theta/2))``, which stays
accurate for small ``theta`` where ``(gamma^n - 1)/(gamma - 1)`` cancels.

Everything here works on the reduced angle range (0, pi]; use
:func:`reduce_angle` to fold (pi, 2 pi) onto it by conjugation.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import InvalidArgument
from .sequences import LacunarySeq, window, window_owner
from .workers import worker_count

CHUNK = 4096
TOP_BRACKETS = 5
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _check_theta(theta):
    th = np.asarray(theta, dtype=float)
    if not np.all((th > 0.0) & (th <= math.pi)):
        raise InvalidArgument("theta must lie in (0, pi]; reduce with reduce_angle first")
    return th


def reduce_angle(theta: float) -> float:
    """Map theta in (0, 2 pi) to its representative in (0, pi].

    For theta in (pi, 2 pi) the conjugate point 2 pi - theta is returned; the
    symbol sums only see moduli of differences, which conjugation preserves.
    """
    t = math.fmod(theta, 2.0 * math.pi)
    if t < 0:
        t += 2.0 * math.pi
    if t == 0.0:
        raise InvalidArgument("theta = 0 is the fixed point gamma = 1 (a_n(1) = 1)")
    return t if t <= math.pi else 2.0 * math.pi - t


def symbol(n, theta):
    """Closed form of ``(1/n) sum_{j=1}^n e^{i j theta}``; broadcasts."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 1):
        raise InvalidArgument("n must be a positive integer")
    th = _check_theta(theta)
    half = 0.5 * th
    out = np.exp(1j * (half * (n + 1.0))) * (np.sin(n * half) / (n * np.sin(half)))
    return out[()] if out.ndim == 0 else out


def symbol_at(n: int, theta: float) -> complex:
    """``a_n(e^{i theta})`` for any real theta, with ``a_n(1) = 1``.

    Angles in (pi, 2 pi) are folded onto (0, pi] and the conjugate is
    returned, since ``a_n(conj gamma) = conj a_n(gamma)``.
    """
    t = math.fmod(theta, 2.0 * math.pi)
    if t < 0:
        t += 2.0 * math.pi
    if t == 0.0:
        return 1.0 + 0.0j
    if t <= math.pi:
        return complex(symbol(n, t))
    return complex(symbol(n, 2.0 * math.pi - t)).conjugate()


def symbol_direct(n: int, theta: float) -> complex:
    """Direct summation of the Cesaro mean; the reference for :func:`symbol`."""
    j = np.arange(1, int(n) + 1, dtype=float)
    return complex(np.exp(1j * j * theta).sum() / n)


def _terms(seq):
    return np.asarray(seq.terms if isinstance(seq, LacunarySeq) else list(seq), dtype=float)


def symbol_variation(nk, theta) -> float:
    """``sum_k |a_{n_{k+1}} - a_{n_k}|`` at one angle."""
    th = float(_check_theta(theta))
    a = symbol(_terms(nk), th)
    return float(np.abs(np.diff(a)).sum())


def symbol_oscillation(nk, M, theta) -> float:
    """``sum_k max_{m in M, n_k <= m < n_{k+1}} |a_m - a_{n_k}|``; empty windows add 0."""
    th = float(_check_theta(theta))
    terms = list(nk.terms if isinstance(nk, LacunarySeq) else nk)
    total = 0.0
    for lo, hi in zip(terms, terms[1:]):
        ms = window(M, lo, hi)
        if ms:
            a_lo = symbol(lo, th)
            total += float(np.max(np.abs(symbol(np.asarray(ms, dtype=float), th) - a_lo)))
    return total


def tail_bound(nk, theta) -> float:
    """Upper bound on the part of the infinite sum beyond the last term.

    Uses ``|a_n| <= 2/(n |1 - gamma|) <= 8/(n theta)`` and geometric growth of
    the continuation at ratio ``beta_certified``: each discarded term is at
    most ``16/(n_k theta)``, summing to ``16 beta / ((beta - 1) theta n_K)``.
    """
    beta = nk.beta_certified
    if not beta > 1 or math.isinf(beta):
        return math.inf
    return 16.0 * beta / ((beta - 1.0) * theta * nk.last)


@dataclass(frozen=True)
class SymbolDecomposition:
    """Split of the symbol sum at the first k with ``theta * n_k >= 1``.

    ``k0`` is 1-based (``None`` if ``theta * n_K < 1``).  ``I1`` collects the
    terms with ``theta * n_k < 1``, ``I2`` the rest.
    """

    theta: float
    k0: int | None
    I1: float
    I2: float
    total: float
    tail_bound: float


def _grid_eval(nk, M, thetas, workers=None):
    """Evaluate (total, small, large, k0) over ``thetas``.

    The grid is cut into fixed CHUNK-sized pieces independent of the worker
    count, so results are bitwise identical for any pool size.
    """
    terms = _terms(nk)
    thetas = np.ascontiguousarray(thetas, dtype=float)
    if M is None:
        fn = lambda th: kernels.variation_grid(terms, th)  # noqa: E731
    else:
        mvals = _terms(M)
        owner = np.asarray(window_owner(nk, M), dtype=np.int64)
        fn = lambda th: kernels.oscillation_grid(terms, mvals, owner, th)  # noqa: E731
    chunks = [thetas[i:i + CHUNK] for i in range(0, thetas.size, CHUNK)]
    w = worker_count(workers)
    if w <= 1 or len(chunks) <= 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=w) as ex:
            parts = list(ex.map(fn, chunks))
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(4))


def decompose(nk, theta, M=None) -> SymbolDecomposition:
    """I1/I2 split of the variation sum (or oscillation sum when ``M`` given)."""
    th = float(_check_theta(theta))
    total, small, large, k0 = _grid_eval(nk, M, np.array([th]), workers=1)
    k = int(k0[0])
    return SymbolDecomposition(
        theta=th,
        k0=k if k > 0 else None,
        I1=float(small[0]),
        I2=float(large[0]),
        total=float(total[0]),
        tail_bound=tail_bound(nk, th),
    )


# -- inequality audits ----------------------------------------------------


@dataclass
class AuditReport:
    name: str
    points: int
    passed: bool
    min_slack: float
    argmin: float
    violations: int = 0
    first_violation: float | None = None
    max_excess: float = 0.0
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        d = {k: v for k, v in self.__dict__.items() if k != "extra"}
        d.update(self.extra)
        return d


def chord_lower_bound_audit(theta_grid) -> AuditReport:
    """Check ``|e^{i theta} - 1| = 2 sin(theta/2) >= theta/4`` on a grid."""
    th = _check_theta(np.atleast_1d(theta_grid))
    chord = 2.0 * np.sin(0.5 * th)
    slack = chord - 0.25 * th
    bad = slack < 0
    i = int(np.argmin(slack))
    return AuditReport(
        name="chord",
        points=th.size,
        passed=not bad.any(),
        min_slack=float(slack[i]),
        argmin=float(th[i]),
        violations=int(bad.sum()),
        first_violation=float(th[bad][0]) if bad.any() else None,
        max_excess=float(max(0.0, -slack.min())),
    )


def kernel_value(x):
    """``F(x) = (e^{ix} - 1)/x`` with expm1 for small arguments."""
    x = np.asarray(x, dtype=float)
    return np.expm1(1j * x) / x


def kernel_derivative(x):
    """Analytic ``F'(x) = (i x e^{ix} - (e^{ix} - 1)) / x^2``."""
    x = np.asarray(x, dtype=float)
    e = np.exp(1j * x)
    return (1j * x * e - np.expm1(1j * x)) / (x * x)


def kernel_audit(x_grid, bound_offset: float = 1.0, fd_rtol: float = 1e-4) -> AuditReport:
    """Check ``|F'(x)| <= (x + bound_offset)/x^2`` and F' against finite differences.

    ``bound_offset=1`` is the stated bound.  ``|F'(x)| x^2 = |i x - 1 + e^{-ix}|``
    exceeds ``x + 1`` wherever ``1 - 2 cos x - 2 x sin x > 2x`` (first near
    x = 3.8955), so the report lists violations; ``bound_offset=2`` follows from
    the triangle inequality and holds everywhere.
    """
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if not np.all(x > 0):
        raise InvalidArgument("kernel_audit needs x > 0")
    fp = kernel_derivative(x)
    mag = np.abs(fp)
    bound = (x + bound_offset) / (x * x)
    # compare in the scaled form |F'| x^2 <= x + c to avoid overflow at tiny x
    slack = (x + bound_offset) - mag * x * x
    bad = slack < 0
    h = np.maximum(1e-6, 1e-8 * x)
    fd = (kernel_value(x + h) - kernel_value(x - h)) / (2.0 * h)
    fd_rel = np.abs(fd - fp) / np.abs(fp)
    i = int(np.argmin(slack))
    return AuditReport(
        name=f"kernel_derivative(x+{bound_offset:g})",
        points=x.size,
        passed=bool(not bad.any() and fd_rel.max() <= fd_rtol),
        min_slack=float(slack[i] / (x[i] * x[i])),
        argmin=float(x[i]),
        violations=int(bad.sum()),
        first_violation=float(x[bad][0]) if bad.any() else None,
        max_excess=float(np.max(np.where(bad, mag / bound - 1.0, 0.0))),
        extra={"fd_max_rel_err": float(fd_rel.max()), "fd_passed": bool(fd_rel.max() <= fd_rtol)},
    )


# -- supremum sweep ---------------------------------------------------------


@dataclass
class SweepResult:
    """Estimated supremum over theta of a symbol functional.

    ``sup_estimate`` is a lower bound for the true supremum of the finite sum
    (it is a maximum over evaluated points).  ``thetas`` and the per-theta
    arrays describe the initial grid.
    """

    sup_estimate: float
    theta_star: float
    decomposition: SymbolDecomposition
    beta: float
    K: int
    grid_points: int
    refine_iters: int
    theta_min: float
    theta_max: float
    kind: str
    thetas: np.ndarray = field(repr=False)
    totals: np.ndarray = field(repr=False)
    small: np.ndarray = field(repr=False)
    large: np.ndarray = field(repr=False)
    k0: np.ndarray = field(repr=False)
    tails: np.ndarray = field(repr=False)
    evaluations: int = 0

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "sup_estimate": self.sup_estimate,
            "theta_star": self.theta_star,
            "beta": self.beta,
            "K": self.K,
            "grid_points": self.grid_points,
            "refine_iters": self.refine_iters,
            "theta_min": self.theta_min,
            "theta_max": self.theta_max,
            "tail_bound_at_star": self.decomposition.tail_bound,
            "max_tail_bound": float(self.tails.max()),
        }


def _better(v, t, best_v, best_t):
    return v > best_v or (v == best_v and t < best_t)


def _golden_max(f, lo, hi, iters):
    """Golden-section search for a maximum of ``f`` on [lo, hi] (log-theta).

    Returns every evaluated (theta, value) pair; the caller takes the best.
    """
    seen = []
    a, b = math.log(lo), math.log(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(math.exp(c)), f(math.exp(d))
    seen += [(math.exp(c), fc), (math.exp(d), fd)]
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(math.exp(c))
            seen.append((math.exp(c), fc))
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(math.exp(d))
            seen.append((math.exp(d), fd))
    return seen


def sweep_sup(
    nk: LacunarySeq,
    M: LacunarySeq | None = None,
    grid_points: int = 100_000,
    refine_iters: int = 40,
    theta_min: float | None = None,
    theta_max: float = math.pi,
    workers: int | None = None,
) -> SweepResult:
    """Estimate ``sup_theta`` of the variation (or oscillation) symbol sum.

    A log-uniform grid over ``[theta_min, theta_max]`` (default
    ``theta_min = 1/(10 n_K)``) is evaluated first.  The five best local
    maxima of the grid each get ``refine_iters`` golden-section steps inside
    their neighbouring grid cells.  Ties go to the smallest theta.
    """
    if grid_points < 2:
        raise InvalidArgument("grid_points must be at least 2")
    if refine_iters < 0:
        raise InvalidArgument("refine_iters must be non-negative")
    if len(nk) < 2:
        raise InvalidArgument("need at least two terms")
    if theta_min is None:
        theta_min = 1.0 / (10.0 * nk.last)
    if not (0.0 < theta_min < theta_max <= math.pi):
        raise InvalidArgument(f"degenerate theta range [{theta_min}, {theta_max}]")

    thetas = np.geomspace(theta_min, theta_max, grid_points)
    thetas[0], thetas[-1] = theta_min, theta_max
    totals, small, large, k0 = _grid_eval(nk, M, thetas, workers)
    tails = 16.0 * nk.beta_certified / ((nk.beta_certified - 1.0) * thetas * nk.last)

    i_best = int(np.argmax(totals))  # argmax returns the first, i.e. smallest theta
    best_v, best_t = float(totals[i_best]), float(thetas[i_best])

    def f(t):
        return float(_grid_eval(nk, M, np.array([t]), workers=1)[0][0])

    evaluations = grid_points
    if refine_iters > 0:
        left = np.concatenate(([-np.inf], totals[:-1]))
        right = np.concatenate((totals[1:], [-np.inf]))
        peaks = np.flatnonzero((totals >= left) & (totals >= right))
        order = np.lexsort((thetas[peaks], -totals[peaks]))
        for i in peaks[order][:TOP_BRACKETS]:
            lo = thetas[max(i - 1, 0)]
            hi = thetas[min(i + 1, grid_points - 1)]
            if not lo < hi:
                continue
            for t, v in _golden_max(f, lo, hi, refine_iters):
                evaluations += 1
                if _better(v, t, best_v, best_t):
                    best_v, best_t = v, t

    return SweepResult(
        sup_estimate=best_v,
        theta_star=best_t,
        decomposition=decompose(nk, best_t, M),
        beta=nk.beta_certified,
        K=len(nk),
        grid_points=grid_points,
        refine_iters=refine_iters,
        theta_min=float(theta_min),
        theta_max=float(theta_max),
        kind="variation" if M is None else "oscillation",
        thetas=thetas,
        totals=totals,
        small=small,
        large=large,
        k0=k0,
        tails=tails,
        evaluations=evaluations,
    )
