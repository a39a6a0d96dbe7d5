"""Lacunary index sequences and window queries."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import InvalidArgument, NotLacunaryError, ResourceError

INT64_MAX = (1 << 63) - 1


@dataclass(frozen=True)
class LacunarySeq:
    """Strictly increasing positive integers with a certified ratio bound.

    ``beta_certified`` is the minimum consecutive ratio of ``terms``;
    ``beta_claimed`` is the ratio the sequence was requested with (equal to
    the certified value for sequences that were only validated).
    """

    terms: tuple
    beta_claimed: float
    beta_certified: float

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    @property
    def last(self) -> int:
        return self.terms[-1]


def _min_ratio(terms) -> Fraction:
    return min(Fraction(b, a) for a, b in zip(terms, terms[1:]))


def geometric_lacunary(beta: float, count: int, n1: int = 1) -> LacunarySeq:
    """Build ``n_{k+1} = max(ceil(beta * n_k), n_k + 1)`` starting at ``n1``.

    The ceiling is taken on the exact rational value of ``beta`` so the
    certified ratio never drops below ``beta``.  Terms beyond int64 raise
    :class:`ResourceError`.
    """
    if not beta > 1:
        raise NotLacunaryError(f"beta must exceed 1, got {beta!r}")
    if count < 2:
        raise InvalidArgument("count must be at least 2")
    if n1 < 1:
        raise InvalidArgument("n1 must be a positive integer")
    b = Fraction(beta)
    terms = [int(n1)]
    for _ in range(count - 1):
        n = terms[-1]
        nxt = max(math.ceil(b * n), n + 1)
        if nxt > INT64_MAX:
            raise ResourceError(
                f"term {len(terms) + 1} of geometric:{beta}:{count} overflows int64",
                budget=INT64_MAX,
            )
        terms.append(nxt)
    cert = _min_ratio(terms)
    return LacunarySeq(tuple(terms), float(beta), float(cert))


def validate_lacunary(terms) -> float:
    """Return the minimum consecutive ratio of ``terms`` if it exceeds 1.

    A one-element list carries no ratio and certifies as ``inf``.
    """
    terms = [int(t) for t in terms]
    if not terms:
        raise InvalidArgument("sequence is empty")
    if terms[0] < 1:
        raise NotLacunaryError("terms must be positive integers", index=0)
    for i in range(1, len(terms)):
        # integer cross-multiplication: t_i / t_{i-1} > 1  <=>  t_i > t_{i-1}
        if terms[i] <= terms[i - 1]:
            raise NotLacunaryError(
                f"ratio at index {i} is {terms[i]}/{terms[i - 1]} <= 1", index=i
            )
    if len(terms) == 1:
        return math.inf
    return float(_min_ratio(terms))


def from_terms(terms, min_beta: float | None = None) -> LacunarySeq:
    terms = tuple(int(t) for t in terms)
    cert = validate_lacunary(terms)
    if min_beta is not None and cert < min_beta:
        raise NotLacunaryError(
            f"certified beta {cert:.6g} is below the required {min_beta:g}"
        )
    return LacunarySeq(terms, cert, cert)


def window(M, lo: int, hi: int) -> list:
    """Terms ``m`` of ``M`` with ``lo <= m < hi``, ascending."""
    if lo > hi:
        raise InvalidArgument(f"window bounds reversed: {lo} > {hi}")
    terms = M.terms if isinstance(M, LacunarySeq) else list(M)
    i = bisect.bisect_left(terms, lo)
    j = bisect.bisect_left(terms, hi)
    return list(terms[i:j])


def window_owner(nk, M) -> list:
    """For each m in M, the 0-based k with ``nk[k] <= m < nk[k+1]``, or -1."""
    terms = nk.terms if isinstance(nk, LacunarySeq) else list(nk)
    out = []
    for m in M:
        k = bisect.bisect_right(terms, m) - 1
        out.append(k if 0 <= k < len(terms) - 1 else -1)
    return out


def parse_seq(spec: str, min_beta: float | None = None) -> LacunarySeq:
    """Parse ``geometric:<beta>:<count>[:<n1>]`` or a comma-separated list."""
    spec = spec.strip()
    if spec.startswith("geometric:"):
        parts = spec.split(":")[1:]
        if len(parts) not in (2, 3):
            raise InvalidArgument(f"bad sequence spec {spec!r}")
        try:
            beta = float(parts[0])
            count = int(parts[1])
            n1 = int(parts[2]) if len(parts) == 3 else 1
        except ValueError as exc:
            raise InvalidArgument(f"bad sequence spec {spec!r}") from exc
        seq = geometric_lacunary(beta, count, n1)
        if min_beta is not None and seq.beta_certified < min_beta:
            raise NotLacunaryError(
                f"certified beta {seq.beta_certified:.6g} is below {min_beta:g}"
            )
        return seq
    try:
        terms = [int(t) for t in spec.split(",") if t.strip()]
    except ValueError as exc:
        raise InvalidArgument(f"bad sequence spec {spec!r}") from exc
    return from_terms(terms, min_beta)


def read_seq_file(path, min_beta: float | None = None) -> LacunarySeq:
    lines = Path(path).read_text().split()
    try:
        terms = [int(t) for t in lines]
    except ValueError as exc:
        raise InvalidArgument(f"{path}: expected one integer per line") from exc
    return from_terms(terms, min_beta)


def increasing_terms(terms) -> tuple:
    """Check strict increase only; used where lacunarity is not required."""
    terms = tuple(int(t) for t in terms)
    if not terms or terms[0] < 1:
        raise InvalidArgument("need a non-empty list of positive integers")
    for i in range(1, len(terms)):
        if terms[i] <= terms[i - 1]:
            raise InvalidArgument(f"sequence not strictly increasing at index {i}")
    return terms
