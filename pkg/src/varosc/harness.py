"""Experiment orchestration and report persistence.

Every experiment is a pure function of its :class:`ExperimentConfig`.  Trials
get their own seed ``trial_seed(seed, i)`` and run on a thread pool; rows are
assembled in trial order, so output files are byte-identical for any worker
count.

CSV column orders are fixed (see ``*_COLUMNS``); floats are written with
17 significant digits so they round-trip exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .averages import DEFAULT_BUDGET, averages, oscillation_sum, variation_sum
from .dilation import build_dilation, verify_dilation
from .errors import InvalidArgument
from .linalg import (
    Operator,
    identity,
    make_diagonal_unitary,
    random_contraction,
    random_unitary,
)
from .rng import generator, random_unit_vector, splitmix64, trial_seed
from .sequences import LacunarySeq, geometric_lacunary, increasing_terms
from .symbol import SweepResult, sweep_sup
from .workers import worker_count

KINDS = ("variation", "oscillation", "sweep", "constant-curve", "diverge", "dilation-check", "roj-check")
TRIAL_COLUMNS = ("trial", "seed", "dim", "op", "value", "f_norm", "ratio")
SWEEP_COLUMNS = ("theta", "total", "I1", "I2", "k0", "tail_bound")
ROJ_BOUND = 25.0


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    return str(x)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


@dataclass
class ExperimentConfig:
    kind: str
    dims: list = field(default_factory=lambda: [4])
    trials: int = 1
    seed: int = 0
    nk: LacunarySeq | tuple | None = None
    M: LacunarySeq | tuple | None = None
    p: float = 1.0
    op: str = "random-unitary"
    steps: int = 32
    method: str = "auto"
    budget: int = DEFAULT_BUDGET
    workers: int | None = None
    require_lacunary: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise InvalidArgument("trials must be >= 1")
        if not self.dims or any(d < 1 for d in self.dims):
            raise InvalidArgument("dims must be a non-empty list of positive integers")
        if self.require_lacunary and self.kind != "diverge":
            for s in (self.nk, self.M):
                if s is not None and not isinstance(s, LacunarySeq):
                    raise InvalidArgument("sequences must be validated LacunarySeq values")

    def echo(self) -> dict:
        def seq(s):
            if s is None:
                return None
            return list(s.terms) if isinstance(s, LacunarySeq) else list(s)

        return {
            "kind": self.kind,
            "dims": list(self.dims),
            "trials": self.trials,
            "seed": self.seed,
            "nk": seq(self.nk),
            "M": seq(self.M),
            "p": self.p,
            "op": self.op,
            "steps": self.steps,
            "method": self.method,
        }


@dataclass
class ExperimentReport:
    rows: list
    summary: dict
    columns: tuple = TRIAL_COLUMNS

    def csv(self) -> str:
        return _csv_text(self.columns, self.rows)

    def json(self) -> str:
        return json.dumps({"summary": self.summary, "rows": [{c: r[c] for c in self.columns} for r in self.rows]},
                          sort_keys=True, default=_json_default)

    def write(self, path, format: str = "csv"):
        path = Path(path)
        if format == "csv":
            path.write_text(self.csv())
            path.with_suffix(".summary.json").write_text(
                json.dumps(self.summary, sort_keys=True, indent=2, default=_json_default)
            )
        elif format == "json":
            path.write_text(self.json())
        else:
            raise InvalidArgument(f"unknown format {format!r}")


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def load_trial_csv(path) -> list:
    """Read a trial CSV back; ``ratio`` is recomputed from ``value`` and ``f_norm``."""
    rows = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            value, f_norm = float(r["value"]), float(r["f_norm"])
            rows.append({**r, "value": value, "f_norm": f_norm, "ratio": float(r["ratio"]),
                         "ratio_recomputed": value / f_norm})
    return rows


# -- operators ---------------------------------------------------------------


def _caps(spec: str) -> list:
    try:
        caps = [float(c) for c in spec.split(",")]
    except ValueError as exc:
        raise InvalidArgument(f"bad norm caps {spec!r}") from exc
    return caps


def make_operator(spec: str, dim: int, seed: int, trial: int = 0) -> Operator:
    """Build an operator from ``identity | diag:<angles> | random-unitary |
    random-contraction:<cap>[,<cap>...]`` (caps are cycled by trial)."""
    if spec == "identity":
        return identity(dim)
    if spec.startswith("diag:"):
        try:
            angles = [float(a) for a in spec[5:].split(",")]
        except ValueError as exc:
            raise InvalidArgument(f"bad angle list in {spec!r}") from exc
        return make_diagonal_unitary(angles)
    if spec == "random-unitary":
        return random_unitary(dim, seed)
    if spec.startswith("random-contraction"):
        caps = _caps(spec.split(":", 1)[1]) if ":" in spec else [1.0]
        return random_contraction(dim, seed, caps[trial % len(caps)])
    raise InvalidArgument(f"unknown operator spec {spec!r}")


def op_label(spec: str, op: Operator, trial: int) -> str:
    if spec.startswith("random-contraction"):
        caps = _caps(spec.split(":", 1)[1]) if ":" in spec else [1.0]
        return f"contraction:{caps[trial % len(caps)]:g}"
    return spec.split(":", 1)[0]


def _map(fn, items, workers):
    w = worker_count(workers)
    if w <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items))


# -- ensembles ---------------------------------------------------------------


def _summary(cfg, rows, extra=None) -> dict:
    ratios = [r["ratio"] for r in rows]
    s = {
        "max_ratio": max(ratios),
        "mean_ratio": math.fsum(ratios) / len(ratios),
        "config": cfg.echo(),
        "code_version": __version__,
    }
    if extra:
        s.update(extra)
    return s


def _trial_row(cfg: ExperimentConfig, t: int) -> dict:
    s = trial_seed(cfg.seed, t)
    dim = cfg.dims[t % len(cfg.dims)]
    op = make_operator(cfg.op, dim, s, t)
    f = random_unit_vector(generator(splitmix64(s)), op.dim)
    kw = {"method": cfg.method, "budget": cfg.budget}
    if cfg.kind == "oscillation":
        value = oscillation_sum(op, f, cfg.nk, cfg.M, **kw)
    else:
        value = variation_sum(op, f, cfg.nk, cfg.p, **kw)
    f_norm = float(np.linalg.norm(f))
    return {"trial": t, "seed": s, "dim": op.dim, "op": op_label(cfg.op, op, t),
            "value": value, "f_norm": f_norm, "ratio": value / f_norm}


def run_variation_ensemble(cfg: ExperimentConfig, bound: float | None = None) -> ExperimentReport:
    """Random operator / unit vector trials of the variation (or oscillation) functional.

    With ``bound`` given, trials whose ratio exceeds it are counted in
    ``summary["violations"]``.
    """
    if cfg.kind not in ("variation", "oscillation"):
        raise InvalidArgument("run_variation_ensemble needs kind variation or oscillation")
    if cfg.nk is None or len(cfg.nk) < 2:
        raise InvalidArgument("nk with at least two terms is required")
    if cfg.kind == "oscillation" and cfg.M is None:
        raise InvalidArgument("oscillation needs M")
    rows = _map(lambda t: _trial_row(cfg, t), range(cfg.trials), cfg.workers)
    extra = {}
    if bound is not None:
        extra = {"bound": bound, "violations": sum(r["ratio"] > bound for r in rows)}
    return ExperimentReport(rows, _summary(cfg, rows, extra))


def domination_bound(sweep: SweepResult) -> float:
    """Sweep supremum plus the tail bound at the maximizing angle."""
    return sweep.sup_estimate + sweep.decomposition.tail_bound


# -- sweep and constant curve ----------------------------------------------


def sweep_rows(res: SweepResult) -> list:
    return [
        {"theta": res.thetas[i], "total": res.totals[i], "I1": res.small[i], "I2": res.large[i],
         "k0": int(res.k0[i]), "tail_bound": res.tails[i]}
        for i in range(res.thetas.size)
    ]


def sweep_report(res: SweepResult) -> ExperimentReport:
    return ExperimentReport(sweep_rows(res), res.summary(), SWEEP_COLUMNS)


def covering_count(beta: float, n_max: int, n1: int = 1) -> int:
    """Number of terms of geometric_lacunary(beta, ., n1) that stay <= n_max."""
    count = 1
    n = n1
    b = float(beta)
    while True:
        nxt = max(math.ceil(b * n), n + 1)
        if nxt > n_max:
            return max(count, 2)
        n = nxt
        count += 1


CURVE_COLUMNS = ("beta", "m_beta", "K", "sup_estimate", "theta_star")


def constant_curve(beta_list, K: int, grid: int, refine: int, m_betas=None, workers=None) -> ExperimentReport:
    """``sup_theta`` of the symbol sum for each beta (and each M ratio, if given).

    ``M`` for ratio ``m_beta`` is the geometric sequence from 1 covering ``n_K``.
    """
    rows = []
    for beta in beta_list:
        nk = geometric_lacunary(beta, K, 1)
        for mb in (m_betas or [None]):
            M = None if mb is None else geometric_lacunary(mb, covering_count(mb, nk.last), 1)
            res = sweep_sup(nk, M, grid, refine, workers=workers)
            rows.append({"beta": float(beta), "m_beta": mb, "K": K,
                         "sup_estimate": res.sup_estimate, "theta_star": res.theta_star})
    summary = {"betas": list(beta_list), "m_betas": m_betas, "K": K, "grid_points": grid,
               "refine_iters": refine, "code_version": __version__}
    return ExperimentReport(rows, summary, CURVE_COLUMNS)


# -- non-lacunary divergence ----------------------------------------------


DIVERGE_COLUMNS = ("N", "V", "harmonic", "log_N", "V_over_log_N")


def harmonic_value(N: int) -> float:
    """Closed form of ``sum_{k=1}^{N-1} |a_{k+1}(-1) - a_k(-1)|``.

    ``a_k(-1)`` is ``-1/k`` for odd k and 0 for even k, so the terms are
    ``1, 1/3, 1/3, 1/5, 1/5, ...``.  For even N this is
    ``1 + 2 sum_{odd m, 3 <= m <= N} 1/m``.
    """
    K = N - 1
    top = K if K % 2 else K - 1
    s = 1.0 if K >= 1 else 0.0
    parts = [s] + [2.0 / m for m in range(3, top + 1, 2)]
    if K >= 2 and K % 2 == 0:
        parts.append(1.0 / (K + 1))
    return math.fsum(parts)


def divergence_demo(N_max: int) -> ExperimentReport:
    """Variation of the ``U = -1`` averages along the non-lacunary ``n_k = k``.

    Reported at N = 10, 100, ... and N_max.  The averages come from one
    operator stream over 1..N_max.
    """
    if N_max < 10:
        raise InvalidArgument("N_max must be at least 10")
    tr = averages([[-1.0]], [1.0], range(1, N_max + 1), method="stream")
    a = tr.averages[:, 0]
    d = np.abs(np.diff(a))
    csum = np.concatenate(([0.0], np.cumsum(d)))  # csum[N-1] = V(N)
    Ns = []
    n = 10
    while n <= N_max:
        Ns.append(n)
        n *= 10
    if Ns[-1] != N_max:
        Ns.append(N_max)
    rows = []
    for N in Ns:
        V = float(csum[N - 1])
        rows.append({"N": N, "V": V, "harmonic": harmonic_value(N), "log_N": math.log(N),
                     "V_over_log_N": V / math.log(N)})
    summary = {"N_max": N_max, "V_at_N_max": rows[-1]["V"], "code_version": __version__}
    return ExperimentReport(rows, summary, DIVERGE_COLUMNS)


# -- cited square-variation bound -------------------------------------------


def _random_increasing(rng, max_len=40, max_gap=50):
    length = int(rng.integers(2, max_len + 1))
    start = int(rng.integers(1, 10))
    gaps = rng.integers(1, max_gap + 1, size=length - 1)
    return (start,) + tuple(int(x) for x in start + np.cumsum(gaps))


def _roj_row(cfg, t):
    s = trial_seed(cfg.seed, t)
    rng = generator(splitmix64(s))
    dim = cfg.dims[t % len(cfg.dims)]
    if cfg.op in ("mixed", "random"):
        spec = "random-unitary" if t % 2 == 0 else "random-contraction:0.5,0.9,1.0"
    else:
        spec = cfg.op
    op = make_operator(spec, dim, s, t // 2)
    terms = increasing_terms(cfg.nk) if cfg.nk is not None else _random_increasing(rng)
    f = random_unit_vector(rng, op.dim)
    value = variation_sum(op, f, terms, 2.0, method=cfg.method, budget=cfg.budget)
    f_norm = float(np.linalg.norm(f))
    return {"trial": t, "seed": s, "dim": op.dim, "op": op_label(spec, op, t // 2),
            "value": value, "f_norm": f_norm, "ratio": value / f_norm}


def roj_check(cfg: ExperimentConfig) -> ExperimentReport:
    """Square variation (p = 2) against the constant 25 along increasing sequences.

    ``cfg.op = "mixed"`` alternates random unitaries and random contractions;
    without ``cfg.nk`` each trial draws its own increasing sequence.  A ratio
    above 25 is recorded in ``summary["findings"]``, never raised.
    """
    rows = _map(lambda t: _roj_row(cfg, t), range(cfg.trials), cfg.workers)
    findings = [r["trial"] for r in rows if r["ratio"] > ROJ_BOUND]
    return ExperimentReport(rows, _summary(cfg, rows, {"bound": ROJ_BOUND, "findings": findings,
                                                       "passed": not findings}))


# -- dilation certification -------------------------------------------------

DILATION_COLUMNS = ("trial", "seed", "dim", "N", "unitarity_residual", "max_power_error",
                    "functional_gap", "intertwining_residual", "passed")


def dilation_check(cfg: ExperimentConfig, f_trials: int = 20) -> ExperimentReport:
    caps = _caps(cfg.op.split(":", 1)[1]) if cfg.op.startswith("random-contraction:") else [1.0]

    def row(t):
        s = trial_seed(cfg.seed, t)
        dim = cfg.dims[t % len(cfg.dims)]
        T = random_contraction(dim, s, caps[t % len(caps)])
        pack = build_dilation(T, cfg.steps)
        rep = verify_dilation(pack, T, f_trials, splitmix64(s))
        return {"trial": t, "seed": s, "dim": dim, "N": cfg.steps, **{
            k: getattr(rep, k) for k in DILATION_COLUMNS[4:]}}

    rows = _map(row, range(cfg.trials), cfg.workers)
    summary = {
        "max_unitarity_residual": max(r["unitarity_residual"] for r in rows),
        "max_power_error": max(r["max_power_error"] for r in rows),
        "max_functional_gap": max(r["functional_gap"] or 0.0 for r in rows),
        "passed": all(r["passed"] for r in rows),
        "config": cfg.echo(),
        "code_version": __version__,
    }
    return ExperimentReport(rows, summary, DILATION_COLUMNS)


# -- pinned baselines ---------------------------------------------------------


def load_baselines() -> dict:
    return json.loads(resources.files("varosc").joinpath("data/baselines.json").read_text())


def make_baselines(grid=100_000, refine=40) -> dict:
    """Recompute the pinned sweep baselines (run once, then checked in)."""
    nk = geometric_lacunary(2.0, 30, 1)
    M = geometric_lacunary(3.0, covering_count(3.0, nk.last), 1)
    var = sweep_sup(nk, None, grid, refine)
    osc = sweep_sup(nk, M, grid, refine)
    return {
        "variation_beta2": {**var.summary(), "seq": "geometric:2:30"},
        "oscillation_beta2_m3": {**osc.summary(), "seq": "geometric:2:30",
                                  "m_seq": f"geometric:3:{len(M)}"},
    }
