"""Adaptive sieving: solve the regularized problem over a growing index set.

Each round solves the problem restricted to the current index set, measures
the full-dimension proximal residual R at the assembled point, and, while
``||R|| > eps``, grows the set with the largest off-set residual entries
(at most ``k_max`` per round). Rounds where no off-set entry exceeds the
zero threshold re-solve the current set at a tighter tolerance, which drives
the full residual down since an exact reduced solve with an empty candidate
set already solves the full problem.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .inner import InnerConfig, InnerSolveResult, residual_R, solve_reduced, _zero_result
from .problem import ProblemData
from .regularizers import Regularizer


@dataclass
class SieveConfig:
    eps: float = 1e-8        # full-dimension residual tolerance, unnormalized
    k_max: int = 500         # coordinates added per round
    max_rounds: int = 100

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


@dataclass
class SieveRound:
    size_I: int
    r_norm: float
    size_J: int
    added: int
    inner_iters: int


@dataclass
class SieveTrace:
    rounds: list[SieveRound] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["round", "size_I", "r_norm", "size_J", "added", "inner_iters"])
            for s, r in enumerate(self.rounds):
                w.writerow([s, r.size_I, r.r_norm, r.size_J, r.added, r.inner_iters])


def select_top_k(residual, candidates, k: int) -> np.ndarray:
    """The k candidate indices with largest ``|residual|``, ties to the smaller index."""
    candidates = np.sort(np.asarray(candidates, dtype=np.int64))
    if k > candidates.size:
        raise ValueError("k exceeds the candidate count")
    mags = np.abs(np.asarray(residual)[candidates])
    order = np.argsort(-mags, kind="stable")  # stable: ties keep ascending index
    return np.sort(candidates[order[:k]])


def sieve_solve(
    data: ProblemData,
    reg: Regularizer,
    lam: float,
    initial_set,
    cfg: SieveConfig | None = None,
    x0=None,
    inner_cfg: InnerConfig | None = None,
):
    """Solve the lam-regularized problem through reduced subproblems.

    Parameters
    ----------
    initial_set : array-like of int
        Starting index set; may be empty, in which case the first round
        evaluates the residual at zero and seeds the set from its largest
        entries.

    Returns
    -------
    (InnerSolveResult, SieveTrace)
        Full-dimension result with ``||R(x)|| <= eps`` on success, and the
        per-round log.
    """
    cfg = cfg or SieveConfig()
    inner_cfg = inner_cfg or InnerConfig()
    n = data.A.n
    I = np.unique(np.asarray(initial_set, dtype=np.int64))
    if I.size and (I.min() < 0 or I.max() >= n):
        raise ValueError("initial index set out of range")

    # treat roundoff-sized residual entries as zero when building J
    zero_thresh = max(1e-12, 1e-3 * cfg.eps)
    round_tol = max(cfg.eps, 1e-15)
    trace = SieveTrace()
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    result = None
    total_iters = 0
    converged = False

    for _ in range(cfg.max_rounds):
        if I.size:
            result = solve_reduced(
                data, reg, lam, I, x0=x, cfg=replace(inner_cfg, kkt_tol=round_tol)
            )
        else:
            result = _zero_result(data, reg, lam)
        total_iters += result.iters
        x = result.x
        grad = data.A.rmatvec(data.A.matvec(x) - data.b)
        R = residual_R(x, grad, reg, lam)
        r_norm = float(np.linalg.norm(R))
        if r_norm <= cfg.eps:
            trace.rounds.append(SieveRound(I.size, r_norm, 0, 0, result.iters))
            converged = True
            break
        off = np.ones(n, dtype=bool)
        off[I] = False
        J = np.flatnonzero(off & (np.abs(R) > zero_thresh))
        if J.size == 0:
            # residual mass sits inside I: repeat the round more accurately
            trace.rounds.append(SieveRound(I.size, r_norm, 0, 0, result.iters))
            round_tol *= 0.1
            continue
        add = select_top_k(R, J, min(J.size, cfg.k_max))
        trace.rounds.append(SieveRound(I.size, r_norm, J.size, add.size, result.iters))
        I = np.union1d(I, add)

    y = data.b - data.A.matvec(x)
    phi = float(np.linalg.norm(y))
    den = 1.0 + float(np.linalg.norm(x)) + phi
    final = InnerSolveResult(
        x=x,
        y=y,
        phi=phi,
        eta_l=float(np.linalg.norm(R)) / den,
        iters=total_iters,
        objective=0.5 * phi * phi + lam * reg.value(x),
        converged=converged,
        trace=result.trace if result is not None else [],
    )
    return final, trace
